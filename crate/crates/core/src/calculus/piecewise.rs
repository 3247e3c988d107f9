use super::polynomial::Polynomial;
use crate::error::{Error, Result};

/// Samples per piece when a non-polynomial expression is tabulated.
pub const TABLE_SAMPLES: usize = 129;

/// Tabulated function with linear interpolation between samples.
#[derive(Clone, Debug, PartialEq)]
pub struct Tabulated {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Tabulated {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ys.len() {
            return Err(Error::Structural("tabulated piece needs >= 2 matching samples".into()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Structural("tabulated abscissae must increase".into()));
        }
        Ok(Tabulated { xs, ys })
    }

    /// Uniform sampling of `f` on [a, b].
    pub fn sample<F: Fn(f64) -> f64>(a: f64, b: f64, f: F) -> Self {
        let n = TABLE_SAMPLES;
        let xs: Vec<f64> = (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect();
        let ys = xs.iter().map(|&x| f(x)).collect();
        Tabulated { xs, ys }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let k = self.xs.partition_point(|&t| t <= x) - 1;
        let t = (x - self.xs[k]) / (self.xs[k + 1] - self.xs[k]);
        self.ys[k] + t * (self.ys[k + 1] - self.ys[k])
    }

    /// Exact integral of the interpolant over [a, b] within the table range.
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        let mut pts = vec![a];
        pts.extend(self.xs.iter().copied().filter(|&x| x > a && x < b));
        pts.push(b);
        pts.windows(2).map(|w| 0.5 * (w[1] - w[0]) * (self.eval(w[0]) + self.eval(w[1]))).sum()
    }
}

/// Smooth piece of a piecewise function.
#[derive(Clone, Debug, PartialEq)]
pub enum Piece {
    Poly(Polynomial),
    Table(Tabulated),
}

impl Piece {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Piece::Poly(p) => p.eval(x),
            Piece::Table(t) => t.eval(x),
        }
    }

    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        match self {
            Piece::Poly(p) => p.integrate(a, b),
            Piece::Table(t) => t.integrate(a, b),
        }
    }

    pub fn as_poly(&self) -> Option<&Polynomial> {
        match self {
            Piece::Poly(p) => Some(p),
            Piece::Table(_) => None,
        }
    }

    pub fn constant(c: f64) -> Self {
        Piece::Poly(Polynomial::constant(c))
    }
}

impl From<Polynomial> for Piece {
    fn from(p: Polynomial) -> Self {
        Piece::Poly(p)
    }
}

/// Piecewise-smooth function on [lo, hi] with jumps and Dirac masses at its
/// breakpoints.
///
/// `pieces[k]` lives on (x_{k-1}, x_k) with x_{-1} = lo and x_n = hi;
/// `dirac[k]` is the weight of δ(x − x_k).
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseFunction1D {
    lo: f64,
    hi: f64,
    breakpoints: Vec<f64>,
    pieces: Vec<Piece>,
    dirac: Vec<f64>,
}

impl PiecewiseFunction1D {
    pub fn new(lo: f64, hi: f64, breakpoints: Vec<f64>, pieces: Vec<Piece>, dirac: Vec<f64>) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::Structural(format!("empty domain [{lo}, {hi}]")));
        }
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::Structural(format!(
                "{} pieces for {} breakpoints",
                pieces.len(),
                breakpoints.len()
            )));
        }
        if dirac.len() != breakpoints.len() {
            return Err(Error::Structural("one Dirac weight per breakpoint required".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Structural("breakpoints must be strictly increasing".into()));
        }
        if breakpoints.iter().any(|&b| !(b > lo && b < hi)) {
            return Err(Error::Structural("breakpoints must lie inside the domain".into()));
        }
        Ok(PiecewiseFunction1D { lo, hi, breakpoints, pieces, dirac })
    }

    /// Single smooth piece, no breakpoints.
    pub fn smooth(lo: f64, hi: f64, piece: impl Into<Piece>) -> Result<Self> {
        Self::new(lo, hi, vec![], vec![piece.into()], vec![])
    }

    /// Piecewise function without Dirac masses.
    pub fn from_pieces(lo: f64, hi: f64, breakpoints: Vec<f64>, pieces: Vec<Piece>) -> Result<Self> {
        let n = breakpoints.len();
        Self::new(lo, hi, breakpoints, pieces, vec![0.0; n])
    }

    /// `left` below `at`, `right` above, e.g. ρ⁻ + (ρ⁺ − ρ⁻)H(x − x_s).
    pub fn step(lo: f64, hi: f64, at: f64, left: f64, right: f64) -> Result<Self> {
        Self::from_pieces(lo, hi, vec![at], vec![Piece::constant(left), Piece::constant(right)])
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn dirac_weights(&self) -> &[f64] {
        &self.dirac
    }

    pub fn has_dirac(&self) -> bool {
        self.dirac.iter().any(|w| *w != 0.0)
    }

    /// Copy with the given Dirac weight added at breakpoint `x` (inserted if needed).
    pub fn with_dirac(&self, x: f64, weight: f64) -> Result<Self> {
        let mut f = self.refine(&[x])?;
        let k = f.breakpoint_index(x).expect("refined");
        f.dirac[k] += weight;
        Ok(f)
    }

    /// Same function without its Dirac masses.
    pub fn regular_part(&self) -> Self {
        let mut f = self.clone();
        f.dirac.iter_mut().for_each(|w| *w = 0.0);
        f
    }

    pub fn breakpoint_index(&self, x: f64) -> Option<usize> {
        self.breakpoints.iter().position(|&b| b == x)
    }

    pub fn dirac_at(&self, x: f64) -> f64 {
        self.breakpoint_index(x).map_or(0.0, |k| self.dirac[k])
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if !(x >= self.lo && x <= self.hi) {
            return Err(Error::Range(format!("{x} outside [{}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }

    /// Index of the piece containing x (x not a breakpoint).
    fn piece_index(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|&b| b < x)
    }

    /// f(x⁻); at the left end of the domain the right limit is returned.
    pub fn left_limit(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        if x == self.lo {
            return self.right_limit(x);
        }
        Ok(self.pieces[self.breakpoints.partition_point(|&b| b < x)].eval(x))
    }

    /// f(x⁺); at the right end of the domain the left limit is returned.
    pub fn right_limit(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        if x == self.hi {
            return Ok(self.pieces[self.pieces.len() - 1].eval(x));
        }
        Ok(self.pieces[self.breakpoints.partition_point(|&b| b <= x)].eval(x))
    }

    /// Point value; the mean of both limits at a breakpoint.
    pub fn eval(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        if self.breakpoint_index(x).is_some() {
            return self.mean_value(x);
        }
        Ok(self.pieces[self.piece_index(x)].eval(x))
    }

    /// ½(f(x⁺) + f(x⁻)).
    pub fn mean_value(&self, x: f64) -> Result<f64> {
        Ok(0.5 * (self.left_limit(x)? + self.right_limit(x)?))
    }

    /// f(x⁺) − f(x⁻); zero at smooth points and outside the domain.
    pub fn jump(&self, x: f64) -> f64 {
        match (self.left_limit(x), self.right_limit(x)) {
            (Ok(l), Ok(r)) if self.breakpoint_index(x).is_some() => r - l,
            _ => 0.0,
        }
    }

    /// Interval [a, b] of piece k.
    pub fn piece_bounds(&self, k: usize) -> (f64, f64) {
        let a = if k == 0 { self.lo } else { self.breakpoints[k - 1] };
        let b = if k == self.breakpoints.len() { self.hi } else { self.breakpoints[k] };
        (a, b)
    }

    /// ∫ f over the domain, Dirac masses included.
    pub fn integral(&self) -> f64 {
        let smooth: f64 = (0..self.pieces.len())
            .map(|k| {
                let (a, b) = self.piece_bounds(k);
                self.pieces[k].integrate(a, b)
            })
            .sum();
        smooth + self.dirac.iter().sum::<f64>()
    }

    /// Insert extra breakpoints (splitting pieces, zero Dirac weight).
    pub fn refine(&self, points: &[f64]) -> Result<Self> {
        let mut bps = self.breakpoints.clone();
        for &p in points {
            if !(p > self.lo && p < self.hi) {
                return Err(Error::Range(format!("breakpoint {p} outside domain")));
            }
            if !bps.contains(&p) {
                bps.push(p);
            }
        }
        bps.sort_by(f64::total_cmp);
        let mut pieces = Vec::with_capacity(bps.len() + 1);
        let mut dirac = Vec::with_capacity(bps.len());
        for k in 0..=bps.len() {
            let a = if k == 0 { self.lo } else { bps[k - 1] };
            let b = if k == bps.len() { self.hi } else { bps[k] };
            let mid = 0.5 * (a + b);
            pieces.push(self.pieces[self.piece_index(mid)].clone());
            if k < bps.len() {
                dirac.push(self.dirac_at(bps[k]));
            }
        }
        Self::new(self.lo, self.hi, bps, pieces, dirac)
    }

    /// Both functions refined to the union of their breakpoints.
    pub fn align(&self, other: &Self) -> Result<(Self, Self)> {
        if self.domain() != other.domain() {
            return Err(Error::Structural("functions live on different domains".into()));
        }
        Ok((self.refine(&other.breakpoints)?, other.refine(&self.breakpoints)?))
    }

    /// Pointwise combination of the regular parts, piece by piece.
    /// Polynomial pieces combine exactly through `poly`; otherwise `scalar`
    /// is tabulated.
    pub fn combine<P, S>(&self, other: &Self, poly: P, scalar: S) -> Result<Self>
    where
        P: Fn(&Polynomial, &Polynomial) -> Polynomial,
        S: Fn(f64, f64) -> f64,
    {
        let (a, b) = self.align(other)?;
        let pieces = a
            .pieces
            .iter()
            .zip(&b.pieces)
            .enumerate()
            .map(|(k, (pa, pb))| match (pa.as_poly(), pb.as_poly()) {
                (Some(x), Some(y)) => Piece::Poly(poly(x, y)),
                _ => {
                    let (l, r) = a.piece_bounds(k);
                    Piece::Table(Tabulated::sample(l, r, |t| scalar(pa.eval(t), pb.eval(t))))
                }
            })
            .collect();
        let n = a.breakpoints.len();
        Self::new(a.lo, a.hi, a.breakpoints, pieces, vec![0.0; n])
    }

    /// f + g, Dirac weights added.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut s = self.combine(other, |x, y| x + y, |x, y| x + y)?;
        for (k, &b) in s.breakpoints.clone().iter().enumerate() {
            s.dirac[k] = self.dirac_at(b) + other.dirac_at(b);
        }
        Ok(s)
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut f = self.clone();
        for p in f.pieces.iter_mut() {
            *p = match p {
                Piece::Poly(q) => Piece::Poly(q.scale(c)),
                Piece::Table(t) => Piece::Table(Tabulated {
                    xs: t.xs.clone(),
                    ys: t.ys.iter().map(|y| y * c).collect(),
                }),
            };
        }
        f.dirac.iter_mut().for_each(|w| *w *= c);
        f
    }

    /// Ordinary product of two functions without Dirac masses.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.has_dirac() || other.has_dirac() {
            return Err(Error::Structural(
                "pointwise product with a Dirac mass is undefined; use the extended product".into(),
            ));
        }
        self.combine(other, |x, y| x * y, |x, y| x * y)
    }

    /// Largest deviation between regular parts and Dirac weights, sampled at
    /// piece midpoints, piece ends and breakpoints.
    pub fn max_difference(&self, other: &Self) -> Result<f64> {
        let (a, b) = self.align(other)?;
        let mut m = 0.0f64;
        for k in 0..a.pieces.len() {
            let (l, r) = a.piece_bounds(k);
            for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let x = l + t * (r - l);
                m = m.max((a.pieces[k].eval(x) - b.pieces[k].eval(x)).abs());
            }
        }
        for (wa, wb) in a.dirac.iter().zip(&b.dirac) {
            m = m.max((wa - wb).abs());
        }
        Ok(m)
    }
}

/// ½(f(x⁺) + f(x⁻)).
pub fn mean_value(f: &PiecewiseFunction1D, x: f64) -> Result<f64> {
    f.mean_value(x)
}

/// f(x⁺) − f(x⁻).
pub fn jump(f: &PiecewiseFunction1D, x: f64) -> f64 {
    f.jump(x)
}

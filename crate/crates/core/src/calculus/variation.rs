use super::piecewise::{Piece, PiecewiseFunction1D, Tabulated};
use super::polynomial::Polynomial;
use crate::error::{Error, Result};

/// Smooth scalar map f(ρ) with its derivative.
pub trait ScalarMap {
    fn value(&self, r: f64) -> f64;
    fn derivative(&self, r: f64) -> f64;
    /// Exact polynomial form, if any; enables closed-form composition.
    fn as_polynomial(&self) -> Option<Polynomial> {
        None
    }
}

impl ScalarMap for Polynomial {
    fn value(&self, r: f64) -> f64 {
        self.eval(r)
    }
    fn derivative(&self, r: f64) -> f64 {
        Polynomial::derivative(self).eval(r)
    }
    fn as_polynomial(&self) -> Option<Polynomial> {
        Some(self.clone())
    }
}

/// A map given by a closure and its derivative.
pub struct FnMap<F, D> {
    pub f: F,
    pub df: D,
}

impl<F: Fn(f64) -> f64, D: Fn(f64) -> f64> ScalarMap for FnMap<F, D> {
    fn value(&self, r: f64) -> f64 {
        (self.f)(r)
    }
    fn derivative(&self, r: f64) -> f64 {
        (self.df)(r)
    }
}

/// Averaged derivative of f between two states: [f]/[ρ] across a jump,
/// f′(ρ) when both states coincide.
pub fn volpert_ratio<M: ScalarMap + ?Sized>(f: &M, rho_minus: f64, rho_plus: f64) -> f64 {
    if rho_plus == rho_minus {
        f.derivative(rho_minus)
    } else {
        (f.value(rho_plus) - f.value(rho_minus)) / (rho_plus - rho_minus)
    }
}

/// Variation of ρ with a shock at `x_s` moving at rate `dxs_da`:
/// δρ = ρ′δa − x_s′[ρ] δ(x − x_s) δa, where `drho_da` holds the pointwise
/// derivative ρ′ (jumps allowed, no Dirac masses).
pub fn shock_variation(
    rho: &PiecewiseFunction1D,
    drho_da: &PiecewiseFunction1D,
    x_s: f64,
    dxs_da: f64,
    delta_a: f64,
) -> Result<PiecewiseFunction1D> {
    if rho.breakpoint_index(x_s).is_none() {
        return Err(Error::Structural(format!("{x_s} is not a discontinuity of the base function")));
    }
    drho_da
        .regular_part()
        .scale(delta_a)
        .with_dirac(x_s, -dxs_da * rho.jump(x_s) * delta_a)
}

fn check_dirac_support(base: &PiecewiseFunction1D, var: &PiecewiseFunction1D, name: &str) -> Result<()> {
    if base.domain() != var.domain() {
        return Err(Error::Structural(format!("{name}: domain differs from its base function")));
    }
    for (&x, &w) in var.breakpoints().iter().zip(var.dirac_weights()) {
        if w != 0.0 && base.breakpoint_index(x).is_none() {
            return Err(Error::Structural(format!(
                "{name}: Dirac mass at {x} does not sit on a breakpoint of its base function"
            )));
        }
    }
    Ok(())
}

/// δ(ρu) = (δρ)ū + ρ̄(δu), with Dirac weights multiplied by the mean values.
pub fn extended_product_variation(
    rho: &PiecewiseFunction1D,
    u: &PiecewiseFunction1D,
    drho: &PiecewiseFunction1D,
    du: &PiecewiseFunction1D,
) -> Result<PiecewiseFunction1D> {
    check_dirac_support(rho, drho, "drho")?;
    check_dirac_support(u, du, "du")?;
    if rho.domain() != u.domain() {
        return Err(Error::Structural("factors live on different domains".into()));
    }
    let regular = drho.regular_part().mul(u)?.add(&rho.mul(&du.regular_part())?)?;
    let mut out = regular;
    let mut points: Vec<f64> = drho.breakpoints().to_vec();
    points.extend_from_slice(du.breakpoints());
    points.sort_by(f64::total_cmp);
    points.dedup();
    for x in points {
        let w = drho.dirac_at(x) * u.mean_value(x)? + rho.mean_value(x)? * du.dirac_at(x);
        if w != 0.0 {
            out = out.with_dirac(x, w)?;
        }
    }
    Ok(out)
}

/// f∘ρ piecewise: exact when both f and the piece are polynomials.
pub fn compose<M: ScalarMap + ?Sized>(f: &M, rho: &PiecewiseFunction1D) -> Result<PiecewiseFunction1D> {
    let fp = f.as_polynomial();
    let pieces = rho
        .pieces()
        .iter()
        .enumerate()
        .map(|(k, piece)| match (&fp, piece.as_poly()) {
            (Some(p), Some(q)) => Piece::Poly(p.compose(q)),
            _ => {
                let (a, b) = rho.piece_bounds(k);
                Piece::Table(Tabulated::sample(a, b, |x| f.value(piece.eval(x))))
            }
        })
        .collect();
    let (lo, hi) = rho.domain();
    PiecewiseFunction1D::from_pieces(lo, hi, rho.breakpoints().to_vec(), pieces)
}

/// δf(ρ) = f′(ρ)δρ away from jumps and (Volpert ratio)·(Dirac weight of δρ)
/// at jumps.
pub fn map_variation<M: ScalarMap>(
    f: &M,
    rho: &PiecewiseFunction1D,
    drho: &PiecewiseFunction1D,
) -> Result<PiecewiseFunction1D> {
    check_dirac_support(rho, drho, "drho")?;
    let dfp = f.as_polynomial().map(|p| p.derivative());
    let fprime: Box<dyn ScalarMap + '_> = match dfp {
        Some(p) => Box::new(p),
        None => Box::new(FnMap { f: |r| f.derivative(r), df: |_| f64::NAN }),
    };
    let mut out = compose(fprime.as_ref(), rho)?.mul(&drho.regular_part())?;
    for (&x, &w) in drho.breakpoints().iter().zip(drho.dirac_weights()) {
        if w != 0.0 {
            let ratio = volpert_ratio(f, rho.left_limit(x)?, rho.right_limit(x)?);
            out = out.with_dirac(x, ratio * w)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_square() -> Polynomial {
        Polynomial::new(vec![0.0, 0.0, 0.5])
    }

    #[test]
    fn volpert_examples() {
        assert_eq!(volpert_ratio(&half_square(), 1.0, 3.0), 2.0);
        let inv = FnMap { f: |r: f64| 1.0 / r, df: |r: f64| -1.0 / (r * r) };
        assert_eq!(volpert_ratio(&inv, 2.0, 4.0), -0.125);
        let sin = FnMap { f: f64::sin, df: f64::cos };
        assert_eq!(volpert_ratio(&sin, 2.0, 2.0), 2.0f64.cos());
    }

    #[test]
    fn product_dirac_cancels_when_flux_is_continuous() {
        let rho = PiecewiseFunction1D::step(-1.0, 1.0, 0.0, 1.0, 2.0).unwrap();
        let u = PiecewiseFunction1D::step(-1.0, 1.0, 0.0, 2.0, 1.0).unwrap();
        let zero = PiecewiseFunction1D::smooth(-1.0, 1.0, Polynomial::zero()).unwrap();
        let drho = shock_variation(&rho, &zero, 0.0, 1.0, 1.0).unwrap();
        let du = shock_variation(&u, &zero, 0.0, 1.0, 1.0).unwrap();
        let d = extended_product_variation(&rho, &u, &drho, &du).unwrap();
        assert_eq!(d.dirac_at(0.0), 0.0);
    }

    #[test]
    fn product_dirac_with_continuous_factor() {
        let rho = PiecewiseFunction1D::step(-1.0, 1.0, 0.0, 1.0, 3.0).unwrap();
        let u = PiecewiseFunction1D::smooth(-1.0, 1.0, Polynomial::constant(1.0)).unwrap();
        let zero = PiecewiseFunction1D::smooth(-1.0, 1.0, Polynomial::zero()).unwrap();
        let drho = shock_variation(&rho, &zero, 0.0, 1.0, 1.0).unwrap();
        let d = extended_product_variation(&rho, &u, &drho, &zero).unwrap();
        // (δρ)ū alone: −[ρ]·ū
        let lhs = drho.dirac_at(0.0) * u.mean_value(0.0).unwrap();
        assert_eq!(d.dirac_at(0.0), -2.0);
        assert_eq!(lhs, -2.0);
    }

    #[test]
    fn product_rejects_misplaced_dirac() {
        let rho = PiecewiseFunction1D::smooth(-1.0, 1.0, Polynomial::constant(1.0)).unwrap();
        let bad = rho.regular_part().with_dirac(0.3, 1.0).unwrap();
        let zero = PiecewiseFunction1D::smooth(-1.0, 1.0, Polynomial::zero()).unwrap();
        assert!(matches!(
            extended_product_variation(&rho, &rho, &bad, &zero),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn smooth_product_rule() {
        let rho = PiecewiseFunction1D::smooth(0.0, 1.0, Polynomial::linear(1.0, 1.0)).unwrap();
        let u = PiecewiseFunction1D::smooth(0.0, 1.0, Polynomial::new(vec![0.0, 0.0, 1.0])).unwrap();
        let dr = PiecewiseFunction1D::smooth(0.0, 1.0, Polynomial::constant(0.5)).unwrap();
        let du = PiecewiseFunction1D::smooth(0.0, 1.0, Polynomial::linear(0.0, 2.0)).unwrap();
        let d = extended_product_variation(&rho, &u, &dr, &du).unwrap();
        assert!(!d.has_dirac());
        let x: f64 = 0.7;
        assert!((d.eval(x).unwrap() - (0.5 * x * x + (1.0 + x) * 2.0 * x)).abs() < 1e-14);
    }

    #[test]
    fn map_variation_dirac_is_minus_jump_of_f() {
        let rho = PiecewiseFunction1D::step(0.0, 2.0, 1.0, 2.0, 0.5).unwrap();
        let zero = PiecewiseFunction1D::smooth(0.0, 2.0, Polynomial::zero()).unwrap();
        let drho = shock_variation(&rho, &zero, 1.0, 0.7, 0.1).unwrap();
        let sin = FnMap { f: f64::sin, df: f64::cos };
        let d = map_variation(&sin, &rho, &drho).unwrap();
        let expected = -(0.5f64.sin() - 2.0f64.sin()) * 0.7 * 0.1;
        assert!((d.dirac_at(1.0) - expected).abs() < 1e-15);
    }
}

use super::piecewise::{Piece, PiecewiseFunction1D};
use crate::error::{Error, Result};

/// How a shifted discontinuity is turned into a box function.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ShiftForm {
    /// Height −[ρ] on (a, a+δa) for δa > 0, +[ρ] on (a+δa, a) for δa < 0;
    /// integrates to −[ρ]δa for either sign of the jump.
    #[default]
    Signed,
    /// sign(δa)·[ρ]⁻ on (a − δa⁻, a + δa⁺), where [ρ]⁻ = −min(0, [ρ]):
    /// only decreasing jumps contribute.
    NegativePartLiteral,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftPoint {
    pub position: f64,
    pub jump: f64,
    pub delta: f64,
}

/// Ordinary variation plus finite shifts of the discontinuities.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftVariation {
    pub smooth_part: PiecewiseFunction1D,
    pub shift_points: Vec<ShiftPoint>,
}

impl ShiftVariation {
    /// `shifts` are (position, δa) pairs; each position must be a breakpoint
    /// of `base`, whose jump there is recorded.
    pub fn new(base: &PiecewiseFunction1D, smooth_part: PiecewiseFunction1D, shifts: &[(f64, f64)]) -> Result<Self> {
        if smooth_part.has_dirac() {
            return Err(Error::Structural("smooth part must not carry Dirac masses".into()));
        }
        let shift_points = shifts
            .iter()
            .map(|&(a, d)| {
                if base.breakpoint_index(a).is_none() {
                    return Err(Error::Structural(format!("shift at {a} is not a breakpoint")));
                }
                Ok(ShiftPoint { position: a, jump: base.jump(a), delta: d })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ShiftVariation { smooth_part, shift_points })
    }

    /// Smooth part plus one box per shift.
    pub fn to_function(&self, form: ShiftForm) -> Result<PiecewiseFunction1D> {
        let (lo, hi) = self.smooth_part.domain();
        let boxes = boxes(lo, hi, &self.shift_points, form)?;
        self.smooth_part.add(&boxes)
    }
}

fn boxes(lo: f64, hi: f64, points: &[ShiftPoint], form: ShiftForm) -> Result<PiecewiseFunction1D> {
    let mut intervals: Vec<(f64, f64, f64)> = Vec::new();
    for p in points {
        if p.delta == 0.0 {
            continue;
        }
        let (a, b) = if p.delta > 0.0 {
            (p.position, p.position + p.delta)
        } else {
            (p.position + p.delta, p.position)
        };
        let height = match form {
            ShiftForm::Signed => -p.jump * p.delta.signum(),
            ShiftForm::NegativePartLiteral => p.delta.signum() * (-p.jump.min(0.0)),
        };
        if !(a > lo && b < hi) {
            return Err(Error::Range(format!("shifted interval ({a}, {b}) leaves the domain")));
        }
        intervals.push((a, b, height));
    }
    intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
    if intervals.windows(2).any(|w| w[1].0 < w[0].1) {
        return Err(Error::Structural("shifted intervals overlap".into()));
    }
    let mut bps = Vec::new();
    let mut pieces = vec![Piece::constant(0.0)];
    for (a, b, h) in intervals {
        if bps.last() == Some(&a) {
            *pieces.last_mut().unwrap() = Piece::constant(h);
        } else {
            bps.push(a);
            pieces.push(Piece::constant(h));
        }
        bps.push(b);
        pieces.push(Piece::constant(0.0));
    }
    PiecewiseFunction1D::from_pieces(lo, hi, bps, pieces)
}

/// Box approximation of the Dirac variations caused by moving each
/// discontinuity of `rho` at position a by δa.
pub fn shift_variation_apply(rho: &PiecewiseFunction1D, shifts: &[(f64, f64)], form: ShiftForm) -> Result<PiecewiseFunction1D> {
    let (lo, hi) = rho.domain();
    let zero = PiecewiseFunction1D::smooth(lo, hi, Piece::constant(0.0))?;
    ShiftVariation::new(rho, zero, shifts)?.to_function(form)
}

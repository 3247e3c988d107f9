//! Piecewise-smooth functions of one variable with jumps and Dirac masses,
//! and the variations of such functions when their discontinuities move.

mod piecewise;
mod polynomial;
mod shift;
mod variation;

pub use piecewise::{jump, mean_value, Piece, PiecewiseFunction1D, Tabulated, TABLE_SAMPLES};
pub use polynomial::Polynomial;
pub use shift::{shift_variation_apply, ShiftForm, ShiftPoint, ShiftVariation};
pub use variation::{
    compose, extended_product_variation, map_variation, shock_variation, volpert_ratio, FnMap, ScalarMap,
};

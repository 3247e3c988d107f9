//! Finite-volume solvers for Burgers' equation and the 2D Euler equations,
//! their discrete adjoints, and checks of those adjoints against analytic
//! continuous-adjoint conditions.

// `!(x > 0.0)` rejects NaN along with non-positive values; index loops
// mirror the component formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod acceptance;
pub mod adjoint;
pub mod burgers;
pub mod calculus;
pub mod euler;
pub mod mesh;
pub mod solver;

pub use error::{Error, Result};

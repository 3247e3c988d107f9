//! Discrete adjoint of the steady Euler solver: boundary functionals, the
//! transposed first-order system, analytic adjoint boundary conditions used
//! for verification, the shape gradient and a jump detector.

mod functional;
mod jumps;
mod shape;
mod solve;
mod verify;

pub use functional::{functional_gradient_rhs, functional_value, Functional, FunctionalKind, PressureTarget};
pub use jumps::{jump_detector, jump_geography, JumpDetector, JumpGeography};
pub use shape::{
    circumcircle_curvature, displace_channel_wall, mesh_motion_derivative, shape_gradient, ShapeGradient,
    ShapeGradientForm,
};
pub use solve::{
    adjoint_residual, freestream_density_check, freestream_density_gradient, j_at_freestream_density, solve_adjoint,
    AdjointField, FdSample, GradientCheck,
};
pub use verify::{
    airfoil_adjoint_bc_residual, analytic_outflow_adjoint, ground_adjoint_check, outflow_right_boundary_zero_check,
    shock_flags, verify_outflow_bc, wall_condition_ratio, BcReport, BcRow, RightBoundaryCheck, ShockFlagging,
};

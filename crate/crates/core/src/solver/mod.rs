//! Vertex-centred finite-volume solver for the steady 2D Euler equations:
//! Roe fluxes on median-dual cells, MUSCL reconstruction, Steger–Warming
//! free-stream boundaries, SSP-RK2 or implicit pseudo-time stepping.

mod config;
mod jacobian;
mod krylov;
mod output;
mod residual;
mod steady;

pub use config::{Freestream, JacobianMode, Limiter, LinearSolverConfig, Preconditioner, SolverConfig, TimeScheme};
pub use jacobian::{
    assemble_first_order_jacobian, boundary_flux_jacobian, edge_flux_jacobians, inflow_freestream_jacobian,
    kernel_jacobian, BlockSparseMatrix,
};
pub use krylov::{build_preconditioner, gmres, solve_linear, BlockIlu0, BlockJacobi, LinearSolve, Precondition};
pub use output::{line_probe, write_convergence_csv, write_probe_csv, write_vtk, flow_point_data, ProbeSample};
pub use residual::{
    boundary_flux, edge_fluxes, limit_slope, muscl_extrapolate, nodal_gradients, residual, roe_flux,
    total_boundary_flux, triangle_gradient, FieldState,
};
pub use steady::{
    freestream_field, implicit_step, local_time_steps, residual_norms, solve_steady, ssp_rk2_step, ImplicitStepInfo,
    LogEntry, SteadySolution,
};

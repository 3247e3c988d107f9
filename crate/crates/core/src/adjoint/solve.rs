use super::functional::{functional_gradient_rhs, functional_value, Functional};
use crate::error::{Error, Result};
use crate::euler::Vec4;
use crate::mesh::{BoundaryTag, Mesh2D};
use crate::solver::{
    assemble_first_order_jacobian, freestream_field, inflow_freestream_jacobian, solve_linear, solve_steady,
    BlockSparseMatrix, FieldState, SolverConfig,
};

/// Adjoint state W* per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjointField {
    pub w: Vec<Vec4>,
    /// ‖𝒜ᵀW* − J′‖ / ‖J′‖ at exit.
    pub rel_residual: f64,
    pub iterations: usize,
}

impl AdjointField {
    pub fn zeros(n: usize) -> Self {
        AdjointField { w: vec![[0.0; 4]; n], rel_residual: 0.0, iterations: 0 }
    }

    pub fn component(&self, k: usize) -> Vec<f64> {
        self.w.iter().map(|w| w[k]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.w.iter().flat_map(|w| w.iter()).fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

fn norm(v: &[Vec4]) -> f64 {
    v.iter().flat_map(|x| x.iter()).map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves 𝒜ᵀW* = J′(W) with 𝒜 the first-order Jacobian (frozen or exact per
/// `cfg.jacobian`). Falls back to pseudo-time continuation on the transposed
/// system if the Krylov solve stalls.
pub fn solve_adjoint(field: &FieldState, mesh: &Mesh2D, f: &Functional, cfg: &SolverConfig) -> Result<AdjointField> {
    let rhs = functional_gradient_rhs(field, mesh, f, &cfg.gas)?;
    let at = assemble_first_order_jacobian(field, mesh, cfg)?.transpose();
    solve_transposed(&at, &rhs, mesh, field, cfg)
}

pub(crate) fn solve_transposed(
    at: &BlockSparseMatrix,
    rhs: &[Vec4],
    mesh: &Mesh2D,
    field: &FieldState,
    cfg: &SolverConfig,
) -> Result<AdjointField> {
    let bnorm = norm(rhs);
    if bnorm == 0.0 {
        return Ok(AdjointField::zeros(rhs.len()));
    }
    let mut lin = cfg.linear;
    lin.rel_tol = lin.rel_tol.min(1e-10);
    lin.max_iter = lin.max_iter.max(2000);
    let sol = solve_linear(at, rhs, &lin)?;
    if sol.converged {
        return Ok(AdjointField { w: sol.x, rel_residual: sol.rel_residual, iterations: sol.iterations });
    }
    log::warn!("adjoint Krylov solve stalled at {:.3e}; continuing in pseudo-time", sol.rel_residual);
    let mut x = sol.x;
    let mut history = vec![sol.rel_residual];
    let mut cfl = 1e3;
    for it in 0..200 {
        let ax = at.mul_vec(&x);
        let r: Vec<Vec4> = rhs.iter().zip(&ax).map(|(b, y)| std::array::from_fn(|k| b[k] - y[k])).collect();
        let rel = norm(&r) / bnorm;
        history.push(rel);
        if rel <= lin.rel_tol {
            return Ok(AdjointField { w: x, rel_residual: rel, iterations: it });
        }
        let dt = crate::solver::local_time_steps(field, mesh, cfg, cfl)?;
        let mut m = at.clone();
        let d: Vec<f64> = mesh.volumes().iter().zip(&dt).map(|(v, t)| v / t).collect();
        m.add_scaled_identity(&d);
        let s = solve_linear(&m, &r, &lin)?;
        for (xi, di) in x.iter_mut().zip(&s.x) {
            for k in 0..4 {
                xi[k] += di[k];
            }
        }
        cfl = (cfl * 2.0).min(1e10);
    }
    Err(Error::Convergence(format!("adjoint solve did not converge; residual history {history:?}")))
}

/// ‖𝒜ᵀW* − J′‖ / ‖J′‖.
pub fn adjoint_residual(
    adjoint: &AdjointField,
    field: &FieldState,
    mesh: &Mesh2D,
    f: &Functional,
    cfg: &SolverConfig,
) -> Result<f64> {
    let rhs = functional_gradient_rhs(field, mesh, f, &cfg.gas)?;
    let at = assemble_first_order_jacobian(field, mesh, cfg)?.transpose();
    let ax = at.mul_vec(&adjoint.w);
    let r: Vec<Vec4> = rhs.iter().zip(&ax).map(|(b, y)| std::array::from_fn(|k| b[k] - y[k])).collect();
    let b = norm(&rhs);
    Ok(if b == 0.0 { norm(&r) } else { norm(&r) / b })
}

/// dJ/dρ∞ (velocity and p∞ fixed, functional target fixed) from the adjoint:
/// −W*ᵀ ∂R/∂W∞ · ∂W∞/∂ρ∞, the residual depending on W∞ through the inflow
/// faces only.
pub fn freestream_density_gradient(
    adjoint: &AdjointField,
    field: &FieldState,
    mesh: &Mesh2D,
    cfg: &SolverConfig,
) -> Result<f64> {
    let dw = cfg.freestream.d_state_d_rho();
    let mut g = 0.0;
    for face in mesh.boundary_faces().iter().filter(|f| f.tag == BoundaryTag::InflowFreestream) {
        let m = inflow_freestream_jacobian(&field.w[face.vertex], face.normal, cfg)?;
        let dr = m.mul_vec(&dw);
        let a = adjoint.w[face.vertex];
        g -= (0..4).map(|k| a[k] * dr[k]).sum::<f64>();
    }
    Ok(g)
}

/// One point of a finite-difference sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct FdSample {
    pub eps: f64,
    pub gradient: f64,
    pub rel_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradientCheck {
    pub j: f64,
    pub adjoint: f64,
    pub fd: Vec<FdSample>,
}

impl GradientCheck {
    pub fn best_rel_error(&self) -> f64 {
        self.fd.iter().map(|s| s.rel_error).fold(f64::INFINITY, f64::min)
    }
}

/// Solves the steady problem with the free-stream density scaled to
/// ρ∞·(1+s) and returns J.
pub fn j_at_freestream_density(
    mesh: &Mesh2D,
    f: &Functional,
    cfg: &SolverConfig,
    rho_inf: f64,
    warm: Option<&FieldState>,
) -> Result<(f64, FieldState)> {
    let mut c = *cfg;
    c.freestream.rho = rho_inf;
    let init = warm.cloned().unwrap_or_else(|| freestream_field(mesh, &c));
    let sol = solve_steady(&init, mesh, &c)?;
    if !sol.converged {
        return Err(Error::Convergence(format!(
            "steady solve at rho_inf = {rho_inf} stopped at residual {:.3e}",
            sol.final_residual()
        )));
    }
    Ok((functional_value(&sol.field, mesh, f, &c.gas)?, sol.field))
}

/// Adjoint dJ/dρ∞ against central differences of the full nonlinear solve
/// for each relative step in `eps`.
pub fn freestream_density_check(mesh: &Mesh2D, f: &Functional, cfg: &SolverConfig, eps: &[f64]) -> Result<GradientCheck> {
    let rho = cfg.freestream.rho;
    let (j, field) = j_at_freestream_density(mesh, f, cfg, rho, None)?;
    let adj = solve_adjoint(&field, mesh, f, cfg)?;
    let g = freestream_density_gradient(&adj, &field, mesh, cfg)?;
    let mut fd = Vec::new();
    for &e in eps {
        let h = e * rho;
        let (jp, _) = j_at_freestream_density(mesh, f, cfg, rho + h, Some(&field))?;
        let (jm, _) = j_at_freestream_density(mesh, f, cfg, rho - h, Some(&field))?;
        let d = (jp - jm) / (2.0 * h);
        fd.push(FdSample { eps: e, gradient: d, rel_error: (g - d).abs() / d.abs().max(f64::MIN_POSITIVE) });
    }
    Ok(GradientCheck { j, adjoint: g, fd })
}

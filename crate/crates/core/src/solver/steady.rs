use super::config::{SolverConfig, TimeScheme};
use super::jacobian::assemble_first_order_jacobian;
use super::krylov::solve_linear;
use super::residual::{residual, FieldState};
use crate::error::{Error, Result};
use crate::euler::{kernels, Vec4};
use crate::mesh::Mesh2D;

const MAX_RETRIES: usize = 5;

/// δtᵢ = cfl·|Cᵢ| / Σ_faces (|u·n| + c‖n‖).
pub fn local_time_steps(field: &FieldState, mesh: &Mesh2D, cfg: &SolverConfig, cfl: f64) -> Result<Vec<f64>> {
    let g = cfg.gas.gamma;
    let mut rate = vec![0.0; mesh.n_vertices()];
    let speed = |v: usize, n: [f64; 2]| -> Result<f64> {
        let s = kernels::char_state(&field.w[v], g)
            .ok_or_else(|| Error::Domain(format!("invalid state at vertex {v}")))?;
        Ok((s.u * n[0] + s.v * n[1]).abs() + s.c * n[0].hypot(n[1]))
    };
    for e in mesh.edges() {
        rate[e.i] += speed(e.i, e.normal)?;
        rate[e.j] += speed(e.j, e.normal)?;
    }
    for f in mesh.boundary_faces() {
        rate[f.vertex] += speed(f.vertex, f.normal)?;
    }
    Ok(mesh.volumes().iter().zip(&rate).map(|(vol, r)| cfl * vol / r).collect())
}

/// L(W) = −residual/|C|.
fn rate_of_change(field: &FieldState, mesh: &Mesh2D, cfg: &SolverConfig) -> Result<Vec<Vec4>> {
    let r = residual(field, mesh, cfg)?;
    Ok(r.iter().zip(mesh.volumes()).map(|(ri, vol)| ri.map(|x| -x / vol)).collect())
}

fn euler_update(field: &FieldState, l: &[Vec4], dt: &[f64], scale: f64) -> FieldState {
    FieldState {
        w: field
            .w
            .iter()
            .zip(l)
            .zip(dt)
            .map(|((w, d), t)| std::array::from_fn(|k| w[k] + scale * t * d[k]))
            .collect(),
    }
}

/// One Shu–Osher SSP-RK2 step with per-vertex time steps; invalid stage
/// states halve the steps (up to five times).
pub fn ssp_rk2_step(field: &FieldState, mesh: &Mesh2D, cfg: &SolverConfig, dt: &[f64]) -> Result<FieldState> {
    let l0 = rate_of_change(field, mesh, cfg)?;
    let mut scale = 1.0;
    for attempt in 0..=MAX_RETRIES {
        let stage = euler_update(field, &l0, dt, scale);
        let next = stage.validate(&cfg.gas).and_then(|_| rate_of_change(&stage, mesh, cfg)).and_then(|l1| {
            let w = field
                .w
                .iter()
                .zip(&stage.w)
                .zip(&l1)
                .zip(dt)
                .map(|(((a, b), d), t)| std::array::from_fn(|k| 0.5 * a[k] + 0.5 * b[k] + 0.5 * scale * t * d[k]))
                .collect();
            let out = FieldState { w };
            out.validate(&cfg.gas)?;
            Ok(out)
        });
        match next {
            Ok(out) => return Ok(out),
            Err(e) if attempt < MAX_RETRIES => {
                log::warn!("RK stage rejected ({e}); halving dt");
                scale *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImplicitStepInfo {
    pub cfl: f64,
    pub linear_iterations: usize,
    pub linear_residual: f64,
}

/// (|Cᵢ|/δtᵢ I + 𝒜) δW = −residual(Wⁿ), retried with smaller CFL when the
/// linear solve stalls or the update is invalid.
pub fn implicit_step(
    field: &FieldState,
    mesh: &Mesh2D,
    cfg: &SolverConfig,
    cfl: f64,
) -> Result<(FieldState, ImplicitStepInfo)> {
    let r = residual(field, mesh, cfg)?;
    let rhs: Vec<Vec4> = r.iter().map(|x| x.map(|c| -c)).collect();
    let jac = assemble_first_order_jacobian(field, mesh, cfg)?;
    let mut cfl = cfl;
    let mut last = String::new();
    for _ in 0..=MAX_RETRIES {
        let dt = local_time_steps(field, mesh, cfg, cfl)?;
        let mut a = jac.clone();
        let diag: Vec<f64> = mesh.volumes().iter().zip(&dt).map(|(v, t)| v / t).collect();
        a.add_scaled_identity(&diag);
        let sol = solve_linear(&a, &rhs, &cfg.linear)?;
        let next = FieldState {
            w: field.w.iter().zip(&sol.x).map(|(w, d)| std::array::from_fn(|k| w[k] + d[k])).collect(),
        };
        // a partially converged solve still reducing the residual is accepted
        let usable = sol.converged || sol.rel_residual < 1e-2;
        match next.validate(&cfg.gas) {
            Ok(()) if usable => {
                let info =
                    ImplicitStepInfo { cfl, linear_iterations: sol.iterations, linear_residual: sol.rel_residual };
                return Ok((next, info));
            }
            Ok(()) => last = format!("linear solve stalled at {:.3e}", sol.rel_residual),
            Err(e) => last = e.to_string(),
        }
        log::warn!("implicit step rejected at cfl {cfl:.3e}: {last}");
        cfl *= 0.1;
    }
    Err(Error::Convergence(format!("implicit step failed after {MAX_RETRIES} CFL reductions: {last}")))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogEntry {
    pub step: usize,
    /// max over vertices of |residual|/|C| per equation.
    pub residual: Vec4,
    pub cfl: f64,
    pub linear_iterations: usize,
}

impl LogEntry {
    pub fn max_norm(&self) -> f64 {
        self.residual.iter().cloned().fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct SteadySolution {
    pub field: FieldState,
    pub log: Vec<LogEntry>,
    pub converged: bool,
}

impl SteadySolution {
    pub fn final_residual(&self) -> f64 {
        self.log.last().map_or(f64::INFINITY, |e| e.max_norm())
    }
}

/// Per-equation max of |residualᵢ|/|Cᵢ|.
pub fn residual_norms(field: &FieldState, mesh: &Mesh2D, cfg: &SolverConfig) -> Result<Vec4> {
    let r = residual(field, mesh, cfg)?;
    let mut n = [0.0f64; 4];
    for (ri, vol) in r.iter().zip(mesh.volumes()) {
        for k in 0..4 {
            n[k] = n[k].max(ri[k].abs() / vol);
        }
    }
    Ok(n)
}

/// Free-stream initial field.
pub fn freestream_field(mesh: &Mesh2D, cfg: &SolverConfig) -> FieldState {
    FieldState::uniform(mesh.n_vertices(), cfg.freestream.state(&cfg.gas))
}

/// Iterates to ‖residual/|C|‖∞ < convergence_tol or max_steps. The
/// implicit Courant number follows the residual drop (switched evolution
/// relaxation).
pub fn solve_steady(initial: &FieldState, mesh: &Mesh2D, cfg: &SolverConfig) -> Result<SteadySolution> {
    cfg.validate()?;
    initial.validate(&cfg.gas)?;
    let mut field = initial.clone();
    let mut log = Vec::new();
    let mut norms = residual_norms(&field, mesh, cfg)?;
    let r0 = norms.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut cfl = cfg.implicit_cfl;
    log.push(LogEntry { step: 0, residual: norms, cfl: 0.0, linear_iterations: 0 });
    for step in 1..=cfg.max_steps {
        let rmax = norms.iter().cloned().fold(0.0, f64::max);
        if rmax < cfg.convergence_tol {
            return Ok(SteadySolution { field, log, converged: true });
        }
        let linear_iterations;
        match cfg.scheme {
            TimeScheme::Explicit => {
                let dt = local_time_steps(&field, mesh, cfg, cfg.cfl)?;
                field = ssp_rk2_step(&field, mesh, cfg, &dt)?;
                cfl = cfg.cfl;
                linear_iterations = 0;
            }
            TimeScheme::Implicit => {
                let (next, info) = implicit_step(&field, mesh, cfg, cfl)?;
                field = next;
                linear_iterations = info.linear_iterations;
                cfl = info.cfl;
            }
        }
        norms = residual_norms(&field, mesh, cfg)?;
        let rmax = norms.iter().cloned().fold(0.0, f64::max);
        log::debug!("step {step}: residual {rmax:.3e}, cfl {cfl:.3e}, {linear_iterations} linear iterations");
        log.push(LogEntry { step, residual: norms, cfl, linear_iterations });
        if cfg.scheme == TimeScheme::Implicit {
            cfl = (cfg.implicit_cfl * r0 / rmax.max(f64::MIN_POSITIVE)).clamp(cfl.min(cfg.implicit_cfl), cfg.implicit_cfl_max);
        }
    }
    let converged = norms.iter().cloned().fold(0.0, f64::max) < cfg.convergence_tol;
    if !converged {
        log::warn!("steady solve stopped after {} steps at residual {:.3e}", cfg.max_steps, log.last().unwrap().max_norm());
    }
    Ok(SteadySolution { field, log, converged })
}

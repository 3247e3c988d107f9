//! Upwind conservative scheme for Burgers' equation, its discrete adjoint,
//! and closed-form continuous adjoints for comparison.

mod oracle;

pub use oracle::{analytic_adjoint_oracle, AnalyticCase};

use crate::error::{Error, Result};
use std::io::Write;
use std::path::Path;

/// Uniform node grid x_i = x_min + i·dx, i = 0..=n.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub dt: f64,
    pub n_steps: usize,
}

impl Grid1D {
    /// Grid whose step is at most `cfl·dx/u_max`, shortened so that
    /// `n_steps·dt = t_final` exactly.
    pub fn new(x_min: f64, x_max: f64, n: usize, t_final: f64, cfl: f64, u_max: f64) -> Result<Self> {
        if !(x_max > x_min) || n < 2 {
            return Err(Error::Structural(format!("bad grid [{x_min}, {x_max}] with {n} cells")));
        }
        if !(t_final >= 0.0) || !(cfl > 0.0 && cfl <= 1.0) {
            return Err(Error::Range(format!("t_final = {t_final}, cfl = {cfl}")));
        }
        let dx = (x_max - x_min) / n as f64;
        let dt_max = cfl * dx / u_max.abs().max(1e-12);
        let n_steps = (t_final / dt_max).ceil() as usize;
        let dt = if n_steps == 0 { 0.0 } else { t_final / n_steps as f64 };
        Ok(Grid1D { x_min, x_max, n, dt, n_steps })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.x(i)).collect()
    }

    pub fn t_final(&self) -> f64 {
        self.dt * self.n_steps as f64
    }
}

/// Closed interval of integration for the functional; infinite ends allowed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region {
    pub lo: f64,
    pub hi: f64,
}

impl Region {
    pub const POSITIVE: Region = Region { lo: 0.0, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Self {
        Region { lo, hi }
    }

    pub fn weight(&self, x: f64) -> f64 {
        // nodes computed as x_min + i·dx may miss an end by rounding
        let tol = 1e-9 * (1.0 + x.abs());
        if x >= self.lo - tol && x <= self.hi + tol {
            1.0
        } else {
            0.0
        }
    }

    pub fn weights(&self, grid: &Grid1D) -> Vec<f64> {
        grid.nodes().iter().map(|&x| self.weight(x)).collect()
    }
}

/// Stored forward states u⁰…u^M and the switches used by each step.
#[derive(Clone, Debug)]
pub struct BurgersTrajectory {
    pub grid: Grid1D,
    pub states: Vec<Vec<f64>>,
    /// `switches[m][i]` is s_i for the step m → m+1 (index 0 unused).
    pub switches: Vec<Vec<bool>>,
}

impl BurgersTrajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory holds u⁰")
    }
}

/// Adjoint states, `states[m]` paired with forward level m.
#[derive(Clone, Debug)]
pub struct AdjointTrajectory {
    pub states: Vec<Vec<f64>>,
}

impl AdjointTrajectory {
    pub fn initial(&self) -> &[f64] {
        &self.states[0]
    }
}

/// Interface flux between nodes i−1 and i for switch s_i.
#[inline]
fn interface_flux(ul: f64, ur: f64, s: bool) -> f64 {
    if s {
        0.5 * ul * ul
    } else {
        0.5 * ur * ur
    }
}

/// One explicit step; the end nodes keep their values.
pub fn burgers_step(u: &[f64], grid: &Grid1D) -> Result<(Vec<f64>, Vec<bool>)> {
    let n = grid.n;
    if u.len() != n + 1 {
        return Err(Error::Structural(format!("state has {} nodes, grid {}", u.len(), n + 1)));
    }
    let dx = grid.dx();
    let lambda = grid.dt / dx;
    for (i, ui) in u.iter().enumerate() {
        let courant = lambda * ui.abs();
        if !(courant <= 1.0) {
            return Err(Error::Cfl { node: i, courant });
        }
    }
    let s: Vec<bool> = (0..=n).map(|i| i > 0 && u[i] + u[i - 1] > 0.0).collect();
    let mut next = u.to_vec();
    let mut left = interface_flux(u[0], u[1], s[1]);
    for i in 1..n {
        let right = interface_flux(u[i], u[i + 1], s[i + 1]);
        next[i] = u[i] - lambda * (right - left);
        left = right;
    }
    Ok((next, s))
}

/// March `u0` sampled at the nodes through `grid.n_steps` steps.
pub fn run_forward<F: Fn(f64) -> f64>(u0: F, grid: &Grid1D) -> Result<BurgersTrajectory> {
    run_forward_from(grid.nodes().into_iter().map(u0).collect(), grid)
}

pub fn run_forward_from(u0: Vec<f64>, grid: &Grid1D) -> Result<BurgersTrajectory> {
    let mut states = Vec::with_capacity(grid.n_steps + 1);
    let mut switches = Vec::with_capacity(grid.n_steps);
    states.push(u0);
    for _ in 0..grid.n_steps {
        let (next, s) = burgers_step(states.last().unwrap(), grid)?;
        states.push(next);
        switches.push(s);
    }
    Ok(BurgersTrajectory { grid: *grid, states, switches })
}

/// ½ Σ wᵢ (uᵢ^M)² dx over the region.
pub fn functional_j(traj: &BurgersTrajectory, region: Region) -> f64 {
    let w = region.weights(&traj.grid);
    if w.iter().all(|&x| x == 0.0) {
        log::warn!("functional region {region:?} contains no grid node");
    }
    let dx = traj.grid.dx();
    traj.final_state().iter().zip(&w).map(|(u, w)| 0.5 * w * u * u * dx).sum()
}

/// Exact transpose of the scheme linearised about `traj` with the stored
/// switches, started from u*^M = wᵢ uᵢ^M.
pub fn burgers_adjoint(traj: &BurgersTrajectory, region: Region) -> Result<AdjointTrajectory> {
    let terminal: Vec<f64> = region
        .weights(&traj.grid)
        .iter()
        .zip(traj.final_state())
        .map(|(w, u)| w * u)
        .collect();
    adjoint_from(traj, terminal)
}

/// Backward sweep from an arbitrary terminal co-state.
pub fn adjoint_from(traj: &BurgersTrajectory, terminal: Vec<f64>) -> Result<AdjointTrajectory> {
    let n = traj.grid.n;
    let m_steps = traj.grid.n_steps;
    if traj.switches.len() != m_steps || traj.states.len() != m_steps + 1 {
        return Err(Error::Structural("trajectory is missing stored switches or states".into()));
    }
    if terminal.len() != n + 1 {
        return Err(Error::Structural("terminal adjoint has wrong length".into()));
    }
    let lambda = traj.grid.dt / traj.grid.dx();
    let mut states = vec![Vec::new(); m_steps + 1];
    states[m_steps] = terminal;
    for m in (0..m_steps).rev() {
        let u = &traj.states[m];
        let s = &traj.switches[m];
        let a = &states[m + 1];
        let mut prev = vec![0.0; n + 1];
        // boundary rows are identities
        prev[0] = a[0];
        prev[n] = a[n];
        for i in 1..n {
            // ∂u_i^{m+1}/∂u_k, scattered to k = i−1, i, i+1
            let si = s[i] as u8 as f64;
            let si1 = s[i + 1] as u8 as f64;
            prev[i] += a[i] * (1.0 - lambda * u[i] * (si - (1.0 - si1)));
            prev[i - 1] += a[i] * lambda * si * u[i - 1];
            prev[i + 1] -= a[i] * lambda * (1.0 - si1) * u[i + 1];
        }
        states[m] = prev;
    }
    Ok(AdjointTrajectory { states })
}

/// δJ = dx Σ u*⁰ᵢ δu⁰ᵢ.
pub fn gradient_j(traj: &BurgersTrajectory, adjoint: &AdjointTrajectory, du0_da: &[f64]) -> Result<f64> {
    let a0 = adjoint.initial();
    if du0_da.len() != a0.len() || a0.len() != traj.grid.n + 1 {
        return Err(Error::Structural(format!(
            "sensitivity has {} entries, grid {}",
            du0_da.len(),
            traj.grid.n + 1
        )));
    }
    Ok(traj.grid.dx() * a0.iter().zip(du0_da).map(|(a, d)| a * d).sum::<f64>())
}

/// Linearised forward sweep: δu^M for initial perturbation δu⁰.
pub fn run_tangent(traj: &BurgersTrajectory, du0: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = traj.grid.n;
    if du0.len() != n + 1 {
        return Err(Error::Structural("tangent seed has wrong length".into()));
    }
    let lambda = traj.grid.dt / traj.grid.dx();
    let mut out = Vec::with_capacity(traj.grid.n_steps + 1);
    out.push(du0.to_vec());
    for m in 0..traj.grid.n_steps {
        let u = &traj.states[m];
        let s = &traj.switches[m];
        let d = out.last().unwrap();
        let mut next = d.clone();
        let dflux = |i: usize| {
            // derivative of the flux at the interface between i−1 and i
            if s[i] {
                u[i - 1] * d[i - 1]
            } else {
                u[i] * d[i]
            }
        };
        for i in 1..n {
            next[i] = d[i] - lambda * (dflux(i + 1) - dflux(i));
        }
        out.push(next);
    }
    Ok(out)
}

/// Initial data −min(atan(x + a), 0) and its a-derivative.
pub fn atan_initial(a: f64) -> impl Fn(f64) -> f64 {
    move |x| -(x + a).atan().min(0.0)
}

pub fn atan_initial_da(a: f64) -> impl Fn(f64) -> f64 {
    move |x| if x + a < 0.0 { -1.0 / (1.0 + (x + a) * (x + a)) } else { 0.0 }
}

/// Riemann data (1+a)(1 − H(x)).
pub fn riemann_initial(a: f64) -> impl Fn(f64) -> f64 {
    move |x| if x < 0.0 { 1.0 + a } else { 0.0 }
}

/// Everything needed to evaluate J and dJ/da for one parametrised case.
#[derive(Clone, Debug)]
pub struct SensitivityRun {
    pub trajectory: BurgersTrajectory,
    pub adjoint: AdjointTrajectory,
    pub du0_da: Vec<f64>,
    pub j: f64,
    pub gradient: f64,
}

pub fn sensitivity_run<F, D>(u0: F, du0_da: D, grid: &Grid1D, region: Region) -> Result<SensitivityRun>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let trajectory = run_forward(u0, grid)?;
    let adjoint = burgers_adjoint(&trajectory, region)?;
    let du0_da: Vec<f64> = grid.nodes().into_iter().map(du0_da).collect();
    let j = functional_j(&trajectory, region);
    let gradient = gradient_j(&trajectory, &adjoint, &du0_da)?;
    Ok(SensitivityRun { trajectory, adjoint, du0_da, j, gradient })
}

/// Columns x, u_T, u_star_0, u_star_T, du_da (the last from the tangent sweep).
pub fn write_csv(run: &SensitivityRun, path: &Path) -> Result<()> {
    let tangent = run_tangent(&run.trajectory, &run.du0_da)?;
    let du_t = tangent.last().unwrap();
    let a0 = run.adjoint.initial();
    let a_t = run.adjoint.states.last().unwrap();
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "x,u_T,u_star_0,u_star_T,du_da")?;
    for (i, x) in run.trajectory.grid.nodes().iter().enumerate() {
        writeln!(f, "{x:.17e},{:.17e},{:.17e},{:.17e},{:.17e}", run.trajectory.final_state()[i], a0[i], a_t[i], du_t[i])?;
    }
    f.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid1D {
        Grid1D::new(-1.0, 1.0, 40, 0.5, 0.4, 2.0).unwrap()
    }

    #[test]
    fn constant_and_zero_states_are_preserved() {
        let g = grid();
        for c in [0.0, 1.3, -0.7] {
            let (next, _) = burgers_step(&vec![c; g.n + 1], &g).unwrap();
            assert!(next.iter().all(|&v| v == c));
        }
    }

    #[test]
    fn cfl_violation_reports_node() {
        let g = grid();
        let mut u = vec![0.0; g.n + 1];
        u[7] = 100.0;
        assert!(matches!(burgers_step(&u, &g), Err(Error::Cfl { node: 7, .. })));
    }

    #[test]
    fn switch_is_zero_on_exact_cancellation() {
        let g = grid();
        let mut u = vec![0.0; g.n + 1];
        u[3] = 1.0;
        u[4] = -1.0;
        let (_, s) = burgers_step(&u, &g).unwrap();
        assert!(!s[4] && s[3]);
        assert!(!s[0]);
    }

    #[test]
    fn region_weights() {
        let r = Region::new(-0.5, 0.5);
        assert_eq!(r.weight(-0.5), 1.0);
        assert_eq!(r.weight(0.5 + 1e-15), 1.0);
        assert_eq!(r.weight(0.0), 1.0);
        assert_eq!(r.weight(0.7), 0.0);
        assert_eq!(Region::POSITIVE.weight(1e9), 1.0);
    }

    #[test]
    fn zero_field_gives_zero_everything() {
        let g = grid();
        let run = sensitivity_run(|_| 0.0, |_| 1.0, &g, Region::POSITIVE).unwrap();
        assert_eq!(run.j, 0.0);
        assert!(run.adjoint.states.iter().flatten().all(|&v| v == 0.0));
        let run = sensitivity_run(atan_initial(0.0), |_| 0.0, &g, Region::POSITIVE).unwrap();
        assert_eq!(run.gradient, 0.0);
    }

    #[test]
    fn gradient_rejects_dimension_mismatch() {
        let g = grid();
        let run = sensitivity_run(atan_initial(0.0), atan_initial_da(0.0), &g, Region::POSITIVE).unwrap();
        assert!(gradient_j(&run.trajectory, &run.adjoint, &[1.0; 3]).is_err());
    }

    #[test]
    fn adjoint_and_tangent_agree() {
        let g = grid();
        let run = sensitivity_run(atan_initial(0.1), atan_initial_da(0.1), &g, Region::POSITIVE).unwrap();
        let tangent = run_tangent(&run.trajectory, &run.du0_da).unwrap();
        let w = Region::POSITIVE.weights(&g);
        let u_t = run.trajectory.final_state();
        let dj: f64 = (0..=g.n).map(|i| w[i] * u_t[i] * tangent.last().unwrap()[i] * g.dx()).sum();
        assert!((dj - run.gradient).abs() < 1e-13 * dj.abs().max(1e-3));
    }
}

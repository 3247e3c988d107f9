//! The acceptance matrix: ten criteria, each a set of named checks with a
//! runtime budget. Shared by the `acceptance` test target and `verify-all`.

use crate::adjoint::*;
use crate::burgers::{self, Grid1D, Region};
use crate::calculus::{
    extended_product_variation, map_variation, mean_value, shift_variation_apply, shock_variation, volpert_ratio, FnMap,
    Piece, PiecewiseFunction1D, Polynomial, ShiftForm,
};
use crate::euler::{
    abs_jacobian, flux, flux_jacobian_normal, flux_normal, roe_average, ConservativeState, EntropyFix, GasModel, Matrix4,
};
use crate::mesh::*;
use crate::solver::*;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::time::{Duration, Instant};

/// Test hooks that deliberately break a component.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Faults {
    /// Perturbs the analytic flux Jacobian before it is compared with FD.
    pub corrupt_jacobian: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass, detail: detail.into() }
    }

    fn info(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check::new(format!("{} (info)", name.into()), true, detail)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub runtime: Duration,
    pub budget: Duration,
    /// Set when the criterion could not be evaluated at all.
    pub error: Option<String>,
}

impl CriterionReport {
    pub fn pass(&self) -> bool {
        self.error.is_none() && self.runtime <= self.budget && self.checks.iter().all(|c| c.pass)
    }

    pub fn failing_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "criterion {:>2} {} — {} ({:.1} s, budget {} s)",
            self.id,
            if self.pass() { "PASS" } else { "FAIL" },
            self.title,
            self.runtime.as_secs_f64(),
            self.budget.as_secs()
        )?;
        if let Some(e) = &self.error {
            writeln!(f, "    error: {e}")?;
        }
        for c in &self.checks {
            writeln!(f, "    [{}] {}: {}", if c.pass { "ok" } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

/// (id, title, group, budget in seconds).
pub const CRITERIA: [(u8, &str, &str, u64); 10] = [
    (1, "Burgers sensitivity on the documented atan case", "burgers", 10),
    (2, "analytic Burgers gradient", "burgers", 30),
    (3, "Burgers adjoint continuity across the shock", "burgers", 30),
    (4, "extended-calculus identities", "burgers", 1),
    (5, "Euler building blocks", "euler", 5),
    (6, "2D discrete duality on the wedge channel", "euler", 300),
    (7, "outflow adjoint boundary condition", "euler", 600),
    (8, "ground adjoint boundary condition", "euler", 600),
    (9, "shape gradient descent", "euler", 600),
    (10, "adjoint jump geography", "euler", 300),
];

/// Criteria selected by `filter`: a group name (`burgers`, `euler`), a
/// criterion number, or a substring of a title.
pub fn select(filter: Option<&str>) -> Vec<u8> {
    CRITERIA
        .iter()
        .filter(|(id, title, group, _)| match filter {
            None => true,
            Some(f) => *group == f || f.parse::<u8>().ok() == Some(*id) || title.contains(f),
        })
        .map(|c| c.0)
        .collect()
}

pub fn run_criterion(id: u8, faults: Faults) -> CriterionReport {
    let &(_, title, _, budget) = CRITERIA.iter().find(|c| c.0 == id).expect("criterion id in 1..=10");
    let start = Instant::now();
    let result = match id {
        1 => burgers_table(),
        2 => analytic_burgers(),
        3 => burgers_continuity(),
        4 => calculus_identities(),
        5 => euler_blocks(faults),
        6 => discrete_duality(),
        7 => outflow_bc(),
        8 => ground_bc(),
        9 => shape_descent(),
        _ => jump_geography_check(),
    };
    let (checks, error) = match result {
        Ok(c) => (c, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    CriterionReport { id, title, checks, runtime: start.elapsed(), budget: Duration::from_secs(budget), error }
}

pub fn run(filter: Option<&str>, faults: Faults) -> Vec<CriterionReport> {
    select(filter).into_iter().map(|id| run_criterion(id, faults)).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

// ---------------------------------------------------------------- Burgers

const TABLE_J: f64 = 0.195009;
const TABLE_GRAD: f64 = -0.492863;

fn atan_grid(n: usize) -> Result<Grid1D> {
    Grid1D::new(-6.0, 6.0, n, 2.0, 0.4, std::f64::consts::FRAC_PI_2)
}

fn atan_run(n: usize) -> Result<burgers::SensitivityRun> {
    burgers::sensitivity_run(burgers::atan_initial(0.0), burgers::atan_initial_da(0.0), &atan_grid(n)?, Region::POSITIVE)
}

fn burgers_table() -> Result<Vec<Check>> {
    let g = atan_grid(2400)?;
    let run = atan_run(2400)?;
    let u0: Vec<f64> = g.nodes().into_iter().map(burgers::atan_initial(0.0)).collect();
    let j_dir = |eps: f64| -> Result<f64> {
        let v: Vec<f64> = u0.iter().zip(&run.du0_da).map(|(a, b)| a + eps * b).collect();
        Ok(burgers::functional_j(&burgers::run_forward_from(v, &g)?, Region::POSITIVE))
    };
    let mut best = f64::INFINITY;
    for e in [1e-4, 1e-5, 1e-6, 1e-7] {
        best = best.min(rel((j_dir(e)? - j_dir(-e)?) / (2.0 * e), run.gradient));
    }
    let j_at = |a: f64| -> Result<f64> {
        Ok(burgers::functional_j(&burgers::run_forward(burgers::atan_initial(a), &g)?, Region::POSITIVE))
    };
    let fd = (j_at(0.01)? - j_at(-0.01)?) / 0.02;
    let fine = atan_run(4800)?;
    Ok(vec![
        Check::new("adjoint vs directional FD of the discrete J", best <= 1e-6, format!("rel {best:.2e} (≤ 1e-6)")),
        Check::new(
            "FD with δa = 0.01 vs adjoint",
            rel(fd, run.gradient) <= 0.01,
            format!("FD {fd:.6}, adjoint {:.6}, rel {:.2e} (≤ 1e-2)", run.gradient, rel(fd, run.gradient)),
        ),
        Check::new(
            "J and gradient within 2% of the published table (n = 4800)",
            rel(fine.j, TABLE_J) <= 0.02 && rel(fine.gradient, TABLE_GRAD) <= 0.02,
            format!(
                "J {:.6} vs {TABLE_J} (rel {:.3}), J′ {:.6} vs {TABLE_GRAD} (rel {:.3}); n = 2400: J {:.6}, J′ {:.6}",
                fine.j,
                rel(fine.j, TABLE_J),
                fine.gradient,
                rel(fine.gradient, TABLE_GRAD),
                run.j,
                run.gradient
            ),
        ),
    ])
}

/// ∫_{−½}^{0} u*(x, 0) dx for Riemann data at T = 1, J on [−½, ½].
fn riemann_gradient(n: usize) -> Result<f64> {
    let g = Grid1D::new(-2.0, 2.0, n, 1.0, 0.4, 1.0)?;
    let run = burgers::sensitivity_run(burgers::riemann_initial(0.0), |_| 0.0, &g, Region::new(-0.5, 0.5))?;
    let half = Region::new(-0.5, 0.0);
    Ok(g.nodes().iter().zip(run.adjoint.initial()).map(|(&x, a)| half.weight(x) * a * g.dx()).sum())
}

fn analytic_burgers() -> Result<Vec<Check>> {
    let exact = 0.25 * (3.0 * 1.0 - 2.0);
    let grads = [riemann_gradient(1000)?, riemann_gradient(2000)?, riemann_gradient(4000)?];
    let errs = grads.map(|g| (g - exact).abs());
    let orders = [(errs[0] / errs[1]).log2(), (errs[1] / errs[2]).log2()];
    Ok(vec![
        Check::new(
            "gradient within 1% of ¼(3T−2) at n = 4000",
            rel(grads[2], exact) <= 0.01,
            format!("{:.6} vs {exact} (rel {:.2e})", grads[2], rel(grads[2], exact)),
        ),
        Check::new(
            "observed order ≥ 0.8 over three refinements",
            orders.iter().all(|&p| p >= 0.8),
            format!("errors {:.2e} {:.2e} {:.2e}, orders {:.3} {:.3}", errs[0], errs[1], errs[2], orders[0], orders[1]),
        ),
    ])
}

fn burgers_continuity() -> Result<Vec<Check>> {
    let mut shock = Vec::new();
    let mut plateau = Vec::new();
    let mut shock_ok = true;
    let mut plateau_ok = true;
    for n in [1000, 2000, 4000] {
        let g = Grid1D::new(-2.0, 2.0, n, 1.0, 0.4, 1.0)?;
        let run = burgers::sensitivity_run(burgers::riemann_initial(0.0), |_| 0.0, &g, Region::new(-0.5, 0.5))?;
        let k_mid = g.n_steps / 2;
        let mid = &run.adjoint.states[k_mid];
        let t_mid = g.dt * k_mid as f64;
        let k = ((0.5 * t_mid - g.x_min) / g.dx()).round() as usize;
        let sup = mid.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let jump = (mid[k + 3] - mid[k - 3]).abs();
        shock_ok &= jump < 5.0 * g.dx() * sup;
        shock.push(format!("n={n}: {jump:.2e} < {:.2e}", 5.0 * g.dx() * sup));
        let a0 = run.adjoint.initial();
        let at = |x: f64| a0[((x - g.x_min) / g.dx()).round() as usize];
        let jl = (at(-0.7) - at(-0.3)).abs();
        let jr = (at(0.3) - at(0.7)).abs();
        plateau_ok &= jl >= 0.4 && jr >= 0.4;
        plateau.push(format!("n={n}: {jl:.3}, {jr:.3}"));
    }
    Ok(vec![
        Check::new("mid-time adjoint jump across the shock < 5·dx·‖u*‖∞", shock_ok, shock.join("; ")),
        Check::new("t = 0 jumps at x = ±T/2 stay ≥ 0.4 (plateau to plateau)", plateau_ok, plateau.join("; ")),
    ])
}

fn calculus_identities() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));
    let step = |l: f64, r: f64| PiecewiseFunction1D::step(-1.0, 1.0, 0.0, l, r);
    let zero = PiecewiseFunction1D::smooth(-1.0, 1.0, Polynomial::zero())?;
    let half_square = Polynomial::new(vec![0.0, 0.0, 0.5]);
    let sin = FnMap { f: f64::sin, df: f64::cos };
    let (mut prod, mut rhom, mut volpert, mut vvv) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut all = true;
    for _ in 0..200 {
        let (l, r) = (rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        let (rl, rr) = (rng.gen_range(0.1..4.0), rng.gen_range(0.1..4.0));
        let (xs, da, c) = (rng.gen_range(-2.0..2.0), rng.gen_range(-0.5..0.5), rng.gen_range(-2.0..2.0));
        // product rule with mean values, and its Dirac weight
        let (rho, u) = (step(rl, rr)?, step(l, r)?);
        let slope = PiecewiseFunction1D::smooth(-1.0, 1.0, Polynomial::linear(c, 1.0))?;
        let drho = shock_variation(&rho, &slope, 0.0, xs, da)?;
        let du = shock_variation(&u, &zero, 0.0, xs, da)?;
        let a = extended_product_variation(&rho, &u, &drho, &du)?;
        let b = extended_product_variation(&u, &rho, &du, &drho)?;
        let e = a.max_difference(&b)?.max((a.dirac_at(0.0) + xs * da * (rr * r - rl * l)).abs());
        prod = prod.max(e);
        all &= close(a.dirac_at(0.0), -xs * da * (rr * r - rl * l)) && a.max_difference(&b)? <= 1e-12;
        // Volpert ratio of u²/2 is the mean value; of 1/ρ it is −mean(1/ρ)/mean(ρ)
        let m = mean_value(&u, 0.0)?;
        if l != r {
            volpert = volpert.max((volpert_ratio(&half_square, l, r) - m).abs());
            all &= close(volpert_ratio(&half_square, l, r), m);
        }
        if rl != rr {
            let inv = FnMap { f: |x: f64| 1.0 / x, df: |x: f64| -1.0 / (x * x) };
            let expect = -0.5 * (1.0 / rl + 1.0 / rr) / (0.5 * (rl + rr));
            rhom = rhom.max((volpert_ratio(&inv, rl, rr) - expect).abs());
            all &= close(volpert_ratio(&inv, rl, rr), expect);
        }
        // chain rule through a map: Dirac weight −[f(ρ)]·x_s′δa
        if l != r {
            let d = map_variation(&sin, &u, &du)?;
            let expect = -(r.sin() - l.sin()) * xs * da;
            vvv = vvv.max((d.dirac_at(0.0) - expect).abs());
            all &= close(d.dirac_at(0.0), expect);
        }
        // shift variation integrates to −[ρ]δa; polynomial products are exact
        let s = shift_variation_apply(&u, &[(0.0, da)], ShiftForm::Signed)?;
        all &= close(s.integral(), -(r - l) * da);
        let f = PiecewiseFunction1D::smooth(-1.0, 1.0, Piece::Poly(Polynomial::linear(c, xs)))?;
        let g = PiecewiseFunction1D::smooth(-1.0, 1.0, Piece::Poly(Polynomial::new(vec![xs, 0.0, c])))?;
        let x = rng.gen_range(-1.0..1.0);
        all &= close(f.mul(&g)?.eval(x)?, (c + xs * x) * (xs + c * x * x));
    }
    Ok(vec![Check::new(
        "product rule, Volpert ratios, map variations, shift integrals (200 samples each)",
        all,
        format!("max abs errors: product {prod:.1e}, reciprocal ratio {rhom:.1e}, Volpert {volpert:.1e}, map {vvv:.1e} (≤ 1e-12 relative)"),
    )])
}

// ---------------------------------------------------------------- Euler

fn random_state(rng: &mut ChaCha8Rng, gas: &GasModel) -> ConservativeState {
    ConservativeState::from_primitive(
        rng.gen_range(0.3..3.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(0.2..3.0),
        gas,
    )
}

fn random_normal(rng: &mut ChaCha8Rng) -> [f64; 2] {
    let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r: f64 = rng.gen_range(0.1..2.0);
    [r * t.cos(), r * t.sin()]
}

fn euler_blocks(faults: Faults) -> Result<Vec<Check>> {
    let gas = GasModel::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut jac, mut abs2, mut roe) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let w = random_state(&mut rng, &gas);
        let n = random_normal(&mut rng);
        let mut a = flux_jacobian_normal(&w, n, &gas)?;
        if faults.corrupt_jacobian {
            a.0[0][1] += 1e-3 * a.max_abs();
        }
        let arr = w.to_array();
        let h = 1e-6 * arr.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut fd = Matrix4::ZERO;
        for k in 0..4 {
            let mut p = arr;
            p[k] += h;
            let mut m = arr;
            m[k] -= h;
            let fp = flux_normal(&ConservativeState::from_array(p), n, &gas)?;
            let fm = flux_normal(&ConservativeState::from_array(m), n, &gas)?;
            for i in 0..4 {
                fd.0[i][k] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        jac = jac.max((fd - a).max_abs() / a.max_abs());
        let a = flux_jacobian_normal(&w, n, &gas)?;
        let abs = abs_jacobian(&w, n, &gas, EntropyFix::None)?;
        abs2 = abs2.max((abs * abs - a * a).frobenius() / (a * a).frobenius());
        let other = random_state(&mut rng, &gas).to_array();
        let t = rng.gen_range(0.0..0.3);
        let wj = ConservativeState::from_array(std::array::from_fn(|k| arr[k] + t * (other[k] - arr[k])));
        let ar = flux_jacobian_normal(&roe_average(&w, &wj, &gas)?, n, &gas)?;
        let dw: [f64; 4] = std::array::from_fn(|k| wj.to_array()[k] - arr[k]);
        let lhs = ar.mul_vec(&dw);
        let (fi, fj) = (flux_normal(&w, n, &gas)?, flux_normal(&wj, n, &gas)?);
        let scale = fi.iter().chain(&fj).fold(0.0f64, |m, x| m.max(x.abs()));
        roe = roe.max((0..4).map(|k| (lhs[k] - (fj[k] - fi[k])).abs()).fold(0.0, f64::max) / scale);
    }
    let cfg = SolverConfig::default();
    let mesh = generate_wedge_channel(&WedgeChannelParams { edge_length: 0.1, ..Default::default() })?.mesh;
    let (fx, _) = flux(&cfg.freestream.state(&cfg.gas), &cfg.gas)?;
    let fscale = fx.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut constant = 0.0f64;
    let mut tele = 0.0f64;
    let wavy = FieldState {
        w: mesh
            .vertices()
            .iter()
            .map(|p| {
                let (x, y) = (p[0], p[1]);
                ConservativeState::from_primitive(
                    1.0 + 0.2 * (2.0 * x + y).sin(),
                    2.0 + 0.2 * (3.0 * y).cos(),
                    0.2 * (x * y).sin(),
                    0.7 + 0.2 * (x - 2.0 * y).cos(),
                    &cfg.gas,
                )
                .to_array()
            })
            .collect(),
    };
    for muscl in [false, true] {
        let c = SolverConfig { muscl, ..cfg };
        // closed flat channel: no inflow/outflow mismatch, only slip walls
        let flat = generate_wedge_channel(&WedgeChannelParams { edge_length: 0.1, wedge_angle_deg: 0.0, ..Default::default() })?.mesh;
        let r = residual(&freestream_field(&flat, &c), &flat, &c)?;
        constant = constant.max(r.iter().flat_map(|x| x.iter()).fold(0.0f64, |m, x| m.max(x.abs())) / fscale);
        let r = residual(&wavy, &mesh, &c)?;
        let b = total_boundary_flux(&wavy, &mesh, &c)?;
        let scale: f64 = r.iter().map(|x| x.iter().map(|c| c.abs()).sum::<f64>()).sum();
        for k in 0..4 {
            tele = tele.max((r.iter().map(|x| x[k]).sum::<f64>() - b[k]).abs() / scale);
        }
    }
    Ok(vec![
        Check::new("flux Jacobian vs FD (100 random states)", jac <= 1e-6, format!("max rel {jac:.2e} (≤ 1e-6)")),
        Check::new("|A|² = A² without entropy fix", abs2 <= 1e-10, format!("max rel {abs2:.2e} (≤ 1e-10)")),
        Check::new("Roe property", roe <= 1e-8, format!("max rel {roe:.2e} (≤ 1e-8)")),
        Check::new("constant-state residual", constant <= 1e-11, format!("max rel {constant:.2e} (≤ 1e-11)")),
        Check::new("interior-flux telescoping", tele <= 1e-11, format!("max rel {tele:.2e} (≤ 1e-11)")),
    ])
}

/// First-order scheme with the exact Jacobian and tight Newton convergence.
pub fn verification_config() -> SolverConfig {
    SolverConfig { muscl: false, jacobian: JacobianMode::Exact, convergence_tol: 1e-11, max_steps: 100, ..Default::default() }
}

/// Mach-2 diamond profile on the top wall above a ground plane.
pub fn ground_case(h: f64) -> WedgeChannelParams {
    WedgeChannelParams {
        length: 3.0,
        height: 1.0,
        wedge_start: 0.3,
        wedge_length: 1.0,
        wedge_angle_deg: 5.0,
        wedge_side: WallSide::Top,
        wedge_shape: WedgeShape::Diamond,
        edge_length: h,
        bottom_tag: BoundaryTag::Ground,
        top_tag: BoundaryTag::SlipWall,
        diagonal: Diagonal::Alternating,
    }
}

fn wedge(h: f64) -> Result<StructuredChannel> {
    generate_wedge_channel(&WedgeChannelParams { edge_length: h, ..Default::default() })
}

fn converged(mesh: &Mesh2D, cfg: &SolverConfig) -> Result<FieldState> {
    let sol = solve_steady(&freestream_field(mesh, cfg), mesh, cfg)?;
    if !sol.converged {
        return Err(Error::Convergence(format!("steady solve stopped at residual {:.3e}", sol.final_residual())));
    }
    Ok(sol.field)
}

fn discrete_duality() -> Result<Vec<Check>> {
    let cfg = verification_config();
    let mesh = wedge(0.025)?.mesh;
    let f = Functional::outflow_density(cfg.freestream.rho);
    let chk = freestream_density_check(&mesh, &f, &cfg, &[1e-3, 1e-4, 1e-5])?;
    let sweep: Vec<String> = chk.fd.iter().map(|s| format!("ε={:.0e}: {:.8} ({:.1e})", s.eps, s.gradient, s.rel_error)).collect();
    let field = converged(&mesh, &cfg)?;
    let frozen = SolverConfig { jacobian: JacobianMode::Frozen, ..cfg };
    let adj = solve_adjoint(&field, &mesh, &f, &frozen)?;
    let g_frozen = freestream_density_gradient(&adj, &field, &mesh, &frozen)?;
    let fd_best = chk.fd.iter().min_by(|a, b| a.rel_error.total_cmp(&b.rel_error)).map_or(f64::NAN, |s| s.gradient);
    Ok(vec![
        Check::new(
            format!("adjoint dJ/dρ∞ vs nonlinear FD ({} vertices)", mesh.n_vertices()),
            chk.best_rel_error() <= 1e-3,
            format!("J {:.6}, adjoint {:.8}; {}", chk.j, chk.adjoint, sweep.join(", ")),
        ),
        Check::info("frozen-|Ã| Jacobian adjoint", format!("{g_frozen:.8}, rel {:.2e} vs FD", rel(g_frozen, fd_best))),
    ])
}

fn random_supersonic_trace(rng: &mut ChaCha8Rng, gas: &GasModel) -> ConservativeState {
    let c: f64 = rng.gen_range(0.5..2.0);
    let rho: f64 = rng.gen_range(0.3..3.0);
    let p = rho * c * c / gas.gamma;
    let u = c * rng.gen_range(1.1..3.0);
    ConservativeState::from_primitive(rho, u, rng.gen_range(-0.5..0.5) * c, p, gas)
}

fn outflow_bc() -> Result<Vec<Check>> {
    let cfg = verification_config();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut identity = 0.0f64;
    for _ in 0..100 {
        let w = random_supersonic_trace(&mut rng, &cfg.gas);
        let rho_inf = rng.gen_range(0.5..2.0);
        let a = analytic_outflow_adjoint(&w.to_array(), rho_inf, &cfg.gas)?;
        let r = flux_jacobian_normal(&w, [1.0, 0.0], &cfg.gas)?.tr_mul_vec(&a);
        let rhs = (w.rho / rho_inf - 1.0) / rho_inf;
        let scale = a.iter().fold(rhs.abs(), |m, x| m.max(x.abs()));
        identity = identity.max(((r[0] - rhs).abs()).max(r[1].abs()).max(r[2].abs()).max(r[3].abs()) / scale);
    }
    let f = Functional::outflow_density(cfg.freestream.rho);
    let mut reports = Vec::new();
    for h in [0.025, 0.0125] {
        let mesh = wedge(h)?.mesh;
        let field = converged(&mesh, &cfg)?;
        let adj = solve_adjoint(&field, &mesh, &f, &cfg)?;
        let rep = verify_outflow_bc(&adj, &field, &mesh, cfg.freestream.rho, &cfg.gas, ShockFlagging::default())?;
        reports.push((mesh.n_vertices(), rep, wall_condition_ratio(&adj, &mesh, BoundaryTag::SlipWall)));
    }
    let text = |i: usize| {
        let (n, r, _) = &reports[i];
        format!("{n} vertices: max {:.4}, mean {:.4}, {} flagged of {}", r.max_rel_smooth(), r.mean_rel_smooth(), r.flagged(), r.rows.len())
    };
    Ok(vec![
        Check::new("analytic trace solves the boundary system", identity <= 1e-10, format!("max residual {identity:.2e} (≤ 1e-10)")),
        Check::new("smooth outflow vertices within 5%", reports[0].1.max_rel_smooth() <= 0.05, text(0)),
        Check::new(
            "mean discrepancy decreases under refinement",
            reports[1].1.mean_rel_smooth() < reports[0].1.mean_rel_smooth(),
            text(1),
        ),
        Check::info("wall condition max|W*·n̂|/‖W*‖∞", format!("{:.4} → {:.4}", reports[0].2, reports[1].2)),
    ])
}

fn ground_bc() -> Result<Vec<Check>> {
    let cfg = verification_config();
    let p0 = PressureTarget::Constant(cfg.freestream.p);
    let f = Functional::ground_pressure(p0.clone());
    let mut rows = Vec::new();
    for h in [0.05, 0.025, 0.0125] {
        let mesh = generate_wedge_channel(&ground_case(h))?.mesh;
        let field = converged(&mesh, &cfg)?;
        let adj = solve_adjoint(&field, &mesh, &f, &cfg)?;
        let rep = ground_adjoint_check(&adj, &field, &mesh, &p0, &cfg.gas, cfg.freestream.rho, ShockFlagging::default())?;
        let right = match outflow_right_boundary_zero_check(&adj, &mesh, &f) {
            RightBoundaryCheck::Ratio(r) => r,
            RightBoundaryCheck::Skipped(_) => f64::NAN,
        };
        rows.push((mesh.n_vertices(), rep, right));
    }
    let list = |g: &dyn Fn(&BcReport) -> f64| rows.iter().map(|(_, r, _)| format!("{:.4}", g(r))).collect::<Vec<_>>().join(" → ");
    let fine = &rows[2].1;
    let max: Vec<f64> = rows.iter().map(|(_, r, _)| r.max_rel_smooth()).collect();
    let mean: Vec<f64> = rows.iter().map(|(_, r, _)| r.mean_rel_smooth()).collect();
    Ok(vec![
        Check::new("correlation of W₃* and p − p₀ > 0.98", fine.correlation(0) > 0.98, format!("{} (vertices {} → {} → {})", list(&|r| r.correlation(0)), rows[0].0, rows[1].0, rows[2].0)),
        Check::new(
            "pointwise within 5% away from flagged vertices",
            fine.max_rel_smooth() <= 0.05,
            format!("max {}; flagged {}", list(&|r| r.max_rel_smooth()), fine.flagged()),
        ),
        Check::new(
            "mean pointwise error decreases under refinement",
            mean.windows(2).all(|w| w[1] < w[0]),
            format!("mean {}", list(&|r| r.mean_rel_smooth())),
        ),
        Check::info(
            "max pointwise error decreases monotonically",
            format!("{}: max {}", max.windows(2).all(|w| w[1] < w[0]), list(&|r| r.max_rel_smooth())),
        ),
        Check::info(
            "outflow ‖W*‖ relative to global",
            rows.iter().map(|r| format!("{:.4}", r.2)).collect::<Vec<_>>().join(" → "),
        ),
    ])
}

fn shape_descent() -> Result<Vec<Check>> {
    let cfg = verification_config();
    let ch = generate_wedge_channel(&ground_case(0.05))?;
    let mesh = &ch.mesh;
    let f = Functional::ground_pressure(PressureTarget::Constant(cfg.freestream.p));
    let field = converged(mesh, &cfg)?;
    let j0 = functional_value(&field, mesh, &f, &cfg.gas)?;
    let adj = solve_adjoint(&field, mesh, &f, &cfg)?;
    let sweep = |form: ShapeGradientForm| -> Result<(bool, f64, f64, String)> {
        let mut nonpos = true;
        let mut lines = Vec::new();
        let (mut pred, mut actual) = (0.0, 0.0);
        for lambda in [1e-2, 3e-3, 1e-3] {
            let sg = shape_gradient(&adj, &field, mesh, &f, lambda, BoundaryTag::SlipWall, form, &cfg)?;
            let moved = displace_channel_wall(&ch, WallSide::Top, &sg, 1.0)?;
            let sol = solve_steady(&field, &moved, &cfg)?;
            let j1 = functional_value(&sol.field, &moved, &f, &cfg.gas)?;
            nonpos &= sg.predicted_dj <= 0.0;
            (pred, actual) = (sg.predicted_dj, j1 - j0);
            lines.push(format!("λ={lambda:.0e}: predicted {pred:.3e}, actual {actual:.3e}"));
        }
        Ok((nonpos, pred, actual, lines.join("; ")))
    };
    let (nonpos, pred, actual, text) = sweep(ShapeGradientForm::Printed)?;
    let (_, dpred, dactual, dtext) = sweep(ShapeGradientForm::Discrete)?;
    Ok(vec![
        Check::new("predicted δJ ≤ 0", nonpos, text.clone()),
        Check::new("J decreases after the displaced-wall re-solve", actual < 0.0, format!("J₀ {j0:.6e}, δJ {actual:.3e} at λ = 1e-3")),
        Check::new(
            "actual δJ within 30% of predicted",
            actual < 0.0 && rel(pred, actual) <= 0.3,
            format!("ratio predicted/actual {:.3}", pred / actual),
        ),
        Check::info("discrete-Lagrangian shape gradient", format!("{dtext}; ratio {:.3}", dpred / dactual)),
    ])
}

fn jump_geography_check() -> Result<Vec<Check>> {
    let cfg = verification_config();
    let f = Functional::outflow_density(cfg.freestream.rho);
    let mut out = Vec::new();
    for h in [0.025, 0.0125] {
        let mesh = wedge(h)?.mesh;
        let field = converged(&mesh, &cfg)?;
        let adj = solve_adjoint(&field, &mesh, &f, &cfg)?;
        let g = jump_geography(&field.density(), &adj.component(0), &mesh, JumpDetector::default(), 0.2, 0.3);
        out.push((mesh.n_vertices(), g));
    }
    let text = |(n, g): &(usize, JumpGeography)| {
        format!(
            "{n} vertices: {} of {} shock edges overlap ({:.1}%), {} adjoint-only jumps near {:?}",
            g.overlap,
            g.shock_edges,
            100.0 * g.overlap_fraction(),
            g.emanating,
            g.intersection.map(|p| [(p[0] * 1e3).round() / 1e3, (p[1] * 1e3).round() / 1e3])
        )
    };
    let fine = &out[1].1;
    Ok(vec![
        // the shock must be found along at least a unit length of the mesh
        Check::new(
            "shock detected along ≥ 1/h edges",
            fine.shock_edges as f64 >= 1.0 / 0.0125,
            format!("{} shock edges (≥ 80)", fine.shock_edges),
        ),
        Check::new(
            "ρ and W₁* jump sets disjoint along the shock (overlap < 10%)",
            fine.shock_edges > 0 && fine.overlap_fraction() < 0.1,
            format!("{}; {}", text(&out[0]), text(&out[1])),
        ),
        Check::new("W₁* jumps emanate from the outflow–shock intersection", fine.emanating > 0, format!("{} edges within 0.3", fine.emanating)),
    ])
}

//! Independent oracles for the Burgers solver and its adjoint.

use proptest::prelude::*;
use shockadj_core::burgers::*;

/// Entropy solution through the Hopf–Lax formula
/// u(x,t) = (x − y*)/t, y* = argmin_y U₀(y) + (x−y)²/2t.
fn hopf_lax(u0: impl Fn(f64) -> f64, x: f64, t: f64, y_lo: f64, y_hi: f64) -> f64 {
    let n = 200_000;
    let h = (y_hi - y_lo) / n as f64;
    let (mut big_u, mut best, mut arg) = (0.0, f64::INFINITY, y_lo);
    let mut prev = u0(y_lo);
    for k in 0..=n {
        let y = y_lo + k as f64 * h;
        let cur = u0(y);
        if k > 0 {
            big_u += 0.5 * h * (prev + cur);
        }
        prev = cur;
        let f = big_u + (x - y).powi(2) / (2.0 * t);
        if f < best {
            best = f;
            arg = y;
        }
    }
    (x - arg) / t
}

fn atan_grid(n: usize) -> Grid1D {
    Grid1D::new(-6.0, 6.0, n, 2.0, 0.4, std::f64::consts::FRAC_PI_2).unwrap()
}

#[test]
fn converges_to_the_entropy_solution() {
    let g = atan_grid(2400);
    let traj = run_forward(atan_initial(0.0), &g).unwrap();
    let u_t = traj.final_state();
    for x in [-3.0, -1.0, -0.2, 0.1, 0.3, 1.0] {
        let i = ((x - g.x_min) / g.dx()).round() as usize;
        let exact = hopf_lax(atan_initial(0.0), g.x(i), 2.0, -60.0, 6.0);
        assert!((u_t[i] - exact).abs() < 2e-2, "x={x}: {} vs {exact}", u_t[i]);
    }
    // J over x>0 against the exact profile, trapezoid on 0..0.6
    let m = 600;
    let exact_j: f64 = (0..=m)
        .map(|k| {
            let x = 0.6 * k as f64 / m as f64;
            let w = if k == 0 || k == m { 0.5 } else { 1.0 };
            0.5 * w * hopf_lax(atan_initial(0.0), x, 2.0, -60.0, 6.0).powi(2) * 0.6 / m as f64
        })
        .sum();
    let j = functional_j(&traj, Region::POSITIVE);
    assert!((j - exact_j).abs() < 0.01 * exact_j, "J = {j}, exact {exact_j}");
}

#[test]
fn riemann_shock_position() {
    let a = 0.3;
    let g = Grid1D::new(-2.0, 2.0, 800, 1.5, 0.4, 1.0 + a).unwrap();
    let traj = run_forward(riemann_initial(a), &g).unwrap();
    let u = traj.final_state();
    let half = 0.5 * (1.0 + a);
    let i = (0..g.n).find(|&i| u[i] >= half && u[i + 1] < half).unwrap();
    let xs = 0.5 * (1.0 + a) * g.t_final();
    assert!((g.x(i) - xs).abs() <= g.dx(), "{} vs {xs}", g.x(i));
}

#[test]
fn conservation_up_to_boundary_fluxes() {
    let g = atan_grid(600);
    let traj = run_forward(atan_initial(0.2), &g).unwrap();
    let dx = g.dx();
    let flux = |ul: f64, ur: f64| if ul + ur > 0.0 { 0.5 * ul * ul } else { 0.5 * ur * ur };
    for m in 0..g.n_steps {
        let (u, v) = (&traj.states[m], &traj.states[m + 1]);
        let mass = |w: &[f64]| w[1..g.n].iter().sum::<f64>() * dx;
        let boundary = g.dt * (flux(u[0], u[1]) - flux(u[g.n - 1], u[g.n]));
        assert!((mass(v) - mass(u) - boundary).abs() < 1e-12);
    }
}

#[test]
fn total_variation_does_not_grow() {
    let g = atan_grid(1200);
    let traj = run_forward(atan_initial(0.0), &g).unwrap();
    let tv = |w: &[f64]| w.windows(2).map(|p| (p[1] - p[0]).abs()).sum::<f64>();
    assert!(tv(traj.final_state()) <= tv(&traj.states[0]) + 1e-12);
    let u = traj.final_state();
    let steepest = u.windows(2).map(|p| (p[1] - p[0]).abs()).fold(0.0, f64::max);
    assert!(steepest > 0.2, "a shock should have formed");
}

#[test]
fn zero_initial_data_stays_zero() {
    let traj = run_forward(|_| 0.0, &atan_grid(100)).unwrap();
    assert!(traj.states.iter().flatten().all(|&v| v == 0.0));
}

/// Central FD of the discrete J along δu⁰, best value over a step sweep.
fn directional_fd(g: &Grid1D, u0: &[f64], du: &[f64], region: Region, adjoint: f64) -> f64 {
    let j = |eps: f64| {
        let v: Vec<f64> = u0.iter().zip(du).map(|(a, b)| a + eps * b).collect();
        functional_j(&run_forward_from(v, g).unwrap(), region)
    };
    [1e-4, 1e-5, 1e-6, 1e-7]
        .iter()
        .map(|&e| (j(e) - j(-e)) / (2.0 * e))
        .min_by(|a, b| (a - adjoint).abs().total_cmp(&(b - adjoint).abs()))
        .unwrap()
}

#[test]
fn adjoint_matches_directional_fd() {
    let g = atan_grid(300);
    let u0: Vec<f64> = g.nodes().into_iter().map(atan_initial(0.0)).collect();
    let du: Vec<f64> = g.nodes().into_iter().map(|x| (-(x + 1.0) * (x + 1.0)).exp()).collect();
    let traj = run_forward_from(u0.clone(), &g).unwrap();
    let adj = burgers_adjoint(&traj, Region::POSITIVE).unwrap();
    let grad = gradient_j(&traj, &adj, &du).unwrap();
    let fd = directional_fd(&g, &u0, &du, Region::POSITIVE, grad);
    assert!((grad - fd).abs() <= 1e-8 * grad.abs(), "{grad} vs {fd}");
}

#[test]
fn adjoint_is_continuous_across_the_shock_and_jumps_at_characteristics() {
    let t = 1.0;
    let mut narrow = Vec::new();
    for n in [1000, 2000] {
        let g = Grid1D::new(-2.0, 2.0, n, t, 0.4, 1.0).unwrap();
        let run = sensitivity_run(riemann_initial(0.0), |_| 0.0, &g, Region::new(-0.5, 0.5)).unwrap();
        let mid = &run.adjoint.states[g.n_steps / 2];
        let t_mid = g.dt * (g.n_steps / 2) as f64;
        let k = ((0.5 * t_mid - g.x_min) / g.dx()).round() as usize;
        let sup = mid.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let jump = (mid[k + 3] - mid[k - 3]).abs();
        assert!(jump < 5.0 * g.dx() * sup, "n={n}: jump {jump}");
        let a0 = run.adjoint.initial();
        let at = |x: f64| a0[((x - g.x_min) / g.dx()).round() as usize];
        // plateau-to-plateau jumps; the upwind scheme smears them over O(√dx)
        assert!((at(-0.5 - 0.2) - at(-0.5 + 0.2)).abs() >= 0.4);
        assert!((at(0.5 - 0.2) - at(0.5 + 0.2)).abs() >= 0.4);
        narrow.push((at(-0.5 - 0.05) - at(-0.5 + 0.05)).abs());
    }
    assert!(narrow[1] > narrow[0], "jump should sharpen: {narrow:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn duality_for_random_perturbations(
        a in -0.3f64..0.3, c in -3.0f64..2.0, w in 0.2f64..2.0, amp in 0.1f64..1.0, t in 0.5f64..2.5
    ) {
        let g = Grid1D::new(-4.0, 4.0, 160, t, 0.4, std::f64::consts::FRAC_PI_2 + 0.4).unwrap();
        let u0: Vec<f64> = g.nodes().into_iter().map(atan_initial(a)).collect();
        let du: Vec<f64> = g.nodes().into_iter().map(|x| amp * (-((x - c) / w).powi(2)).exp()).collect();
        let traj = run_forward_from(u0.clone(), &g).unwrap();
        let region = Region::new(-1.0, f64::INFINITY);
        let adj = burgers_adjoint(&traj, region).unwrap();
        let grad = gradient_j(&traj, &adj, &du).unwrap();
        prop_assume!(grad.abs() > 1e-8);
        let fd = directional_fd(&g, &u0, &du, region, grad);
        prop_assert!((grad - fd).abs() <= 1e-6 * grad.abs(), "{} vs {}", grad, fd);
    }
}

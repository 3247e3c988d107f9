#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shockadj_core::adjoint::*;
use shockadj_core::euler::{ConservativeState, GasModel, Vec4};
use shockadj_core::mesh::*;
use shockadj_core::solver::*;

fn flat(h: f64) -> StructuredChannel {
    generate_wedge_channel(&WedgeChannelParams { edge_length: h, wedge_angle_deg: 0.0, ..Default::default() }).unwrap()
}

fn ground_channel(h: f64) -> StructuredChannel {
    generate_wedge_channel(&WedgeChannelParams {
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
    })
    .unwrap()
}

fn exact_cfg() -> SolverConfig {
    SolverConfig { muscl: false, jacobian: JacobianMode::Exact, convergence_tol: 1e-11, max_steps: 100, ..Default::default() }
}

fn wavy_field(mesh: &Mesh2D, gas: &GasModel, amp: f64) -> FieldState {
    FieldState {
        w: mesh
            .vertices()
            .iter()
            .map(|p| {
                let (x, y) = (p[0], p[1]);
                ConservativeState::from_primitive(
                    1.0 + amp * (2.0 * x + y).sin(),
                    2.0 + amp * (3.0 * y).cos(),
                    amp * (x * y).sin(),
                    0.7 + amp * (x - 2.0 * y).cos(),
                    gas,
                )
                .to_array()
            })
            .collect(),
    }
}

fn dot(a: &[Vec4], b: &[Vec4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (0..4).map(|k| x[k] * y[k]).sum::<f64>()).sum()
}

fn functionals() -> [Functional; 2] {
    [Functional::outflow_density(1.0), Functional::ground_pressure(PressureTarget::Constant(0.7))]
}

fn mesh_for(f: &Functional) -> Mesh2D {
    if f.tag == BoundaryTag::Ground {
        ground_channel(0.1).mesh
    } else {
        flat(0.1).mesh
    }
}

#[test]
fn rhs_matches_finite_differences_of_the_functional() {
    let gas = GasModel::default();
    for f in functionals() {
        let mesh = mesh_for(&f);
        let field = wavy_field(&mesh, &gas, 0.1);
        let rhs = functional_gradient_rhs(&field, &mesh, &f, &gas).unwrap();
        let scale = rhs.iter().flat_map(|r| r.iter()).fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(scale > 0.0);
        for v in mesh.pure_tag_vertices(f.tag).into_iter().step_by(3) {
            for k in 0..4 {
                let h = 1e-6 * field.w[v][k].abs().max(1.0);
                let mut p = field.clone();
                p.w[v][k] += h;
                let mut m = field.clone();
                m.w[v][k] -= h;
                let fd = (functional_value(&p, &mesh, &f, &gas).unwrap() - functional_value(&m, &mesh, &f, &gas).unwrap())
                    / (2.0 * h);
                assert!((fd - rhs[v][k]).abs() <= 1e-6 * scale, "{:?} v={v} k={k}: {fd} vs {}", f.kind, rhs[v][k]);
            }
        }
        for (v, r) in rhs.iter().enumerate() {
            if !mesh.vertex_tags(v).contains(&f.tag) {
                assert_eq!(*r, [0.0; 4]);
            }
        }
    }
}

#[test]
fn matching_target_gives_zero_functional_rhs_and_adjoint() {
    let cfg = exact_cfg();
    let mesh = flat(0.1).mesh;
    let field = freestream_field(&mesh, &cfg);
    let f = Functional::outflow_density(cfg.freestream.rho);
    assert_eq!(functional_value(&field, &mesh, &f, &cfg.gas).unwrap(), 0.0);
    assert!(functional_gradient_rhs(&field, &mesh, &f, &cfg.gas).unwrap().iter().all(|r| *r == [0.0; 4]));
    let adj = solve_adjoint(&field, &mesh, &f, &cfg).unwrap();
    assert_eq!(adj.max_abs(), 0.0);
    let g = Functional::ground_pressure(PressureTarget::Constant(cfg.freestream.p));
    let gm = ground_channel(0.1).mesh;
    assert!(functional_value(&freestream_field(&gm, &cfg), &gm, &g, &cfg.gas).unwrap() < 1e-30);
}

#[test]
fn doubled_density_on_the_outflow_gives_half_the_length() {
    let gas = GasModel::default();
    let ch = flat(0.1);
    let height = ch.params.height;
    let mut field = FieldState::uniform(ch.mesh.n_vertices(), ConservativeState::from_primitive(1.0, 2.0, 0.0, 0.7, &gas));
    for w in field.w.iter_mut() {
        *w = w.map(|c| 2.0 * c);
    }
    let j = functional_value(&field, &ch.mesh, &Functional::outflow_density(1.0), &gas).unwrap();
    assert!((j - height / 2.0).abs() < 1e-12, "{j}");
}

#[test]
fn ground_rhs_points_along_the_pressure_gradient() {
    let gas = GasModel::default();
    let g = gas.gamma;
    let mesh = ground_channel(0.1).mesh;
    let field = wavy_field(&mesh, &gas, 0.2);
    let f = Functional::ground_pressure(PressureTarget::Constant(0.7));
    let rhs = functional_gradient_rhs(&field, &mesh, &f, &gas).unwrap();
    for v in mesh.pure_tag_vertices(BoundaryTag::Ground) {
        let w = field.w[v];
        let (u, vv) = (w[1] / w[0], w[2] / w[0]);
        let dir = [(g - 1.0) * 0.5 * (u * u + vv * vv), -(g - 1.0) * u, -(g - 1.0) * vv, g - 1.0];
        let s = rhs[v][3] / dir[3];
        for k in 0..4 {
            assert!((rhs[v][k] - s * dir[k]).abs() < 1e-12 * (1.0 + rhs[v][k].abs()));
        }
    }
}

#[test]
fn boundary_quadrature_is_second_order() {
    let gas = GasModel::default();
    let f = Functional::ground_pressure(PressureTarget::Constant(0.7));
    // p(x) = 0.7 + 0.1 sin 2x on 0 ≤ x ≤ 3: ½∫(p − p₀)² = 0.0025 (3 − sin 12 / 4).
    let exact = 0.0025 * (3.0 - (12.0f64).sin() / 4.0);
    let errs: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&h| {
            let mesh = ground_channel(h).mesh;
            let field = FieldState {
                w: mesh
                    .vertices()
                    .iter()
                    .map(|p| ConservativeState::from_primitive(1.0, 2.0, 0.0, 0.7 + 0.1 * (2.0 * p[0]).sin(), &gas).to_array())
                    .collect(),
            };
            (functional_value(&field, &mesh, &f, &gas).unwrap() - exact).abs()
        })
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order > 1.8, "{errs:?}");
    }
}

#[test]
fn adjoint_is_dual_to_the_linearised_solve() {
    // J′·δW with 𝒜δW = b equals W*·b for the same Jacobian.
    let cfg = exact_cfg();
    let mesh = ground_channel(0.1).mesh;
    let sol = solve_steady(&freestream_field(&mesh, &cfg), &mesh, &cfg).unwrap();
    let f = Functional::ground_pressure(PressureTarget::Constant(cfg.freestream.p));
    let adj = solve_adjoint(&sol.field, &mesh, &f, &cfg).unwrap();
    assert!(adj.rel_residual < 1e-10);
    assert!(adjoint_residual(&adj, &sol.field, &mesh, &f, &cfg).unwrap() < 1e-9);
    let a = assemble_first_order_jacobian(&sol.field, &mesh, &cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let b: Vec<Vec4> = (0..mesh.n_vertices()).map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0))).collect();
    let lin = LinearSolverConfig { rel_tol: 1e-12, max_iter: 3000, ..cfg.linear };
    let dw = solve_linear(&a, &b, &lin).unwrap();
    assert!(dw.converged);
    let rhs = functional_gradient_rhs(&sol.field, &mesh, &f, &cfg.gas).unwrap();
    let (l, r) = (dot(&rhs, &dw.x), dot(&adj.w, &b));
    assert!((l - r).abs() < 1e-8 * l.abs().max(r.abs()), "{l} vs {r}");
}

#[test]
fn freestream_density_gradient_matches_the_nonlinear_solve() {
    let cfg = exact_cfg();
    let mesh = generate_wedge_channel(&WedgeChannelParams { edge_length: 0.1, ..Default::default() }).unwrap().mesh;
    let f = Functional::outflow_density(cfg.freestream.rho);
    let chk = freestream_density_check(&mesh, &f, &cfg, &[1e-4]).unwrap();
    assert!(chk.j > 0.0);
    assert!(chk.best_rel_error() < 1e-3, "{chk:?}");
}

#[test]
fn imposed_analytic_trace_verifies_exactly() {
    let cfg = exact_cfg();
    let mesh = generate_wedge_channel(&WedgeChannelParams { edge_length: 0.1, ..Default::default() }).unwrap().mesh;
    let sol = solve_steady(&freestream_field(&mesh, &cfg), &mesh, &cfg).unwrap();
    let mut adj = AdjointField::zeros(mesh.n_vertices());
    for v in mesh.pure_tag_vertices(BoundaryTag::OutflowFree) {
        adj.w[v] = analytic_outflow_adjoint(&sol.field.w[v], 1.0, &cfg.gas).unwrap();
    }
    let no_flags = ShockFlagging { theta: f64::INFINITY, rings: 0 };
    let rep = verify_outflow_bc(&adj, &sol.field, &mesh, 1.0, &cfg.gas, no_flags).unwrap();
    assert!(!rep.rows.is_empty());
    assert!(rep.max_rel_smooth() < 1e-14);
}

#[test]
fn ground_check_is_zero_when_pressure_matches() {
    let cfg = exact_cfg();
    let mesh = ground_channel(0.1).mesh;
    let field = freestream_field(&mesh, &cfg);
    let rep = ground_adjoint_check(
        &AdjointField::zeros(mesh.n_vertices()),
        &field,
        &mesh,
        &PressureTarget::Constant(cfg.freestream.p),
        &cfg.gas,
        cfg.freestream.rho,
        ShockFlagging::default(),
    )
    .unwrap();
    assert!(rep.rows.iter().all(|r| r.numeric.iter().chain(&r.analytic).all(|x| x.abs() < 1e-15)));
}

#[test]
fn wall_and_outflow_checks_on_trivial_and_random_fields() {
    let mesh = ground_channel(0.1).mesh;
    let n = mesh.n_vertices();
    let g = Functional::ground_pressure(PressureTarget::Constant(0.7));
    assert_eq!(outflow_right_boundary_zero_check(&AdjointField::zeros(n), &mesh, &g), RightBoundaryCheck::Ratio(0.0));
    assert!(matches!(
        outflow_right_boundary_zero_check(&AdjointField::zeros(n), &mesh, &Functional::outflow_density(1.0)),
        RightBoundaryCheck::Skipped(_)
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let random = AdjointField { w: (0..n).map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0))).collect(), ..AdjointField::zeros(n) };
    assert!(wall_condition_ratio(&random, &mesh, BoundaryTag::SlipWall) > 0.3);
}

#[test]
fn zero_adjoint_gives_zero_shape_gradient() {
    let cfg = exact_cfg();
    let mesh = ground_channel(0.1).mesh;
    let field = wavy_field(&mesh, &cfg.gas, 0.1);
    let f = Functional::ground_pressure(PressureTarget::Constant(0.7));
    for form in [ShapeGradientForm::Printed, ShapeGradientForm::WithEnergy, ShapeGradientForm::Discrete] {
        let sg = shape_gradient(&AdjointField::zeros(mesh.n_vertices()), &field, &mesh, &f, 0.1, BoundaryTag::SlipWall, form, &cfg)
            .unwrap();
        assert!(sg.alpha.iter().all(|a| *a == 0.0) && sg.predicted_dj == 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn predicted_change_is_never_positive(seed in any::<u64>(), lambda in 1e-6f64..10.0) {
        let cfg = exact_cfg();
        let mesh = ground_channel(0.2).mesh;
        let field = wavy_field(&mesh, &cfg.gas, 0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = mesh.n_vertices();
        let adj = AdjointField { w: (0..n).map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0))).collect(), ..AdjointField::zeros(n) };
        let f = Functional::ground_pressure(PressureTarget::Constant(0.7));
        for form in [ShapeGradientForm::Printed, ShapeGradientForm::WithEnergy] {
            let sg = shape_gradient(&adj, &field, &mesh, &f, lambda, BoundaryTag::SlipWall, form, &cfg).unwrap();
            prop_assert!(sg.predicted_dj <= 0.0);
            prop_assert!(sg.g.iter().all(|g| g.is_finite()));
        }
    }
}

#[test]
fn jump_geography_separates_a_line_from_its_complement() {
    let mesh = flat(0.05).mesh;
    let rho: Vec<f64> = mesh.vertices().iter().map(|p| if p[1] > p[0] - 0.5 { 1.0 } else { 1.5 }).collect();
    let adj: Vec<f64> = mesh.vertices().iter().map(|p| if p[1] > 1.0 { 0.0 } else { 1.0 }).collect();
    let g = jump_geography(&rho, &adj, &mesh, JumpDetector::default(), 0.2, 0.3);
    assert!(g.shock_edges > 0);
    assert!(g.overlap_fraction() < 0.1, "{}", g.overlap_fraction());
    let same = jump_geography(&rho, &rho, &mesh, JumpDetector::default(), 0.2, 0.3);
    assert_eq!(same.overlap, same.shock_edges);
    assert_eq!(same.emanating, 0);
}

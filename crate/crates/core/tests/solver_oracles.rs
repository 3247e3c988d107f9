#![allow(clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shockadj_core::euler::kernels;
use shockadj_core::euler::{flux, pressure_jacobian, ConservativeState, EntropyFix, GasModel, Vec4};
use shockadj_core::mesh::{generate_wedge_channel, BoundaryTag, Diagonal, Mesh2D, WedgeChannelParams};
use shockadj_core::solver::*;

fn channel(h: f64, angle: f64) -> WedgeChannelParams {
    WedgeChannelParams { edge_length: h, wedge_angle_deg: angle, ..Default::default() }
}

fn retag(mesh: &Mesh2D, tag: BoundaryTag) -> Mesh2D {
    let mut raw = mesh.raw();
    for b in raw.boundary_edges.iter_mut() {
        b.tag = tag;
    }
    Mesh2D::new(raw.vertices, raw.triangles, raw.boundary_edges).unwrap()
}

/// Smooth, valid, non-uniform field.
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

fn max_abs(v: &[Vec4]) -> f64 {
    v.iter().flat_map(|x| x.iter()).fold(0.0f64, |m, x| m.max(x.abs()))
}

#[test]
fn constant_state_is_preserved() {
    let cfg = SolverConfig::default();
    let w = cfg.freestream.state(&cfg.gas);
    let (fx, _) = flux(&w, &cfg.gas).unwrap();
    let scale = fx.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let flat = generate_wedge_channel(&channel(0.1, 0.0)).unwrap().mesh;
    let ramp = generate_wedge_channel(&channel(0.1, 10.0)).unwrap().mesh;
    let meshes =
        [flat, retag(&ramp, BoundaryTag::OutflowFree), retag(&ramp, BoundaryTag::InflowFreestream)];
    for mesh in &meshes {
        for muscl in [false, true] {
            let c = SolverConfig { muscl, ..cfg };
            let r = residual(&freestream_field(mesh, &c), mesh, &c).unwrap();
            assert!(max_abs(&r) < 1e-11 * scale, "muscl={muscl}: {}", max_abs(&r));
        }
    }
}

#[test]
fn interior_fluxes_telescope() {
    let cfg = SolverConfig::default();
    let mesh = generate_wedge_channel(&channel(0.1, 10.0)).unwrap().mesh;
    let field = wavy_field(&mesh, &cfg.gas, 0.2);
    for muscl in [false, true] {
        let c = SolverConfig { muscl, ..cfg };
        let r = residual(&field, &mesh, &c).unwrap();
        let b = total_boundary_flux(&field, &mesh, &c).unwrap();
        let scale: f64 = r.iter().map(|x| x.iter().map(|c| c.abs()).sum::<f64>()).sum();
        for k in 0..4 {
            let s: f64 = r.iter().map(|x| x[k]).sum();
            assert!((s - b[k]).abs() <= 1e-11 * scale, "k={k}: {s} vs {}", b[k]);
        }
    }
}

#[test]
fn supersonic_columns_match_1d_upwind_roe() {
    // With every eigenvalue positive along every edge normal the Roe flux is
    // F(W_upwind)·n. For a column-constant field and closed cells this leaves
    // (F(W_{i−1}) − F(W_i))·N_prev at interior vertices, N_prev being the
    // summed dual-face normal towards column i−1: the 1D upwind scheme.
    let gas = GasModel::default();
    let params = WedgeChannelParams { height: 1.0, ..channel(0.1, 0.0) };
    let ch = generate_wedge_channel(&params).unwrap();
    let mesh = &ch.mesh;
    let cfg = SolverConfig { muscl: false, entropy_fix: EntropyFix::None, ..Default::default() };
    let col_state = |x: f64| {
        ConservativeState::from_primitive(1.0 + 0.3 * (3.0 * x).sin(), 3.2 + 0.2 * x, 0.0, 0.7 + 0.1 * x * x, &gas)
    };
    let field = FieldState { w: mesh.vertices().iter().map(|p| col_state(p[0]).to_array()).collect() };
    let r = residual(&field, mesh, &cfg).unwrap();
    let column = |v: usize| v / (ch.ny + 1);
    for i in 1..ch.nx() {
        let (fl, gl) = flux(&col_state(ch.columns[i - 1]), &gas).unwrap();
        let (fi, gi) = flux(&col_state(ch.columns[i]), &gas).unwrap();
        for j in 1..ch.ny {
            let v = ch.index(i, j);
            let mut np = [0.0; 2];
            for &e in mesh.vertex_edges(v) {
                let edge = mesh.edges()[e];
                let other = if edge.i == v { edge.j } else { edge.i };
                if column(other) + 1 == i {
                    let n = mesh.edge_normal_from(e, v);
                    np[0] += n[0];
                    np[1] += n[1];
                }
            }
            assert!(np[0] < 0.0);
            for k in 0..4 {
                let expected = (fl[k] - fi[k]) * np[0] + (gl[k] - gi[k]) * np[1];
                assert!((r[v][k] - expected).abs() < 1e-10, "({i},{j}) k={k}: {} vs {expected}", r[v][k]);
            }
        }
    }
}

/// First-order residual with the Roe matrix and the inflow split matrices
/// frozen at `base` — the function whose exact derivative the frozen
/// Jacobian is.
fn frozen_residual(field: &FieldState, base: &FieldState, mesh: &Mesh2D, cfg: &SolverConfig) -> Vec<Vec4> {
    let g = cfg.gas.gamma;
    let fix = cfg.entropy_fix;
    let winf = cfg.freestream.state(&cfg.gas).to_array();
    let mut r = vec![[0.0; 4]; mesh.n_vertices()];
    for e in mesh.edges() {
        let (wi, wj) = (field.w[e.i], field.w[e.j]);
        let s = kernels::roe_char_state(&base.w[e.i], &base.w[e.j], g).unwrap();
        let fi = kernels::flux_normal(&wi, e.normal, g);
        let fj = kernels::flux_normal(&wj, e.normal, g);
        let d = kernels::abs_apply(&s, e.normal, g, fix, &std::array::from_fn(|k| wi[k] - wj[k]));
        for k in 0..4 {
            let f = 0.5 * (fi[k] + fj[k] + d[k]);
            r[e.i][k] += f;
            r[e.j][k] -= f;
        }
    }
    for f in mesh.boundary_faces() {
        let w = field.w[f.vertex];
        let n = f.normal;
        let flux = match f.tag {
            BoundaryTag::SlipWall | BoundaryTag::Ground => kernels::slip_flux(&w, n, g),
            BoundaryTag::OutflowFree => kernels::flux_normal(&w, n, g),
            BoundaryTag::InflowFreestream => {
                let s = kernels::char_state(&base.w[f.vertex], g).unwrap();
                let a = kernels::split_apply(&s, n, g, fix, cfg.steger, true, &w);
                let b = kernels::split_apply(&s, n, g, fix, cfg.steger, false, &winf);
                std::array::from_fn(|k| a[k] + b[k])
            }
        };
        for k in 0..4 {
            r[f.vertex][k] += flux[k];
        }
    }
    r
}

fn fd_check<F: Fn(&FieldState) -> Vec<Vec4>>(jac: &BlockSparseMatrix, field: &FieldState, res: F, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dir: Vec<Vec4> = field.w.iter().map(|w| std::array::from_fn(|k| rng.gen_range(-1.0..1.0) * w[k].abs().max(0.1))).collect();
    let eps = 1e-6;
    let shift = |s: f64| FieldState {
        w: field.w.iter().zip(&dir).map(|(w, d)| std::array::from_fn(|k| w[k] + s * d[k])).collect(),
    };
    let rp = res(&shift(eps));
    let rm = res(&shift(-eps));
    let jv = jac.mul_vec(&dir);
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for v in 0..field.len() {
        for k in 0..4 {
            let fd = (rp[v][k] - rm[v][k]) / (2.0 * eps);
            num = num.max((fd - jv[v][k]).abs());
            den = den.max(fd.abs());
        }
    }
    num / den
}

#[test]
fn frozen_jacobian_matches_fd_of_frozen_residual() {
    let mesh = generate_wedge_channel(&channel(0.1, 10.0)).unwrap().mesh;
    for steger in [shockadj_core::euler::StegerConvention::Standard, shockadj_core::euler::StegerConvention::Paper] {
        let cfg = SolverConfig { muscl: false, jacobian: JacobianMode::Frozen, steger, ..Default::default() };
        let field = wavy_field(&mesh, &cfg.gas, 0.15);
        let jac = assemble_first_order_jacobian(&field, &mesh, &cfg).unwrap();
        for seed in 0..3 {
            let err = fd_check(&jac, &field, |f| frozen_residual(f, &field, &mesh, &cfg), seed);
            assert!(err < 1e-6, "{steger:?} seed {seed}: {err:e}");
        }
    }
}

#[test]
fn exact_jacobian_matches_fd_of_residual() {
    let mesh = generate_wedge_channel(&channel(0.1, 10.0)).unwrap().mesh;
    let cfg = SolverConfig { muscl: false, jacobian: JacobianMode::Exact, ..Default::default() };
    let field = wavy_field(&mesh, &cfg.gas, 0.15);
    let jac = assemble_first_order_jacobian(&field, &mesh, &cfg).unwrap();
    for seed in 0..3 {
        let err = fd_check(&jac, &field, |f| residual(f, &mesh, &cfg).unwrap(), seed);
        assert!(err < 1e-6, "seed {seed}: {err:e}");
    }
}

#[test]
fn uniform_field_interior_rows_sum_to_zero() {
    let mesh = generate_wedge_channel(&channel(0.1, 10.0)).unwrap().mesh;
    let cfg = SolverConfig::default();
    let jac = assemble_first_order_jacobian(&freestream_field(&mesh, &cfg), &mesh, &cfg).unwrap();
    let scale = jac.block(0, 0).unwrap().max_abs();
    for v in (0..mesh.n_vertices()).filter(|&v| !mesh.is_boundary_vertex(v)) {
        let s = jac.row_blocks(v).iter().fold(shockadj_core::euler::Matrix4::ZERO, |a, b| a + *b);
        assert!(s.max_abs() < 1e-12 * scale.max(1.0), "row {v}: {}", s.max_abs());
    }
}

#[test]
fn slip_jacobian_ignores_pressure_neutral_perturbations() {
    let cfg = SolverConfig::default();
    let w = ConservativeState::from_primitive(1.2, 0.5, -0.3, 0.9, &cfg.gas);
    let dp = pressure_jacobian(&w, &cfg.gas).unwrap();
    // δW orthogonal to ∂p/∂W
    let mut dw = [0.3, -0.2, 0.7, 0.0];
    dw[3] = -(dp[0] * dw[0] + dp[1] * dw[1] + dp[2] * dw[2]) / dp[3];
    let m = boundary_flux_jacobian(&w.to_array(), BoundaryTag::SlipWall, [0.2, -0.6], &cfg).unwrap();
    let out = m.mul_vec(&dw);
    assert!(out.iter().all(|x| x.abs() < 1e-14), "{out:?}");
}

#[test]
fn muscl_is_exact_for_linear_data_and_trivial_for_uniform() {
    let gas = GasModel::default();
    let mesh = generate_wedge_channel(&channel(0.1, 10.0)).unwrap().mesh;
    let lin = |p: [f64; 2]| -> Vec4 { [1.0 + 0.1 * p[0] + 0.05 * p[1], 2.0 - 0.2 * p[0], 0.1 * p[1], 3.0 + 0.3 * p[0]] };
    let field = FieldState { w: mesh.vertices().iter().map(|&p| lin(p)).collect() };
    let nodal = nodal_gradients(&field, &mesh);
    for limiter in [Limiter::Unlimited, Limiter::Dervieux3, Limiter::Minmod, Limiter::VanAlbada] {
        let cfg = SolverConfig { limiter, gas, ..Default::default() };
        for (e, edge) in mesh.edges().iter().enumerate() {
            let (a, b) = muscl_extrapolate(e, &field, &mesh, &nodal, &cfg);
            let (pi, pj) = (mesh.vertex(edge.i), mesh.vertex(edge.j));
            let mid = lin([0.5 * (pi[0] + pj[0]), 0.5 * (pi[1] + pj[1])]);
            for k in 0..4 {
                assert!((a[k] - mid[k]).abs() < 1e-12 && (b[k] - mid[k]).abs() < 1e-12, "{limiter:?} edge {e}");
            }
        }
    }
    let cfg = SolverConfig::default();
    let uni = freestream_field(&mesh, &cfg);
    let nodal = nodal_gradients(&uni, &mesh);
    for e in 0..mesh.edges().len() {
        let (a, b) = muscl_extrapolate(e, &uni, &mesh, &nodal, &cfg);
        assert_eq!(a, uni.w[0]);
        assert_eq!(b, uni.w[0]);
    }
}

#[test]
fn limited_reconstruction_stays_within_stencil_extrema() {
    let cfg = SolverConfig::default();
    let mesh = generate_wedge_channel(&channel(0.1, 10.0)).unwrap().mesh;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let field = FieldState {
        w: (0..mesh.n_vertices())
            .map(|_| {
                ConservativeState::from_primitive(
                    rng.gen_range(0.5..2.0),
                    rng.gen_range(-1.0..2.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(0.5..2.0),
                    &cfg.gas,
                )
                .to_array()
            })
            .collect(),
    };
    let nodal = nodal_gradients(&field, &mesh);
    for limiter in [Limiter::Dervieux3, Limiter::Minmod, Limiter::VanAlbada] {
        let c = SolverConfig { limiter, ..cfg };
        for (e, edge) in mesh.edges().iter().enumerate() {
            let (a, b) = muscl_extrapolate(e, &field, &mesh, &nodal, &c);
            for k in 0..4 {
                let lo = field.w[edge.i][k].min(field.w[edge.j][k]);
                let hi = field.w[edge.i][k].max(field.w[edge.j][k]);
                for x in [a[k], b[k]] {
                    assert!(x >= lo - 1e-14 && x <= hi + 1e-14, "{limiter:?} edge {e} k={k}");
                }
            }
        }
    }
}

#[test]
fn rk2_is_second_order_in_time() {
    let mesh = generate_wedge_channel(&channel(0.2, 10.0)).unwrap().mesh;
    let cfg = SolverConfig { muscl: false, ..Default::default() };
    let field = wavy_field(&mesh, &cfg.gas, 0.1);
    let lop = |f: &FieldState| -> Vec<Vec4> {
        residual(f, &mesh, &cfg).unwrap().iter().zip(mesh.volumes()).map(|(r, v)| r.map(|x| -x / v)).collect()
    };
    let axpy = |f: &FieldState, s: f64, d: &[Vec4]| FieldState {
        w: f.w.iter().zip(d).map(|(w, x)| std::array::from_fn(|k| w[k] + s * x[k])).collect(),
    };
    let l0 = lop(&field);
    let base = local_time_steps(&field, &mesh, &cfg, 0.5).unwrap();
    let err = |s: f64| {
        let dt: Vec<f64> = base.iter().map(|t| t * s).collect();
        // W + D L + ½ D J (D L), D = diag(δt)
        let dl: Vec<Vec4> = l0.iter().zip(&dt).map(|(l, t)| l.map(|x| x * t)).collect();
        let eta = 1e-4;
        let lp = lop(&axpy(&field, eta, &dl));
        let lm = lop(&axpy(&field, -eta, &dl));
        let next = ssp_rk2_step(&field, &mesh, &cfg, &dt).unwrap();
        let mut e = 0.0f64;
        for v in 0..field.len() {
            for k in 0..4 {
                let jdl = (lp[v][k] - lm[v][k]) / (2.0 * eta);
                let taylor = field.w[v][k] + dl[v][k] + 0.5 * dt[v] * jdl;
                e = e.max((next.w[v][k] - taylor).abs());
            }
        }
        e
    };
    let (e1, e2, e3) = (err(0.2), err(0.1), err(0.05));
    let (o1, o2) = ((e1 / e2).log2(), (e2 / e3).log2());
    assert!(o1 > 2.7 && o2 > 2.7, "local errors {e1:e} {e2:e} {e3:e}");
}

#[test]
fn steady_field_is_fixed_point() {
    let mesh = generate_wedge_channel(&channel(0.1, 0.0)).unwrap().mesh;
    let cfg = SolverConfig::default();
    let f = freestream_field(&mesh, &cfg);
    let dt = local_time_steps(&f, &mesh, &cfg, 0.9).unwrap();
    let g = ssp_rk2_step(&f, &mesh, &cfg, &dt).unwrap();
    assert!(f.w.iter().zip(&g.w).all(|(a, b)| (0..4).all(|k| (a[k] - b[k]).abs() < 1e-13)));
    let (h, _) = implicit_step(&f, &mesh, &cfg, 1e6).unwrap();
    assert!(f.w.iter().zip(&h.w).all(|(a, b)| (0..4).all(|k| (a[k] - b[k]).abs() < 1e-13)));
    let sol = solve_steady(&f, &mesh, &cfg).unwrap();
    assert!(sol.converged && sol.log.len() == 1);
}

/// Shock angle of an attached oblique shock (weak branch).
fn shock_angle(m: f64, theta: f64, g: f64) -> f64 {
    let f = |b: f64| {
        (2.0 / b.tan() * (m * m * b.sin().powi(2) - 1.0) / (m * m * (g + (2.0 * b).cos()) + 2.0)).atan() - theta
    };
    let (mut lo, mut hi) = ((1.0 / m).asin() + 1e-9, 64f64.to_radians());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn wedge_flow_matches_oblique_shock_relations() {
    let params = channel(0.05, 10.0);
    let mesh = generate_wedge_channel(&params).unwrap().mesh;
    let cfg = SolverConfig { muscl: false, jacobian: JacobianMode::Exact, ..Default::default() };
    let sol = solve_steady(&freestream_field(&mesh, &cfg), &mesh, &cfg).unwrap();
    assert!(sol.converged && sol.final_residual() < 1e-8, "{}", sol.final_residual());
    // monotone decrease after the first few steps
    let norms: Vec<f64> = sol.log.iter().map(|e| e.max_norm()).collect();
    assert!(norms[3..].windows(2).all(|w| w[1] < w[0]), "{norms:?}");

    let g = cfg.gas.gamma;
    let m1 = cfg.freestream.mach(&cfg.gas);
    let theta = params.wedge_angle_deg.to_radians();
    let beta = shock_angle(m1, theta, g);
    assert!((beta.to_degrees() - 39.31).abs() < 0.05);
    let mn = m1 * beta.sin();
    let rho_ratio = (g + 1.0) * mn * mn / ((g - 1.0) * mn * mn + 2.0);
    let p_ratio = 1.0 + 2.0 * g / (g + 1.0) * (mn * mn - 1.0);
    let fs = cfg.freestream;
    // a point well inside the uniform post-shock region
    let x0 = params.wedge_start;
    let probe = [x0 + 0.7, 0.25];
    let shock_y = (probe[0] - x0) * beta.tan();
    assert!(probe[1] < shock_y - 0.15);
    let data = flow_point_data(&sol.field, &cfg.gas);
    let s = &line_probe(&mesh, &data, probe, probe, 1)[0];
    let (rho, p) = (s.values[0], s.values[3]);
    assert!((rho / fs.rho / rho_ratio - 1.0).abs() < 0.01, "rho {rho} vs {}", rho_ratio * fs.rho);
    assert!((p / fs.p / p_ratio - 1.0).abs() < 0.01, "p {p} vs {}", p_ratio * fs.p);
    // post-shock flow follows the ramp
    let angle = s.values[2].atan2(s.values[1]);
    assert!((angle - theta).abs() < 0.01, "flow angle {}", angle.to_degrees());
}

fn permuted(mesh: &Mesh2D, perm: &[usize]) -> Mesh2D {
    // perm[old] = new
    let raw = mesh.raw();
    let mut verts = vec![[0.0; 2]; raw.vertices.len()];
    for (old, p) in raw.vertices.iter().enumerate() {
        verts[perm[old]] = *p;
    }
    let tris = raw.triangles.iter().map(|t| t.map(|v| perm[v])).collect();
    let mut bnd = raw.boundary_edges.clone();
    for b in bnd.iter_mut() {
        b.v = b.v.map(|v| perm[v]);
    }
    Mesh2D::new(verts, tris, bnd).unwrap()
}

#[test]
fn steady_solution_is_independent_of_vertex_order() {
    let mesh = generate_wedge_channel(&channel(0.1, 10.0)).unwrap().mesh;
    let n = mesh.n_vertices();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let pmesh = permuted(&mesh, &perm);
    let cfg = SolverConfig { muscl: false, convergence_tol: 1e-11, ..Default::default() };
    let a = solve_steady(&freestream_field(&mesh, &cfg), &mesh, &cfg).unwrap();
    let b = solve_steady(&freestream_field(&pmesh, &cfg), &pmesh, &cfg).unwrap();
    assert!(a.converged && b.converged);
    for v in 0..n {
        for k in 0..4 {
            assert!((a.field.w[v][k] - b.field.w[perm[v]][k]).abs() < 1e-8);
        }
    }
}

#[test]
fn residual_is_bitwise_identical_across_thread_counts() {
    let mesh = generate_wedge_channel(&channel(0.05, 10.0)).unwrap().mesh;
    let cfg = SolverConfig::default();
    let field = wavy_field(&mesh, &cfg.gas, 0.2);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let r = residual(&field, &mesh, &cfg).unwrap();
            let j = assemble_first_order_jacobian(&field, &mesh, &cfg).unwrap();
            (r, j)
        })
    };
    let (r1, j1) = run(1);
    let (r4, j4) = run(4);
    assert_eq!(r1, r4);
    assert_eq!(j1, j4);
    assert_eq!(run(4).0, r4);
}

#[test]
fn implicit_exact_newton_converges_superlinearly() {
    let mesh = generate_wedge_channel(&channel(0.1, 10.0)).unwrap().mesh;
    let cfg = SolverConfig {
        muscl: false,
        jacobian: JacobianMode::Exact,
        convergence_tol: 1e-12,
        ..Default::default()
    };
    let sol = solve_steady(&freestream_field(&mesh, &cfg), &mesh, &cfg).unwrap();
    assert!(sol.converged, "{}", sol.final_residual());
    let r: Vec<f64> = sol.log.iter().map(|e| e.max_norm()).collect();
    let k = r.len();
    // the last reductions accelerate: ratio of logs > 1
    let rate1 = (r[k - 3] / r[k - 2]).ln();
    let rate0 = (r[k - 4] / r[k - 3]).ln();
    assert!(rate1 > rate0 * 1.2 || r[k - 1] < 1e-13, "{r:?}");
    assert!(k < 25, "{k} steps");
}

#[test]
fn alternating_and_forward_meshes_give_same_shock_state() {
    let cfg = SolverConfig { muscl: false, ..Default::default() };
    let mut rhos = Vec::new();
    for d in [Diagonal::Alternating, Diagonal::Forward] {
        let params = WedgeChannelParams { diagonal: d, ..channel(0.05, 10.0) };
        let mesh = generate_wedge_channel(&params).unwrap().mesh;
        let sol = solve_steady(&freestream_field(&mesh, &cfg), &mesh, &cfg).unwrap();
        let data = flow_point_data(&sol.field, &cfg.gas);
        rhos.push(line_probe(&mesh, &data, [1.2, 0.3], [1.2, 0.3], 1)[0].values[0]);
    }
    assert!((rhos[0] - rhos[1]).abs() < 0.01, "{rhos:?}");
}

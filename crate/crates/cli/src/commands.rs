use crate::config::{BurgersCase, MeshSource, RunConfig};
use crate::output::OutputDir;
use crate::Failure;
use anyhow::Context;
use log::info;
use shockadj_core::acceptance::{self, Faults};
use shockadj_core::adjoint::{
    freestream_density_check, functional_value, ground_adjoint_check, shape_gradient, solve_adjoint, verify_outflow_bc,
    BcReport, FunctionalKind,
};
use shockadj_core::burgers::{self, Grid1D, Region};
use shockadj_core::mesh::{generate_wedge_channel, read_mesh, BoundaryTag, Mesh2D};
use shockadj_core::solver::{
    flow_point_data, freestream_field, line_probe, solve_steady, write_convergence_csv, write_probe_csv, write_vtk,
};
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

/// Ordered `key = value` lines, printed and written as summary.txt.
#[derive(Default)]
struct Summary(String);

impl Summary {
    fn put(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.0, "{key} = {value}");
    }

    fn num(&mut self, key: &str, value: f64) {
        self.put(key, format!("{value:.10e}"));
    }
}

fn finish(out: &mut OutputDir, summary: &Summary, command: &str, cfg: &RunConfig) -> Result<(), Failure> {
    print!("{}", summary.0);
    out.write("summary.txt", |w| Ok(w.write_all(summary.0.as_bytes())?))?;
    out.write_manifest(command, &cfg.echo())?;
    Ok(())
}

// ---------------------------------------------------------------- burgers

pub fn burgers(cfg: &RunConfig, out_dir: &Path, dry_run: bool) -> Result<(), Failure> {
    cfg.validate_burgers().map_err(Failure::Config)?;
    let b = &cfg.burgers;
    let (n, t, cfl, da) = (b.resolved_n(), b.resolved_t(), b.resolved_cfl(), b.resolved_fd_step());
    let grid = match b.case {
        BurgersCase::Table1 => Grid1D::new(-6.0, 6.0, n, t, cfl, std::f64::consts::FRAC_PI_2),
        BurgersCase::Analytic => Grid1D::new(-2.0, 2.0, n, t, cfl, 1.0 + da),
    }
    .map_err(|e| Failure::Config(e.into()))?;
    if dry_run {
        println!("dry run: burgers {:?}, {n} cells, {} steps to T = {t}", b.case, grid.n_steps);
        return Ok(());
    }
    let mut s = Summary::default();
    let (run, region) = match b.case {
        BurgersCase::Table1 => {
            let run = burgers::sensitivity_run(burgers::atan_initial(0.0), burgers::atan_initial_da(0.0), &grid, Region::POSITIVE);
            (run, Region::POSITIVE)
        }
        BurgersCase::Analytic => {
            let region = Region::new(-0.5, 0.5);
            let run = burgers::sensitivity_run(burgers::riemann_initial(0.0), |x| if x < 0.0 { 1.0 } else { 0.0 }, &grid, region);
            (run, region)
        }
    };
    let run = run.map_err(Failure::solve)?;
    let j_at = |a: f64| -> Result<f64, Failure> {
        let traj = match b.case {
            BurgersCase::Table1 => burgers::run_forward(burgers::atan_initial(a), &grid),
            BurgersCase::Analytic => burgers::run_forward(burgers::riemann_initial(a), &grid),
        };
        Ok(burgers::functional_j(&traj.map_err(Failure::solve)?, region))
    };
    let fd = (j_at(da)? - j_at(-da)?) / (2.0 * da);
    s.put("case", format!("{:?}", b.case).to_lowercase());
    s.put("n", n);
    s.num("t_final", t);
    s.put("steps", grid.n_steps);
    s.num("j", run.j);
    match b.case {
        BurgersCase::Table1 => {
            s.num("adjoint_gradient", run.gradient);
        }
        BurgersCase::Analytic => {
            // ∫_{−½}^{0} u*(x, 0) dx, the quantity with the closed form ¼(3T − 2)
            let half = Region::new(-0.5, 0.0);
            let g: f64 = grid.nodes().iter().zip(run.adjoint.initial()).map(|(&x, a)| half.weight(x) * a * grid.dx()).sum();
            s.num("adjoint_gradient", g);
            s.num("analytic_gradient", 0.25 * (3.0 * t - 2.0));
            s.num("discrete_gradient", run.gradient);
        }
    }
    s.num("fd_step", da);
    s.num("fd_gradient", fd);
    let mut out = OutputDir::create(out_dir)?;
    burgers::write_csv(&run, &out.path("burgers.csv")).context("writing burgers.csv")?;
    out.record("burgers.csv");
    let mut resolved = cfg.clone();
    resolved.burgers.n = Some(n);
    resolved.burgers.t_final = Some(t);
    resolved.burgers.cfl = Some(cfl);
    resolved.burgers.fd_step = Some(da);
    finish(&mut out, &s, "burgers", &resolved)
}

// ---------------------------------------------------------------- euler

fn build_mesh(cfg: &RunConfig) -> Result<Mesh2D, Failure> {
    let mesh = match cfg.mesh.source {
        MeshSource::File => {
            let path = cfg.mesh.file.as_deref().expect("validated");
            read_mesh(path).with_context(|| format!("reading mesh {}", path.display()))
        }
        _ => generate_wedge_channel(&cfg.mesh.generator()).map(|c| c.mesh).context("generating mesh"),
    };
    mesh.map_err(Failure::Config)
}

fn report_stats(s: &mut Summary, prefix: &str, r: &BcReport) {
    s.put(&format!("{prefix}_rows"), r.rows.len());
    s.put(&format!("{prefix}_flagged"), r.flagged());
    s.num(&format!("{prefix}_max_rel_smooth"), r.max_rel_smooth());
    s.num(&format!("{prefix}_mean_rel_smooth"), r.mean_rel_smooth());
}

pub fn euler(cfg: &RunConfig, out_dir: &Path, dry_run: bool) -> Result<(), Failure> {
    cfg.validate_euler().map_err(Failure::Config)?;
    let solver = cfg.solver.to_solver_config();
    let f = cfg.functional();
    let mesh = build_mesh(cfg)?;
    if mesh.boundary_weights(f.tag).iter().all(|&w| w == 0.0) {
        return Err(Failure::Config(anyhow::anyhow!("mesh has no '{}' boundary for the functional", f.tag)));
    }
    if dry_run {
        println!(
            "dry run: euler {:?} mesh, {} vertices, {} triangles, functional on {}",
            cfg.mesh.source,
            mesh.n_vertices(),
            mesh.triangles().len(),
            f.tag
        );
        return Ok(());
    }
    let mut out = OutputDir::create(out_dir)?;
    let mut s = Summary::default();
    s.put("case", format!("{:?}", cfg.mesh.source).to_lowercase());
    s.put("vertices", mesh.n_vertices());
    info!("forward solve on {} vertices", mesh.n_vertices());
    let sol = solve_steady(&freestream_field(&mesh, &solver), &mesh, &solver).map_err(Failure::solve)?;
    out.write("convergence.csv", |w| Ok(write_convergence_csv(w, &sol.log)?))?;
    if cfg.output.vtk {
        out.write("flow.vtk", |w| Ok(write_vtk(w, &mesh, "flow", &flow_point_data(&sol.field, &solver.gas))?))?;
    }
    s.put("converged", sol.converged);
    s.put("steps", sol.log.len() - 1);
    s.num("final_residual", sol.final_residual());
    if !sol.converged {
        finish(&mut out, &s, "euler", cfg)?;
        return Err(Failure::Convergence(anyhow::anyhow!(
            "steady solve stopped at residual {:.3e} after {} steps (logs in {})",
            sol.final_residual(),
            solver.max_steps,
            out_dir.display()
        )));
    }
    let field = sol.field;
    let kind = match &f.kind {
        FunctionalKind::OutflowDensity { .. } => "outflow_density",
        FunctionalKind::GroundPressure { .. } => "ground_pressure",
    };
    s.put("functional", kind);
    s.num("j", functional_value(&field, &mesh, &f, &solver.gas).map_err(Failure::solve)?);

    if let Some(p) = (!cfg.output.probe.is_empty()).then_some(&cfg.output.probe) {
        let data = flow_point_data(&field, &solver.gas);
        let names: Vec<String> = data.iter().map(|(n, _)| n.clone()).collect();
        let samples = line_probe(&mesh, &data, [p[0], p[1]], [p[2], p[3]], cfg.output.probe_count);
        out.write("probe.csv", |w| Ok(write_probe_csv(w, &names, &samples)?))?;
    }

    let mut verification_failure = None;
    if cfg.adjoint.enabled {
        info!("adjoint solve");
        let adj = solve_adjoint(&field, &mesh, &f, &solver).map_err(Failure::solve)?;
        s.num("adjoint_rel_residual", adj.rel_residual);
        s.put("adjoint_iterations", adj.iterations);
        if cfg.output.vtk {
            let data: Vec<(String, Vec<f64>)> = (0..4).map(|k| (format!("W{}*", k + 1), adj.component(k))).collect();
            out.write("adjoint.vtk", |w| Ok(write_vtk(w, &mesh, "adjoint", &data)?))?;
        }
        if cfg.verify.enabled {
            match &f.kind {
                FunctionalKind::OutflowDensity { rho_ref } => {
                    let r = verify_outflow_bc(&adj, &field, &mesh, *rho_ref, &solver.gas, cfg.flagging())
                        .map_err(|e| Failure::Runtime(e.into()))?;
                    out.write("outflow_bc.csv", |w| Ok(r.write_csv(w)?))?;
                    report_stats(&mut s, "outflow_bc", &r);
                }
                FunctionalKind::GroundPressure { p0 } => {
                    let r = ground_adjoint_check(&adj, &field, &mesh, p0, &solver.gas, solver.freestream.rho, cfg.flagging())
                        .map_err(|e| Failure::Runtime(e.into()))?;
                    out.write("ground_bc.csv", |w| Ok(r.write_csv(w)?))?;
                    report_stats(&mut s, "ground_bc", &r);
                    s.num("ground_bc_correlation", r.correlation(0));
                }
            }
        }
        if cfg.shape.enabled {
            let tag: BoundaryTag = cfg.shape_tag().map_err(Failure::Config)?;
            info!("shape gradient on {tag}");
            let sg = shape_gradient(&adj, &field, &mesh, &f, cfg.shape.lambda, tag, cfg.shape.form(), &solver)
                .map_err(Failure::solve)?;
            out.write("shape_gradient.csv", |w| {
                writeln!(w, "vertex,x,y,nx,ny,g,alpha,curvature")?;
                for (k, &v) in sg.vertices.iter().enumerate() {
                    let p = mesh.vertex(v);
                    let n = sg.normals[k];
                    writeln!(
                        w,
                        "{v},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}",
                        p[0], p[1], n[0], n[1], sg.g[k], sg.alpha[k], sg.curvature[k]
                    )?;
                }
                Ok(())
            })?;
            s.num("shape_predicted_dj", sg.predicted_dj);
        }
    }

    if cfg.gradient_check.enabled {
        info!("gradient check: adjoint vs FD in the free-stream density");
        let chk = freestream_density_check(&mesh, &f, &solver, &cfg.gradient_check.eps).map_err(Failure::solve)?;
        println!("gradient check: adjoint dJ/drho_inf = {:.10e}", chk.adjoint);
        for e in &chk.fd {
            println!("  FD eps = {:.1e}: {:.10e} (rel error {:.3e})", e.eps, e.gradient, e.rel_error);
        }
        s.num("gradient_check_adjoint", chk.adjoint);
        s.num("gradient_check_rel_error", chk.best_rel_error());
        out.write("gradient_check.csv", |w| {
            writeln!(w, "eps,fd_gradient,adjoint_gradient,rel_error")?;
            for e in &chk.fd {
                writeln!(w, "{:.6e},{:.10e},{:.10e},{:.6e}", e.eps, e.gradient, chk.adjoint, e.rel_error)?;
            }
            Ok(())
        })?;
        if chk.best_rel_error() > cfg.gradient_check.tolerance {
            verification_failure = Some(format!(
                "adjoint vs FD gradient relative error {:.3e} exceeds {:.1e}",
                chk.best_rel_error(),
                cfg.gradient_check.tolerance
            ));
        }
    }
    finish(&mut out, &s, "euler", cfg)?;
    verification_failure.map_or(Ok(()), |m| Err(Failure::Verification(m)))
}

// ---------------------------------------------------------------- verify-all

pub fn verify_all(filter: Option<&str>, out_dir: Option<&Path>, dry_run: bool, faults: Faults) -> Result<(), Failure> {
    let ids = acceptance::select(filter);
    if ids.is_empty() {
        return Err(Failure::Config(anyhow::anyhow!("filter {:?} selects no criterion", filter.unwrap_or(""))));
    }
    if dry_run {
        for (id, title, group, budget) in acceptance::CRITERIA.iter().filter(|c| ids.contains(&c.0)) {
            println!("criterion {id:>2} [{group}] {title} (budget {budget} s)");
        }
        return Ok(());
    }
    let mut text = String::new();
    let mut first_failure = None;
    let mut passed = 0;
    for &id in &ids {
        let r = acceptance::run_criterion(id, faults);
        print!("{r}");
        text.push_str(&r.to_string());
        passed += usize::from(r.pass());
        if !r.pass() && first_failure.is_none() {
            let what: Vec<&str> = r.failing_checks().map(|c| c.name.as_str()).collect();
            let what = if what.is_empty() { r.error.clone().unwrap_or_else(|| "runtime budget".into()) } else { what.join(", ") };
            first_failure = Some(format!("criterion {} ({}) failed: {what}", r.id, r.title));
        }
    }
    let line = format!("{passed} of {} criteria pass", ids.len());
    println!("{line}");
    text.push_str(&line);
    text.push('\n');
    if let Some(dir) = out_dir {
        let mut out = OutputDir::create(dir)?;
        out.write("verify_all.txt", |w| Ok(w.write_all(text.as_bytes())?))?;
        out.write_manifest("verify-all", &format!("filter = {:?}\n", filter.unwrap_or("")))?;
    }
    first_failure.map_or(Ok(()), |m| Err(Failure::Verification(m)))
}

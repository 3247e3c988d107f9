use super::functional::{Functional, PressureTarget};
use super::solve::AdjointField;
use crate::error::{Error, Result};
use crate::euler::{kernels, GasModel, Vec4};
use crate::mesh::{BoundaryTag, Mesh2D, Point};
use crate::solver::{nodal_gradients, FieldState};
use std::io::Write;

/// Outflow adjoint trace for the density functional on a boundary with
/// normal (1, 0): solves W*ᵀ A(W̄, (1,0)) = (1/ρ∞)(ρ̄/ρ∞ − 1) e₁ in closed form.
pub fn analytic_outflow_adjoint(w_mean: &Vec4, rho_inf: f64, gas: &GasModel) -> Result<Vec4> {
    let g = gas.gamma;
    let s = kernels::char_state(w_mean, g).ok_or_else(|| Error::Domain(format!("invalid trace state {w_mean:?}")))?;
    let rho = w_mean[0];
    let (u, v) = (s.u, s.v);
    let q2 = u * u + v * v;
    let e = w_mean[3] / rho;
    let p = kernels::pressure(w_mean, g);
    let rhs = (rho / rho_inf - 1.0) / rho_inf;
    let den = ((g - 2.0) / 2.0 * q2 + g / (g - 1.0) * u * u + v * v - g * e) * u;
    if den.abs() < 1e-12 * (1.0 + q2 + e.abs()) * (1.0 + u.abs()) {
        return Err(Error::Singular(format!("outflow adjoint denominator vanishes (u = {u}, c = {})", s.c)));
    }
    let w4 = rhs / den;
    Ok([((g + 1.0) / (g - 1.0) * u * u + v * v - p / rho - e) * w4, -g / (g - 1.0) * u * w4, -v * w4, w4])
}

/// Vertices whose density gradient exceeds the threshold: |∇ρ|·h > θ·ρ∞,
/// h the median edge length, dilated by `rings` neighbour rings.
pub fn shock_flags(field: &FieldState, mesh: &Mesh2D, rho_inf: f64, theta: f64, rings: usize) -> Vec<bool> {
    let grad = nodal_gradients(field, mesh);
    let h = mesh.median_edge_length();
    let mut flag: Vec<bool> = grad.iter().map(|g| g[0][0].hypot(g[1][0]) * h > theta * rho_inf).collect();
    for _ in 0..rings {
        let prev = flag.clone();
        for e in mesh.edges() {
            if prev[e.i] || prev[e.j] {
                flag[e.i] = true;
                flag[e.j] = true;
            }
        }
    }
    flag
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShockFlagging {
    pub theta: f64,
    pub rings: usize,
}

impl Default for ShockFlagging {
    fn default() -> Self {
        ShockFlagging { theta: 0.1, rings: 1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BcRow {
    pub vertex: usize,
    pub point: Point,
    pub numeric: Vec<f64>,
    pub analytic: Vec<f64>,
    pub abs_err: f64,
    pub rel_err: f64,
    pub shock: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BcReport {
    pub rows: Vec<BcRow>,
    /// Trace scale: max |analytic| over unflagged rows and all components.
    /// Relative errors are ‖numeric − analytic‖∞ / scale.
    pub scale: f64,
}

impl BcReport {
    fn finish(mut rows: Vec<BcRow>) -> Self {
        let mut scale = rows
            .iter()
            .filter(|r| !r.shock)
            .flat_map(|r| r.analytic.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            scale = f64::MIN_POSITIVE;
        }
        for r in rows.iter_mut() {
            r.abs_err = r.numeric.iter().zip(&r.analytic).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            r.rel_err = r.abs_err / scale;
        }
        BcReport { rows, scale }
    }

    pub fn smooth_rows(&self) -> impl Iterator<Item = &BcRow> {
        self.rows.iter().filter(|r| !r.shock)
    }

    pub fn flagged(&self) -> usize {
        self.rows.iter().filter(|r| r.shock).count()
    }

    pub fn max_rel_smooth(&self) -> f64 {
        self.smooth_rows().map(|r| r.rel_err).fold(0.0, f64::max)
    }

    pub fn mean_rel_smooth(&self) -> f64 {
        let n = self.smooth_rows().count().max(1);
        self.smooth_rows().map(|r| r.rel_err).sum::<f64>() / n as f64
    }

    /// Pearson correlation of numeric and analytic component `k` over all rows.
    pub fn correlation(&self, k: usize) -> f64 {
        let n = self.rows.len() as f64;
        let (a, b): (Vec<f64>, Vec<f64>) = self.rows.iter().map(|r| (r.numeric[k], r.analytic[k])).unzip();
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let cov: f64 = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        cov / (va * vb).sqrt()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let nc = self.rows.first().map_or(0, |r| r.numeric.len());
        write!(out, "vertex,x,y")?;
        for k in 1..=nc {
            write!(out, ",numeric{k}")?;
        }
        for k in 1..=nc {
            write!(out, ",analytic{k}")?;
        }
        writeln!(out, ",abs_err,rel_err,shock")?;
        for r in &self.rows {
            write!(out, "{},{:.10e},{:.10e}", r.vertex, r.point[0], r.point[1])?;
            for x in r.numeric.iter().chain(&r.analytic) {
                write!(out, ",{x:.10e}")?;
            }
            writeln!(out, ",{:.6e},{:.6e},{}", r.abs_err, r.rel_err, u8::from(r.shock))?;
        }
        Ok(())
    }
}

/// Two-sided average of the field across a flagged vertex, sampled at
/// ±2h along the density gradient; falls back to the point value.
fn two_sided_mean(field: &FieldState, mesh: &Mesh2D, grad: &[[Vec4; 2]], v: usize) -> Vec4 {
    let g = [grad[v][0][0], grad[v][1][0]];
    let gn = g[0].hypot(g[1]);
    if gn == 0.0 {
        return field.w[v];
    }
    let d = 2.0 * mesh.median_edge_length();
    let p = mesh.vertex(v);
    let sample = |s: f64| -> Option<Vec4> {
        let q = [p[0] + s * d * g[0] / gn, p[1] + s * d * g[1] / gn];
        let (t, l) = mesh.locate(q)?;
        let tri = mesh.triangles()[t];
        Some(std::array::from_fn(|k| (0..3).map(|i| l[i] * field.w[tri[i]][k]).sum()))
    };
    match (sample(1.0), sample(-1.0)) {
        (Some(a), Some(b)) => std::array::from_fn(|k| 0.5 * (a[k] + b[k])),
        _ => field.w[v],
    }
}

/// Numerical vs analytic outflow adjoint on the pure outflow vertices
/// (corners excluded), shock-adjacent vertices flagged.
pub fn verify_outflow_bc(
    adjoint: &AdjointField,
    field: &FieldState,
    mesh: &Mesh2D,
    rho_ref: f64,
    gas: &GasModel,
    flagging: ShockFlagging,
) -> Result<BcReport> {
    let flags = shock_flags(field, mesh, rho_ref, flagging.theta, flagging.rings);
    let grad = nodal_gradients(field, mesh);
    let mut rows = Vec::new();
    for v in mesh.pure_tag_vertices(BoundaryTag::OutflowFree) {
        let n = mesh.boundary_normal(v).unwrap();
        if (n[0] - 1.0).abs() > 1e-9 {
            return Err(Error::Structural(format!("outflow vertex {v} is not on a boundary with normal (1, 0)")));
        }
        let wm = if flags[v] { two_sided_mean(field, mesh, &grad, v) } else { field.w[v] };
        let a = analytic_outflow_adjoint(&wm, rho_ref, gas)?;
        rows.push(BcRow {
            vertex: v,
            point: mesh.vertex(v),
            numeric: adjoint.w[v].to_vec(),
            analytic: a.to_vec(),
            abs_err: 0.0,
            rel_err: 0.0,
            shock: flags[v],
        });
    }
    Ok(BcReport::finish(rows))
}

/// W*_(2,3)·n̂ (outward unit normal) against p − p₀ on the pure ground vertices.
pub fn ground_adjoint_check(
    adjoint: &AdjointField,
    field: &FieldState,
    mesh: &Mesh2D,
    p0: &PressureTarget,
    gas: &GasModel,
    rho_inf: f64,
    flagging: ShockFlagging,
) -> Result<BcReport> {
    let flags = shock_flags(field, mesh, rho_inf, flagging.theta, flagging.rings);
    let rows = mesh
        .pure_tag_vertices(BoundaryTag::Ground)
        .into_iter()
        .map(|v| {
            let n = mesh.boundary_normal(v).unwrap();
            let a = adjoint.w[v];
            let p = kernels::pressure(&field.w[v], gas.gamma);
            BcRow {
                vertex: v,
                point: mesh.vertex(v),
                numeric: vec![a[1] * n[0] + a[2] * n[1]],
                analytic: vec![p - p0.at(mesh.vertex(v)[0])],
                abs_err: 0.0,
                rel_err: 0.0,
                shock: flags[v],
            }
        })
        .collect();
    Ok(BcReport::finish(rows))
}

/// (W₂*, W₃*)·n̂ at the pure vertices of a wall tag.
pub fn airfoil_adjoint_bc_residual(adjoint: &AdjointField, mesh: &Mesh2D, tag: BoundaryTag) -> Vec<(usize, f64)> {
    mesh.pure_tag_vertices(tag)
        .into_iter()
        .map(|v| {
            let n = mesh.boundary_normal(v).unwrap();
            (v, adjoint.w[v][1] * n[0] + adjoint.w[v][2] * n[1])
        })
        .collect()
}

/// max |W*·n̂| on the wall relative to ‖W*‖∞.
pub fn wall_condition_ratio(adjoint: &AdjointField, mesh: &Mesh2D, tag: BoundaryTag) -> f64 {
    let m = adjoint.max_abs();
    if m == 0.0 {
        return 0.0;
    }
    airfoil_adjoint_bc_residual(adjoint, mesh, tag).iter().map(|(_, r)| r.abs()).fold(0.0, f64::max) / m
}

#[derive(Clone, Debug, PartialEq)]
pub enum RightBoundaryCheck {
    /// max ‖W*‖∞ on the outflow (corners excluded) over the global ‖W*‖∞.
    Ratio(f64),
    Skipped(String),
}

pub fn outflow_right_boundary_zero_check(adjoint: &AdjointField, mesh: &Mesh2D, f: &Functional) -> RightBoundaryCheck {
    if f.tag == BoundaryTag::OutflowFree {
        return RightBoundaryCheck::Skipped("the functional is carried by the outflow boundary itself".into());
    }
    let verts = mesh.pure_tag_vertices(BoundaryTag::OutflowFree);
    if verts.is_empty() {
        return RightBoundaryCheck::Skipped("mesh has no outflow boundary".into());
    }
    let m = adjoint.max_abs();
    if m == 0.0 {
        return RightBoundaryCheck::Ratio(0.0);
    }
    let r = verts.iter().flat_map(|&v| adjoint.w[v].iter()).fold(0.0f64, |a, x| a.max(x.abs()));
    RightBoundaryCheck::Ratio(r / m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{flux_jacobian_normal, ConservativeState};

    #[test]
    fn analytic_trace_solves_the_boundary_system() {
        let gas = GasModel::default();
        for (rho, u, v, p) in [(1.3, 1.8, 0.2, 1.0), (0.9, 2.5, -0.4, 0.6), (1.46, 1.75, 0.31, 1.22)] {
            let w = ConservativeState::from_primitive(rho, u, v, p, &gas);
            let rho_inf = 1.0;
            let a = analytic_outflow_adjoint(&w.to_array(), rho_inf, &gas).unwrap();
            let jac = flux_jacobian_normal(&w, [1.0, 0.0], &gas).unwrap();
            let r = jac.tr_mul_vec(&a);
            let rhs = (rho / rho_inf - 1.0) / rho_inf;
            assert!((r[0] - rhs).abs() < 1e-10 && r[1..].iter().all(|x| x.abs() < 1e-10), "{r:?}");
            assert_eq!(a[2], -v * a[3]);
        }
    }

    #[test]
    fn matched_density_gives_zero_trace() {
        let gas = GasModel::default();
        let w = ConservativeState::from_primitive(1.0, 2.0, 0.1, 0.7, &gas);
        assert_eq!(analytic_outflow_adjoint(&w.to_array(), 1.0, &gas).unwrap(), [0.0; 4]);
    }

    #[test]
    fn sonic_trace_is_singular() {
        let gas = GasModel::default();
        let c = (1.4f64 * 0.7 / 1.0).sqrt();
        let w = ConservativeState::from_primitive(1.0, c, 0.0, 0.7, &gas);
        assert!(matches!(analytic_outflow_adjoint(&w.to_array(), 1.2, &gas), Err(Error::Singular(_))));
    }
}

use super::config::{Limiter, SolverConfig};
use crate::error::{Error, Result};
use crate::euler::kernels;
use crate::euler::real::Real;
use crate::euler::{ConservativeState, GasModel, Vec4};
use crate::mesh::{BoundaryTag, Mesh2D, Point};
use rayon::prelude::*;

/// Conservative state per mesh vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub w: Vec<Vec4>,
}

impl FieldState {
    pub fn uniform(n: usize, w: ConservativeState) -> Self {
        FieldState { w: vec![w.to_array(); n] }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn state(&self, v: usize) -> ConservativeState {
        ConservativeState::from_array(self.w[v])
    }

    /// Checks ρ > 0 and p > 0 everywhere; the error names the first bad vertex.
    pub fn validate(&self, gas: &GasModel) -> Result<()> {
        for (v, w) in self.w.iter().enumerate() {
            if kernels::char_state(w, gas.gamma).is_none() || w.iter().any(|x| !x.is_finite()) {
                return Err(Error::Domain(format!("invalid state at vertex {v}: {w:?}")));
            }
        }
        Ok(())
    }

    pub fn density(&self) -> Vec<f64> {
        self.w.iter().map(|w| w[0]).collect()
    }

    pub fn pressure(&self, gas: &GasModel) -> Vec<f64> {
        self.w.iter().map(|w| kernels::pressure(w, gas.gamma)).collect()
    }
}

/// Roe flux ½(F(Wi)+F(Wj))·n + ½|Ã|(Wi−Wj).
pub fn roe_flux(wi: &Vec4, wj: &Vec4, n: Point, cfg: &SolverConfig) -> Result<Vec4> {
    kernels::roe_flux(wi, wj, n, cfg.gas.gamma, cfg.entropy_fix)
        .ok_or_else(|| Error::Domain(format!("Roe average failed for {wi:?} | {wj:?}")))
}

/// Generic boundary flux on one boundary half-face.
pub(crate) fn boundary_flux_kernel<T: Real>(
    w: &[T; 4],
    winf: &[T; 4],
    tag: BoundaryTag,
    n: Point,
    cfg: &SolverConfig,
) -> Option<[T; 4]> {
    let g = cfg.gas.gamma;
    match tag {
        BoundaryTag::SlipWall | BoundaryTag::Ground => Some(kernels::slip_flux(w, n, g)),
        BoundaryTag::OutflowFree => Some(kernels::flux_normal(w, n, g)),
        BoundaryTag::InflowFreestream => kernels::steger_inflow_flux(w, winf, n, g, cfg.entropy_fix, cfg.steger),
    }
}

/// Flux through a boundary half-face with outward normal `n`.
pub fn boundary_flux(w: &Vec4, tag: BoundaryTag, n: Point, cfg: &SolverConfig) -> Result<Vec4> {
    let winf = cfg.freestream.state(&cfg.gas).to_array();
    boundary_flux_kernel(w, &winf, tag, n, cfg)
        .ok_or_else(|| Error::Domain(format!("invalid state {w:?} on {tag} boundary")))
}

/// Least-squares nodal gradients (∂W/∂x, ∂W/∂y) over the neighbouring vertices.
pub fn nodal_gradients(field: &FieldState, mesh: &Mesh2D) -> Vec<[Vec4; 2]> {
    (0..mesh.n_vertices())
        .map(|i| {
            let pi = mesh.vertex(i);
            let (mut a11, mut a12, mut a22) = (0.0, 0.0, 0.0);
            let mut b = [[0.0; 4]; 2];
            for j in mesh.neighbors(i) {
                let pj = mesh.vertex(j);
                let (dx, dy) = (pj[0] - pi[0], pj[1] - pi[1]);
                a11 += dx * dx;
                a12 += dx * dy;
                a22 += dy * dy;
                for k in 0..4 {
                    let dw = field.w[j][k] - field.w[i][k];
                    b[0][k] += dx * dw;
                    b[1][k] += dy * dw;
                }
            }
            let det = a11 * a22 - a12 * a12;
            let mut g = [[0.0; 4]; 2];
            if det.abs() > 1e-14 * (a11 * a22).max(f64::MIN_POSITIVE) {
                for k in 0..4 {
                    g[0][k] = (a22 * b[0][k] - a12 * b[1][k]) / det;
                    g[1][k] = (a11 * b[1][k] - a12 * b[0][k]) / det;
                }
            }
            g
        })
        .collect()
}

/// P¹ gradient of the field on triangle t.
pub fn triangle_gradient(field: &FieldState, mesh: &Mesh2D, t: usize) -> [Vec4; 2] {
    let hats = mesh.hat_gradients(t);
    let mut g = [[0.0; 4]; 2];
    for (&v, h) in mesh.triangles()[t].iter().zip(hats) {
        for k in 0..4 {
            g[0][k] += field.w[v][k] * h[0];
            g[1][k] += field.w[v][k] * h[1];
        }
    }
    g
}

#[inline]
fn directional(g: &[Vec4; 2], d: Point) -> Vec4 {
    std::array::from_fn(|k| g[0][k] * d[0] + g[1][k] * d[1])
}

/// Limited slope from the centred (`a`), upwind (`b`) and nodal (`c`)
/// increments along an edge.
pub fn limit_slope(limiter: Limiter, a: f64, b: f64, c: f64) -> f64 {
    match limiter {
        Limiter::Unlimited => c,
        Limiter::Minmod => {
            if a * b <= 0.0 {
                0.0
            } else {
                a.signum() * a.abs().min(b.abs())
            }
        }
        Limiter::VanAlbada => {
            let ab = a * b;
            if ab <= 0.0 {
                0.0
            } else {
                ab * (a + b) / (a * a + b * b)
            }
        }
        Limiter::Dervieux3 => {
            if a * b <= 0.0 || a * c <= 0.0 {
                0.0
            } else {
                a.signum() * (2.0 * a.abs()).min(2.0 * b.abs()).min(c.abs())
            }
        }
    }
}

/// Interface states (W_ij, W_ji) of edge `e`, with i = edges[e].i.
pub fn muscl_extrapolate(
    e: usize,
    field: &FieldState,
    mesh: &Mesh2D,
    nodal: &[[Vec4; 2]],
    cfg: &SolverConfig,
) -> (Vec4, Vec4) {
    let edge = mesh.edges()[e];
    let (i, j) = (edge.i, edge.j);
    let (pi, pj) = (mesh.vertex(i), mesh.vertex(j));
    let d = [pj[0] - pi[0], pj[1] - pi[1]];
    let (ki, kj) = mesh.upwind_triangles(e);
    let ui = directional(&triangle_gradient(field, mesh, ki), d);
    let uj = directional(&triangle_gradient(field, mesh, kj), d);
    let ni = directional(&nodal[i], d);
    let nj = directional(&nodal[j], d);
    let (wi, wj) = (field.w[i], field.w[j]);
    let mut wij = wi;
    let mut wji = wj;
    for k in 0..4 {
        let c = wj[k] - wi[k];
        wij[k] += 0.5 * limit_slope(cfg.limiter, c, ui[k], ni[k]);
        wji[k] -= 0.5 * limit_slope(cfg.limiter, c, uj[k], nj[k]);
    }
    let g = cfg.gas.gamma;
    if kernels::char_state(&wij, g).is_none() || kernels::char_state(&wji, g).is_none() {
        log::debug!("edge {e}: extrapolated state invalid, first-order flux used");
        return (wi, wj);
    }
    (wij, wji)
}

/// Interior flux Φ_ij of every edge (i → j), in edge order.
pub fn edge_fluxes(field: &FieldState, mesh: &Mesh2D, cfg: &SolverConfig) -> Result<Vec<Vec4>> {
    let nodal = if cfg.muscl { nodal_gradients(field, mesh) } else { Vec::new() };
    mesh.edges()
        .par_iter()
        .enumerate()
        .map(|(e, edge)| {
            let (a, b) = if cfg.muscl {
                muscl_extrapolate(e, field, mesh, &nodal, cfg)
            } else {
                (field.w[edge.i], field.w[edge.j])
            };
            roe_flux(&a, &b, edge.normal, cfg)
                .map_err(|err| Error::Domain(format!("edge {e} ({}–{}): {err}", edge.i, edge.j)))
        })
        .collect()
}

/// Σⱼ Φ_ij + boundary fluxes per vertex. Edge fluxes are computed in
/// parallel and accumulated in a fixed order, so the result does not depend
/// on the thread count.
pub fn residual(field: &FieldState, mesh: &Mesh2D, cfg: &SolverConfig) -> Result<Vec<Vec4>> {
    if field.len() != mesh.n_vertices() {
        return Err(Error::Structural(format!(
            "field has {} states for {} vertices",
            field.len(),
            mesh.n_vertices()
        )));
    }
    let fluxes = edge_fluxes(field, mesh, cfg)?;
    let mut r = vec![[0.0; 4]; mesh.n_vertices()];
    for (edge, f) in mesh.edges().iter().zip(&fluxes) {
        for k in 0..4 {
            r[edge.i][k] += f[k];
            r[edge.j][k] -= f[k];
        }
    }
    for face in mesh.boundary_faces() {
        let f = boundary_flux(&field.w[face.vertex], face.tag, face.normal, cfg)
            .map_err(|err| Error::Domain(format!("boundary vertex {}: {err}", face.vertex)))?;
        for k in 0..4 {
            r[face.vertex][k] += f[k];
        }
    }
    Ok(r)
}

/// Σᵢ over boundary faces of the boundary fluxes (what Σᵢ residualᵢ must equal).
pub fn total_boundary_flux(field: &FieldState, mesh: &Mesh2D, cfg: &SolverConfig) -> Result<Vec4> {
    let mut s = [0.0; 4];
    for face in mesh.boundary_faces() {
        let f = boundary_flux(&field.w[face.vertex], face.tag, face.normal, cfg)?;
        for k in 0..4 {
            s[k] += f[k];
        }
    }
    Ok(s)
}

use super::functional::{functional_value, Functional};
use super::solve::AdjointField;
use crate::error::{Error, Result};
use crate::euler::Vec4;
use crate::mesh::{BoundaryTag, Mesh2D, Point, StructuredChannel, WallSide};
use crate::solver::{residual, FieldState, SolverConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ShapeGradientForm {
    /// (ρ* + U·(ρU)*)(∂(ρUₙ)/∂n − κρU_t).
    #[default]
    Printed,
    /// Adds the energy adjoint: (ρ* + U·(ρU)* + H(ρE)*)(∂(ρUₙ)/∂n − κρU_t).
    WithEnergy,
    /// Derivative of the discrete Lagrangian J − W*ᵀR under normal motion of
    /// each wall vertex, per unit boundary length; corner vertices are held.
    Discrete,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShapeGradient {
    /// Wall vertices in boundary order.
    pub vertices: Vec<usize>,
    /// Outward unit normals of the fluid domain.
    pub normals: Vec<Point>,
    pub g: Vec<f64>,
    /// Normal displacement α = −λ g along the outward normal.
    pub alpha: Vec<f64>,
    pub curvature: Vec<f64>,
    /// ∫ g α ds = −λ ∫ g².
    pub predicted_dj: f64,
}

/// Signed curvature of the circle through three points (positive when the
/// path turns left); zero for collinear points.
pub fn circumcircle_curvature(a: Point, b: Point, c: Point) -> f64 {
    let cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let l = |p: Point, q: Point| (q[0] - p[0]).hypot(q[1] - p[1]);
    let den = l(a, b) * l(b, c) * l(a, c);
    if den == 0.0 || cross.abs() <= 1e-14 * den.cbrt().powi(2) {
        0.0
    } else {
        2.0 * cross / den
    }
}

fn interpolate(field: &FieldState, mesh: &Mesh2D, p: Point) -> Option<Vec4> {
    let (t, l) = mesh.locate(p)?;
    let tri = mesh.triangles()[t];
    Some(std::array::from_fn(|k| (0..3).map(|i| l[i] * field.w[tri[i]][k]).sum()))
}

/// Normal displacement of the `tag` wall decreasing J to first order.
#[allow(clippy::too_many_arguments)]
pub fn shape_gradient(
    adjoint: &AdjointField,
    field: &FieldState,
    mesh: &Mesh2D,
    f: &Functional,
    lambda: f64,
    tag: BoundaryTag,
    form: ShapeGradientForm,
    cfg: &SolverConfig,
) -> Result<ShapeGradient> {
    let chain = mesh.tag_chain(tag);
    if chain.is_empty() {
        return Err(Error::Structural(format!("no '{tag}' boundary for the shape gradient")));
    }
    let gamma = cfg.gas.gamma;
    let d = mesh.median_edge_length();
    let weights = mesh.boundary_weights(tag);
    let mut out = ShapeGradient {
        vertices: chain.clone(),
        normals: Vec::new(),
        g: Vec::new(),
        alpha: Vec::new(),
        curvature: Vec::new(),
        predicted_dj: 0.0,
    };
    for (k, &v) in chain.iter().enumerate() {
        let n = mesh.boundary_normal(v).unwrap();
        let t = [-n[1], n[0]];
        let p = mesh.vertex(v);
        let kappa = if k > 0 && k + 1 < chain.len() {
            circumcircle_curvature(mesh.vertex(chain[k - 1]), p, mesh.vertex(chain[k + 1]))
        } else {
            0.0
        };
        if form == ShapeGradientForm::Discrete {
            let g = if k == 0 || k + 1 == chain.len() || weights[v] <= 0.0 {
                0.0
            } else {
                let e = 1e-6 * d;
                let moved = |s: f64| {
                    let mut pts = mesh.vertices().to_vec();
                    pts[v] = [p[0] + s * e * n[0], p[1] + s * e * n[1]];
                    mesh.with_vertices(pts)
                };
                mesh_motion_derivative(adjoint, field, &moved(1.0)?, &moved(-1.0)?, e, f, cfg)? / weights[v]
            };
            out.normals.push(n);
            out.curvature.push(kappa);
            out.g.push(g);
            out.alpha.push(-lambda * g);
            out.predicted_dj += weights[v] * g * (-lambda * g);
            continue;
        }
        let w = field.w[v];
        let (u, vv) = (w[1] / w[0], w[2] / w[0]);
        let inner = interpolate(field, mesh, [p[0] - d * n[0], p[1] - d * n[1]]).unwrap_or(w);
        let mn = |s: &Vec4| s[1] * n[0] + s[2] * n[1];
        let dmn = (mn(&inner) - mn(&w)) / d;
        let ut = u * t[0] + vv * t[1];
        let a = adjoint.w[v];
        let mut coef = a[0] + u * a[1] + vv * a[2];
        if form == ShapeGradientForm::WithEnergy {
            let p = crate::euler::kernels::pressure(&w, gamma);
            coef += (w[3] + p) / w[0] * a[3];
        }
        let g = coef * (dmn - kappa * w[0] * ut);
        out.normals.push(n);
        out.curvature.push(kappa);
        out.g.push(g);
        out.alpha.push(-lambda * g);
        out.predicted_dj += weights[v] * g * (-lambda * g);
    }
    Ok(out)
}

/// Mesh with the wall of a structured channel moved by α n̂ (per column,
/// blended linearly towards the opposite wall).
pub fn displace_channel_wall(channel: &StructuredChannel, side: WallSide, sg: &ShapeGradient, scale: f64) -> Result<Mesh2D> {
    let wall = channel.wall_vertices(side);
    let disp: Vec<Point> = wall
        .iter()
        .map(|v| match sg.vertices.iter().position(|x| x == v) {
            Some(k) => [scale * sg.alpha[k] * sg.normals[k][0], scale * sg.alpha[k] * sg.normals[k][1]],
            None => [0.0, 0.0],
        })
        .collect();
    channel.deform_wall(side, &disp)
}

/// First-order change of J under a mesh motion, from the adjoint with the
/// flow frozen: (J − W*ᵀR)(X₊) − (J − W*ᵀR)(X₋), divided by 2ε.
pub fn mesh_motion_derivative(
    adjoint: &AdjointField,
    field: &FieldState,
    plus: &Mesh2D,
    minus: &Mesh2D,
    eps: f64,
    f: &Functional,
    cfg: &SolverConfig,
) -> Result<f64> {
    let lag = |m: &Mesh2D| -> Result<f64> {
        let r = residual(field, m, &cfg.first_order())?;
        let wr: f64 = r.iter().zip(&adjoint.w).map(|(a, b)| (0..4).map(|k| a[k] * b[k]).sum::<f64>()).sum();
        Ok(functional_value(field, m, f, &cfg.gas)? - wr)
    };
    Ok((lag(plus)? - lag(minus)?) / (2.0 * eps))
}

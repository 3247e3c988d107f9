use crate::error::{Error, Result};
use crate::euler::{kernels, GasModel, Vec4};
use crate::mesh::{BoundaryTag, Mesh2D};
use crate::solver::FieldState;

/// Target pressure p₀ along the ground.
#[derive(Clone, Debug, PartialEq)]
pub enum PressureTarget {
    Constant(f64),
    /// (x, p₀) samples, linearly interpolated and held constant outside.
    Profile(Vec<(f64, f64)>),
}

impl PressureTarget {
    pub fn at(&self, x: f64) -> f64 {
        match self {
            PressureTarget::Constant(p) => *p,
            PressureTarget::Profile(t) => {
                if x <= t[0].0 {
                    return t[0].1;
                }
                for w in t.windows(2) {
                    if x <= w[1].0 {
                        let s = (x - w[0].0) / (w[1].0 - w[0].0);
                        return w[0].1 + s * (w[1].1 - w[0].1);
                    }
                }
                t[t.len() - 1].1
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionalKind {
    /// ½∫(ρ/ρ_ref − 1)².
    OutflowDensity { rho_ref: f64 },
    /// ½∫(p − p₀)².
    GroundPressure { p0: PressureTarget },
}

/// Boundary functional integrated (trapezoidal rule) over one tag.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional {
    pub kind: FunctionalKind,
    pub tag: BoundaryTag,
}

impl Functional {
    pub fn outflow_density(rho_ref: f64) -> Self {
        Functional { kind: FunctionalKind::OutflowDensity { rho_ref }, tag: BoundaryTag::OutflowFree }
    }

    pub fn ground_pressure(p0: PressureTarget) -> Self {
        Functional { kind: FunctionalKind::GroundPressure { p0 }, tag: BoundaryTag::Ground }
    }

    fn weights(&self, mesh: &Mesh2D) -> Result<Vec<f64>> {
        let w = mesh.boundary_weights(self.tag);
        if w.iter().all(|&x| x == 0.0) {
            return Err(Error::Structural(format!("functional boundary '{}' is absent from the mesh", self.tag)));
        }
        Ok(w)
    }

    /// Pointwise integrand and its gradient with respect to W.
    fn local(&self, w: &Vec4, x: f64, gas: &GasModel) -> (f64, Vec4) {
        match &self.kind {
            FunctionalKind::OutflowDensity { rho_ref } => {
                let d = w[0] / rho_ref - 1.0;
                (0.5 * d * d, [d / rho_ref, 0.0, 0.0, 0.0])
            }
            FunctionalKind::GroundPressure { p0 } => {
                let g = gas.gamma;
                let p = kernels::pressure(w, g);
                let d = p - p0.at(x);
                let (u, v) = (w[1] / w[0], w[2] / w[0]);
                let dp = [(g - 1.0) * 0.5 * (u * u + v * v), -(g - 1.0) * u, -(g - 1.0) * v, g - 1.0];
                (0.5 * d * d, dp.map(|c| c * d))
            }
        }
    }
}

pub fn functional_value(field: &FieldState, mesh: &Mesh2D, f: &Functional, gas: &GasModel) -> Result<f64> {
    let wts = f.weights(mesh)?;
    Ok(wts
        .iter()
        .enumerate()
        .filter(|(_, &q)| q != 0.0)
        .map(|(v, q)| q * f.local(&field.w[v], mesh.vertex(v)[0], gas).0)
        .sum())
}

/// ∂J/∂W per vertex; non-zero only on the functional's boundary.
pub fn functional_gradient_rhs(field: &FieldState, mesh: &Mesh2D, f: &Functional, gas: &GasModel) -> Result<Vec<Vec4>> {
    let wts = f.weights(mesh)?;
    Ok(wts
        .iter()
        .enumerate()
        .map(|(v, &q)| if q == 0.0 { [0.0; 4] } else { f.local(&field.w[v], mesh.vertex(v)[0], gas).1.map(|c| c * q) })
        .collect())
}

//! Conservative states, the ideal-gas law and the analytic flux Jacobians of
//! the 2D Euler equations, including Roe averaging and |A| = P|Λ|P⁻¹.

pub mod kernels;
mod matrix;
pub mod real;

pub use matrix::{add4, dot4, norm4, scale4, sub4, Matrix4, Vec4};

use crate::error::{Error, Result};

/// W = (ρ, ρu, ρv, ρE).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConservativeState {
    pub rho: f64,
    pub mx: f64,
    pub my: f64,
    pub e: f64,
}

impl ConservativeState {
    pub fn new(rho: f64, mx: f64, my: f64, e: f64) -> Self {
        ConservativeState { rho, mx, my, e }
    }

    pub fn from_primitive(rho: f64, u: f64, v: f64, p: f64, gas: &GasModel) -> Self {
        ConservativeState {
            rho,
            mx: rho * u,
            my: rho * v,
            e: p / (gas.gamma - 1.0) + 0.5 * rho * (u * u + v * v),
        }
    }

    #[inline]
    pub fn to_array(&self) -> Vec4 {
        [self.rho, self.mx, self.my, self.e]
    }

    #[inline]
    pub fn from_array(a: Vec4) -> Self {
        ConservativeState { rho: a[0], mx: a[1], my: a[2], e: a[3] }
    }

    #[inline]
    pub fn velocity(&self) -> (f64, f64) {
        (self.mx / self.rho, self.my / self.rho)
    }

    /// ρ > 0 and p > 0 with finite components.
    pub fn is_valid(&self, gas: &GasModel) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
            && self.rho > 0.0
            && kernels::pressure(&self.to_array(), gas.gamma) > 0.0
    }

    pub fn mach(&self, gas: &GasModel) -> Result<f64> {
        let (u, v) = self.velocity();
        Ok((u * u + v * v).sqrt() / sound_speed(self, gas)?)
    }
}

/// Calorically perfect gas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GasModel {
    pub gamma: f64,
}

impl Default for GasModel {
    fn default() -> Self {
        GasModel { gamma: 1.4 }
    }
}

impl GasModel {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::Domain(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(GasModel { gamma })
    }
}

/// Regularisation of |λ| near zero in |A|.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EntropyFix {
    None,
    /// |λ| → (λ²+ε²)/(2ε) below ε = fraction·(|uₙ| + c‖n‖).
    Harten { fraction: f64 },
}

impl Default for EntropyFix {
    fn default() -> Self {
        EntropyFix::Harten { fraction: 0.05 }
    }
}

/// Sign convention of the split Jacobians A±.
///
/// `Paper` keeps A± = ½(|A| ± A), so A⁺ + A⁻ = |A|. `Standard` uses
/// A± = ½(A ± |A|), for which A⁺ + A⁻ = A and free-stream states are
/// preserved by the inflow flux.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StegerConvention {
    Paper,
    #[default]
    Standard,
}

fn check_density(w: &ConservativeState) -> Result<()> {
    if !(w.rho > 0.0) || !w.rho.is_finite() {
        return Err(Error::Domain(format!("non-positive density {}", w.rho)));
    }
    Ok(())
}

fn check_valid(w: &ConservativeState, gas: &GasModel) -> Result<f64> {
    check_density(w)?;
    let p = kernels::pressure(&w.to_array(), gas.gamma);
    if !(p > 0.0) {
        return Err(Error::Domain(format!("non-positive pressure {p} for state {w:?}")));
    }
    Ok(p)
}

/// p = (γ−1)(ρE − ((ρu)²+(ρv)²)/(2ρ)).
pub fn pressure(w: &ConservativeState, gas: &GasModel) -> Result<f64> {
    check_density(w)?;
    Ok(kernels::pressure(&w.to_array(), gas.gamma))
}

/// ∂p/∂W = (γ−1)(q²/2, −u, −v, 1).
pub fn pressure_jacobian(w: &ConservativeState, gas: &GasModel) -> Result<Vec4> {
    check_density(w)?;
    let (u, v) = w.velocity();
    let g1 = gas.gamma - 1.0;
    Ok([g1 * 0.5 * (u * u + v * v), -g1 * u, -g1 * v, g1])
}

pub fn sound_speed(w: &ConservativeState, gas: &GasModel) -> Result<f64> {
    let p = check_valid(w, gas)?;
    Ok((gas.gamma * p / w.rho).sqrt())
}

/// Cartesian fluxes (F₁, F₂).
pub fn flux(w: &ConservativeState, gas: &GasModel) -> Result<(Vec4, Vec4)> {
    check_valid(w, gas)?;
    let a = w.to_array();
    Ok((
        kernels::flux_normal(&a, [1.0, 0.0], gas.gamma),
        kernels::flux_normal(&a, [0.0, 1.0], gas.gamma),
    ))
}

/// F(W)·n.
pub fn flux_normal(w: &ConservativeState, n: [f64; 2], gas: &GasModel) -> Result<Vec4> {
    check_valid(w, gas)?;
    Ok(kernels::flux_normal(&w.to_array(), n, gas.gamma))
}

/// A(W, n) = ∂(F(W)·n)/∂W in closed form.
pub fn flux_jacobian_normal(w: &ConservativeState, n: [f64; 2], gas: &GasModel) -> Result<Matrix4> {
    let p = check_valid(w, gas)?;
    let g = gas.gamma;
    let g1 = g - 1.0;
    let (u, v) = w.velocity();
    let big_e = w.e / w.rho;
    let q2 = u * u + v * v;
    let [nx, ny] = n;
    let un = u * nx + v * ny;
    let h = p / w.rho + big_e;
    Ok(Matrix4([
        [0.0, nx, ny, 0.0],
        [
            0.5 * g1 * q2 * nx - u * un,
            un - (g - 2.0) * u * nx,
            u * ny - g1 * v * nx,
            g1 * nx,
        ],
        [
            0.5 * g1 * q2 * ny - v * un,
            v * nx - g1 * u * ny,
            un - (g - 2.0) * v * ny,
            g1 * ny,
        ],
        [
            (g1 * q2 - g * big_e) * un,
            h * nx - g1 * u * un,
            h * ny - g1 * v * un,
            g * un,
        ],
    ]))
}

/// A = P Λ P⁻¹ with P columns the right eigenvectors.
#[derive(Clone, Copy, Debug)]
pub struct EigenSystem {
    pub right: Matrix4,
    pub lambda: Vec4,
    pub left: Matrix4,
}

impl EigenSystem {
    /// P φ(Λ) P⁻¹ for an arbitrary scalar map of the eigenvalues.
    pub fn map<F: Fn(f64) -> f64>(&self, phi: F) -> Matrix4 {
        let d = [phi(self.lambda[0]), phi(self.lambda[1]), phi(self.lambda[2]), phi(self.lambda[3])];
        let mut scaled = self.right;
        for row in scaled.0.iter_mut() {
            for (k, x) in row.iter_mut().enumerate() {
                *x *= d[k];
            }
        }
        scaled * self.left
    }

    pub fn reconstruct(&self) -> Matrix4 {
        self.map(|l| l)
    }
}

/// Eigen-decomposition of A(W, n): Λ = diag(uₙ, uₙ, uₙ+c‖n‖, uₙ−c‖n‖).
///
/// The acoustic right eigenvectors are scaled by 1/(2c), which keeps the left
/// eigenvectors free of 1/c factors.
pub fn eigen_decomposition(w: &ConservativeState, n: [f64; 2], gas: &GasModel) -> Result<EigenSystem> {
    let p = check_valid(w, gas)?;
    let nn = (n[0] * n[0] + n[1] * n[1]).sqrt();
    if !(nn > 0.0) {
        return Err(Error::Domain("eigen-decomposition needs a non-zero normal".into()));
    }
    let (nx, ny) = (n[0] / nn, n[1] / nn);
    let g1 = gas.gamma - 1.0;
    let (u, v) = w.velocity();
    let q2 = u * u + v * v;
    let c = (gas.gamma * p / w.rho).sqrt();
    let h = (w.e + p) / w.rho;
    let unh = u * nx + v * ny;
    let ut = v * nx - u * ny;
    let s = 0.5 / c;
    let right = Matrix4([
        [1.0, 0.0, s, s],
        [u, -ny, s * (u + c * nx), s * (u - c * nx)],
        [v, nx, s * (v + c * ny), s * (v - c * ny)],
        [0.5 * q2, ut, s * (h + c * unh), s * (h - c * unh)],
    ]);
    let b1 = g1 / (c * c);
    let b2 = 0.5 * b1 * q2;
    let left = Matrix4([
        [1.0 - b2, b1 * u, b1 * v, -b1],
        [-ut, -ny, nx, 0.0],
        [c * b2 - unh, nx - c * b1 * u, ny - c * b1 * v, c * b1],
        [c * b2 + unh, -nx - c * b1 * u, -ny - c * b1 * v, c * b1],
    ]);
    let un = unh * nn;
    let cn = c * nn;
    Ok(EigenSystem { right, lambda: [un, un, un + cn, un - cn], left })
}

fn fix_width(w: &ConservativeState, n: [f64; 2], gas: &GasModel, fix: EntropyFix) -> Result<f64> {
    Ok(match fix {
        EntropyFix::None => 0.0,
        EntropyFix::Harten { fraction } => {
            let (u, v) = w.velocity();
            let nn = (n[0] * n[0] + n[1] * n[1]).sqrt();
            fraction * ((u * n[0] + v * n[1]).abs() + sound_speed(w, gas)? * nn)
        }
    })
}

/// |A(W, n)| = P |Λ| P⁻¹ with optional Harten regularisation.
pub fn abs_jacobian(w: &ConservativeState, n: [f64; 2], gas: &GasModel, fix: EntropyFix) -> Result<Matrix4> {
    check_valid(w, gas)?;
    if n == [0.0, 0.0] {
        return Ok(Matrix4::ZERO);
    }
    let eig = eigen_decomposition(w, n, gas)?;
    let eps = fix_width(w, n, gas, fix)?;
    Ok(eig.map(|l| kernels::regularized_abs(l, eps)))
}

/// (A⁺, A⁻) under the chosen sign convention.
pub fn split_jacobians(
    w: &ConservativeState,
    n: [f64; 2],
    gas: &GasModel,
    fix: EntropyFix,
    convention: StegerConvention,
) -> Result<(Matrix4, Matrix4)> {
    let abs = abs_jacobian(w, n, gas, fix)?;
    let a = flux_jacobian_normal(w, n, gas)?;
    let plus = (abs + a).scale(0.5);
    let minus = match convention {
        StegerConvention::Paper => (abs - a).scale(0.5),
        StegerConvention::Standard => (a - abs).scale(0.5),
    };
    Ok((plus, minus))
}

/// Roe-averaged state: ρ̃ = √(ρᵢρⱼ), √ρ-weighted velocity and total enthalpy.
pub fn roe_average(wi: &ConservativeState, wj: &ConservativeState, gas: &GasModel) -> Result<ConservativeState> {
    check_valid(wi, gas)?;
    check_valid(wj, gas)?;
    if wi == wj {
        return Ok(*wi);
    }
    let s = kernels::roe_char_state(&wi.to_array(), &wj.to_array(), gas.gamma)
        .ok_or_else(|| Error::Domain("Roe average has no real sound speed".into()))?;
    let rho = (wi.rho * wj.rho).sqrt();
    let q2 = s.u * s.u + s.v * s.v;
    // p̃ = ρ̃c̃²/γ
    let p = rho * s.c * s.c / gas.gamma;
    Ok(ConservativeState { rho, mx: rho * s.u, my: rho * s.v, e: p / (gas.gamma - 1.0) + 0.5 * rho * q2 })
}

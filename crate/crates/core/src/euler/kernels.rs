//! Flux kernels written over [`Real`], so the same code yields values (f64)
//! and exact derivatives (dual numbers).

use super::real::Real;
use super::{EntropyFix, StegerConvention};

/// Quantities needed by the characteristic decomposition.
#[derive(Clone, Copy, Debug)]
pub struct CharState<T> {
    pub u: T,
    pub v: T,
    pub h: T,
    pub c: T,
}

#[inline]
pub fn pressure<T: Real>(w: &[T; 4], gamma: f64) -> T {
    let ke = (w[1] * w[1] + w[2] * w[2]) / w[0] * 0.5;
    (w[3] - ke) * (gamma - 1.0)
}

/// F(W)·n for an arbitrary (possibly weighted) normal.
#[inline]
pub fn flux_normal<T: Real>(w: &[T; 4], n: [f64; 2], gamma: f64) -> [T; 4] {
    let p = pressure(w, gamma);
    let un = (w[1] * n[0] + w[2] * n[1]) / w[0];
    [
        w[0] * un,
        w[1] * un + p * n[0],
        w[2] * un + p * n[1],
        (w[3] + p) * un,
    ]
}

/// Characteristic quantities of a single state; `None` when ρ ≤ 0 or p ≤ 0.
pub fn char_state<T: Real>(w: &[T; 4], gamma: f64) -> Option<CharState<T>> {
    if !(w[0].value() > 0.0) {
        return None;
    }
    let p = pressure(w, gamma);
    if !(p.value() > 0.0) {
        return None;
    }
    let u = w[1] / w[0];
    let v = w[2] / w[0];
    let h = (w[3] + p) / w[0];
    let c = (p * gamma / w[0]).sqrt();
    Some(CharState { u, v, h, c })
}

/// Roe-averaged characteristic state; `None` if either input is invalid or
/// the averaged sound speed is not real.
pub fn roe_char_state<T: Real>(wi: &[T; 4], wj: &[T; 4], gamma: f64) -> Option<CharState<T>> {
    let si = char_state(wi, gamma)?;
    let sj = char_state(wj, gamma)?;
    let ri = wi[0].sqrt();
    let rj = wj[0].sqrt();
    let den = ri + rj;
    let u = (ri * si.u + rj * sj.u) / den;
    let v = (ri * si.v + rj * sj.v) / den;
    let h = (ri * si.h + rj * sj.h) / den;
    let c2 = (h - (u * u + v * v) * 0.5) * (gamma - 1.0);
    if !(c2.value() > 0.0) {
        return None;
    }
    Some(CharState { u, v, h, c: c2.sqrt() })
}

/// Wave speeds (uₙ, uₙ, uₙ+c‖n‖, uₙ−c‖n‖).
#[inline]
pub fn wave_speeds<T: Real>(s: &CharState<T>, n: [f64; 2]) -> [T; 4] {
    let un = s.u * n[0] + s.v * n[1];
    let cn = s.c * (n[0] * n[0] + n[1] * n[1]).sqrt();
    [un, un, un + cn, un - cn]
}

/// Harten-regularised |λ|.
#[inline]
pub fn regularized_abs<T: Real>(lambda: T, eps: T) -> T {
    let a = lambda.abs();
    if a.value() < eps.value() {
        (lambda * lambda + eps * eps) / (eps * 2.0)
    } else {
        a
    }
}

#[inline]
pub fn entropy_eps<T: Real>(s: &CharState<T>, n: [f64; 2], fix: EntropyFix) -> T {
    match fix {
        EntropyFix::None => T::cst(0.0),
        EntropyFix::Harten { fraction } => {
            let un = s.u * n[0] + s.v * n[1];
            let cn = s.c * (n[0] * n[0] + n[1] * n[1]).sqrt();
            (un.abs() + cn) * fraction
        }
    }
}

/// Σₖ φ(λₖ) (lₖ·x) rₖ, i.e. P φ(Λ) P⁻¹ x for the Jacobian at `s` along `n`.
/// `phi` receives each eigenvalue and the entropy-fix width.
pub fn char_apply<T: Real, F>(
    s: &CharState<T>,
    n: [f64; 2],
    gamma: f64,
    fix: EntropyFix,
    x: &[T; 4],
    phi: F,
) -> [T; 4]
where
    F: Fn(T, T) -> T,
{
    let nn = (n[0] * n[0] + n[1] * n[1]).sqrt();
    if nn == 0.0 {
        return [T::cst(0.0); 4];
    }
    let (nx, ny) = (n[0] / nn, n[1] / nn);
    let CharState { u, v, h, c } = *s;
    let q2 = u * u + v * v;
    let unh = u * nx + v * ny;
    let ut = v * nx - u * ny;
    let b1 = T::cst(gamma - 1.0) / (c * c);
    let b2 = b1 * q2 * 0.5;
    let lam = wave_speeds(s, n);
    let eps = entropy_eps(s, n, fix);

    // left eigenvectors applied to x
    let a1 = (-b2 + 1.0) * x[0] + b1 * u * x[1] + b1 * v * x[2] - b1 * x[3];
    let a2 = -ut * x[0] - x[1] * ny + x[2] * nx;
    let a3 = ((b2 - unh / c) * x[0] + (-b1 * u + T::cst(nx) / c) * x[1] + (-b1 * v + T::cst(ny) / c) * x[2]
        + b1 * x[3])
        * 0.5;
    let a4 = ((b2 + unh / c) * x[0] + (-b1 * u - T::cst(nx) / c) * x[1] + (-b1 * v - T::cst(ny) / c) * x[2]
        + b1 * x[3])
        * 0.5;

    let k1 = phi(lam[0], eps) * a1;
    let k2 = phi(lam[1], eps) * a2;
    let k3 = phi(lam[2], eps) * a3;
    let k4 = phi(lam[3], eps) * a4;

    [
        k1 + k3 + k4,
        k1 * u - k2 * ny + k3 * (u + c * nx) + k4 * (u - c * nx),
        k1 * v + k2 * nx + k3 * (v + c * ny) + k4 * (v - c * ny),
        k1 * q2 * 0.5 + k2 * ut + k3 * (h + c * unh) + k4 * (h - c * unh),
    ]
}

/// |A(s, n)| x with the configured entropy fix.
#[inline]
pub fn abs_apply<T: Real>(s: &CharState<T>, n: [f64; 2], gamma: f64, fix: EntropyFix, x: &[T; 4]) -> [T; 4] {
    char_apply(s, n, gamma, fix, x, |l, e| regularized_abs(l, e))
}

/// Roe flux ½(F(Wi)+F(Wj))·n + ½|Ã|(Wi−Wj).
pub fn roe_flux<T: Real>(wi: &[T; 4], wj: &[T; 4], n: [f64; 2], gamma: f64, fix: EntropyFix) -> Option<[T; 4]> {
    let s = roe_char_state(wi, wj, gamma)?;
    let fi = flux_normal(wi, n, gamma);
    let fj = flux_normal(wj, n, gamma);
    let dw = [wi[0] - wj[0], wi[1] - wj[1], wi[2] - wj[2], wi[3] - wj[3]];
    let d = abs_apply(&s, n, gamma, fix, &dw);
    Some([
        (fi[0] + fj[0] + d[0]) * 0.5,
        (fi[1] + fj[1] + d[1]) * 0.5,
        (fi[2] + fj[2] + d[2]) * 0.5,
        (fi[3] + fj[3] + d[3]) * 0.5,
    ])
}

/// A±(s, n) x under the given sign convention.
pub fn split_apply<T: Real>(
    s: &CharState<T>,
    n: [f64; 2],
    gamma: f64,
    fix: EntropyFix,
    convention: StegerConvention,
    plus: bool,
    x: &[T; 4],
) -> [T; 4] {
    match (plus, convention) {
        (true, _) => char_apply(s, n, gamma, fix, x, |l, e| (regularized_abs(l, e) + l) * 0.5),
        (false, StegerConvention::Standard) => char_apply(s, n, gamma, fix, x, |l, e| (l - regularized_abs(l, e)) * 0.5),
        (false, StegerConvention::Paper) => char_apply(s, n, gamma, fix, x, |l, e| (regularized_abs(l, e) - l) * 0.5),
    }
}

/// Slip-wall flux (0, p n, 0).
#[inline]
pub fn slip_flux<T: Real>(w: &[T; 4], n: [f64; 2], gamma: f64) -> [T; 4] {
    let p = pressure(w, gamma);
    [T::cst(0.0), p * n[0], p * n[1], T::cst(0.0)]
}

/// Free-stream flux A⁺(Wᵢ, n)Wᵢ + A⁻(Wᵢ, n)W∞ with A± evaluated at Wᵢ.
pub fn steger_inflow_flux<T: Real>(
    wi: &[T; 4],
    winf: &[T; 4],
    n: [f64; 2],
    gamma: f64,
    fix: EntropyFix,
    convention: StegerConvention,
) -> Option<[T; 4]> {
    let s = char_state(wi, gamma)?;
    let a = split_apply(&s, n, gamma, fix, convention, true, wi);
    let b = split_apply(&s, n, gamma, fix, convention, false, winf);
    Some([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]])
}

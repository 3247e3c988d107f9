#![allow(clippy::needless_range_loop)]

//! Finite-difference and generic-eigensolver oracles for the Euler Jacobians.

use nalgebra::Matrix4 as NaMatrix4;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shockadj_core::euler::{
    abs_jacobian, eigen_decomposition, flux_jacobian_normal, flux_normal, pressure, pressure_jacobian, roe_average,
    ConservativeState, EntropyFix, GasModel, Matrix4,
};

const GAS: GasModel = GasModel { gamma: 1.4 };

fn random_state(rng: &mut impl Rng) -> ConservativeState {
    ConservativeState::from_primitive(
        rng.gen_range(0.3..3.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(0.2..3.0),
        &GAS,
    )
}

fn random_normal(rng: &mut impl Rng) -> [f64; 2] {
    let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r: f64 = rng.gen_range(0.1..2.0);
    [r * t.cos(), r * t.sin()]
}

fn perturbed(w: &ConservativeState, k: usize, h: f64) -> ConservativeState {
    let mut a = w.to_array();
    a[k] += h;
    ConservativeState::from_array(a)
}

#[test]
fn pressure_jacobian_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let w = random_state(&mut rng);
        let norm = w.to_array().iter().map(|x| x * x).sum::<f64>().sqrt();
        let h = 1e-6 * norm;
        let exact = pressure_jacobian(&w, &GAS).unwrap();
        let scale = exact.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for k in 0..4 {
            let fd = (pressure(&perturbed(&w, k, h), &GAS).unwrap() - pressure(&perturbed(&w, k, -h), &GAS).unwrap())
                / (2.0 * h);
            assert!((fd - exact[k]).abs() <= 1e-6 * scale, "k={k} fd={fd} exact={}", exact[k]);
        }
    }
}

#[test]
fn flux_jacobian_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let w = random_state(&mut rng);
        let n = random_normal(&mut rng);
        let a = flux_jacobian_normal(&w, n, &GAS).unwrap();
        let norm = w.to_array().iter().map(|x| x * x).sum::<f64>().sqrt();
        let h = 1e-6 * norm;
        let mut fd = Matrix4::ZERO;
        for k in 0..4 {
            let fp = flux_normal(&perturbed(&w, k, h), n, &GAS).unwrap();
            let fm = flux_normal(&perturbed(&w, k, -h), n, &GAS).unwrap();
            for i in 0..4 {
                fd.0[i][k] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let rel = (fd - a).max_abs() / a.max_abs();
        assert!(rel < 1e-6, "relative FD mismatch {rel}");
    }
}

#[test]
fn eigen_reconstruction_and_generic_eigensolver() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let w = random_state(&mut rng);
        let n = random_normal(&mut rng);
        let a = flux_jacobian_normal(&w, n, &GAS).unwrap();
        let eig = eigen_decomposition(&w, n, &GAS).unwrap();
        let err = (eig.reconstruct() - a).frobenius();
        assert!(err < 1e-12 * a.frobenius(), "reconstruction error {err}");

        let na = NaMatrix4::from_fn(|i, j| a.get(i, j));
        let mut roots: Vec<f64> = na.complex_eigenvalues().iter().map(|z| z.re).collect();
        let mut ours = eig.lambda.to_vec();
        roots.sort_by(f64::total_cmp);
        ours.sort_by(f64::total_cmp);
        for (r, o) in roots.iter().zip(&ours) {
            assert!((r - o).abs() < 1e-8 * a.max_abs(), "{roots:?} vs {ours:?}");
        }
    }
}

#[test]
fn abs_squared_equals_a_squared_without_entropy_fix() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let w = random_state(&mut rng);
        let n = random_normal(&mut rng);
        let a = flux_jacobian_normal(&w, n, &GAS).unwrap();
        let abs = abs_jacobian(&w, n, &GAS, EntropyFix::None).unwrap();
        let a2 = a * a;
        let err = (abs * abs - a2).frobenius();
        assert!(err <= 1e-10 * a2.frobenius(), "|A|^2 - A^2 = {err}");
    }
}

#[test]
fn roe_property_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let wi = random_state(&mut rng);
        let mut wj = random_state(&mut rng);
        // nearby states: blend towards wi
        let t = rng.gen_range(0.0..0.3);
        let (ai, aj) = (wi.to_array(), wj.to_array());
        wj = ConservativeState::from_array([0, 1, 2, 3].map(|k| ai[k] + t * (aj[k] - ai[k])));
        let n = random_normal(&mut rng);
        let roe = roe_average(&wi, &wj, &GAS).unwrap();
        let a = flux_jacobian_normal(&roe, n, &GAS).unwrap();
        let dw = [0, 1, 2, 3].map(|k| wj.to_array()[k] - wi.to_array()[k]);
        let lhs = a.mul_vec(&dw);
        let fi = flux_normal(&wi, n, &GAS).unwrap();
        let fj = flux_normal(&wj, n, &GAS).unwrap();
        let scale = fi.iter().chain(&fj).fold(0.0f64, |m, x| m.max(x.abs()));
        for k in 0..4 {
            assert!((lhs[k] - (fj[k] - fi[k])).abs() <= 1e-8 * scale);
        }
    }
}

proptest! {
    #[test]
    fn roe_average_of_identical_states_is_identity(
        rho in 0.05f64..10.0, u in -5.0f64..5.0, v in -5.0f64..5.0, p in 0.05f64..10.0
    ) {
        let w = ConservativeState::from_primitive(rho, u, v, p, &GAS);
        prop_assert_eq!(roe_average(&w, &w, &GAS).unwrap(), w);
    }
}

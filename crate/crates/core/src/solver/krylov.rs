use super::config::{LinearSolverConfig, Preconditioner};
use super::jacobian::BlockSparseMatrix;
use crate::error::{Error, Result};
use crate::euler::{Matrix4, Vec4};

/// M⁻¹ applied to a block vector.
pub trait Precondition {
    fn apply(&self, r: &[Vec4]) -> Vec<Vec4>;
}

pub struct BlockJacobi {
    inv: Vec<Matrix4>,
}

impl BlockJacobi {
    pub fn new(a: &BlockSparseMatrix) -> Result<Self> {
        let inv = (0..a.n_rows())
            .map(|i| {
                a.block(i, i)
                    .and_then(|d| d.inverse())
                    .ok_or_else(|| Error::Singular(format!("diagonal block {i} is singular")))
            })
            .collect::<Result<_>>()?;
        Ok(BlockJacobi { inv })
    }
}

impl Precondition for BlockJacobi {
    fn apply(&self, r: &[Vec4]) -> Vec<Vec4> {
        r.iter().zip(&self.inv).map(|(x, m)| m.mul_vec(x)).collect()
    }
}

/// Block ILU(0) in the natural vertex order.
pub struct BlockIlu0 {
    lu: BlockSparseMatrix,
    inv_diag: Vec<Matrix4>,
}

impl BlockIlu0 {
    pub fn new(a: &BlockSparseMatrix) -> Result<Self> {
        let mut lu = a.clone();
        let n = lu.n_rows();
        let mut inv_diag = vec![Matrix4::ZERO; n];
        for i in 0..n {
            let range = lu.row_range(i);
            for p in range.clone() {
                let k = lu.col_at(p);
                if k >= i {
                    break;
                }
                let lik = *lu.block_at(p) * inv_diag[k];
                *lu.block_at_mut(p) = lik;
                for q in range.clone() {
                    let j = lu.col_at(q);
                    if j <= k {
                        continue;
                    }
                    if let Some(kj) = lu.position(k, j) {
                        let upd = lik * *lu.block_at(kj);
                        *lu.block_at_mut(q) = *lu.block_at(q) - upd;
                    }
                }
            }
            inv_diag[i] = lu
                .block_at(lu.diag_pos(i))
                .inverse()
                .ok_or_else(|| Error::Singular(format!("ILU pivot block {i} is singular")))?;
        }
        Ok(BlockIlu0 { lu, inv_diag })
    }
}

impl Precondition for BlockIlu0 {
    fn apply(&self, r: &[Vec4]) -> Vec<Vec4> {
        let n = self.lu.n_rows();
        let mut y = r.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for p in self.lu.row_range(i) {
                let k = self.lu.col_at(p);
                if k >= i {
                    break;
                }
                let t = self.lu.block_at(p).mul_vec(&y[k]);
                for c in 0..4 {
                    s[c] -= t[c];
                }
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for p in self.lu.row_range(i) {
                let k = self.lu.col_at(p);
                if k <= i {
                    continue;
                }
                let t = self.lu.block_at(p).mul_vec(&y[k]);
                for c in 0..4 {
                    s[c] -= t[c];
                }
            }
            y[i] = self.inv_diag[i].mul_vec(&s);
        }
        y
    }
}

pub fn build_preconditioner(a: &BlockSparseMatrix, kind: Preconditioner) -> Result<Box<dyn Precondition + Send + Sync>> {
    Ok(match kind {
        Preconditioner::BlockJacobi => Box::new(BlockJacobi::new(a)?),
        Preconditioner::BlockIlu0 => Box::new(BlockIlu0::new(a)?),
    })
}

#[derive(Clone, Debug)]
pub struct LinearSolve {
    pub x: Vec<Vec4>,
    pub iterations: usize,
    /// ‖b − Ax‖ / ‖b‖ at exit.
    pub rel_residual: f64,
    pub converged: bool,
}

fn dot(a: &[Vec4], b: &[Vec4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3]).sum()
}

fn nrm(a: &[Vec4]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [Vec4], a: f64, x: &[Vec4]) {
    for (u, v) in y.iter_mut().zip(x) {
        for k in 0..4 {
            u[k] += a * v[k];
        }
    }
}

/// Right-preconditioned restarted GMRES for A x = b.
pub fn gmres(
    a: &BlockSparseMatrix,
    b: &[Vec4],
    x0: Option<&[Vec4]>,
    precond: &dyn Precondition,
    cfg: &LinearSolverConfig,
) -> LinearSolve {
    let n = b.len();
    let bnorm = nrm(b);
    let mut x = x0.map(|v| v.to_vec()).unwrap_or_else(|| vec![[0.0; 4]; n]);
    if bnorm == 0.0 {
        return LinearSolve { x: vec![[0.0; 4]; n], iterations: 0, rel_residual: 0.0, converged: true };
    }
    let m = cfg.restart;
    let mut total = 0;
    loop {
        let ax = a.mul_vec(&x);
        let r: Vec<Vec4> = b.iter().zip(&ax).map(|(p, q)| std::array::from_fn(|k| p[k] - q[k])).collect();
        let beta = nrm(&r);
        let rel = beta / bnorm;
        if rel <= cfg.rel_tol || total >= cfg.max_iter {
            return LinearSolve { x, iterations: total, rel_residual: rel, converged: rel <= cfg.rel_tol };
        }
        let mut v: Vec<Vec<Vec4>> = vec![r.iter().map(|e| e.map(|c| c / beta)).collect()];
        let mut z: Vec<Vec<Vec4>> = Vec::with_capacity(m);
        let mut h = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..m {
            let zk = precond.apply(&v[k]);
            let mut w = a.mul_vec(&zk);
            z.push(zk);
            // modified Gram–Schmidt
            for (i, vi) in v.iter().enumerate() {
                h[i][k] = dot(&w, vi);
                axpy(&mut w, -h[i][k], vi);
            }
            h[k + 1][k] = nrm(&w);
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let d = h[k][k].hypot(h[k + 1][k]);
            if d == 0.0 {
                k_used = k;
                break;
            }
            cs[k] = h[k][k] / d;
            sn[k] = h[k + 1][k] / d;
            h[k][k] = d;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            total += 1;
            k_used = k + 1;
            if g[k + 1].abs() / bnorm <= cfg.rel_tol || total >= cfg.max_iter {
                break;
            }
            let wn = nrm(&w);
            if wn == 0.0 {
                break;
            }
            v.push(w.iter().map(|e| e.map(|c| c / wn)).collect());
        }
        // back substitution
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            axpy(&mut x, *yj, &z[j]);
        }
        if k_used == 0 {
            let ax = a.mul_vec(&x);
            let r: Vec<Vec4> = b.iter().zip(&ax).map(|(p, q)| std::array::from_fn(|k| p[k] - q[k])).collect();
            let rel = nrm(&r) / bnorm;
            return LinearSolve { x, iterations: total, rel_residual: rel, converged: rel <= cfg.rel_tol };
        }
    }
}

/// Solves A x = b with the configured preconditioner.
pub fn solve_linear(a: &BlockSparseMatrix, b: &[Vec4], cfg: &LinearSolverConfig) -> Result<LinearSolve> {
    let p = build_preconditioner(a, cfg.preconditioner)?;
    Ok(gmres(a, b, None, p.as_ref(), cfg))
}

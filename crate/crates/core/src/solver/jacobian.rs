use super::config::{JacobianMode, SolverConfig};
use super::residual::{boundary_flux_kernel, FieldState};
use crate::error::{Error, Result};
use crate::euler::kernels;
use crate::euler::real::Dual;
use crate::euler::{Matrix4, Vec4};
use crate::mesh::{BoundaryTag, Mesh2D, Point};
use rayon::prelude::*;

/// Block CSR matrix with 4×4 blocks on the mesh graph plus the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSparseMatrix {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    blocks: Vec<Matrix4>,
    diag: Vec<usize>,
    /// Positions of (i, j) and (j, i) for every mesh edge.
    edge_pos: Vec<(usize, usize)>,
}

impl BlockSparseMatrix {
    /// Zero matrix with the sparsity pattern of the mesh.
    pub fn from_mesh(mesh: &Mesh2D) -> Self {
        let n = mesh.n_vertices();
        let mut rows: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for e in mesh.edges() {
            rows[e.i].push(e.j);
            rows[e.j].push(e.i);
        }
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        for r in rows.iter_mut() {
            r.sort_unstable();
            r.dedup();
            cols.extend_from_slice(r);
            row_ptr.push(cols.len());
        }
        let mut m = BlockSparseMatrix {
            blocks: vec![Matrix4::ZERO; cols.len()],
            row_ptr,
            cols,
            diag: Vec::new(),
            edge_pos: Vec::new(),
        };
        m.diag = (0..n).map(|i| m.position(i, i).unwrap()).collect();
        m.edge_pos = mesh.edges().iter().map(|e| (m.position(e.i, e.j).unwrap(), m.position(e.j, e.i).unwrap())).collect();
        m
    }

    pub fn n_rows(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz_blocks(&self) -> usize {
        self.cols.len()
    }

    pub fn row_cols(&self, i: usize) -> &[usize] {
        &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn row_blocks(&self, i: usize) -> &[Matrix4] {
        &self.blocks[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        self.row_ptr[i]..self.row_ptr[i + 1]
    }

    pub(crate) fn col_at(&self, pos: usize) -> usize {
        self.cols[pos]
    }

    pub(crate) fn block_at(&self, pos: usize) -> &Matrix4 {
        &self.blocks[pos]
    }

    pub(crate) fn block_at_mut(&mut self, pos: usize) -> &mut Matrix4 {
        &mut self.blocks[pos]
    }

    pub(crate) fn diag_pos(&self, i: usize) -> usize {
        self.diag[i]
    }

    /// Storage index of block (i, j), if it is in the pattern.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let r = self.row_range(i);
        self.cols[r.clone()].binary_search(&j).ok().map(|k| r.start + k)
    }

    pub fn block(&self, i: usize, j: usize) -> Option<&Matrix4> {
        self.position(i, j).map(|p| &self.blocks[p])
    }

    pub fn add_to(&mut self, i: usize, j: usize, m: &Matrix4) -> Result<()> {
        let p = self
            .position(i, j)
            .ok_or_else(|| Error::Structural(format!("block ({i}, {j}) outside the sparsity pattern")))?;
        self.blocks[p] = self.blocks[p] + *m;
        Ok(())
    }

    /// Adds sᵢ·I to every diagonal block.
    pub fn add_scaled_identity(&mut self, s: &[f64]) {
        for (i, &p) in self.diag.iter().enumerate() {
            for k in 0..4 {
                self.blocks[p].0[k][k] += s[i];
            }
        }
    }

    pub fn mul_vec(&self, x: &[Vec4]) -> Vec<Vec4> {
        (0..self.n_rows())
            .into_par_iter()
            .map(|i| {
                let mut y = [0.0; 4];
                for p in self.row_range(i) {
                    let b = self.blocks[p].mul_vec(&x[self.cols[p]]);
                    for k in 0..4 {
                        y[k] += b[k];
                    }
                }
                y
            })
            .collect()
    }

    /// Aᵀ (same pattern, blocks transposed and mirrored).
    pub fn transpose(&self) -> Self {
        let mut t = self.clone();
        for i in 0..self.n_rows() {
            for p in self.row_range(i) {
                let j = self.cols[p];
                let q = self.position(j, i).expect("symmetric pattern");
                t.blocks[q] = self.blocks[p].transpose();
            }
        }
        t
    }

    /// Dense copy (testing and small systems).
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = 4 * self.n_rows();
        let mut d = vec![vec![0.0; n]; n];
        for i in 0..self.n_rows() {
            for p in self.row_range(i) {
                let j = self.cols[p];
                for a in 0..4 {
                    for b in 0..4 {
                        d[4 * i + a][4 * j + b] = self.blocks[p].0[a][b];
                    }
                }
            }
        }
        d
    }
}

/// ∂f/∂w of a 4 → 4 kernel at w, by forward-mode dual numbers.
pub fn kernel_jacobian<F>(w: &Vec4, f: F) -> Option<Matrix4>
where
    F: Fn(&[Dual<4>; 4]) -> Option<[Dual<4>; 4]>,
{
    let x: [Dual<4>; 4] = std::array::from_fn(|k| Dual::variable(w[k], k));
    let y = f(&x)?;
    Some(Matrix4(std::array::from_fn(|a| y[a].d)))
}

/// Matrix of a linear map given by its action on vectors.
fn matrix_of<F: Fn(&Vec4) -> Vec4>(f: F) -> Matrix4 {
    let mut m = Matrix4::ZERO;
    for b in 0..4 {
        let mut e = [0.0; 4];
        e[b] = 1.0;
        let col = f(&e);
        for a in 0..4 {
            m.0[a][b] = col[a];
        }
    }
    m
}

/// (∂Φ/∂Wi, ∂Φ/∂Wj) of the first-order edge flux.
pub fn edge_flux_jacobians(wi: &Vec4, wj: &Vec4, n: Point, cfg: &SolverConfig) -> Result<(Matrix4, Matrix4)> {
    let g = cfg.gas.gamma;
    let fail = || Error::Domain(format!("edge Jacobian: invalid states {wi:?} | {wj:?}"));
    match cfg.jacobian {
        JacobianMode::Exact => {
            let a: [Dual<8>; 4] = std::array::from_fn(|k| Dual::variable(wi[k], k));
            let b: [Dual<8>; 4] = std::array::from_fn(|k| Dual::variable(wj[k], 4 + k));
            let f = kernels::roe_flux(&a, &b, n, g, cfg.entropy_fix).ok_or_else(fail)?;
            let di = Matrix4(std::array::from_fn(|r| std::array::from_fn(|c| f[r].d[c])));
            let dj = Matrix4(std::array::from_fn(|r| std::array::from_fn(|c| f[r].d[4 + c])));
            Ok((di, dj))
        }
        JacobianMode::Frozen => {
            let s = kernels::roe_char_state(wi, wj, g).ok_or_else(fail)?;
            let abs = matrix_of(|x| kernels::abs_apply(&s, n, g, cfg.entropy_fix, x));
            let ai = kernel_jacobian(wi, |w| Some(kernels::flux_normal(w, n, g))).unwrap();
            let aj = kernel_jacobian(wj, |w| Some(kernels::flux_normal(w, n, g))).unwrap();
            Ok(((ai + abs).scale(0.5), (aj - abs).scale(0.5)))
        }
    }
}

/// ∂(boundary flux)/∂Wᵢ on one half-face.
pub fn boundary_flux_jacobian(w: &Vec4, tag: BoundaryTag, n: Point, cfg: &SolverConfig) -> Result<Matrix4> {
    let g = cfg.gas.gamma;
    let fail = || Error::Domain(format!("boundary Jacobian: invalid state {w:?}"));
    let winf = cfg.freestream.state(&cfg.gas).to_array();
    match (cfg.jacobian, tag) {
        (JacobianMode::Frozen, BoundaryTag::InflowFreestream) => {
            let s = kernels::char_state(w, g).ok_or_else(fail)?;
            Ok(matrix_of(|x| kernels::split_apply(&s, n, g, cfg.entropy_fix, cfg.steger, true, x)))
        }
        _ => {
            let winf_d = winf.map(Dual::constant);
            kernel_jacobian(w, |x| boundary_flux_kernel(x, &winf_d, tag, n, cfg)).ok_or_else(fail)
        }
    }
}

/// ∂(inflow flux)/∂W∞ on one half-face: A⁻(Wᵢ, n).
pub fn inflow_freestream_jacobian(w: &Vec4, n: Point, cfg: &SolverConfig) -> Result<Matrix4> {
    let g = cfg.gas.gamma;
    let s = kernels::char_state(w, g).ok_or_else(|| Error::Domain(format!("invalid state {w:?}")))?;
    Ok(matrix_of(|x| kernels::split_apply(&s, n, g, cfg.entropy_fix, cfg.steger, false, x)))
}

/// Jacobian of the first-order residual (no MUSCL), frozen or exact per
/// `cfg.jacobian`.
pub fn assemble_first_order_jacobian(
    field: &FieldState,
    mesh: &Mesh2D,
    cfg: &SolverConfig,
) -> Result<BlockSparseMatrix> {
    let mut m = BlockSparseMatrix::from_mesh(mesh);
    let blocks: Vec<(Matrix4, Matrix4)> = mesh
        .edges()
        .par_iter()
        .enumerate()
        .map(|(e, edge)| {
            edge_flux_jacobians(&field.w[edge.i], &field.w[edge.j], edge.normal, cfg)
                .map_err(|err| Error::Domain(format!("edge {e}: {err}")))
        })
        .collect::<Result<_>>()?;
    for ((edge, (di, dj)), &(pij, pji)) in mesh.edges().iter().zip(&blocks).zip(&m.edge_pos.clone()) {
        let (pii, pjj) = (m.diag[edge.i], m.diag[edge.j]);
        m.blocks[pii] = m.blocks[pii] + *di;
        m.blocks[pij] = m.blocks[pij] + *dj;
        m.blocks[pji] = m.blocks[pji] - *di;
        m.blocks[pjj] = m.blocks[pjj] - *dj;
    }
    for face in mesh.boundary_faces() {
        let b = boundary_flux_jacobian(&field.w[face.vertex], face.tag, face.normal, cfg)?;
        let p = m.diag[face.vertex];
        m.blocks[p] = m.blocks[p] + b;
    }
    Ok(m)
}

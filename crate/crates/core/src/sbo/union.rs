use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graphgen::LaplacianMatrix;
use crate::linalg::{orthonormality_defect, polar_factor, sign_normalize};
use crate::sparse::{select_threshold, SparseCode};

/// Blocks must satisfy `‖QᵀQ − I‖_max` below this.
pub const ORTHO_TOL: f64 = 1e-10;

/// Ordered union of m×m orthonormal blocks, each tagged with a class.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockUnion {
    m: usize,
    blocks: Vec<DMatrix<f64>>,
    class_of_block: Vec<u32>,
}

impl BlockUnion {
    pub fn new(blocks: Vec<DMatrix<f64>>, class_of_block: Vec<u32>) -> Result<Self> {
        let m = blocks.first().ok_or_else(|| Error::invalid("a block union needs a block"))?.nrows();
        if blocks.len() != class_of_block.len() {
            return Err(Error::dims("one class id per block required"));
        }
        for (j, q) in blocks.iter().enumerate() {
            if q.shape() != (m, m) {
                return Err(Error::dims(format!("block {j} is not {m}x{m}")));
            }
            let defect = orthonormality_defect(q);
            if defect > 1e-8 {
                return Err(Error::invalid(format!("block {j} is not orthonormal (defect {defect:e})")));
            }
        }
        Ok(BlockUnion { m, blocks, class_of_block })
    }

    /// All blocks tagged with one class.
    pub fn for_class(blocks: Vec<DMatrix<f64>>, class: u32) -> Result<Self> {
        let n = blocks.len();
        Self::new(blocks, vec![class; n])
    }

    /// Concatenate unions in order.
    pub fn pooled<'a, I: IntoIterator<Item = &'a BlockUnion>>(parts: I) -> Result<Self> {
        let mut blocks = Vec::new();
        let mut classes = Vec::new();
        for u in parts {
            blocks.extend(u.blocks.iter().cloned());
            classes.extend_from_slice(&u.class_of_block);
        }
        Self::new(blocks, classes)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[DMatrix<f64>] {
        &self.blocks
    }

    pub fn block(&self, j: usize) -> &DMatrix<f64> {
        &self.blocks[j]
    }

    pub fn class_of_block(&self) -> &[u32] {
        &self.class_of_block
    }

    pub fn max_orthonormality_defect(&self) -> f64 {
        self.blocks.iter().map(orthonormality_defect).fold(0.0, f64::max)
    }
}

/// Orthonormal basis derived from a Laplacian: its eigenvectors, ordered by
/// increasing eigenvalue (original index on ties), each with its
/// largest-magnitude entry made positive. `L = I` gives `I`.
pub fn orthogonalize_laplacian(l: &LaplacianMatrix) -> DMatrix<f64> {
    orthogonal_eigenbasis(l.matrix())
}

/// Sign-normalized eigenvector basis of a symmetric matrix.
pub fn orthogonal_eigenbasis(a: &DMatrix<f64>) -> DMatrix<f64> {
    let m = a.nrows();
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]).then(x.cmp(&y)));
    let mut q = DMatrix::zeros(m, m);
    for (k, &j) in order.iter().enumerate() {
        let mut v: DVector<f64> = eig.eigenvectors.column(j).into_owned();
        sign_normalize(v.as_mut_slice());
        q.set_column(k, &v);
    }
    q
}

/// Sum of the `s` largest squares in `c`.
pub(crate) fn top_energy(c: &[f64], s: usize, scratch: &mut Vec<f64>) -> f64 {
    let s = s.min(c.len());
    if s == 0 {
        return 0.0;
    }
    scratch.clear();
    scratch.extend(c.iter().map(|x| x * x));
    let k = scratch.len() - s;
    scratch.select_nth_unstable_by(k, f64::total_cmp);
    scratch[k..].iter().sum()
}

/// Best block for `y`: the one whose thresholded coefficients carry the
/// most energy (lowest index on ties), with that code.
pub fn sbo_represent(union: &BlockUnion, y: &DVector<f64>, s: usize) -> Result<(usize, SparseCode)> {
    if y.len() != union.m() {
        return Err(Error::dims(format!("signal length {} for blocks of size {}", y.len(), union.m())));
    }
    let mut best = 0;
    let mut best_energy = f64::NEG_INFINITY;
    let mut scratch = Vec::with_capacity(union.m());
    for (j, q) in union.blocks().iter().enumerate() {
        let c = q.tr_mul(y);
        let e = top_energy(c.as_slice(), s, &mut scratch);
        if e > best_energy {
            best_energy = e;
            best = j;
        }
    }
    let c = union.block(best).tr_mul(y);
    Ok((best, select_threshold(c.as_slice(), s)))
}

/// Best block and its captured energy for every column of `y`.
pub fn assign_blocks(blocks: &[DMatrix<f64>], y: &DMatrix<f64>, s: usize) -> (Vec<usize>, Vec<f64>) {
    let n = y.ncols();
    let mut best = vec![0usize; n];
    let mut energy = vec![f64::NEG_INFINITY; n];
    let mut scratch = Vec::new();
    for (j, q) in blocks.iter().enumerate() {
        let c = q.tr_mul(y);
        for i in 0..n {
            let e = top_energy(c.column(i).as_slice(), s, &mut scratch);
            if e > energy[i] {
                energy[i] = e;
                best[i] = j;
            }
        }
    }
    (best, energy)
}

/// Orthogonal `Q` minimizing `‖Y − QX‖_F`: `V Uᵀ` from `XYᵀ = UΣVᵀ`,
/// i.e. the polar factor of `YXᵀ`. `None` when `XYᵀ` vanishes and every
/// orthogonal matrix is optimal.
pub fn procrustes_update(y: &DMatrix<f64>, x: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    assert_eq!(y.shape(), x.shape(), "signals and codes must have the same shape");
    let yx = y * x.transpose();
    if yx.amax() == 0.0 {
        return None;
    }
    Some(polar_factor(&yx))
}

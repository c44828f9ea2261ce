//! Small dense helpers shared by the learners.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    // Column-major fill so the draw order matches storage order.
    let data: Vec<f64> = (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect();
    DMatrix::from_vec(rows, cols, data)
}

pub fn gaussian_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_iterator(len, (0..len).map(|_| rng.sample(StandardNormal)))
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = DMatrix::zeros(ar * br, ac * bc);
    for j in 0..ac {
        for i in 0..ar {
            let aij = a[(i, j)];
            if aij == 0.0 {
                continue;
            }
            out.view_mut((i * br, j * bc), (br, bc)).copy_from(&(b * aij));
        }
    }
    out
}

/// Column-stacking vectorization.
pub fn vec_cols(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

pub fn unvec_cols(v: &DVector<f64>, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_column_slice(rows, cols, v.as_slice())
}

/// Flip the sign of a vector so its largest-magnitude entry (lowest index
/// on ties) is positive. Returns whether the sign was flipped.
pub fn sign_normalize(v: &mut [f64]) -> bool {
    let mut best = 0usize;
    let mut best_abs = -1.0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best_abs {
            best_abs = x.abs();
            best = i;
        }
    }
    let flip = !v.is_empty() && v[best] < 0.0;
    if flip {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    flip
}

pub fn sign_normalize_columns(m: &mut DMatrix<f64>) {
    for mut col in m.column_iter_mut() {
        sign_normalize(col.as_mut_slice());
    }
}

/// Orthogonal polar factor `U Vᵀ` of a square matrix. Singular directions
/// of a rank deficient input are completed deterministically, so the result
/// is orthonormal to working precision whatever the rank.
pub fn polar_factor(a: &DMatrix<f64>) -> DMatrix<f64> {
    let m = a.nrows();
    assert_eq!(m, a.ncols(), "polar factor of a non-square matrix");
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("svd u");
    let v = svd.v_t.expect("svd v_t").transpose();
    let top = svd.singular_values.max();
    let keep: Vec<usize> = (0..m).filter(|&i| svd.singular_values[i] > top * 1e-12 * m as f64).collect();
    if keep.len() == m {
        return u * v.transpose();
    }
    let u = complete_with_unit_vectors(&u.select_columns(&keep));
    let v = complete_with_unit_vectors(&v.select_columns(&keep));
    u * v.transpose()
}

/// Extend orthonormal columns to an m×m orthonormal matrix by Gram-Schmidt
/// on the unit vectors e₁, e₂, … in order.
pub fn complete_with_unit_vectors(basis: &DMatrix<f64>) -> DMatrix<f64> {
    let m = basis.nrows();
    let mut cols: Vec<DVector<f64>> = basis.column_iter().map(|c| c.into_owned()).collect();
    let mut next = 0;
    while cols.len() < m && next < m {
        let mut w = DVector::zeros(m);
        w[next] = 1.0;
        next += 1;
        for _ in 0..2 {
            for q in &cols {
                let p = q.dot(&w);
                w.axpy(-p, q, 1.0);
            }
        }
        let n = w.norm();
        if n > 1e-6 {
            cols.push(w / n);
        }
    }
    DMatrix::from_columns(&cols)
}

/// Haar-distributed random orthogonal matrix (QR of a Gaussian matrix with
/// the sign of `R`'s diagonal folded into `Q`).
pub fn random_orthogonal<R: Rng + ?Sized>(m: usize, rng: &mut R) -> DMatrix<f64> {
    let g = gaussian_matrix(m, m, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..m {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Extend the orthonormal columns of `basis` (m×k, k ≤ m) to a full m×m
/// orthonormal matrix using Gram-Schmidt against random directions.
pub fn complete_orthonormal<R: Rng + ?Sized>(basis: &DMatrix<f64>, rng: &mut R) -> DMatrix<f64> {
    let m = basis.nrows();
    let mut cols: Vec<DVector<f64>> = basis.column_iter().map(|c| c.into_owned()).collect();
    while cols.len() < m {
        let mut w = gaussian_vector(m, rng);
        for _ in 0..2 {
            for q in &cols {
                let p = q.dot(&w);
                w.axpy(-p, q, 1.0);
            }
        }
        let n = w.norm();
        if n > 1e-8 {
            cols.push(w / n);
        }
    }
    DMatrix::from_columns(&cols)
}

/// Largest absolute deviation of `QᵀQ` from the identity.
pub fn orthonormality_defect(q: &DMatrix<f64>) -> f64 {
    let g = q.transpose() * q;
    let mut worst: f64 = 0.0;
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

/// Leading left singular vector, sign-normalized.
pub fn leading_left_singular(a: &DMatrix<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("svd u");
    let mut best = 0;
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s > svd.singular_values[best] {
            best = i;
        }
    }
    let mut v = u.column(best).into_owned();
    sign_normalize(v.as_mut_slice());
    v
}

//! Small dense helpers over `Complex64`. Storage is nalgebra; singular value
//! decompositions go through faer, which stays accurate on the exactly
//! rank-deficient matrices this crate produces.

use faer::Mat;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

fn to_faer(m: &CMatrix) -> Mat<Complex64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Singular values in descending order. Empty for a matrix with a zero
/// dimension.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv = to_faer(m)
        .singular_values()
        .expect("SVD iteration did not converge");
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// `σ_k / σ_1` for every singular value. All zeros when `σ_1 = 0`.
pub fn singular_value_ratios(m: &CMatrix) -> Vec<f64> {
    let sv = singular_values(m);
    match sv.first() {
        Some(&s1) if s1 > 0.0 => sv.iter().map(|s| s / s1).collect(),
        _ => vec![0.0; sv.len()],
    }
}

/// Minimum-norm least-squares solution of `a x = b` through a truncated SVD
/// pseudo-inverse. Singular values at or below `rel_cutoff · σ_1` are
/// dropped.
pub fn pinv_solve(a: &CMatrix, b: &CVector, rel_cutoff: f64) -> CVector {
    let mut x = CVector::zeros(a.ncols());
    if a.nrows() == 0 || a.ncols() == 0 {
        return x;
    }
    let svd = to_faer(a)
        .thin_svd()
        .expect("SVD iteration did not converge");
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let s1 = (0..s.nrows()).map(|k| s[k].re).fold(0.0, f64::max);
    if s1 == 0.0 {
        return x;
    }
    for k in 0..s.nrows() {
        let sk = s[k].re;
        if sk <= rel_cutoff * s1 {
            continue;
        }
        let coeff = (0..a.nrows())
            .map(|r| u[(r, k)].conj() * b[r])
            .sum::<Complex64>()
            / sk;
        for c in 0..a.ncols() {
            x[c] += v[(c, k)] * coeff;
        }
    }
    x
}

/// Frobenius norm of a complex matrix.
pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Column-major vectorization, `vec(M)[i + j·rows] = M[i, j]`.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_iterator(m.len(), m.iter().copied())
}

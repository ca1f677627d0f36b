//! Product-of-solutions matrices.
//!
//! Column `i + j·|B|` (0-based) pairs boundary basis vectors `e_i` and `e_j`.
//! Harmonic extensions carry the true sign `u_I = −(L_II + diag q)⁻¹ L_IB u_B`;
//! the sign cancels in every Hadamard product, so `F` and `G` agree with the
//! unsigned formulas entry for entry.

use crate::error::Result;
use crate::graph::Graph;
use crate::laplace::{DirichletSolver, EdgeWeights, NodeWeights};
use crate::linalg::CMatrix;

/// `|V| × |B|`; column `i` is the `γ,q`-harmonic extension of `e_i`.
pub fn harmonic_basis(g: &Graph, gamma: &EdgeWeights, q: &NodeWeights) -> Result<CMatrix> {
    Ok(DirichletSolver::new(g, gamma, q)?.harmonic_basis())
}

/// All pairwise Hadamard products of the columns of `a` and `b`, column
/// `i + j·a.ncols()` holding `a[:, i] ⊙ b[:, j]`.
pub fn column_products(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.nrows(), b.nrows());
    let (na, nb) = (a.ncols(), b.ncols());
    CMatrix::from_fn(a.nrows(), na * nb, |r, col| {
        let (i, j) = (col % na, col / na);
        a[(r, i)] * b[(r, j)]
    })
}

/// `F(γ₁, γ₂)`: `|E| × |B|²` products of harmonic gradients, both at `q = 0`.
pub fn product_gradients_matrix(
    g: &Graph,
    gamma1: &EdgeWeights,
    gamma2: &EdgeWeights,
) -> Result<CMatrix> {
    let grad = g.gradient();
    let q0 = NodeWeights::zeros(g);
    let du1 = grad.apply(&harmonic_basis(g, gamma1, &q0)?);
    let du2 = grad.apply(&harmonic_basis(g, gamma2, &q0)?);
    Ok(column_products(&du1, &du2))
}

/// `G(q₁, q₂)`: `|I| × |B|²` products of interior solutions at a shared `γ`.
pub fn product_solutions_matrix(
    g: &Graph,
    gamma: &EdgeWeights,
    q1: &NodeWeights,
    q2: &NodeWeights,
) -> Result<CMatrix> {
    let u1 = DirichletSolver::new(g, gamma, q1)?.interior_basis();
    let u2 = DirichletSolver::new(g, gamma, q2)?.interior_basis();
    Ok(column_products(&u1, &u2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::singular_values;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn harmonic_basis_examples() {
        let path = Graph::new(3, &[0, 1], &[(0, 2), (1, 2)]).unwrap();
        let u =
            harmonic_basis(&path, &EdgeWeights::ones(&path), &NodeWeights::zeros(&path)).unwrap();
        assert!((u[(2, 0)] - c(0.5)).norm() < 1e-15 && (u[(2, 1)] - c(0.5)).norm() < 1e-15);

        let k3 = Graph::new(3, &[0, 1, 2], &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let u = harmonic_basis(&k3, &EdgeWeights::ones(&k3), &NodeWeights::zeros(&k3)).unwrap();
        assert_eq!(u, CMatrix::identity(3, 3));

        let edge = Graph::new(2, &[0], &[(0, 1)]).unwrap();
        let u =
            harmonic_basis(&edge, &EdgeWeights::ones(&edge), &NodeWeights::zeros(&edge)).unwrap();
        assert!((u[(1, 0)] - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn k2_product_matrix() {
        let k2 = Graph::new(2, &[0, 1], &[(0, 1)]).unwrap();
        let gamma = EdgeWeights::new(vec![Complex64::new(3.0, 1.0)]);
        let f = product_gradients_matrix(&k2, &gamma, &gamma).unwrap();
        assert_eq!(
            f,
            CMatrix::from_row_slice(1, 4, &[c(1.0), c(-1.0), c(-1.0), c(1.0)])
        );
    }

    #[test]
    fn path_product_matrix_is_rank_one() {
        let path = Graph::new(3, &[0, 1], &[(0, 2), (1, 2)]).unwrap();
        let one = EdgeWeights::ones(&path);
        let f = product_gradients_matrix(&path, &one, &one).unwrap();
        assert!(f.iter().all(|z| (z.norm() - 0.25).abs() < 1e-15));
        let sv = singular_values(&f);
        assert!(sv[1] / sv[0] < 1e-15);
    }

    #[test]
    fn scalar_g_matrix() {
        let edge = Graph::new(2, &[0], &[(0, 1)]).unwrap();
        let (q1, q2) = (Complex64::new(0.5, 0.2), c(2.0));
        let gm = product_solutions_matrix(
            &edge,
            &EdgeWeights::ones(&edge),
            &NodeWeights::new(vec![q1]),
            &NodeWeights::new(vec![q2]),
        )
        .unwrap();
        let expected = c(1.0) / ((c(1.0) + q1) * (c(1.0) + q2));
        assert!((gm[(0, 0)] - expected).norm() < 1e-15);
    }

    #[test]
    fn star_g_matrix() {
        let star = Graph::new(4, &[0, 1, 2], &[(0, 3), (1, 3), (2, 3)]).unwrap();
        let q0 = NodeWeights::zeros(&star);
        let gm = product_solutions_matrix(&star, &EdgeWeights::ones(&star), &q0, &q0).unwrap();
        assert_eq!((gm.nrows(), gm.ncols()), (1, 9));
        assert!(gm.iter().all(|z| (z - c(1.0 / 9.0)).norm() < 1e-15));
    }
}

//! Jacobians of the DtN map.
//!
//! Column `e` of the conductivity Jacobian is `vec(∂Λ/∂γ_e)` with
//! `(∂Λ/∂γ_e)[i, j] = (∇u⁽ⁱ⁾)_e (∇u⁽ʲ⁾)_e`, and column `v` of the
//! Schrödinger Jacobian is `vec(∂Λ/∂q_v)` with entries `u_I⁽ⁱ⁾(v) u_I⁽ʲ⁾(v)`.
//! Both signs are positive: increasing a conductance or a leak increases
//! every boundary current response.

use crate::error::Result;
use crate::graph::Graph;
use crate::laplace::{DirichletSolver, EdgeWeights, NodeWeights};
use crate::linalg::CMatrix;

/// Row `k` of `rows` becomes column `k` of the output, expanded to the
/// vectorized outer product `vec(r rᵀ)`.
fn outer_product_columns(rows: &CMatrix) -> CMatrix {
    let nb = rows.ncols();
    CMatrix::from_fn(nb * nb, rows.nrows(), |idx, k| {
        let (i, j) = (idx % nb, idx / nb);
        rows[(k, i)] * rows[(k, j)]
    })
}

/// `|B|² × |E|` derivative of `Λ_{γ,0}` with respect to `γ`.
pub fn jacobian_conductivity(g: &Graph, gamma: &EdgeWeights) -> Result<CMatrix> {
    let u = DirichletSolver::new(g, gamma, &NodeWeights::zeros(g))?.harmonic_basis();
    Ok(outer_product_columns(&g.gradient().apply(&u)))
}

/// `|B|² × |I|` derivative of `Λ_{γ,q}` with respect to `q`.
pub fn jacobian_schrodinger(g: &Graph, gamma: &EdgeWeights, q: &NodeWeights) -> Result<CMatrix> {
    let u_i = DirichletSolver::new(g, gamma, q)?.interior_basis();
    Ok(outer_product_columns(&u_i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn k2_jacobian_is_assembly_pattern() {
        let k2 = Graph::new(2, &[0, 1], &[(0, 1)]).unwrap();
        let j = jacobian_conductivity(&k2, &EdgeWeights::from_real(&[4.0])).unwrap();
        let expected: Vec<f64> = vec![1.0, -1.0, -1.0, 1.0];
        assert!(j
            .iter()
            .zip(&expected)
            .all(|(z, &e)| (z - Complex64::new(e, 0.0)).norm() == 0.0));
    }

    #[test]
    fn scalar_schrodinger_derivative() {
        let edge = Graph::new(2, &[0], &[(0, 1)]).unwrap();
        let gamma = EdgeWeights::ones(&edge);
        let j = jacobian_schrodinger(&edge, &gamma, &NodeWeights::zeros(&edge)).unwrap();
        assert!((j[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let q = Complex64::new(1.0, 1.0);
        let j = jacobian_schrodinger(&edge, &gamma, &NodeWeights::new(vec![q])).unwrap();
        let expected = (Complex64::new(1.0, 0.0) + q).powi(-2);
        assert!((j[(0, 0)] - expected).norm() < 1e-15);
    }
}

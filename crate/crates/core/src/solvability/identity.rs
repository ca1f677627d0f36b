//! Residuals of the interior identities that tie boundary data differences
//! to products of solutions. Test utilities: both return `lhs − rhs`.

use num_complex::Complex64;

use crate::error::Result;
use crate::graph::Graph;
use crate::laplace::{DirichletSolver, EdgeWeights, NodeWeights};
use crate::linalg::CVector;

fn bilinear(u: &CVector, m: &crate::linalg::CMatrix, v: &CVector) -> Complex64 {
    (u.transpose() * m * v)[(0, 0)]
}

/// `u_Bᵀ(Λ_{γ₁} − Λ_{γ₂})v_B − (γ₁ − γ₂)ᵀ[(∇u) ⊙ (∇v)]`, with `u`
/// `γ₁`-harmonic and `v` `γ₂`-harmonic (both at `q = 0`).
pub fn interior_identity_residual_conductivity(
    g: &Graph,
    gamma1: &EdgeWeights,
    gamma2: &EdgeWeights,
    u_b: &CVector,
    v_b: &CVector,
) -> Result<Complex64> {
    let q0 = NodeWeights::zeros(g);
    let s1 = DirichletSolver::new(g, gamma1, &q0)?;
    let s2 = DirichletSolver::new(g, gamma2, &q0)?;
    let lhs = bilinear(u_b, &(s1.dtn().0 - s2.dtn().0), v_b);

    let grad = g.gradient();
    let du = grad.apply_vector(&s1.solve(u_b)?);
    let dv = grad.apply_vector(&s2.solve(v_b)?);
    let rhs: Complex64 = (0..g.n_edges())
        .map(|e| (gamma1.values()[e] - gamma2.values()[e]) * du[e] * dv[e])
        .sum();
    Ok(lhs - rhs)
}

/// `u_Bᵀ(Λ_{γ,q₁} − Λ_{γ,q₂})v_B − (q₁ − q₂)ᵀ(u_I ⊙ v_I)`, with `u`
/// `γ,q₁`-harmonic and `v` `γ,q₂`-harmonic.
pub fn interior_identity_residual_schrodinger(
    g: &Graph,
    gamma: &EdgeWeights,
    q1: &NodeWeights,
    q2: &NodeWeights,
    u_b: &CVector,
    v_b: &CVector,
) -> Result<Complex64> {
    let s1 = DirichletSolver::new(g, gamma, q1)?;
    let s2 = DirichletSolver::new(g, gamma, q2)?;
    let lhs = bilinear(u_b, &(s1.dtn().0 - s2.dtn().0), v_b);

    let u = s1.solve(u_b)?;
    let v = s2.solve(v_b)?;
    let rhs: Complex64 = g
        .interior()
        .iter()
        .enumerate()
        .map(|(k, &node)| (q1.values()[k] - q2.values()[k]) * u[node] * v[node])
        .sum();
    Ok(lhs - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn equal_parameters_give_zero() {
        let g = Graph::new(4, &[0, 3], &[(0, 1), (1, 2), (2, 3), (0, 2)]).unwrap();
        let gamma = EdgeWeights::from_real(&[1.0, 2.0, 3.0, 0.5]);
        let ub = CVector::from_vec(vec![c(1.0), c(-2.0)]);
        let r = interior_identity_residual_conductivity(&g, &gamma, &gamma, &ub, &ub).unwrap();
        assert!(r.norm() < 1e-14);
        let q = NodeWeights::from_real(&[0.3, 0.1]);
        let r = interior_identity_residual_schrodinger(&g, &gamma, &q, &q, &ub, &ub).unwrap();
        assert!(r.norm() < 1e-14);
    }

    #[test]
    fn path_conductivity_identity() {
        let path = Graph::new(3, &[0, 1], &[(0, 2), (1, 2)]).unwrap();
        let ub = CVector::from_vec(vec![Complex64::new(0.3, -1.2), c(2.1)]);
        let vb = CVector::from_vec(vec![c(-0.7), Complex64::new(0.4, 0.9)]);
        let r = interior_identity_residual_conductivity(
            &path,
            &EdgeWeights::from_real(&[1.0, 1.0]),
            &EdgeWeights::from_real(&[2.0, 1.0]),
            &ub,
            &vb,
        )
        .unwrap();
        assert!(r.norm() < 1e-12);
    }

    #[test]
    fn scalar_schrodinger_identity() {
        // lhs = (1 − 1) − (1 − 1/2) = −1/2, rhs = (0 − 1)·(1 · 1/2) = −1/2
        let edge = Graph::new(2, &[0], &[(0, 1)]).unwrap();
        let one = CVector::from_vec(vec![c(1.0)]);
        let r = interior_identity_residual_schrodinger(
            &edge,
            &EdgeWeights::ones(&edge),
            &NodeWeights::from_real(&[0.0]),
            &NodeWeights::from_real(&[1.0]),
            &one,
            &one,
        )
        .unwrap();
        assert!(r.norm() < 1e-15);
    }
}

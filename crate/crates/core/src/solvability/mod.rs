//! Recoverability machinery: product-of-solutions matrices, DtN Jacobians,
//! SVD rank tests and the counting prechecks.
//!
//! A problem is declared recoverable at a linearization point when the
//! relevant product matrix (equivalently the Jacobian) has numerical rank
//! equal to the number of unknowns: `|E|` for conductivities, `|I|` for
//! Schrödinger potentials.

mod identity;
mod jacobian;
mod product;
mod rank;
mod scan;

use serde::Serialize;

pub use identity::{
    interior_identity_residual_conductivity, interior_identity_residual_schrodinger,
};
pub use jacobian::{jacobian_conductivity, jacobian_schrodinger};
pub use product::{
    column_products, harmonic_basis, product_gradients_matrix, product_solutions_matrix,
};
pub use rank::{
    conductivity_data_count, counting_precheck_conductivity, counting_precheck_schrodinger,
    determinant_rank_oracle, numeric_rank, schrodinger_data_count, MINOR_TOL,
};
pub use scan::{sv_slice_scan, Axis, ScanProblem, SliceMap};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::laplace::{EdgeWeights, NodeWeights};
use crate::linalg::{singular_values, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Recoverable,
    NotRecoverable,
    PrecheckFail,
}

/// Outcome of one recoverability query. `sv_ratios` is empty when the
/// counting precheck failed, since no SVD is computed in that case.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvabilityReport {
    pub verdict: Verdict,
    pub numeric_rank: usize,
    pub required_rank: usize,
    pub sv_ratios: Vec<f64>,
    pub tolerance: f64,
}

impl SolvabilityReport {
    fn precheck_fail(required_rank: usize, tolerance: f64) -> Self {
        Self {
            verdict: Verdict::PrecheckFail,
            numeric_rank: 0,
            required_rank,
            sv_ratios: Vec::new(),
            tolerance,
        }
    }

    fn from_matrix(m: &CMatrix, required_rank: usize, tolerance: f64) -> Self {
        let sv = singular_values(m);
        let numeric_rank = rank::rank_from_singular_values(&sv, tolerance);
        let sv_ratios = match sv.first() {
            Some(&s1) if s1 > 0.0 => sv.iter().map(|s| s / s1).collect(),
            _ => vec![0.0; sv.len()],
        };
        Self {
            verdict: if numeric_rank >= required_rank {
                Verdict::Recoverable
            } else {
                Verdict::NotRecoverable
            },
            numeric_rank,
            required_rank,
            sv_ratios,
            tolerance,
        }
    }

    pub fn is_recoverable(&self) -> bool {
        self.verdict == Verdict::Recoverable
    }
}

fn check_tolerance(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance {delta} must lie in (0, 1)"
        )));
    }
    Ok(())
}

/// Linearized conductivity test: rank of `F(γ, γ)` against `|E|`.
pub fn conductivity_recoverable(
    g: &Graph,
    gamma_lin: &EdgeWeights,
    delta: f64,
) -> Result<SolvabilityReport> {
    check_tolerance(delta)?;
    if gamma_lin.len() != g.n_edges() {
        return Err(Error::LengthMismatch {
            what: "edge weights",
            expected: g.n_edges(),
            got: gamma_lin.len(),
        });
    }
    if let Some(edge) = gamma_lin
        .values()
        .iter()
        .position(|z| z.re <= 0.0 || z.re.is_nan())
    {
        return Err(Error::NotAdmissible { edge });
    }
    if !g.is_admissible_topology() {
        return Err(Error::DisconnectedGraph);
    }
    if !counting_precheck_conductivity(g) {
        return Ok(SolvabilityReport::precheck_fail(g.n_edges(), delta));
    }
    let f = product_gradients_matrix(g, gamma_lin, gamma_lin)?;
    Ok(SolvabilityReport::from_matrix(&f, g.n_edges(), delta))
}

/// Linearized Schrödinger test: rank of `G(q, q)` against `|I|`.
pub fn schrodinger_recoverable(
    g: &Graph,
    gamma: &EdgeWeights,
    q_lin: &NodeWeights,
    delta: f64,
) -> Result<SolvabilityReport> {
    check_tolerance(delta)?;
    if g.interior().is_empty() {
        return Err(Error::EmptyInterior);
    }
    if let Some(edge) = gamma
        .values()
        .iter()
        .position(|z| z.re <= 0.0 || z.re.is_nan())
    {
        return Err(Error::NotAdmissible { edge });
    }
    if !g.is_admissible_topology() {
        return Err(Error::DisconnectedGraph);
    }
    if !counting_precheck_schrodinger(g) {
        return Ok(SolvabilityReport::precheck_fail(g.interior().len(), delta));
    }
    let gm = product_solutions_matrix(g, gamma, q_lin, q_lin)?;
    Ok(SolvabilityReport::from_matrix(
        &gm,
        g.interior().len(),
        delta,
    ))
}

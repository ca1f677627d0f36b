//! Newton's method for recovering conductivities from `Λ_{γ,0}` or
//! Schrödinger potentials from `Λ_{γ,q}`.
//!
//! Each step solves `J δ = −(Λ(x_k) − Λ_target)` in the least-squares sense
//! and backtracks `t ∈ {1, s, s², …}` until the update stays feasible.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::laplace::{dtn_map, wellposedness_bound, DtnMap, EdgeWeights, NodeWeights};
use crate::linalg::{frobenius, pinv_solve, singular_values, vectorize, CMatrix};
use crate::solvability::{jacobian_conductivity, jacobian_schrodinger};
use crate::DEFAULT_TOL;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub max_iters: usize,
    /// Stop once `‖Λ(x) − target‖_F ≤ residual_tol · ‖target‖_F`.
    pub residual_tol: f64,
    pub step_shrink: f64,
    pub min_step: f64,
    pub feasibility_margin: f64,
    /// Relative singular-value cutoff for the Jacobian rank test and the
    /// pseudo-inverse.
    pub rank_tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_iters: 50,
            residual_tol: 1e-10,
            step_shrink: 0.5,
            min_step: 1e-6,
            feasibility_margin: 1e-8,
            rank_tol: DEFAULT_TOL,
        }
    }
}

impl NewtonOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = self.max_iters > 0
            && self.residual_tol > 0.0
            && self.step_shrink > 0.0
            && self.step_shrink < 1.0
            && self.min_step > 0.0
            && self.min_step <= 1.0
            && self.feasibility_margin > 0.0
            && self.rank_tol > 0.0
            && self.rank_tol < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "invalid Newton options {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NewtonVerdict {
    Converged,
    MaxIters,
    RankDeficient,
    InfeasibleStep,
}

/// One row per evaluated iterate. `step` is the accepted step length taken
/// from this iterate, absent on the final row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub residual: f64,
    pub relative_residual: f64,
    /// Smallest real part among the iterate's entries.
    pub min_re: f64,
    pub step: Option<f64>,
    pub min_sv_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewtonTrace {
    pub records: Vec<IterationRecord>,
    pub verdict: NewtonVerdict,
}

impl NewtonTrace {
    pub fn converged(&self) -> bool {
        self.verdict == NewtonVerdict::Converged
    }

    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.iteration)
    }
}

/// Problem-specific pieces of the Newton loop.
trait Unknown {
    fn len(&self) -> usize;
    fn forward(&self, x: &[Complex64]) -> Result<DtnMap>;
    fn jacobian(&self, x: &[Complex64]) -> Result<CMatrix>;
    fn feasible(&self, x: &[Complex64]) -> bool;
}

struct Conductivity<'a> {
    g: &'a Graph,
    margin: f64,
}

impl Unknown for Conductivity<'_> {
    fn len(&self) -> usize {
        self.g.n_edges()
    }

    fn forward(&self, x: &[Complex64]) -> Result<DtnMap> {
        dtn_map(
            self.g,
            &EdgeWeights::new(x.to_vec()),
            &NodeWeights::zeros(self.g),
        )
    }

    fn jacobian(&self, x: &[Complex64]) -> Result<CMatrix> {
        jacobian_conductivity(self.g, &EdgeWeights::new(x.to_vec()))
    }

    fn feasible(&self, x: &[Complex64]) -> bool {
        x.iter().all(|z| z.re >= self.margin)
    }
}

struct Schrodinger<'a> {
    g: &'a Graph,
    gamma: &'a EdgeWeights,
    floor: f64,
}

impl Unknown for Schrodinger<'_> {
    fn len(&self) -> usize {
        self.g.interior().len()
    }

    fn forward(&self, x: &[Complex64]) -> Result<DtnMap> {
        dtn_map(self.g, self.gamma, &NodeWeights::new(x.to_vec()))
    }

    fn jacobian(&self, x: &[Complex64]) -> Result<CMatrix> {
        jacobian_schrodinger(self.g, self.gamma, &NodeWeights::new(x.to_vec()))
    }

    fn feasible(&self, x: &[Complex64]) -> bool {
        x.iter().all(|z| z.re > self.floor)
    }
}

fn run(
    problem: &dyn Unknown,
    target: &DtnMap,
    x0: Vec<Complex64>,
    opts: &NewtonOptions,
) -> Result<(Vec<Complex64>, NewtonTrace)> {
    opts.validate()?;
    if x0.len() != problem.len() {
        return Err(Error::LengthMismatch {
            what: "initial guess",
            expected: problem.len(),
            got: x0.len(),
        });
    }
    let target_norm = frobenius(target.matrix());
    let scale = if target_norm > 0.0 { target_norm } else { 1.0 };

    let mut x = x0;
    let mut records = Vec::new();
    for iteration in 0..=opts.max_iters {
        let current = problem.forward(&x)?;
        if current.size() != target.size() {
            return Err(Error::LengthMismatch {
                what: "target DtN map",
                expected: current.size(),
                got: target.size(),
            });
        }
        let mismatch = current.matrix() - target.matrix();
        let residual = frobenius(&mismatch);
        let mut record = IterationRecord {
            iteration,
            residual,
            relative_residual: residual / scale,
            min_re: x.iter().map(|z| z.re).fold(f64::INFINITY, f64::min),
            step: None,
            min_sv_ratio: None,
        };

        if residual <= opts.residual_tol * scale {
            records.push(record);
            return Ok((
                x,
                NewtonTrace {
                    records,
                    verdict: NewtonVerdict::Converged,
                },
            ));
        }
        if iteration == opts.max_iters {
            records.push(record);
            return Ok((
                x,
                NewtonTrace {
                    records,
                    verdict: NewtonVerdict::MaxIters,
                },
            ));
        }

        let jac = problem.jacobian(&x)?;
        let sv = singular_values(&jac);
        let ratio = match (sv.first(), sv.get(problem.len().saturating_sub(1))) {
            (Some(&s1), Some(&sr)) if s1 > 0.0 => sr / s1,
            _ => 0.0,
        };
        record.min_sv_ratio = Some(ratio);
        if ratio <= opts.rank_tol || ratio.is_nan() {
            records.push(record);
            return Ok((
                x,
                NewtonTrace {
                    records,
                    verdict: NewtonVerdict::RankDeficient,
                },
            ));
        }

        let rhs = -vectorize(&mismatch);
        let delta = pinv_solve(&jac, &rhs, opts.rank_tol);

        let mut t = 1.0;
        let next = loop {
            let candidate: Vec<Complex64> =
                x.iter().zip(delta.iter()).map(|(a, d)| a + d * t).collect();
            if problem.feasible(&candidate) {
                break Some(candidate);
            }
            t *= opts.step_shrink;
            if t < opts.min_step {
                break None;
            }
        };
        record.step = next.as_ref().map(|_| t);
        records.push(record);
        match next {
            Some(candidate) => x = candidate,
            None => {
                return Ok((
                    x,
                    NewtonTrace {
                        records,
                        verdict: NewtonVerdict::InfeasibleStep,
                    },
                ));
            }
        }
    }
    unreachable!("loop returns on its last iteration")
}

/// Recovers `γ` from `Λ_{γ,0}`, keeping `Re γ ≥ feasibility_margin`.
pub fn newton_recover_conductivity(
    g: &Graph,
    target: &DtnMap,
    gamma0: &EdgeWeights,
    opts: &NewtonOptions,
) -> Result<(EdgeWeights, NewtonTrace)> {
    if let Some(edge) = gamma0
        .values()
        .iter()
        .position(|z| z.re <= 0.0 || z.re.is_nan())
    {
        return Err(Error::NotAdmissible { edge });
    }
    if !g.is_admissible_topology() {
        return Err(Error::DisconnectedGraph);
    }
    let problem = Conductivity {
        g,
        margin: opts.feasibility_margin,
    };
    let (x, trace) = run(&problem, target, gamma0.values().to_vec(), opts)?;
    Ok((EdgeWeights::new(x), trace))
}

/// Recovers `q` from `Λ_{γ,q}` at known `γ`. Iterates keep
/// `Re q > ζ_γ + feasibility_margin` when the bound `ζ_γ` is available
/// (admissible `γ`, connected graph and interior); otherwise only
/// well-posedness of each evaluated iterate is required.
pub fn newton_recover_schrodinger(
    g: &Graph,
    gamma: &EdgeWeights,
    target: &DtnMap,
    q0: &NodeWeights,
    opts: &NewtonOptions,
) -> Result<(NodeWeights, NewtonTrace)> {
    if g.interior().is_empty() {
        return Err(Error::EmptyInterior);
    }
    let floor = match wellposedness_bound(g, gamma) {
        Ok(zeta) => zeta + opts.feasibility_margin,
        Err(Error::NotAdmissible { .. } | Error::DisconnectedGraph) => f64::NEG_INFINITY,
        Err(e) => return Err(e),
    };
    let problem = Schrodinger { g, gamma, floor };
    let (x, trace) = run(&problem, target, q0.values().to_vec(), opts)?;
    Ok((NodeWeights::new(x), trace))
}

/// Forward data for round-trip experiments.
pub fn synthesize_dtn(g: &Graph, gamma: &EdgeWeights, q: &NodeWeights) -> Result<DtnMap> {
    dtn_map(g, gamma, q)
}

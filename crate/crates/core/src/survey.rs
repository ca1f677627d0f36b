//! Erdős–Rényi recoverability surveys.
//!
//! Every trial owns an RNG stream derived from `(seed, cell, trial)`, so a
//! survey produces the same grid under any thread count or schedule.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::laplace::{is_wellposed, EdgeWeights, NodeWeights};
use crate::solvability::{
    conductivity_data_count, conductivity_recoverable, schrodinger_data_count,
    schrodinger_recoverable, Verdict,
};
use crate::DEFAULT_TOL;

/// A reproducible random stream: ChaCha8 keyed by `seed`, on stream `stream`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Stream for trial `trial` of grid cell `cell`.
    pub fn for_trial(seed: u64, cell: usize, trial: usize) -> Self {
        Self::new(seed, ((cell as u64) << 32) | trial as u64)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Edge list on `0..n` without a boundary assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

/// `k`-th pair of the lexicographic enumeration of `{(i, j) : i < j < n}`.
fn pair_from_index(n: usize, mut k: usize) -> (usize, usize) {
    for i in 0..n {
        let row = n - 1 - i;
        if k < row {
            return (i, i + 1 + k);
        }
        k -= row;
    }
    unreachable!("pair index out of range")
}

fn complete_edge_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Uniform random subset of `m` edges out of the `n(n−1)/2` possible ones,
/// listed in lexicographic order.
pub fn erdos_renyi_fixed_edges<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    rng: &mut R,
) -> Result<Candidate> {
    let total = complete_edge_count(n);
    if m > total {
        return Err(Error::TooManyEdges { n, edges: m });
    }
    let mut picked = index::sample(rng, total, m).into_vec();
    picked.sort_unstable();
    Ok(Candidate {
        n,
        edges: picked.into_iter().map(|k| pair_from_index(n, k)).collect(),
    })
}

/// Each possible edge present independently with probability `p`.
pub fn erdos_renyi_probability<R: Rng + ?Sized>(
    n: usize,
    p: f64,
    rng: &mut R,
) -> Result<Candidate> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Ok(Candidate { n, edges })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphModel {
    FixedEdges { n: usize, edges: usize },
    EdgeProbability { n: usize, p: f64 },
}

impl GraphModel {
    fn n(&self) -> usize {
        match *self {
            GraphModel::FixedEdges { n, .. } | GraphModel::EdgeProbability { n, .. } => n,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Candidate> {
        match *self {
            GraphModel::FixedEdges { n, edges } => erdos_renyi_fixed_edges(n, edges, rng),
            GraphModel::EdgeProbability { n, p } => erdos_renyi_probability(n, p, rng),
        }
    }
}

/// Whether a drawn graph enters a survey: connected as a whole and on its
/// interior, with a well-posed Dirichlet problem at `γ = 1`, `q = 0`.
/// Returns `(topology ok, well-posed)`.
pub fn admissibility(g: &Graph) -> (bool, bool) {
    if !g.is_admissible_topology() {
        return (false, false);
    }
    let wellposed = is_wellposed(
        g,
        &EdgeWeights::ones(g),
        &NodeWeights::zeros(g),
        DEFAULT_TOL,
    );
    (true, wellposed)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Draw {
    Accepted {
        graph: Graph,
        attempts: usize,
    },
    Rejected {
        attempts: usize,
        wellposedness_failures: usize,
    },
}

/// Draws candidates from `model`, assigning a uniform random boundary of
/// size `boundary_size` after the edges, until one is admissible or
/// `max_attempts` are spent.
pub fn draw_admissible<R: Rng + ?Sized>(
    model: &GraphModel,
    boundary_size: usize,
    max_attempts: usize,
    rng: &mut R,
) -> Result<Draw> {
    let n = model.n();
    if boundary_size == 0 || boundary_size > n {
        return Err(Error::InvalidParameter(format!(
            "boundary size {boundary_size} must lie in 1..={n}"
        )));
    }
    let mut wellposedness_failures = 0;
    for attempt in 1..=max_attempts {
        let candidate = model.sample(rng)?;
        let boundary = index::sample(rng, n, boundary_size).into_vec();
        let graph = Graph::new(n, &boundary, &candidate.edges)?;
        match admissibility(&graph) {
            (true, true) => {
                return Ok(Draw::Accepted {
                    graph,
                    attempts: attempt,
                })
            }
            (true, false) => wellposedness_failures += 1,
            _ => {}
        }
    }
    Ok(Draw::Rejected {
        attempts: max_attempts,
        wellposedness_failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurveyConfig {
    pub trials_per_cell: usize,
    pub max_attempts: usize,
    pub delta: f64,
    pub seed: u64,
}

impl Default for SurveyConfig {
    fn default() -> Self {
        Self {
            trials_per_cell: 200,
            max_attempts: 20,
            delta: DEFAULT_TOL,
            seed: 0,
        }
    }
}

impl SurveyConfig {
    fn validate(&self) -> Result<()> {
        if self.trials_per_cell == 0 || self.max_attempts == 0 {
            return Err(Error::InvalidParameter(
                "trials per cell and attempts per trial must be positive".into(),
            ));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance {} must lie in (0, 1)",
                self.delta
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    pub row: f64,
    pub col: f64,
    /// Graph draws attempted (zero for counting short-circuits).
    pub trials: usize,
    pub admissible: usize,
    pub recoverable: usize,
    /// Rank tests that reached the SVD.
    pub rank_tests: usize,
    pub wellposedness_failures: usize,
    /// The counting precheck alone decided this cell.
    pub short_circuit: bool,
}

impl CellStats {
    /// `recoverable / admissible`; exactly 0 for short-circuited cells;
    /// `None` when no admissible graph was drawn.
    pub fn probability(&self) -> Option<f64> {
        if self.short_circuit {
            Some(0.0)
        } else if self.admissible > 0 {
            Some(self.recoverable as f64 / self.admissible as f64)
        } else {
            None
        }
    }
}

/// Survey results: rows follow `row_values`, columns `col_values`, cells in
/// row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityGrid {
    pub problem: &'static str,
    pub row_label: &'static str,
    pub col_label: &'static str,
    pub row_values: Vec<f64>,
    pub col_values: Vec<f64>,
    pub cells: Vec<CellStats>,
    pub config: SurveyConfig,
    /// Model parameter held fixed, as `(name, value)`.
    pub fixed: (&'static str, f64),
}

impl ProbabilityGrid {
    pub fn cell(&self, row: f64, col: f64) -> Option<&CellStats> {
        self.cells.iter().find(|c| c.row == row && c.col == col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Problem {
    Conductivity,
    Schrodinger,
}

#[derive(Debug, Clone, Copy, Default)]
struct TrialOutcome {
    admissible: bool,
    recoverable: bool,
    rank_test: bool,
    wellposedness_failures: usize,
}

fn run_trial(
    problem: Problem,
    model: &GraphModel,
    boundary_size: usize,
    cfg: &SurveyConfig,
    stream: RngStream,
) -> Result<TrialOutcome> {
    let mut rng = stream.rng();
    let graph = match draw_admissible(model, boundary_size, cfg.max_attempts, &mut rng)? {
        Draw::Accepted { graph, .. } => graph,
        Draw::Rejected {
            wellposedness_failures,
            ..
        } => {
            return Ok(TrialOutcome {
                wellposedness_failures,
                ..Default::default()
            });
        }
    };
    let gamma = EdgeWeights::ones(&graph);
    let report = match problem {
        Problem::Conductivity => conductivity_recoverable(&graph, &gamma, cfg.delta),
        Problem::Schrodinger => {
            schrodinger_recoverable(&graph, &gamma, &NodeWeights::zeros(&graph), cfg.delta)
        }
    };
    Ok(match report {
        Ok(r) => TrialOutcome {
            admissible: true,
            recoverable: r.is_recoverable(),
            rank_test: r.verdict != Verdict::PrecheckFail,
            wellposedness_failures: 0,
        },
        // admissible graphs at γ = 1, q = 0 always pass the solver; anything
        // else is treated as a rejected draw
        Err(_) => TrialOutcome::default(),
    })
}

struct CellSpec {
    row: f64,
    col: f64,
    model: Option<GraphModel>,
    boundary_size: usize,
    short_circuit: bool,
}

fn run_grid(problem: Problem, cells: Vec<CellSpec>, cfg: &SurveyConfig) -> Result<Vec<CellStats>> {
    let jobs: Vec<(usize, usize)> = cells
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.short_circuit && c.model.is_some())
        .flat_map(|(ci, _)| (0..cfg.trials_per_cell).map(move |t| (ci, t)))
        .collect();
    let outcomes: Vec<TrialOutcome> = jobs
        .par_iter()
        .map(|&(ci, t)| {
            let spec = &cells[ci];
            let model = spec.model.as_ref().expect("filtered");
            run_trial(
                problem,
                model,
                spec.boundary_size,
                cfg,
                RngStream::for_trial(cfg.seed, ci, t),
            )
        })
        .collect::<Result<_>>()?;

    let mut stats: Vec<CellStats> = cells
        .iter()
        .map(|c| CellStats {
            row: c.row,
            col: c.col,
            trials: if c.short_circuit {
                0
            } else {
                cfg.trials_per_cell
            },
            admissible: 0,
            recoverable: 0,
            rank_tests: 0,
            wellposedness_failures: 0,
            short_circuit: c.short_circuit,
        })
        .collect();
    for (&(ci, _), o) in jobs.iter().zip(&outcomes) {
        let s = &mut stats[ci];
        s.admissible += o.admissible as usize;
        s.recoverable += o.recoverable as usize;
        s.rank_tests += o.rank_test as usize;
        s.wellposedness_failures += o.wellposedness_failures;
    }
    Ok(stats)
}

/// Conductivity recoverability over `(|B|, |I|)` at a fixed edge count,
/// using the fixed-edge-count model with `n = |B| + |I|`. Rows are `|B|`,
/// columns `|I|`.
pub fn conductivity_survey(
    edges: usize,
    interior_sizes: &[usize],
    boundary_sizes: &[usize],
    cfg: &SurveyConfig,
) -> Result<ProbabilityGrid> {
    cfg.validate()?;
    let mut cells = Vec::new();
    for &b in boundary_sizes {
        if b == 0 {
            return Err(Error::InvalidParameter(
                "boundary sizes must be positive".into(),
            ));
        }
        for &i in interior_sizes {
            let n = b + i;
            let short_circuit = conductivity_data_count(b) < edges;
            let model =
                (edges <= complete_edge_count(n)).then_some(GraphModel::FixedEdges { n, edges });
            cells.push(CellSpec {
                row: b as f64,
                col: i as f64,
                model,
                boundary_size: b,
                short_circuit,
            });
        }
    }
    let stats = run_grid(Problem::Conductivity, cells, cfg)?;
    Ok(ProbabilityGrid {
        problem: "conductivity",
        row_label: "boundary",
        col_label: "interior",
        row_values: boundary_sizes.iter().map(|&b| b as f64).collect(),
        col_values: interior_sizes.iter().map(|&i| i as f64).collect(),
        cells: stats,
        config: *cfg,
        fixed: ("edges", edges as f64),
    })
}

/// Schrödinger recoverability over `(|B|, p)` at a fixed interior size,
/// using the edge-probability model with `n = |B| + |I|`. Rows are `|B|`,
/// columns `p`.
pub fn schrodinger_survey(
    interior: usize,
    probabilities: &[f64],
    boundary_sizes: &[usize],
    cfg: &SurveyConfig,
) -> Result<ProbabilityGrid> {
    cfg.validate()?;
    if interior == 0 {
        return Err(Error::EmptyInterior);
    }
    let mut cells = Vec::new();
    for &b in boundary_sizes {
        if b == 0 {
            return Err(Error::InvalidParameter(
                "boundary sizes must be positive".into(),
            ));
        }
        for &p in probabilities {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "edge probability {p} outside [0, 1]"
                )));
            }
            cells.push(CellSpec {
                row: b as f64,
                col: p,
                model: Some(GraphModel::EdgeProbability { n: b + interior, p }),
                boundary_size: b,
                short_circuit: schrodinger_data_count(b) < interior,
            });
        }
    }
    let stats = run_grid(Problem::Schrodinger, cells, cfg)?;
    Ok(ProbabilityGrid {
        problem: "schrodinger",
        row_label: "boundary",
        col_label: "p",
        row_values: boundary_sizes.iter().map(|&b| b as f64).collect(),
        col_values: probabilities.to_vec(),
        cells: stats,
        config: *cfg,
        fixed: ("interior", interior as f64),
    })
}

//! Command-line front end. Exit codes: 0 success or recoverable, 2 negative
//! verdict, 1 error.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::Serialize;

use crate::graph::Graph;
use crate::io::{self, DtnFile};
use crate::laplace::{dtn_map, EdgeWeights, NodeWeights};
use crate::newton::{newton_recover_conductivity, newton_recover_schrodinger, NewtonOptions};
use crate::solvability::{
    conductivity_recoverable, schrodinger_recoverable, sv_slice_scan, Axis, ScanProblem,
    SolvabilityReport,
};
use crate::survey::{conductivity_survey, schrodinger_survey, RngStream, SurveyConfig};
use crate::DEFAULT_TOL;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "graphinv",
    version,
    about = "Recoverability tests and Newton reconstruction for inverse problems on graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Conductivity,
    Schrodinger,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Linearized recoverability test (exit 0 recoverable, 2 not).
    Check(CheckArgs),
    /// Dirichlet-to-Neumann map of a weighted graph.
    Dtn(DtnArgs),
    /// Slice scan of the rescaled smallest relevant singular value.
    Scan(ScanArgs),
    /// Erdős–Rényi recoverability survey.
    Survey(SurveyArgs),
    /// Newton reconstruction from DtN data.
    Recover(RecoverArgs),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value = "conductivity")]
    pub problem: ProblemKind,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Conductivity to linearize about (default: all ones).
    #[arg(long)]
    pub gamma: Option<PathBuf>,
    /// Potential to linearize about (default: zero).
    #[arg(long)]
    pub q: Option<PathBuf>,
    /// Draw the linearization point at random (γ in [0.5, 1.5], q in [0, 1]).
    #[arg(long)]
    pub random_linearization: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DtnArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Edge conductivities (default: all ones).
    #[arg(long)]
    pub gamma: Option<PathBuf>,
    /// Interior potential (default: zero).
    #[arg(long)]
    pub q: Option<PathBuf>,
    /// Relative singular-value floor for the interior operator.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value = "conductivity")]
    pub problem: ProblemKind,
    #[arg(long)]
    pub dir1: PathBuf,
    #[arg(long)]
    pub dir2: PathBuf,
    /// Base points (default: all ones for conductivity, zero for potentials).
    #[arg(long)]
    pub base1: Option<PathBuf>,
    #[arg(long)]
    pub base2: Option<PathBuf>,
    /// Fixed conductivity for Schrödinger scans (default: all ones).
    #[arg(long)]
    pub gamma: Option<PathBuf>,
    /// `x0:x1:nx,y0:y1:ny`
    #[arg(long, default_value = "0:4:10,0:4:10")]
    pub grid: String,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SurveyArgs {
    #[arg(long, value_enum, default_value = "conductivity")]
    pub problem: ProblemKind,
    /// Fixed edge count (conductivity).
    #[arg(long, default_value_t = 21)]
    pub edges: usize,
    /// Interior sizes: a range `a..b` (inclusive) for conductivity, a single
    /// count for Schrödinger. Defaults: `0..14` and `21`.
    #[arg(long)]
    pub interior: Option<String>,
    /// Boundary sizes, inclusive range `a..b` or a single count.
    /// Defaults: `2..12` (conductivity), `2..20` (Schrödinger).
    #[arg(long)]
    pub boundary: Option<String>,
    /// Edge probabilities `p0:p1:n` (Schrödinger).
    #[arg(long, default_value = "0.05:0.95:19")]
    pub probabilities: String,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 20)]
    pub max_attempts: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value = "conductivity")]
    pub problem: ProblemKind,
    /// Target DtN file.
    #[arg(long)]
    pub target: PathBuf,
    /// Initial guess (default: all ones for γ, zero for q).
    #[arg(long)]
    pub initial: Option<PathBuf>,
    /// Known conductivity for Schrödinger recovery (default: all ones).
    #[arg(long)]
    pub gamma: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub residual_tol: f64,
    #[arg(long, default_value_t = 0.5)]
    pub step_shrink: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub min_step: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub feasibility_margin: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Recovered weights (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-iteration trace CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_graph(path: &Path) -> Result<Graph> {
    io::parse_graph(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_edge_weights(path: &Path, g: &Graph) -> Result<EdgeWeights> {
    let w =
        io::parse_edge_weights(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    if w.len() != g.n_edges() {
        bail!(
            "{}: values: expected {} entries (one per edge), got {}",
            path.display(),
            g.n_edges(),
            w.len()
        );
    }
    Ok(w)
}

fn load_node_weights(path: &Path, g: &Graph) -> Result<NodeWeights> {
    let w =
        io::parse_node_weights(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    if w.len() != g.interior().len() {
        bail!(
            "{}: values: expected {} entries (one per interior vertex), got {}",
            path.display(),
            g.interior().len(),
            w.len()
        );
    }
    Ok(w)
}

fn gamma_or_ones(path: Option<&PathBuf>, g: &Graph) -> Result<EdgeWeights> {
    path.map_or_else(|| Ok(EdgeWeights::ones(g)), |p| load_edge_weights(p, g))
}

fn q_or_zeros(path: Option<&PathBuf>, g: &Graph) -> Result<NodeWeights> {
    path.map_or_else(|| Ok(NodeWeights::zeros(g)), |p| load_node_weights(p, g))
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .context("building thread pool")?;
    Ok(pool.install(f))
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol < 1.0) {
        bail!("--tol must lie in (0, 1), got {tol}");
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Check(a) => cmd_check(&a),
        Command::Dtn(a) => cmd_dtn(&a),
        Command::Scan(a) => cmd_scan(&a),
        Command::Survey(a) => cmd_survey(&a),
        Command::Recover(a) => cmd_recover(&a),
    }
}

#[derive(Serialize)]
struct CheckOutput<'a> {
    problem: ProblemKind,
    graph: String,
    n_boundary: usize,
    n_interior: usize,
    n_edges: usize,
    linearization: &'a str,
    seed: Option<u64>,
    report: &'a SolvabilityReport,
}

pub fn cmd_check(a: &CheckArgs) -> Result<i32> {
    check_tol(a.tol)?;
    let g = load_graph(&a.graph)?;
    let mut rng = RngStream::new(a.seed, 0).rng();
    let (linearization, seed) = if a.random_linearization {
        ("random", Some(a.seed))
    } else if a.gamma.is_some() || a.q.is_some() {
        ("file", None)
    } else {
        ("gamma=1,q=0", None)
    };
    let gamma = if a.random_linearization {
        EdgeWeights::from_real(
            &(0..g.n_edges())
                .map(|_| rng.random_range(0.5..1.5))
                .collect::<Vec<_>>(),
        )
    } else {
        gamma_or_ones(a.gamma.as_ref(), &g)?
    };
    let report = match a.problem {
        ProblemKind::Conductivity => conductivity_recoverable(&g, &gamma, a.tol)?,
        ProblemKind::Schrodinger => {
            let q = if a.random_linearization {
                NodeWeights::from_real(
                    &(0..g.interior().len())
                        .map(|_| rng.random_range(0.0..1.0))
                        .collect::<Vec<_>>(),
                )
            } else {
                q_or_zeros(a.q.as_ref(), &g)?
            };
            schrodinger_recoverable(&g, &gamma, &q, a.tol)?
        }
    };
    let out = CheckOutput {
        problem: a.problem,
        graph: a.graph.display().to_string(),
        n_boundary: g.boundary().len(),
        n_interior: g.interior().len(),
        n_edges: g.n_edges(),
        linearization,
        seed,
        report: &report,
    };
    let mut text = serde_json::to_string_pretty(&out)?;
    text.push('\n');
    emit(a.out.as_ref(), &text)?;
    Ok(if report.is_recoverable() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

pub fn cmd_dtn(a: &DtnArgs) -> Result<i32> {
    check_tol(a.tol)?;
    let g = load_graph(&a.graph)?;
    let gamma = gamma_or_ones(a.gamma.as_ref(), &g)?;
    let q = q_or_zeros(a.q.as_ref(), &g)?;
    if !crate::laplace::is_wellposed(&g, &gamma, &q, a.tol) {
        return Err(crate::Error::SingularInteriorOperator)
            .context("Dirichlet problem is ill-posed");
    }
    let dtn = dtn_map(&g, &gamma, &q)?;
    emit(
        a.out.as_ref(),
        &io::write_dtn(&DtnFile::new(&g, &dtn, Some(a.tol))),
    )?;
    Ok(EXIT_OK)
}

fn parse_axis(text: &str) -> Result<Axis> {
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, n] = parts[..] else {
        bail!("axis `{text}` must look like start:end:count");
    };
    let parse_f = |s: &str| {
        s.trim()
            .parse::<f64>()
            .with_context(|| format!("bad number `{s}` in `{text}`"))
    };
    let count = n
        .trim()
        .parse::<usize>()
        .with_context(|| format!("bad count `{n}` in `{text}`"))?;
    Ok(Axis::new(parse_f(a)?, parse_f(b)?, count)?)
}

fn parse_grid(text: &str) -> Result<(Axis, Axis)> {
    let (x, y) = text
        .split_once(',')
        .ok_or_else(|| anyhow!("--grid `{text}` must look like x0:x1:nx,y0:y1:ny"))?;
    Ok((parse_axis(x)?, parse_axis(y)?))
}

/// `a..b` (inclusive) or a single count.
fn parse_range(text: &str) -> Result<Vec<usize>> {
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .with_context(|| format!("bad count `{s}` in `{text}`"))
    };
    match text.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
            if a > b {
                bail!("empty range `{text}`");
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![parse(text)?]),
    }
}

pub fn cmd_scan(a: &ScanArgs) -> Result<i32> {
    let g = load_graph(&a.graph)?;
    let (x, y) = parse_grid(&a.grid)?;
    let problem = match a.problem {
        ProblemKind::Conductivity => ScanProblem::Conductivity {
            base1: gamma_or_ones(a.base1.as_ref(), &g)?,
            base2: gamma_or_ones(a.base2.as_ref(), &g)?,
            dir1: load_edge_weights(&a.dir1, &g)?,
            dir2: load_edge_weights(&a.dir2, &g)?,
        },
        ProblemKind::Schrodinger => ScanProblem::Schrodinger {
            gamma: gamma_or_ones(a.gamma.as_ref(), &g)?,
            base1: q_or_zeros(a.base1.as_ref(), &g)?,
            base2: q_or_zeros(a.base2.as_ref(), &g)?,
            dir1: load_node_weights(&a.dir1, &g)?,
            dir2: load_node_weights(&a.dir2, &g)?,
        },
    };
    let map = with_threads(a.threads, || sv_slice_scan(&g, &problem, x, y))??;
    let mut text = format!(
        "# problem={:?}\n# value=log10(sigma_r/sigma_1)\n# wellposedness_tol={DEFAULT_TOL}\n",
        a.problem
    )
    .to_lowercase();
    text.push_str(&io::slice_map_csv(&map));
    emit(a.out.as_ref(), &text)?;
    Ok(EXIT_OK)
}

pub fn cmd_survey(a: &SurveyArgs) -> Result<i32> {
    if a.trials == 0 {
        bail!("--trials must be at least 1");
    }
    check_tol(a.tol)?;
    let cfg = SurveyConfig {
        trials_per_cell: a.trials,
        max_attempts: a.max_attempts,
        delta: a.tol,
        seed: a.seed,
    };
    let grid = match a.problem {
        ProblemKind::Conductivity => {
            let interior = parse_range(a.interior.as_deref().unwrap_or("0..14"))?;
            let boundary = parse_range(a.boundary.as_deref().unwrap_or("2..12"))?;
            with_threads(a.threads, || {
                conductivity_survey(a.edges, &interior, &boundary, &cfg)
            })??
        }
        ProblemKind::Schrodinger => {
            let interior = parse_range(a.interior.as_deref().unwrap_or("21"))?;
            let [interior] = interior[..] else {
                bail!("--interior must be a single count for the Schrödinger survey");
            };
            let boundary = parse_range(a.boundary.as_deref().unwrap_or("2..20"))?;
            let axis = parse_axis(&a.probabilities)?;
            with_threads(a.threads, || {
                schrodinger_survey(interior, &axis.values(), &boundary, &cfg)
            })??
        }
    };
    emit(a.out.as_ref(), &io::probability_grid_csv(&grid, &[]))?;
    Ok(EXIT_OK)
}

pub fn cmd_recover(a: &RecoverArgs) -> Result<i32> {
    let g = load_graph(&a.graph)?;
    let target_file =
        io::parse_dtn(&read(&a.target)?).with_context(|| format!("in {}", a.target.display()))?;
    let target = io::dtn_for_graph(&target_file, &g)?;
    let opts = NewtonOptions {
        max_iters: a.max_iters,
        residual_tol: a.residual_tol,
        step_shrink: a.step_shrink,
        min_step: a.min_step,
        feasibility_margin: a.feasibility_margin,
        rank_tol: a.tol,
    };
    let (weights, trace) = match a.problem {
        ProblemKind::Conductivity => {
            let gamma0 = gamma_or_ones(a.initial.as_ref(), &g)?;
            let (gamma, trace) = newton_recover_conductivity(&g, &target, &gamma0, &opts)?;
            (io::write_edge_weights(&gamma), trace)
        }
        ProblemKind::Schrodinger => {
            let gamma = gamma_or_ones(a.gamma.as_ref(), &g)?;
            let q0 = q_or_zeros(a.initial.as_ref(), &g)?;
            let (q, trace) = newton_recover_schrodinger(&g, &gamma, &target, &q0, &opts)?;
            (io::write_node_weights(&q), trace)
        }
    };
    if let Some(p) = &a.trace {
        fs::write(p, io::trace_csv(&trace)).with_context(|| format!("writing {}", p.display()))?;
    }
    emit(a.out.as_ref(), &weights)?;
    if trace.converged() {
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "newton: {:?} after {} iterations",
            trace.verdict,
            trace.iterations()
        );
        Ok(EXIT_NEGATIVE)
    }
}

/// Parses `std::env::args`, runs, and maps errors to exit code 1.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

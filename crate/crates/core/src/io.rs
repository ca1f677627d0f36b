//! JSON and CSV interchange formats.
//!
//! Complex numbers are `[re, im]` pairs everywhere. Graphs are
//! `{"n": .., "boundary": [..], "edges": [[a, b], ..]}` with edge order
//! defining edge indices; weights are `{"values": [[re, im], ..]}` in edge
//! (conductivity) or ascending interior-id (potential) order.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result as CoreResult;
use crate::graph::Graph;
use crate::laplace::{DtnMap, EdgeWeights, NodeWeights};
use crate::linalg::CMatrix;
use crate::newton::NewtonTrace;
use crate::solvability::SliceMap;
use crate::survey::ProbabilityGrid;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{what}: {source}")]
    Json {
        what: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{what}: {message}")]
    Invalid { what: String, message: String },
    #[error(transparent)]
    Graph(#[from] crate::error::Error),
}

fn parse<T: for<'de> Deserialize<'de>>(what: &str, text: &str) -> Result<T, FormatError> {
    serde_json::from_str(text).map_err(|source| FormatError::Json {
        what: what.to_string(),
        source,
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

type Pair = [f64; 2];

fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

fn complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    boundary: Vec<usize>,
    edges: Vec<[usize; 2]>,
}

pub fn parse_graph(text: &str) -> Result<Graph, FormatError> {
    let f: GraphFile = parse("graph", text)?;
    let edges: Vec<_> = f.edges.iter().map(|e| (e[0], e[1])).collect();
    Ok(Graph::new(f.n, &f.boundary, &edges)?)
}

pub fn write_graph(g: &Graph) -> String {
    to_json(&GraphFile {
        n: g.n_vertices(),
        boundary: g.boundary().to_vec(),
        edges: g.edges().iter().map(|&(a, b)| [a, b]).collect(),
    })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsFile {
    values: Vec<Pair>,
}

fn parse_values(what: &str, text: &str) -> Result<Vec<Complex64>, FormatError> {
    let f: WeightsFile = parse(what, text)?;
    Ok(f.values.into_iter().map(complex).collect())
}

fn write_values(values: &[Complex64]) -> String {
    to_json(&WeightsFile {
        values: values.iter().copied().map(pair).collect(),
    })
}

pub fn parse_edge_weights(text: &str) -> Result<EdgeWeights, FormatError> {
    Ok(EdgeWeights::new(parse_values("edge weights", text)?))
}

pub fn parse_node_weights(text: &str) -> Result<NodeWeights, FormatError> {
    Ok(NodeWeights::new(parse_values("node weights", text)?))
}

pub fn write_edge_weights(w: &EdgeWeights) -> String {
    write_values(w.values())
}

pub fn write_node_weights(w: &NodeWeights) -> String {
    write_values(w.values())
}

/// DtN file: the matrix in boundary order plus the ordering and tolerance
/// it was produced with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DtnFile {
    pub boundary: Vec<usize>,
    pub matrix: Vec<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl DtnFile {
    pub fn new(g: &Graph, dtn: &DtnMap, tolerance: Option<f64>) -> Self {
        let m = dtn.matrix();
        Self {
            boundary: g.boundary().to_vec(),
            matrix: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect())
                .collect(),
            tolerance,
        }
    }

    pub fn to_dtn(&self) -> Result<DtnMap, FormatError> {
        let k = self.matrix.len();
        if self.matrix.iter().any(|row| row.len() != k) {
            return Err(FormatError::Invalid {
                what: "dtn.matrix".into(),
                message: "matrix must be square".into(),
            });
        }
        if !self.boundary.is_empty() && self.boundary.len() != k {
            return Err(FormatError::Invalid {
                what: "dtn.boundary".into(),
                message: format!("{} ids for a {k}x{k} matrix", self.boundary.len()),
            });
        }
        Ok(DtnMap(CMatrix::from_fn(k, k, |i, j| {
            complex(self.matrix[i][j])
        })))
    }
}

pub fn parse_dtn(text: &str) -> Result<DtnFile, FormatError> {
    parse("dtn", text)
}

pub fn write_dtn(file: &DtnFile) -> String {
    to_json(file)
}

/// Checks a DtN file against the graph it is used with.
pub fn dtn_for_graph(file: &DtnFile, g: &Graph) -> CoreResult<DtnMap> {
    let dtn = file
        .to_dtn()
        .map_err(|e| crate::Error::InvalidParameter(e.to_string()))?;
    if dtn.size() != g.boundary().len()
        || (!file.boundary.is_empty() && file.boundary != g.boundary())
    {
        return Err(crate::Error::InvalidParameter(
            "DtN boundary ordering does not match the graph".into(),
        ));
    }
    Ok(dtn)
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Slice map as CSV: header `y\x,<xs..>`, then one row per `y` with
/// `log10(σ_r/σ_1)` per cell; missing cells are empty.
pub fn slice_map_csv(map: &SliceMap) -> String {
    let mut out = String::from("y\\x");
    for x in &map.xs {
        let _ = write!(out, ",{}", fmt_f64(*x));
    }
    out.push('\n');
    for (y, row) in map.ys.iter().zip(&map.values) {
        out.push_str(&fmt_f64(*y));
        for v in row {
            out.push(',');
            if let Some(v) = v {
                out.push_str(&fmt_f64(v.log10()));
            }
        }
        out.push('\n');
    }
    out
}

/// Probability grid as CSV, one line per cell, preceded by `#` metadata.
pub fn probability_grid_csv(grid: &ProbabilityGrid, extra_meta: &[(&str, String)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# problem={}", grid.problem);
    let _ = writeln!(out, "# {}={}", grid.fixed.0, fmt_f64(grid.fixed.1));
    let _ = writeln!(out, "# seed={}", grid.config.seed);
    let _ = writeln!(out, "# tolerance={}", fmt_f64(grid.config.delta));
    let _ = writeln!(out, "# trials_per_cell={}", grid.config.trials_per_cell);
    let _ = writeln!(out, "# max_attempts={}", grid.config.max_attempts);
    let _ = writeln!(out, "# linearization=gamma:1,q:0");
    for (k, v) in extra_meta {
        let _ = writeln!(out, "# {k}={v}");
    }
    let _ = writeln!(
        out,
        "{},{},trials,admissible,recoverable,rank_tests,wellposedness_failures,probability",
        grid.row_label, grid.col_label
    );
    for c in &grid.cells {
        let p = c.probability().map(fmt_f64).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(c.row),
            fmt_f64(c.col),
            c.trials,
            c.admissible,
            c.recoverable,
            c.rank_tests,
            c.wellposedness_failures,
            p
        );
    }
    out
}

pub fn trace_csv(trace: &NewtonTrace) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# verdict={:?}", trace.verdict);
    out.push_str("iteration,residual,relative_residual,min_re,step,min_sv_ratio\n");
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.iteration,
            fmt_f64(r.residual),
            fmt_f64(r.relative_residual),
            fmt_f64(r.min_re),
            opt(r.step),
            opt(r.min_sv_ratio)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn graph_file_example() {
        let g = parse_graph(r#"{"n": 3, "boundary": [1, 0], "edges": [[0, 2], [2, 1]]}"#).unwrap();
        assert_eq!(g.boundary(), &[0, 1]);
        assert_eq!(g.edges(), &[(0, 2), (1, 2)]);
    }

    #[test]
    fn missing_field_is_named() {
        let err = parse_graph(r#"{"n": 2, "edges": [[0, 1]]}"#).unwrap_err();
        assert!(err.to_string().contains("boundary"), "{err}");
    }

    #[test]
    fn graph_errors_pass_through() {
        let err =
            parse_graph(r#"{"n": 2, "boundary": [0], "edges": [[0, 1], [1, 0]]}"#).unwrap_err();
        assert!(matches!(
            err,
            FormatError::Graph(crate::Error::DuplicateEdge(0, 1))
        ));
    }

    #[test]
    fn non_square_dtn_rejected() {
        let f =
            parse_dtn(r#"{"boundary": [0, 1], "matrix": [[[1, 0], [0, 0]], [[1, 0]]]}"#).unwrap();
        assert!(f.to_dtn().is_err());
    }

    #[test]
    fn slice_csv_layout() {
        let map = SliceMap {
            xs: vec![0.0, 1.0],
            ys: vec![0.5],
            values: vec![vec![Some(1.0), None]],
        };
        assert_eq!(slice_map_csv(&map), "y\\x,0,1\n0.5,0,\n");
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![
            any::<f64>().prop_filter("finite", |x| x.is_finite()),
            -1e3..1e3f64
        ]
    }

    proptest! {
        #[test]
        fn weights_round_trip_bit_exact(values in proptest::collection::vec((finite(), finite()), 0..12)) {
            let w = EdgeWeights::new(values.iter().map(|&(a, b)| Complex64::new(a, b)).collect());
            let back = parse_edge_weights(&write_edge_weights(&w)).unwrap();
            for (x, y) in w.values().iter().zip(back.values()) {
                prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
                prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
            prop_assert_eq!(w.len(), back.len());
        }

        #[test]
        fn dtn_round_trip_bit_exact(entries in proptest::collection::vec((finite(), finite()), 9)) {
            let m = CMatrix::from_fn(3, 3, |i, j| {
                let (a, b) = entries[i * 3 + j];
                Complex64::new(a, b)
            });
            let g = Graph::new(4, &[0, 1, 3], &[(0, 2), (1, 2), (2, 3)]).unwrap();
            let file = DtnFile::new(&g, &DtnMap(m.clone()), Some(1e-9));
            let back = parse_dtn(&write_dtn(&file)).unwrap();
            prop_assert_eq!(&back, &file);
            let dtn = dtn_for_graph(&back, &g).unwrap();
            for (x, y) in m.iter().zip(dtn.matrix().iter()) {
                prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
                prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }

        #[test]
        fn graph_round_trip(n in 2usize..9, seed in any::<u64>()) {
            use rand::Rng;
            let mut rng = crate::survey::RngStream::new(seed, 0).rng();
            let cand = crate::survey::erdos_renyi_probability(n, 0.5, &mut rng).unwrap();
            let b = rng.random_range(1..=n);
            let boundary: Vec<usize> = (0..b).collect();
            let g = Graph::new(n, &boundary, &cand.edges).unwrap();
            prop_assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
        }
    }
}

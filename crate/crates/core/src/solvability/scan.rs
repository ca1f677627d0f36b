//! Two-parameter slices of the smallest relevant singular value of a
//! product matrix.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::laplace::{is_wellposed, EdgeWeights, NodeWeights};
use crate::linalg::singular_values;
use crate::solvability::product::{product_gradients_matrix, product_solutions_matrix};
use crate::DEFAULT_TOL;

/// Evenly spaced samples on `[start, end]`; a single sample sits at `start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(start: f64, end: f64, count: usize) -> Result<Self> {
        if count == 0 || !start.is_finite() || !end.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "axis {start}:{end}:{count} needs finite bounds and at least one sample"
            )));
        }
        Ok(Self { start, end, count })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k + 1 == self.count {
                    self.end
                } else {
                    self.start + step * k as f64
                }
            })
            .collect()
    }
}

/// Which product matrix a slice samples.
///
/// Conductivity cells evaluate `F(base1 + x·dir1, base2 + y·dir2)`;
/// Schrödinger cells evaluate `G(base1 + x·dir1, base2 + y·dir2)` at a fixed
/// conductivity.
#[derive(Debug, Clone)]
pub enum ScanProblem {
    Conductivity {
        base1: EdgeWeights,
        base2: EdgeWeights,
        dir1: EdgeWeights,
        dir2: EdgeWeights,
    },
    Schrodinger {
        gamma: EdgeWeights,
        base1: NodeWeights,
        base2: NodeWeights,
        dir1: NodeWeights,
        dir2: NodeWeights,
    },
}

/// `values[iy][ix]` is `σ_r / σ_1` at `(xs[ix], ys[iy])`, where `r` is the
/// number of unknowns; `None` marks an ill-posed cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceMap {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<Vec<Option<f64>>>,
}

fn required_ratio(sv: &[f64], required: usize) -> f64 {
    match (sv.first(), required) {
        (_, 0) => 1.0,
        (Some(&s1), r) if s1 > 0.0 && r <= sv.len() => sv[r - 1] / s1,
        _ => 0.0,
    }
}

fn check(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch {
            what,
            expected,
            got,
        });
    }
    Ok(())
}

pub fn sv_slice_scan(g: &Graph, problem: &ScanProblem, x: Axis, y: Axis) -> Result<SliceMap> {
    match problem {
        ScanProblem::Conductivity {
            base1,
            base2,
            dir1,
            dir2,
        } => {
            for w in [base1, base2, dir1, dir2] {
                check("scan edge weights", g.n_edges(), w.len())?;
            }
        }
        ScanProblem::Schrodinger {
            gamma,
            base1,
            base2,
            dir1,
            dir2,
        } => {
            if g.interior().is_empty() {
                return Err(Error::EmptyInterior);
            }
            check("scan conductivity", g.n_edges(), gamma.len())?;
            for w in [base1, base2, dir1, dir2] {
                check("scan potentials", g.interior().len(), w.len())?;
            }
        }
    }

    // With matching base points and directions, cell (x, y) is cell (y, x)
    // with columns permuted; evaluating both at (min, max) keeps the map
    // exactly symmetric.
    let symmetric = match problem {
        ScanProblem::Conductivity {
            base1,
            base2,
            dir1,
            dir2,
        } => base1 == base2 && dir1 == dir2,
        ScanProblem::Schrodinger {
            base1,
            base2,
            dir1,
            dir2,
            ..
        } => base1 == base2 && dir1 == dir2,
    };
    let (xs, ys) = (x.values(), y.values());
    let cells: Vec<(usize, usize)> = (0..ys.len())
        .flat_map(|iy| (0..xs.len()).map(move |ix| (iy, ix)))
        .collect();
    let flat: Vec<Option<f64>> = cells
        .par_iter()
        .map(|&(iy, ix)| {
            let (a, b) = (xs[ix], ys[iy]);
            if symmetric && b < a {
                cell_ratio(g, problem, b, a)
            } else {
                cell_ratio(g, problem, a, b)
            }
        })
        .collect();
    let values = flat.chunks(xs.len()).map(<[_]>::to_vec).collect();
    Ok(SliceMap { xs, ys, values })
}

fn cell_ratio(g: &Graph, problem: &ScanProblem, x: f64, y: f64) -> Option<f64> {
    let tx = num_complex::Complex64::new(x, 0.0);
    let ty = num_complex::Complex64::new(y, 0.0);
    let (matrix, required) = match problem {
        ScanProblem::Conductivity {
            base1,
            base2,
            dir1,
            dir2,
        } => {
            let g1 = base1.axpy(tx, dir1.values());
            let g2 = base2.axpy(ty, dir2.values());
            let q0 = NodeWeights::zeros(g);
            if !is_wellposed(g, &g1, &q0, DEFAULT_TOL) || !is_wellposed(g, &g2, &q0, DEFAULT_TOL) {
                return None;
            }
            (product_gradients_matrix(g, &g1, &g2).ok()?, g.n_edges())
        }
        ScanProblem::Schrodinger {
            gamma,
            base1,
            base2,
            dir1,
            dir2,
        } => {
            let q1 = base1.axpy(tx, dir1.values());
            let q2 = base2.axpy(ty, dir2.values());
            if !is_wellposed(g, gamma, &q1, DEFAULT_TOL)
                || !is_wellposed(g, gamma, &q2, DEFAULT_TOL)
            {
                return None;
            }
            (
                product_solutions_matrix(g, gamma, &q1, &q2).ok()?,
                g.interior().len(),
            )
        }
    };
    Some(required_ratio(&singular_values(&matrix), required))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_samples() {
        assert_eq!(
            Axis::new(0.0, 4.0, 5).unwrap().values(),
            vec![0.0, 1.0, 2.0, 3.0, 4.0]
        );
        assert_eq!(Axis::new(2.0, 4.0, 1).unwrap().values(), vec![2.0]);
        assert!(Axis::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn ratio_of_required_rank() {
        assert_eq!(required_ratio(&[2.0, 1.0], 2), 0.5);
        assert_eq!(required_ratio(&[2.0], 2), 0.0);
        assert_eq!(required_ratio(&[], 1), 0.0);
    }

    #[test]
    fn k2_scan_is_all_ones() {
        let k2 = Graph::new(2, &[0, 1], &[(0, 1)]).unwrap();
        let one = EdgeWeights::ones(&k2);
        let problem = ScanProblem::Conductivity {
            base1: one.clone(),
            base2: one.clone(),
            dir1: one.clone(),
            dir2: one,
        };
        let axis = Axis::new(0.0, 4.0, 4).unwrap();
        let map = sv_slice_scan(&k2, &problem, axis, axis).unwrap();
        assert!(map.values.iter().flatten().all(|v| *v == Some(1.0)));
    }

    #[test]
    fn ill_posed_cells_are_missing() {
        let edge = Graph::new(2, &[0], &[(0, 1)]).unwrap();
        let problem = ScanProblem::Schrodinger {
            gamma: EdgeWeights::ones(&edge),
            base1: NodeWeights::from_real(&[0.0]),
            base2: NodeWeights::from_real(&[0.0]),
            dir1: NodeWeights::from_real(&[1.0]),
            dir2: NodeWeights::from_real(&[1.0]),
        };
        let map = sv_slice_scan(
            &edge,
            &problem,
            Axis::new(-1.0, 1.0, 3).unwrap(),
            Axis::new(1.0, 1.0, 1).unwrap(),
        )
        .unwrap();
        assert_eq!(map.values[0][0], None);
        assert_eq!(map.values[0][1], Some(1.0));
    }
}

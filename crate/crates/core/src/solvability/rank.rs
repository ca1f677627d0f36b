//! Numerical rank at a relative tolerance, an exhaustive-minor oracle, and
//! the data-counting prechecks.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{singular_values, CMatrix};

/// Largest `r` with `σ_r / σ_1 > delta`; zero for a zero or empty matrix.
pub fn numeric_rank(m: &CMatrix, delta: f64) -> usize {
    rank_from_singular_values(&singular_values(m), delta)
}

pub(crate) fn rank_from_singular_values(sv: &[f64], delta: f64) -> usize {
    match sv.first() {
        Some(&s1) if s1 > 0.0 => sv.iter().take_while(|&&s| s / s1 > delta).count(),
        _ => 0,
    }
}

/// Relative threshold on `|det| / ∏ ‖row‖` (Hadamard-normalized minor).
pub const MINOR_TOL: f64 = 1e-12;

/// Rank decided by exhaustive square minors: the largest `r` for which some
/// `r × r` submatrix has a Hadamard-normalized determinant above
/// [`MINOR_TOL`]. Only for cross-checking on tiny matrices.
///
/// Rows whose norm is at most `MINOR_TOL` times the largest row norm are
/// rounding residue of exact zeros (e.g. the gradient on a pendant edge
/// that carries no current) and are dropped first; normalizing such a row
/// by its own norm would turn noise into a spurious full-rank minor.
pub fn determinant_rank_oracle(m: &CMatrix) -> Result<usize> {
    let k = m.nrows().min(m.ncols());
    if k > 8 {
        return Err(Error::TooLarge(k));
    }
    let row_norms: Vec<f64> = (0..m.nrows()).map(|i| m.row(i).norm()).collect();
    let max_row = row_norms.iter().copied().fold(0.0, f64::max);
    let live: Vec<usize> = (0..m.nrows())
        .filter(|&i| row_norms[i] > MINOR_TOL * max_row)
        .collect();
    let k = k.min(live.len());
    for r in (1..=k).rev() {
        for rows in combinations(live.len(), r)
            .into_iter()
            .map(|c| c.into_iter().map(|i| live[i]).collect::<Vec<_>>())
        {
            for cols in combinations(m.ncols(), r) {
                let sub = CMatrix::from_fn(r, r, |a, b| m[(rows[a], cols[b])]);
                let scale: f64 = (0..r).map(|a| sub.row(a).norm()).product();
                if scale == 0.0 {
                    continue;
                }
                if sub.determinant().norm() / scale > MINOR_TOL {
                    return Ok(r);
                }
            }
        }
    }
    Ok(0)
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let Some(p) = (0..k).rev().find(|&p| idx[p] != p + n - k) else {
            return out;
        };
        idx[p] += 1;
        for q in p + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// `|B|(|B|−1)/2 ≥ |E|`: enough independent DtN entries for the conductivities.
pub fn counting_precheck_conductivity(g: &Graph) -> bool {
    conductivity_data_count(g.boundary().len()) >= g.n_edges()
}

/// `|B|(|B|+1)/2 ≥ |I|`: enough independent DtN entries for the potential.
pub fn counting_precheck_schrodinger(g: &Graph) -> bool {
    schrodinger_data_count(g.boundary().len()) >= g.interior().len()
}

pub fn conductivity_data_count(n_boundary: usize) -> usize {
    n_boundary * n_boundary.saturating_sub(1) / 2
}

pub fn schrodinger_data_count(n_boundary: usize) -> usize {
    n_boundary * (n_boundary + 1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CVector;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numeric_rank(&CMatrix::identity(3, 3), 1e-9), 3);
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0), c(1e-15)]));
        assert_eq!(numeric_rank(&d, 1e-9), 1);
        assert_eq!(numeric_rank(&CMatrix::zeros(3, 4), 1e-9), 0);
        assert_eq!(numeric_rank(&CMatrix::zeros(0, 4), 1e-9), 0);
    }

    #[test]
    fn oracle_examples() {
        let f = CMatrix::from_row_slice(1, 4, &[c(1.0), c(-1.0), c(-1.0), c(1.0)]);
        assert_eq!(determinant_rank_oracle(&f).unwrap(), 1);
        let q = c(0.25);
        let path_f = CMatrix::from_row_slice(2, 4, &[q, -q, -q, q, q, -q, -q, q]);
        assert_eq!(determinant_rank_oracle(&path_f).unwrap(), 1);
        assert_eq!(
            determinant_rank_oracle(&CMatrix::identity(4, 6)).unwrap(),
            4
        );
        assert_eq!(determinant_rank_oracle(&CMatrix::zeros(2, 2)).unwrap(), 0);
        // a rounding-level row does not count toward the rank
        let noisy = CMatrix::from_row_slice(2, 2, &[c(1.0), c(-1.0), c(2e-17), c(3e-17)]);
        assert_eq!(determinant_rank_oracle(&noisy).unwrap(), 1);
        assert_eq!(
            determinant_rank_oracle(&CMatrix::zeros(9, 9)),
            Err(Error::TooLarge(9))
        );
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(9, 6).len(), 84);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn counting_thresholds() {
        assert!(conductivity_data_count(7) >= 21);
        assert!(conductivity_data_count(6) < 21);
        assert!(schrodinger_data_count(6) >= 21);
        assert!(schrodinger_data_count(5) < 21);
        let k2 = Graph::new(2, &[0, 1], &[(0, 1)]).unwrap();
        assert!(counting_precheck_conductivity(&k2));
        let edge = Graph::new(2, &[0], &[(0, 1)]).unwrap();
        assert!(counting_precheck_schrodinger(&edge));
        assert!(!counting_precheck_conductivity(&edge));
    }
}

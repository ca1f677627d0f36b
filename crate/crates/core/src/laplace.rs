//! Weighted graph Laplacian, Dirichlet problem with a Schrödinger term, and
//! the Dirichlet-to-Neumann map.
//!
//! The Laplacian is `L_γ = ∇ᵀ diag(γ) ∇` with complex edge weights. It is
//! complex symmetric (not Hermitian), so every transpose in this module is a
//! plain transpose. A vertex function `u` is `γ,q`-harmonic when
//! `(L_γ)_IB u_B + ((L_γ)_II + diag(q)) u_I = 0`.

use nalgebra::{SymmetricEigen, LU};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{Graph, Side};
use crate::linalg::{singular_values, CMatrix, CVector};

/// Complex conductivity, one value per edge in `Graph::edges` order.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights(Vec<Complex64>);

/// Complex Schrödinger potential, one value per interior vertex in
/// `Graph::interior` order.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeWeights(Vec<Complex64>);

macro_rules! weight_vector {
    ($name:ident) => {
        impl $name {
            pub fn new(values: Vec<Complex64>) -> Self {
                Self(values)
            }

            pub fn constant(len: usize, value: Complex64) -> Self {
                Self(vec![value; len])
            }

            pub fn from_real(values: &[f64]) -> Self {
                Self(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            }

            pub fn values(&self) -> &[Complex64] {
                &self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn to_vector(&self) -> CVector {
                CVector::from_column_slice(&self.0)
            }

            /// `self + t · dir`, entrywise.
            pub fn axpy(&self, t: Complex64, dir: &[Complex64]) -> Self {
                assert_eq!(dir.len(), self.0.len());
                Self(self.0.iter().zip(dir).map(|(a, d)| a + t * d).collect())
            }

            pub fn into_inner(self) -> Vec<Complex64> {
                self.0
            }
        }

        impl From<Vec<Complex64>> for $name {
            fn from(values: Vec<Complex64>) -> Self {
                Self(values)
            }
        }
    };
}

weight_vector!(EdgeWeights);
weight_vector!(NodeWeights);

impl EdgeWeights {
    pub fn ones(g: &Graph) -> Self {
        Self::constant(g.n_edges(), Complex64::new(1.0, 0.0))
    }

    /// Every entry has strictly positive real part.
    pub fn is_admissible(&self) -> bool {
        self.first_inadmissible().is_none()
    }

    fn first_inadmissible(&self) -> Option<usize> {
        self.0.iter().position(|z| z.re <= 0.0 || z.re.is_nan())
    }

    fn check_len(&self, g: &Graph) -> Result<()> {
        check_len("edge weights", g.n_edges(), self.len())
    }
}

impl NodeWeights {
    pub fn zeros(g: &Graph) -> Self {
        Self::constant(g.interior().len(), Complex64::new(0.0, 0.0))
    }

    fn check_len(&self, g: &Graph) -> Result<()> {
        check_len("node weights", g.interior().len(), self.len())
    }
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch {
            what,
            expected,
            got,
        });
    }
    Ok(())
}

/// Block decomposition of `L_γ` against the boundary/interior orderings.
///
/// `ii` equals the Laplacian of the interior subgraph (weights restricted to
/// interior edges) plus `diag(mu)`, where `mu[k]` sums the weights of edges
/// joining interior vertex `k` to the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianBlocks {
    pub bb: CMatrix,
    pub bi: CMatrix,
    pub ib: CMatrix,
    pub ii: CMatrix,
    pub mu: CVector,
}

/// The full `|V| × |V|` Laplacian in vertex id order.
pub fn assemble_full(g: &Graph, gamma: &EdgeWeights) -> Result<CMatrix> {
    gamma.check_len(g)?;
    let n = g.n_vertices();
    let mut l = CMatrix::zeros(n, n);
    for (&(a, b), &w) in g.edges().iter().zip(gamma.values()) {
        l[(a, a)] += w;
        l[(b, b)] += w;
        l[(a, b)] -= w;
        l[(b, a)] -= w;
    }
    Ok(l)
}

pub fn assemble_laplacian(g: &Graph, gamma: &EdgeWeights) -> Result<LaplacianBlocks> {
    gamma.check_len(g)?;
    let nb = g.boundary().len();
    let ni = g.interior().len();
    let mut blk = LaplacianBlocks {
        bb: CMatrix::zeros(nb, nb),
        bi: CMatrix::zeros(nb, ni),
        ib: CMatrix::zeros(ni, nb),
        ii: CMatrix::zeros(ni, ni),
        mu: CVector::zeros(ni),
    };
    for (&(a, b), &w) in g.edges().iter().zip(gamma.values()) {
        match (g.side(a), g.side(b)) {
            (Side::Boundary(x), Side::Boundary(y)) => {
                blk.bb[(x, x)] += w;
                blk.bb[(y, y)] += w;
                blk.bb[(x, y)] -= w;
                blk.bb[(y, x)] -= w;
            }
            (Side::Interior(x), Side::Interior(y)) => {
                blk.ii[(x, x)] += w;
                blk.ii[(y, y)] += w;
                blk.ii[(x, y)] -= w;
                blk.ii[(y, x)] -= w;
            }
            (Side::Boundary(x), Side::Interior(y)) | (Side::Interior(y), Side::Boundary(x)) => {
                blk.bb[(x, x)] += w;
                blk.ii[(y, y)] += w;
                blk.mu[y] += w;
                blk.bi[(x, y)] -= w;
                blk.ib[(y, x)] -= w;
            }
        }
    }
    Ok(blk)
}

/// `ζ_γ = −λ_min((L_{Re γ})_II)`. For admissible `γ` on a graph whose
/// interior restriction and whole are connected, the Dirichlet problem is
/// well posed for every `q` with `Re q > ζ_γ` componentwise.
pub fn wellposedness_bound(g: &Graph, gamma: &EdgeWeights) -> Result<f64> {
    gamma.check_len(g)?;
    if let Some(edge) = gamma.first_inadmissible() {
        return Err(Error::NotAdmissible { edge });
    }
    if !g.is_admissible_topology() {
        return Err(Error::DisconnectedGraph);
    }
    if g.interior().is_empty() {
        return Err(Error::EmptyInterior);
    }
    let real = EdgeWeights::from_real(&gamma.values().iter().map(|z| z.re).collect::<Vec<_>>());
    let ii = assemble_laplacian(g, &real)?.ii.map(|z| z.re);
    let eig = SymmetricEigen::new(ii);
    let lambda_min = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(-lambda_min)
}

fn interior_operator(blk: &LaplacianBlocks, q: &NodeWeights) -> CMatrix {
    let mut a = blk.ii.clone();
    for (k, &qk) in q.values().iter().enumerate() {
        a[(k, k)] += qk;
    }
    a
}

/// `σ_min / σ_max` of `(L_γ)_II + diag(q)` exceeds `tol`. Vacuously true
/// without interior vertices.
pub fn is_wellposed(g: &Graph, gamma: &EdgeWeights, q: &NodeWeights, tol: f64) -> bool {
    if g.interior().is_empty() {
        return true;
    }
    if gamma.check_len(g).is_err() || q.check_len(g).is_err() {
        return false;
    }
    let Ok(blk) = assemble_laplacian(g, gamma) else {
        return false;
    };
    let sv = singular_values(&interior_operator(&blk, q));
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 && hi.is_finite() => lo / hi > tol,
        _ => false,
    }
}

/// A factorized Dirichlet problem for one `(g, γ, q)`, reusable across any
/// number of boundary data vectors.
#[derive(Debug, Clone)]
pub struct DirichletSolver {
    blocks: LaplacianBlocks,
    lu: Option<LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>>,
    n_vertices: usize,
    boundary: Vec<usize>,
    interior: Vec<usize>,
}

impl DirichletSolver {
    pub fn new(g: &Graph, gamma: &EdgeWeights, q: &NodeWeights) -> Result<Self> {
        q.check_len(g)?;
        let blocks = assemble_laplacian(g, gamma)?;
        let lu = if g.interior().is_empty() {
            None
        } else {
            let a = interior_operator(&blocks, q);
            let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let lu = a.lu();
            let floor = f64::EPSILON * scale * g.interior().len() as f64;
            let singular = lu
                .u()
                .diagonal()
                .iter()
                .any(|p| !p.norm().is_finite() || p.norm() <= floor);
            if singular {
                return Err(Error::SingularInteriorOperator);
            }
            Some(lu)
        };
        Ok(Self {
            blocks,
            lu,
            n_vertices: g.n_vertices(),
            boundary: g.boundary().to_vec(),
            interior: g.interior().to_vec(),
        })
    }

    pub fn blocks(&self) -> &LaplacianBlocks {
        &self.blocks
    }

    /// Interior values `−((L_γ)_II + diag q)⁻¹ (L_γ)_IB X` for every column
    /// of boundary data `X` (`|B| × k`).
    pub fn interior_response(&self, boundary_data: &CMatrix) -> CMatrix {
        assert_eq!(boundary_data.nrows(), self.boundary.len());
        match &self.lu {
            None => CMatrix::zeros(0, boundary_data.ncols()),
            Some(lu) => {
                let rhs = -(&self.blocks.ib * boundary_data);
                lu.solve(&rhs).expect("factorization checked nonsingular")
            }
        }
    }

    /// The harmonic extension of `u_b` to all vertices, in vertex id order.
    pub fn solve(&self, u_b: &CVector) -> Result<CVector> {
        check_len("boundary data", self.boundary.len(), u_b.len())?;
        let data = CMatrix::from_column_slice(u_b.len(), 1, u_b.as_slice());
        let u_i = self.interior_response(&data);
        let mut u = CVector::zeros(self.n_vertices);
        for (k, &v) in self.boundary.iter().enumerate() {
            u[v] = u_b[k];
        }
        for (k, &v) in self.interior.iter().enumerate() {
            u[v] = u_i[(k, 0)];
        }
        Ok(u)
    }

    /// `|V| × |B|` matrix whose column `i` is the harmonic extension of the
    /// `i`-th canonical boundary vector, rows in vertex id order.
    pub fn harmonic_basis(&self) -> CMatrix {
        let nb = self.boundary.len();
        let u_i = self.interior_response(&CMatrix::identity(nb, nb));
        let mut u = CMatrix::zeros(self.n_vertices, nb);
        for (k, &v) in self.boundary.iter().enumerate() {
            u[(v, k)] = Complex64::new(1.0, 0.0);
        }
        for (k, &v) in self.interior.iter().enumerate() {
            u.row_mut(v).copy_from(&u_i.row(k));
        }
        u
    }

    /// Interior rows of the harmonic basis (`|I| × |B|`).
    pub fn interior_basis(&self) -> CMatrix {
        let nb = self.boundary.len();
        self.interior_response(&CMatrix::identity(nb, nb))
    }

    /// Schur complement `L_BB − L_BI (L_II + diag q)⁻¹ L_IB`.
    pub fn dtn(&self) -> DtnMap {
        let nb = self.boundary.len();
        let u_i = self.interior_response(&CMatrix::identity(nb, nb));
        DtnMap(&self.blocks.bb + &self.blocks.bi * u_i)
    }
}

/// Dirichlet-to-Neumann map, `|B| × |B|` in boundary order.
#[derive(Debug, Clone, PartialEq)]
pub struct DtnMap(pub CMatrix);

impl DtnMap {
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.nrows()
    }
}

pub fn solve_dirichlet(
    g: &Graph,
    gamma: &EdgeWeights,
    q: &NodeWeights,
    u_b: &CVector,
) -> Result<CVector> {
    DirichletSolver::new(g, gamma, q)?.solve(u_b)
}

pub fn dtn_map(g: &Graph, gamma: &EdgeWeights, q: &NodeWeights) -> Result<DtnMap> {
    Ok(DirichletSolver::new(g, gamma, q)?.dtn())
}

/// `u_Bᵀ Λ v_B − (uᵀ L_γ v + u_Iᵀ diag(q) v_I)`. Vanishes up to rounding
/// when `v` is `γ,q`-harmonic; `u` is arbitrary.
pub fn green_residual(
    g: &Graph,
    gamma: &EdgeWeights,
    q: &NodeWeights,
    u: &CVector,
    v: &CVector,
) -> Result<Complex64> {
    check_len("u", g.n_vertices(), u.len())?;
    check_len("v", g.n_vertices(), v.len())?;
    let lambda = dtn_map(g, gamma, q)?;
    let pick =
        |x: &CVector, ids: &[usize]| CVector::from_iterator(ids.len(), ids.iter().map(|&i| x[i]));
    let (u_b, v_b) = (pick(u, g.boundary()), pick(v, g.boundary()));
    let (u_i, v_i) = (pick(u, g.interior()), pick(v, g.interior()));

    let lhs = u_b.transpose() * lambda.matrix() * v_b;
    let l = assemble_full(g, gamma)?;
    let bulk = u.transpose() * l * v;
    let leak: Complex64 = u_i
        .iter()
        .zip(q.values())
        .zip(v_i.iter())
        .map(|((a, qk), b)| a * qk * b)
        .sum();
    Ok(lhs[(0, 0)] - bulk[(0, 0)] - leak)
}

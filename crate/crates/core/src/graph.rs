//! Finite graphs with a boundary/interior vertex partition.
//!
//! Vertices are `0..n`. The boundary and interior sets are stored in
//! ascending id order and every matrix in the crate indexes its `B` and `I`
//! blocks against these orderings. Edges keep the order they were given in
//! and are oriented with the smaller id as tail.

use std::collections::{HashSet, VecDeque};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Where a vertex lives in the partition, with its position in that block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Boundary(usize),
    Interior(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    boundary: Vec<usize>,
    interior: Vec<usize>,
    edges: Vec<(usize, usize)>,
    side: Vec<Side>,
}

impl Graph {
    /// Builds a graph on `n` vertices. The interior is the complement of
    /// `boundary`; each edge is stored as `(min, max)`.
    pub fn new(n: usize, boundary: &[usize], edges: &[(usize, usize)]) -> Result<Self> {
        if boundary.is_empty() {
            return Err(Error::EmptyBoundary);
        }
        Self::build(n, boundary, edges)
    }

    fn build(n: usize, boundary: &[usize], edges: &[(usize, usize)]) -> Result<Self> {
        let mut is_boundary = vec![false; n];
        for &b in boundary {
            if b >= n {
                return Err(Error::IdOutOfRange { id: b, n });
            }
            if is_boundary[b] {
                return Err(Error::DuplicateBoundary(b));
            }
            is_boundary[b] = true;
        }

        let mut seen = HashSet::with_capacity(edges.len());
        let mut oriented = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            for id in [a, b] {
                if id >= n {
                    return Err(Error::IdOutOfRange { id, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(Error::DuplicateEdge(e.0, e.1));
            }
            oriented.push(e);
        }

        let mut boundary_sorted = Vec::new();
        let mut interior = Vec::new();
        let mut side = Vec::with_capacity(n);
        for (v, &on_b) in is_boundary.iter().enumerate() {
            if on_b {
                side.push(Side::Boundary(boundary_sorted.len()));
                boundary_sorted.push(v);
            } else {
                side.push(Side::Interior(interior.len()));
                interior.push(v);
            }
        }

        Ok(Self {
            n,
            boundary: boundary_sorted,
            interior,
            edges: oriented,
            side,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Boundary vertex ids in ascending order.
    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    /// Interior vertex ids in ascending order.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// Edges as `(tail, head)` with `tail < head`, in input order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn side(&self, v: usize) -> Side {
        self.side[v]
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        matches!(self.side[v], Side::Boundary(_))
    }

    pub fn gradient(&self) -> GradientMatrix {
        GradientMatrix {
            n_vertices: self.n,
            edges: self.edges.clone(),
        }
    }

    /// The graph restricted to interior vertices, relabelled `0..|I|` in
    /// ascending id order. Only edges with both endpoints interior survive.
    /// The result has an empty boundary and is meant for connectivity tests.
    pub fn interior_subgraph(&self) -> Graph {
        let local = |v: usize| match self.side[v] {
            Side::Interior(k) => Some(k),
            Side::Boundary(_) => None,
        };
        let edges: Vec<_> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| Some((local(a)?, local(b)?)))
            .collect();
        Self::build(self.interior.len(), &[], &edges).expect("restriction of a valid graph")
    }

    /// Breadth-first connectivity. Empty and single-vertex graphs count as
    /// connected.
    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let adj = self.adjacency_lists();
        let mut visited = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        visited[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !visited[w] {
                    visited[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }

    /// Both the graph and its interior restriction are connected.
    pub fn is_admissible_topology(&self) -> bool {
        self.is_connected() && self.interior_subgraph().is_connected()
    }

    /// Interior vertices sharing an edge with the boundary, ascending.
    pub fn boundary_adjacent_interior(&self) -> Vec<usize> {
        let mut mark = vec![false; self.n];
        for &(a, b) in &self.edges {
            match (self.is_boundary(a), self.is_boundary(b)) {
                (true, false) => mark[b] = true,
                (false, true) => mark[a] = true,
                _ => {}
            }
        }
        self.interior.iter().copied().filter(|&v| mark[v]).collect()
    }

    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

/// Discrete gradient `(∇u)(e) = u(tail) − u(head)`, one row per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientMatrix {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl GradientMatrix {
    pub fn nrows(&self) -> usize {
        self.edges.len()
    }

    pub fn ncols(&self) -> usize {
        self.n_vertices
    }

    /// Applies the gradient to every column of `u` (`|V| × k`).
    pub fn apply<T>(&self, u: &DMatrix<T>) -> DMatrix<T>
    where
        T: nalgebra::Scalar + Copy + std::ops::Sub<Output = T>,
    {
        assert_eq!(u.nrows(), self.n_vertices, "gradient: row count mismatch");
        DMatrix::from_fn(self.edges.len(), u.ncols(), |e, j| {
            let (t, h) = self.edges[e];
            u[(t, j)] - u[(h, j)]
        })
    }

    pub fn apply_vector<T>(&self, u: &nalgebra::DVector<T>) -> nalgebra::DVector<T>
    where
        T: nalgebra::Scalar + Copy + std::ops::Sub<Output = T>,
    {
        assert_eq!(u.len(), self.n_vertices, "gradient: length mismatch");
        nalgebra::DVector::from_iterator(
            self.edges.len(),
            self.edges.iter().map(|&(t, h)| u[t] - u[h]),
        )
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.edges.len(), self.n_vertices);
        for (e, &(t, h)) in self.edges.iter().enumerate() {
            m[(e, t)] = 1.0;
            m[(e, h)] = -1.0;
        }
        m
    }
}

#![allow(dead_code)]

use graphinv::linalg::CMatrix;
use graphinv::survey::{draw_admissible, Draw, GraphModel, RngStream};
use graphinv::{Complex64, EdgeWeights, Graph, NodeWeights};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    RngStream::new(seed, 0xabad_1dea).rng()
}

/// Random graph on 2..=max_n vertices, connected as a whole and on its
/// interior, with a random nonempty boundary.
pub fn random_graph<R: Rng>(rng: &mut R, max_n: usize) -> Graph {
    loop {
        let n = rng.random_range(2..=max_n);
        let p = rng.random_range(0.3..0.9);
        let b = rng.random_range(1..=n);
        let model = GraphModel::EdgeProbability { n, p };
        if let Draw::Accepted { graph, .. } = draw_admissible(&model, b, 20, rng).unwrap() {
            return graph;
        }
    }
}

pub fn random_graph_where<R: Rng>(
    rng: &mut R,
    max_n: usize,
    keep: impl Fn(&Graph) -> bool,
) -> Graph {
    loop {
        let g = random_graph(rng, max_n);
        if keep(&g) {
            return g;
        }
    }
}

pub fn random_complex<R: Rng>(rng: &mut R, re: std::ops::Range<f64>, im: f64) -> Complex64 {
    Complex64::new(rng.random_range(re), rng.random_range(-im..=im))
}

/// Admissible conductivity: Re in [0.5, 2), Im in [−0.5, 0.5].
pub fn random_gamma<R: Rng>(rng: &mut R, g: &Graph) -> EdgeWeights {
    EdgeWeights::new(
        (0..g.n_edges())
            .map(|_| random_complex(rng, 0.5..2.0, 0.5))
            .collect(),
    )
}

/// Potential with Re in [0, 2), Im in [−0.5, 0.5].
pub fn random_q<R: Rng>(rng: &mut R, g: &Graph) -> NodeWeights {
    NodeWeights::new(
        (0..g.interior().len())
            .map(|_| random_complex(rng, 0.0..2.0, 0.5))
            .collect(),
    )
}

pub fn random_vector<R: Rng>(rng: &mut R, len: usize) -> graphinv::linalg::CVector {
    graphinv::linalg::CVector::from_iterator(
        len,
        (0..len).map(|_| random_complex(rng, -1.0..1.0, 1.0)),
    )
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max relative entrywise error over entries of `reference` above `floor`.
pub fn max_relative_error(got: &CMatrix, reference: &CMatrix, floor: f64) -> f64 {
    got.iter()
        .zip(reference.iter())
        .filter(|(_, r)| r.norm() > floor)
        .map(|(g, r)| (g - r).norm() / r.norm())
        .fold(0.0, f64::max)
}

type Dd = num_complex::Complex<twofloat::TwoFloat>;

fn dd(z: Complex64) -> Dd {
    Dd::new(z.re.into(), z.im.into())
}

/// `1/t` to full double-double precision: two Newton steps from the f64
/// reciprocal (TwoFloat's own division keeps only the leading word here).
fn recip(t: twofloat::TwoFloat) -> twofloat::TwoFloat {
    let two = twofloat::TwoFloat::from(2.0);
    let mut r = twofloat::TwoFloat::from(1.0 / f64::from(t));
    for _ in 0..2 {
        r = r * (two - t * r);
    }
    r
}

fn div(a: Dd, b: Dd) -> Dd {
    let inv = recip(b.re * b.re + b.im * b.im);
    let p = a * b.conj();
    Dd::new(p.re * inv, p.im * inv)
}

/// DtN map evaluated in double-double arithmetic: Schur complement
/// `L_BB − L_BI L_II⁻¹ L_IB` by Gaussian elimination with partial pivoting.
/// An independent, higher-precision reference for difference quotients.
pub fn dtn_double_double(g: &Graph, gamma: &[Dd], q: &[Dd]) -> Vec<Vec<Dd>> {
    let n = g.n_vertices();
    let zero = Dd::new(0.0.into(), 0.0.into());
    let mut l = vec![vec![zero; n]; n];
    for (&(a, b), &w) in g.edges().iter().zip(gamma) {
        l[a][a] += w;
        l[b][b] += w;
        l[a][b] -= w;
        l[b][a] -= w;
    }
    let (bd, int) = (g.boundary(), g.interior());
    let (nb, ni) = (bd.len(), int.len());
    // augmented [L_II + diag q | L_IB]
    let mut m: Vec<Vec<Dd>> = (0..ni)
        .map(|r| {
            let mut row: Vec<Dd> = int.iter().map(|&c| l[int[r]][c]).collect();
            row[r] += q[r];
            row.extend(bd.iter().map(|&c| l[int[r]][c]));
            row
        })
        .collect();
    let norm = |z: &Dd| f64::from(z.re).hypot(f64::from(z.im));
    for col in 0..ni {
        let piv = (col..ni)
            .max_by(|&a, &b| norm(&m[a][col]).total_cmp(&norm(&m[b][col])))
            .unwrap();
        m.swap(col, piv);
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col {
                let f = div(row[col], pivot_row[col]);
                for (x, &p) in row.iter_mut().zip(&pivot_row).skip(col) {
                    *x -= f * p;
                }
            }
        }
    }
    // m[r][ni + j] / m[r][r] = (L_II⁻¹ L_IB)[r, j]
    (0..nb)
        .map(|i| {
            (0..nb)
                .map(|j| {
                    let mut s = l[bd[i]][bd[j]];
                    for r in 0..ni {
                        s -= l[bd[i]][int[r]] * div(m[r][ni + j], m[r][r]);
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Central difference of the DtN map with respect to each edge weight
/// (`conductivity = true`) or interior potential, evaluated in double-double
/// so that rounding does not swamp small derivatives. Columns are
/// `vec(∂Λ/∂x_k)` in column-major order.
pub fn dtn_central_difference(
    g: &Graph,
    gamma: &EdgeWeights,
    q: &NodeWeights,
    conductivity: bool,
    h: f64,
) -> CMatrix {
    let base_g: Vec<Dd> = gamma.values().iter().copied().map(dd).collect();
    let base_q: Vec<Dd> = q.values().iter().copied().map(dd).collect();
    let nb = g.boundary().len();
    let count = if conductivity {
        base_g.len()
    } else {
        base_q.len()
    };
    let step = Dd::new(h.into(), 0.0.into());
    let mut out = CMatrix::zeros(nb * nb, count);
    for k in 0..count {
        let eval = |sign: f64| {
            let (mut gg, mut qq) = (base_g.clone(), base_q.clone());
            let x = if conductivity { &mut gg[k] } else { &mut qq[k] };
            *x += step * Dd::new(sign.into(), 0.0.into());
            dtn_double_double(g, &gg, &qq)
        };
        let (plus, minus) = (eval(1.0), eval(-1.0));
        for j in 0..nb {
            for i in 0..nb {
                let d = div(plus[i][j] - minus[i][j], step + step);
                out[(i + j * nb, k)] = Complex64::new(d.re.into(), d.im.into());
            }
        }
    }
    out
}

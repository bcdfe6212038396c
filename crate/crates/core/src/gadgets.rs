//! The clique reduction chain CLIQUE → WMQS → RSDF → WVAL as concrete
//! instance transformations, with brute-force oracles to check them.

use std::path::Path;

use num_bigint::BigInt;
use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{ComplexMatrix, HermitianOp};
use crate::nets::{build_net_cached, NetKind};
use crate::qsep::to_f64;
use crate::wopt::{wopt_max_with, ProductState, Side, WoptOptions};
use crate::Rational;

/// Largest graph handled by exact clique enumeration.
pub const MAX_CLIQUE_VERTICES: usize = 12;
/// Largest graph for the full chain.
pub const MAX_CHAIN_VERTICES: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adjacency: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            adjacency: vec![false; n * n],
        }
    }

    pub fn from_edges(n: usize, edges: &[[usize; 2]]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &[i, j] in edges {
            if i >= n || j >= n || i == j {
                return Err(Error::Malformed(format!("bad edge ({i}, {j}) on {n} vertices")));
            }
            g.adjacency[i * n + j] = true;
            g.adjacency[j * n + i] = true;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in 0..n {
                g.adjacency[i * n + j] = i != j;
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<[usize; 2]> = (1..n).map(|i| [i - 1, i]).collect();
        Self::from_edges(n, &edges).expect("valid path")
    }

    /// Erdős–Rényi graph with edge probability `p`.
    pub fn random<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < p {
                    g.adjacency[i * n + j] = true;
                    g.adjacency[j * n + i] = true;
                }
            }
        }
        g
    }

    /// Adds `extra` isolated vertices.
    pub fn with_isolated(&self, extra: usize) -> Self {
        Self::from_edges(self.n + extra, &self.edges()).expect("edges stay valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.n + j]
    }

    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.has_edge(i, j) {
                    out.push([i, j]);
                }
            }
        }
        out
    }

    pub fn adjacency_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| if self.has_edge(i, j) { 1.0 } else { 0.0 }).collect())
            .collect()
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            edges: self.edges(),
        }
    }

    pub fn from_json(j: &GraphJson) -> Result<Self> {
        Self::from_edges(j.n, &j.edges)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&crate::io::read_json(path)?)
    }

    /// Clique number by subset enumeration (1 for a nonempty edgeless graph).
    pub fn clique_number(&self) -> Result<usize> {
        if self.n > MAX_CLIQUE_VERTICES {
            return Err(Error::TooLarge(format!(
                "clique enumeration on {} > {MAX_CLIQUE_VERTICES} vertices",
                self.n
            )));
        }
        let mut best = 0;
        for mask in 1u32..(1 << self.n) {
            let size = mask.count_ones() as usize;
            if size <= best {
                continue;
            }
            let members: Vec<usize> = (0..self.n).filter(|&i| mask >> i & 1 == 1).collect();
            let clique = members
                .iter()
                .enumerate()
                .all(|(a, &i)| members[a + 1..].iter().all(|&j| self.has_edge(i, j)));
            if clique {
                best = size;
            }
        }
        Ok(best)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotzkinStraus {
    pub kappa: usize,
    /// `1 − 1/κ`.
    pub value: f64,
    /// Maximum of `yᵀA y` over a uniform simplex grid, when `n ≤ 6`.
    pub grid_max: Option<f64>,
    pub grid_step: Option<f64>,
}

/// Grid denominator on the simplex: 40 up to 4 vertices, 20 up to 6.
pub fn simplex_grid_steps(n: usize) -> Option<usize> {
    match n {
        0..=4 => Some(40),
        5..=6 => Some(20),
        _ => None,
    }
}

/// Maximum of `yᵀA y` over `{y ∈ Δ_n : y ∈ Z^n/steps}`.
pub fn simplex_grid_max(a: &[Vec<f64>], steps: usize) -> f64 {
    let n = a.len();
    let mut counts = vec![0usize; n];
    let mut best = f64::NEG_INFINITY;
    fn rec(a: &[Vec<f64>], counts: &mut [usize], pos: usize, left: usize, steps: usize, best: &mut f64) {
        let n = counts.len();
        if pos + 1 == n {
            counts[pos] = left;
            let y: Vec<f64> = counts.iter().map(|&c| c as f64 / steps as f64).collect();
            let mut v = 0.0;
            for i in 0..n {
                for j in 0..n {
                    v += a[i][j] * y[i] * y[j];
                }
            }
            if v > *best {
                *best = v;
            }
            return;
        }
        for c in 0..=left {
            counts[pos] = c;
            rec(a, counts, pos + 1, left - c, steps, best);
        }
    }
    if n == 0 {
        return 0.0;
    }
    rec(a, &mut counts, 0, steps, steps, &mut best);
    best
}

pub fn motzkin_straus_value(g: &Graph) -> Result<MotzkinStraus> {
    if g.n() == 0 {
        return Err(Error::InvalidParameter("graph without vertices".into()));
    }
    let kappa = g.clique_number()?;
    let steps = simplex_grid_steps(g.n());
    Ok(MotzkinStraus {
        kappa,
        value: 1.0 - 1.0 / kappa as f64,
        grid_max: steps.map(|s| simplex_grid_max(&g.adjacency_matrix(), s)),
        grid_step: steps.map(|s| 1.0 / s as f64),
    })
}

fn q(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WmqsInstance {
    pub a: Vec<Vec<f64>>,
    pub zeta_prime: Rational,
    pub eta_prime: Rational,
}

/// `ζ′` is the midpoint of `[1 − 1/(c−1), 1 − 1/c]`, `η′` a quarter of its width.
pub fn clique_to_wmqs(g: &Graph, c: usize) -> Result<WmqsInstance> {
    if c < 2 {
        return Err(Error::InvalidParameter(format!("clique size {c} below 2")));
    }
    let c = c as i64;
    let lo = q(1, 1) - q(1, c - 1);
    let hi = q(1, 1) - q(1, c);
    Ok(WmqsInstance {
        a: g.adjacency_matrix(),
        zeta_prime: (&lo + &hi) / q(2, 1),
        eta_prime: (hi - lo) / q(4, 1),
    })
}

/// `H(A) = max_{y∈Δ} yᵀA y` evaluated at a point.
pub fn quadratic_on_simplex(a: &[Vec<f64>], y: &[f64]) -> f64 {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[i][j] * y[i] * y[j]).sum::<f64>()).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RsdfInstance {
    pub blocks: Vec<Vec<Vec<f64>>>,
    pub zeta: Rational,
    pub eta: Rational,
}

impl RsdfInstance {
    /// Block dimension `l`.
    pub fn dim(&self) -> usize {
        self.blocks.first().map_or(0, Vec::len)
    }
}

/// `Σ_i (xᵀB_i x)²`.
pub fn rsdf_objective(blocks: &[Vec<Vec<f64>>], x: &[f64]) -> f64 {
    blocks.iter().map(|b| quad(b, x).powi(2)).sum()
}

fn quad(b: &[Vec<f64>], x: &[f64]) -> f64 {
    let l = x.len();
    (0..l).map(|i| (0..l).map(|j| b[i][j] * x[i] * x[j]).sum::<f64>()).sum()
}

/// One block per pair `i < j`, with `√(A_ij/2)` at `(i,j)` and `(j,i)`:
/// then `(xᵀB^{ij}x)² = 2A_ij x_i²x_j²`, so `Σ_{i<j}(xᵀB^{ij}x)² =
/// Σ_{i,j} A_ij x_i²x_j²` and `F = H(A)` under `y_i = x_i²`.
pub fn wmqs_to_rsdf(inst: &WmqsInstance) -> Result<RsdfInstance> {
    let n = inst.a.len();
    let mut blocks = Vec::with_capacity(n * (n.max(1) - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let aij = inst.a[i][j];
            if aij < 0.0 || aij != inst.a[j][i] {
                return Err(Error::InvalidParameter(format!("A[{i}][{j}] must be symmetric and nonnegative")));
            }
            let mut b = vec![vec![0.0; n]; n];
            let s = (aij / 2.0).sqrt();
            b[i][j] = s;
            b[j][i] = s;
            blocks.push(b);
        }
    }
    Ok(RsdfInstance {
        blocks,
        zeta: inst.zeta_prime.clone(),
        eta: inst.eta_prime.clone(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WvalInstance {
    pub m: usize,
    pub n: usize,
    pub b: HermitianOp<f64>,
    pub gamma: f64,
    pub epsilon: f64,
}

/// Assembles `B` with `B_i` in block positions `(0, i)` and `(i, 0)`.
///
/// For a real product vector `a ⊗ x`, `tr(Bσ) = 2a₀ Σ_i a_i xᵀB_i x`, whose
/// maximum over unit `a` is `√(Σ_i (xᵀB_i x)²)`. The separable maximum is
/// therefore `√F`, and the thresholds become `[√(ζ−η), √(ζ+η)]`.
pub fn rsdf_to_wval(inst: &RsdfInstance) -> Result<WvalInstance> {
    let n = inst.dim();
    if n == 0 || inst.blocks.iter().any(|b| b.len() != n || b.iter().any(|r| r.len() != n)) {
        return Err(Error::DimensionMismatch("blocks must be nonempty and share one dimension".into()));
    }
    assemble(&inst.blocks, n, inst.blocks.len() + 1, &inst.zeta, &inst.eta)
}

/// Variant with `M = N = n(n−1)/2 + 1`, each block placed in the upper
/// left corner of an `N × N` zero block.
pub fn rsdf_to_wval_padded(inst: &RsdfInstance) -> Result<WvalInstance> {
    let l = inst.dim();
    let big = l * (l.max(1) - 1) / 2 + 1;
    if inst.blocks.len() + 1 > big || l == 0 {
        return Err(Error::DimensionMismatch(format!(
            "{} blocks of size {l} do not fit the padded regime",
            inst.blocks.len()
        )));
    }
    let mut blocks: Vec<Vec<Vec<f64>>> = inst
        .blocks
        .iter()
        .map(|b| {
            let mut p = vec![vec![0.0; big]; big];
            for (i, row) in b.iter().enumerate() {
                p[i][..l].copy_from_slice(row);
            }
            p
        })
        .collect();
    blocks.resize(big - 1, vec![vec![0.0; big]; big]);
    assemble(&blocks, big, big, &inst.zeta, &inst.eta)
}

fn assemble(blocks: &[Vec<Vec<f64>>], n: usize, m: usize, zeta: &Rational, eta: &Rational) -> Result<WvalInstance> {
    let mut b = ComplexMatrix::<f64>::zeros(m * n, m * n);
    for (k, blk) in blocks.iter().enumerate() {
        for r in 0..n {
            for c in 0..n {
                if blk[r][c] != blk[c][r] {
                    return Err(Error::InvalidParameter(format!("block {k} is not symmetric")));
                }
                let v = Complex::new(blk[r][c], 0.0);
                b[(r, (k + 1) * n + c)] = v;
                b[((k + 1) * n + r, c)] = v;
            }
        }
    }
    let (z, e) = (to_f64(zeta), to_f64(eta));
    let (lo, hi) = ((z - e).max(0.0).sqrt(), (z + e).sqrt());
    Ok(WvalInstance {
        m,
        n,
        b: HermitianOp::new(b)?,
        gamma: (hi + lo) / 2.0,
        epsilon: (hi - lo) / 2.0,
    })
}

#[derive(Clone, Debug, Default)]
pub struct ChainOptions<'a> {
    pub net_cache: Option<&'a Path>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub vertices: usize,
    pub clique: usize,
    pub kappa: usize,
    /// `κ ≥ c`.
    pub expected_yes: bool,
    /// `1 − 1/κ`.
    pub h_value: f64,
    /// `F` at `x = √y*`, `y*` uniform on a maximum clique.
    pub rsdf_value: f64,
    pub gamma: f64,
    pub epsilon: f64,
    /// Best `tr(Bσ)` found over product states.
    pub wval_value: f64,
    pub guarantee: f64,
    /// `wval_value ≥ γ`.
    pub decided_yes: bool,
    /// Whether `guarantee < ε`, so the decision is forced by the net bound.
    pub certified: bool,
    pub consistent: bool,
    pub maximizer: ProductState,
}

pub fn verify_chain(g: &Graph, c: usize, net_delta: f64) -> Result<ChainReport> {
    verify_chain_with(g, c, net_delta, &ChainOptions::default())
}

pub fn verify_chain_with(g: &Graph, c: usize, net_delta: f64, opts: &ChainOptions) -> Result<ChainReport> {
    let n = g.n();
    if n < 2 || n > MAX_CHAIN_VERTICES {
        return Err(Error::TooLarge(format!("chain needs 2..={MAX_CHAIN_VERTICES} vertices, got {n}")));
    }
    let kappa = g.clique_number()?;
    let wmqs = clique_to_wmqs(g, c)?;
    let rsdf = wmqs_to_rsdf(&wmqs)?;
    let wval = rsdf_to_wval(&rsdf)?;

    let clique = maximum_clique(g);
    let x: Vec<f64> = (0..n)
        .map(|i| if clique.contains(&i) { (1.0 / kappa as f64).sqrt() } else { 0.0 })
        .collect();
    let rsdf_value = rsdf_objective(&rsdf.blocks, &x);

    let net = build_net_cached(wval.n, net_delta, NetKind::Real, opts.net_cache)?;
    let res = wopt_max_with(
        &wval.b,
        wval.m,
        wval.n,
        &net,
        WoptOptions {
            side: Side::B,
            ..WoptOptions::default()
        },
    )?;
    let decided_yes = res.value >= wval.gamma;
    let expected_yes = kappa >= c;
    Ok(ChainReport {
        vertices: n,
        clique: c,
        kappa,
        expected_yes,
        h_value: 1.0 - 1.0 / kappa as f64,
        rsdf_value,
        gamma: wval.gamma,
        epsilon: wval.epsilon,
        wval_value: res.value,
        guarantee: res.guarantee,
        decided_yes,
        certified: res.guarantee < wval.epsilon,
        consistent: decided_yes == expected_yes,
        maximizer: res.maximizer,
    })
}

fn maximum_clique(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut best = vec![0];
    for mask in 1u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if members.len() > best.len()
            && members
                .iter()
                .enumerate()
                .all(|(a, &i)| members[a + 1..].iter().all(|&j| g.has_edge(i, j)))
        {
            best = members;
        }
    }
    best
}

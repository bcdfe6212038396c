//! Search for Bose-symmetric (optionally PPT) extensions of `ρ` to `k`
//! copies of subsystem A.
//!
//! Extensions are parametrized directly on `Sym^k(C^M) ⊗ C^N`. Feasibility
//! is a two-set problem between a product of PSD cones and the affine set
//! of operators whose one-copy marginal is `ρ`, handled by projection
//! methods only.

pub mod subspace;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{eigh, partial_transpose_matrix, ComplexMatrix, DensityMatrix, HermitianOp, Lu, Subsystem};
use crate::nets::DeltaNet;
use crate::onesided::{Outcome, Reason, Verdict};
use crate::tolerance;
use crate::witness::wsep_solve;

pub use subspace::{split_isometry, sym_dim, sym_subspace, SymSubspace};

type Mat = ComplexMatrix<f64>;

/// Default bound on `dim Sym^k · N`.
pub const MAX_AMBIENT_DIM: usize = 512;

/// Residual above which a failed search is read as entanglement.
pub const ENTANGLED_RESIDUAL: f64 = 1e-3;

/// `⌈4m/δ⌉`, snapping to the nearest integer when within rounding noise.
pub fn kbar(m: usize, delta: f64) -> usize {
    assert!(delta > 0.0, "accuracy must be positive");
    let q = 4.0 * m as f64 / delta;
    let r = q.round();
    if (q - r).abs() <= 1e-9 * q.max(1.0) {
        r as usize
    } else {
        q.ceil() as usize
    }
}

/// Trace-norm distance bound `4m/k` from the de Finetti theorem.
pub fn definetti_gap(m: usize, k: usize) -> f64 {
    assert!(k >= 1, "at least one copy");
    4.0 * m as f64 / k as f64
}

#[derive(Clone, Debug)]
pub struct ExtensionProblem {
    pub rho: DensityMatrix<f64>,
    pub k: usize,
    pub ppt: bool,
}

impl ExtensionProblem {
    pub fn new(rho: DensityMatrix<f64>, k: usize, ppt: bool) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("extension to {k} copies")));
        }
        Ok(Self { rho, k, ppt })
    }

    pub fn ambient_dim(&self) -> usize {
        sym_dim(self.rho.m(), self.k) * self.rho.n()
    }
}

#[derive(Clone, Debug)]
pub enum ExtensionStatus {
    /// Operator on `Sym^k ⊗ C^N`, basis index `s·N + b`.
    FoundExtension(HermitianOp<f64>),
    NoCertificate {
        residual: f64,
        /// Normalized functional with `tr(Wρ) > 0`; heuristic only.
        witness: Option<HermitianOp<f64>>,
        budget_exhausted: bool,
    },
}

#[derive(Clone, Debug)]
pub struct ExtensionResult {
    pub status: ExtensionStatus,
    pub iterations: usize,
}

impl ExtensionResult {
    pub fn is_found(&self) -> bool {
        matches!(self.status, ExtensionStatus::FoundExtension(_))
    }

    pub fn residual(&self) -> f64 {
        match &self.status {
            ExtensionStatus::FoundExtension(_) => 0.0,
            ExtensionStatus::NoCertificate { residual, .. } => *residual,
        }
    }
}

/// Lifts an operator on `Sym^k ⊗ C^N` to `(C^M)^{⊗k} ⊗ C^N`.
pub fn embed_extension(x: &HermitianOp<f64>, m: usize, k: usize, n: usize) -> Result<Mat> {
    let v = sym_subspace(m, k).isometry()?.kron(&Mat::identity(n));
    Ok(v.matmul(x.matrix()).matmul(&v.dagger()))
}

/// One conic constraint `Φ(X) ⪰ 0`, `Φ` an isometry of Hilbert–Schmidt space.
enum Constraint {
    TransposeB { dk: usize, n: usize },
    /// `G ⊗ I_N` followed by transposing the leading `Sym^l` factor.
    Copies { g: Mat, dl: usize, rest: usize },
}

impl Constraint {
    fn apply(&self, x: &Mat) -> Mat {
        match self {
            Constraint::TransposeB { dk, n } => partial_transpose_matrix(x, *dk, *n, Subsystem::B),
            Constraint::Copies { g, dl, rest } => {
                let y = g.matmul(x).matmul(&g.dagger());
                partial_transpose_matrix(&y, *dl, *rest, Subsystem::A)
            }
        }
    }

    fn adjoint(&self, y: &Mat) -> Mat {
        match self {
            Constraint::TransposeB { dk, n } => partial_transpose_matrix(y, *dk, *n, Subsystem::B),
            Constraint::Copies { g, dl, rest } => {
                let t = partial_transpose_matrix(y, *dl, *rest, Subsystem::A);
                g.dagger().matmul(&t).matmul(g)
            }
        }
    }
}

/// The marginal map `L: X ↦ Tr_{k−1 copies} X` and its adjoint.
struct Marginal {
    /// `G_1 ⊗ I_N`, rows ordered `(a, q, b)`.
    g: Mat,
    m: usize,
    mid: usize,
    n: usize,
    gram: Lu<f64>,
}

impl Marginal {
    fn new(m: usize, k: usize, n: usize) -> Result<Self> {
        let g = split_isometry(m, k, 1).kron(&Mat::identity(n));
        let mut me = Self {
            g,
            m,
            mid: sym_dim(m, k - 1),
            n,
            gram: Lu::new(&Mat::identity(1))?,
        };
        let d = m * n;
        let mut cols = Vec::with_capacity(d * d);
        for i in 0..d * d {
            let mut e = Mat::zeros(d, d);
            e.as_mut_slice()[i] = Complex::new(1.0, 0.0);
            cols.push(me.apply(&me.adjoint(&e)).into_vec());
        }
        let gram = Mat::from_fn(d * d, d * d, |r, c| cols[c][r]);
        me.gram = Lu::new(&gram)?;
        Ok(me)
    }

    fn apply(&self, x: &Mat) -> Mat {
        let y = self.g.matmul(x).matmul(&self.g.dagger());
        let (mid, n) = (self.mid, self.n);
        Mat::from_fn(self.m * n, self.m * n, |r, c| {
            let (a1, b1) = (r / n, r % n);
            let (a2, b2) = (c / n, c % n);
            (0..mid).fold(Complex::new(0.0, 0.0), |acc, q| {
                acc + y[((a1 * mid + q) * n + b1, (a2 * mid + q) * n + b2)]
            })
        })
    }

    fn adjoint(&self, r: &Mat) -> Mat {
        let (mid, n) = (self.mid, self.n);
        let big = self.m * mid * n;
        let y = Mat::from_fn(big, big, |row, col| {
            let (b1, q1, a1) = (row % n, (row / n) % mid, row / (n * mid));
            let (b2, q2, a2) = (col % n, (col / n) % mid, col / (n * mid));
            if q1 == q2 {
                r[(a1 * n + b1, a2 * n + b2)]
            } else {
                Complex::new(0.0, 0.0)
            }
        });
        self.g.dagger().matmul(&y).matmul(&self.g)
    }

    /// `(LL*)⁻¹ r`.
    fn gram_solve(&self, r: &Mat) -> Mat {
        let d = r.rows();
        Mat::from_vec(d, d, self.gram.solve(r.as_slice())).expect("square")
    }
}

struct Solver {
    marginal: Marginal,
    constraints: Vec<Constraint>,
    rho: Mat,
}

/// Point of the product space: `X` and one block per constraint.
#[derive(Clone)]
struct Point {
    blocks: Vec<Mat>,
}

impl Point {
    fn add(&self, other: &Self) -> Self {
        Point {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect(),
        }
    }

    fn sub(&self, other: &Self) -> Self {
        Point {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a - b).collect(),
        }
    }

    fn norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.frobenius_norm().powi(2)).sum::<f64>().sqrt()
    }
}

/// Eigen-clips at zero; returns the clipped matrix and the smallest eigenvalue.
fn psd_part(x: &Mat) -> (Mat, f64) {
    let e = eigh(x);
    let min = e.min();
    if min >= 0.0 {
        return (x.clone(), min);
    }
    let d = x.rows();
    let mut out = Mat::zeros(d, d);
    for (k, &lam) in e.values.iter().enumerate() {
        if lam <= 0.0 {
            continue;
        }
        let v = e.vector(k);
        for r in 0..d {
            let s = v[r] * lam;
            for c in 0..d {
                out[(r, c)] += s * v[c].conj();
            }
        }
    }
    (out, min)
}

impl Solver {
    fn new(prob: &ExtensionProblem) -> Result<Self> {
        let (m, n) = prob.rho.dims();
        let k = prob.k;
        let dk = sym_dim(m, k);
        let mut constraints = Vec::new();
        if prob.ppt {
            constraints.push(Constraint::TransposeB { dk, n });
            for l in 1..k {
                constraints.push(Constraint::Copies {
                    g: split_isometry(m, k, l).kron(&Mat::identity(n)),
                    dl: sym_dim(m, l),
                    rest: sym_dim(m, k - l) * n,
                });
            }
        }
        Ok(Self {
            marginal: Marginal::new(m, k, n)?,
            constraints,
            rho: prob.rho.matrix().clone(),
        })
    }

    fn lift(&self, x: Mat) -> Point {
        let mut blocks = Vec::with_capacity(1 + self.constraints.len());
        for c in &self.constraints {
            blocks.push(c.apply(&x).hermitian_part());
        }
        blocks.insert(0, x);
        Point { blocks }
    }

    /// Nearest point of the affine set `{(X, Φ_j X) : L X = ρ}`.
    fn project_affine(&self, p: &Point) -> Point {
        let j = self.constraints.len() as f64;
        let mut acc = p.blocks[0].clone();
        for (c, z) in self.constraints.iter().zip(&p.blocks[1..]) {
            acc = &acc + &c.adjoint(z);
        }
        let xbar = acc.scale_real(&(1.0 / (1.0 + j)));
        let r = &self.marginal.apply(&xbar) - &self.rho;
        let mu = self.marginal.gram_solve(&r);
        let x = (&xbar - &self.marginal.adjoint(&mu)).hermitian_part();
        self.lift(x)
    }

    fn project_cones(&self, p: &Point) -> (Point, f64) {
        let mut min = f64::INFINITY;
        let blocks = p
            .blocks
            .iter()
            .map(|b| {
                let (c, lam) = psd_part(b);
                min = min.min(lam);
                c
            })
            .collect();
        (Point { blocks }, min)
    }

    /// `−(LL*)⁻¹ L(Σ Φ_j* d_j)` for the negative parts `d` of an affine point.
    fn witness(&self, affine: &Point, cone: &Point) -> Option<HermitianOp<f64>> {
        let d = cone.sub(affine);
        let mut g = d.blocks[0].clone();
        for (c, z) in self.constraints.iter().zip(&d.blocks[1..]) {
            g = &g + &c.adjoint(z);
        }
        let w = self.marginal.gram_solve(&self.marginal.apply(&g)).scale_real(&-1.0).hermitian_part();
        let norm = w.frobenius_norm();
        (norm > 1e-14).then(|| HermitianOp::symmetrize(w.scale_real(&(1.0 / norm))))
    }
}

/// Douglas–Rachford search for a feasible point, then Dykstra's iteration
/// to measure the gap when none turns up. `tol` is the largest admissible
/// negative eigenvalue of the extension and of each constrained image.
pub fn find_extension(prob: &ExtensionProblem, max_iters: usize, tol: f64) -> Result<ExtensionResult> {
    find_extension_limited(prob, max_iters, tol, MAX_AMBIENT_DIM)
}

pub fn find_extension_limited(
    prob: &ExtensionProblem,
    max_iters: usize,
    tol: f64,
    max_dim: usize,
) -> Result<ExtensionResult> {
    let dim = prob.ambient_dim();
    if dim > max_dim {
        return Err(Error::TooLarge(format!(
            "extension space of dimension {dim} exceeds {max_dim}"
        )));
    }
    let solver = Solver::new(prob)?;
    let start = solver.project_affine(&solver.lift(Mat::zeros(dim, dim)));
    let (found, used) = douglas_rachford(&solver, &start, max_iters - max_iters / 10, tol);
    let last = match found {
        Ok(x) => {
            return Ok(ExtensionResult {
                status: ExtensionStatus::FoundExtension(x),
                iterations: used,
            })
        }
        Err(last) => last,
    };
    let mut res = dykstra(&solver, last, max_iters - used, tol);
    res.iterations += used;
    Ok(res)
}

/// Shadow sequence `a_k = P_aff(2P_cone(z) − z)`; stops at the first `a_k`
/// inside every cone, or once the step `‖z_{k+1} − z_k‖` settles at a
/// nonzero length, which signals an empty intersection. On failure the last
/// shadow point is returned.
fn douglas_rachford(
    solver: &Solver,
    start: &Point,
    budget: usize,
    tol: f64,
) -> (std::result::Result<HermitianOp<f64>, Point>, usize) {
    let mut z = start.clone();
    let mut last = start.clone();
    let mut steps: Vec<f64> = Vec::new();
    for iter in 1..=budget {
        let (c, _) = solver.project_cones(&z);
        let a = solver.project_affine(&c.add(&c).sub(&z));
        let (_, min) = solver.project_cones(&a);
        if min >= -tol {
            return (Ok(HermitianOp::symmetrize(a.blocks.into_iter().next().expect("X block"))), iter);
        }
        let step = a.sub(&c);
        let len = step.norm();
        z = z.add(&step);
        last = a;
        steps.push(len);
        if iter > 200 {
            let old = steps[iter - 101];
            if len > 1e3 * tol && (len - old).abs() < 1e-3 * len {
                return (Err(last), iter);
            }
        }
    }
    (Err(last), budget)
}

fn dykstra(solver: &Solver, start: Point, budget: usize, tol: f64) -> ExtensionResult {
    let mut x = start;
    let mut p = x.sub(&x);
    let mut q = p.clone();
    let mut history: Vec<f64> = Vec::new();
    for iter in 1..=budget {
        let (cone_of_x, min) = solver.project_cones(&x);
        if min >= -tol {
            return ExtensionResult {
                status: ExtensionStatus::FoundExtension(HermitianOp::symmetrize(x.blocks.swap_remove(0))),
                iterations: iter - 1,
            };
        }
        let residual = cone_of_x.sub(&x).norm();
        history.push(residual);

        let y = x.add(&p);
        let (c, _) = solver.project_cones(&y);
        p = y.sub(&c);
        let z = c.add(&q);
        let a = solver.project_affine(&z);
        q = z.sub(&a);
        x = a;

        if iter >= 400 {
            let old = history[iter - 200];
            if residual > 0.999 * old && residual > 10.0 * tol {
                let cone = solver.project_cones(&x).0;
                return ExtensionResult {
                    status: ExtensionStatus::NoCertificate {
                        residual,
                        witness: solver.witness(&x, &cone),
                        budget_exhausted: false,
                    },
                    iterations: iter,
                };
            }
        }
    }
    let (cone, min) = solver.project_cones(&x);
    if min >= -tol {
        return ExtensionResult {
            status: ExtensionStatus::FoundExtension(HermitianOp::symmetrize(x.blocks.swap_remove(0))),
            iterations: budget,
        };
    }
    ExtensionResult {
        status: ExtensionStatus::NoCertificate {
            residual: cone.sub(&x).norm(),
            witness: solver.witness(&x, &cone),
            budget_exhausted: true,
        },
        iterations: budget,
    }
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub kmax: Option<usize>,
    pub ppt: bool,
    pub max_iters: usize,
    pub tol: f64,
    pub entangled_residual: f64,
    pub max_dim: usize,
    /// Confirm an infeasibility verdict with the witness search.
    pub strict: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            kmax: None,
            ppt: false,
            max_iters: 5000,
            tol: tolerance::EXTENSION_PSD,
            entangled_residual: ENTANGLED_RESIDUAL,
            max_dim: MAX_AMBIENT_DIM,
            strict: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub k: usize,
    pub found: bool,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub verdict: Verdict,
    pub kbar: usize,
    pub levels: Vec<LevelReport>,
}

pub fn separability_scan(rho: &DensityMatrix<f64>, delta: f64, kmax: Option<usize>) -> Result<Verdict> {
    let opts = ScanOptions {
        kmax,
        ..ScanOptions::default()
    };
    Ok(separability_scan_with(rho, delta, &opts, None)?.verdict)
}

/// Runs `k = 2, …, min(k̄, kmax)`. In strict mode an infeasible level is
/// only reported as entangled when the witness search over `net` agrees.
pub fn separability_scan_with(
    rho: &DensityMatrix<f64>,
    delta: f64,
    opts: &ScanOptions,
    net: Option<&DeltaNet>,
) -> Result<ScanReport> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("accuracy {delta} must be positive")));
    }
    let (m, n) = rho.dims();
    let kb = kbar(m, delta);
    let top = opts.kmax.map_or(kb, |k| k.min(kb)).max(2);
    let mut levels = Vec::new();
    let mut verdict = Verdict::unknown(Reason::SymmetricExtension, None);
    for k in 2..=top {
        if sym_dim(m, k) * n > opts.max_dim {
            break;
        }
        let prob = ExtensionProblem::new(rho.clone(), k, opts.ppt)?;
        let res = find_extension_limited(&prob, opts.max_iters, opts.tol, opts.max_dim)?;
        let residual = res.residual();
        levels.push(LevelReport {
            k,
            found: res.is_found(),
            residual,
            iterations: res.iterations,
        });
        if res.is_found() {
            if k >= kb {
                verdict = Verdict::separable(Reason::SymmetricExtension, definetti_gap(m, k));
                break;
            }
            continue;
        }
        verdict = if residual > opts.entangled_residual {
            if opts.strict {
                confirm(rho, residual, net)?
            } else {
                Verdict::entangled(Reason::SymmetricExtension, residual)
            }
        } else {
            Verdict::unknown(Reason::SymmetricExtension, residual)
        };
        break;
    }
    Ok(ScanReport {
        verdict,
        kbar: kb,
        levels,
    })
}

fn confirm(rho: &DensityMatrix<f64>, residual: f64, net: Option<&DeltaNet>) -> Result<Verdict> {
    let net = net.ok_or_else(|| Error::InvalidParameter("strict mode needs a net".into()))?;
    let delta = (10.0 * net.delta()).min(1.0);
    let out = wsep_solve(rho, delta, net)?;
    Ok(if out.verdict.outcome == Outcome::Entangled {
        let mut v = Verdict::entangled(Reason::SymmetricExtension, residual);
        v.exact = true;
        v
    } else {
        Verdict::unknown(Reason::SymmetricExtension, residual)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell, werner};

    fn ket(v: &[f64]) -> Vec<Complex<f64>> {
        v.iter().map(|&x| Complex::new(x, 0.0)).collect()
    }

    #[test]
    fn kbar_values() {
        assert_eq!(kbar(2, 0.5), 16);
        assert_eq!(kbar(2, 8.0), 1);
        assert_eq!(kbar(3, 0.1), 120);
        assert_eq!(kbar(2, 2.0), 4);
    }

    #[test]
    fn gap_values() {
        assert_eq!(definetti_gap(2, 16), 0.5);
        assert_eq!(definetti_gap(2, 8), 1.0);
        assert!((definetti_gap(3, 120) - 0.1).abs() < 1e-15);
        for &(m, d) in &[(2, 0.5), (3, 0.1), (2, 0.3), (4, 0.7), (3, 1.9)] {
            assert!(definetti_gap(m, kbar(m, d)) <= d + 1e-12);
        }
    }

    #[test]
    fn marginal_adjoint_identity() {
        let mg = Marginal::new(2, 3, 2).unwrap();
        let x = Mat::from_fn(8, 8, |r, c| Complex::new((r * 3 + c) as f64 * 0.1, r as f64 - c as f64));
        let y = Mat::from_fn(4, 4, |r, c| Complex::new(1.0 / (1 + r + c) as f64, (r * c) as f64));
        let lhs = mg.apply(&x).dagger().trace_product(&y);
        let rhs = x.dagger().trace_product(&mg.adjoint(&y));
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn product_state_extends_with_ppt() {
        let rho = DensityMatrix::product_pure(&ket(&[1.0, 0.0]), &ket(&[1.0, 0.0])).unwrap();
        let prob = ExtensionProblem::new(rho.clone(), 3, true).unwrap();
        let res = find_extension(&prob, 5000, 1e-9).unwrap();
        let ExtensionStatus::FoundExtension(x) = res.status else {
            panic!("no extension: {:?}", res.status);
        };
        // |000⟩ ⊗ |0⟩ is the first basis vector
        assert!((x.matrix()[(0, 0)].re - 1.0).abs() < 1e-6);
        let full = embed_extension(&x, 2, 3, 2).unwrap();
        let back = partial_trace_matrix_copies(&full, 2, 3, 2);
        assert!(back.distance(rho.matrix()) < 1e-7);
    }

    /// Traces out all but the first copy of A.
    fn partial_trace_matrix_copies(full: &Mat, m: usize, k: usize, n: usize) -> Mat {
        let rest = m.pow(k as u32 - 1);
        Mat::from_fn(m * n, m * n, |r, c| {
            let (a1, b1) = (r / n, r % n);
            let (a2, b2) = (c / n, c % n);
            (0..rest).fold(Complex::new(0.0, 0.0), |acc, q| {
                acc + full[((a1 * rest + q) * n + b1, (a2 * rest + q) * n + b2)]
            })
        })
    }

    #[test]
    fn maximally_mixed_extends() {
        let rho = DensityMatrix::<f64>::maximally_mixed(2, 2);
        let res = find_extension(&ExtensionProblem::new(rho, 4, true).unwrap(), 2000, 1e-9).unwrap();
        assert!(res.is_found());
    }

    #[test]
    fn bell_has_no_two_copy_extension() {
        let rho = bell();
        let res = find_extension(&ExtensionProblem::new(rho.clone(), 2, false).unwrap(), 5000, 1e-9).unwrap();
        let ExtensionStatus::NoCertificate { residual, witness, .. } = res.status else {
            panic!("Bell state extended");
        };
        assert!(residual > 1e-2, "residual {residual}");
        let w = witness.unwrap();
        assert!(w.hs_inner(rho.op()) > 0.0);
    }

    #[test]
    fn scans() {
        let mixed = DensityMatrix::<f64>::maximally_mixed(2, 2);
        let v = separability_scan(&mixed, 2.0, None).unwrap();
        assert_eq!(v.outcome, Outcome::SeparableAssured);
        let v = separability_scan(&bell(), 0.5, None).unwrap();
        assert_eq!(v.outcome, Outcome::Entangled);
        let v = separability_scan(&werner(2, 0.2).unwrap(), 1.0, None).unwrap();
        assert_eq!(v.outcome, Outcome::SeparableAssured);
    }
}

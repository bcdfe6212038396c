//! Weak optimization of `tr(Aσ)` over separable `σ` by a net scan.
//!
//! For each net point `x` on one side the best partner is the top
//! eigenvector of the conditioned operator `B_x = ⟨x|A|x⟩`. If the net has
//! covering radius `δ`, the best pair found is within `2δ‖A‖₂` of the
//! maximum over all product states, which equals the maximum over the
//! separable set by linearity.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{eigvalsh, kron_vec, ComplexMatrix, HermitianOp};
use crate::nets::{to_complex, DeltaNet, NetKind};

type C64 = Complex<f64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductState {
    pub alpha: Vec<C64>,
    pub beta: Vec<C64>,
}

impl ProductState {
    pub fn vector(&self) -> Vec<C64> {
        kron_vec(&self.alpha, &self.beta)
    }

    /// `|α⟩⟨α| ⊗ |β⟩⟨β|`.
    pub fn projector(&self) -> HermitianOp<f64> {
        HermitianOp::projector(&self.vector())
    }
}

/// Which factor the net discretizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Side {
    #[default]
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WoptMode {
    /// Maximize `⟨αβ|A|αβ⟩`.
    #[default]
    Signed,
    /// Maximize `|⟨αβ|A|αβ⟩|`.
    Abs,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WoptOptions {
    pub side: Side,
    pub mode: WoptMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WoptResult {
    pub maximizer: ProductState,
    /// Quadratic form at `maximizer`.
    pub value: f64,
    /// `2 δ ‖A‖₂`.
    pub guarantee: f64,
    pub net_index: usize,
}

/// `⟨α⊗β|A|α⊗β⟩`.
pub fn quadratic_form(a: &HermitianOp<f64>, alpha: &[C64], beta: &[C64]) -> f64 {
    a.expectation(&kron_vec(alpha, beta))
}

/// `(B_x)_{jk} = ⟨x⊗e_j|A|x⊗e_k⟩`.
pub fn conditioned_operator(a: &HermitianOp<f64>, m: usize, n: usize, x: &[C64]) -> Result<HermitianOp<f64>> {
    check_shape(a, m, n)?;
    if x.len() != m {
        return Err(Error::DimensionMismatch(format!("vector of length {} on C^{m}", x.len())));
    }
    let blocks = Blocks::new(a.matrix(), m, n);
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    blocks.condition(x, &mut out);
    let mut full = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            full[(j, k)] = out[j * n + k];
            full[(k, j)] = out[j * n + k].conj();
        }
    }
    Ok(HermitianOp::symmetrize(full))
}

/// The operator with the two tensor factors exchanged.
pub fn swap_factors(a: &HermitianOp<f64>, m: usize, n: usize) -> HermitianOp<f64> {
    let x = a.matrix();
    HermitianOp::symmetrize(ComplexMatrix::from_fn(m * n, m * n, |r, c| {
        let (br, ar) = (r / m, r % m);
        let (bc, ac) = (c / m, c % m);
        x[(ar * n + br, ac * n + bc)]
    }))
}

fn check_shape(a: &HermitianOp<f64>, m: usize, n: usize) -> Result<()> {
    if a.dim() != m * n {
        return Err(Error::DimensionMismatch(format!(
            "operator of dimension {} on a {m}x{n} system",
            a.dim()
        )));
    }
    Ok(())
}

/// `n×n` blocks `A_{ii'}` for `i ≤ i'`.
struct Blocks {
    m: usize,
    n: usize,
    data: Vec<C64>,
}

impl Blocks {
    fn new(a: &ComplexMatrix<f64>, m: usize, n: usize) -> Self {
        let mut data = Vec::with_capacity(m * (m + 1) / 2 * n * n);
        for i in 0..m {
            for ip in i..m {
                for j in 0..n {
                    for k in 0..n {
                        data.push(a[(i * n + j, ip * n + k)]);
                    }
                }
            }
        }
        Self { m, n, data }
    }

    // Upper triangle of B_x, row-major in `out`.
    fn condition(&self, x: &[C64], out: &mut [C64]) {
        let (m, n) = (self.m, self.n);
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        let mut blk = 0;
        for i in 0..m {
            for ip in i..m {
                let block = &self.data[blk * n * n..(blk + 1) * n * n];
                blk += 1;
                if i == ip {
                    let w = x[i].norm_sqr();
                    for j in 0..n {
                        for k in j..n {
                            out[j * n + k] += block[j * n + k] * w;
                        }
                    }
                } else {
                    // conj(x_i) x_i' A_{ii'} + conj(x_i') x_i A_{i'i}, with A_{i'i} = A_{ii'}†
                    let w = x[i].conj() * x[ip];
                    let wc = w.conj();
                    for j in 0..n {
                        for k in j..n {
                            out[j * n + k] += w * block[j * n + k] + wc * block[k * n + j].conj();
                        }
                    }
                }
            }
        }
    }
}

/// The real entries of `B_x` (upper triangle; diagonal real parts, then
/// real and imaginary parts of off-diagonal entries) as quadratic forms in
/// the net's real coordinates.
struct QuadraticMap {
    dim: usize,
    q: usize,
    outputs: usize,
    // coeff[o * monomials + t], monomials x_a x_b with a ≤ b in row order
    coeff: Vec<f64>,
}

impl QuadraticMap {
    fn new(blocks: &Blocks, kind: NetKind, p: usize, q: usize) -> Self {
        let dim = kind.real_dim(p);
        let outputs = q * q;
        let eval = |raw: &[f64]| -> Vec<f64> {
            let x = to_complex(kind, p, raw);
            let mut buf = vec![C64::new(0.0, 0.0); q * q];
            blocks.condition(&x, &mut buf);
            let mut out = Vec::with_capacity(outputs);
            for j in 0..q {
                out.push(buf[j * q + j].re);
            }
            for j in 0..q {
                for k in j + 1..q {
                    out.push(buf[j * q + k].re);
                    out.push(buf[j * q + k].im);
                }
            }
            out
        };
        let unit = |a: usize| {
            let mut e = vec![0.0; dim];
            e[a] = 1.0;
            e
        };
        let diag: Vec<Vec<f64>> = (0..dim).map(|a| eval(&unit(a))).collect();
        let monomials = dim * (dim + 1) / 2;
        let mut coeff = vec![0.0; outputs * monomials];
        let mut t = 0;
        for a in 0..dim {
            for b in a..dim {
                let vals = if a == b {
                    diag[a].clone()
                } else {
                    let mut e = unit(a);
                    e[b] = 1.0;
                    eval(&e)
                        .iter()
                        .zip(diag[a].iter().zip(&diag[b]))
                        .map(|(f, (fa, fb))| f - fa - fb)
                        .collect()
                };
                for (o, v) in vals.into_iter().enumerate() {
                    coeff[o * monomials + t] = v;
                }
                t += 1;
            }
        }
        Self { dim, q, outputs, coeff }
    }

    #[inline]
    fn eval(&self, raw: &[f64], mono: &mut [f64], out: &mut [f64]) {
        let mut t = 0;
        for a in 0..self.dim {
            let xa = raw[a];
            for &xb in &raw[a..self.dim] {
                mono[t] = xa * xb;
                t += 1;
            }
        }
        for (o, slot) in out.iter_mut().enumerate().take(self.outputs) {
            let row = &self.coeff[o * t..(o + 1) * t];
            *slot = row.iter().zip(&mono[..t]).map(|(c, m)| c * m).sum();
        }
    }

    /// Best `(value, index)` over `range` for a qubit partner with a
    /// fixed real dimension; lets the compiler unroll the hot loop.
    fn scan_qubit<const D: usize, const T: usize>(
        &self,
        net: &DeltaNet,
        range: std::ops::Range<usize>,
        mode: WoptMode,
    ) -> (f64, usize) {
        debug_assert!(self.dim == D && T == D * (D + 1) / 2 && self.q == 2);
        let mut coeff = [[0.0; T]; 4];
        for (o, row) in coeff.iter_mut().enumerate() {
            row.copy_from_slice(&self.coeff[o * T..(o + 1) * T]);
        }
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for i in range {
            let raw: &[f64; D] = net.raw(i).try_into().expect("point dimension");
            let mut mono = [0.0; T];
            let mut t = 0;
            for a in 0..D {
                for b in a..D {
                    mono[t] = raw[a] * raw[b];
                    t += 1;
                }
            }
            let mut out = [0.0; 4];
            for o in 0..4 {
                let mut acc = 0.0;
                for t in 0..T {
                    acc += coeff[o][t] * mono[t];
                }
                out[o] = acc;
            }
            let mid = 0.5 * (out[0] + out[1]);
            let half = 0.5 * (out[0] - out[1]);
            let rad = (half * half + out[2] * out[2] + out[3] * out[3]).sqrt();
            let value = match mode {
                WoptMode::Signed => mid + rad,
                WoptMode::Abs => mid.abs() + rad,
            };
            if value > best.0 {
                best = (value, i);
            }
        }
        best
    }

    fn scan_generic(&self, net: &DeltaNet, range: std::ops::Range<usize>, mode: WoptMode) -> (f64, usize) {
        let mut mono = vec![0.0; self.dim * (self.dim + 1) / 2];
        let mut out = vec![0.0; self.outputs];
        let mut buf = vec![C64::new(0.0, 0.0); self.q * self.q];
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for i in range {
            self.eval(net.raw(i), &mut mono, &mut out);
            let value = self.score(&out, &mut buf, mode);
            // strict comparison keeps the lowest index among ties
            if value > best.0 {
                best = (value, i);
            }
        }
        best
    }

    fn scan(&self, net: &DeltaNet, range: std::ops::Range<usize>, mode: WoptMode) -> (f64, usize) {
        match (self.q, self.dim) {
            (2, 2) => self.scan_qubit::<2, 3>(net, range, mode),
            (2, 3) => self.scan_qubit::<3, 6>(net, range, mode),
            (2, 4) => self.scan_qubit::<4, 10>(net, range, mode),
            (2, 5) => self.scan_qubit::<5, 15>(net, range, mode),
            (2, 6) => self.scan_qubit::<6, 21>(net, range, mode),
            _ => self.scan_generic(net, range, mode),
        }
    }

    fn score(&self, out: &[f64], buf: &mut [C64], mode: WoptMode) -> f64 {
        let q = self.q;
        if q == 2 {
            let (d0, d1) = (out[0], out[1]);
            let mid = 0.5 * (d0 + d1);
            let half = 0.5 * (d0 - d1);
            let rad = (half * half + out[2] * out[2] + out[3] * out[3]).sqrt();
            return match mode {
                WoptMode::Signed => mid + rad,
                WoptMode::Abs => mid.abs() + rad,
            };
        }
        for j in 0..q {
            buf[j * q + j] = C64::new(out[j], 0.0);
        }
        let mut o = q;
        for j in 0..q {
            for k in j + 1..q {
                buf[j * q + k] = C64::new(out[o], out[o + 1]);
                o += 2;
            }
        }
        score(buf, q, mode)
    }
}

fn extreme_eigenvalues(upper: &[C64], n: usize) -> (f64, f64) {
    match n {
        1 => (upper[0].re, upper[0].re),
        2 => {
            let (a, d, b) = (upper[0].re, upper[3].re, upper[1].norm());
            let mid = 0.5 * (a + d);
            let rad = (0.5 * (a - d)).hypot(b);
            (mid + rad, mid - rad)
        }
        _ => {
            let h = ComplexMatrix::from_fn(n, n, |j, k| {
                if j <= k {
                    upper[j * n + k]
                } else {
                    upper[k * n + j].conj()
                }
            });
            let e = eigvalsh(&h);
            (e[0], e[n - 1])
        }
    }
}

fn score(upper: &[C64], n: usize, mode: WoptMode) -> f64 {
    let (hi, lo) = extreme_eigenvalues(upper, n);
    match mode {
        WoptMode::Signed => hi,
        WoptMode::Abs => hi.abs().max(lo.abs()),
    }
}

/// Signed maximum with the net on subsystem A.
pub fn wopt_max(a: &HermitianOp<f64>, m: usize, n: usize, net: &DeltaNet) -> Result<WoptResult> {
    wopt_max_with(a, m, n, net, WoptOptions::default())
}

pub fn wopt_max_with(
    a: &HermitianOp<f64>,
    m: usize,
    n: usize,
    net: &DeltaNet,
    opts: WoptOptions,
) -> Result<WoptResult> {
    check_shape(a, m, n)?;
    let (op, p, q) = match opts.side {
        Side::A => (a.clone(), m, n),
        Side::B => (swap_factors(a, m, n), n, m),
    };
    if net.m() != p {
        return Err(Error::DimensionMismatch(format!(
            "net on C^{} used for a factor of dimension {p}",
            net.m()
        )));
    }
    let blocks = Blocks::new(op.matrix(), p, q);
    let qmap = QuadraticMap::new(&blocks, net.kind(), p, q);
    const CHUNK: usize = 1 << 15;
    let chunks = net.len().div_ceil(CHUNK);
    let (_, best) = (0..chunks)
        .into_par_iter()
        .map(|c| qmap.scan(net, c * CHUNK..((c + 1) * CHUNK).min(net.len()), opts.mode))
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |l, r| {
                if r.0 > l.0 || (r.0 == l.0 && r.1 < l.1) {
                    r
                } else {
                    l
                }
            },
        );
    if best == usize::MAX {
        return Err(Error::InvalidParameter("empty net".into()));
    }

    let x = net.point(best);
    let b = conditioned_operator(&op, p, q, &x)?;
    let eig = b.eig();
    let k = match opts.mode {
        WoptMode::Abs if eig.min().abs() > eig.max().abs() => q - 1,
        _ => 0,
    };
    let y = eig.vector(k);
    let maximizer = match opts.side {
        Side::A => ProductState { alpha: x, beta: y },
        Side::B => ProductState { alpha: y, beta: x },
    };
    let value = quadratic_form(a, &maximizer.alpha, &maximizer.beta);
    Ok(WoptResult {
        maximizer,
        value,
        guarantee: 2.0 * net.delta() * a.frobenius_norm(),
        net_index: best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::{build_net, NetKind};
    use crate::states::{maximally_entangled, random_hermitian, random_unit_vector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zz() -> HermitianOp<f64> {
        let z = HermitianOp::symmetrize(ComplexMatrix::diagonal(&[1.0, -1.0]));
        z.kron(&z)
    }

    #[test]
    fn conditioned_zz_on_zero_is_z() {
        let x = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let b = conditioned_operator(&zz(), 2, 2, &x).unwrap();
        assert!(b.matrix().distance(&ComplexMatrix::diagonal(&[1.0, -1.0])) < 1e-15);
        let id = conditioned_operator(&HermitianOp::identity(6), 2, 3, &x).unwrap();
        assert!(id.matrix().distance(&ComplexMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn conditioned_operator_reproduces_quadratic_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (m, n) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let a = random_hermitian(m * n, &mut rng);
            let x = random_unit_vector(m, &mut rng);
            let y = random_unit_vector(n, &mut rng);
            let b = conditioned_operator(&a, m, n, &x).unwrap();
            assert!((b.expectation(&y) - quadratic_form(&a, &x, &y)).abs() < 1e-10);
        }
    }

    #[test]
    fn zz_maximum() {
        let a = zz().scale(0.5);
        let net = build_net(2, 0.1).unwrap();
        let r = wopt_max(&a, 2, 2, &net).unwrap();
        assert!(r.value >= 0.5 - 2.0 * 0.1);
        assert!(r.value <= 0.5 + 1e-12);
        assert!((r.guarantee - 0.2).abs() < 1e-12);
    }

    #[test]
    fn constant_form() {
        let a = HermitianOp::identity(4).scale(-0.5);
        let r = wopt_max(&a, 2, 2, &build_net(2, 0.5).unwrap()).unwrap();
        assert!((r.value + 0.5).abs() < 1e-12);
    }

    #[test]
    fn bell_projector_product_maximum_is_half() {
        let a = maximally_entangled(2).op().clone();
        let coarse = wopt_max(&a, 2, 2, &build_net(2, 0.2).unwrap()).unwrap();
        let fine = wopt_max(&a, 2, 2, &build_net(2, 0.05).unwrap()).unwrap();
        assert!(fine.value <= 0.5 + 1e-12 && fine.value >= 0.5 - 0.1);
        assert!(coarse.value >= fine.value - 2.0 * 0.2);
    }

    #[test]
    fn value_matches_maximizer() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_hermitian(6, &mut rng);
        let a = a.scale(1.0 / a.frobenius_norm());
        let net = build_net(2, 0.3).unwrap();
        let r = wopt_max(&a, 2, 3, &net).unwrap();
        let again = quadratic_form(&a, &r.maximizer.alpha, &r.maximizer.beta);
        assert!((again - r.value).abs() < 1e-9);
    }

    #[test]
    fn sides_and_kinds_agree_within_guarantee() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_hermitian(6, &mut rng);
        let a = a.scale(1.0 / a.frobenius_norm());
        let on_a = wopt_max(&a, 2, 3, &DeltaNet::build(2, 0.1, NetKind::Projective).unwrap()).unwrap();
        let on_b = wopt_max_with(
            &a,
            2,
            3,
            &DeltaNet::build(3, 0.2, NetKind::Projective).unwrap(),
            WoptOptions { side: Side::B, mode: WoptMode::Signed },
        )
        .unwrap();
        assert!((on_a.value - on_b.value).abs() <= on_a.guarantee.max(on_b.guarantee));
        assert_eq!(on_b.maximizer.alpha.len(), 2);
        assert_eq!(on_b.maximizer.beta.len(), 3);
    }

    #[test]
    fn abs_mode_prefers_large_negative() {
        let a = HermitianOp::symmetrize(ComplexMatrix::diagonal(&[0.1, -0.9, 0.0, 0.0]));
        let net = build_net(2, 0.2).unwrap();
        let signed = wopt_max(&a, 2, 2, &net).unwrap();
        let abs = wopt_max_with(&a, 2, 2, &net, WoptOptions { side: Side::A, mode: WoptMode::Abs }).unwrap();
        assert!(signed.value > 0.0);
        assert!(abs.value < -0.5);
    }

    #[test]
    fn wrong_net_dimension() {
        let net = build_net(3, 0.5).unwrap();
        assert!(wopt_max(&zz(), 2, 2, &net).is_err());
    }
}

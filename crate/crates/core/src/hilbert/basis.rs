//! Orthonormal Hermitian basis of `H_{M,N}` and the Bloch map `v`.
//!
//! Local generators for dimension `d`, in order:
//! 0. `I/√d`
//! 1. symmetric `(|j⟩⟨k| + |k⟩⟨j|)/√2` for `j < k`, lexicographic
//! 2. antisymmetric `(−i|j⟩⟨k| + i|k⟩⟨j|)/√2`, same order
//! 3. diagonal `(Σ_{j<l} |j⟩⟨j| − l|l⟩⟨l|)/√(l(l+1))` for `l = 1..d−1`
//!
//! Bipartite element `a·N² + b` is `G^A_a ⊗ G^B_b`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use super::operator::HermitianOp;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Nonzero entries `(row, col, value)` of a local generator.
#[derive(Clone, Debug)]
struct Sparse<T> {
    entries: Vec<(usize, usize, Complex<T>)>,
}

fn local_generators<T: Real>(d: usize) -> Vec<Sparse<T>> {
    let mut out = Vec::with_capacity(d * d);
    let zero = T::zero();
    out.push(Sparse {
        entries: (0..d)
            .map(|i| (i, i, Complex::new(T::one() / T::lit(d as f64).sqrt(), zero)))
            .collect(),
    });
    let h = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|j| (j + 1..d).map(move |k| (j, k))).collect();
    for &(j, k) in &pairs {
        out.push(Sparse {
            entries: vec![(j, k, Complex::new(h, zero)), (k, j, Complex::new(h, zero))],
        });
    }
    for &(j, k) in &pairs {
        out.push(Sparse {
            entries: vec![(j, k, Complex::new(zero, -h)), (k, j, Complex::new(zero, h))],
        });
    }
    for l in 1..d {
        let norm = T::lit((l * (l + 1)) as f64).sqrt();
        let mut entries: Vec<_> = (0..l).map(|j| (j, j, Complex::new(T::one() / norm, zero))).collect();
        entries.push((l, l, Complex::new(-T::lit(l as f64) / norm, zero)));
        out.push(Sparse { entries });
    }
    out
}

/// Real coordinates `tr(X_i A)`, `i = 1..M²N²−1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BlochVector<T>(pub Vec<T>);

impl<T: Real> BlochVector<T> {
    pub fn zeros(len: usize) -> Self {
        Self(vec![T::zero(); len])
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[i] = T::one();
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn dot(&self, other: &Self) -> T {
        self.0.iter().zip(&other.0).map(|(a, b)| *a * *b).sum()
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }
}

/// Tensor-product Gell-Mann basis for `C^M ⊗ C^N`.
#[derive(Clone, Debug)]
pub struct HermitianBasis<T> {
    m: usize,
    n: usize,
    local_a: Vec<Sparse<T>>,
    local_b: Vec<Sparse<T>>,
}

pub fn hermitian_basis<T: Real>(m: usize, n: usize) -> HermitianBasis<T> {
    HermitianBasis::new(m, n)
}

impl<T: Real> HermitianBasis<T> {
    pub fn new(m: usize, n: usize) -> Self {
        assert!(m >= 1 && n >= 1, "basis dimensions must be positive");
        Self {
            m,
            n,
            local_a: local_generators(m),
            local_b: local_generators(n),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `M²N²`.
    pub fn len(&self) -> usize {
        self.m * self.m * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Bloch dimension `M²N² − 1`.
    pub fn bloch_len(&self) -> usize {
        self.len() - 1
    }

    fn split(&self, i: usize) -> (&Sparse<T>, &Sparse<T>) {
        let nb = self.n * self.n;
        (&self.local_a[i / nb], &self.local_b[i % nb])
    }

    /// Dense element `X_i`.
    pub fn element(&self, i: usize) -> HermitianOp<T> {
        assert!(i < self.len(), "basis index out of range");
        let d = self.m * self.n;
        let mut x = ComplexMatrix::zeros(d, d);
        let (ga, gb) = self.split(i);
        for &(ra, ca, va) in &ga.entries {
            for &(rb, cb, vb) in &gb.entries {
                x[(ra * self.n + rb, ca * self.n + cb)] = va * vb;
            }
        }
        HermitianOp::symmetrize(x)
    }

    pub fn elements(&self) -> Vec<HermitianOp<T>> {
        (0..self.len()).map(|i| self.element(i)).collect()
    }

    /// `tr(X_i A)`.
    pub fn coordinate(&self, a: &ComplexMatrix<T>, i: usize) -> T {
        let (ga, gb) = self.split(i);
        let mut acc = Complex::new(T::zero(), T::zero());
        for &(ra, ca, va) in &ga.entries {
            for &(rb, cb, vb) in &gb.entries {
                acc = acc + va * vb * a[(ca * self.n + cb, ra * self.n + rb)];
            }
        }
        acc.re
    }

    fn check_dim(&self, a: &HermitianOp<T>) -> Result<()> {
        if a.dim() != self.m * self.n {
            return Err(Error::DimensionMismatch(format!(
                "operator of dimension {} for a {}x{} basis",
                a.dim(),
                self.m,
                self.n
            )));
        }
        Ok(())
    }

    pub fn to_bloch(&self, a: &HermitianOp<T>) -> Result<BlochVector<T>> {
        self.check_dim(a)?;
        Ok(BlochVector(
            (1..self.len()).map(|i| self.coordinate(a.matrix(), i)).collect(),
        ))
    }

    /// The Hermitian operator with Bloch vector `coords` and trace `trace`.
    pub fn from_bloch(&self, coords: &BlochVector<T>, trace: T) -> Result<HermitianOp<T>> {
        if coords.len() != self.bloch_len() {
            return Err(Error::DimensionMismatch(format!(
                "Bloch vector of length {}, expected {}",
                coords.len(),
                self.bloch_len()
            )));
        }
        let d = self.m * self.n;
        let mut x = ComplexMatrix::zeros(d, d);
        let diag = trace / T::lit(d as f64);
        for k in 0..d {
            x[(k, k)].re = diag;
        }
        for (i, &w) in coords.0.iter().enumerate() {
            if w == T::zero() {
                continue;
            }
            let (ga, gb) = self.split(i + 1);
            for &(ra, ca, va) in &ga.entries {
                for &(rb, cb, vb) in &gb.entries {
                    let slot = &mut x[(ra * self.n + rb, ca * self.n + cb)];
                    *slot = *slot + va * vb * w;
                }
            }
        }
        Ok(HermitianOp::symmetrize(x))
    }
}

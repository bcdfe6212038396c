//! Symmetric subspace `Sym^k(C^m)` in the occupation-number basis.

use std::collections::HashMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hilbert::ComplexMatrix;

/// Largest `m^k` for which the dense isometry is materialized.
pub const MAX_TENSOR_DIM: usize = 1 << 16;

/// `C(n, r)` as an exact integer, saturating at `u128::MAX`.
pub fn binomial(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// `d_{S_k} = C(m + k − 1, k)`.
pub fn sym_dim(m: usize, k: usize) -> usize {
    binomial((m + k - 1) as u64, k as u64) as usize
}

#[derive(Clone, Debug)]
pub struct SymSubspace {
    pub m: usize,
    pub k: usize,
    pub dim_sk: usize,
    /// Occupation vectors `(n_0, …, n_{m−1})`, `Σ n_i = k`, in the order of
    /// the basis: nondecreasing index strings in lexicographic order.
    pub occupations: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

pub fn sym_subspace(m: usize, k: usize) -> SymSubspace {
    SymSubspace::new(m, k)
}

impl SymSubspace {
    pub fn new(m: usize, k: usize) -> Self {
        assert!(m >= 1, "symmetric subspace of C^0");
        let mut occupations = Vec::new();
        let mut string = vec![0usize; k];
        loop {
            let mut occ = vec![0usize; m];
            for &i in &string {
                occ[i] += 1;
            }
            occupations.push(occ);
            // next nondecreasing string
            let Some(pos) = (0..k).rev().find(|&p| string[p] + 1 < m) else {
                break;
            };
            let v = string[pos] + 1;
            for s in &mut string[pos..] {
                *s = v;
            }
        }
        let index = occupations.iter().cloned().enumerate().map(|(i, o)| (o, i)).collect();
        Self {
            m,
            k,
            dim_sk: occupations.len(),
            occupations,
            index,
        }
    }

    pub fn index_of(&self, occ: &[usize]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    /// Number of index strings with the given occupation.
    pub fn multiplicity(occ: &[usize]) -> f64 {
        let mut left = occ.iter().sum::<usize>() as u64;
        let mut acc = 1.0;
        for &n in occ {
            acc *= binomial(left, n as u64) as f64;
            left -= n as u64;
        }
        acc
    }

    /// Dense isometry `(C^m)^{⊗k} ← Sym^k`, columns in basis order.
    pub fn isometry(&self) -> Result<ComplexMatrix<f64>> {
        let rows = self
            .m
            .checked_pow(self.k as u32)
            .filter(|&r| r <= MAX_TENSOR_DIM)
            .ok_or_else(|| Error::TooLarge(format!("{}^{} tensor dimension", self.m, self.k)))?;
        let mut v = ComplexMatrix::zeros(rows, self.dim_sk);
        for row in 0..rows {
            let mut occ = vec![0usize; self.m];
            let mut r = row;
            for _ in 0..self.k {
                occ[r % self.m] += 1;
                r /= self.m;
            }
            let col = self.index[&occ];
            v[(row, col)] = Complex::new(1.0 / Self::multiplicity(&occ).sqrt(), 0.0);
        }
        Ok(v)
    }
}

/// Isometry `Sym^k → Sym^l ⊗ Sym^{k−l}` (first factor major) with entries
/// `√(C(p)C(q)/C(p+q))`, `C` the multiplicities.
pub fn split_isometry(m: usize, k: usize, l: usize) -> ComplexMatrix<f64> {
    assert!(l <= k);
    let full = SymSubspace::new(m, k);
    let left = SymSubspace::new(m, l);
    let right = SymSubspace::new(m, k - l);
    let mut g = ComplexMatrix::zeros(left.dim_sk * right.dim_sk, full.dim_sk);
    for (pi, p) in left.occupations.iter().enumerate() {
        for (qi, q) in right.occupations.iter().enumerate() {
            let n: Vec<usize> = p.iter().zip(q).map(|(a, b)| a + b).collect();
            let ni = full.index_of(&n).expect("occupation of size k");
            let w = SymSubspace::multiplicity(p) * SymSubspace::multiplicity(q) / SymSubspace::multiplicity(&n);
            g[(pi * right.dim_sk + qi, ni)] = Complex::new(w.sqrt(), 0.0);
        }
    }
    g
}

//! Standard and random test states.

use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{kron_vec, vec_norm, ComplexMatrix, DensityMatrix, HermitianOp};

type C64 = Complex<f64>;

fn gaussian(rng: &mut impl Rng) -> C64 {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector in `C^m`.
pub fn random_unit_vector(m: usize, rng: &mut impl Rng) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..m).map(|_| gaussian(rng)).collect();
        let norm = vec_norm(&v);
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Uniform unit vector in `R^m`.
pub fn random_real_unit_vector(m: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Haar-random unitary (Gram–Schmidt on a Ginibre matrix).
pub fn random_unitary(d: usize, rng: &mut impl Rng) -> ComplexMatrix<f64> {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<C64> = (0..d).map(|_| gaussian(rng)).collect();
        for u in &cols {
            let proj = crate::hilbert::inner(u, &v);
            for (x, y) in v.iter_mut().zip(u) {
                *x -= proj * y;
            }
        }
        let norm = vec_norm(&v);
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_fn(d, d, |r, c| cols[c][r])
}

/// Random Hermitian operator with Gaussian entries.
pub fn random_hermitian(d: usize, rng: &mut impl Rng) -> HermitianOp<f64> {
    HermitianOp::symmetrize(ComplexMatrix::from_fn(d, d, |_, _| gaussian(rng)))
}

/// `G G† / tr(G G†)` for a square Ginibre `G`; full rank almost surely.
pub fn random_density(m: usize, n: usize, rng: &mut impl Rng) -> DensityMatrix<f64> {
    let d = m * n;
    let g = ComplexMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let p = g.matmul(&g.dagger());
    let tr = p.trace().re;
    DensityMatrix::new(m, n, p.scale_real(&(1.0 / tr))).expect("Ginibre state is a density matrix")
}

/// One term `p |α⟩⟨α| ⊗ |β⟩⟨β|` of a separable decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductTerm {
    pub weight: f64,
    pub alpha: Vec<C64>,
    pub beta: Vec<C64>,
}

/// Random convex mixture of `terms` pure product states, with its
/// decomposition.
pub fn random_product_mixture(
    m: usize,
    n: usize,
    terms: usize,
    rng: &mut impl Rng,
) -> (DensityMatrix<f64>, Vec<ProductTerm>) {
    let raw: Vec<f64> = (0..terms.max(1)).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let decomposition: Vec<ProductTerm> = raw
        .into_iter()
        .map(|w| ProductTerm {
            weight: w / total,
            alpha: random_unit_vector(m, rng),
            beta: random_unit_vector(n, rng),
        })
        .collect();
    (from_decomposition(m, n, &decomposition), decomposition)
}

/// `Σ p_i |α_i⟩⟨α_i| ⊗ |β_i⟩⟨β_i|`.
pub fn from_decomposition(m: usize, n: usize, terms: &[ProductTerm]) -> DensityMatrix<f64> {
    let d = m * n;
    let mut acc = ComplexMatrix::zeros(d, d);
    for t in terms {
        let v = kron_vec(&t.alpha, &t.beta);
        acc = &acc + &ComplexMatrix::ket_bra(&v, &v).scale_real(&t.weight);
    }
    DensityMatrix::new(m, n, acc).expect("product mixture is a density matrix")
}

/// `|Φ⁺⟩ = Σ_i |ii⟩/√d`.
pub fn maximally_entangled_vector(d: usize) -> Vec<C64> {
    let s = 1.0 / (d as f64).sqrt();
    (0..d * d)
        .map(|k| if k / d == k % d { Complex::new(s, 0.0) } else { Complex::new(0.0, 0.0) })
        .collect()
}

pub fn bell() -> DensityMatrix<f64> {
    maximally_entangled(2)
}

pub fn maximally_entangled(d: usize) -> DensityMatrix<f64> {
    DensityMatrix::pure(d, d, &maximally_entangled_vector(d)).expect("unit vector")
}

/// `w |Φ⁺⟩⟨Φ⁺| + (1 − w) I/d²`; entangled iff `w > 1/(d+1)`.
pub fn werner(d: usize, w: f64) -> Result<DensityMatrix<f64>> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::InvalidParameter(format!("Werner weight {w} outside [0, 1]")));
    }
    DensityMatrix::mixture(&[(w, &maximally_entangled(d)), (1.0 - w, &DensityMatrix::maximally_mixed(d, d))])
}

/// Named state generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub name: String,
    pub m: usize,
    pub n: usize,
    #[serde(default)]
    pub weight: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub terms: Option<usize>,
}

impl StateSpec {
    pub fn new(name: &str, m: usize, n: usize) -> Self {
        Self {
            name: name.to_string(),
            m,
            n,
            weight: None,
            seed: 0,
            terms: None,
        }
    }
}

/// Names: `maxmixed`, `bell` (maximally entangled, needs `m = n`),
/// `werner` (weight `w`, `m = n`), `product` (random pure product),
/// `product_mixture` (`terms` random product terms), `random` (full rank).
pub fn state_library(spec: &StateSpec) -> Result<DensityMatrix<f64>> {
    let (m, n) = (spec.m, spec.n);
    if m < 2 || n < 2 {
        return Err(Error::InvalidParameter(format!("dimensions must be at least 2, got {m}x{n}")));
    }
    let square = || {
        if m == n {
            Ok(m)
        } else {
            Err(Error::InvalidParameter(format!("`{}` needs m = n", spec.name)))
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.name.as_str() {
        "maxmixed" => Ok(DensityMatrix::maximally_mixed(m, n)),
        "bell" => Ok(maximally_entangled(square()?)),
        "werner" => {
            let w = spec
                .weight
                .ok_or_else(|| Error::InvalidParameter("werner needs a weight".into()))?;
            werner(square()?, w)
        }
        "product" => DensityMatrix::product_pure(&random_unit_vector(m, &mut rng), &random_unit_vector(n, &mut rng)),
        "product_mixture" => Ok(random_product_mixture(m, n, spec.terms.unwrap_or(m * n), &mut rng).0),
        "random" => Ok(random_density(m, n, &mut rng)),
        other => Err(Error::UnknownState(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::Subsystem;

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(4, &mut rng);
        assert!(u.dagger().matmul(&u).distance(&ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn werner_partial_transpose_eigenvalue() {
        for w in [0.2, 0.4, 0.9] {
            let rho = werner(2, w).unwrap();
            let lmin = rho.partial_transpose(Subsystem::B).min_eigenvalue();
            assert!((lmin - (1.0 - 3.0 * w) / 4.0).abs() < 1e-12);
        }
        assert!(werner(2, 1.5).is_err());
    }

    #[test]
    fn library_is_deterministic() {
        let mut spec = StateSpec::new("product_mixture", 2, 3);
        spec.seed = 9;
        spec.terms = Some(4);
        assert_eq!(state_library(&spec).unwrap(), state_library(&spec).unwrap());
        assert!(matches!(
            state_library(&StateSpec::new("ghz", 2, 2)),
            Err(Error::UnknownState(_))
        ));
        assert!(state_library(&StateSpec::new("bell", 2, 3)).is_err());
    }

    #[test]
    fn maxmixed_and_bell() {
        let mm = state_library(&StateSpec::new("maxmixed", 2, 2)).unwrap();
        assert!(mm.matrix().distance(&ComplexMatrix::identity(4).scale_real(&0.25)) < 1e-15);
        let b = state_library(&StateSpec::new("bell", 2, 2)).unwrap();
        assert!((b.matrix()[(0, 3)].re - 0.5).abs() < 1e-15);
    }
}

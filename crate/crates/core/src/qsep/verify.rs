//! Exact checking of QSEP certificates. Everything here runs on big
//! rationals; nothing in this file may leave exact arithmetic.

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Signed, Zero};

use super::{QsepCertificate, QsepInstance};
use crate::error::{Error, Result};
use crate::hilbert::{kron_vec, ComplexMatrix};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct QsepVerification {
    pub accepted: bool,
    /// `max_i |1 − ‖α̃_i‖²‖β̃_i‖² Σ_j p̃_j|` over terms with `p̃_i ≠ 0`.
    pub normalization_defect: Rational,
    /// `tr((ρ − σ̃)²)`.
    pub distance_sq: Rational,
    pub normalization_ok: bool,
    pub distance_ok: bool,
}

/// Smallest `p` with `2^p ≥ 1/δ_p`, i.e. `⌈log₂(1/δ_p)⌉`.
pub fn bit_count(delta_p: &Rational) -> Result<u32> {
    if !delta_p.is_positive() {
        return Err(Error::InvalidParameter("δ_p must be positive".into()));
    }
    let target = delta_p.recip();
    let mut p = 0u32;
    let mut pow = Rational::one();
    while pow < target {
        pow = pow * Rational::from_integer(BigInt::from(2));
        p += 1;
    }
    Ok(p)
}

/// Whether `x = a/2^p` with `|a| ≤ 2^p`.
pub fn fits_bits(x: &Rational, p: u32) -> bool {
    let scale = BigInt::one() << p;
    let scaled = x * Rational::from_integer(scale.clone());
    scaled.is_integer() && scaled.numer().abs() <= scale
}

fn norm_sq(v: &[Complex<Rational>]) -> Rational {
    v.iter().fold(Rational::zero(), |acc, z| acc + z.norm_sqr())
}

fn check_bits(cert: &QsepCertificate, p: u32) -> Result<()> {
    for (i, t) in cert.terms.iter().enumerate() {
        let scalars = std::iter::once(&t.weight)
            .chain(t.alpha.iter().flat_map(|z| [&z.re, &z.im]))
            .chain(t.beta.iter().flat_map(|z| [&z.re, &z.im]));
        for s in scalars {
            if !fits_bits(s, p) {
                return Err(Error::BitWidth(format!("term {i}: {s} is not a {p}-bit number")));
            }
        }
    }
    Ok(())
}

/// `σ̃ = Σ p̃_i α̃_iα̃_i† ⊗ β̃_iβ̃_i†`.
pub fn certificate_state(cert: &QsepCertificate, m: usize, n: usize) -> ComplexMatrix<Rational> {
    let d = m * n;
    let mut sigma = ComplexMatrix::<Rational>::zeros(d, d);
    for t in &cert.terms {
        if t.weight.is_zero() {
            continue;
        }
        let v = kron_vec(&t.alpha, &t.beta);
        let outer = ComplexMatrix::ket_bra(&v, &v);
        let w = Complex::new(t.weight.clone(), Rational::zero());
        sigma = sigma + outer.scale(&w);
    }
    sigma
}

/// Requirements (1) and (2), decided exactly.
pub fn verify_certificate(inst: &QsepInstance, cert: &QsepCertificate) -> Result<QsepVerification> {
    let (m, n) = (inst.m, inst.n);
    if cert.terms.len() != m * m * n * n {
        return Err(Error::DimensionMismatch(format!(
            "certificate has {} terms, expected {}",
            cert.terms.len(),
            m * m * n * n
        )));
    }
    if cert.terms.iter().any(|t| t.alpha.len() != m || t.beta.len() != n) {
        return Err(Error::DimensionMismatch(format!("certificate vectors must live in C^{m} and C^{n}")));
    }
    check_bits(cert, bit_count(&inst.delta_p)?)?;

    let total = cert.terms.iter().fold(Rational::zero(), |acc, t| acc + &t.weight);
    let mut defect = Rational::zero();
    for t in cert.terms.iter().filter(|t| !t.weight.is_zero()) {
        let d = (Rational::one() - norm_sq(&t.alpha) * norm_sq(&t.beta) * &total).abs();
        if d > defect {
            defect = d;
        }
    }

    let diff = inst.rho.clone() - certificate_state(cert, m, n);
    let distance_sq = diff.as_slice().iter().fold(Rational::zero(), |acc, z| acc + z.norm_sqr());

    let normalization_ok = defect < inst.eps_prime;
    let distance_ok = distance_sq < &inst.delta_prime * &inst.delta_prime;
    Ok(QsepVerification {
        accepted: normalization_ok && distance_ok,
        normalization_defect: defect,
        distance_sq,
        normalization_ok,
        distance_ok,
    })
}

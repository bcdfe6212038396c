//! Exact-rational QSEP instances and certificates: truncation of real
//! decompositions to `p`-bit dyadic numbers, the associated error bounds,
//! and the reduction from weak membership.

pub mod verify;

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{ComplexMatrix, DensityMatrix, HermitianOp};
use crate::io::{ComplexRationalJson, RationalJson, RationalMatrixJson};
use crate::states::ProductTerm;
use crate::Rational;

pub use verify::{bit_count, certificate_state, fits_bits, verify_certificate, QsepVerification};

#[derive(Clone, Debug, PartialEq)]
pub struct QsepInstance {
    pub m: usize,
    pub n: usize,
    pub rho: ComplexMatrix<Rational>,
    pub delta_p: Rational,
    pub eps_prime: Rational,
    pub delta_prime: Rational,
}

impl QsepInstance {
    pub fn new(
        m: usize,
        n: usize,
        rho: ComplexMatrix<Rational>,
        delta_p: Rational,
        eps_prime: Rational,
        delta_prime: Rational,
    ) -> Result<Self> {
        check_rational_density(m, n, &rho)?;
        for (name, q) in [("delta_p", &delta_p), ("eps_prime", &eps_prime), ("delta_prime", &delta_prime)] {
            if !q.is_positive() {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        Ok(Self {
            m,
            n,
            rho,
            delta_p,
            eps_prime,
            delta_prime,
        })
    }

    /// `⌈log₂(1/δ_p)⌉`.
    pub fn bits(&self) -> u32 {
        bit_count(&self.delta_p).expect("validated positive")
    }
}

/// Exact Hermiticity and unit trace.
pub fn check_rational_density(m: usize, n: usize, rho: &ComplexMatrix<Rational>) -> Result<()> {
    let d = m * n;
    if m < 1 || n < 1 || rho.rows() != d || rho.cols() != d {
        return Err(Error::DimensionMismatch(format!("expected a {d}x{d} matrix")));
    }
    for r in 0..d {
        for c in r..d {
            if rho[(r, c)] != rho[(c, r)].conj() {
                return Err(Error::NotHermitian { residual: 1.0, bound: 0.0 });
            }
        }
    }
    if rho.trace() != Complex::new(Rational::one(), Rational::zero()) {
        return Err(Error::InvalidState("trace is not exactly 1".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateTerm {
    pub weight: Rational,
    pub alpha: Vec<Complex<Rational>>,
    pub beta: Vec<Complex<Rational>>,
}

impl CertificateTerm {
    pub fn zero(m: usize, n: usize) -> Self {
        let z = Complex::new(Rational::zero(), Rational::zero());
        Self {
            weight: Rational::zero(),
            alpha: vec![z.clone(); m],
            beta: vec![z; n],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QsepCertificate {
    pub terms: Vec<CertificateTerm>,
}

impl QsepCertificate {
    pub fn new(terms: Vec<CertificateTerm>) -> Result<Self> {
        if terms.iter().any(|t| t.weight.is_negative()) {
            return Err(Error::Malformed("negative certificate weight".into()));
        }
        Ok(Self { terms })
    }
}

/// `x` truncated toward zero to a multiple of `2^{−p}`.
pub fn truncate_bits(x: f64, p: u32) -> Result<Rational> {
    let q = Rational::from_float(x).ok_or_else(|| Error::InvalidParameter(format!("non-finite scalar {x}")))?;
    let scale = Rational::from_integer(BigInt::one() << p);
    Ok((q * &scale).trunc() / scale)
}

fn truncate_vector(v: &[Complex<f64>], p: u32) -> Result<Vec<Complex<Rational>>> {
    v.iter()
        .map(|z| Ok(Complex::new(truncate_bits(z.re, p)?, truncate_bits(z.im, p)?)))
        .collect()
}

/// `p`-bit truncation of a normalized decomposition, zero-padded to
/// `M²N²` terms.
pub fn truncate_decomposition(decomp: &[ProductTerm], m: usize, n: usize, p: u32) -> Result<QsepCertificate> {
    if p < 1 {
        return Err(Error::InvalidParameter("at least one bit".into()));
    }
    let len = m * m * n * n;
    if decomp.len() > len {
        return Err(Error::InvalidParameter(format!(
            "decomposition has {} terms, at most {len} allowed",
            decomp.len()
        )));
    }
    let mut terms = Vec::with_capacity(len);
    for t in decomp {
        if t.alpha.len() != m || t.beta.len() != n {
            return Err(Error::DimensionMismatch(format!("product term outside C^{m} ⊗ C^{n}")));
        }
        terms.push(CertificateTerm {
            weight: truncate_bits(t.weight, p)?,
            alpha: truncate_vector(&t.alpha, p)?,
            beta: truncate_vector(&t.beta, p)?,
        });
    }
    terms.resize(len, CertificateTerm::zero(m, n));
    QsepCertificate::new(terms)
}

fn dim_cube(m: usize, n: usize) -> f64 {
    ((m * n) as f64).powi(3)
}

/// `M³N³·2^{−(p−7.5)}`, bounding `‖σ − σ̃‖₂` for a `p`-bit truncation.
pub fn error_bound_sigma(m: usize, n: usize, p: u32) -> f64 {
    dim_cube(m, n) * 2f64.powf(-(p as f64 - 7.5))
}

/// `M³N³·2^{−(p−5)}`, bounding the normalization defect.
pub fn error_bound_normalization(m: usize, n: usize, p: u32) -> f64 {
    dim_cube(m, n) * 2f64.powi(-(p as i32 - 5))
}

fn pow2(e: i64) -> Rational {
    let one = BigInt::one();
    if e >= 0 {
        Rational::from_integer(one << e as u64)
    } else {
        Rational::new(one.clone(), one << (-e) as u64)
    }
}

/// QSEP instance with the smallest `p` such that
/// `M³N³(2^{−(p−8)} + 2^{−(p−5)}) ≤ δ`.
pub fn reduce_wmem_to_qsep(m: usize, n: usize, rho: &ComplexMatrix<Rational>, delta: &Rational) -> Result<QsepInstance> {
    if !delta.is_positive() {
        return Err(Error::InvalidParameter("δ must be positive".into()));
    }
    let c = Rational::from_integer(BigInt::from((m * n).pow(3)));
    let mut p: i64 = 1;
    loop {
        let total = &c * (pow2(8 - p) + pow2(5 - p));
        if &total <= delta {
            break;
        }
        p += 1;
    }
    QsepInstance::new(
        m,
        n,
        rho.clone(),
        pow2(-p),
        &c * pow2(5 - p),
        &c * pow2(8 - p),
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct WmemShift {
    /// `ρ + δ(ρ − I/MN)/2`; Hermitian with unit trace, PSD not guaranteed.
    pub rho0: HermitianOp<f64>,
    /// `δ / (2√(MN(MN−1)))`.
    pub delta0: f64,
    pub lambda_min: f64,
}

pub fn wmem_out_to_wmem(rho: &DensityMatrix<f64>, delta: f64) -> Result<WmemShift> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!("δ = {delta} outside (0, 1]")));
    }
    let d = rho.dim();
    let mixed = HermitianOp::<f64>::identity(d).scale(1.0 / d as f64);
    let rho0 = rho.op().add(&rho.op().sub(&mixed).scale(delta / 2.0));
    let dd = d as f64;
    let delta0 = delta / (2.0 * (dd * (dd - 1.0)).sqrt());
    let lambda_min = rho0.min_eigenvalue();
    Ok(WmemShift { rho0, delta0, lambda_min })
}

/// Exact rational version of a floating-point matrix.
pub fn rational_matrix(x: &ComplexMatrix<f64>) -> Result<ComplexMatrix<Rational>> {
    let conv = |v: f64| Rational::from_float(v).ok_or_else(|| Error::InvalidParameter(format!("non-finite entry {v}")));
    let data = x
        .as_slice()
        .iter()
        .map(|z| Ok(Complex::new(conv(z.re)?, conv(z.im)?)))
        .collect::<Result<Vec<_>>>()?;
    ComplexMatrix::from_vec(x.rows(), x.cols(), data)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn float_matrix(x: &ComplexMatrix<Rational>) -> ComplexMatrix<f64> {
    ComplexMatrix::from_fn(x.rows(), x.cols(), |r, c| Complex::new(to_f64(&x[(r, c)].re), to_f64(&x[(r, c)].im)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub rho: RationalMatrixJson,
    pub delta_p: RationalJson,
    pub eps_prime: RationalJson,
    pub delta_prime: RationalJson,
}

impl InstanceJson {
    pub fn from_instance(inst: &QsepInstance) -> Self {
        Self {
            rho: RationalMatrixJson::from_matrix(inst.m, inst.n, &inst.rho),
            delta_p: RationalJson::from_rational(&inst.delta_p),
            eps_prime: RationalJson::from_rational(&inst.eps_prime),
            delta_prime: RationalJson::from_rational(&inst.delta_prime),
        }
    }

    pub fn to_instance(&self) -> Result<QsepInstance> {
        QsepInstance::new(
            self.rho.m,
            self.rho.n,
            self.rho.to_matrix()?,
            self.delta_p.to_rational()?,
            self.eps_prime.to_rational()?,
            self.delta_prime.to_rational()?,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub p: RationalJson,
    pub alpha: Vec<ComplexRationalJson>,
    pub beta: Vec<ComplexRationalJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub terms: Vec<TermJson>,
}

impl CertificateJson {
    pub fn from_certificate(cert: &QsepCertificate) -> Self {
        let vecj = |v: &[Complex<Rational>]| v.iter().map(ComplexRationalJson::from_complex).collect();
        Self {
            terms: cert
                .terms
                .iter()
                .map(|t| TermJson {
                    p: RationalJson::from_rational(&t.weight),
                    alpha: vecj(&t.alpha),
                    beta: vecj(&t.beta),
                })
                .collect(),
        }
    }

    pub fn to_certificate(&self) -> Result<QsepCertificate> {
        let vecr = |v: &[ComplexRationalJson]| v.iter().map(ComplexRationalJson::to_complex).collect::<Result<Vec<_>>>();
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok(CertificateTerm {
                    weight: t.p.to_rational()?,
                    alpha: vecr(&t.alpha)?,
                    beta: vecr(&t.beta)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        QsepCertificate::new(terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(BigInt::from(a), BigInt::from(b))
    }

    fn cq(a: i64, b: i64) -> Complex<Rational> {
        Complex::new(q(a, b), Rational::zero())
    }

    fn diag_half() -> ComplexMatrix<Rational> {
        let mut rho = ComplexMatrix::<Rational>::zeros(4, 4);
        rho[(0, 0)] = cq(1, 2);
        rho[(3, 3)] = cq(1, 2);
        rho
    }

    fn basis_term(w: Rational, a: usize, b: usize) -> CertificateTerm {
        let mut t = CertificateTerm::zero(2, 2);
        t.weight = w;
        t.alpha[a] = cq(1, 1);
        t.beta[b] = cq(1, 1);
        t
    }

    #[test]
    fn exact_decomposition_verifies_with_zero_residuals() {
        let inst = QsepInstance::new(2, 2, diag_half(), q(1, 256), q(1, 8), q(1, 8)).unwrap();
        let mut terms = vec![basis_term(q(1, 2), 0, 0), basis_term(q(1, 2), 1, 1)];
        terms.resize(16, CertificateTerm::zero(2, 2));
        let v = verify_certificate(&inst, &QsepCertificate::new(terms).unwrap()).unwrap();
        assert!(v.accepted);
        assert!(v.normalization_defect.is_zero());
        assert!(v.distance_sq.is_zero());
    }

    #[test]
    fn zero_certificate_fails_distance() {
        let inst = QsepInstance::new(2, 2, diag_half(), q(1, 256), q(1, 8), q(1, 8)).unwrap();
        let cert = QsepCertificate::new(vec![CertificateTerm::zero(2, 2); 16]).unwrap();
        let v = verify_certificate(&inst, &cert).unwrap();
        assert!(!v.accepted);
        assert!(!v.distance_ok);
        assert_eq!(v.distance_sq, q(1, 2));
    }

    #[test]
    fn bit_width_and_length_are_enforced() {
        let inst = QsepInstance::new(2, 2, diag_half(), q(1, 4), q(1, 8), q(1, 8)).unwrap();
        let mut terms = vec![basis_term(q(1, 3), 0, 0)];
        terms.resize(16, CertificateTerm::zero(2, 2));
        let cert = QsepCertificate::new(terms.clone()).unwrap();
        assert!(matches!(verify_certificate(&inst, &cert), Err(Error::BitWidth(_))));
        terms.pop();
        let short = QsepCertificate::new(terms).unwrap();
        assert!(matches!(verify_certificate(&inst, &short), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn bit_counts() {
        assert_eq!(bit_count(&q(1, 256)).unwrap(), 8);
        assert_eq!(bit_count(&q(1, 255)).unwrap(), 8);
        assert_eq!(bit_count(&q(1, 257)).unwrap(), 9);
        assert_eq!(bit_count(&q(1, 1)).unwrap(), 0);
        assert!(fits_bits(&q(-1, 1), 3));
        assert!(!fits_bits(&q(9, 8), 3));
        assert!(!fits_bits(&q(1, 16), 3));
    }

    #[test]
    fn truncation_examples() {
        assert_eq!(truncate_bits(0.5, 1).unwrap(), q(1, 2));
        assert_eq!(truncate_bits(1.0 / 3.0, 8).unwrap(), q(85, 256));
        assert_eq!(truncate_bits(-1.0 / 3.0, 8).unwrap(), q(-85, 256));
        for &x in &[0.1, -0.73, 0.999999, 1.0 / 7.0] {
            for p in [1, 5, 16, 40] {
                let t = truncate_bits(x, p).unwrap();
                let err = (Rational::from_float(x).unwrap() - &t).abs();
                assert!(err < q(1, 1) / Rational::from_integer(BigInt::one() << p));
                assert!(t.abs() <= Rational::from_float(x).unwrap().abs());
            }
        }
    }

    #[test]
    fn error_bounds() {
        assert!((error_bound_sigma(2, 2, 16) - 0.1767766952966369).abs() < 1e-12);
        assert!((error_bound_sigma(2, 2, 24) - 6.905339660024878e-4).abs() < 1e-15);
        assert!((error_bound_sigma(2, 3, 20) - 0.0372888342).abs() < 1e-9);
        assert_eq!(error_bound_normalization(2, 2, 16), 0.03125);
        assert_eq!(error_bound_normalization(2, 2, 10), 2.0);
        assert!((error_bound_normalization(3, 3, 20) - 0.022247314453125).abs() < 1e-15);
    }

    #[test]
    fn reduction_picks_smallest_p() {
        let rho = diag_half();
        let inst = reduce_wmem_to_qsep(2, 2, &rho, &q(1, 1)).unwrap();
        assert_eq!(inst.bits(), 15);
        assert_eq!(&inst.eps_prime + &inst.delta_prime, q(9, 16));
        let mut prev = inst.bits();
        let mut delta = q(1, 1);
        for _ in 0..6 {
            delta = delta / Rational::from_integer(BigInt::from(2));
            let inst = reduce_wmem_to_qsep(2, 2, &rho, &delta).unwrap();
            assert!(&inst.eps_prime + &inst.delta_prime <= delta);
            assert_eq!(inst.bits(), prev + 1);
            prev = inst.bits();
        }
    }

    #[test]
    fn shift_transform() {
        let mixed = DensityMatrix::<f64>::maximally_mixed(2, 2);
        let s = wmem_out_to_wmem(&mixed, 0.3).unwrap();
        assert!(s.rho0.matrix().distance(mixed.matrix()) < 1e-15);
        assert!((s.delta0 - 0.3 / (2.0 * 12f64.sqrt())).abs() < 1e-15);
        let s = wmem_out_to_wmem(&mixed, 0.12).unwrap();
        assert!((s.delta0 - 0.017320508).abs() < 1e-8);

        let rho = crate::states::bell();
        let s = wmem_out_to_wmem(&rho, 0.4).unwrap();
        let gap = s.rho0.sub(rho.op()).frobenius_norm();
        let expected = 0.2 * rho.op().sub(&HermitianOp::identity(4).scale(0.25)).frobenius_norm();
        assert!((gap - expected).abs() < 1e-12 && gap <= 0.2);
        assert!((s.rho0.trace() - 1.0).abs() < 1e-12);
        assert!((s.lambda_min + 0.4 / 8.0).abs() < 1e-9);
    }

    #[test]
    fn json_round_trip() {
        let inst = reduce_wmem_to_qsep(2, 2, &diag_half(), &q(1, 3)).unwrap();
        let j = serde_json::to_string(&InstanceJson::from_instance(&inst)).unwrap();
        let back: InstanceJson = serde_json::from_str(&j).unwrap();
        assert_eq!(back.to_instance().unwrap(), inst);
        let cert = QsepCertificate::new(vec![basis_term(q(1, 2), 0, 1); 16]).unwrap();
        let j = serde_json::to_string(&CertificateJson::from_certificate(&cert)).unwrap();
        let back: CertificateJson = serde_json::from_str(&j).unwrap();
        assert_eq!(back.to_certificate().unwrap(), cert);
    }

    #[test]
    fn verification_path_is_float_free() {
        let src = include_str!("verify.rs");
        for token in ["f32", "f64", "float", "as_f", "Real", "sqrt"] {
            assert!(!src.contains(token), "verification code mentions `{token}`");
        }
    }
}

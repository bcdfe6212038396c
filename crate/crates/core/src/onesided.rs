//! Cheap necessary and sufficient separability tests.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{trace_norm, DensityMatrix, HermitianOp, Subsystem};
use crate::scalar::Real;
use crate::tolerance::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Entangled,
    SeparableAssured,
    Unknown,
}

impl Outcome {
    /// Process exit status used by the command-line tool.
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::SeparableAssured => 0,
            Outcome::Entangled => 1,
            Outcome::Unknown => 2,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Outcome::Entangled => "Entangled",
            Outcome::SeparableAssured => "SeparableAssured",
            Outcome::Unknown => "Unknown",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    Ppt,
    Reduction,
    #[serde(rename = "entropic_2")]
    Entropic2,
    #[serde(rename = "entropic_1")]
    Entropic1,
    Majorization,
    Ccnr,
    FrobeniusBall,
    LambdaMinBall,
    TwoByNPt,
    WitnessSearch,
    SymmetricExtension,
    /// No test was decisive.
    Pipeline,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub reason: Reason,
    pub exact: bool,
    pub detail: Option<f64>,
}

impl Verdict {
    pub fn new(outcome: Outcome, reason: Reason, detail: impl Into<Option<f64>>) -> Self {
        Self {
            outcome,
            reason,
            exact: false,
            detail: detail.into(),
        }
    }

    pub fn entangled(reason: Reason, detail: impl Into<Option<f64>>) -> Self {
        Self::new(Outcome::Entangled, reason, detail)
    }

    pub fn separable(reason: Reason, detail: impl Into<Option<f64>>) -> Self {
        Self::new(Outcome::SeparableAssured, reason, detail)
    }

    pub fn unknown(reason: Reason, detail: impl Into<Option<f64>>) -> Self {
        Self::new(Outcome::Unknown, reason, detail)
    }

    pub fn is_decisive(&self) -> bool {
        self.outcome != Outcome::Unknown
    }
}

/// `λ_min(ρ^{T_B}) < −tol` ⇒ entangled. For `MN ≤ 6` a nonnegative
/// partial transpose is also sufficient.
pub fn ppt_test<T: Real>(rho: &DensityMatrix<T>, tol: &Tolerances) -> Verdict {
    let lmin = rho.partial_transpose(Subsystem::B).min_eigenvalue().as_f64();
    if lmin < -tol.eigenvalue {
        let mut v = Verdict::entangled(Reason::Ppt, lmin);
        v.exact = rho.dim() <= 6;
        v
    } else if rho.dim() <= 6 {
        let mut v = Verdict::separable(Reason::Ppt, lmin);
        v.exact = true;
        v
    } else {
        Verdict::unknown(Reason::Ppt, lmin)
    }
}

/// `ρ_A ⊗ I − ρ ⪰ 0` and `I ⊗ ρ_B − ρ ⪰ 0` for separable `ρ`.
pub fn reduction_test<T: Real>(rho: &DensityMatrix<T>, tol: &Tolerances) -> Verdict {
    let (m, n) = rho.dims();
    let ra = rho.reduced(Subsystem::A);
    let rb = rho.reduced(Subsystem::B);
    let left = ra.kron(&HermitianOp::identity(n)).sub(rho.op());
    let right = HermitianOp::identity(m).kron(&rb).sub(rho.op());
    let lmin = left.min_eigenvalue().min(right.min_eigenvalue()).as_f64();
    if lmin < -tol.eigenvalue {
        Verdict::entangled(Reason::Reduction, lmin)
    } else {
        Verdict::unknown(Reason::Reduction, lmin)
    }
}

fn renyi<T: Real>(op: &HermitianOp<T>, alpha: u8) -> f64 {
    match alpha {
        2 => -op.matrix().trace_product(op.matrix()).re.as_f64().ln(),
        _ => op
            .eigenvalues()
            .into_iter()
            .map(|l| l.as_f64())
            .filter(|&l| l > 0.0)
            .map(|l| -l * l.ln())
            .sum(),
    }
}

/// Separable states are more disordered globally than locally:
/// `S_α(ρ) ≥ max(S_α(ρ_A), S_α(ρ_B))` for `α ∈ {1, 2}`.
pub fn entropic_test<T: Real>(rho: &DensityMatrix<T>, alpha: u8, tol: &Tolerances) -> Result<Verdict> {
    let reason = match alpha {
        1 => Reason::Entropic1,
        2 => Reason::Entropic2,
        _ => return Err(Error::InvalidParameter(format!("entropic alpha must be 1 or 2, got {alpha}"))),
    };
    let global = renyi(rho.op(), alpha);
    let local = renyi(&rho.reduced(Subsystem::A), alpha).max(renyi(&rho.reduced(Subsystem::B), alpha));
    let gap = global - local;
    Ok(if gap < -tol.norm {
        Verdict::entangled(reason, gap)
    } else {
        Verdict::unknown(reason, gap)
    })
}

fn max_prefix_excess(global: &[f64], local: &[f64]) -> f64 {
    let mut sg = 0.0;
    let mut sl = 0.0;
    let mut worst = f64::NEG_INFINITY;
    for (k, g) in global.iter().enumerate() {
        sg += g;
        sl += local.get(k).copied().unwrap_or(0.0);
        worst = worst.max(sg - sl);
    }
    worst
}

/// The spectrum of a separable state is majorized by both marginal spectra.
pub fn majorization_test<T: Real>(rho: &DensityMatrix<T>, tol: &Tolerances) -> Verdict {
    let spec = |op: &HermitianOp<T>| op.eigenvalues().into_iter().map(|x| x.as_f64()).collect::<Vec<_>>();
    let global = spec(rho.op());
    let excess = max_prefix_excess(&global, &spec(&rho.reduced(Subsystem::A)))
        .max(max_prefix_excess(&global, &spec(&rho.reduced(Subsystem::B))));
    if excess > tol.eigenvalue {
        Verdict::entangled(Reason::Majorization, excess)
    } else {
        Verdict::unknown(Reason::Majorization, excess)
    }
}

/// Realignment criterion: `‖U(ρ)‖₁ ≤ 1` for separable `ρ`.
pub fn ccnr_test<T: Real>(rho: &DensityMatrix<T>, tol: &Tolerances) -> Verdict {
    let norm = trace_norm(&rho.realign()).as_f64();
    if norm > 1.0 + tol.norm {
        Verdict::entangled(Reason::Ccnr, norm)
    } else {
        Verdict::unknown(Reason::Ccnr, norm)
    }
}

/// States with `‖ρ − I/(MN)‖²_F ≤ 1/(MN(MN−1))` are separable.
pub fn frobenius_ball_test<T: Real>(rho: &DensityMatrix<T>) -> Verdict {
    let d = rho.dim() as f64;
    let purity = rho.matrix().trace_product(rho.matrix()).re.as_f64();
    let dist2 = (purity - 1.0 / d).max(0.0);
    if dist2 <= 1.0 / (d * (d - 1.0)) {
        Verdict::separable(Reason::FrobeniusBall, dist2)
    } else {
        Verdict::unknown(Reason::FrobeniusBall, dist2)
    }
}

/// States with `λ_min(ρ) ≥ 1/(2 + MN)` are separable.
pub fn lambda_min_ball_test<T: Real>(rho: &DensityMatrix<T>) -> Verdict {
    let lmin = rho.op().min_eigenvalue().as_f64();
    if lmin >= 1.0 / (2.0 + rho.dim() as f64) {
        Verdict::separable(Reason::LambdaMinBall, lmin)
    } else {
        Verdict::unknown(Reason::LambdaMinBall, lmin)
    }
}

/// For `M = 2`, `ρ = ρ^{T_A}` implies separability.
pub fn two_by_n_pt_test<T: Real>(rho: &DensityMatrix<T>, tol: &Tolerances) -> Result<Verdict> {
    if rho.m() != 2 {
        return Err(Error::InvalidParameter(format!(
            "two_by_n test needs M = 2, got M = {}",
            rho.m()
        )));
    }
    let dist = rho
        .matrix()
        .distance(rho.partial_transpose(Subsystem::A).matrix())
        .as_f64();
    Ok(if dist <= tol.norm {
        Verdict::separable(Reason::TwoByNPt, dist)
    } else {
        Verdict::unknown(Reason::TwoByNPt, dist)
    })
}

/// Runs every test, cheapest sufficient tests first; the first decisive
/// verdict wins.
pub fn pipeline<T: Real>(rho: &DensityMatrix<T>, tol: &Tolerances) -> Verdict {
    let steps: [&dyn Fn() -> Option<Verdict>; 9] = [
        &|| Some(frobenius_ball_test(rho)),
        &|| Some(lambda_min_ball_test(rho)),
        &|| Some(ppt_test(rho, tol)),
        &|| two_by_n_pt_test(rho, tol).ok(),
        &|| Some(reduction_test(rho, tol)),
        &|| Some(majorization_test(rho, tol)),
        &|| entropic_test(rho, 2, tol).ok(),
        &|| entropic_test(rho, 1, tol).ok(),
        &|| Some(ccnr_test(rho, tol)),
    ];
    steps
        .iter()
        .filter_map(|f| f())
        .find(Verdict::is_decisive)
        .unwrap_or_else(|| Verdict::unknown(Reason::Pipeline, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::ComplexMatrix;
    use num_complex::Complex;

    type D = DensityMatrix<f64>;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn bell() -> D {
        let s = 0.5f64.sqrt();
        let z = Complex::new(0.0, 0.0);
        D::pure(2, 2, &[Complex::new(s, 0.0), z, z, Complex::new(s, 0.0)]).unwrap()
    }

    fn werner(w: f64) -> D {
        D::mixture(&[(w, &bell()), (1.0 - w, &D::maximally_mixed(2, 2))]).unwrap()
    }

    #[test]
    fn ppt_examples() {
        let v = ppt_test(&bell(), &tol());
        assert_eq!(v.outcome, Outcome::Entangled);
        assert!((v.detail.unwrap() + 0.5).abs() < 1e-12);
        let v = ppt_test(&D::maximally_mixed(2, 2), &tol());
        assert_eq!((v.outcome, v.exact), (Outcome::SeparableAssured, true));
        assert_eq!(ppt_test(&D::maximally_mixed(3, 3), &tol()).outcome, Outcome::Unknown);
    }

    #[test]
    fn reduction_on_bell() {
        let v = reduction_test(&bell(), &tol());
        assert_eq!(v.outcome, Outcome::Entangled);
        assert!((v.detail.unwrap() + 0.5).abs() < 1e-12);
        assert_eq!(reduction_test(&D::maximally_mixed(2, 2), &tol()).outcome, Outcome::Unknown);
    }

    #[test]
    fn entropic_examples() {
        assert_eq!(entropic_test(&bell(), 2, &tol()).unwrap().outcome, Outcome::Entangled);
        assert_eq!(entropic_test(&bell(), 1, &tol()).unwrap().outcome, Outcome::Entangled);
        assert_eq!(
            entropic_test(&D::maximally_mixed(2, 2), 2, &tol()).unwrap().outcome,
            Outcome::Unknown
        );
        assert!(entropic_test(&bell(), 3, &tol()).is_err());
    }

    #[test]
    fn entropic_werner_half() {
        // purity (1 + 3w²)/4 = 7/16, so S₂ = ln(16/7) > ln 2
        let v = entropic_test(&werner(0.5), 2, &tol()).unwrap();
        assert_eq!(v.outcome, Outcome::Unknown);
        assert!((v.detail.unwrap() - ((16.0f64 / 7.0).ln() - 2.0f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn majorization_examples() {
        let v = majorization_test(&bell(), &tol());
        assert_eq!(v.outcome, Outcome::Entangled);
        assert!((v.detail.unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(majorization_test(&D::maximally_mixed(2, 2), &tol()).outcome, Outcome::Unknown);
    }

    #[test]
    fn ccnr_examples() {
        let v = ccnr_test(&bell(), &tol());
        assert_eq!(v.outcome, Outcome::Entangled);
        assert!((v.detail.unwrap() - 2.0).abs() < 1e-10);
        let v = ccnr_test(&D::maximally_mixed(2, 2), &tol());
        assert_eq!(v.outcome, Outcome::Unknown);
        assert!((v.detail.unwrap() - 0.5).abs() < 1e-12);
        let zero = Complex::new(0.0, 0.0);
        let one = Complex::new(1.0, 0.0);
        let prod = D::product_pure(&[one, zero], &[zero, one]).unwrap();
        let v = ccnr_test(&prod, &tol());
        assert!((v.detail.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(v.outcome, Outcome::Unknown);
    }

    #[test]
    fn ball_tests() {
        let mixed = D::maximally_mixed(2, 2);
        assert_eq!(frobenius_ball_test(&mixed).outcome, Outcome::SeparableAssured);
        let v = frobenius_ball_test(&bell());
        assert_eq!(v.outcome, Outcome::Unknown);
        assert!((v.detail.unwrap() - 0.75).abs() < 1e-12);
        assert_eq!(frobenius_ball_test(&werner(0.05)).outcome, Outcome::SeparableAssured);

        assert_eq!(lambda_min_ball_test(&mixed).outcome, Outcome::SeparableAssured);
        assert_eq!(lambda_min_ball_test(&bell()).outcome, Outcome::Unknown);
        assert_eq!(
            lambda_min_ball_test(&D::maximally_mixed(3, 3)).outcome,
            Outcome::SeparableAssured
        );
    }

    #[test]
    fn two_by_n_examples() {
        assert_eq!(
            two_by_n_pt_test(&D::maximally_mixed(2, 2), &tol()).unwrap().outcome,
            Outcome::SeparableAssured
        );
        assert_eq!(two_by_n_pt_test(&bell(), &tol()).unwrap().outcome, Outcome::Unknown);
        let diag = D::new(2, 3, ComplexMatrix::diagonal(&[0.3, 0.1, 0.1, 0.2, 0.2, 0.1])).unwrap();
        assert_eq!(two_by_n_pt_test(&diag, &tol()).unwrap().outcome, Outcome::SeparableAssured);
        assert!(two_by_n_pt_test(&D::maximally_mixed(3, 2), &tol()).is_err());
    }

    #[test]
    fn pipeline_examples() {
        let v = pipeline(&bell(), &tol());
        assert_eq!((v.outcome, v.reason), (Outcome::Entangled, Reason::Ppt));
        let v = pipeline(&D::maximally_mixed(2, 2), &tol());
        assert_eq!((v.outcome, v.reason), (Outcome::SeparableAssured, Reason::FrobeniusBall));
        let v = pipeline(&werner(0.4), &tol());
        assert_eq!((v.outcome, v.reason, v.exact), (Outcome::Entangled, Reason::Ppt, true));
        assert!((v.detail.unwrap() - (1.0 - 3.0 * 0.4) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn verdict_json_shape() {
        let v = Verdict::entangled(Reason::Entropic2, 0.25);
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["outcome"], "Entangled");
        assert_eq!(j["reason"], "entropic_2");
        assert_eq!(j["exact"], false);
        assert_eq!(j["detail"], 0.25);
    }
}

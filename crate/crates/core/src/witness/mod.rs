//! Cutting-plane search for an entanglement witness.
//!
//! Candidates are traceless, unit Hilbert–Schmidt operators, identified
//! with the unit ball of Bloch space. Each round takes the analytic center
//! of the remaining region, asks the net oracle for the best product state
//! against it, and either reports a witness or cuts the region.

pub mod region;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{BlochVector, DensityMatrix, HermitianBasis, HermitianOp};
use crate::nets::{DeltaNet, NetKind};
use crate::onesided::{Reason, Verdict};
use crate::wopt::{wopt_max, ProductState};

pub use region::{analytic_center, dikin_radius, Halfspace, SearchRegion};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessCert {
    /// Traceless, `‖A‖₂ = 1`.
    #[serde(with = "crate::io::hermitian_json")]
    pub a: HermitianOp<f64>,
    /// `tr(Aρ) − value`, `value` the net maximum over product states.
    pub margin: f64,
    pub delta: f64,
    pub rho_value: f64,
    pub product_value: f64,
    pub product_state: ProductState,
    /// Bloch coordinates of `A`, rescaled to unit max-norm.
    pub wsep_vector: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// A witness was found.
    Detected,
    /// `ρ` is the maximally mixed state.
    Center,
    /// The Dikin ellipsoid became smaller than `δ/4`.
    SmallRegion,
    /// A cut left no interior.
    EmptyRegion,
    IterationCap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WsepOutcome {
    pub verdict: Verdict,
    pub witness: Option<WitnessCert>,
    pub termination: Termination,
    pub iterations: usize,
    /// `radius_proxy` after each round.
    pub radii: Vec<f64>,
}

/// `4·(M²N² − 1)·ln(8/δ) + 64`.
pub fn iteration_cap(m: usize, n: usize, delta: f64) -> usize {
    let l = (m * m * n * n - 1) as f64;
    (4.0 * l * (8.0 / delta).ln()).ceil() as usize + 64
}

/// Largest net radius usable at accuracy `delta`.
pub fn required_net_delta(delta: f64) -> f64 {
    delta / 10.0
}

#[derive(Clone, Debug)]
pub struct WsepOptions {
    pub max_iterations: Option<usize>,
}

impl Default for WsepOptions {
    fn default() -> Self {
        Self { max_iterations: None }
    }
}

/// Either a witness `A` whose margin over the net maximum exceeds `2δ/5`,
/// or the assertion that `ρ` is within `δ` of the separable set.
pub fn wsep_solve(rho: &DensityMatrix<f64>, delta: f64, net: &DeltaNet) -> Result<WsepOutcome> {
    wsep_solve_with(rho, delta, net, &WsepOptions::default())
}

pub fn wsep_solve_with(
    rho: &DensityMatrix<f64>,
    delta: f64,
    net: &DeltaNet,
    opts: &WsepOptions,
) -> Result<WsepOutcome> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!("accuracy {delta} outside (0, 1]")));
    }
    let required = required_net_delta(delta);
    if net.delta() > required * (1.0 + 1e-12) {
        return Err(Error::NetTooCoarse {
            net_delta: net.delta(),
            required,
            delta,
        });
    }
    let (m, n) = rho.dims();
    if net.m() != m || net.kind() == NetKind::Real {
        return Err(Error::DimensionMismatch(format!(
            "witness search on {m}x{n} needs a complex net on C^{m}, got a {:?} net on C^{}",
            net.kind(),
            net.m()
        )));
    }
    let basis = HermitianBasis::<f64>::new(m, n);
    let r = basis.to_bloch(rho.op())?;
    let epsilon = delta / 5.0;
    let cap = opts.max_iterations.unwrap_or_else(|| iteration_cap(m, n, delta));

    let separable = |termination, iterations, radii: Vec<f64>| {
        let detail = radii.last().copied();
        WsepOutcome {
            verdict: Verdict::separable(Reason::WitnessSearch, detail),
            witness: None,
            termination,
            iterations,
            radii,
        }
    };

    if r.norm() <= 1e-14 {
        return Ok(separable(Termination::Center, 0, Vec::new()));
    }

    let mut region = SearchRegion::initial(&r)?;
    let mut radii = vec![region.radius_proxy];
    for iteration in 1..=cap {
        let cnorm = region.center.norm();
        let a_hat = BlochVector(region.center.0.iter().map(|x| x / cnorm).collect());
        let a = basis.from_bloch(&a_hat, 0.0)?;
        let best = wopt_max(&a, m, n, net)?;
        let rho_value = a_hat.dot(&r);
        let margin = rho_value - best.value;
        if margin > 2.0 * epsilon {
            let inf = a_hat.0.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
            let cert = WitnessCert {
                a,
                margin,
                delta,
                rho_value,
                product_value: best.value,
                product_state: best.maximizer,
                wsep_vector: a_hat.0.iter().map(|x| x / inf).collect(),
            };
            return Ok(WsepOutcome {
                verdict: Verdict::entangled(Reason::WitnessSearch, margin),
                witness: Some(cert),
                termination: Termination::Detected,
                iterations: iteration,
                radii,
            });
        }

        let s = basis.to_bloch(&best.maximizer.projector())?;
        let normal = cut_normal(&a_hat, &s, &r)?;
        match region.add_cut(normal, 0.0) {
            Ok((next, _)) => region = next,
            Err(Error::EmptyRegion) => return Ok(separable(Termination::EmptyRegion, iteration, radii)),
            Err(e) => return Err(e),
        }
        radii.push(region.radius_proxy);
        if region.dikin < delta / 4.0 {
            return Ok(separable(Termination::SmallRegion, iteration, radii));
        }
    }
    Ok(separable(Termination::IterationCap, cap, radii))
}

/// Normal of the cut after a failed detection at `â`.
///
/// Every witness `x` satisfies `x·(s − r) < 0`. If the center violates that
/// (`β = â·(s − r) > 0`) the cut is used as is; otherwise it is tilted to
/// pass through the center, discarding only witnesses whose margin against
/// `σ` is below `|β| ≤ 2ε`.
pub fn cut_normal(a_hat: &BlochVector<f64>, s: &BlochVector<f64>, r: &BlochVector<f64>) -> Result<Vec<f64>> {
    let d: Vec<f64> = s.0.iter().zip(&r.0).map(|(x, y)| x - y).collect();
    let beta: f64 = d.iter().zip(&a_hat.0).map(|(x, y)| x * y).sum();
    let normal: Vec<f64> = if beta > 0.0 {
        d
    } else {
        d.iter().zip(&a_hat.0).map(|(x, y)| x - beta * y).collect()
    };
    let norm = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 1e-12) {
        return Err(Error::DegenerateCut(norm));
    }
    Ok(normal)
}

/// Rechecks a certificate on another net: returns `tr(Aρ) − max`.
pub fn revalidate(cert: &WitnessCert, rho: &DensityMatrix<f64>, net: &DeltaNet) -> Result<f64> {
    let (m, n) = rho.dims();
    let best = wopt_max(&cert.a, m, n, net)?;
    Ok(cert.a.hs_inner(rho.op()) - best.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::werner;

    #[test]
    fn cap_formula() {
        assert_eq!(iteration_cap(2, 2, 0.02), (60.0 * 400f64.ln()).ceil() as usize + 64);
    }

    #[test]
    fn maximally_mixed_is_immediate() {
        let net = DeltaNet::build(2, 0.01, NetKind::Projective).unwrap();
        let out = wsep_solve(&DensityMatrix::maximally_mixed(2, 2), 0.1, &net).unwrap();
        assert_eq!(out.termination, Termination::Center);
        assert_eq!(out.verdict.outcome, crate::onesided::Outcome::SeparableAssured);
    }

    #[test]
    fn coarse_net_is_refused() {
        let net = DeltaNet::build(2, 0.05, NetKind::Projective).unwrap();
        let err = wsep_solve(&werner(2, 0.9).unwrap(), 0.1, &net).unwrap_err();
        assert!(matches!(err, Error::NetTooCoarse { .. }));
    }

    #[test]
    fn strongly_entangled_werner_is_detected() {
        let delta = 0.1;
        let net = DeltaNet::build(2, delta / 10.0, NetKind::Projective).unwrap();
        let rho = werner(2, 0.9).unwrap();
        let out = wsep_solve(&rho, delta, &net).unwrap();
        assert_eq!(out.verdict.outcome, crate::onesided::Outcome::Entangled);
        let cert = out.witness.unwrap();
        assert!(cert.margin > 2.0 * delta / 5.0);
        assert!(cert.a.trace().abs() < 1e-12);
        assert!((cert.a.frobenius_norm() - 1.0).abs() < 1e-12);
        let again = revalidate(&cert, &rho, &net).unwrap();
        assert!((again - cert.margin).abs() < 1e-9);
        assert!(cert.wsep_vector.iter().any(|x| (x.abs() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn cut_normal_passes_through_center_when_shallow() {
        let a = BlochVector(vec![1.0, 0.0]);
        let s = BlochVector(vec![0.1, 0.5]);
        let r = BlochVector(vec![0.2, 0.0]);
        let nrm = cut_normal(&a, &s, &r).unwrap();
        assert!(nrm[0].abs() < 1e-15);
        assert!(cut_normal(&a, &r, &r).is_err());
    }
}

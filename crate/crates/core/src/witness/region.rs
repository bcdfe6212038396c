//! Search regions in Bloch space: the unit ball cut by halfspaces, with an
//! analytic-center oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{eigvalsh, BlochVector, ComplexMatrix};
use crate::tolerance;

/// `normal · x ≤ offset`, `normal` of unit length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: BlochVector<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let norm = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 1e-14) {
            return Err(Error::DegenerateCut(norm));
        }
        Ok(Self {
            normal: BlochVector(normal.iter().map(|x| x / norm).collect()),
            offset: offset / norm,
        })
    }

    pub fn slack(&self, x: &[f64]) -> f64 {
        self.offset - dot(self.normal.as_slice(), x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchRegion {
    pub halfspaces: Vec<Halfspace>,
    pub center: BlochVector<f64>,
    /// Largest semi-axis of the Dikin ellipsoid at `center`.
    pub dikin: f64,
    /// Running minimum of `dikin` over the cuts so far.
    pub radius_proxy: f64,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lower Cholesky factor of a row-major SPD matrix.
pub(crate) fn cholesky(h: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = h[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

pub(crate) fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[i * n + k] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[k * n + i] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    y
}

struct Barrier<'a> {
    halfspaces: &'a [Halfspace],
    dim: usize,
}

impl Barrier<'_> {
    fn feasible(&self, x: &[f64]) -> bool {
        dot(x, x) < 1.0 && self.halfspaces.iter().all(|h| h.slack(x) > 0.0)
    }

    fn value(&self, x: &[f64]) -> f64 {
        -(1.0 - dot(x, x)).ln() - self.halfspaces.iter().map(|h| h.slack(x).ln()).sum::<f64>()
    }

    fn gradient_hessian(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim;
        let q = 1.0 - dot(x, x);
        let mut g: Vec<f64> = x.iter().map(|xi| 2.0 * xi / q).collect();
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            h[i * n + i] += 2.0 / q;
            for j in 0..n {
                h[i * n + j] += 4.0 * x[i] * x[j] / (q * q);
            }
        }
        for hs in self.halfspaces {
            let s = hs.slack(x);
            let a = hs.normal.as_slice();
            for i in 0..n {
                g[i] += a[i] / s;
                let ai = a[i] / (s * s);
                if ai == 0.0 {
                    continue;
                }
                for j in 0..n {
                    h[i * n + j] += ai * a[j];
                }
            }
        }
        (g, h)
    }
}

/// Minimizer of `−Σ ln(slack_k) − ln(1 − ‖x‖²)` by damped Newton from a
/// strictly feasible `start`. Returns the center and the barrier Hessian
/// there.
pub fn analytic_center(halfspaces: &[Halfspace], start: &[f64]) -> Result<(BlochVector<f64>, Vec<f64>)> {
    let n = start.len();
    let barrier = Barrier { halfspaces, dim: n };
    if !barrier.feasible(start) {
        return Err(Error::EmptyRegion);
    }
    let mut x = start.to_vec();
    for _ in 0..500 {
        let (g, h) = barrier.gradient_hessian(&x);
        let gnorm = dot(&g, &g).sqrt();
        let l = cholesky(&h, n).ok_or(Error::EmptyRegion)?;
        if gnorm <= tolerance::CENTER_GRADIENT {
            return Ok((BlochVector(x), h));
        }
        let step = cholesky_solve(&l, n, &g);
        let decrement = dot(&g, &step).max(0.0).sqrt();
        // damped step stays inside the Dikin ellipsoid, hence feasible
        let mut t = if decrement > 0.25 { 1.0 / (1.0 + decrement) } else { 1.0 };
        let f0 = barrier.value(&x);
        loop {
            let cand: Vec<f64> = x.iter().zip(&step).map(|(xi, si)| xi - t * si).collect();
            if barrier.feasible(&cand) && (barrier.value(&cand) <= f0 || decrement < 1e-6) {
                x = cand;
                break;
            }
            t *= 0.5;
            if t < 1e-12 {
                // no further progress possible at machine precision
                let (g, h) = barrier.gradient_hessian(&x);
                if dot(&g, &g).sqrt() <= 1e3 * tolerance::CENTER_GRADIENT {
                    return Ok((BlochVector(x), h));
                }
                return Err(Error::EmptyRegion);
            }
        }
    }
    let (_, h) = barrier.gradient_hessian(&x);
    Ok((BlochVector(x), h))
}

/// Largest semi-axis `1/√λ_min(H)` of the Dikin ellipsoid.
pub fn dikin_radius(hessian: &[f64], n: usize) -> f64 {
    let m = ComplexMatrix::from_fn(n, n, |i, j| num_complex::Complex::new(hessian[i * n + j], 0.0));
    let lmin = *eigvalsh(&m).last().expect("nonempty Hessian");
    1.0 / lmin.max(f64::MIN_POSITIVE).sqrt()
}

impl SearchRegion {
    /// Unit ball cut by `r · x ≥ 0`; `r` must be nonzero.
    pub fn initial(r: &BlochVector<f64>) -> Result<Self> {
        let norm = r.norm();
        if !(norm > 0.0) {
            return Err(Error::InvalidParameter("initial cut needs a nonzero Bloch vector".into()));
        }
        let cut = Halfspace::new(r.0.iter().map(|x| -x).collect(), 0.0)?;
        // analytic center of ball ∩ {u·x ≥ 0} is u/√3
        let start: Vec<f64> = r.0.iter().map(|x| x / norm / 3f64.sqrt()).collect();
        Self::centered(vec![cut], &start)
    }

    fn centered(halfspaces: Vec<Halfspace>, start: &[f64]) -> Result<Self> {
        let (center, h) = analytic_center(&halfspaces, start)?;
        let dikin = dikin_radius(&h, start.len());
        Ok(Self {
            halfspaces,
            center,
            dikin,
            radius_proxy: dikin,
        })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Adds `normal · x ≤ offset`. If the current center is not strictly
    /// inside, the offset is relaxed to `max(offset, n·c − w/2)`, `w` the
    /// Dikin width along `n`, which keeps the cut valid and the region
    /// centerable. Returns the effective offset, or `EmptyRegion` when the
    /// cut provably leaves no interior.
    pub fn add_cut(&self, normal: Vec<f64>, offset: f64) -> Result<(Self, f64)> {
        let hs = Halfspace::new(normal, offset)?;
        let n = self.dim();
        let barrier = Barrier {
            halfspaces: &self.halfspaces,
            dim: n,
        };
        let c = self.center.as_slice();
        let (_, h) = barrier.gradient_hessian(c);
        let l = cholesky(&h, n).ok_or(Error::EmptyRegion)?;
        let hinv_a = cholesky_solve(&l, n, hs.normal.as_slice());
        let width = dot(hs.normal.as_slice(), &hinv_a).max(0.0).sqrt();
        if !(width > 0.0) {
            return Err(Error::DegenerateCut(width));
        }
        let nc = dot(hs.normal.as_slice(), c);
        // the region lies in the Dikin ellipsoid scaled by ν + 2√ν
        let nu = (self.halfspaces.len() + 2) as f64;
        if nc - (nu + 2.0 * nu.sqrt()) * width >= hs.offset {
            return Err(Error::EmptyRegion);
        }
        let effective = hs.offset.max(nc - 0.5 * width);
        let start: Vec<f64> = c
            .iter()
            .zip(&hinv_a)
            .map(|(ci, di)| ci - 0.75 * di / width)
            .collect();
        let mut halfspaces = self.halfspaces.clone();
        halfspaces.push(Halfspace {
            normal: hs.normal,
            offset: effective,
        });
        let mut next = Self::centered(halfspaces, &start)?;
        next.radius_proxy = next.radius_proxy.min(self.radius_proxy);
        Ok((next, effective))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_ball_center_is_origin() {
        let (c, _) = analytic_center(&[], &[0.3, -0.2, 0.1]).unwrap();
        assert!(c.norm() < 1e-9);
    }

    #[test]
    fn halfspace_center_lies_on_axis() {
        let hs = Halfspace::new(vec![-1.0, 0.0, 0.0], 0.0).unwrap();
        let (c, _) = analytic_center(&[hs], &[0.5, 0.0, 0.0]).unwrap();
        assert!((c.0[0] - 1.0 / 3f64.sqrt()).abs() < 1e-8);
        assert!(c.0[1].abs() < 1e-9 && c.0[2].abs() < 1e-9);
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let hs = Halfspace::new(vec![1.0, 0.0], -0.5).unwrap();
        assert!(matches!(analytic_center(&[hs], &[0.0, 0.0]), Err(Error::EmptyRegion)));
        assert!(Halfspace::new(vec![0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn central_cut_excludes_old_center_neighbourhood() {
        let r = BlochVector(vec![1.0, 0.0, 0.0]);
        let region = SearchRegion::initial(&r).unwrap();
        let c = region.center.0.clone();
        // cut through the center and the origin
        let (next, offset) = region.add_cut(vec![c[0] * 0.0, 1.0, 0.0], 0.0).unwrap();
        assert_eq!(offset, 0.0);
        assert!(next.halfspaces.last().unwrap().slack(&c).abs() < 1e-12);
        assert!(next.halfspaces.iter().all(|h| h.slack(next.center.as_slice()) > 0.0));
        assert!(next.center.0[1] < 0.0);
        assert!(next.radius_proxy <= region.radius_proxy + 1e-12);
    }

    #[test]
    fn deep_cut_beyond_reach_is_relaxed() {
        let r = BlochVector(vec![1.0, 0.0]);
        let region = SearchRegion::initial(&r).unwrap();
        let (next, offset) = region.add_cut(vec![1.0, 0.3], 0.0).unwrap();
        assert!(offset > 0.0);
        assert!(next.halfspaces.iter().all(|h| h.slack(next.center.as_slice()) > 0.0));
    }

    #[test]
    fn feasible_cuts_are_never_reported_empty() {
        let region = SearchRegion::initial(&BlochVector(vec![1.0, 0.0, 0.0])).unwrap();
        for k in 0..20 {
            let t = k as f64 * 0.3;
            let offset = 0.9 - 0.05 * k as f64;
            assert!(region.add_cut(vec![t.cos(), t.sin(), 0.5], offset.max(0.0)).is_ok());
        }
    }
}

//! Named numerical tolerances.
//!
//! Every comparison against a threshold in the crate goes through one of
//! these constants or through a [`Tolerances`] value built from them, so a
//! run's effective thresholds can be reported and overridden.

use serde::{Deserialize, Serialize};

/// Hermiticity: `‖X − X†‖_F ≤ HERMITIAN_PER_DIM · dim`.
pub const HERMITIAN_PER_DIM: f64 = 1e-10;

/// Density matrices: `|tr ρ − 1| ≤ TRACE`.
pub const TRACE: f64 = 1e-9;

/// Density matrices: `λ_min(ρ) ≥ −PSD`.
pub const PSD: f64 = 1e-9;

/// Eigenvalue comparisons inside the one-sided tests.
pub const EIGENVALUE: f64 = 1e-9;

/// Norm comparisons inside the one-sided tests.
pub const NORM: f64 = 1e-8;

/// Jacobi sweeps stop once the off-diagonal mass falls below this
/// fraction of `‖H‖_F`.
pub const JACOBI_OFFDIAG: f64 = 1e-12;

/// Unit-norm check for net points and product-state factors.
pub const UNIT_NORM: f64 = 1e-10;

/// Newton stopping rule for the analytic center.
pub const CENTER_GRADIENT: f64 = 1e-8;

/// Extension feasibility: eigenvalues above `−EXTENSION_PSD` count as PSD.
pub const EXTENSION_PSD: f64 = 1e-8;

/// Runtime-adjustable thresholds, defaulting to the constants above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub eigenvalue: f64,
    pub norm: f64,
    pub trace: f64,
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eigenvalue: EIGENVALUE,
            norm: NORM,
            trace: TRACE,
            psd: PSD,
        }
    }
}

//! Separability testing for bipartite quantum states.

pub mod error;
pub mod gadgets;
pub mod hilbert;
pub mod io;
pub mod nets;
pub mod onesided;
pub mod qsep;
pub mod scalar;
pub mod states;
pub mod symext;
pub mod witness;
pub mod wopt;
pub mod tolerance;

pub use error::{Error, Result};
pub use onesided::{Outcome, Reason, Verdict};
pub use hilbert::{BlochVector, ComplexMatrix, DensityMatrix, HermitianBasis, HermitianOp, Subsystem};
pub use scalar::Real;
pub use tolerance::Tolerances;

pub type Complex64 = num_complex::Complex<f64>;
pub type Rational = num_rational::BigRational;

pub type Matrix64 = ComplexMatrix<f64>;
pub type Matrix32 = ComplexMatrix<f32>;
pub type RationalMatrix = ComplexMatrix<Rational>;
pub type Hermitian64 = HermitianOp<f64>;
pub type Density64 = DensityMatrix<f64>;
pub type Density32 = DensityMatrix<f32>;
pub type Basis64 = HermitianBasis<f64>;
pub type Bloch64 = BlochVector<f64>;

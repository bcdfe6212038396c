//! Complex Hermitian linear algebra on `C^M ⊗ C^N`.

pub mod basis;
pub mod eig;
pub mod lu;
pub mod matrix;
pub mod operator;
pub mod partial;

pub use basis::{hermitian_basis, BlochVector, HermitianBasis};
pub use eig::{eigh, eigvalsh, singular_values, spectral_norm, trace_norm, EigDecomposition};
pub use lu::Lu;
pub use matrix::{inner, kron_vec, vec_norm, ComplexMatrix};
pub use operator::{
    eig_hermitian, is_unnormalized_pure, partial_trace, partial_transpose, realign, DensityMatrix,
    HermitianOp,
};
pub use partial::{partial_trace_matrix, partial_transpose_matrix, realign_matrix, Subsystem};

use num_complex::Complex;

use super::eig::{eigh, eigvalsh, EigDecomposition};
use super::matrix::ComplexMatrix;
use super::partial::{partial_trace_matrix, partial_transpose_matrix, realign_matrix, Subsystem};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tolerance;

/// A Hermitian operator, stored symmetrized.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOp<T> {
    matrix: ComplexMatrix<T>,
    residual: T,
}

impl<T: Real> HermitianOp<T> {
    /// Accepts `x` if `‖x − x†‖_F ≤ 1e−10·dim` and stores `(x + x†)/2`.
    pub fn new(x: ComplexMatrix<T>) -> Result<Self> {
        if !x.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian operator must be square, got {}x{}",
                x.rows(),
                x.cols()
            )));
        }
        let residual = x.hermitian_residual();
        let bound = T::lit(tolerance::HERMITIAN_PER_DIM) * T::lit(x.rows() as f64);
        if !(residual <= bound) {
            return Err(Error::NotHermitian {
                residual: residual.as_f64(),
                bound: bound.as_f64(),
            });
        }
        Ok(Self {
            matrix: x.hermitian_part(),
            residual,
        })
    }

    /// Symmetrizes without a tolerance check. For operators that are
    /// Hermitian by construction.
    pub fn symmetrize(x: ComplexMatrix<T>) -> Self {
        assert!(x.is_square(), "Hermitian operator must be square");
        let residual = x.hermitian_residual();
        Self {
            matrix: x.hermitian_part(),
            residual,
        }
    }

    pub fn identity(d: usize) -> Self {
        Self::symmetrize(ComplexMatrix::identity(d))
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(psi: &[Complex<T>]) -> Self {
        Self::symmetrize(ComplexMatrix::ket_bra(psi, psi))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    /// `‖x − x†‖_F` of the input this operator was built from.
    pub fn symmetrization_residual(&self) -> T {
        self.residual
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    /// `tr(self · other)`, real for Hermitian pairs.
    pub fn hs_inner(&self, other: &Self) -> T {
        self.matrix.trace_product(&other.matrix).re
    }

    pub fn frobenius_norm(&self) -> T {
        self.matrix.frobenius_norm()
    }

    pub fn eig(&self) -> EigDecomposition<T> {
        eigh(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        eigvalsh(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> T {
        *self.eigenvalues().last().expect("nonempty operator")
    }

    pub fn max_eigenvalue(&self) -> T {
        self.eigenvalues()[0]
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> T {
        let e = self.eigenvalues();
        e[0].abs().max(e[e.len() - 1].abs())
    }

    /// `⟨ψ|self|ψ⟩`.
    pub fn expectation(&self, psi: &[Complex<T>]) -> T {
        let h = self.matrix.mul_vec(psi);
        psi.iter().zip(&h).map(|(a, b)| (a.conj() * b).re).sum()
    }

    pub fn scale(&self, k: T) -> Self {
        Self::symmetrize(self.matrix.scale_real(&k))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::symmetrize(&self.matrix + &other.matrix)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::symmetrize(&self.matrix - &other.matrix)
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix<T>) -> Self {
        Self::symmetrize(u.matmul(&self.matrix).matmul(&u.dagger()))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::symmetrize(self.matrix.kron(&other.matrix))
    }

    pub fn cast<U: Real>(&self) -> HermitianOp<U> {
        HermitianOp {
            matrix: self.matrix.cast(),
            residual: U::lit(self.residual.as_f64()),
        }
    }
}

/// Unit-trace PSD operator on `C^M ⊗ C^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    m: usize,
    n: usize,
    op: HermitianOp<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(m: usize, n: usize, x: ComplexMatrix<T>) -> Result<Self> {
        Self::from_op(m, n, HermitianOp::new(x)?)
    }

    pub fn from_op(m: usize, n: usize, op: HermitianOp<T>) -> Result<Self> {
        if m < 2 || n < 2 {
            return Err(Error::InvalidState(format!(
                "subsystem dimensions must be at least 2, got {m}x{n}"
            )));
        }
        if op.dim() != m * n {
            return Err(Error::DimensionMismatch(format!(
                "operator of dimension {} on a {m}x{n} system",
                op.dim()
            )));
        }
        let tr = op.trace();
        if (tr - T::one()).abs() > T::lit(tolerance::TRACE) {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let lmin = op.min_eigenvalue();
        if lmin < -T::lit(tolerance::PSD) {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {lmin} is negative"
            )));
        }
        Ok(Self { m, n, op })
    }

    /// `I/(MN)`.
    pub fn maximally_mixed(m: usize, n: usize) -> Self {
        let d = m * n;
        let op = HermitianOp::identity(d).scale(T::one() / T::lit(d as f64));
        Self { m, n, op }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector.
    pub fn pure(m: usize, n: usize, psi: &[Complex<T>]) -> Result<Self> {
        let norm = super::matrix::vec_norm(psi);
        if norm.is_zero() {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let unit: Vec<_> = psi.iter().map(|z| z.unscale(norm)).collect();
        Self::from_op(m, n, HermitianOp::projector(&unit))
    }

    /// `|a⟩⟨a| ⊗ |b⟩⟨b|`.
    pub fn product_pure(a: &[Complex<T>], b: &[Complex<T>]) -> Result<Self> {
        Self::pure(a.len(), b.len(), &super::matrix::kron_vec(a, b))
    }

    /// Convex combination; weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(T, &DensityMatrix<T>)]) -> Result<Self> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let (m, n) = first.dims();
        let mut acc = ComplexMatrix::zeros(m * n, m * n);
        for (w, rho) in parts {
            if rho.dims() != (m, n) {
                return Err(Error::DimensionMismatch("mixture of different shapes".into()));
            }
            if *w < T::zero() {
                return Err(Error::InvalidParameter("negative mixture weight".into()));
            }
            acc = &acc + &rho.matrix().scale_real(w);
        }
        Self::new(m, n, acc)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn dim(&self) -> usize {
        self.m * self.n
    }

    pub fn op(&self) -> &HermitianOp<T> {
        &self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        self.op.matrix()
    }

    pub fn partial_trace(&self, which: Subsystem) -> HermitianOp<T> {
        partial_trace(self, which)
    }

    /// Marginal on `keep`.
    pub fn reduced(&self, keep: Subsystem) -> HermitianOp<T> {
        partial_trace(self, keep.other())
    }

    pub fn partial_transpose(&self, which: Subsystem) -> HermitianOp<T> {
        partial_transpose(&self.op, self.m, self.n, which)
    }

    pub fn realign(&self) -> ComplexMatrix<T> {
        realign(&self.op, self.m, self.n)
    }

    /// `(U⊗V) ρ (U⊗V)†`.
    pub fn local_unitary(&self, u: &ComplexMatrix<T>, v: &ComplexMatrix<T>) -> Self {
        Self {
            m: self.m,
            n: self.n,
            op: self.op.conjugate_by(&u.kron(v)),
        }
    }

    pub fn cast<U: Real>(&self) -> DensityMatrix<U> {
        DensityMatrix {
            m: self.m,
            n: self.n,
            op: self.op.cast(),
        }
    }
}

pub fn partial_trace<T: Real>(rho: &DensityMatrix<T>, which: Subsystem) -> HermitianOp<T> {
    HermitianOp::symmetrize(partial_trace_matrix(rho.matrix(), rho.m, rho.n, which))
}

pub fn partial_transpose<T: Real>(op: &HermitianOp<T>, m: usize, n: usize, which: Subsystem) -> HermitianOp<T> {
    HermitianOp::symmetrize(partial_transpose_matrix(op.matrix(), m, n, which))
}

pub fn realign<T: Real>(op: &HermitianOp<T>, m: usize, n: usize) -> ComplexMatrix<T> {
    realign_matrix(op.matrix(), m, n)
}

pub fn eig_hermitian<T: Real>(h: &HermitianOp<T>) -> EigDecomposition<T> {
    h.eig()
}

/// `o` is `α|ψ⟩⟨ψ|` for a unit `ψ` iff `tr o² = α²` and `tr o³ = α³`
/// (given `tr o = α`, `o ⪰ 0`).
pub fn is_unnormalized_pure<T: Real>(o: &HermitianOp<T>, alpha: T, tol: T) -> Result<bool> {
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} outside (0, 1]")));
    }
    let o2 = o.matrix().matmul(o.matrix());
    let tr2 = o2.trace().re;
    let tr3 = o2.trace_product(o.matrix()).re;
    Ok((tr2 - alpha * alpha).abs() <= tol && (tr3 - alpha * alpha * alpha).abs() <= tol)
}

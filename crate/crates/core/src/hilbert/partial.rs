use num_traits::Num;
use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;

/// One factor of `C^M ⊗ C^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

fn check_dims<T>(x: &ComplexMatrix<T>, m: usize, n: usize) {
    assert!(
        x.rows() == m * n && x.cols() == m * n,
        "operator is {}x{}, expected {}x{}",
        x.rows(),
        x.cols(),
        m * n,
        m * n
    );
}

/// Traces out `which`; the result acts on the remaining factor.
pub fn partial_trace_matrix<T: Clone + Num>(
    x: &ComplexMatrix<T>,
    m: usize,
    n: usize,
    which: Subsystem,
) -> ComplexMatrix<T> {
    check_dims(x, m, n);
    match which {
        Subsystem::B => ComplexMatrix::from_fn(m, m, |a1, a2| {
            (0..n).fold(num_complex::Complex::new(T::zero(), T::zero()), |acc, b| {
                acc + x[(a1 * n + b, a2 * n + b)].clone()
            })
        }),
        Subsystem::A => ComplexMatrix::from_fn(n, n, |b1, b2| {
            (0..m).fold(num_complex::Complex::new(T::zero(), T::zero()), |acc, a| {
                acc + x[(a * n + b1, a * n + b2)].clone()
            })
        }),
    }
}

/// Transposes the indices of `which` only.
pub fn partial_transpose_matrix<T: Clone + Num>(
    x: &ComplexMatrix<T>,
    m: usize,
    n: usize,
    which: Subsystem,
) -> ComplexMatrix<T> {
    check_dims(x, m, n);
    ComplexMatrix::from_fn(m * n, m * n, |r, c| {
        let (a1, b1) = (r / n, r % n);
        let (a2, b2) = (c / n, c % n);
        match which {
            Subsystem::A => x[(a2 * n + b1, a1 * n + b2)].clone(),
            Subsystem::B => x[(a1 * n + b2, a2 * n + b1)].clone(),
        }
    })
}

/// Realignment: the `M² × N²` matrix with `U(A⊗B) = vec(A) vec(B)ᵀ`,
/// `vec` stacking columns.
pub fn realign_matrix<T: Clone + Num>(x: &ComplexMatrix<T>, m: usize, n: usize) -> ComplexMatrix<T> {
    check_dims(x, m, n);
    let mut out = ComplexMatrix::zeros(m * m, n * n);
    for ar in 0..m {
        for ac in 0..m {
            for br in 0..n {
                for bc in 0..n {
                    out[(ar + ac * m, br + bc * n)] = x[(ar * n + br, ac * n + bc)].clone();
                }
            }
        }
    }
    out
}

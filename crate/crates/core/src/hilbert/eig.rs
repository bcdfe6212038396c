use num_complex::Complex;
use num_traits::Zero;

use super::matrix::ComplexMatrix;
use crate::scalar::Real;
use crate::tolerance;

const MAX_SWEEPS: usize = 64;

/// Eigenpairs of a Hermitian matrix, eigenvalues nonincreasing.
///
/// Column `k` of `vectors` is the unit eigenvector for `values[k]`.
#[derive(Clone, Debug)]
pub struct EigDecomposition<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> EigDecomposition<T> {
    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        self.vectors.column(k)
    }

    pub fn max(&self) -> T {
        self.values[0]
    }

    pub fn min(&self) -> T {
        *self.values.last().expect("nonempty spectrum")
    }
}

/// Full eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.
///
/// Only the Hermitian part of `h` is used.
pub fn eigh<T: Real>(h: &ComplexMatrix<T>) -> EigDecomposition<T> {
    let (values, vectors) = jacobi(h, true);
    EigDecomposition {
        values,
        vectors: vectors.expect("vectors requested"),
    }
}

/// Eigenvalues only, nonincreasing.
pub fn eigvalsh<T: Real>(h: &ComplexMatrix<T>) -> Vec<T> {
    jacobi(h, false).0
}

fn jacobi<T: Real>(h: &ComplexMatrix<T>, want_vectors: bool) -> (Vec<T>, Option<ComplexMatrix<T>>) {
    assert!(h.is_square(), "eigendecomposition of a non-square matrix");
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));

    let scale = a.frobenius_norm();
    let rel = T::lit(tolerance::JACOBI_OFFDIAG).max(T::epsilon() * T::lit(n as f64));
    let threshold = rel * scale;

    if n > 1 && scale > T::zero() {
        for _ in 0..MAX_SWEEPS {
            if off_diagonal(&a) <= threshold {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut a, v.as_mut(), p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = v.map(|v| ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]));
    (values, vectors)
}

fn off_diagonal<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.rows();
    let mut acc = T::zero();
    for r in 0..n {
        for c in 0..n {
            if r != c {
                acc = acc + a[(r, c)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

// Zeroes a[p][q] with U = diag(1, e^{-iφ}) · R(θ), A ← U†AU.
fn rotate<T: Real>(a: &mut ComplexMatrix<T>, v: Option<&mut ComplexMatrix<T>>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r.is_zero() || !r.is_normal() {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (T::lit(2.0) * r);
    let t = if tau.is_zero() {
        T::one()
    } else {
        tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    let phase = (apq / r).conj();

    let upp = Complex::new(c, T::zero());
    let upq = Complex::new(s, T::zero());
    let uqp = phase * (-s);
    let uqq = phase * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * upp + akq * uqp;
        a[(k, q)] = akp * upq + akq * uqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
        a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)].im = T::zero();
    a[(q, q)].im = T::zero();

    if let Some(v) = v {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = vkp * upp + vkq * uqp;
            v[(k, q)] = vkp * upq + vkq * uqq;
        }
    }
}

/// Singular values of an arbitrary matrix, nonincreasing.
///
/// Read off the Hermitian dilation `[[0, X], [X†, 0]]`, whose spectrum is
/// `±σ_i` padded with zeros; this avoids squaring the condition number.
pub fn singular_values<T: Real>(x: &ComplexMatrix<T>) -> Vec<T> {
    let (r, c) = (x.rows(), x.cols());
    let mut d = ComplexMatrix::zeros(r + c, r + c);
    for i in 0..r {
        for j in 0..c {
            d[(i, r + j)] = x[(i, j)];
            d[(r + j, i)] = x[(i, j)].conj();
        }
    }
    let eig = eigvalsh(&d);
    eig.into_iter().take(r.min(c)).map(|s| s.max(T::zero())).collect()
}

/// Sum of singular values.
pub fn trace_norm<T: Real>(x: &ComplexMatrix<T>) -> T {
    singular_values(x).into_iter().sum()
}

/// Largest singular value.
pub fn spectral_norm<T: Real>(x: &ComplexMatrix<T>) -> T {
    singular_values(x).first().copied().unwrap_or_else(T::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type M = ComplexMatrix<f64>;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> M {
        let x = M::from_fn(n, n, |_, _| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        x.hermitian_part()
    }

    #[test]
    fn reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 3, 5, 9] {
            let h = random_hermitian(n, &mut rng);
            let e = eigh(&h);
            let back = e.vectors.matmul(&M::diagonal(&e.values)).matmul(&e.vectors.dagger());
            assert!(back.distance(&h) < 1e-10, "n={n}");
            let gram = e.vectors.dagger().matmul(&e.vectors);
            assert!(gram.distance(&M::identity(n)) < 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn pauli_y_spectrum() {
        let mut y = M::zeros(2, 2);
        y[(0, 1)] = Complex::new(0.0, -1.0);
        y[(1, 0)] = Complex::new(0.0, 1.0);
        let e = eigvalsh(&y);
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_spectrum() {
        let e = eigvalsh(&M::identity(4).scale_real(&0.25));
        assert!(e.iter().all(|&x| (x - 0.25).abs() < 1e-15));
    }

    #[test]
    fn trace_norm_of_rectangular_matrix() {
        // singular values 3 and 2
        let mut x = M::zeros(2, 3);
        x[(0, 1)] = Complex::new(0.0, 3.0);
        x[(1, 2)] = Complex::new(-2.0, 0.0);
        let s = singular_values(&x);
        assert!((s[0] - 3.0).abs() < 1e-12 && (s[1] - 2.0).abs() < 1e-12);
        assert!((trace_norm(&x) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let h = ComplexMatrix::<f32>::from_fn(3, 3, |r, c| Complex::new(1.0 / (1 + r + c) as f32, 0.0));
        let e = eigh(&h);
        let back = e.vectors.matmul(&ComplexMatrix::diagonal(&e.values)).matmul(&e.vectors.dagger());
        assert!(back.distance(&h) < 1e-5);
    }
}

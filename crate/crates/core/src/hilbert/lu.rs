use num_complex::Complex;
use num_traits::Zero;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// LU factorization with partial pivoting of a square complex matrix.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: ComplexMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn new(a: &ComplexMatrix<T>) -> Result<Self> {
        assert!(a.is_square(), "LU of a non-square matrix");
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| lu[(i, col)].norm().partial_cmp(&lu[(j, col)].norm()).expect("finite"))
                .expect("nonempty range");
            if !(lu[(pivot, col)].norm() > scale * T::epsilon() * T::lit(n as f64)) {
                return Err(Error::InvalidParameter("singular matrix".into()));
            }
            if pivot != col {
                perm.swap(pivot, col);
                for c in 0..n {
                    let tmp = lu[(pivot, c)];
                    lu[(pivot, c)] = lu[(col, c)];
                    lu[(col, c)] = tmp;
                }
            }
            let d = lu[(col, col)];
            for r in col + 1..n {
                let f = lu[(r, col)] / d;
                lu[(r, col)] = f;
                if f.is_zero() {
                    continue;
                }
                for c in col + 1..n {
                    let v = lu[(col, c)];
                    lu[(r, c)] = lu[(r, c)] - f * v;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.perm.len();
        let mut y: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let v = self.lu[(i, k)] * y[k];
                y[i] = y[i] - v;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let v = self.lu[(i, k)] * y[k];
                y[i] = y[i] - v;
            }
            y[i] = y[i] / self.lu[(i, i)];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_pivoting_system() {
        let a = ComplexMatrix::<f64>::from_fn(3, 3, |r, c| match (r, c) {
            (0, 0) => Complex::new(0.0, 0.0),
            (0, 1) => Complex::new(1.0, 1.0),
            (r, c) => Complex::new((r + 2 * c) as f64, (r as f64) - 1.0),
        });
        let x = vec![Complex::new(1.0, -1.0), Complex::new(0.5, 2.0), Complex::new(-3.0, 0.0)];
        let b = a.mul_vec(&x);
        let got = Lu::new(&a).unwrap().solve(&b);
        for (u, v) in got.iter().zip(&x) {
            assert!((u - v).norm() < 1e-12);
        }
        assert!(Lu::new(&ComplexMatrix::<f64>::zeros(2, 2)).is_err());
    }
}

//! JSON encodings.
//!
//! Floating matrices are row-major lists of `[re, im]` pairs. Exact
//! matrices encode every scalar as `{"re": {"num", "den"}, "im": {...}}`
//! with decimal-string integers.

use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{ComplexMatrix, DensityMatrix, HermitianOp};
use crate::Rational;

pub type MatrixRows = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_rows(x: &ComplexMatrix<f64>) -> MatrixRows {
    (0..x.rows())
        .map(|r| x.row(r).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Malformed("matrix rows are empty or ragged".into()));
    }
    if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Malformed("matrix entries must be finite".into()));
    }
    let data = rows.iter().flatten().map(|&[re, im]| Complex::new(re, im)).collect();
    ComplexMatrix::from_vec(nrows, ncols, data)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityJson {
    pub m: usize,
    pub n: usize,
    pub matrix: MatrixRows,
}

impl DensityJson {
    pub fn from_density(rho: &DensityMatrix<f64>) -> Self {
        Self {
            m: rho.m(),
            n: rho.n(),
            matrix: matrix_to_rows(rho.matrix()),
        }
    }

    pub fn to_density(&self) -> Result<DensityMatrix<f64>> {
        DensityMatrix::new(self.m, self.n, matrix_from_rows(&self.matrix)?)
    }

    /// Reads the operator as Hermitian only (no trace or positivity check).
    pub fn to_hermitian(&self) -> Result<HermitianOp<f64>> {
        let x = matrix_from_rows(&self.matrix)?;
        if x.rows() != self.m * self.n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a {}x{} system",
                x.rows(),
                x.cols(),
                self.m,
                self.n
            )));
        }
        HermitianOp::new(x)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_density(path: &Path) -> Result<DensityMatrix<f64>> {
    read_json::<DensityJson>(path)?.to_density()
}

/// Serde adapter storing a Hermitian operator as `{"dim", "matrix"}`.
pub mod hermitian_json {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        dim: usize,
        matrix: MatrixRows,
    }

    pub fn serialize<S: Serializer>(op: &HermitianOp<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        Repr {
            dim: op.dim(),
            matrix: matrix_to_rows(op.matrix()),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<HermitianOp<f64>, D::Error> {
        let repr = Repr::deserialize(d)?;
        let x = matrix_from_rows(&repr.matrix).map_err(serde::de::Error::custom)?;
        if x.rows() != repr.dim {
            return Err(serde::de::Error::custom("dim does not match matrix"));
        }
        HermitianOp::new(x).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
}

impl RationalJson {
    pub fn from_rational(q: &Rational) -> Self {
        Self {
            num: q.numer().to_string(),
            den: q.denom().to_string(),
        }
    }

    pub fn to_rational(&self) -> Result<Rational> {
        let num = BigInt::from_str(self.num.trim()).map_err(|e| Error::Malformed(format!("numerator: {e}")))?;
        let den = BigInt::from_str(self.den.trim()).map_err(|e| Error::Malformed(format!("denominator: {e}")))?;
        if den.is_zero() {
            return Err(Error::Malformed("zero denominator".into()));
        }
        Ok(Rational::new(num, den))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexRationalJson {
    pub re: RationalJson,
    pub im: RationalJson,
}

impl ComplexRationalJson {
    pub fn from_complex(z: &Complex<Rational>) -> Self {
        Self {
            re: RationalJson::from_rational(&z.re),
            im: RationalJson::from_rational(&z.im),
        }
    }

    pub fn to_complex(&self) -> Result<Complex<Rational>> {
        Ok(Complex::new(self.re.to_rational()?, self.im.to_rational()?))
    }

    pub fn real(q: &Rational) -> Self {
        Self::from_complex(&Complex::new(q.clone(), Rational::zero()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalMatrixJson {
    pub m: usize,
    pub n: usize,
    pub matrix: Vec<Vec<ComplexRationalJson>>,
}

impl RationalMatrixJson {
    pub fn from_matrix(m: usize, n: usize, x: &ComplexMatrix<Rational>) -> Self {
        Self {
            m,
            n,
            matrix: (0..x.rows())
                .map(|r| x.row(r).iter().map(ComplexRationalJson::from_complex).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix<Rational>> {
        let d = self.m * self.n;
        if self.matrix.len() != d || self.matrix.iter().any(|r| r.len() != d) {
            return Err(Error::Malformed(format!("expected a {d}x{d} rational matrix")));
        }
        let data = self
            .matrix
            .iter()
            .flatten()
            .map(ComplexRationalJson::to_complex)
            .collect::<Result<Vec<_>>>()?;
        ComplexMatrix::from_vec(d, d, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::bell;

    #[test]
    fn density_round_trip() {
        let rho = bell();
        let j = serde_json::to_string(&DensityJson::from_density(&rho)).unwrap();
        let back: DensityJson = serde_json::from_str(&j).unwrap();
        assert_eq!(back.to_density().unwrap(), rho);
    }

    #[test]
    fn ragged_and_invalid_inputs() {
        let bad = DensityJson {
            m: 2,
            n: 1,
            matrix: vec![vec![[1.0, 0.0]], vec![[0.0, 0.0], [0.0, 0.0]]],
        };
        assert!(bad.to_density().is_err());
        let not_unit = DensityJson {
            m: 2,
            n: 2,
            matrix: matrix_to_rows(&ComplexMatrix::identity(4)),
        };
        assert!(not_unit.to_density().is_err());
        assert!(not_unit.to_hermitian().is_ok());
    }

    #[test]
    fn rational_round_trip() {
        let q = Rational::new(BigInt::from(-6), BigInt::from(8));
        let j = RationalJson::from_rational(&q);
        assert_eq!(j.num, "-3");
        assert_eq!(j.den, "4");
        assert_eq!(j.to_rational().unwrap(), q);
        let zero_den = RationalJson {
            num: "1".into(),
            den: "0".into(),
        };
        assert!(zero_den.to_rational().is_err());
    }
}

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ALGEBRA_TOL, DIMENSION_CAP};
use crate::error::{invalid, Error, Result};

pub type C64 = Complex64;

/// Dense complex matrix used for every operator in the simulator.
///
/// Entries are always finite and both dimensions lie in `1..=DIMENSION_CAP`.
/// The arithmetic operator impls panic on shape mismatch, exactly like the
/// underlying `nalgebra` types; fallible callers go through [`ComplexMatrix::matmul`].
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

fn check_shape(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(invalid("matrix dimensions must be at least 1"));
    }
    let largest = rows.max(cols);
    if largest > DIMENSION_CAP {
        return Err(Error::Capacity {
            requested: largest,
            cap: DIMENSION_CAP,
        });
    }
    Ok(())
}

impl ComplexMatrix {
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        check_shape(rows, cols)?;
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: entries.len(),
            });
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(invalid("matrix entries must be finite"));
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(rows, cols, &entries),
        })
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::from_row_major(
            rows,
            cols,
            entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let u = DVector::from_column_slice(u);
        let v = DVector::from_column_slice(v);
        Self {
            inner: &u * v.adjoint(),
        }
    }

    pub(crate) fn from_inner(inner: DMatrix<C64>) -> Self {
        Self { inner }
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.inner[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            inner: self.inner.scale(factor),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.cols(),
                actual: rhs.rows(),
            });
        }
        Ok(Self {
            inner: &self.inner * &rhs.inner,
        })
    }

    /// Kronecker product with `self` as the more significant factor.
    pub fn kron(&self, low: &Self) -> Result<Self> {
        check_shape(self.rows() * low.rows(), self.cols() * low.cols())?;
        Ok(Self {
            inner: self.inner.kronecker(&low.inner),
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.inner.shape(), other.inner.shape());
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square()
            && (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows())) <= tol
    }

    pub fn apply(&self, vector: &[C64]) -> Vec<C64> {
        let v = DVector::from_column_slice(vector);
        (&self.inner * v).iter().copied().collect()
    }

    /// Eigendecomposition of a Hermitian matrix.
    ///
    /// The input is symmetrised as `(A + A†)/2` before decomposition, so
    /// round-off asymmetry below `ALGEBRA_TOL` is tolerated.
    pub fn eigh(&self) -> Result<HermitianEigen> {
        if !self.is_square() {
            return Err(invalid(format!(
                "eigendecomposition needs a square matrix, got {}x{}",
                self.rows(),
                self.cols()
            )));
        }
        if !self.is_hermitian(ALGEBRA_TOL) {
            return Err(Error::Invariant("matrix is not Hermitian".into()));
        }
        let sym = (&self.inner + self.inner.adjoint()).scale(0.5);
        let eig = SymmetricEigen::new(sym);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(self.rows(), self.rows(), |r, c| {
            eig.eigenvectors[(r, order[c])]
        });
        Ok(HermitianEigen {
            values,
            vectors: Self::from_inner(vectors),
        })
    }

    /// Projector onto the span of the selected eigenvector columns.
    pub(crate) fn column_projector(
        vectors: &Self,
        columns: impl IntoIterator<Item = usize>,
    ) -> Self {
        let n = vectors.rows();
        let mut acc = DMatrix::<C64>::zeros(n, n);
        for c in columns {
            let v = vectors.inner.column(c);
            acc += &v * v.adjoint();
        }
        Self::from_inner(acc)
    }

    /// Applies `f` to the eigenvalues of a Hermitian matrix.
    pub fn hermitian_map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let eig = self.eigh()?;
        let v = &eig.vectors.inner;
        let d = DMatrix::from_diagonal(&DVector::from_iterator(
            eig.values.len(),
            eig.values.iter().map(|&x| C64::new(f(x), 0.0)),
        ));
        Ok(Self::from_inner(v * d * v.adjoint()))
    }

    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.push(self.inner[(r, c)]);
            }
        }
        out
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_inner(&self.inner + &rhs.inner)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_inner(&self.inner - &rhs.inner)
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_inner(&self.inner * &rhs.inner)
    }
}

/// JSON dump: row-major entries as `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
pub struct MatrixDump {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixDump {
    fn from(m: &ComplexMatrix) -> Self {
        MatrixDump {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.to_row_major().into_iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<MatrixDump> for ComplexMatrix {
    type Error = Error;

    fn try_from(d: MatrixDump) -> Result<Self> {
        let entries = d
            .entries
            .into_iter()
            .map(|[re, im]| C64::new(re, im))
            .collect();
        ComplexMatrix::from_row_major(d.rows, d.cols, entries)
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixDump::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let dump = MatrixDump::deserialize(deserializer)?;
        ComplexMatrix::try_from(dump).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(ComplexMatrix::from_real(1, 1, &[f64::NAN]).is_err());
        assert!(ComplexMatrix::from_real(0, 1, &[]).is_err());
        assert!(matches!(
            ComplexMatrix::from_row_major(2, 2, vec![C64::new(1.0, 0.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kron_respects_cap() {
        let big = ComplexMatrix::identity(64);
        assert!(matches!(big.kron(&big), Err(Error::Capacity { .. })));
    }

    #[test]
    fn kron_of_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn eigh_sorted_and_reconstructs() {
        let m = ComplexMatrix::from_row_major(
            2,
            2,
            vec![
                C64::new(2.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, -1.0),
                C64::new(2.0, 0.0),
            ],
        )
        .unwrap();
        let eig = m.eigh().unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-12);
        assert!((eig.values[1] - 3.0).abs() < 1e-12);
        let back = m.hermitian_map(|x| x).unwrap();
        assert!(back.max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(m.eigh().is_err());
    }

    #[test]
    fn json_dump_roundtrip() {
        let m = ComplexMatrix::from_row_major(1, 2, vec![C64::new(0.5, -0.25), C64::new(0.0, 1.0)])
            .unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(
            text,
            r#"{"rows":1,"cols":2,"entries":[[0.5,-0.25],[0.0,1.0]]}"#
        );
        let back: ComplexMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }
}

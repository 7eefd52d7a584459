//! Dense complex matrices and the Hermitian/spectrum newtypes.
//!
//! [`ComplexMatrix`] is a thin validated wrapper over a dense column-major
//! `nalgebra` matrix of `Complex<f64>`; construction rejects non-finite
//! entries so that NaNs cannot propagate silently into verdicts.
//! [`HermitianMatrix`] additionally certifies (and enforces, by averaging
//! with the adjoint) Hermitian symmetry, and [`Spectrum`] holds a real
//! spectrum sorted in non-increasing order.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::tol::ToleranceConfig;
use crate::{Error, Result};

/// Dense complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major complex entries.
    ///
    /// # Examples
    ///
    /// ```
    /// use num_complex::Complex64;
    /// use psdblocks::numerics::ComplexMatrix;
    ///
    /// let i = Complex64::new(0.0, 1.0);
    /// let m = ComplexMatrix::from_row_major(2, 2, &[
    ///     Complex64::new(1.0, 0.0), i,
    ///     -i, Complex64::new(2.0, 0.0),
    /// ]).unwrap();
    /// assert_eq!(m.get(0, 1), i);
    /// ```
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Self::from_raw(DMatrix::from_row_slice(rows, cols, entries))
    }

    /// Builds a real matrix from row-major entries.
    pub fn from_real_row_major(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let data: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_raw(DMatrix::from_row_slice(rows, cols, &data))
    }

    /// Wraps a raw `nalgebra` matrix, rejecting NaN or infinite entries.
    pub fn from_raw(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { inner })
    }

    /// Wraps a matrix known to be finite (internal results of arithmetic on
    /// validated inputs).
    pub(crate) fn from_raw_unchecked(inner: DMatrix<Complex64>) -> Self {
        debug_assert!(inner.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        Self { inner }
    }

    /// The `rows x cols` zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    /// The `n x n` identity.
    pub fn identity(n: usize) -> Self {
        Self {
            inner: DMatrix::identity(n, n),
        }
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

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    /// Borrows the underlying `nalgebra` matrix.
    pub fn raw(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    /// Consumes the wrapper, returning the underlying matrix.
    pub fn into_raw(self) -> DMatrix<Complex64> {
        self.inner
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_raw_unchecked(self.inner.adjoint())
    }

    /// Transpose without conjugation.
    pub fn transpose(&self) -> Self {
        Self::from_raw_unchecked(self.inner.transpose())
    }

    /// Entrywise complex conjugate.
    pub fn conjugate(&self) -> Self {
        Self::from_raw_unchecked(self.inner.conjugate())
    }

    /// Matrix product, checking inner dimensions.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Ok(Self::from_raw_unchecked(&self.inner * &rhs.inner))
    }

    /// Matrix sum, checking shapes.
    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.same_shape(rhs, "add")?;
        Ok(Self::from_raw_unchecked(&self.inner + &rhs.inner))
    }

    /// Matrix difference, checking shapes.
    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.same_shape(rhs, "subtract")?;
        Ok(Self::from_raw_unchecked(&self.inner - &rhs.inner))
    }

    /// Scales by a real factor.
    pub fn scale(&self, factor: f64) -> Self {
        Self::from_raw_unchecked(self.inner.map(|z| z * factor))
    }

    /// Largest entry magnitude (the max norm).
    pub fn max_abs_entry(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Sum of diagonal entries. Requires a square matrix.
    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "trace of a {}x{} matrix",
                self.rows(),
                self.cols()
            )));
        }
        Ok(self.inner.diagonal().iter().sum())
    }

    /// Largest entry magnitude of `self - rhs*` over a square matrix —
    /// the Hermitian deviation used by [`HermitianMatrix::new`].
    pub fn hermitian_deviation(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian test on a {}x{} matrix",
                self.rows(),
                self.cols()
            )));
        }
        let diff = &self.inner - self.inner.adjoint();
        Ok(diff.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    fn same_shape(&self, rhs: &Self, op: &str) -> Result<()> {
        if self.rows() != rhs.rows() || self.cols() != rhs.cols() {
            return Err(Error::DimensionMismatch(format!(
                "cannot {op} {}x{} and {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows() {
            write!(f, "[")?;
            for j in 0..self.cols() {
                let z = self.get(i, j);
                if j > 0 {
                    write!(f, ", ")?;
                }
                if z.im == 0.0 {
                    write!(f, "{:.6}", z.re)?;
                } else {
                    write!(f, "{:.6}{:+.6}i", z.re, z.im)?;
                }
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Hermitian matrix, stored exactly symmetrized.
///
/// Construction checks the Hermitian deviation `max |M - M*|` against
/// [`ToleranceConfig::hermit_tol`] and then stores `(M + M*)/2`, so
/// downstream spectral routines always see an exactly Hermitian input.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    mat: ComplexMatrix,
}

impl HermitianMatrix {
    /// Validates and symmetrizes a square matrix.
    pub fn new(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        let deviation = m.hermitian_deviation()?;
        if deviation > tol.hermit_tol {
            return Err(Error::NotHermitian {
                deviation,
                tol: tol.hermit_tol,
            });
        }
        Ok(Self::symmetrize(m))
    }

    /// Symmetrizes without a deviation check. Intended for matrices that
    /// are Hermitian by construction (sums of Hermitian matrices, congruences
    /// `X* H X`, ...) where roundoff is the only source of asymmetry.
    pub fn symmetrize(m: &ComplexMatrix) -> Self {
        assert!(m.is_square(), "symmetrize requires a square matrix");
        let sym = (m.raw() + m.raw().adjoint()).map(|z| z * 0.5);
        Self {
            mat: ComplexMatrix::from_raw_unchecked(sym),
        }
    }

    /// Hermitian matrix from real row-major entries (must be symmetric).
    pub fn from_real_row_major(n: usize, entries: &[f64]) -> Result<Self> {
        let m = ComplexMatrix::from_real_row_major(n, n, entries)?;
        Self::new(&m, &ToleranceConfig::default())
    }

    /// Diagonal matrix from real diagonal entries.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        Self {
            mat: ComplexMatrix::from_raw_unchecked(m),
        }
    }

    /// The `n x n` identity.
    pub fn identity(n: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    /// Borrows the symmetrized matrix.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// Borrows the underlying `nalgebra` matrix.
    pub fn raw(&self) -> &DMatrix<Complex64> {
        self.mat.raw()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.mat.get(row, col)
    }

    /// Hermitian sum, checking dimensions.
    pub fn add(&self, rhs: &Self) -> Result<Self> {
        Ok(Self {
            mat: self.mat.add(&rhs.mat)?,
        })
    }

    /// Hermitian difference, checking dimensions.
    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        Ok(Self {
            mat: self.mat.sub(&rhs.mat)?,
        })
    }

    /// Scales by a real factor (Hermitian-preserving).
    pub fn scale(&self, factor: f64) -> Self {
        Self {
            mat: self.mat.scale(factor),
        }
    }

    /// The congruence `X* H X`, Hermitian by construction.
    pub fn congruence(&self, x: &ComplexMatrix) -> Result<Self> {
        if x.rows() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "congruence of {0}x{0} by {1}x{2}",
                self.dim(),
                x.rows(),
                x.cols()
            )));
        }
        let product = x.raw().adjoint() * self.raw() * x.raw();
        Ok(Self::symmetrize(&ComplexMatrix::from_raw_unchecked(
            product,
        )))
    }

    /// Real trace.
    pub fn trace(&self) -> f64 {
        self.mat.raw().diagonal().iter().map(|z| z.re).sum()
    }
}

impl fmt::Display for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.mat.fmt(f)
    }
}

/// Real spectrum sorted in non-increasing order.
///
/// Used for both Hermitian eigenvalues and singular values; the sorting
/// convention matches the index conventions of the block properties
/// (`lambda_1 >= lambda_2 >= ...`, `s_1 >= s_2 >= ...`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts the given values into non-increasing order.
    pub fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.partial_cmp(a).expect("spectrum values must not be NaN"));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The j-th value, 0-indexed, largest first.
    pub fn get(&self, j: usize) -> f64 {
        self.values[j]
    }

    /// Largest value; zero for an empty spectrum.
    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Smallest value; zero for an empty spectrum.
    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Partial products `prod_{j<=k}` for `k = 1..=len`.
    pub fn prefix_products(&self) -> Vec<f64> {
        self.values
            .iter()
            .scan(1.0, |acc, &v| {
                *acc *= v;
                Some(*acc)
            })
            .collect()
    }

    /// Partial sums `sum_{j<=k}` for `k = 1..=len`.
    pub fn prefix_sums(&self) -> Vec<f64> {
        self.values
            .iter()
            .scan(0.0, |acc, &v| {
                *acc += v;
                Some(*acc)
            })
            .collect()
    }
}

/// 64-bit FNV-1a digest of a matrix's dimensions and entry bits, attached
/// to solver-failure errors so the offending input can be identified in
/// logs without printing the whole matrix.
pub(crate) fn matrix_digest(m: &DMatrix<Complex64>) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            hash ^= u64::from(b);
            hash = hash.wrapping_mul(0x1000_0000_01b3);
        }
    };
    eat(&(m.nrows() as u64).to_le_bytes());
    eat(&(m.ncols() as u64).to_le_bytes());
    for z in m.iter() {
        eat(&z.re.to_bits().to_le_bytes());
        eat(&z.im.to_bits().to_le_bytes());
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(rows: usize, cols: usize, re: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real_row_major(rows, cols, re).unwrap()
    }

    #[test]
    fn row_major_layout_matches_get() {
        let m = cm(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(m.get(0, 2).re, 3.0);
        assert_eq!(m.get(1, 0).re, 4.0);
    }

    #[test]
    fn non_finite_entries_rejected() {
        let err = ComplexMatrix::from_real_row_major(1, 2, &[1.0, f64::NAN]).unwrap_err();
        assert!(matches!(err, Error::NonFinite));
        let err = ComplexMatrix::from_real_row_major(1, 1, &[f64::INFINITY]).unwrap_err();
        assert!(matches!(err, Error::NonFinite));
    }

    #[test]
    fn entry_count_mismatch_rejected() {
        assert!(matches!(
            ComplexMatrix::from_real_row_major(2, 2, &[1.0, 2.0, 3.0]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn mul_checks_inner_dimensions() {
        let a = cm(2, 3, &[1.0; 6]);
        let b = cm(3, 1, &[1.0; 3]);
        assert_eq!(a.mul(&b).unwrap().rows(), 2);
        assert!(matches!(a.mul(&a), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let i = Complex64::new(0.0, 1.0);
        let m = ComplexMatrix::from_row_major(1, 2, &[i, Complex64::new(2.0, 0.0)]).unwrap();
        let a = m.adjoint();
        assert_eq!(a.rows(), 2);
        assert_eq!(a.get(0, 0), -i);
    }

    #[test]
    fn hermitian_rejects_asymmetric_input() {
        let tol = ToleranceConfig::default();
        let m = cm(2, 2, &[1.0, 2.0, 2.5, 3.0]);
        let err = HermitianMatrix::new(&m, &tol).unwrap_err();
        match err {
            Error::NotHermitian { deviation, .. } => assert!((deviation - 0.5).abs() < 1e-15),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn hermitian_symmetrizes_within_band() {
        let tol = ToleranceConfig::default();
        let m = cm(2, 2, &[1.0, 2.0 + 1e-10, 2.0, 3.0]);
        let h = HermitianMatrix::new(&m, &tol).unwrap();
        assert_eq!(h.get(0, 1), h.get(1, 0).conj());
        assert!((h.get(0, 1).re - (2.0 + 5e-11)).abs() < 1e-12);
    }

    #[test]
    fn complex_hermitian_accepted() {
        let tol = ToleranceConfig::default();
        let i = Complex64::new(0.0, 1.0);
        let m = ComplexMatrix::from_row_major(
            2,
            2,
            &[Complex64::new(2.0, 0.0), i, -i, Complex64::new(1.0, 0.0)],
        )
        .unwrap();
        let h = HermitianMatrix::new(&m, &tol).unwrap();
        assert_eq!(h.get(1, 0), -i);
    }

    #[test]
    fn congruence_is_hermitian() {
        let tol = ToleranceConfig::default();
        let h = HermitianMatrix::new(&cm(2, 2, &[2.0, 1.0, 1.0, 3.0]), &tol).unwrap();
        let x = cm(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        let c = h.congruence(&x).unwrap();
        assert_eq!(c.get(0, 1), c.get(1, 0).conj());
        // X* H X with real symmetric H and real X: entry (0,0) is 2.
        assert!((c.get(0, 0).re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn spectrum_sorts_descending() {
        let s = Spectrum::from_unsorted(vec![1.0, 3.0, 2.0]);
        assert_eq!(s.values(), &[3.0, 2.0, 1.0]);
        assert_eq!(s.prefix_products(), vec![3.0, 6.0, 6.0]);
        assert_eq!(s.prefix_sums(), vec![3.0, 5.0, 6.0]);
    }

    #[test]
    fn digest_distinguishes_nearby_matrices() {
        let a = cm(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let b = cm(2, 2, &[1.0, 0.0, 0.0, 1.0 + 1e-15]);
        assert_ne!(matrix_digest(a.raw()), matrix_digest(b.raw()));
    }
}

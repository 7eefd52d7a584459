//! Spectral decompositions, PSD tests, and matrix functions.
//!
//! All routines operate on the validated wrappers from
//! [`super::matrix`]. Hermitian eigendecompositions are returned sorted in
//! non-increasing order; solver non-convergence surfaces as
//! [`Error::SolverFailure`] carrying a digest of the offending input rather
//! than a panic.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::matrix::{matrix_digest, ComplexMatrix, HermitianMatrix, Spectrum};
use super::tol::ToleranceConfig;
use crate::{Error, Result};

/// Iteration cap for the QR/QL sweeps inside the eigen- and singular-value
/// solvers. Far beyond what well-posed inputs of our sizes need; hitting it
/// indicates genuine stagnation and is reported as a solver failure.
const MAX_SOLVER_ITERATIONS: usize = 10_000;

/// Result of a positive-semidefiniteness test.
#[derive(Debug, Clone)]
pub struct PsdCheck {
    /// Verdict: `lambda_min >= -psd_tol * max(1, ||h||)`.
    pub is_psd: bool,
    /// Smallest eigenvalue found.
    pub lambda_min: f64,
    /// The negative floor `-psd_tol * max(1, ||h||)` the verdict used.
    pub threshold: f64,
    /// Eigenpair witnessing the failure; present iff `is_psd` is false.
    pub witness: Option<PsdWitness>,
}

/// Eigenpair certifying a PSD failure.
#[derive(Debug, Clone)]
pub struct PsdWitness {
    pub eigenvalue: f64,
    pub eigenvector: Vec<Complex64>,
}

/// Full Hermitian eigendecomposition, eigenvalues non-increasing and the
/// unitary eigenvector matrix permuted to match.
pub fn eig_hermitian(h: &HermitianMatrix) -> Result<(Spectrum, ComplexMatrix)> {
    let n = h.dim();
    let eig = h
        .raw()
        .clone()
        .try_symmetric_eigen(f64::EPSILON, MAX_SOLVER_ITERATIONS)
        .ok_or_else(|| Error::SolverFailure {
            kind: "hermitian eigenvalue",
            rows: n,
            cols: n,
            digest: matrix_digest(h.raw()),
        })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .expect("eigenvalues are finite")
    });

    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<Complex64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }

    Ok((
        Spectrum::from_unsorted(values),
        ComplexMatrix::from_raw_unchecked(vectors),
    ))
}

/// Eigenvalues only, non-increasing.
pub fn eig_hermitian_values(h: &HermitianMatrix) -> Result<Spectrum> {
    eig_hermitian(h).map(|(spectrum, _)| spectrum)
}

/// Singular values of a rectangular complex matrix, non-increasing.
pub fn singular_values(x: &ComplexMatrix) -> Result<Spectrum> {
    let svd = x
        .raw()
        .clone()
        .try_svd(false, false, f64::EPSILON, MAX_SOLVER_ITERATIONS)
        .ok_or_else(|| Error::SolverFailure {
            kind: "singular value",
            rows: x.rows(),
            cols: x.cols(),
            digest: matrix_digest(x.raw()),
        })?;
    Ok(Spectrum::from_unsorted(
        svd.singular_values.iter().copied().collect(),
    ))
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(x: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(x)?.max())
}

/// Spectral norm of a Hermitian matrix (largest eigenvalue magnitude).
pub fn spectral_norm_hermitian(h: &HermitianMatrix) -> Result<f64> {
    let spectrum = eig_hermitian_values(h)?;
    Ok(spectrum.max().abs().max(spectrum.min().abs()))
}

/// PSD test with a witness eigenpair on failure.
///
/// The verdict uses the relative floor `lambda_min >= -psd_tol * max(1, ||h||)`:
/// eigenvalues that are negative only at roundoff scale (relative to the
/// matrix's size) do not disqualify an input.
pub fn is_psd(h: &HermitianMatrix, tol: &ToleranceConfig) -> Result<PsdCheck> {
    let (spectrum, vectors) = eig_hermitian(h)?;
    let norm = spectrum.max().abs().max(spectrum.min().abs());
    let threshold = -tol.psd_tol * norm.max(1.0);
    let lambda_min = spectrum.min();
    let is_psd = lambda_min >= threshold;
    let witness = if is_psd {
        None
    } else {
        let j = spectrum.len() - 1;
        Some(PsdWitness {
            eigenvalue: lambda_min,
            eigenvector: vectors.raw().column(j).iter().copied().collect(),
        })
    };
    Ok(PsdCheck {
        is_psd,
        lambda_min,
        threshold,
        witness,
    })
}

/// Rebuilds `V diag(f(lambda)) V*` from a decomposition, symmetrized.
pub(crate) fn rebuild_hermitian(vectors: &ComplexMatrix, values: &[f64]) -> HermitianMatrix {
    let n = vectors.rows();
    let mut diag = DMatrix::<Complex64>::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        diag[(i, i)] = Complex64::new(v, 0.0);
    }
    let rebuilt = vectors.raw() * diag * vectors.raw().adjoint();
    HermitianMatrix::symmetrize(&ComplexMatrix::from_raw_unchecked(rebuilt))
}

/// The PSD square root.
///
/// Eigenvalues inside the PSD roundoff band `[-psd_tol * max(1, ||h||), 0)`
/// are clamped to zero; anything below the band is a domain error.
pub fn sqrt_psd(h: &HermitianMatrix, tol: &ToleranceConfig) -> Result<HermitianMatrix> {
    let (spectrum, vectors) = eig_hermitian(h)?;
    let norm = spectrum.max().abs().max(spectrum.min().abs());
    let threshold = -tol.psd_tol * norm.max(1.0);
    if spectrum.min() < threshold {
        return Err(Error::NotPsd {
            lambda_min: spectrum.min(),
            threshold,
        });
    }
    let roots: Vec<f64> = spectrum
        .values()
        .iter()
        .map(|&v| v.max(0.0).sqrt())
        .collect();
    Ok(rebuild_hermitian(&vectors, &roots))
}

/// Inverse of a positive definite matrix via its eigendecomposition.
///
/// Requires `lambda_min > psd_tol * ||h||`; singular or indefinite inputs
/// are rejected.
pub fn inverse(h: &HermitianMatrix, tol: &ToleranceConfig) -> Result<HermitianMatrix> {
    let (spectrum, vectors) = eig_hermitian(h)?;
    let norm = spectrum.max().abs().max(spectrum.min().abs());
    let threshold = tol.psd_tol * norm;
    // A NaN eigenvalue must fail the gate, so test the positive direction.
    let definite = spectrum.min() > threshold;
    if !definite {
        return Err(Error::NotPositiveDefinite {
            lambda_min: spectrum.min(),
            threshold,
        });
    }
    let inverted: Vec<f64> = spectrum.values().iter().map(|&v| 1.0 / v).collect();
    Ok(rebuild_hermitian(&vectors, &inverted))
}

/// Moore-Penrose pseudo-inverse of a Hermitian matrix.
///
/// Eigenvalues with magnitude at most `rank_tol * ||h||` are treated as
/// exact zeros.
pub fn pseudo_inverse(h: &HermitianMatrix, rank_tol: f64) -> Result<HermitianMatrix> {
    let (spectrum, vectors) = eig_hermitian(h)?;
    let norm = spectrum.max().abs().max(spectrum.min().abs());
    let cutoff = rank_tol * norm;
    let inverted: Vec<f64> = spectrum
        .values()
        .iter()
        .map(|&v| if v.abs() > cutoff { 1.0 / v } else { 0.0 })
        .collect();
    Ok(rebuild_hermitian(&vectors, &inverted))
}

/// General (possibly non-Hermitian) inverse via LU with partial pivoting.
pub fn general_inverse(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !x.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "inverse of a {}x{} matrix",
            x.rows(),
            x.cols()
        )));
    }
    let lu = x.raw().clone().lu();
    let scale = x.max_abs_entry().max(1.0);
    let (pivot, step) = lu
        .u()
        .diagonal()
        .iter()
        .map(|z| z.norm())
        .enumerate()
        .map(|(i, p)| (p, i))
        .fold(
            (f64::INFINITY, 0),
            |acc, cur| if cur.0 < acc.0 { cur } else { acc },
        );
    if pivot <= f64::EPSILON * scale * x.rows() as f64 {
        return Err(Error::Singular { pivot, step });
    }
    lu.try_inverse()
        .map(ComplexMatrix::from_raw_unchecked)
        .ok_or(Error::Singular { pivot, step })
}

/// Determinant via LU.
pub fn det(x: &ComplexMatrix) -> Result<Complex64> {
    if !x.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "determinant of a {}x{} matrix",
            x.rows(),
            x.cols()
        )));
    }
    Ok(x.raw().clone().lu().determinant())
}

/// PSD test of the assembled block matrix `[h11 x12; x12* h22]` via the
/// generalized Schur complement.
///
/// The matrix is PSD iff `h22` is PSD, `range(x12*)` lies inside
/// `range(h22)` (checked via the projector residual
/// `||(I - h22 h22+) x12*|| <= psd_tol * max(1, ||x12||)`), and the
/// complement `h11 - x12 h22+ x12*` is PSD.
pub fn schur_complement_psd(
    h11: &HermitianMatrix,
    x12: &ComplexMatrix,
    h22: &HermitianMatrix,
    tol: &ToleranceConfig,
) -> Result<bool> {
    let n = h11.dim();
    if x12.rows() != n || x12.cols() != h22.dim() {
        return Err(Error::DimensionMismatch(format!(
            "block shapes {0}x{0}, {1}x{2}, {3}x{3} do not assemble",
            n,
            x12.rows(),
            x12.cols(),
            h22.dim()
        )));
    }
    if !is_psd(h22, tol)?.is_psd {
        return Ok(false);
    }
    let pinv = pseudo_inverse(h22, tol.psd_tol)?;

    // Range condition: (I - h22 h22+) annihilates x12*.
    let projector = DMatrix::<Complex64>::identity(h22.dim(), h22.dim()) - h22.raw() * pinv.raw();
    let residual = spectral_norm(&ComplexMatrix::from_raw_unchecked(
        &projector * x12.raw().adjoint(),
    ))?;
    if residual > tol.psd_tol * spectral_norm(x12)?.max(1.0) {
        return Ok(false);
    }

    let complement = h11.raw() - x12.raw() * pinv.raw() * x12.raw().adjoint();
    let complement = HermitianMatrix::symmetrize(&ComplexMatrix::from_raw_unchecked(complement));
    Ok(is_psd(&complement, tol)?.is_psd)
}

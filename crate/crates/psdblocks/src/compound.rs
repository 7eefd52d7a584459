//! Multiplicative compound matrices.
//!
//! The k-th compound of an m x n matrix `x` is the `C(m,k) x C(n,k)` matrix
//! of all k x k minors, rows and columns indexed by the k-element subsets of
//! the row and column indices in lexicographic order. Key facts used here:
//!
//! * multiplicativity (Cauchy-Binet): `compound(a b, k) = compound(a, k) compound(b, k)`;
//! * the compound of a Hermitian (resp. PSD, unitary) matrix is Hermitian
//!   (resp. PSD, unitary), with eigenvalues the k-fold products of the
//!   original eigenvalues;
//! * `s_1(compound(x, k)) = prod_{j<=k} s_j(x)`, which converts statements
//!   about products of singular values into statements about a single top
//!   singular value;
//! * the compound commutes with the geometric mean on positive definite
//!   inputs, and maps the 2x2-block compound of a PPT matrix to a PPT
//!   matrix — the block compound `[compound(m11) compound(m12); ...]` is a
//!   principal submatrix of the full compound of the assembled matrix.
//!
//! Dimensions are capped at n <= 12 (binomial blow-up) — enough for every
//! harness in this crate while keeping worst-case compounds under a
//! thousand rows.

use itertools::Itertools;
use num_complex::Complex64;

use crate::blocks::{is_ppt, make_block, BlockPsdMatrix};
use crate::means::geometric_mean_pd;
use crate::numerics::{singular_values, ComplexMatrix, HermitianMatrix, ToleranceConfig};
use crate::{Error, Result};

/// Largest row/column count accepted by [`compound`].
pub const MAX_COMPOUND_DIM: usize = 12;

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut result: usize = 1;
    for i in 0..k {
        result = result * (n - i) / (i + 1);
    }
    result
}

/// The k-th multiplicative compound.
///
/// Accepts rectangular inputs with `1 <= k <= min(rows, cols)` and
/// `max(rows, cols) <= MAX_COMPOUND_DIM`.
pub fn compound(x: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
    let (m, n) = (x.rows(), x.cols());
    if m.max(n) > MAX_COMPOUND_DIM {
        return Err(Error::CompoundCap {
            n: m.max(n),
            cap: MAX_COMPOUND_DIM,
        });
    }
    if k == 0 || k > m.min(n) {
        return Err(Error::CompoundOrder { k, n: m.min(n) });
    }

    let row_subsets: Vec<Vec<usize>> = (0..m).combinations(k).collect();
    let col_subsets: Vec<Vec<usize>> = (0..n).combinations(k).collect();
    debug_assert_eq!(row_subsets.len(), binomial(m, k));

    let mut out = nalgebra::DMatrix::<Complex64>::zeros(row_subsets.len(), col_subsets.len());
    let mut minor = nalgebra::DMatrix::<Complex64>::zeros(k, k);
    for (i, rows) in row_subsets.iter().enumerate() {
        for (j, cols) in col_subsets.iter().enumerate() {
            for (a, &r) in rows.iter().enumerate() {
                for (b, &c) in cols.iter().enumerate() {
                    minor[(a, b)] = x.raw()[(r, c)];
                }
            }
            out[(i, j)] = minor.clone().lu().determinant();
        }
    }
    Ok(ComplexMatrix::from_raw_unchecked(out))
}

/// The k-th compound of a Hermitian matrix, symmetrized against minor
/// roundoff.
pub fn compound_hermitian(h: &HermitianMatrix, k: usize) -> Result<HermitianMatrix> {
    Ok(HermitianMatrix::symmetrize(&compound(h.matrix(), k)?))
}

/// Relative residual of Cauchy-Binet multiplicativity:
/// `||compound(a b, k) - compound(a, k) compound(b, k)||_max` over
/// `max(1, ||compound(a b, k)||_max)`.
pub fn compound_multiplicativity_check(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    k: usize,
) -> Result<f64> {
    let product = a.mul(b)?;
    let lhs = compound(&product, k)?;
    let rhs = compound(a, k)?.mul(&compound(b, k)?)?;
    let diff = lhs.sub(&rhs)?;
    Ok(diff.max_abs_entry() / lhs.max_abs_entry().max(1.0))
}

/// Relative residual of the compound/geometric-mean commutation
/// `compound(a # b, k) = compound(a, k) # compound(b, k)` for positive
/// definite `a`, `b`.
///
/// Both sides go through the direct positive definite mean; inputs must be
/// well-conditioned enough that their k-fold eigenvalue products still
/// clear the positive definite gate.
pub fn compound_gm_commutation_check(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    k: usize,
    tol: &ToleranceConfig,
) -> Result<f64> {
    let mean = geometric_mean_pd(a, b, tol)?.value;
    let lhs = compound_hermitian(&mean, k)?;
    let rhs = geometric_mean_pd(&compound_hermitian(a, k)?, &compound_hermitian(b, k)?, tol)?.value;
    let diff = lhs.matrix().sub(rhs.matrix())?;
    Ok(diff.max_abs_entry() / lhs.matrix().max_abs_entry().max(1.0))
}

/// Relative residual of `s_1(compound(x, k)) = prod_{j<=k} s_j(x)`.
pub fn top_singular_product_check(x: &ComplexMatrix, k: usize) -> Result<f64> {
    let lhs = singular_values(&compound(x, k)?)?.max();
    let rhs: f64 = singular_values(x)?.values().iter().take(k).product();
    Ok((lhs - rhs).abs() / rhs.abs().max(1.0))
}

/// Assembles the block compound
/// `[compound(m11, k) compound(m12, k); * compound(m22, k)]` — PSD whenever
/// `m` is, being a principal submatrix of the full compound of the
/// assembled matrix — and returns its PPT verdict.
pub fn compound_block_ppt_check(
    m: &BlockPsdMatrix,
    k: usize,
    tol: &ToleranceConfig,
) -> Result<bool> {
    let c11 = compound_hermitian(m.m11(), k)?;
    let c12 = compound(m.m12(), k)?;
    let c22 = compound_hermitian(m.m22(), k)?;
    let block = make_block(&c11, &c12, &c22, tol)?;
    is_ppt(&block, tol)
}

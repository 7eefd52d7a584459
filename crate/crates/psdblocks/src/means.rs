//! Arithmetic and geometric matrix means.
//!
//! The geometric mean of positive definite `a` and `b` is
//!
//! ```text
//!     a # b = b^(1/2) (b^(-1/2) a b^(-1/2))^(1/2) b^(1/2),
//! ```
//!
//! the unique positive definite solution of the Riccati equation
//! `X b^(-1) X = a`. It is symmetric in its arguments, congruence
//! equivariant, and satisfies `det(a # b) = sqrt(det a * det b)` and the
//! eigenvalue AM-GM inequality `lambda_j(a # b) <= lambda_j((a + b)/2)`.
//!
//! For merely semidefinite inputs the mean is defined by the monotone limit
//! `a # b = lim_{eps -> 0+} (a + eps I) # (b + eps I)`, computed here by
//! shrinking `eps` geometrically until successive iterates stabilize (the
//! `gm_*` knobs of [`ToleranceConfig`]). Iterates are formed from a single
//! eigendecomposition per input, with the better-conditioned shifted input
//! used as the outer factor. With that orientation the limit is accurate
//! for positive definite pairs, for pairs with aligned kernels (for example
//! simultaneously diagonal ones), and for pairs where only one input is
//! singular. When *both* inputs are singular with kernels that are neither
//! aligned nor orthogonal to each other's ranges, no f64 formulation of the
//! shifted iteration can reach tight tolerances (the iterates' small
//! eigenvalues drown in roundoff of order `machine_eps / eps`); such inputs
//! converge only to coarse tolerances and otherwise report
//! [`Error::GeometricMeanDiverged`] rather than returning garbage.

use serde::{Deserialize, Serialize};

use crate::numerics::{
    eig_hermitian, rebuild_hermitian, spectral_norm_hermitian, sqrt_psd, ComplexMatrix,
    HermitianMatrix, Spectrum, ToleranceConfig,
};
use crate::{Error, Result};

/// How a geometric mean was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanPath {
    /// Both inputs passed the positive definite gate; the closed-form
    /// congruence formula was evaluated once.
    Direct,
    /// At least one input was singular; the shrinking-epsilon limit ran.
    EpsilonLimit,
}

/// A computed geometric mean together with its numerical provenance.
#[derive(Debug, Clone)]
pub struct GeometricMeanResult {
    pub value: HermitianMatrix,
    pub path: MeanPath,
    /// Number of epsilon evaluations performed (zero on the direct path).
    pub steps_used: usize,
    /// Last epsilon used (zero on the direct path).
    pub final_eps: f64,
    /// Relative Riccati residual `||G b^(-1) G - a|| / max(1, ||a||)`,
    /// recorded whenever both inputs are positive definite.
    pub riccati_residual: Option<f64>,
}

/// The arithmetic mean `(a + b) / 2`, exact entrywise.
pub fn arithmetic_mean(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    Ok(a.add(b)?.scale(0.5))
}

struct Decomposed {
    values: Spectrum,
    vectors: ComplexMatrix,
    norm: f64,
}

impl Decomposed {
    fn new(h: &HermitianMatrix) -> Result<Self> {
        let (values, vectors) = eig_hermitian(h)?;
        let norm = values.max().abs().max(values.min().abs());
        Ok(Self {
            values,
            vectors,
            norm,
        })
    }

    fn is_pd(&self, tol: &ToleranceConfig) -> bool {
        self.norm > 0.0 && self.values.min() > tol.psd_tol * self.norm
    }

    fn check_psd(&self, tol: &ToleranceConfig) -> Result<()> {
        let threshold = -tol.psd_tol * self.norm.max(1.0);
        if self.values.min() < threshold {
            return Err(Error::NotPsd {
                lambda_min: self.values.min(),
                threshold,
            });
        }
        Ok(())
    }

    /// `V diag(f(max(lambda, 0) + shift)) V*`.
    fn power(&self, shift: f64, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let mapped: Vec<f64> = self
            .values
            .values()
            .iter()
            .map(|&v| f(v.max(0.0) + shift))
            .collect();
        rebuild_hermitian(&self.vectors, &mapped)
    }
}

/// Geometric mean of positive definite matrices via the congruence formula.
///
/// Rejects inputs whose smallest eigenvalue does not clear
/// `psd_tol * ||.||`; use [`geometric_mean_psd`] for singular PSD inputs.
pub fn geometric_mean_pd(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    tol: &ToleranceConfig,
) -> Result<GeometricMeanResult> {
    check_same_dim(a, b)?;
    let da = Decomposed::new(a)?;
    let db = Decomposed::new(b)?;
    for d in [&da, &db] {
        if !d.is_pd(tol) {
            return Err(Error::NotPositiveDefinite {
                lambda_min: d.values.min(),
                threshold: tol.psd_tol * d.norm,
            });
        }
    }
    direct_mean(a, &da, &db, tol)
}

/// Geometric mean of positive semidefinite matrices.
///
/// Positive definite pairs delegate to the direct formula; otherwise the
/// epsilon-limit runs under the `gm_*` controls of `tol`.
pub fn geometric_mean_psd(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    tol: &ToleranceConfig,
) -> Result<GeometricMeanResult> {
    check_same_dim(a, b)?;
    let da = Decomposed::new(a)?;
    let db = Decomposed::new(b)?;
    if da.is_pd(tol) && db.is_pd(tol) {
        return direct_mean(a, &da, &db, tol);
    }
    da.check_psd(tol)?;
    db.check_psd(tol)?;
    epsilon_limit(a, b, &da, &db, tol)
}

fn check_same_dim(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "geometric mean of {0}x{0} and {1}x{1}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

fn direct_mean(
    a: &HermitianMatrix,
    da: &Decomposed,
    db: &Decomposed,
    tol: &ToleranceConfig,
) -> Result<GeometricMeanResult> {
    let b_half = db.power(0.0, f64::sqrt);
    let b_half_inv = db.power(0.0, |v| 1.0 / v.sqrt());
    let mid = HermitianMatrix::symmetrize(&ComplexMatrix::from_raw_unchecked(
        b_half_inv.raw() * a.raw() * b_half_inv.raw(),
    ));
    let mid_root = sqrt_psd(&mid, tol)?;
    let value = HermitianMatrix::symmetrize(&ComplexMatrix::from_raw_unchecked(
        b_half.raw() * mid_root.raw() * b_half.raw(),
    ));

    // Residual of the defining Riccati equation, relative to ||a||.
    let b_inv = db.power(0.0, |v| 1.0 / v);
    let residual = HermitianMatrix::symmetrize(&ComplexMatrix::from_raw_unchecked(
        value.raw() * b_inv.raw() * value.raw() - a.raw(),
    ));
    let riccati_residual = spectral_norm_hermitian(&residual)? / da.norm.max(1.0);

    Ok(GeometricMeanResult {
        value,
        path: MeanPath::Direct,
        steps_used: 0,
        final_eps: 0.0,
        riccati_residual: Some(riccati_residual),
    })
}

fn epsilon_limit(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    da: &Decomposed,
    db: &Decomposed,
    tol: &ToleranceConfig,
) -> Result<GeometricMeanResult> {
    let n = a.dim();
    let mut previous: Option<HermitianMatrix> = None;
    let mut eps = tol.gm_eps_start;
    let mut last_gap = f64::INFINITY;

    for step in 0..=tol.gm_max_steps {
        // Outer factor: whichever shifted input is better conditioned, so
        // that the inverse square root never amplifies by more than
        // necessary. With one singular and one definite input this keeps
        // the iteration entirely in the definite input's scale.
        let (outer, inner) = {
            let cond_a = (da.values.min().max(0.0) + eps) / (da.norm + eps);
            let cond_b = (db.values.min().max(0.0) + eps) / (db.norm + eps);
            if cond_b >= cond_a {
                (db, a)
            } else {
                (da, b)
            }
        };

        let o_half = outer.power(eps, f64::sqrt);
        let o_half_inv = outer.power(eps, |v| 1.0 / v.sqrt());
        // The diagonal shift on the inner matrix is an exact entrywise add.
        let mut inner_shifted = inner.raw().clone();
        for i in 0..n {
            inner_shifted[(i, i)] += num_complex::Complex64::new(eps, 0.0);
        }
        let mid = HermitianMatrix::symmetrize(&ComplexMatrix::from_raw_unchecked(
            o_half_inv.raw() * inner_shifted * o_half_inv.raw(),
        ));
        let mid_root = sqrt_psd(&mid, tol)?;
        let iterate = HermitianMatrix::symmetrize(&ComplexMatrix::from_raw_unchecked(
            o_half.raw() * mid_root.raw() * o_half.raw(),
        ));

        if let Some(prev) = previous {
            last_gap = spectral_norm_hermitian(&iterate.sub(&prev)?)?;
            if last_gap <= tol.gm_converge_tol {
                return Ok(GeometricMeanResult {
                    value: iterate,
                    path: MeanPath::EpsilonLimit,
                    steps_used: step + 1,
                    final_eps: eps,
                    riccati_residual: None,
                });
            }
        }
        previous = Some(iterate);
        eps *= tol.gm_eps_shrink;
    }

    Err(Error::GeometricMeanDiverged {
        gap: last_gap,
        tol: tol.gm_converge_tol,
        steps: tol.gm_max_steps + 1,
        final_eps: eps / tol.gm_eps_shrink,
    })
}

/// Margins of the eigenvalue AM-GM inequality:
/// `lambda_j((a + b)/2) - lambda_j(a # b)` for each `j`.
///
/// Every margin is nonnegative up to comparison slack.
pub fn amgm_eigen_check(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    tol: &ToleranceConfig,
) -> Result<Vec<f64>> {
    let mean = arithmetic_mean(a, b)?;
    let gm = geometric_mean_psd(a, b, tol)?.value;
    let (lambda_mean, _) = eig_hermitian(&mean)?;
    let (lambda_gm, _) = eig_hermitian(&gm)?;
    Ok(lambda_mean
        .values()
        .iter()
        .zip(lambda_gm.values())
        .map(|(am, g)| am - g)
        .collect())
}

/// Relative residual of the determinant identity
/// `det(a # b) = sqrt(det a * det b)`.
pub fn det_gm_identity_check(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    tol: &ToleranceConfig,
) -> Result<f64> {
    let gm = geometric_mean_psd(a, b, tol)?.value;
    let det_of =
        |h: &HermitianMatrix| -> Result<f64> { Ok(eig_hermitian(h)?.0.values().iter().product()) };
    let lhs = det_of(&gm)?;
    let rhs = (det_of(a)?.max(0.0) * det_of(b)?.max(0.0)).sqrt();
    Ok((lhs - rhs).abs() / rhs.abs().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(entries: &[f64]) -> HermitianMatrix {
        HermitianMatrix::from_diagonal(entries)
    }

    fn herm(n: usize, entries: &[f64]) -> HermitianMatrix {
        HermitianMatrix::from_real_row_major(n, entries).unwrap()
    }

    fn max_abs_diff(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
        a.matrix().sub(b.matrix()).unwrap().max_abs_entry()
    }

    #[test]
    fn arithmetic_mean_is_exact_entrywise() {
        let a = diag(&[1.0, 4.0]);
        let b = herm(2, &[5.0, -3.0, -3.0, 2.0]);
        let m = arithmetic_mean(&a, &b).unwrap();
        let expected = herm(2, &[3.0, -1.5, -1.5, 3.0]);
        assert_eq!(m.matrix(), expected.matrix());
    }

    #[test]
    fn gm_of_commuting_diagonals_is_entrywise_geometric() {
        let tol = ToleranceConfig::default();
        let r = geometric_mean_pd(&diag(&[1.0, 4.0]), &diag(&[9.0, 1.0]), &tol).unwrap();
        assert_eq!(r.path, MeanPath::Direct);
        assert_eq!(r.steps_used, 0);
        assert_eq!(r.final_eps, 0.0);
        assert!(max_abs_diff(&r.value, &diag(&[3.0, 2.0])) < 1e-14);
        assert!(r.riccati_residual.unwrap() < 1e-12);
    }

    #[test]
    fn gm_with_identity_is_matrix_square_root() {
        let tol = ToleranceConfig::default();
        let b = herm(2, &[2.0, -1.0, -1.0, 2.0]);
        let r = geometric_mean_pd(&HermitianMatrix::identity(2), &b, &tol).unwrap();
        let root = sqrt_psd(&b, &tol).unwrap();
        assert!(max_abs_diff(&r.value, &root) < 1e-13);
    }

    #[test]
    fn gm_with_own_inverse_is_identity() {
        let tol = ToleranceConfig::default();
        let a = herm(2, &[3.0, 1.0, 1.0, 2.0]);
        let a_inv = crate::numerics::inverse(&a, &tol).unwrap();
        let r = geometric_mean_pd(&a, &a_inv, &tol).unwrap();
        assert!(max_abs_diff(&r.value, &HermitianMatrix::identity(2)) < 1e-13);
    }

    #[test]
    fn gm_is_symmetric_in_its_arguments() {
        let tol = ToleranceConfig::default();
        let a = herm(2, &[2.0, 0.5, 0.5, 1.0]);
        let b = herm(2, &[1.0, -0.3, -0.3, 4.0]);
        let ab = geometric_mean_pd(&a, &b, &tol).unwrap();
        let ba = geometric_mean_pd(&b, &a, &tol).unwrap();
        assert!(max_abs_diff(&ab.value, &ba.value) < 1e-12);
    }

    #[test]
    fn gm_is_congruence_equivariant() {
        let tol = ToleranceConfig::default();
        let a = herm(2, &[2.0, 0.5, 0.5, 1.0]);
        let b = herm(2, &[1.0, -0.3, -0.3, 4.0]);
        let x = ComplexMatrix::from_real_row_major(2, 2, &[1.0, 2.0, 0.0, 1.0]).unwrap();
        // X* (a # b) X = (X* a X) # (X* b X).
        let lhs = geometric_mean_pd(&a, &b, &tol)
            .unwrap()
            .value
            .congruence(&x)
            .unwrap();
        let rhs = geometric_mean_pd(&a.congruence(&x).unwrap(), &b.congruence(&x).unwrap(), &tol)
            .unwrap()
            .value;
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn gm_is_positively_homogeneous() {
        let tol = ToleranceConfig::default();
        let a = herm(2, &[2.0, 0.5, 0.5, 1.0]);
        let b = herm(2, &[1.0, -0.3, -0.3, 4.0]);
        let base = geometric_mean_pd(&a, &b, &tol).unwrap().value;
        let scaled = geometric_mean_pd(&a.scale(2.0), &b.scale(8.0), &tol)
            .unwrap()
            .value;
        // (2a) # (8b) = 4 (a # b).
        assert!(max_abs_diff(&scaled, &base.scale(4.0)) < 1e-12);
    }

    #[test]
    fn gm_rejects_singular_input_on_pd_path() {
        let tol = ToleranceConfig::default();
        let err = geometric_mean_pd(&diag(&[1.0, 0.0]), &diag(&[1.0, 1.0]), &tol).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
    }

    #[test]
    fn gm_psd_rejects_indefinite_input() {
        let tol = ToleranceConfig::default();
        let err = geometric_mean_psd(&diag(&[1.0, -0.5]), &diag(&[1.0, 1.0]), &tol).unwrap_err();
        assert!(matches!(err, Error::NotPsd { .. }));
    }

    #[test]
    fn epsilon_limit_on_disjoint_supports_vanishes() {
        let tol = ToleranceConfig::default();
        let r = geometric_mean_psd(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0]), &tol).unwrap();
        assert_eq!(r.path, MeanPath::EpsilonLimit);
        // Exact diagonal arithmetic: iterates are diag(sqrt((a_i+eps)(b_i+eps)))
        // and the gap first dips under 1e-9 at the eighteenth evaluation.
        assert_eq!(r.steps_used, 18);
        assert!(r.final_eps > 0.0 && r.final_eps < 1e-18);
        assert!(r.riccati_residual.is_none());
        assert!(r.value.matrix().max_abs_entry() < 1e-8);
    }

    #[test]
    fn epsilon_limit_matches_closed_form_on_overlapping_diagonals() {
        let tol = ToleranceConfig::default();
        let r = geometric_mean_psd(&diag(&[2.0, 1.0, 0.0]), &diag(&[8.0, 0.0, 5.0]), &tol).unwrap();
        assert_eq!(r.path, MeanPath::EpsilonLimit);
        assert!(max_abs_diff(&r.value, &diag(&[4.0, 0.0, 0.0])) < 1e-7);
    }

    #[test]
    fn epsilon_limit_handles_rotated_one_sided_singularity() {
        let tol = ToleranceConfig::default();
        // b = R diag(4, 0) R^T for a fixed rotation; I # b = b^(1/2) = R diag(2, 0) R^T.
        let (c, s) = (0.6, 0.8);
        let r_mat = ComplexMatrix::from_real_row_major(2, 2, &[c, -s, s, c]).unwrap();
        let b = diag(&[4.0, 0.0]).congruence(&r_mat.adjoint()).unwrap();
        let expected = diag(&[2.0, 0.0]).congruence(&r_mat.adjoint()).unwrap();
        let r = geometric_mean_psd(&HermitianMatrix::identity(2), &b, &tol).unwrap();
        assert_eq!(r.path, MeanPath::EpsilonLimit);
        assert!(max_abs_diff(&r.value, &expected) < 1e-7);
    }

    #[test]
    fn epsilon_limit_reports_divergence_when_step_budget_is_too_small() {
        let tol = ToleranceConfig {
            gm_max_steps: 4,
            ..ToleranceConfig::default()
        };
        let err = geometric_mean_psd(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0]), &tol).unwrap_err();
        match err {
            Error::GeometricMeanDiverged { steps, gap, .. } => {
                assert_eq!(steps, 5);
                assert!(gap > 1e-9);
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn amgm_margins_are_nonnegative() {
        let tol = ToleranceConfig::default();
        let a = herm(2, &[2.0, 0.5, 0.5, 1.0]);
        let b = herm(2, &[1.0, -0.3, -0.3, 4.0]);
        for margin in amgm_eigen_check(&a, &b, &tol).unwrap() {
            assert!(margin >= -1e-12, "AM-GM margin {margin} negative");
        }
        // Equal arguments: mean equals geometric mean, margins ~ 0.
        for margin in amgm_eigen_check(&a, &a, &tol).unwrap() {
            assert!(margin.abs() < 1e-12);
        }
    }

    #[test]
    fn det_identity_residual_is_tiny_for_pd_pairs() {
        let tol = ToleranceConfig::default();
        let a = herm(2, &[2.0, 0.5, 0.5, 1.0]);
        let b = herm(2, &[1.0, -0.3, -0.3, 4.0]);
        assert!(det_gm_identity_check(&a, &b, &tol).unwrap() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let tol = ToleranceConfig::default();
        let err = geometric_mean_psd(&diag(&[1.0]), &diag(&[1.0, 2.0]), &tol).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }
}

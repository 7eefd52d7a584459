//! 2x2-block PSD matrices and the six-property classifier.
//!
//! A [`BlockPsdMatrix`] is a validated positive semidefinite matrix
//!
//! ```text
//!     M = [ m11  m12 ]
//!         [ m12* m22 ]
//! ```
//!
//! with n x n blocks. [`property_profile`] computes the singular values
//! `s_j(m12)`, the eigenvalues of `m11 + m22`, and the eigenvalues of the
//! geometric mean `m11 # m22`, then grades the six comparison properties
//! defined in the crate root. Verdicts carry per-index margins and a
//! *marginal* flag for comparisons that sit inside ten comparison slacks of
//! equality, where the boolean answer should not be over-read.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::means::{geometric_mean_psd, MeanPath};
use crate::numerics::{
    eig_hermitian_values, is_psd, singular_values, spectral_norm, sqrt_psd, ComplexMatrix,
    HermitianMatrix, ToleranceConfig,
};
use crate::{Error, Result};

/// Contractions are accepted with top singular value up to `1 + this`;
/// anything in the overshoot band is rescaled to exactly one. Printed
/// matrices rounded to a few decimals routinely overshoot by ~1e-4.
pub const CONTRACTION_SLACK: f64 = 1e-3;

/// The six spectral properties of a block PSD matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    /// `2 s_j(m12) <= lambda_j(m11 + m22)` for every j.
    A,
    /// `s_j(m12) <= lambda_j(m11 # m22)` for every j.
    G,
    /// `prod_{j<=k} 2 s_j(m12) <= prod_{j<=k} lambda_j(m11 + m22)` for every k.
    La,
    /// `prod_{j<=k} s_j(m12) <= prod_{j<=k} lambda_j(m11 # m22)` for every k.
    Lg,
    /// `sum_{j<=k} 2 s_j(m12) <= sum_{j<=k} lambda_j(m11 + m22)` for every k.
    Ma,
    /// `sum_{j<=k} s_j(m12) <= sum_{j<=k} lambda_j(m11 # m22)` for every k.
    Mg,
}

impl Property {
    /// All six properties, in canonical order.
    pub const ALL: [Property; 6] = [
        Property::A,
        Property::G,
        Property::La,
        Property::Lg,
        Property::Ma,
        Property::Mg,
    ];

    /// The four headline properties whose hold/fail pattern defines a
    /// census region. The majorized variants are determined up to the
    /// implication lattice and add no regions of their own.
    pub const HEADLINE: [Property; 4] = [Property::A, Property::G, Property::La, Property::Lg];

    /// Short lowercase name used in reports, region keys, and the CLI.
    pub fn name(self) -> &'static str {
        match self {
            Property::A => "a",
            Property::G => "g",
            Property::La => "la",
            Property::Lg => "lg",
            Property::Ma => "ma",
            Property::Mg => "mg",
        }
    }

    /// Parses the short name.
    pub fn parse(name: &str) -> Option<Property> {
        Property::ALL.into_iter().find(|p| p.name() == name)
    }

    /// Properties implied in one step:
    ///
    /// * entrywise implies log-majorized implies weakly majorized
    ///   (`g => lg => mg`, `a => la => ma`);
    /// * each geometric-mean property implies its arithmetic counterpart
    ///   (`g => a`, `lg => la`, `mg => ma`) because
    ///   `lambda_j(m11 # m22) <= lambda_j((m11 + m22)/2)` for every j.
    pub fn implies(self) -> &'static [Property] {
        match self {
            Property::G => &[Property::A, Property::Lg],
            Property::A => &[Property::La],
            Property::Lg => &[Property::La, Property::Mg],
            Property::La => &[Property::Ma],
            Property::Mg => &[Property::Ma],
            Property::Ma => &[],
        }
    }

    fn index(self) -> usize {
        match self {
            Property::A => 0,
            Property::G => 1,
            Property::La => 2,
            Property::Lg => 3,
            Property::Ma => 4,
            Property::Mg => 5,
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Transitive closure of a property set under the implication lattice.
pub fn implication_closure(set: &BTreeSet<Property>) -> BTreeSet<Property> {
    let mut closed = set.clone();
    loop {
        let mut grew = false;
        for p in closed.clone() {
            for &q in p.implies() {
                grew |= closed.insert(q);
            }
        }
        if !grew {
            return closed;
        }
    }
}

/// A validated 2x2-block PSD matrix with square off-diagonal block.
#[derive(Debug, Clone)]
pub struct BlockPsdMatrix {
    n: usize,
    m11: HermitianMatrix,
    m12: ComplexMatrix,
    m22: HermitianMatrix,
}

impl BlockPsdMatrix {
    /// Block size n (the assembled matrix is 2n x 2n).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m11(&self) -> &HermitianMatrix {
        &self.m11
    }

    pub fn m12(&self) -> &ComplexMatrix {
        &self.m12
    }

    pub fn m22(&self) -> &HermitianMatrix {
        &self.m22
    }

    /// The assembled 2n x 2n matrix.
    pub fn assemble(&self) -> HermitianMatrix {
        assemble_parts(&self.m11, &self.m12, &self.m22)
    }
}

/// Assembles `[m11 m12; m12* m22]` without any PSD validation.
pub fn assemble_parts(
    m11: &HermitianMatrix,
    m12: &ComplexMatrix,
    m22: &HermitianMatrix,
) -> HermitianMatrix {
    let n = m11.dim();
    let mut big = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(m11.raw());
    big.view_mut((0, n), (n, n)).copy_from(m12.raw());
    big.view_mut((n, 0), (n, n)).copy_from(&m12.raw().adjoint());
    big.view_mut((n, n), (n, n)).copy_from(m22.raw());
    HermitianMatrix::symmetrize(&ComplexMatrix::from_raw_unchecked(big))
}

/// Validates block shapes and positive semidefiniteness of the assembled
/// matrix, and returns the block structure.
pub fn make_block(
    m11: &HermitianMatrix,
    m12: &ComplexMatrix,
    m22: &HermitianMatrix,
    tol: &ToleranceConfig,
) -> Result<BlockPsdMatrix> {
    let n = m11.dim();
    if m22.dim() != n || m12.rows() != n || m12.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "blocks {0}x{0}, {1}x{2}, {3}x{3} do not form a square 2x2 partition",
            n,
            m12.rows(),
            m12.cols(),
            m22.dim()
        )));
    }
    let assembled = assemble_parts(m11, m12, m22);
    let check = is_psd(&assembled, tol)?;
    if !check.is_psd {
        return Err(Error::NotPsd {
            lambda_min: check.lambda_min,
            threshold: check.threshold,
        });
    }
    Ok(BlockPsdMatrix {
        n,
        m11: m11.clone(),
        m12: m12.clone(),
        m22: m22.clone(),
    })
}

/// Builds a block PSD matrix from diagonal blocks and a contraction:
/// `m12 = m11^(1/2) x m22^(1/2)`.
///
/// Every block PSD matrix arises this way from some contraction `x`, and
/// conversely any contraction yields a PSD assembly. Inputs whose top
/// singular value lands in `(1, 1 + CONTRACTION_SLACK]` — typically
/// printed matrices rounded to a few decimals — are rescaled to exactly
/// one; anything larger is rejected.
pub fn from_contraction(
    m11: &HermitianMatrix,
    m22: &HermitianMatrix,
    x: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<BlockPsdMatrix> {
    let s1 = spectral_norm(x)?;
    if s1 > 1.0 + CONTRACTION_SLACK {
        return Err(Error::NotContraction {
            s1,
            slack: CONTRACTION_SLACK,
        });
    }
    let x = if s1 > 1.0 {
        x.scale(1.0 / s1)
    } else {
        x.clone()
    };
    let left = sqrt_psd(m11, tol)?;
    let right = sqrt_psd(m22, tol)?;
    let m12 = left.matrix().mul(&x)?.mul(right.matrix())?;
    make_block(m11, &m12, m22, tol)
}

/// The partial transpose `[m11 m12*; m12 m22]`, also Hermitian.
pub fn partial_transpose(m: &BlockPsdMatrix) -> HermitianMatrix {
    assemble_parts(&m.m11, &m.m12.adjoint(), &m.m22)
}

/// Whether the block matrix has positive partial transpose.
pub fn is_ppt(m: &BlockPsdMatrix, tol: &ToleranceConfig) -> Result<bool> {
    Ok(is_psd(&partial_transpose(m), tol)?.is_psd)
}

/// Verdict for one property on one block matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyVerdict {
    pub property: Property,
    /// Whether every indexed comparison holds up to comparison slack.
    pub holds: bool,
    /// `rhs_k - lhs_k` per index, on the linear scale of the comparison
    /// (products for `la`/`lg`, single values for `a`/`g`, partial sums for
    /// `ma`/`mg`).
    pub margins: Vec<f64>,
    /// Smallest margin across indices.
    pub min_margin: f64,
    /// Whether any index sits within ten comparison slacks of equality.
    pub marginal: bool,
    /// Whether some index violates by more than a hundred comparison
    /// slacks — the threshold at which a failure counts as mathematics
    /// rather than roundoff, used by the counterexample searcher.
    pub decisive: bool,
}

/// Full six-property classification of a block PSD matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyProfile {
    pub n: usize,
    /// Singular values of `m12`, non-increasing.
    pub s12: Vec<f64>,
    /// Eigenvalues of `m11 + m22`, non-increasing.
    pub lambda_sum: Vec<f64>,
    /// Eigenvalues of `m11 # m22`, non-increasing.
    pub lambda_gm: Vec<f64>,
    /// How the geometric mean was computed.
    pub gm_path: MeanPath,
    /// Verdicts in [`Property::ALL`] order.
    pub verdicts: Vec<PropertyVerdict>,
    /// Whether the raw verdicts respect the implication lattice. False only
    /// when roundoff flips a comparison near equality; consumers should
    /// consult the marginal flags before trusting either side.
    pub lattice_consistent: bool,
    /// Tolerances the verdicts were graded with.
    pub tolerances: ToleranceConfig,
}

impl PropertyProfile {
    pub fn verdict(&self, p: Property) -> &PropertyVerdict {
        &self.verdicts[p.index()]
    }

    pub fn holds(&self, p: Property) -> bool {
        self.verdict(p).holds
    }

    /// The set of properties that hold.
    pub fn holding_set(&self) -> BTreeSet<Property> {
        Property::ALL
            .into_iter()
            .filter(|&p| self.holds(p))
            .collect()
    }

    /// Implication edges violated by the raw verdicts, as
    /// `(stronger, weaker)` pairs where the stronger holds but the weaker
    /// does not.
    pub fn inconsistent_edges(&self) -> Vec<(Property, Property)> {
        let mut edges = Vec::new();
        for p in Property::ALL {
            if !self.holds(p) {
                continue;
            }
            for &q in p.implies() {
                if !self.holds(q) {
                    edges.push((p, q));
                }
            }
        }
        edges
    }

    /// The headline properties that hold, sorted by name — the census
    /// region of this matrix.
    pub fn region(&self) -> Vec<Property> {
        let mut props: Vec<Property> = Property::HEADLINE
            .into_iter()
            .filter(|&p| self.holds(p))
            .collect();
        props.sort_by_key(|p| p.name());
        props
    }

    /// Region key: property names joined with `+`, or `none`.
    pub fn region_key(&self) -> String {
        region_key_of(&self.region())
    }
}

/// Formats a region as its census key.
pub fn region_key_of(props: &[Property]) -> String {
    if props.is_empty() {
        return "none".to_string();
    }
    let mut names: Vec<&str> = props.iter().map(|p| p.name()).collect();
    names.sort_unstable();
    names.join("+")
}

/// Grades a comparison family `lhs_k <= rhs_k`.
fn grade(property: Property, lhs: &[f64], rhs: &[f64], tol: &ToleranceConfig) -> PropertyVerdict {
    debug_assert_eq!(lhs.len(), rhs.len());
    let mut holds = true;
    let mut marginal = false;
    let mut decisive = false;
    let mut margins = Vec::with_capacity(lhs.len());
    for (&l, &r) in lhs.iter().zip(rhs) {
        margins.push(r - l);
        holds &= tol.leq(l, r);
        marginal |= tol.is_marginal(l, r);
        decisive |= tol.decisive_violation(l, r);
    }
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    PropertyVerdict {
        property,
        holds,
        margins,
        min_margin,
        marginal,
        decisive,
    }
}

/// Grades a product comparison `prod lhs_j <= prod rhs_j` per prefix.
///
/// When every factor on both sides is strictly positive the verdict is
/// taken in the log domain (sums of logarithms), which keeps long products
/// of large or small factors well-conditioned; margins are still reported
/// on the linear scale.
fn grade_products(
    property: Property,
    lhs_factors: &[f64],
    rhs_factors: &[f64],
    tol: &ToleranceConfig,
) -> PropertyVerdict {
    let mut holds = true;
    let mut marginal = false;
    let mut decisive = false;
    let mut margins = Vec::with_capacity(lhs_factors.len());
    let mut lhs_prod = 1.0f64;
    let mut rhs_prod = 1.0f64;
    let mut lhs_log = 0.0f64;
    let mut rhs_log = 0.0f64;
    let mut positive = true;

    for (&lf, &rf) in lhs_factors.iter().zip(rhs_factors) {
        lhs_prod *= lf;
        rhs_prod *= rf;
        positive &= lf > 0.0 && rf > 0.0;
        if positive {
            lhs_log += lf.ln();
            rhs_log += rf.ln();
        }
        margins.push(rhs_prod - lhs_prod);
        let (ok, far) = if positive {
            (
                lhs_log <= rhs_log + (tol.slack(rhs_prod) / rhs_prod).ln_1p(),
                lhs_log > rhs_log + (100.0 * tol.slack(rhs_prod) / rhs_prod).ln_1p(),
            )
        } else {
            (
                tol.leq(lhs_prod, rhs_prod),
                tol.decisive_violation(lhs_prod, rhs_prod),
            )
        };
        holds &= ok;
        decisive |= far;
        marginal |= tol.is_marginal(lhs_prod, rhs_prod);
    }
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    PropertyVerdict {
        property,
        holds,
        margins,
        min_margin,
        marginal,
        decisive,
    }
}

/// Classifies a block PSD matrix against all six properties.
///
/// The geometric mean of singular diagonal blocks is computed through the
/// epsilon-limit; its non-convergence (possible when both blocks are
/// singular with misaligned kernels) propagates as an error.
pub fn property_profile(m: &BlockPsdMatrix, tol: &ToleranceConfig) -> Result<PropertyProfile> {
    let s12 = singular_values(&m.m12)?;
    let sum = m.m11.add(&m.m22)?;
    let lambda_sum = eig_hermitian_values(&sum)?;
    let gm = geometric_mean_psd(&m.m11, &m.m22, tol)?;
    let lambda_gm = eig_hermitian_values(&gm.value)?;

    let s: Vec<f64> = s12.values().to_vec();
    let two_s: Vec<f64> = s.iter().map(|v| 2.0 * v).collect();
    let lam_sum: Vec<f64> = lambda_sum.values().to_vec();
    let lam_gm: Vec<f64> = lambda_gm.values().to_vec();

    let prefix = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .scan(0.0, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect()
    };

    let verdicts = vec![
        grade(Property::A, &two_s, &lam_sum, tol),
        grade(Property::G, &s, &lam_gm, tol),
        grade_products(Property::La, &two_s, &lam_sum, tol),
        grade_products(Property::Lg, &s, &lam_gm, tol),
        grade(Property::Ma, &prefix(&two_s), &prefix(&lam_sum), tol),
        grade(Property::Mg, &prefix(&s), &prefix(&lam_gm), tol),
    ];

    let mut profile = PropertyProfile {
        n: m.n,
        s12: s,
        lambda_sum: lam_sum,
        lambda_gm: lam_gm,
        gm_path: gm.path,
        verdicts,
        lattice_consistent: true,
        tolerances: *tol,
    };
    profile.lattice_consistent = profile.inconsistent_edges().is_empty();
    Ok(profile)
}

/// Which disjunct of the n = 2 dichotomy a matrix satisfies: every 2x2
/// block PSD matrix with the `la` property has the `a` property or the
/// `lg` property.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prop21Branch {
    AOnly,
    LgOnly,
    Both,
}

/// Checks the n = 2 dichotomy on a single matrix.
///
/// Preconditions: `m` is 2x2-blocked and its profile has `la`. Returns the
/// satisfied branch, or `None` if neither disjunct holds — which would be a
/// genuine counterexample to the dichotomy and is left to the caller to
/// report.
pub fn proposition21_check(
    m: &BlockPsdMatrix,
    tol: &ToleranceConfig,
) -> Result<Option<Prop21Branch>> {
    if m.n != 2 {
        return Err(Error::Precondition(format!(
            "the n = 2 dichotomy applies to 2x2 blocks, got n = {}",
            m.n
        )));
    }
    let profile = property_profile(m, tol)?;
    if !profile.holds(Property::La) {
        return Err(Error::Precondition(
            "the n = 2 dichotomy assumes the la property".to_string(),
        ));
    }
    let a = profile.holds(Property::A);
    let lg = profile.holds(Property::Lg);
    Ok(match (a, lg) {
        (true, true) => Some(Prop21Branch::Both),
        (true, false) => Some(Prop21Branch::AOnly),
        (false, true) => Some(Prop21Branch::LgOnly),
        (false, false) => None,
    })
}

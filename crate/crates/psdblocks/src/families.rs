//! Named constructors for structured block families.
//!
//! Each constructor validates its inputs, builds the blocks from the
//! defining formula, and returns a [`FamilyInstance`]: the checked
//! [`BlockPsdMatrix`] together with a [`PropertyExpectations`] table
//! recording, per property, whether membership in the family *guarantees*
//! it, is *known to fail* for some members, or only *conjecturally*
//! implies it. Harnesses consume the table — guaranteed properties are
//! asserted, may-fail properties are counted, conjectured properties are
//! reported as margin statistics without assertion.
//!
//! The families:
//!
//! * [`hua`] — blocks `(I-A*A)^-1, (I-B*A)^-1, (I-B*B)^-1` from strict
//!   contractions; PPT, and `g` is a theorem, so everything holds.
//! * [`phi_block`] / [`psi_block`] — images of a PSD parent under
//!   `X -> X + tr(X) I` resp. `X -> 2 tr(X) I - X`, applied blockwise.
//!   Both images are PPT. For the first map the `a` inequality is proved;
//!   its `g` is conjectured. For the second even `a` is open.
//! * [`sym_square`] — `[A^2+B^2, AB+BA; ., A^2+B^2]` from Hermitian
//!   inputs (the square of `[A B; B A]`); Hermitian off-diagonal, so PPT.
//! * [`sum_diff`] — `[A+B, A-B; ., A+B]` from PSD inputs; PPT.
//! * [`unitary_offdiag`] — `[P, U; U*, U*P^-1 U]` with zero Schur
//!   complement; the off-diagonal singular values are all one and the
//!   product inequality `prod lambda_j(m11 # m22) >= 1` is a theorem.
//! * [`norm_weighted`] — `[|B| A, AB; ., |A| B]` (spectral-norm weights);
//!   the `a` inequality is a theorem, `lg` fails for some pairs.
//! * [`gram`] — `[I, A; A*, A*A]`; the equality `s_j(A) = lambda_j(I # A*A)`
//!   makes every property hold with zero margin.
//! * [`bhatia_kittaneh_family`] — `[A^2, AB; BA, B^2]`; `a` is the
//!   Bhatia–Kittaneh theorem, `lg` fails whenever `|AB| > |A # B|^2`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blocks::{make_block, BlockPsdMatrix, Property};
use crate::means::geometric_mean_psd;
use crate::numerics::{
    eig_hermitian_values, general_inverse, inverse, is_psd, singular_values, spectral_norm,
    spectral_norm_hermitian, sqrt_psd, ComplexMatrix, HermitianMatrix, ToleranceConfig,
};
use crate::{Error, Result};

/// Strictness margin for [`hua`] inputs: contractions must satisfy
/// `s_1 <= 1 - HUA_MARGIN`. The blocks invert `I - A*A`, whose
/// conditioning blows up like `1 / (1 - s_1^2)` as `s_1` approaches one.
pub const HUA_MARGIN: f64 = 1e-3;

/// Maximum entrywise deviation of `u*u` from the identity accepted by
/// [`unitary_offdiag`].
pub const UNITARY_TOL: f64 = 1e-8;

/// The block families with named constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Hua,
    PhiBlock,
    PsiBlock,
    SymSquare,
    SumDiff,
    UnitaryOffdiag,
    NormWeighted,
    Gram,
    BhatiaKittaneh,
}

impl FamilyName {
    /// All families, in the order they are documented above.
    pub const ALL: [FamilyName; 9] = [
        FamilyName::Hua,
        FamilyName::PhiBlock,
        FamilyName::PsiBlock,
        FamilyName::SymSquare,
        FamilyName::SumDiff,
        FamilyName::UnitaryOffdiag,
        FamilyName::NormWeighted,
        FamilyName::Gram,
        FamilyName::BhatiaKittaneh,
    ];

    /// Canonical snake_case name used in reports and generator specs.
    pub fn name(self) -> &'static str {
        match self {
            FamilyName::Hua => "hua",
            FamilyName::PhiBlock => "phi_block",
            FamilyName::PsiBlock => "psi_block",
            FamilyName::SymSquare => "sym_square",
            FamilyName::SumDiff => "sum_diff",
            FamilyName::UnitaryOffdiag => "unitary_offdiag",
            FamilyName::NormWeighted => "norm_weighted",
            FamilyName::Gram => "gram",
            FamilyName::BhatiaKittaneh => "bhatia_kittaneh",
        }
    }

    /// Parses a family name; hyphens are treated as underscores so CLI
    /// spellings like `unitary-offdiag` work.
    pub fn parse(name: &str) -> Option<FamilyName> {
        let normalized = name.trim().to_ascii_lowercase().replace('-', "_");
        FamilyName::ALL.into_iter().find(|f| f.name() == normalized)
    }

    /// The expectation table shared by all members of the family. See the
    /// module docs for the provenance of each entry; entries are closed
    /// under the implication lattice (anything implied by a guaranteed
    /// property is itself guaranteed).
    pub fn expectations(self) -> PropertyExpectations {
        use Expectation::{Conjectured, Guaranteed, MayFail, Unspecified};
        let table = |a, g, la, lg, ma, mg| PropertyExpectations {
            a,
            g,
            la,
            lg,
            ma,
            mg,
        };
        match self {
            // g is a theorem for Hua matrices, and g implies the rest.
            FamilyName::Hua => table(
                Guaranteed, Guaranteed, Guaranteed, Guaranteed, Guaranteed, Guaranteed,
            ),
            // PPT gives lg; a is proved; g has only numerical evidence.
            FamilyName::PhiBlock => table(
                Guaranteed,
                Conjectured,
                Guaranteed,
                Guaranteed,
                Guaranteed,
                Guaranteed,
            ),
            // PPT gives lg; both entrywise properties are open.
            FamilyName::PsiBlock => table(
                Conjectured,
                Conjectured,
                Guaranteed,
                Guaranteed,
                Guaranteed,
                Guaranteed,
            ),
            // PPT gives lg; the entrywise comparisons fail for some pairs.
            FamilyName::SymSquare | FamilyName::SumDiff => table(
                MayFail, MayFail, Guaranteed, Guaranteed, Guaranteed, Guaranteed,
            ),
            FamilyName::UnitaryOffdiag => table(
                MayFail, MayFail, Guaranteed, Guaranteed, Guaranteed, Guaranteed,
            ),
            // a is a theorem here; the geometric-mean comparisons are not
            // PPT-backed and lg fails for some pairs. Nothing is known
            // about mg either way.
            FamilyName::NormWeighted | FamilyName::BhatiaKittaneh => table(
                Guaranteed,
                MayFail,
                Guaranteed,
                MayFail,
                Guaranteed,
                Unspecified,
            ),
            // Equality family: s_j(A) = lambda_j(I # A*A).
            FamilyName::Gram => table(
                Guaranteed, Guaranteed, Guaranteed, Guaranteed, Guaranteed, Guaranteed,
            ),
        }
    }
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What membership in a family says about one property.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    /// Proved for every member; a decisive violation is a bug (in the
    /// code, not the mathematics).
    Guaranteed,
    /// Known to fail for some members; harnesses count failures instead
    /// of asserting.
    MayFail,
    /// Numerically supported but unproved; harnesses report margins and
    /// flag violations as findings, never as test failures.
    Conjectured,
    /// No claim either way.
    Unspecified,
}

impl Expectation {
    pub fn name(self) -> &'static str {
        match self {
            Expectation::Guaranteed => "guaranteed",
            Expectation::MayFail => "may_fail",
            Expectation::Conjectured => "conjectured",
            Expectation::Unspecified => "unspecified",
        }
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Expected outcome per property for one family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyExpectations {
    pub a: Expectation,
    pub g: Expectation,
    pub la: Expectation,
    pub lg: Expectation,
    pub ma: Expectation,
    pub mg: Expectation,
}

impl PropertyExpectations {
    pub fn get(&self, p: Property) -> Expectation {
        match p {
            Property::A => self.a,
            Property::G => self.g,
            Property::La => self.la,
            Property::Lg => self.lg,
            Property::Ma => self.ma,
            Property::Mg => self.mg,
        }
    }

    /// Pairs `(property, expectation)` in canonical property order.
    pub fn iter(&self) -> impl Iterator<Item = (Property, Expectation)> + '_ {
        Property::ALL.into_iter().map(move |p| (p, self.get(p)))
    }

    /// The properties this table guarantees.
    pub fn guaranteed(&self) -> Vec<Property> {
        self.iter()
            .filter(|&(_, e)| e == Expectation::Guaranteed)
            .map(|(p, _)| p)
            .collect()
    }
}

/// A constructed family member: validated blocks plus the family tag and
/// expectation table the harnesses key on.
#[derive(Debug, Clone)]
pub struct FamilyInstance {
    pub family: FamilyName,
    pub block: BlockPsdMatrix,
    pub expectations: PropertyExpectations,
    /// Worst condition number among the matrices inverted during
    /// construction, when the formula inverts anything. Harnesses resample
    /// draws with condition above 1e8: verifying a theorem on a nearly
    /// singular inverse checks the solver, not the theorem.
    pub condition_number: Option<f64>,
}

fn instance(family: FamilyName, block: BlockPsdMatrix) -> FamilyInstance {
    FamilyInstance {
        family,
        block,
        expectations: family.expectations(),
        condition_number: None,
    }
}

fn require_same_shape(a: &ComplexMatrix, b: &ComplexMatrix, what: &str) -> Result<()> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{what}: {}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

fn require_psd(h: &HermitianMatrix, tol: &ToleranceConfig) -> Result<()> {
    let check = is_psd(h, tol)?;
    if !check.is_psd {
        return Err(Error::NotPsd {
            lambda_min: check.lambda_min,
            threshold: check.threshold,
        });
    }
    Ok(())
}

fn hermitian_condition(h: &HermitianMatrix) -> Result<f64> {
    let eig = eig_hermitian_values(h)?;
    let min = eig.min();
    Ok(if min <= 0.0 {
        f64::INFINITY
    } else {
        eig.max() / min
    })
}

fn general_condition(x: &ComplexMatrix) -> Result<f64> {
    let s = singular_values(x)?;
    let min = s.min();
    Ok(if min <= 0.0 {
        f64::INFINITY
    } else {
        s.max() / min
    })
}

/// `x + factor * I` for square `x`.
fn add_scaled_identity(x: &ComplexMatrix, factor: Complex64) -> ComplexMatrix {
    let mut raw = x.raw().clone();
    for i in 0..raw.nrows() {
        raw[(i, i)] += factor;
    }
    ComplexMatrix::from_raw_unchecked(raw)
}

/// The Hua matrix of two strict contractions `a, b` (rectangular `m x n`
/// allowed; blocks are `n x n`):
///
/// ```text
///     [ (I - A*A)^-1   (I - B*A)^-1 ]
///     [ (I - A*B)^-1   (I - B*B)^-1 ]
/// ```
///
/// The assembly is PSD and PPT, and has the `g`-property — hence all six.
/// Inputs must satisfy `s_1 <= 1 - HUA_MARGIN`; the returned
/// `condition_number` is the worst conditioning of the three inverted
/// factors.
pub fn hua(a: &ComplexMatrix, b: &ComplexMatrix, tol: &ToleranceConfig) -> Result<FamilyInstance> {
    require_same_shape(a, b, "hua contractions")?;
    for x in [a, b] {
        let s1 = spectral_norm(x)?;
        if s1 > 1.0 - HUA_MARGIN {
            return Err(Error::NotContraction {
                s1,
                slack: HUA_MARGIN,
            });
        }
    }
    let n = a.cols();
    let eye = HermitianMatrix::identity(n);
    let aa = eye.sub(&HermitianMatrix::symmetrize(&a.adjoint().mul(a)?))?;
    let bb = eye.sub(&HermitianMatrix::symmetrize(&b.adjoint().mul(b)?))?;
    let ba = add_scaled_identity(&b.adjoint().mul(a)?.scale(-1.0), Complex64::ONE);
    let cond = hermitian_condition(&aa)?
        .max(hermitian_condition(&bb)?)
        .max(general_condition(&ba)?);
    let m11 = inverse(&aa, tol)?;
    let m22 = inverse(&bb, tol)?;
    let m12 = general_inverse(&ba)?;
    let block = make_block(&m11, &m12, &m22, tol)?;
    Ok(FamilyInstance {
        condition_number: Some(cond),
        ..instance(FamilyName::Hua, block)
    })
}

/// Blockwise image of the PSD parent `[a x; x* b]` under
/// `X -> X + tr(X) I`. The image is PPT; the `a`-property is proved for
/// this family and `g` is conjectured.
pub fn phi_block(
    a: &HermitianMatrix,
    x: &ComplexMatrix,
    b: &HermitianMatrix,
    tol: &ToleranceConfig,
) -> Result<FamilyInstance> {
    make_block(a, x, b, tol)?;
    let m11 = HermitianMatrix::symmetrize(&add_scaled_identity(
        a.matrix(),
        Complex64::new(a.trace(), 0.0),
    ));
    let m22 = HermitianMatrix::symmetrize(&add_scaled_identity(
        b.matrix(),
        Complex64::new(b.trace(), 0.0),
    ));
    let m12 = add_scaled_identity(x, x.trace()?);
    let block = make_block(&m11, &m12, &m22, tol)?;
    Ok(instance(FamilyName::PhiBlock, block))
}

/// Blockwise image of the PSD parent `[a x; x* b]` under
/// `X -> 2 tr(X) I - X`. The image is PPT; both entrywise properties are
/// open, with numerical evidence for `g`.
pub fn psi_block(
    a: &HermitianMatrix,
    x: &ComplexMatrix,
    b: &HermitianMatrix,
    tol: &ToleranceConfig,
) -> Result<FamilyInstance> {
    make_block(a, x, b, tol)?;
    let m11 = HermitianMatrix::symmetrize(&add_scaled_identity(
        &a.matrix().scale(-1.0),
        Complex64::new(2.0 * a.trace(), 0.0),
    ));
    let m22 = HermitianMatrix::symmetrize(&add_scaled_identity(
        &b.matrix().scale(-1.0),
        Complex64::new(2.0 * b.trace(), 0.0),
    ));
    let m12 = add_scaled_identity(&x.scale(-1.0), 2.0 * x.trace()?);
    let block = make_block(&m11, &m12, &m22, tol)?;
    Ok(instance(FamilyName::PsiBlock, block))
}

/// `[A^2 + B^2, AB + BA; ., A^2 + B^2]` for Hermitian `a, b` — the square
/// of the PSD-squared matrix `[A B; B A]`, hence PSD, and PPT because the
/// off-diagonal block is Hermitian.
pub fn sym_square(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    tol: &ToleranceConfig,
) -> Result<FamilyInstance> {
    require_same_shape(a.matrix(), b.matrix(), "sym_square blocks")?;
    let a2 = a.matrix().mul(a.matrix())?;
    let b2 = b.matrix().mul(b.matrix())?;
    let diag = HermitianMatrix::symmetrize(&a2.add(&b2)?);
    let ab = a.matrix().mul(b.matrix())?;
    let cross = ab.add(&b.matrix().mul(a.matrix())?)?;
    let block = make_block(&diag, &cross, &diag, tol)?;
    Ok(instance(FamilyName::SymSquare, block))
}

/// `[A + B, A - B; ., A + B]` for PSD `a, b`; PSD by congruence from
/// `diag(2A, 2B)` and PPT because the off-diagonal block is Hermitian.
pub fn sum_diff(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    tol: &ToleranceConfig,
) -> Result<FamilyInstance> {
    require_same_shape(a.matrix(), b.matrix(), "sum_diff blocks")?;
    require_psd(a, tol)?;
    require_psd(b, tol)?;
    let diag = a.add(b)?;
    let cross = a.matrix().sub(b.matrix())?;
    let block = make_block(&diag, &cross, &diag, tol)?;
    Ok(instance(FamilyName::SumDiff, block))
}

/// `[P, U; U*, U* P^-1 U]` for positive definite `m11 = P` and unitary
/// `u`. The Schur complement is exactly zero, every singular value of the
/// off-diagonal block is one, and `prod_{j<=k} lambda_j(m11 # m22) >= 1`
/// for every k, so `lg` always holds; `a` fails for some inputs.
pub fn unitary_offdiag(
    m11: &HermitianMatrix,
    u: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<FamilyInstance> {
    let n = m11.dim();
    if u.rows() != n || u.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "unitary block {}x{} for an {n}x{n} diagonal block",
            u.rows(),
            u.cols()
        )));
    }
    let deviation = add_scaled_identity(&u.adjoint().mul(u)?, -Complex64::ONE).max_abs_entry();
    if deviation > UNITARY_TOL {
        return Err(Error::NotUnitary {
            deviation,
            tol: UNITARY_TOL,
        });
    }
    let cond = hermitian_condition(m11)?;
    let m22 = inverse(m11, tol)?.congruence(u)?;
    let block = make_block(m11, u, &m22, tol)?;
    Ok(FamilyInstance {
        condition_number: Some(cond),
        ..instance(FamilyName::UnitaryOffdiag, block)
    })
}

/// `[|B| A, AB; ., |A| B]` for nonzero PSD `a, b`, with spectral-norm
/// weights. `2 s_j(AB) <= lambda_j(|B| A + |A| B)` is a theorem, so `a`
/// always holds; `lg` fails for some pairs.
pub fn norm_weighted(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    tol: &ToleranceConfig,
) -> Result<FamilyInstance> {
    require_same_shape(a.matrix(), b.matrix(), "norm_weighted blocks")?;
    require_psd(a, tol)?;
    require_psd(b, tol)?;
    let norm_a = spectral_norm_hermitian(a)?;
    let norm_b = spectral_norm_hermitian(b)?;
    if norm_a == 0.0 || norm_b == 0.0 {
        return Err(Error::Precondition(
            "norm_weighted requires nonzero blocks (a spectral-norm weight vanishes)".into(),
        ));
    }
    let m11 = a.scale(norm_b);
    let m12 = a.matrix().mul(b.matrix())?;
    let m22 = b.scale(norm_a);
    let block = make_block(&m11, &m12, &m22, tol)?;
    Ok(instance(FamilyName::NormWeighted, block))
}

/// The Gram assembly `[I, A; A*, A*A]` of any square `a`. Here
/// `s_j(A) = lambda_j(I # A*A)` exactly, so every property holds with zero
/// margin — the equality family pins the classifier's tolerances.
pub fn gram(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<FamilyInstance> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "gram needs a square block, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let m11 = HermitianMatrix::identity(a.rows());
    let m22 = HermitianMatrix::symmetrize(&a.adjoint().mul(a)?);
    let block = make_block(&m11, a, &m22, tol)?;
    Ok(instance(FamilyName::Gram, block))
}

/// `[A^2, AB; BA, B^2]` for PSD `a, b` — the Gram assembly of the stacked
/// pair, so PSD for free. `2 s_j(AB) <= lambda_j(A^2 + B^2)` is a theorem
/// (`a` holds); `lg` fails at k = 1 whenever `|AB| > |A^2 # B^2|`.
pub fn bhatia_kittaneh_family(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    tol: &ToleranceConfig,
) -> Result<FamilyInstance> {
    require_same_shape(a.matrix(), b.matrix(), "bhatia_kittaneh blocks")?;
    require_psd(a, tol)?;
    require_psd(b, tol)?;
    let m11 = HermitianMatrix::symmetrize(&a.matrix().mul(a.matrix())?);
    let m22 = HermitianMatrix::symmetrize(&b.matrix().mul(b.matrix())?);
    let m12 = a.matrix().mul(b.matrix())?;
    let block = make_block(&m11, &m12, &m22, tol)?;
    Ok(instance(FamilyName::BhatiaKittaneh, block))
}

/// The scalar norm chain evaluated on a PSD pair:
///
/// ```text
///     |A^2 # B^2|  <=  |A # B|^2  <=  |A^(1/2) B^(1/2)|^2  <=  |AB|
/// ```
///
/// where the third quantity equals the top eigenvalue of `AB`. The first
/// two links are equalities exactly when `A` and `B` commute; the chain's
/// total gap is what makes `lg` fail for non-commuting members of
/// [`bhatia_kittaneh_family`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormChainCheck {
    /// `|A^2 # B^2|`.
    pub sq_gm_norm: f64,
    /// `|A # B|^2`.
    pub gm_norm_sq: f64,
    /// `|A^(1/2) B^(1/2)|^2 = lambda_1(AB)`.
    pub cross_norm_sq: f64,
    /// `|AB|`.
    pub product_norm: f64,
}

impl NormChainCheck {
    /// Whether every link holds up to comparison slack.
    pub fn holds(&self, tol: &ToleranceConfig) -> bool {
        tol.leq(self.sq_gm_norm, self.gm_norm_sq)
            && tol.leq(self.gm_norm_sq, self.cross_norm_sq)
            && tol.leq(self.cross_norm_sq, self.product_norm)
    }

    /// `|AB| - |A # B|^2`: zero for commuting pairs, strictly positive
    /// otherwise.
    pub fn strictness_gap(&self) -> f64 {
        self.product_norm - self.gm_norm_sq
    }
}

/// Evaluates [`NormChainCheck`] for a PSD pair. Geometric means go through
/// [`geometric_mean_psd`], so singular pairs inherit its epsilon-limit
/// convergence behavior.
pub fn norm_chain_check(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    tol: &ToleranceConfig,
) -> Result<NormChainCheck> {
    require_same_shape(a.matrix(), b.matrix(), "norm chain blocks")?;
    require_psd(a, tol)?;
    require_psd(b, tol)?;
    let a2 = HermitianMatrix::symmetrize(&a.matrix().mul(a.matrix())?);
    let b2 = HermitianMatrix::symmetrize(&b.matrix().mul(b.matrix())?);
    let gm = geometric_mean_psd(a, b, tol)?;
    let gm_sq = geometric_mean_psd(&a2, &b2, tol)?;
    let cross = sqrt_psd(a, tol)?.matrix().mul(sqrt_psd(b, tol)?.matrix())?;
    let cross_norm = spectral_norm(&cross)?;
    Ok(NormChainCheck {
        sq_gm_norm: spectral_norm_hermitian(&gm_sq.value)?,
        gm_norm_sq: spectral_norm_hermitian(&gm.value)?.powi(2),
        cross_norm_sq: cross_norm * cross_norm,
        product_norm: spectral_norm(&a.matrix().mul(b.matrix())?)?,
    })
}

//! Seeded random ensembles and the harnesses built on them: property
//! censuses, counterexample search, and conjecture stress runs.
//!
//! # Determinism
//!
//! Every entry point takes a [`GeneratorSpec`] whose seed fully determines
//! the output. Trial `i` draws from a ChaCha8 generator seeded with the
//! spec's seed and switched to stream `i`, so trials are independent of one
//! another and of the execution schedule: serial runs, parallel runs, and
//! runs with different thread counts produce identical reports, and any
//! reported `(seed, index)` pair regenerates its sample bit for bit.
//!
//! # Ensembles
//!
//! Plain matrix ensembles ([`sample_matrix_at`]):
//!
//! * `ginibre_psd` — `G G* / n` for a complex Gaussian `G`; PSD, almost
//!   surely positive definite, eigenvalues `O(1)`;
//! * `haar_unitary` — QR of Ginibre with the phases of the `R` diagonal
//!   pushed into `Q`, which makes the distribution Haar;
//! * `contraction` — Ginibre rescaled to unit top singular value;
//! * `hermitian` — `(G + G*) / 2`.
//!
//! Block ensembles ([`sample_block_at`]):
//!
//! * `block_psd` — an unstructured PSD parent of size `2n` split into
//!   blocks; the broadest ensemble, populating every census region;
//! * `ppt_rejection` — `block_psd` filtered to positive partial transpose;
//! * `ppt_separable` — a normalized sum of Kronecker products
//!   `sum_t C_t (x) D_t` with PSD factors, PPT by construction;
//! * `family:<name>` — one draw of the named [`families`] construction with
//!   inputs taken from the matching matrix ensembles.
//!
//! Rejection — the PPT filter, ill-conditioned family draws, or a rare
//! validation failure on a boundary — is resolved inside the trial's own
//! stream: the trial redraws until it accepts, and gives up with
//! [`Error::RejectionExhausted`] after [`MAX_REJECTIONS`] consecutive
//! rejections, which operationalizes "acceptance rate below one in a
//! thousand".

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::blocks::{
    implication_closure, is_ppt, make_block, property_profile, region_key_of, BlockPsdMatrix,
    Property,
};
use crate::docfmt::BlockDoc;
use crate::families::{self, FamilyName, HUA_MARGIN};
use crate::numerics::{spectral_norm, ComplexMatrix, HermitianMatrix, ToleranceConfig};
use crate::{Error, Result};

/// Per-trial cap on consecutive rejected draws before the sampler gives up.
pub const MAX_REJECTIONS: usize = 1000;

/// Family draws that invert a factor (Hua, unitary off-diagonal) are
/// redrawn while the factor's condition number exceeds this, so censuses
/// are not dominated by numerically meaningless near-singular instances.
pub const CONDITION_CAP: f64 = 1e8;

// ---------------------------------------------------------------------------
// Generator specification
// ---------------------------------------------------------------------------

/// A random matrix or block-matrix ensemble.
///
/// Serialized as its name: `"ginibre_psd"`, `"haar_unitary"`,
/// `"contraction"`, `"hermitian"`, `"block_psd"`, `"ppt_rejection"`,
/// `"ppt_separable"`, or `"family:<name>"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ensemble {
    GinibrePsd,
    HaarUnitary,
    Contraction,
    Hermitian,
    BlockPsd,
    PptRejection,
    PptSeparable,
    Family(FamilyName),
}

impl Ensemble {
    /// Every ensemble, families included; used for help text and error
    /// messages.
    pub fn all() -> Vec<Ensemble> {
        let mut out = vec![
            Ensemble::GinibrePsd,
            Ensemble::HaarUnitary,
            Ensemble::Contraction,
            Ensemble::Hermitian,
            Ensemble::BlockPsd,
            Ensemble::PptRejection,
            Ensemble::PptSeparable,
        ];
        out.extend(FamilyName::ALL.into_iter().map(Ensemble::Family));
        out
    }

    /// Canonical name; family ensembles use the `family:` prefix.
    pub fn name(self) -> String {
        match self {
            Ensemble::GinibrePsd => "ginibre_psd".to_string(),
            Ensemble::HaarUnitary => "haar_unitary".to_string(),
            Ensemble::Contraction => "contraction".to_string(),
            Ensemble::Hermitian => "hermitian".to_string(),
            Ensemble::BlockPsd => "block_psd".to_string(),
            Ensemble::PptRejection => "ppt_rejection".to_string(),
            Ensemble::PptSeparable => "ppt_separable".to_string(),
            Ensemble::Family(f) => format!("family:{}", f.name()),
        }
    }

    /// Parses an ensemble name; hyphens are treated as underscores.
    pub fn parse(name: &str) -> Option<Ensemble> {
        let normalized = name.trim().to_ascii_lowercase().replace('-', "_");
        if let Some(rest) = normalized.strip_prefix("family:") {
            return FamilyName::parse(rest).map(Ensemble::Family);
        }
        match normalized.as_str() {
            "ginibre_psd" => Some(Ensemble::GinibrePsd),
            "haar_unitary" => Some(Ensemble::HaarUnitary),
            "contraction" => Some(Ensemble::Contraction),
            "hermitian" => Some(Ensemble::Hermitian),
            "block_psd" => Some(Ensemble::BlockPsd),
            "ppt_rejection" => Some(Ensemble::PptRejection),
            "ppt_separable" => Some(Ensemble::PptSeparable),
            _ => None,
        }
    }

    /// Whether samples are block matrices (as opposed to plain matrices).
    pub fn yields_blocks(self) -> bool {
        matches!(
            self,
            Ensemble::BlockPsd
                | Ensemble::PptRejection
                | Ensemble::PptSeparable
                | Ensemble::Family(_)
        )
    }

    /// Whether every sample has positive partial transpose, either by
    /// construction or by filtering.
    pub fn ppt_guaranteed(self) -> bool {
        matches!(self, Ensemble::PptRejection | Ensemble::PptSeparable)
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl std::str::FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Ensemble> {
        Ensemble::parse(s).ok_or_else(|| {
            let names: Vec<String> = Ensemble::all().iter().map(|e| e.name()).collect();
            Error::UnsupportedGenerator(format!(
                "unknown ensemble `{s}`; expected one of: {}",
                names.join(", ")
            ))
        })
    }
}

impl Serialize for Ensemble {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for Ensemble {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Ensemble::parse(&text)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown ensemble `{text}`")))
    }
}

/// Ensemble-specific knobs, all optional.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneratorParams {
    /// Number of Kronecker terms for `ppt_separable`; `None` means the
    /// default `2 n^2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separable_terms: Option<usize>,
}

impl GeneratorParams {
    fn is_default(&self) -> bool {
        *self == GeneratorParams::default()
    }
}

/// A fully reproducible description of a random sample: ensemble, block
/// size, master seed, and parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub ensemble: Ensemble,
    /// Block size for block ensembles, matrix size otherwise.
    pub n: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "GeneratorParams::is_default")]
    pub params: GeneratorParams,
}

impl GeneratorSpec {
    pub fn new(ensemble: Ensemble, n: usize, seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            ensemble,
            n,
            seed,
            params: GeneratorParams::default(),
        }
    }

    fn separable_terms(&self) -> usize {
        self.params
            .separable_terms
            .unwrap_or(2 * self.n * self.n)
            .max(1)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Precondition(
                "block size n must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Raw draws
// ---------------------------------------------------------------------------

/// The per-trial generator: one documented stream cipher, with the trial
/// index as the stream number.
fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Square complex Ginibre matrix: independent standard complex Gaussian
/// entries, filled in row-major order.
fn ginibre(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let mut raw = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            raw[(i, j)] = complex_gaussian(rng);
        }
    }
    ComplexMatrix::from_raw_unchecked(raw)
}

/// `G G* / n`: Wishart-type PSD, almost surely positive definite.
fn ginibre_psd(rng: &mut ChaCha8Rng, n: usize) -> Result<HermitianMatrix> {
    let g = ginibre(rng, n);
    let product = g.mul(&g.adjoint())?;
    Ok(HermitianMatrix::symmetrize(&product.scale(1.0 / n as f64)))
}

/// Haar-distributed unitary: QR of Ginibre with each column of `Q` rotated
/// by the phase of the matching `R` diagonal entry, which fixes the gauge
/// that plain QR leaves arbitrary.
fn haar_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n);
    let qr = g.into_raw().qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            d / d.norm()
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_raw_unchecked(q)
}

/// Ginibre rescaled to top singular value exactly one.
fn contraction(rng: &mut ChaCha8Rng, n: usize) -> Result<ComplexMatrix> {
    let g = ginibre(rng, n);
    let s1 = spectral_norm(&g)?;
    if s1 == 0.0 {
        return Ok(g);
    }
    Ok(g.scale(1.0 / s1))
}

/// GUE-type Hermitian matrix `(G + G*) / 2`.
fn hermitian_gaussian(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
    HermitianMatrix::symmetrize(&ginibre(rng, n))
}

/// Splits a `2n x 2n` Hermitian parent into its `n x n` corner blocks.
fn split_blocks(parent: &HermitianMatrix) -> (HermitianMatrix, ComplexMatrix, HermitianMatrix) {
    let n = parent.dim() / 2;
    let raw = parent.raw();
    let corner = |r: usize, c: usize| {
        ComplexMatrix::from_raw_unchecked(raw.view((r, c), (n, n)).into_owned())
    };
    let m11 = HermitianMatrix::symmetrize(&corner(0, 0));
    let m12 = corner(0, n);
    let m22 = HermitianMatrix::symmetrize(&corner(n, n));
    (m11, m12, m22)
}

// ---------------------------------------------------------------------------
// Sampling entry points
// ---------------------------------------------------------------------------

/// Draws trial `index` of a plain matrix ensemble.
pub fn sample_matrix_at(spec: &GeneratorSpec, index: u64) -> Result<ComplexMatrix> {
    spec.validate()?;
    if spec.ensemble.yields_blocks() {
        return Err(Error::UnsupportedGenerator(format!(
            "ensemble {} yields block matrices; use sample_block_at",
            spec.ensemble
        )));
    }
    let mut rng = trial_rng(spec.seed, index);
    match spec.ensemble {
        Ensemble::GinibrePsd => Ok(ginibre_psd(&mut rng, spec.n)?.matrix().clone()),
        Ensemble::HaarUnitary => Ok(haar_unitary(&mut rng, spec.n)),
        Ensemble::Contraction => contraction(&mut rng, spec.n),
        Ensemble::Hermitian => Ok(hermitian_gaussian(&mut rng, spec.n).matrix().clone()),
        _ => unreachable!("block ensembles rejected above"),
    }
}

/// Draws trial `index` of a block ensemble, redrawing within the trial's
/// stream until a sample is accepted.
pub fn sample_block_at(
    spec: &GeneratorSpec,
    index: u64,
    tol: &ToleranceConfig,
) -> Result<BlockPsdMatrix> {
    spec.validate()?;
    if !spec.ensemble.yields_blocks() {
        return Err(Error::UnsupportedGenerator(format!(
            "ensemble {} yields plain matrices; use sample_matrix_at",
            spec.ensemble
        )));
    }
    let mut rng = trial_rng(spec.seed, index);
    let mut rejections = 0usize;
    loop {
        match draw_block(spec, &mut rng, tol) {
            Ok(Some(block)) => return Ok(block),
            Ok(None) => {}
            Err(e) if retryable(&e) => {}
            Err(e) => return Err(e),
        }
        rejections += 1;
        if rejections >= MAX_REJECTIONS {
            return Err(Error::RejectionExhausted {
                ensemble: spec.ensemble.name(),
                n: spec.n,
                attempts: rejections,
            });
        }
    }
}

/// An unbounded iterator over a block ensemble's trials, in index order.
pub fn sample_blocks<'a>(spec: &GeneratorSpec, tol: &'a ToleranceConfig) -> BlockStream<'a> {
    BlockStream {
        spec: *spec,
        tol,
        next: 0,
    }
}

/// Iterator returned by [`sample_blocks`].
pub struct BlockStream<'a> {
    spec: GeneratorSpec,
    tol: &'a ToleranceConfig,
    next: u64,
}

impl Iterator for BlockStream<'_> {
    type Item = Result<BlockPsdMatrix>;

    fn next(&mut self) -> Option<Self::Item> {
        let index = self.next;
        self.next += 1;
        Some(sample_block_at(&self.spec, index, self.tol))
    }
}

/// Validation failures that a rejection sampler may legitimately retry:
/// a draw that landed outside its ensemble's domain.
fn retryable(e: &Error) -> bool {
    matches!(
        e,
        Error::NotPsd { .. } | Error::NotPositiveDefinite { .. } | Error::NotContraction { .. }
    )
}

fn draw_block(
    spec: &GeneratorSpec,
    rng: &mut ChaCha8Rng,
    tol: &ToleranceConfig,
) -> Result<Option<BlockPsdMatrix>> {
    let n = spec.n;
    match spec.ensemble {
        Ensemble::BlockPsd => {
            let parent = ginibre_psd(rng, 2 * n)?;
            let (m11, m12, m22) = split_blocks(&parent);
            Ok(Some(make_block(&m11, &m12, &m22, tol)?))
        }
        Ensemble::PptRejection => {
            let parent = ginibre_psd(rng, 2 * n)?;
            let (m11, m12, m22) = split_blocks(&parent);
            let block = make_block(&m11, &m12, &m22, tol)?;
            if is_ppt(&block, tol)? {
                Ok(Some(block))
            } else {
                Ok(None)
            }
        }
        Ensemble::PptSeparable => {
            let terms = spec.separable_terms();
            let mut m11 = DMatrix::<Complex64>::zeros(n, n);
            let mut m12 = DMatrix::<Complex64>::zeros(n, n);
            let mut m22 = DMatrix::<Complex64>::zeros(n, n);
            for _ in 0..terms {
                let c = ginibre_psd(rng, 2)?;
                let d = ginibre_psd(rng, n)?;
                m11 += d.raw() * c.get(0, 0);
                m12 += d.raw() * c.get(0, 1);
                m22 += d.raw() * c.get(1, 1);
            }
            let scale = Complex64::new(1.0 / terms as f64, 0.0);
            let m11 = HermitianMatrix::symmetrize(&ComplexMatrix::from_raw_unchecked(m11 * scale));
            let m12 = ComplexMatrix::from_raw_unchecked(m12 * scale);
            let m22 = HermitianMatrix::symmetrize(&ComplexMatrix::from_raw_unchecked(m22 * scale));
            Ok(Some(make_block(&m11, &m12, &m22, tol)?))
        }
        Ensemble::Family(family) => draw_family(family, n, rng, tol),
        _ => unreachable!("plain ensembles rejected by sample_block_at"),
    }
}

fn draw_family(
    family: FamilyName,
    n: usize,
    rng: &mut ChaCha8Rng,
    tol: &ToleranceConfig,
) -> Result<Option<BlockPsdMatrix>> {
    let instance = match family {
        FamilyName::Hua => {
            // Scale each unit-norm contraction into the interior so the
            // constructor's margin check never fires and the inverted
            // factors stay well conditioned.
            let sa: f64 = rng.random::<f64>() * (1.0 - HUA_MARGIN);
            let sb: f64 = rng.random::<f64>() * (1.0 - HUA_MARGIN);
            let a = contraction(rng, n)?.scale(sa);
            let b = contraction(rng, n)?.scale(sb);
            families::hua(&a, &b, tol)?
        }
        FamilyName::PhiBlock | FamilyName::PsiBlock => {
            let parent = ginibre_psd(rng, 2 * n)?;
            let (a, x, b) = split_blocks(&parent);
            if family == FamilyName::PhiBlock {
                families::phi_block(&a, &x, &b, tol)?
            } else {
                families::psi_block(&a, &x, &b, tol)?
            }
        }
        FamilyName::SymSquare => {
            let a = hermitian_gaussian(rng, n);
            let b = hermitian_gaussian(rng, n);
            families::sym_square(&a, &b, tol)?
        }
        FamilyName::SumDiff => {
            let a = ginibre_psd(rng, n)?;
            let b = ginibre_psd(rng, n)?;
            families::sum_diff(&a, &b, tol)?
        }
        FamilyName::UnitaryOffdiag => {
            let m11 = ginibre_psd(rng, n)?;
            let u = haar_unitary(rng, n);
            families::unitary_offdiag(&m11, &u, tol)?
        }
        FamilyName::NormWeighted => {
            let a = ginibre_psd(rng, n)?;
            let b = ginibre_psd(rng, n)?;
            families::norm_weighted(&a, &b, tol)?
        }
        FamilyName::Gram => {
            let a = ginibre(rng, n).scale(1.0 / (n as f64).sqrt());
            families::gram(&a, tol)?
        }
        FamilyName::BhatiaKittaneh => {
            let a = ginibre_psd(rng, n)?;
            let b = ginibre_psd(rng, n)?;
            families::bhatia_kittaneh_family(&a, &b, tol)?
        }
    };
    if instance.condition_number.is_some_and(|c| c > CONDITION_CAP) {
        return Ok(None);
    }
    Ok(Some(instance.block))
}

// ---------------------------------------------------------------------------
// Trial runners
// ---------------------------------------------------------------------------

/// Runs `count` independent trials and collects their results in index
/// order. With the `parallel` feature the trials run on the rayon pool;
/// collection order — and therefore every report built from it — is
/// identical either way.
fn run_trials<T, F>(count: u64, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(trial).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(trial).collect()
    }
}

/// Finds the lowest-index trial on which `probe` yields a value. Parallel
/// runs use `find_first`, so the answer matches the serial one.
fn find_first_some<T, F>(count: u64, probe: F) -> Result<Option<T>>
where
    T: Send,
    F: Fn(u64) -> Result<Option<T>> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        match (0..count)
            .into_par_iter()
            .map(probe)
            .find_first(|r| !matches!(r, Ok(None)))
        {
            None => Ok(None),
            Some(Ok(found)) => Ok(found),
            Some(Err(e)) => Err(e),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        for index in 0..count {
            if let Some(found) = probe(index)? {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }
}

// ---------------------------------------------------------------------------
// Census
// ---------------------------------------------------------------------------

/// A margin extremum together with the `(seed, index)` pair that
/// regenerates the sample attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginExtremum {
    pub margin: f64,
    pub seed: u64,
    pub index: u64,
}

/// Census of a block ensemble: how many samples land in each region of the
/// headline-property Venn diagram, with margin extrema for replay.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CensusReport {
    pub spec: GeneratorSpec,
    pub total: u64,
    /// Count per populated region, keyed like `"a+la+lg"` (sorted property
    /// names joined with `+`; the empty region is `"none"`). Regions are
    /// implication-closed, so only lattice-consistent keys can appear.
    pub region_counts: BTreeMap<String, u64>,
    /// Deepest margin per region — the minimum over the region's samples of
    /// the sample's worst headline margin — with replay provenance.
    pub region_margins: BTreeMap<String, MarginExtremum>,
    /// Samples with at least one comparison inside the marginal band
    /// (within ten comparison slacks of equality).
    pub marginal_count: u64,
    /// Samples whose raw verdicts violated an implication edge. Such
    /// violations only happen within noise of a boundary; the sample is
    /// filed under the implication closure of its raw holding set.
    pub closure_adjusted_count: u64,
    /// Samples whose classification failed (for example a divergent
    /// epsilon-limit); counted, not fatal.
    pub failure_count: u64,
    /// Minimum margin per property over all classified samples.
    pub min_margins: BTreeMap<String, MarginExtremum>,
}

enum TrialOutcome {
    Classified {
        region: String,
        /// Worst headline margin; the sample's distance to its nearest
        /// region boundary.
        region_margin: f64,
        marginal: bool,
        adjusted: bool,
        /// Per-property minimum margins in [`Property::ALL`] order.
        margins: [f64; 6],
    },
    Failed,
}

fn classify_trial(spec: &GeneratorSpec, index: u64, tol: &ToleranceConfig) -> Result<TrialOutcome> {
    let block = sample_block_at(spec, index, tol)?;
    let profile = match property_profile(&block, tol) {
        Ok(profile) => profile,
        Err(_) => return Ok(TrialOutcome::Failed),
    };
    let closed = implication_closure(&profile.holding_set());
    let headline: Vec<Property> = Property::HEADLINE
        .into_iter()
        .filter(|p| closed.contains(p))
        .collect();
    let mut margins = [0.0f64; 6];
    let mut marginal = false;
    for (slot, property) in margins.iter_mut().zip(Property::ALL) {
        let verdict = profile.verdict(property);
        *slot = verdict.min_margin;
        marginal |= verdict.marginal;
    }
    let region_margin = Property::HEADLINE
        .into_iter()
        .map(|p| profile.verdict(p).min_margin)
        .fold(f64::INFINITY, f64::min);
    Ok(TrialOutcome::Classified {
        region: region_key_of(&headline),
        region_margin,
        marginal,
        adjusted: !profile.lattice_consistent,
        margins,
    })
}

/// Classifies `count` samples of a block ensemble. Sampling failures abort;
/// classification failures are counted in the report.
pub fn census(spec: &GeneratorSpec, count: u64, tol: &ToleranceConfig) -> Result<CensusReport> {
    let outcomes = run_trials(count, |index| classify_trial(spec, index, tol))?;
    let mut report = CensusReport {
        spec: *spec,
        total: count,
        region_counts: BTreeMap::new(),
        region_margins: BTreeMap::new(),
        marginal_count: 0,
        closure_adjusted_count: 0,
        failure_count: 0,
        min_margins: BTreeMap::new(),
    };
    let update = |map: &mut BTreeMap<String, MarginExtremum>,
                  key: &str,
                  margin: f64,
                  index: u64,
                  seed: u64| {
        map.entry(key.to_string())
            .and_modify(|extremum| {
                if margin < extremum.margin {
                    *extremum = MarginExtremum {
                        margin,
                        seed,
                        index,
                    };
                }
            })
            .or_insert(MarginExtremum {
                margin,
                seed,
                index,
            });
    };
    for (index, outcome) in outcomes.iter().enumerate() {
        let index = index as u64;
        match outcome {
            TrialOutcome::Failed => report.failure_count += 1,
            TrialOutcome::Classified {
                region,
                region_margin,
                marginal,
                adjusted,
                margins,
            } => {
                *report.region_counts.entry(region.clone()).or_insert(0) += 1;
                update(
                    &mut report.region_margins,
                    region,
                    *region_margin,
                    index,
                    spec.seed,
                );
                report.marginal_count += u64::from(*marginal);
                report.closure_adjusted_count += u64::from(*adjusted);
                for (property, &margin) in Property::ALL.iter().zip(margins) {
                    update(
                        &mut report.min_margins,
                        property.name(),
                        margin,
                        index,
                        spec.seed,
                    );
                }
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Counterexample search
// ---------------------------------------------------------------------------

/// A sample that decisively violates a target property.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Counterexample {
    /// Master seed and trial index; replaying them regenerates `block`.
    pub seed: u64,
    pub index: u64,
    /// One-based position of the worst violated comparison: the index `j`
    /// for entrywise properties, the prefix length `k` for majorization
    /// properties.
    pub violated_index: usize,
    /// The (negative) margin at that position.
    pub margin: f64,
    /// The sample itself, in the interchange format.
    pub block: BlockDoc,
}

/// Outcome of a counterexample search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchReport {
    pub target: Property,
    pub spec: GeneratorSpec,
    pub max_trials: u64,
    /// The lowest-index decisive violation, or `None` if the budget was
    /// exhausted.
    pub counterexample: Option<Counterexample>,
}

/// Searches trials `0..max_trials` for a sample that violates `target` by
/// more than a hundred comparison slacks. Boundary-noise failures are
/// ignored; the lowest-index hit is returned regardless of thread count.
pub fn find_counterexample(
    target: Property,
    spec: &GeneratorSpec,
    max_trials: u64,
    tol: &ToleranceConfig,
) -> Result<SearchReport> {
    let probe = |index: u64| -> Result<Option<Counterexample>> {
        let block = sample_block_at(spec, index, tol)?;
        let profile = match property_profile(&block, tol) {
            Ok(profile) => profile,
            Err(_) => return Ok(None),
        };
        let verdict = profile.verdict(target);
        if verdict.holds || !verdict.decisive {
            return Ok(None);
        }
        let (worst, margin) = verdict
            .margins
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("verdicts grade at least one comparison");
        Ok(Some(Counterexample {
            seed: spec.seed,
            index,
            violated_index: worst + 1,
            margin,
            block: BlockDoc::from_block(&block),
        }))
    };
    let counterexample = find_first_some(max_trials, probe)?;
    Ok(SearchReport {
        target,
        spec: *spec,
        max_trials,
        counterexample,
    })
}

// ---------------------------------------------------------------------------
// Conjecture runs
// ---------------------------------------------------------------------------

/// The open questions the stress harness can exercise: does the named
/// property hold for every member of the named family?
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjectureId {
    /// `g` on the trace-augmentation family `phi_block`.
    PhiG,
    /// `a` on the complementary trace family `psi_block`.
    PsiA,
    /// `g` on the complementary trace family `psi_block`.
    PsiG,
}

impl ConjectureId {
    pub const ALL: [ConjectureId; 3] = [ConjectureId::PhiG, ConjectureId::PsiA, ConjectureId::PsiG];

    pub fn name(self) -> &'static str {
        match self {
            ConjectureId::PhiG => "phi_g",
            ConjectureId::PsiA => "psi_a",
            ConjectureId::PsiG => "psi_g",
        }
    }

    pub fn parse(name: &str) -> Option<ConjectureId> {
        let normalized = name.trim().to_ascii_lowercase().replace('-', "_");
        ConjectureId::ALL
            .into_iter()
            .find(|c| c.name() == normalized)
    }

    pub fn family(self) -> FamilyName {
        match self {
            ConjectureId::PhiG => FamilyName::PhiBlock,
            ConjectureId::PsiA | ConjectureId::PsiG => FamilyName::PsiBlock,
        }
    }

    pub fn property(self) -> Property {
        match self {
            ConjectureId::PhiG | ConjectureId::PsiG => Property::G,
            ConjectureId::PsiA => Property::A,
        }
    }
}

impl fmt::Display for ConjectureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ConjectureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<ConjectureId> {
        ConjectureId::parse(s).ok_or_else(|| {
            Error::UnsupportedGenerator(format!(
                "unknown conjecture `{s}`; expected one of: phi_g, psi_a, psi_g"
            ))
        })
    }
}

/// Margin statistics for one comparison index across a conjecture run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexMarginStats {
    /// One-based comparison index `j`.
    pub index: usize,
    pub min: f64,
    pub median: f64,
}

/// Evidence report for one conjecture. The harness never asserts the
/// conjecture: violations are counted and reported, and deciding what they
/// mean is left to the caller.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub id: ConjectureId,
    pub family: FamilyName,
    pub property: Property,
    pub n: usize,
    pub count: u64,
    pub seed: u64,
    /// Draws violating the property by more than a hundred comparison
    /// slacks — genuine findings if ever nonzero.
    pub violations: u64,
    /// Draws that failed within the boundary-noise band.
    pub boundary_failures: u64,
    /// Draws whose classification failed.
    pub failure_count: u64,
    /// Worst margin over the whole run, with replay provenance.
    pub min_margin: Option<MarginExtremum>,
    /// Per-index margin statistics over classified draws.
    pub per_index: Vec<IndexMarginStats>,
}

/// Runs `count` seeded draws of the conjecture's family and grades its
/// property on each. `count = 0` produces an empty report, not an error.
pub fn conjecture_run(
    id: ConjectureId,
    n: usize,
    count: u64,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<ConjectureReport> {
    let spec = GeneratorSpec::new(Ensemble::Family(id.family()), n, seed);
    let property = id.property();
    let rows = run_trials(count, |index| -> Result<Option<(Vec<f64>, bool, bool)>> {
        let block = sample_block_at(&spec, index, tol)?;
        match property_profile(&block, tol) {
            Err(_) => Ok(None),
            Ok(profile) => {
                let verdict = profile.verdict(property);
                Ok(Some((
                    verdict.margins.clone(),
                    verdict.holds,
                    verdict.decisive,
                )))
            }
        }
    })?;

    let mut report = ConjectureReport {
        id,
        family: id.family(),
        property,
        n,
        count,
        seed,
        violations: 0,
        boundary_failures: 0,
        failure_count: 0,
        min_margin: None,
        per_index: Vec::new(),
    };
    let mut per_index_values: Vec<Vec<f64>> = vec![Vec::new(); n];
    for (index, row) in rows.iter().enumerate() {
        let Some((margins, holds, decisive)) = row else {
            report.failure_count += 1;
            continue;
        };
        if !holds {
            if *decisive {
                report.violations += 1;
            } else {
                report.boundary_failures += 1;
            }
        }
        let mut worst = f64::INFINITY;
        for (j, &margin) in margins.iter().enumerate() {
            per_index_values[j].push(margin);
            worst = worst.min(margin);
        }
        if report
            .min_margin
            .is_none_or(|current| worst < current.margin)
        {
            report.min_margin = Some(MarginExtremum {
                margin: worst,
                seed,
                index: index as u64,
            });
        }
    }
    report.per_index = per_index_values
        .into_iter()
        .enumerate()
        .filter(|(_, values)| !values.is_empty())
        .map(|(j, mut values)| {
            values.sort_by(f64::total_cmp);
            IndexMarginStats {
                index: j + 1,
                min: values[0],
                median: median_of_sorted(&values),
            }
        })
        .collect();
    Ok(report)
}

fn median_of_sorted(values: &[f64]) -> f64 {
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

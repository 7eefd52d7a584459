//! Crate error type.

/// Errors shared by every module.
///
/// Domain violations (wrong shapes, non-PSD inputs, out-of-range compound
/// orders) are reported eagerly by constructors; numerical failures carry
/// enough context (dimensions, extremal eigenvalues, digests) to reproduce
/// the offending input.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Operands have incompatible shapes.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A matrix entry is NaN or infinite.
    #[error("matrix entries must be finite")]
    NonFinite,

    /// A matrix expected to be Hermitian is not, beyond tolerance.
    #[error("matrix is not Hermitian: max |M - M*| entry {deviation:.3e} exceeds {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },

    /// A matrix expected to be positive semidefinite has a significantly
    /// negative eigenvalue.
    #[error("matrix is not positive semidefinite: lambda_min = {lambda_min:.6e} (threshold {threshold:.3e})")]
    NotPsd { lambda_min: f64, threshold: f64 },

    /// A matrix expected to be positive definite is singular or indefinite.
    #[error("matrix is not positive definite: lambda_min = {lambda_min:.6e} (threshold {threshold:.3e})")]
    NotPositiveDefinite { lambda_min: f64, threshold: f64 },

    /// An inverse was requested for a numerically singular matrix.
    #[error("matrix is numerically singular: |pivot| = {pivot:.3e} at elimination step {step}")]
    Singular { pivot: f64, step: usize },

    /// The eigen- or singular-value solver did not converge.
    #[error("{kind} solver failed to converge on a {rows}x{cols} matrix (digest {digest:016x})")]
    SolverFailure {
        kind: &'static str,
        rows: usize,
        cols: usize,
        digest: u64,
    },

    /// The epsilon-regularized geometric mean did not stabilize.
    #[error(
        "geometric mean epsilon-limit did not converge: gap {gap:.3e} > {tol:.3e} after {steps} steps (final eps {final_eps:.3e})"
    )]
    GeometricMeanDiverged {
        gap: f64,
        tol: f64,
        steps: usize,
        final_eps: f64,
    },

    /// Compound order outside `1..=n`.
    #[error("compound order k = {k} out of range for an {n}x{n} matrix")]
    CompoundOrder { k: usize, n: usize },

    /// Compound construction refused: binomial dimensions blow up.
    #[error("compound matrices are capped at n <= {cap}; got n = {n}")]
    CompoundCap { n: usize, cap: usize },

    /// A matrix expected to be a contraction has top singular value
    /// meaningfully above one.
    #[error("not a contraction: s1 = {s1:.6} exceeds 1 + {slack:.0e}")]
    NotContraction { s1: f64, slack: f64 },

    /// A matrix expected to be unitary is not, beyond tolerance.
    #[error("matrix is not unitary: max |U*U - I| entry {deviation:.3e} exceeds {tol:.3e}")]
    NotUnitary { deviation: f64, tol: f64 },

    /// A check was invoked on input that does not satisfy its stated
    /// hypothesis (for example a proposition restricted to n = 2).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A rejection sampler's acceptance rate fell below its floor.
    #[error(
        "rejection sampler gave up after {attempts} consecutive rejections (ensemble {ensemble}, n = {n})"
    )]
    RejectionExhausted {
        ensemble: String,
        n: usize,
        attempts: usize,
    },

    /// A generator specification cannot drive the requested operation
    /// (for example a census over an ensemble that yields bare matrices).
    #[error("unsupported generator: {0}")]
    UnsupportedGenerator(String),

    /// Malformed serialized input (JSON documents, CLI matrix files).
    #[error("invalid input document: {0}")]
    InvalidDocument(String),
}

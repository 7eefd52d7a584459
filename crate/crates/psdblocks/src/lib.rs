//! Spectral analysis of positive semidefinite matrices partitioned into
//! 2x2 blocks with square off-diagonal blocks.
//!
//! For a PSD matrix
//!
//! ```text
//!     M = [ M11  M12 ]
//!         [ M12* M22 ]
//! ```
//!
//! with n x n blocks, the crate classifies which of six spectral
//! inequalities relate the singular values of the off-diagonal block to the
//! eigenvalues of the diagonal blocks' arithmetic and geometric means:
//!
//! * `la` — log-majorization by the sum: for every k,
//!   `prod_{j<=k} 2 s_j(M12) <= prod_{j<=k} lambda_j(M11 + M22)`;
//! * `lg` — log-majorization by the geometric mean: for every k,
//!   `prod_{j<=k} s_j(M12) <= prod_{j<=k} lambda_j(M11 # M22)`;
//! * `a`  — entrywise domination by the sum: `2 s_j(M12) <= lambda_j(M11 + M22)`;
//! * `g`  — entrywise domination by the geometric mean:
//!   `s_j(M12) <= lambda_j(M11 # M22)`;
//! * `ma` — weak majorization by the sum (partial sums of `2 s_j`);
//! * `mg` — weak majorization by the geometric mean (partial sums of `s_j`).
//!
//! Entrywise domination implies log-majorization implies weak majorization,
//! and every geometric-mean property implies its arithmetic counterpart by
//! the operator AM-GM inequality; [`blocks::Property`] records the full
//! implication lattice.
//!
//! The crate provides:
//!
//! * [`numerics`] — complex dense matrices, Hermitian eigendecomposition,
//!   singular values, PSD tests with witnesses, and the shared tolerance
//!   policy ([`numerics::ToleranceConfig`]);
//! * [`means`] — arithmetic and geometric matrix means, including the
//!   epsilon-regularized geometric mean for singular PSD inputs;
//! * [`compound`] — k-th multiplicative compound matrices and the identities
//!   that transfer block properties to compounds;
//! * [`blocks`] — the [`blocks::BlockPsdMatrix`] type, partial transpose,
//!   the PPT test, and the six-property classifier;
//! * [`families`] — structured constructions (Hua matrices, trace maps,
//!   Gram blocks, ...) with machine-readable expected-property metadata;
//! * [`search`] — seeded random ensembles, property censuses,
//!   counterexample search, and conjecture stress harnesses;
//! * [`fixtures`] — small pinned instances with independently checked
//!   spectra, used by the verification suite and as demo presets;
//! * [`docfmt`] — the JSON interchange format for matrices and block
//!   instances shared by the CLI and the browser demo.
//!
//! All randomized entry points take explicit seeds and produce identical
//! results for identical seeds, independent of thread count.

pub mod blocks;
pub mod compound;
pub mod docfmt;
mod error;
pub mod families;
pub mod fixtures;
pub mod means;
pub mod numerics;
pub mod search;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;

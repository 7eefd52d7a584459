//! Shared tolerance policy.
//!
//! Every approximate comparison in the crate routes through a single
//! [`ToleranceConfig`] so that harnesses, the CLI, and the browser demo agree
//! on what "holds", "fails", and "marginal" mean. The defaults are chosen for
//! f64 spectral computations on matrices of modest size (n <= 12) and norm
//! (up to ~1e6); all of them can be overridden per run.

use serde::{Deserialize, Serialize};

/// Tolerances used by decompositions, PSD tests, and inequality verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    /// Maximum entrywise deviation `|M - M*|` accepted when validating a
    /// Hermitian input. Inputs within the band are symmetrized to
    /// `(M + M*)/2` before any decomposition.
    pub hermit_tol: f64,

    /// Relative eigenvalue floor for positive semidefiniteness: `H` passes
    /// the PSD test iff `lambda_min(H) >= -psd_tol * max(1, ||H||)`, with
    /// `||H||` the spectral norm. The same floor decides when eigenvalues
    /// may be clamped to zero inside `sqrt_psd`.
    pub psd_tol: f64,

    /// Absolute slack for scalar inequality verdicts.
    pub cmp_atol: f64,

    /// Relative slack for scalar inequality verdicts. A claim
    /// `lhs <= rhs` is accepted iff `lhs <= rhs + cmp_atol + cmp_rtol * max(1, rhs)`.
    pub cmp_rtol: f64,

    /// Initial shift for the epsilon-regularized geometric mean of singular
    /// PSD inputs.
    pub gm_eps_start: f64,

    /// Multiplicative shrink factor applied to the shift between successive
    /// geometric-mean iterates.
    pub gm_eps_shrink: f64,

    /// The epsilon-limit is declared converged when successive iterates are
    /// within this spectral-norm distance.
    pub gm_converge_tol: f64,

    /// Maximum number of shrink steps before the epsilon-limit reports
    /// non-convergence. The iterate gap for a PSD pair with orthogonal
    /// kernels decays like `sqrt(eps)`, so reaching `gm_converge_tol = 1e-9`
    /// from `gm_eps_start = 1e-2` needs roughly eighteen shrink steps;
    /// twenty-four leaves headroom without masking genuine stagnation.
    pub gm_max_steps: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            hermit_tol: 1e-8,
            psd_tol: 1e-9,
            cmp_atol: 1e-9,
            cmp_rtol: 1e-9,
            gm_eps_start: 1e-2,
            gm_eps_shrink: 0.1,
            gm_converge_tol: 1e-9,
            gm_max_steps: 24,
        }
    }
}

impl ToleranceConfig {
    /// Slack granted to the claim `lhs <= rhs`: `cmp_atol + cmp_rtol * max(1, rhs)`.
    pub fn slack(&self, rhs: f64) -> f64 {
        self.cmp_atol + self.cmp_rtol * rhs.abs().max(1.0)
    }

    /// Whether `lhs <= rhs` holds up to comparison slack.
    pub fn leq(&self, lhs: f64, rhs: f64) -> bool {
        lhs <= rhs + self.slack(rhs)
    }

    /// Whether `lhs` and `rhs` are within ten comparison slacks of each
    /// other — the band in which a verdict is reported as *marginal* and
    /// should not be trusted as a strict inequality in either direction.
    pub fn is_marginal(&self, lhs: f64, rhs: f64) -> bool {
        (lhs - rhs).abs() <= 10.0 * self.slack(rhs)
    }

    /// Whether `lhs <= rhs` is violated decisively: the gap exceeds one
    /// hundred comparison slacks. Counterexample searches only accept
    /// violations this large.
    pub fn decisive_violation(&self, lhs: f64, rhs: f64) -> bool {
        lhs - rhs > 100.0 * self.slack(rhs)
    }
}

//! Validated complex matrices, spectral decompositions, and the shared
//! tolerance policy.
//!
//! This module is the numerical foundation of the crate: every other module
//! consumes matrices through [`ComplexMatrix`] / [`HermitianMatrix`] and
//! compares spectra through [`ToleranceConfig`], so the rules for
//! symmetrization, PSD floors, and inequality slack live in exactly one
//! place.

mod decomp;
mod matrix;
mod tol;

pub(crate) use decomp::rebuild_hermitian;
pub use decomp::{
    det, eig_hermitian, eig_hermitian_values, general_inverse, inverse, is_psd, pseudo_inverse,
    schur_complement_psd, singular_values, spectral_norm, spectral_norm_hermitian, sqrt_psd,
    PsdCheck, PsdWitness,
};
pub use matrix::{ComplexMatrix, HermitianMatrix, Spectrum};
pub use tol::ToleranceConfig;

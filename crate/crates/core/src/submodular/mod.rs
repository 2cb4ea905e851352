//! Lifting discrete submodular maximization to the multilinear extension:
//! set functions, closed-form extensions, one-sample gradient estimators and
//! pipage rounding.

mod extension;
mod gradient;
mod pipage;
mod set_function;

pub use extension::{
    coverage_extension, extension_for, facility_location_extension, BruteMultilinear, Extension,
    FacilityLocation, Modular, MonteCarloExtension, ProbabilisticCoverage,
};
pub use gradient::{
    brute_multilinear, brute_multilinear_grad, grad_one_sample, grad_one_sample_vector,
    BRUTE_FORCE_LIMIT,
};
pub use pipage::{pipage_round, randomized_pipage_round, PipageOutcome, PipageStructure};
pub use set_function::SetFunction;

/// Entries of a fractional point must lie in `[0, 1]` up to this tolerance.
pub const FRACTIONAL_TOL: f64 = 1e-12;

pub(crate) fn check_fractional(x: &[f64]) -> crate::Result<()> {
    match x
        .iter()
        .position(|v| !(-FRACTIONAL_TOL..=1.0 + FRACTIONAL_TOL).contains(v))
    {
        Some(i) => Err(crate::Error::invalid(format!(
            "coordinate {i} = {} is outside [0, 1]",
            x[i]
        ))),
        None => Ok(()),
    }
}

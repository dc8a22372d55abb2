//! Numerical engine for adelic trace formulas over ℚ: local fields and their
//! Fourier analysis, principal-value functionals, Riemann zeta zeros, the Weil
//! explicit formula, cutoff traces, prolate spheroidal spectra, zero statistics
//! and the adelic summation map.

pub mod adelic_summation;
pub mod cutoff_trace;
pub mod error;
pub mod explicit_formula;
pub mod local_field;
pub mod principal_value;
pub mod prolate;
pub mod quad;
pub mod special;
pub mod spectral_stats;
pub mod test_functions;
pub mod zeta_zeros;

pub use error::{Error, Result};

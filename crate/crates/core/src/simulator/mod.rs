//! Monte Carlo simulation of the teacher/student ensemble: ridge fits on two
//! independent training sets, a shared test set, and empirical kernel
//! spectra.

mod linalg;
mod ridge;
pub mod rng;
mod sample;
mod spectrum;
mod stats;
mod trial;

pub use ridge::{ridge_solve, ridge_solve_dual, ridge_solve_primal};
pub use sample::{
    sample_bidiagonal, sample_instance, sample_instance_with, working_set_bytes, Dataset, Instance, Projection,
    Sampling, SimOptions, DEFAULT_MEMORY_BUDGET,
};
pub use spectrum::{
    default_matrix_count, empirical_spectrum, empirical_spectrum_with, kernel_spectrum, spectrum_working_set_bytes,
    EmpiricalSpectrum, Histogram, KernelSpectrum, ZERO_EIGENVALUE_RTOL,
};
pub use stats::{
    aggregate, default_trials, estimate, estimate_with, run_trials, Moments, QuantityEstimate, SimEstimate,
    BOUNDARY_TRIALS, DEFAULT_TRIALS,
};
pub use trial::{evaluate_instance, run_trial, run_trial_with, TrialResult};

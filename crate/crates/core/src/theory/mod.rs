//! Closed-form theory: regimes, ridge-less limits and finite-λ solutions.

mod finite;
mod regime;
mod ridgeless;

pub use finite::{
    chi_cubic, chi_finite_lambda, covariances_finite_lambda, eval_cubic, finite_lambda, relation_residuals,
    squared_averages_finite_lambda, susceptibilities_finite_lambda, Covariances, FiniteLambda, SquaredAverages,
    Susceptibilities,
};
pub use regime::{classify, Boundary, Regime, BOUNDARY_TOL};
pub use ridgeless::{closed_form, nu_coefficients, Laurent, RidgelessSusceptibilities, Taylor, TheoryResult};

pub use crate::teacher::teacher_moments;

use crate::config::ModelConfig;
use crate::value::Value;

pub fn classify_regime(cfg: &ModelConfig, tol: f64) -> Regime {
    classify(cfg.alpha_f, cfg.alpha_p, tol)
}

/// σ_δy*² = σ_β²σ_X²Δf.
pub fn sigma_dy2(cfg: &ModelConfig) -> f64 {
    cfg.sigma_dy2()
}

/// Ridge-less (⟨ŵ₁ŵ₂⟩, ⟨û₁û₂⟩, ⟨Δβ₁Δβ₂⟩).
pub fn covariances_ridgeless(cfg: &ModelConfig) -> (Value, Value, Value) {
    let t = closed_form(cfg);
    (t.cov_w, t.cov_u, t.cov_dbeta)
}

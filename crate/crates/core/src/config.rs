use crate::error::{Error, Result};
use crate::teacher::TeacherActivation;

/// Ridge parameter used throughout the simulations unless overridden.
pub const DEFAULT_LAMBDA: f64 = 1e-6;

/// One experiment: ratios, variance scales, regularization and teacher.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    /// N_f / M
    pub alpha_f: f64,
    /// N_p / M
    pub alpha_p: f64,
    pub sigma_x2: f64,
    pub sigma_w2: f64,
    pub sigma_beta2: f64,
    pub sigma_eps2: f64,
    pub lambda: f64,
    pub teacher: TeacherActivation,
    /// Training-set size, needed only by the simulator.
    pub m: Option<usize>,
}

/// Realized integer dimensions of a simulated instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub m: usize,
    pub n_f: usize,
    pub n_p: usize,
}

impl Dims {
    pub fn alpha_f(&self) -> f64 {
        self.n_f as f64 / self.m as f64
    }

    pub fn alpha_p(&self) -> f64 {
        self.n_p as f64 / self.m as f64
    }
}

impl ModelConfig {
    /// Unit variances, linear teacher, λ = 1e-6.
    pub fn new(alpha_f: f64, alpha_p: f64) -> Self {
        ModelConfig {
            alpha_f,
            alpha_p,
            sigma_x2: 1.0,
            sigma_w2: 1.0,
            sigma_beta2: 1.0,
            sigma_eps2: 1.0,
            lambda: DEFAULT_LAMBDA,
            teacher: TeacherActivation::linear(),
            m: None,
        }
    }

    /// σ_X² = σ_W² = σ_ε² = 1 and σ_β² chosen so that
    /// (σ_β²σ_X² + σ_δy*²)/σ_ε² = `snr`.
    pub fn with_snr(alpha_f: f64, alpha_p: f64, snr: f64, teacher: TeacherActivation) -> Self {
        let sigma_beta2 = snr / (1.0 + teacher.delta_f());
        ModelConfig { sigma_beta2, teacher, ..ModelConfig::new(alpha_f, alpha_p) }
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_ratios(mut self, alpha_f: f64, alpha_p: f64) -> Self {
        self.alpha_f = alpha_f;
        self.alpha_p = alpha_p;
        self
    }

    /// Checks every invariant and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let mut positive = |name: &str, v: f64| {
            if !(v > 0.0 && v.is_finite()) {
                problems.push(format!("{name} must be finite and > 0, got {v}"));
            }
        };
        positive("alpha_f", self.alpha_f);
        positive("alpha_p", self.alpha_p);
        positive("sigma_x2", self.sigma_x2);
        positive("sigma_w2", self.sigma_w2);
        for (name, v) in [
            ("sigma_beta2", self.sigma_beta2),
            ("sigma_eps2", self.sigma_eps2),
            ("lambda", self.lambda),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                problems.push(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        if problems.is_empty() && !self.lambda_bar().is_finite() {
            problems.push("lambda / (sigma_w2 * sigma_x2) is not finite".into());
        }
        if self.m == Some(0) {
            problems.push("m must be >= 1".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(problems))
        }
    }

    /// λ̄ = λ / (σ_W²σ_X²).
    pub fn lambda_bar(&self) -> f64 {
        self.lambda / (self.sigma_w2 * self.sigma_x2)
    }

    /// σ_δy*² = σ_β²σ_X²Δf, the variance of the nonlinear part of the labels.
    pub fn sigma_dy2(&self) -> f64 {
        self.sigma_beta2 * self.sigma_x2 * self.teacher.delta_f()
    }

    /// Label noise plus nonlinear label variance.
    pub fn effective_noise(&self) -> f64 {
        self.sigma_eps2 + self.sigma_dy2()
    }

    /// σ_y² = σ_β²σ_X² + σ_δy*² + σ_ε², the variance of the training labels.
    pub fn label_variance(&self) -> f64 {
        self.sigma_beta2 * self.sigma_x2 + self.sigma_dy2() + self.sigma_eps2
    }

    /// The linear-teacher model that sees the nonlinear label part as extra noise.
    pub fn linearized(&self) -> ModelConfig {
        ModelConfig {
            sigma_eps2: self.effective_noise(),
            teacher: TeacherActivation::linear(),
            ..self.clone()
        }
    }

    /// N_f = round(α_f·M), N_p = round(α_p·M), each at least 1.
    pub fn dims(&self) -> Result<Dims> {
        let m = self.m.ok_or(Error::MissingDimension)?;
        let round = |a: f64| ((a * m as f64).round() as usize).max(1);
        Ok(Dims { m, n_f: round(self.alpha_f), n_p: round(self.alpha_p) })
    }
}

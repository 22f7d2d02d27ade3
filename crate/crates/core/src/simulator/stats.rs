use rayon::prelude::*;

use super::rng::trial_seed;
use super::sample::SimOptions;
use super::trial::{run_trial_with, TrialResult};
use crate::config::{Dims, ModelConfig};
use crate::error::{Error, Result};
use crate::theory::{classify, BOUNDARY_TOL};

/// Trials per point off the phase boundaries.
pub const DEFAULT_TRIALS: usize = 1000;
/// Trials per point on a phase boundary.
pub const BOUNDARY_TRIALS: usize = 150_000;

/// Count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn single(x: f64) -> Self {
        Moments { n: 1, mean: x, m2: 0.0 }
    }

    /// Combines two disjoint batches.
    pub fn merge(a: Moments, b: Moments) -> Moments {
        if a.n == 0 {
            return b;
        }
        if b.n == 0 {
            return a;
        }
        let n = a.n + b.n;
        let delta = b.mean - a.mean;
        let mean = a.mean + delta * (b.n as f64 / n as f64);
        let m2 = a.m2 + b.m2 + delta * delta * (a.n as f64 * b.n as f64 / n as f64);
        Moments { n, mean, m2 }
    }

    /// Pairwise reduction in index order: the slice is split at its midpoint
    /// and the halves merged, so the result depends only on the data.
    pub fn from_slice(xs: &[f64]) -> Moments {
        match xs.len() {
            0 => Moments::default(),
            1 => Moments::single(xs[0]),
            n => Moments::merge(Moments::from_slice(&xs[..n / 2]), Moments::from_slice(&xs[n / 2..])),
        }
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            f64::NAN
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantityEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

impl QuantityEstimate {
    fn from_moments(m: &Moments) -> Self {
        QuantityEstimate { mean: m.mean, stderr: m.stderr(), n: m.n }
    }

    fn scaled(self, s: f64) -> Self {
        QuantityEstimate { mean: self.mean / s, stderr: self.stderr / s, ..self }
    }

    /// (mean − reference)/stderr.
    pub fn z_score(&self, reference: f64) -> f64 {
        (self.mean - reference) / self.stderr
    }
}

/// Monte Carlo estimates of the four error quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct SimEstimate {
    pub train: QuantityEstimate,
    pub test: QuantityEstimate,
    pub bias2: QuantityEstimate,
    /// test − bias² − σ_ε²; the standard error comes from the per-trial
    /// paired difference.
    pub variance: QuantityEstimate,
    pub sigma_eps2: f64,
    /// σ_y² used by [`SimEstimate::scaled`].
    pub label_variance: f64,
    pub dims: Dims,
    /// Divisor applied to all means and errors (1 when unscaled).
    pub scale: f64,
}

impl SimEstimate {
    /// All quantities divided by σ_y².
    pub fn scaled(&self) -> SimEstimate {
        let s = self.label_variance / self.scale;
        SimEstimate {
            train: self.train.scaled(s),
            test: self.test.scaled(s),
            bias2: self.bias2.scaled(s),
            variance: self.variance.scaled(s),
            scale: self.label_variance,
            ..self.clone()
        }
    }

    /// Quantities in the order train, test, bias2, variance.
    pub fn quantities(&self) -> [(&'static str, QuantityEstimate); 4] {
        [("train", self.train), ("test", self.test), ("bias2", self.bias2), ("variance", self.variance)]
    }
}

/// Aggregates trial results given in trial-index order.
pub fn aggregate(cfg: &ModelConfig, dims: Dims, trials: &[TrialResult]) -> SimEstimate {
    let col = |f: fn(&TrialResult) -> f64| trials.iter().map(f).collect::<Vec<_>>();
    let train = Moments::from_slice(&col(|t| t.train_error));
    let test = Moments::from_slice(&col(|t| t.test_error));
    let bias = Moments::from_slice(&col(|t| t.bias_cross));
    let paired = Moments::from_slice(&col(|t| t.test_error - t.bias_cross));
    let variance = QuantityEstimate { mean: test.mean - bias.mean - cfg.sigma_eps2, stderr: paired.stderr(), n: paired.n };
    SimEstimate {
        train: QuantityEstimate::from_moments(&train),
        test: QuantityEstimate::from_moments(&test),
        bias2: QuantityEstimate::from_moments(&bias),
        variance,
        sigma_eps2: cfg.sigma_eps2,
        label_variance: cfg.label_variance(),
        dims,
        scale: 1.0,
    }
}

/// 150 000 trials on a phase boundary and 1000 elsewhere.
pub fn default_trials(cfg: &ModelConfig) -> usize {
    if classify(cfg.alpha_f, cfg.alpha_p, BOUNDARY_TOL).is_boundary() {
        BOUNDARY_TRIALS
    } else {
        DEFAULT_TRIALS
    }
}

/// Runs trials 0..n_trials in parallel on the current rayon pool.
pub fn run_trials(cfg: &ModelConfig, n_trials: usize, seed0: u64, opts: &SimOptions) -> Result<Vec<TrialResult>> {
    (0..n_trials as u64).into_par_iter().map(|i| run_trial_with(cfg, trial_seed(seed0, i), opts)).collect()
}

pub fn estimate(cfg: &ModelConfig, n_trials: usize, seed0: u64) -> Result<SimEstimate> {
    estimate_with(cfg, n_trials, seed0, &SimOptions::default())
}

/// Mean and standard error of each quantity over `n_trials` trials. The
/// result depends only on (cfg, n_trials, seed0, opts).
pub fn estimate_with(cfg: &ModelConfig, n_trials: usize, seed0: u64, opts: &SimOptions) -> Result<SimEstimate> {
    if n_trials < 2 {
        return Err(Error::InvalidConfig(vec![format!("n_trials must be >= 2, got {n_trials}")]));
    }
    let dims = cfg.dims()?;
    let trials = run_trials(cfg, n_trials, seed0, opts)?;
    Ok(aggregate(cfg, dims, &trials))
}

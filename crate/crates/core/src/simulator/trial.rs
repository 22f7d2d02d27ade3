use super::linalg;
use super::ridge::ridge_solve;
use super::sample::{sample_instance_with, Instance, SimOptions};
use crate::config::ModelConfig;
use crate::error::Result;

/// Outcome of one simulated trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    pub train_error: f64,
    pub test_error: f64,
    /// (ŷ₁ − y*′)·(ŷ₂ − y*′)/M′ against the noiseless test labels.
    pub bias_cross: f64,
    /// 1 − rank(ZᵀZ)/N_p, when computed.
    pub rank_deficit: Option<f64>,
}

fn mean_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

/// Fits both training sets and scores them on the shared test set.
pub fn evaluate_instance(inst: &Instance, lambda: f64) -> Result<TrialResult> {
    let p = &inst.projection;
    let z1 = p.features(inst.train1.x.as_ref());
    let z2 = p.features(inst.train2.x.as_ref());
    let zt = p.features(inst.test.x.as_ref());
    let w1 = ridge_solve(z1.as_ref(), &inst.train1.y, lambda)?;
    let w2 = ridge_solve(z2.as_ref(), &inst.train2.y, lambda)?;
    let fit1 = linalg::mat_vec(z1.as_ref(), &w1);
    let pred1 = linalg::mat_vec(zt.as_ref(), &w1);
    let pred2 = linalg::mat_vec(zt.as_ref(), &w2);
    let ys = &inst.test.y_star;
    let bias_cross = pred1
        .iter()
        .zip(&pred2)
        .zip(ys)
        .map(|((a, b), y)| (a - y) * (b - y))
        .sum::<f64>()
        / ys.len() as f64;
    Ok(TrialResult {
        train_error: mean_sq(&inst.train1.y, &fit1),
        test_error: mean_sq(&inst.test.y, &pred1),
        bias_cross,
        rank_deficit: None,
    })
}

pub fn run_trial(cfg: &ModelConfig, seed: u64) -> Result<TrialResult> {
    run_trial_with(cfg, seed, &SimOptions::default())
}

pub fn run_trial_with(cfg: &ModelConfig, seed: u64, opts: &SimOptions) -> Result<TrialResult> {
    let inst = sample_instance_with(cfg, seed, opts)?;
    evaluate_instance(&inst, cfg.lambda)
}

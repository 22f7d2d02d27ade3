//! Exact finite-λ solutions of the self-consistency equations.

use crate::config::ModelConfig;
use crate::error::{Error, Result};

/// The five scalar susceptibilities at one λ̄ (dimensionful).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Susceptibilities {
    pub chi: f64,
    pub nu: f64,
    pub kappa: f64,
    pub omega: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquaredAverages {
    pub w2: f64,
    pub u2: f64,
    pub dy2: f64,
    pub dbeta2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Covariances {
    pub cov_w: f64,
    pub cov_u: f64,
    pub cov_dbeta: f64,
}

/// Everything at one finite λ, including the error decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteLambda {
    pub susceptibilities: Susceptibilities,
    pub squared: SquaredAverages,
    pub covariances: Covariances,
    pub train_error: f64,
    pub test_error: f64,
    pub bias2: f64,
    pub variance: f64,
}

fn require_positive_lambda(cfg: &ModelConfig) -> Result<f64> {
    cfg.validate()?;
    let lb = cfg.lambda_bar();
    if lb > 0.0 {
        Ok(lb)
    } else {
        Err(Error::InvalidConfig(vec![format!("finite-lambda evaluation needs lambda > 0, got {}", cfg.lambda)]))
    }
}

/// Coefficients (c2, c1, c0) of the monic χ cubic.
pub fn chi_cubic(alpha_f: f64, alpha_p: f64, lambda_bar: f64) -> [f64; 3] {
    let c2 = alpha_f + alpha_p - 2.0;
    let c1 = (alpha_f - 1.0) * (alpha_p - 1.0) + alpha_f * alpha_p * lambda_bar;
    let c0 = -alpha_f * alpha_p * lambda_bar;
    [c2, c1, c0]
}

pub fn eval_cubic([c2, c1, c0]: [f64; 3], x: f64) -> f64 {
    ((x + c2) * x + c1) * x + c0
}

/// Largest real root of x³ + c2x² + c1x + c0 in (lo, 1], where the cubic is
/// negative at `lo` and positive at 1.
fn largest_root(c: [f64; 3]) -> Option<f64> {
    let [c2, c1, _] = c;
    if eval_cubic(c, 1.0) <= 0.0 {
        return None;
    }
    // critical points of the cubic, largest first; the left end of the
    // bracket is the largest candidate where the cubic is non-positive
    let disc = c2 * c2 - 3.0 * c1;
    let mut candidates = Vec::with_capacity(3);
    if disc >= 0.0 {
        let s = disc.sqrt();
        candidates.push((-c2 + s) / 3.0);
        candidates.push((-c2 - s) / 3.0);
    }
    candidates.push(0.0);
    let mut lo = candidates
        .into_iter()
        .filter(|&x| (0.0..1.0).contains(&x))
        .find(|&x| eval_cubic(c, x) <= 0.0)?;
    let mut hi = 1.0;
    if eval_cubic(c, lo) == 0.0 && lo > 0.0 {
        return Some(lo);
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eval_cubic(c, mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Newton polish, kept inside the bracket
    let mut x = hi;
    for _ in 0..3 {
        let [c2, c1, _] = c;
        let f = eval_cubic(c, x);
        let df = (3.0 * x + 2.0 * c2) * x + c1;
        if df == 0.0 {
            break;
        }
        let next = x - f / df;
        if !(next >= lo && next <= hi) || eval_cubic(c, next).abs() > f.abs() {
            break;
        }
        x = next;
    }
    Some(x)
}

/// The physical root χ of the cubic at λ̄ > 0: the largest real root in (0, 1],
/// which continues χ₀ = max(0, 1 − α_f, 1 − α_p) as λ̄ → 0.
pub fn chi_finite_lambda(cfg: &ModelConfig) -> Result<f64> {
    let lb = require_positive_lambda(cfg)?;
    let c = chi_cubic(cfg.alpha_f, cfg.alpha_p, lb);
    match largest_root(c) {
        Some(x) if x > 0.0 && x <= 1.0 => Ok(x),
        _ => Err(Error::NoPhysicalRoot { lambda_bar: lb }),
    }
}

/// χ, then κ, ν, ω, φ from the closed self-consistency relations.
pub fn susceptibilities_finite_lambda(cfg: &ModelConfig) -> Result<Susceptibilities> {
    let chi = chi_finite_lambda(cfg)?;
    let lb = cfg.lambda_bar();
    let s = cfg.sigma_w2 * cfg.sigma_x2;
    // the cubic factors as χ(χ+α_f−1)(χ+α_p−1) = α_fα_pλ̄(1−χ); use whichever
    // form of ν̄ avoids the cancellation in the small factor
    let (gf, gp) = (chi + cfg.alpha_f - 1.0, chi + cfg.alpha_p - 1.0);
    let nu_bar = if gp.abs() >= gf.abs() {
        gp / (cfg.alpha_p * lb)
    } else {
        cfg.alpha_f * (1.0 - chi) / (chi * gf)
    };
    let kappa = 1.0 / (1.0 + chi * nu_bar / cfg.alpha_f);
    let nu = nu_bar / s;
    Ok(Susceptibilities {
        chi,
        nu,
        kappa,
        omega: cfg.sigma_x2 * chi * kappa / cfg.alpha_f,
        phi: -cfg.sigma_w2 * nu * kappa,
    })
}

/// Residuals of the self-consistency relations, each normalized to O(1).
pub fn relation_residuals(cfg: &ModelConfig, s: &Susceptibilities) -> [f64; 5] {
    let sws = cfg.sigma_w2 * cfg.sigma_x2;
    [
        s.kappa * (1.0 + sws * s.chi * s.nu / cfg.alpha_f) - 1.0,
        s.omega / (cfg.sigma_x2 * s.chi * s.kappa / cfg.alpha_f) - 1.0,
        s.phi / (-cfg.sigma_w2 * s.nu * s.kappa) - 1.0,
        s.chi * (1.0 + sws * s.nu * s.kappa) - 1.0,
        s.nu * (cfg.lambda + sws * s.chi * s.kappa / cfg.alpha_p) - 1.0,
    ]
}

/// Solves the 4×4 linear system for (⟨ŵ²⟩, ⟨û²⟩, ⟨Δy²⟩, ⟨Δβ²⟩).
pub fn squared_averages_finite_lambda(cfg: &ModelConfig) -> Result<SquaredAverages> {
    let s = susceptibilities_finite_lambda(cfg)?;
    squared_averages_from(cfg, &s)
}

fn squared_averages_from(cfg: &ModelConfig, s: &Susceptibilities) -> Result<SquaredAverages> {
    let (af, ap) = (cfg.alpha_f, cfg.alpha_p);
    let (sx, sw) = (cfg.sigma_x2, cfg.sigma_w2);
    let a = [
        [1.0, -sw * (af / ap) * s.nu * s.nu, 0.0, 0.0],
        [-sw * s.omega * s.omega, 1.0, -sx / af * s.kappa * s.kappa, 0.0],
        [0.0, 0.0, 1.0, -sx * s.chi * s.chi],
        [-sw * s.kappa * s.kappa, 0.0, -sx / af * s.phi * s.phi, 1.0],
    ];
    let b = [
        0.0,
        cfg.sigma_beta2 * s.omega * s.omega,
        cfg.effective_noise() * s.chi * s.chi,
        cfg.sigma_beta2 * s.kappa * s.kappa,
    ];
    let [w2, u2, dy2, dbeta2] = solve4(a, b).ok_or(Error::SingularSystem)?;
    Ok(SquaredAverages { w2, u2, dy2, dbeta2 })
}

/// Gaussian elimination with row and column equilibration and partial
/// pivoting; `None` when a pivot vanishes. Near λ̄ = 0 the entries span many
/// orders of magnitude (ν² ~ λ̄⁻², κ² ~ λ̄² depending on the branch), so the
/// pivot test is made on the equilibrated matrix.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    let max_abs = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0f64, |m, v| m.max(v.abs()));
    for (row, rhs) in a.iter_mut().zip(b.iter_mut()) {
        let m = max_abs(&mut row.iter().copied());
        if !(m > 0.0 && m.is_finite()) {
            return None;
        }
        row.iter_mut().for_each(|v| *v /= m);
        *rhs /= m;
    }
    let mut col_scale = [1.0; 4];
    for (j, c) in col_scale.iter_mut().enumerate() {
        let m = max_abs(&mut a.iter().map(|row| row[j]));
        if !(m > 0.0) {
            return None;
        }
        *c = m;
        a.iter_mut().for_each(|row| row[j] /= m);
    }
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if !(a[piv][col].abs() > 1e-14) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let tail: f64 = (row + 1..4).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    for (v, c) in x.iter_mut().zip(col_scale) {
        *v /= c;
    }
    Some(x)
}

/// ⟨ŵ₁ŵ₂⟩, ⟨û₁û₂⟩, ⟨Δβ₁Δβ₂⟩ at finite λ (⟨Δy₁Δy₂⟩ = 0 identically).
pub fn covariances_finite_lambda(cfg: &ModelConfig) -> Result<Covariances> {
    let s = susceptibilities_finite_lambda(cfg)?;
    Ok(covariances_from(cfg, &s))
}

fn covariances_from(cfg: &ModelConfig, s: &Susceptibilities) -> Covariances {
    let sw = cfg.sigma_w2;
    let sb = cfg.sigma_beta2;
    // ⟨ŵ₁ŵ₂⟩ = a(σ_β² + σ_W²⟨ŵ₁ŵ₂⟩) with a = σ_W²(α_f/α_p)ν²ω²
    let a = sw * (cfg.alpha_f / cfg.alpha_p) * s.nu * s.nu * s.omega * s.omega;
    let cov_w = a * sb / (1.0 - a * sw);
    let shared = sb + sw * cov_w;
    Covariances { cov_w, cov_u: s.omega * s.omega * shared, cov_dbeta: s.kappa * s.kappa * shared }
}

/// Full finite-λ solution with train/test/bias²/variance.
pub fn finite_lambda(cfg: &ModelConfig) -> Result<FiniteLambda> {
    let s = susceptibilities_finite_lambda(cfg)?;
    let squared = squared_averages_from(cfg, &s)?;
    let covariances = covariances_from(cfg, &s);
    let sx = cfg.sigma_x2;
    Ok(FiniteLambda {
        susceptibilities: s,
        squared,
        covariances,
        train_error: squared.dy2,
        test_error: sx * squared.dbeta2 + cfg.sigma_dy2() + cfg.sigma_eps2,
        bias2: sx * covariances.cov_dbeta + cfg.sigma_dy2(),
        variance: sx * (squared.dbeta2 - covariances.cov_dbeta),
    })
}

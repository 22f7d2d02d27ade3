//! Analytic eigenvalue density of the Hessian ZᵀZ.
//!
//! Abscissae are in units of σ_W²σ_X², so the spectrum depends on (α_f, α_p)
//! only. The density is normalized over N_p eigenvalues: the bulk integrates
//! to 1 − f_zero and the remainder sits in a delta at zero.

mod cubic;

pub use cubic::CubicCoeffs;

use num_complex::Complex64;

use crate::config::ModelConfig;
use crate::error::{Error, Result};
use crate::theory::{classify, BOUNDARY_TOL};

/// Imaginary offsets used for the ε → 0 extrapolation.
pub const EPS_LADDER: [f64; 3] = [1e-6, 1e-7, 1e-8];

const EDGE_SCAN_POINTS: usize = 4096;
const EDGE_SCAN_DECADES: f64 = 12.0;

/// Fraction of zero eigenvalues of ZᵀZ: max(0, 1 − α_f/α_p, 1 − 1/α_p).
pub fn zero_fraction(alpha_f: f64, alpha_p: f64) -> f64 {
    0.0f64.max(1.0 - alpha_f / alpha_p).max(1.0 - 1.0 / alpha_p)
}

/// One evaluated resolvent value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventPoint {
    /// ν̄ at λ̄ = −x + iε.
    pub nu_bar: Complex64,
    /// Whether x lies inside the bulk support (cubic discriminant D > 0).
    /// Outside, no root has a macroscopic negative imaginary part and the
    /// returned root is the near-real branch.
    pub in_support: bool,
    /// Cubic residual relative to the size of its terms.
    pub residual: f64,
}

fn candidates(af: f64, ap: f64, x: f64, eps: f64) -> ([Complex64; 3], [Complex64; 3], [Complex64; 3]) {
    let lb = Complex64::new(-x, eps);
    let c = cubic::nu_cubic(af, ap, lb);
    let us = cubic::roots(c);
    let nus = us.map(|u| u / (ap * lb));
    (c, us, nus)
}

fn in_support(af: f64, ap: f64, x: f64) -> bool {
    x > 0.0 && CubicCoeffs::new(af, ap, -x).d > 0.0
}

fn most_negative_imag(nus: &[Complex64; 3]) -> usize {
    (0..3).min_by(|&i, &j| nus[i].im.total_cmp(&nus[j].im)).expect("three roots")
}

/// ν̄(λ̄ = −x + iε). Inside the support this is the root with the most
/// negative imaginary part; outside, the physical branch is followed down
/// from far above the support with a [`ResolventTracker`].
pub fn resolvent_nu(x: f64, eps: f64, cfg: &ModelConfig) -> ResolventPoint {
    let (af, ap) = (cfg.alpha_f, cfg.alpha_p);
    if in_support(af, ap, x) {
        let (c, us, nus) = candidates(af, ap, x, eps);
        let k = most_negative_imag(&nus);
        return ResolventPoint { nu_bar: nus[k], in_support: true, residual: cubic::scaled_residual(c, us[k]) };
    }
    let top = 2.0 * edge_bound(af, ap).max(x.abs());
    let mut tracker = ResolventTracker::new(cfg, eps);
    let steps = 400;
    if x > 0.0 {
        for k in 0..steps {
            tracker.eval(top * (x / top).powf(k as f64 / steps as f64));
        }
    }
    tracker.eval(x)
}

/// Upper bound on the largest eigenvalue, with headroom.
fn edge_bound(af: f64, ap: f64) -> f64 {
    2.0 * (1.0 + af.recip().sqrt()).powi(2) * (1.0 + (af / ap).sqrt()).powi(2)
}

/// Follows the physical resolvent branch along a sweep of decreasing x,
/// starting above the support where ν̄ ≈ −1/x.
#[derive(Debug, Clone)]
pub struct ResolventTracker {
    alpha_f: f64,
    alpha_p: f64,
    eps: f64,
    prev: Option<Complex64>,
}

impl ResolventTracker {
    pub fn new(cfg: &ModelConfig, eps: f64) -> Self {
        ResolventTracker { alpha_f: cfg.alpha_f, alpha_p: cfg.alpha_p, eps, prev: None }
    }

    pub fn eval(&mut self, x: f64) -> ResolventPoint {
        let (af, ap) = (self.alpha_f, self.alpha_p);
        let (c, us, nus) = candidates(af, ap, x, self.eps);
        let support = in_support(af, ap, x);
        let k = if support {
            most_negative_imag(&nus)
        } else {
            let target = self.prev.unwrap_or(Complex64::new(-1.0 / x, 0.0));
            (0..3)
                .filter(|&i| nus[i].im <= 0.0)
                .min_by(|&i, &j| (nus[i] - target).norm().total_cmp(&(nus[j] - target).norm()))
                .unwrap_or_else(|| most_negative_imag(&nus))
        };
        self.prev = Some(nus[k]);
        ResolventPoint { nu_bar: nus[k], in_support: support, residual: cubic::scaled_residual(c, us[k]) }
    }
}

/// Bulk density at one ε: −(1/π) Im[ν̄ − f_zero/λ̄].
pub fn density_at_eps(cfg: &ModelConfig, x: f64, eps: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let p = resolvent_nu(x, eps, cfg);
    let lb = Complex64::new(-x, eps);
    let bulk = p.nu_bar - zero_fraction(cfg.alpha_f, cfg.alpha_p) / lb;
    -bulk.im / std::f64::consts::PI
}

/// Bulk density at x, extrapolated linearly to ε → 0 from the two smallest
/// offsets of [`EPS_LADDER`] and clamped at zero.
pub fn density_at(cfg: &ModelConfig, x: f64) -> f64 {
    let [_, e1, e2] = EPS_LADDER;
    let r1 = density_at_eps(cfg, x, e1);
    let r2 = density_at_eps(cfg, x, e2);
    (r2 + (r2 - r1) * e2 / (e1 - e2)).max(0.0)
}

/// Mean bulk density over [lo, hi] (midpoint rule on `n` cells).
pub fn bin_average_density(cfg: &ModelConfig, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    (0..n).map(|k| density_at(cfg, lo + (k as f64 + 0.5) * h)).sum::<f64>() / n as f64
}

/// Grid layout for [`spectral_density`]; both span [0, 1.1 · edge_max].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Uniform,
    /// Cosine-spaced nodes on [edge_min, edge_max] so the square-root edges
    /// are resolved, plus a few uniform nodes outside the support.
    EdgeClustered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub points: usize,
    pub spacing: Spacing,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { points: 4000, spacing: Spacing::EdgeClustered }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub xs: Vec<f64>,
    pub rho: Vec<f64>,
    pub edge_min: f64,
    pub edge_max: f64,
    pub f_zero: f64,
}

impl SpectrumResult {
    /// ∫ρ dx by the trapezoid rule on the grid.
    pub fn bulk_mass(&self) -> f64 {
        trapezoid(&self.xs, &self.rho)
    }

    /// ∫xρ(x) dx.
    pub fn first_moment(&self) -> f64 {
        let xr: Vec<f64> = self.xs.iter().zip(&self.rho).map(|(x, r)| x * r).collect();
        trapezoid(&self.xs, &xr)
    }

    pub fn peak(&self) -> f64 {
        self.rho.iter().copied().fold(0.0, f64::max)
    }
}

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2).zip(ys.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

fn grid(spec: &GridSpec, edge_min: f64, edge_max: f64) -> Vec<f64> {
    let top = 1.1 * edge_max;
    let n = spec.points.max(8);
    match spec.spacing {
        Spacing::Uniform => (0..n).map(|k| top * k as f64 / (n - 1) as f64).collect(),
        Spacing::EdgeClustered => {
            let outside = (n / 20).max(2);
            let inside = n - 2 * outside;
            let mut xs = Vec::with_capacity(n);
            for k in 0..outside {
                xs.push(edge_min * k as f64 / outside as f64);
            }
            let width = edge_max - edge_min;
            for k in 0..inside {
                let t = std::f64::consts::PI * k as f64 / (inside - 1) as f64;
                xs.push(edge_min + width * 0.5 * (1.0 - t.cos()));
            }
            for k in 1..=outside {
                xs.push(edge_max + (top - edge_max) * k as f64 / outside as f64);
            }
            xs
        }
    }
}

/// Bulk density ρ on a grid over [0, 1.1 · edge_max], with edges and f_zero.
pub fn spectral_density(cfg: &ModelConfig, grid_spec: &GridSpec) -> Result<SpectrumResult> {
    cfg.validate()?;
    let (edge_min, edge_max) = support_edges(cfg)?;
    let xs = grid(grid_spec, edge_min, edge_max);
    let rho = xs.iter().map(|&x| density_at(cfg, x)).collect();
    Ok(SpectrumResult { xs, rho, edge_min, edge_max, f_zero: zero_fraction(cfg.alpha_f, cfg.alpha_p) })
}

fn discriminant(af: f64, ap: f64, x: f64) -> f64 {
    CubicCoeffs::new(af, ap, -x).d
}

fn bisect_root(af: f64, ap: f64, mut lo: f64, mut hi: f64) -> f64 {
    let sign_lo = discriminant(af, ap, lo) > 0.0;
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (discriminant(af, ap, mid) > 0.0) == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest and largest support edges (σ²_min, σ²_max), from sign changes of
/// the cubic discriminant D(λ̄ = −x) on a log-spaced scan refined by
/// bisection. On a phase boundary the gap closes and edge_min is 0.
pub fn support_edges(cfg: &ModelConfig) -> Result<(f64, f64)> {
    let (af, ap) = (cfg.alpha_f, cfg.alpha_p);
    let on_boundary = classify(af, ap, BOUNDARY_TOL).is_boundary();
    let mut x_hi = edge_bound(af, ap);
    for _ in 0..4 {
        let x_lo = x_hi * 10f64.powf(-EDGE_SCAN_DECADES);
        let xs: Vec<f64> = (0..EDGE_SCAN_POINTS)
            .map(|k| x_lo * (x_hi / x_lo).powf(k as f64 / (EDGE_SCAN_POINTS - 1) as f64))
            .collect();
        let signs: Vec<bool> = xs.iter().map(|&x| discriminant(af, ap, x) > 0.0).collect();
        let roots: Vec<f64> = (1..xs.len())
            .filter(|&k| signs[k] != signs[k - 1])
            .map(|k| bisect_root(af, ap, xs[k - 1], xs[k]))
            .collect();
        if let (Some(&first), Some(&last)) = (roots.first(), roots.last()) {
            if !signs[xs.len() - 1] {
                let gapless = on_boundary || signs[0];
                let edge_min = if gapless { 0.0 } else { first };
                return Ok((edge_min, last));
            }
        }
        x_hi *= 4.0;
    }
    Err(Error::NoEdgeFound { x_hi })
}

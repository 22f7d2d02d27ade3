//! Empirical eigenvalues of the Hessian ZᵀZ.
//!
//! Only the Gram matrix of the smaller side of Z is diagonalized; it carries
//! the same nonzero eigenvalues and the rest of the N_p eigenvalues are
//! zeros. Eigenvalues are reported in units of σ_W²σ_X².

use faer::Mat;

use super::linalg;
use super::rng::{stream_rng, trial_seed, Stream};
use super::sample::{gaussian_matrix, sample_bidiagonal, Projection, Sampling, SimOptions};
use crate::config::{Dims, ModelConfig};
use crate::error::{Error, Result};

/// Eigenvalues at or below this fraction of the largest one count as zero.
pub const ZERO_EIGENVALUE_RTOL: f64 = 1e-8;

/// Eigenvalues of one sampled ZᵀZ.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpectrum {
    pub n_p: usize,
    /// Nonzero eigenvalues, ascending.
    pub nonzero: Vec<f64>,
    /// Smallest eigenvalue returned by the solver, before thresholding.
    pub min_eigenvalue: f64,
}

impl KernelSpectrum {
    pub fn zero_count(&self) -> usize {
        self.n_p - self.nonzero.len()
    }

    /// 1 − rank(ZᵀZ)/N_p.
    pub fn rank_deficit(&self) -> f64 {
        self.zero_count() as f64 / self.n_p as f64
    }

    /// All N_p eigenvalues, zeros first.
    pub fn all_eigenvalues(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.zero_count()];
        v.extend_from_slice(&self.nonzero);
        v
    }
}

pub fn spectrum_working_set_bytes(dims: &Dims, sampling: Sampling) -> u64 {
    let (m, n_f, n_p) = (dims.m as u64, dims.n_f as u64, dims.n_p as u64);
    let words = match sampling {
        Sampling::Dense => {
            let s = m.min(n_p);
            n_f * n_p + m * n_f + m * n_p + s * s
        }
        Sampling::Bidiagonal => {
            let s = m.min(n_f.min(n_p));
            2 * m * n_f.min(n_p) + s * s
        }
    };
    8 * words
}

/// Samples Z = XW for one data set and returns the eigenvalues of ZᵀZ.
pub fn kernel_spectrum(cfg: &ModelConfig, seed: u64, opts: &SimOptions) -> Result<KernelSpectrum> {
    cfg.validate()?;
    let dims = cfg.dims()?;
    let bytes = spectrum_working_set_bytes(&dims, opts.sampling);
    if bytes > opts.memory_budget {
        return Err(Error::DimensionOverflow { bytes, budget: opts.memory_budget });
    }
    let (m, n_f, n_p) = (dims.m, dims.n_f, dims.n_p);
    let mut proj_rng = stream_rng(seed, Stream::Projection);
    let projection = match opts.sampling {
        Sampling::Dense => Projection::Dense(gaussian_matrix(&mut proj_rng, n_f, n_p, (cfg.sigma_w2 / n_p as f64).sqrt())),
        Sampling::Bidiagonal => sample_bidiagonal(&mut proj_rng, n_f, n_p, cfg.sigma_w2),
    };
    let x = gaussian_matrix(
        &mut stream_rng(seed, Stream::Spectrum),
        m,
        projection.input_dim(),
        (cfg.sigma_x2 / n_f as f64).sqrt(),
    );
    let z = projection.features(x.as_ref());
    drop(x);
    let gram: Mat<f64> = if z.ncols() <= z.nrows() { linalg::gram_cols(z.as_ref()) } else { linalg::gram_rows(z.as_ref()) };
    drop(z);
    let unit = cfg.sigma_w2 * cfg.sigma_x2;
    let eig = linalg::sym_eigenvalues(gram.as_ref())?;
    let top = eig.last().copied().unwrap_or(0.0);
    let min_eigenvalue = eig.first().copied().unwrap_or(0.0) / unit;
    let nonzero = eig.into_iter().filter(|&v| v > ZERO_EIGENVALUE_RTOL * top).map(|v| v / unit).collect();
    Ok(KernelSpectrum { n_p, nonzero, min_eigenvalue })
}

/// Matrix count that keeps the number of nonzero eigenvalues per histogram
/// comparable across α_p: 10·M/min(M, N_p), rounded up.
pub fn default_matrix_count(dims: &Dims) -> usize {
    (10 * dims.m).div_ceil(dims.m.min(dims.n_p))
}

/// Histogram of nonzero eigenvalues normalized like the bulk density: total
/// mass is the nonzero fraction of the N_p eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
}

impl Histogram {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn mass(&self) -> f64 {
        self.edges.windows(2).zip(&self.density).map(|(w, d)| (w[1] - w[0]) * d).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSpectrum {
    pub matrices: Vec<KernelSpectrum>,
    pub histogram: Histogram,
}

impl EmpiricalSpectrum {
    /// Pooled zero-eigenvalue fraction.
    pub fn zero_fraction(&self) -> f64 {
        let zeros: usize = self.matrices.iter().map(|k| k.zero_count()).sum();
        let total: usize = self.matrices.iter().map(|k| k.n_p).sum();
        zeros as f64 / total as f64
    }

    pub fn min_nonzero(&self) -> f64 {
        self.matrices.iter().filter_map(|k| k.nonzero.first().copied()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_nonzero(&self) -> f64 {
        self.matrices.iter().filter_map(|k| k.nonzero.last().copied()).fold(0.0, f64::max)
    }

    /// Mean of all nonzero eigenvalues.
    pub fn mean_nonzero(&self) -> f64 {
        let (sum, n) = self
            .matrices
            .iter()
            .flat_map(|k| &k.nonzero)
            .fold((0.0, 0usize), |(s, n), &v| (s + v, n + 1));
        sum / n as f64
    }

    /// Histogram over [lo, hi] with `n_bins` equal bins; eigenvalues outside
    /// the range are dropped.
    pub fn histogram(&self, lo: f64, hi: f64, n_bins: usize) -> Histogram {
        let width = (hi - lo) / n_bins as f64;
        let mut counts = vec![0usize; n_bins];
        for v in self.matrices.iter().flat_map(|k| &k.nonzero) {
            let k = ((v - lo) / width).floor();
            if k >= 0.0 && (k as usize) < n_bins {
                counts[k as usize] += 1;
            } else if *v == hi {
                counts[n_bins - 1] += 1;
            }
        }
        let total: usize = self.matrices.iter().map(|k| k.n_p).sum();
        let edges = (0..=n_bins).map(|k| lo + width * k as f64).collect();
        let density = counts.iter().map(|&c| c as f64 / (total as f64 * width)).collect();
        Histogram { edges, density }
    }
}

/// Eigenvalues of `n_matrices` independent ZᵀZ and their pooled histogram
/// over [min, max] of the nonzero eigenvalues.
pub fn empirical_spectrum(cfg: &ModelConfig, n_matrices: usize, seed0: u64, n_bins: usize) -> Result<EmpiricalSpectrum> {
    empirical_spectrum_with(cfg, n_matrices, seed0, n_bins, &SimOptions::default())
}

pub fn empirical_spectrum_with(
    cfg: &ModelConfig,
    n_matrices: usize,
    seed0: u64,
    n_bins: usize,
    opts: &SimOptions,
) -> Result<EmpiricalSpectrum> {
    // one matrix at a time: a single M = 4096 kernel already needs ~1 GB
    let matrices = (0..n_matrices as u64)
        .map(|i| kernel_spectrum(cfg, trial_seed(seed0, i), opts))
        .collect::<Result<Vec<_>>>()?;
    let mut out = EmpiricalSpectrum { matrices, histogram: Histogram { edges: vec![], density: vec![] } };
    let (lo, hi) = (out.min_nonzero(), out.max_nonzero());
    if lo.is_finite() && hi > lo {
        out.histogram = out.histogram(lo, hi, n_bins.max(1));
    }
    Ok(out)
}

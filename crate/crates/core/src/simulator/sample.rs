//! Instance sampling.
//!
//! The reduced sampler uses two rotations that leave every observable
//! unchanged: an orthogonal change of basis in feature space (X → XQ,
//! β → Qᵀβ, W → QᵀW) and one in parameter space (W → WR, ŵ → Rᵀŵ). Picking
//! Q and R from the Golub–Kahan bidiagonalization of W turns W into an r × r
//! bidiagonal block, r = min(N_f, N_p), whose entries are independent scaled
//! chi variables. Because β and the rows of X are isotropic and independent
//! of W, the rotated β and X are again i.i.d. Gaussian. Only the r feature
//! directions touched by W enter Z; the remaining directions contribute to
//! the labels through a single Gaussian per row.

use faer::{Mat, MatRef};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use super::linalg;
use super::rng::{stream_rng, Stream};
use crate::config::{Dims, ModelConfig};
use crate::error::{Error, Result};
use crate::teacher::TeacherActivation;

/// Working-set limit for one instance.
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    /// Dense W (N_f × N_p) and X (M × N_f).
    Dense,
    /// Bidiagonal W and X restricted to the r = min(N_f, N_p) active
    /// feature directions.
    #[default]
    Bidiagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOptions {
    pub sampling: Sampling,
    pub memory_budget: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { sampling: Sampling::default(), memory_budget: DEFAULT_MEMORY_BUDGET }
    }
}

/// Random projection W.
#[derive(Debug, Clone)]
pub enum Projection {
    Dense(Mat<f64>),
    /// r × r bidiagonal block of W in rotated bases. `upper` holds when
    /// N_f ≥ N_p: W = [B; 0] with B upper bidiagonal. Otherwise W = [B 0]
    /// with B lower bidiagonal. `off[i]` couples index i and i + 1.
    Bidiagonal { diag: Vec<f64>, off: Vec<f64>, upper: bool },
}

impl Projection {
    /// Number of feature columns the projection reads.
    pub fn input_dim(&self) -> usize {
        match self {
            Projection::Dense(w) => w.nrows(),
            Projection::Bidiagonal { diag, .. } => diag.len(),
        }
    }

    /// Hidden features Z = XW. In the bidiagonal case the N_p − r columns
    /// of Z that vanish identically are omitted; the ridge weights on them
    /// are zero, so predictions are unaffected.
    pub fn features(&self, x: MatRef<'_, f64>) -> Mat<f64> {
        match self {
            Projection::Dense(w) => linalg::product(x, w.as_ref()),
            Projection::Bidiagonal { diag, off, upper } => {
                let r = diag.len();
                assert_eq!(x.ncols(), r, "features need the {r} active columns");
                let (m, upper) = (x.nrows(), *upper);
                Mat::from_fn(m, r, |i, j| {
                    let mut v = x[(i, j)] * diag[j];
                    if upper && j > 0 {
                        v += x[(i, j - 1)] * off[j - 1];
                    } else if !upper && j + 1 < r {
                        v += x[(i, j + 1)] * off[j];
                    }
                    v
                })
            }
        }
    }

    /// The projection as a dense matrix of its stored block.
    pub fn to_dense(&self) -> Mat<f64> {
        match self {
            Projection::Dense(w) => w.clone(),
            Projection::Bidiagonal { diag, off, upper } => {
                let r = diag.len();
                Mat::from_fn(r, r, |i, j| {
                    if i == j {
                        diag[i]
                    } else if *upper && j == i + 1 {
                        off[i]
                    } else if !*upper && i == j + 1 {
                        off[j]
                    } else {
                        0.0
                    }
                })
            }
        }
    }
}

/// One data set. `x` holds all N_f columns for dense sampling and the r
/// active columns otherwise.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: Mat<f64>,
    /// Noiseless labels y*.
    pub y_star: Vec<f64>,
    pub eps: Vec<f64>,
    /// y = y* + ε.
    pub y: Vec<f64>,
}

/// Two training sets and one test set sharing β and W.
#[derive(Debug, Clone)]
pub struct Instance {
    pub dims: Dims,
    pub projection: Projection,
    /// Ground truth in the basis of `x`'s columns.
    pub beta: Vec<f64>,
    /// ‖β‖² over the feature directions not stored in `beta`.
    pub beta_rest_norm2: f64,
    pub train1: Dataset,
    pub train2: Dataset,
    pub test: Dataset,
}

/// Bytes of the largest arrays held while one trial runs.
pub fn working_set_bytes(dims: &Dims, sampling: Sampling) -> u64 {
    let (m, n_f, n_p) = (dims.m as u64, dims.n_f as u64, dims.n_p as u64);
    let r = n_f.min(n_p);
    let words = match sampling {
        Sampling::Dense => {
            let s = m.min(n_p);
            n_f * n_p + 3 * m * n_f + 3 * m * n_p + s * s
        }
        Sampling::Bidiagonal => {
            let s = m.min(r);
            6 * m * r + s * s
        }
    };
    8 * words
}

fn check_budget(dims: &Dims, opts: &SimOptions) -> Result<()> {
    let bytes = working_set_bytes(dims, opts.sampling);
    if bytes > opts.memory_budget {
        Err(Error::DimensionOverflow { bytes, budget: opts.memory_budget })
    } else {
        Ok(())
    }
}

pub(crate) fn normals(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Column-major M × k Gaussian matrix.
pub(crate) fn gaussian_matrix(rng: &mut ChaCha8Rng, m: usize, k: usize, scale: f64) -> Mat<f64> {
    let v = normals(rng, m * k, scale);
    Mat::from_fn(m, k, |i, j| v[i + j * m])
}

fn chi(rng: &mut ChaCha8Rng, dof: usize) -> f64 {
    if dof == 0 {
        0.0
    } else {
        ChiSquared::new(dof as f64).expect("positive dof").sample(rng).sqrt()
    }
}

/// Bidiagonal block of W. Tall case (N_f ≥ N_p): diagonal χ_{N_f−i},
/// superdiagonal χ_{r−1−i}. Wide case: the transpose of the same law with
/// N_f and N_p exchanged. Scaled by σ_W/√N_p.
pub fn sample_bidiagonal(rng: &mut ChaCha8Rng, n_f: usize, n_p: usize, sigma_w2: f64) -> Projection {
    let upper = n_f >= n_p;
    let (big, r) = if upper { (n_f, n_p) } else { (n_p, n_f) };
    let scale = (sigma_w2 / n_p as f64).sqrt();
    let diag = (0..r).map(|i| scale * chi(rng, big - i)).collect();
    let off = (0..r.saturating_sub(1)).map(|i| scale * chi(rng, r - 1 - i)).collect();
    Projection::Bidiagonal { diag, off, upper }
}

/// Maps the latent field h = x·β to noiseless labels.
pub(crate) fn labels(teacher: &TeacherActivation, sigma_x2: f64, sigma_beta2: f64, h: &[f64]) -> Vec<f64> {
    if teacher.is_linear() {
        return h.to_vec();
    }
    let s = (sigma_x2 * sigma_beta2).sqrt();
    if s == 0.0 {
        return vec![0.0; h.len()];
    }
    let c = s / teacher.mean_fp();
    h.iter().map(|&v| c * teacher.eval(v / s)).collect()
}

fn dataset(
    cfg: &ModelConfig,
    dims: &Dims,
    beta: &[f64],
    beta_rest_norm2: f64,
    seed: u64,
    x_stream: Stream,
    noise_stream: Stream,
) -> Dataset {
    let m = dims.m;
    let mut rng = stream_rng(seed, x_stream);
    let x = gaussian_matrix(&mut rng, m, beta.len(), (cfg.sigma_x2 / dims.n_f as f64).sqrt());
    let mut h = linalg::mat_vec(x.as_ref(), beta);
    if beta_rest_norm2 > 0.0 {
        let rest = normals(&mut rng, m, (cfg.sigma_x2 * beta_rest_norm2 / dims.n_f as f64).sqrt());
        h.iter_mut().zip(rest).for_each(|(v, e)| *v += e);
    }
    let y_star = labels(&cfg.teacher, cfg.sigma_x2, cfg.sigma_beta2, &h);
    let eps = normals(&mut stream_rng(seed, noise_stream), m, cfg.sigma_eps2.sqrt());
    let y = y_star.iter().zip(&eps).map(|(a, b)| a + b).collect();
    Dataset { x, y_star, eps, y }
}

/// Samples one instance with the default options.
pub fn sample_instance(cfg: &ModelConfig, seed: u64) -> Result<Instance> {
    sample_instance_with(cfg, seed, &SimOptions::default())
}

pub fn sample_instance_with(cfg: &ModelConfig, seed: u64, opts: &SimOptions) -> Result<Instance> {
    cfg.validate()?;
    let dims = cfg.dims()?;
    check_budget(&dims, opts)?;
    let (n_f, n_p) = (dims.n_f, dims.n_p);
    let mut proj_rng = stream_rng(seed, Stream::Projection);
    let mut beta_rng = stream_rng(seed, Stream::Beta);
    let sb = cfg.sigma_beta2.sqrt();
    let (projection, beta, beta_rest_norm2) = match opts.sampling {
        Sampling::Dense => {
            let w = gaussian_matrix(&mut proj_rng, n_f, n_p, (cfg.sigma_w2 / n_p as f64).sqrt());
            (Projection::Dense(w), normals(&mut beta_rng, n_f, sb), 0.0)
        }
        Sampling::Bidiagonal => {
            let projection = sample_bidiagonal(&mut proj_rng, n_f, n_p, cfg.sigma_w2);
            let r = projection.input_dim();
            let beta = normals(&mut beta_rng, r, sb);
            let rest = cfg.sigma_beta2 * chi(&mut beta_rng, n_f - r).powi(2);
            (projection, beta, rest)
        }
    };
    let make = |xs, ns| dataset(cfg, &dims, &beta, beta_rest_norm2, seed, xs, ns);
    let train1 = make(Stream::Train1X, Stream::Train1Noise);
    let train2 = make(Stream::Train2X, Stream::Train2Noise);
    let test = make(Stream::TestX, Stream::TestNoise);
    Ok(Instance { dims, projection, beta, beta_rest_norm2, train1, train2, test })
}

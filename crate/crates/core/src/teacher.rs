//! Teacher activations and their Gaussian moments.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::hermite::GaussHermite;

use crate::error::{Error, Result};

/// Default number of Gauss–Hermite nodes.
pub const DEFAULT_QUADRATURE_ORDER: usize = 128;

const CONVERGENCE_TOL: f64 = 1e-10;
const CENTER_TOL: f64 = 1e-8;
const DEGENERATE_TOL: f64 = 1e-12;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum TeacherKind {
    Linear,
    /// `max(0, h) − 1/√(2π)`, centered so that E[f(h)] = 0.
    Relu,
    Tanh,
    Custom { name: String, f: ScalarFn },
}

impl fmt::Debug for TeacherKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TeacherKind::Linear => f.write_str("Linear"),
            TeacherKind::Relu => f.write_str("Relu"),
            TeacherKind::Tanh => f.write_str("Tanh"),
            TeacherKind::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// Gaussian moments of a teacher nonlinearity, h ~ N(0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeacherMoments {
    pub mean_f2: f64,
    pub mean_fp: f64,
    pub delta_f: f64,
}

impl TeacherMoments {
    fn from_raw(mean_f2: f64, mean_fp: f64) -> Self {
        let delta_f = ((mean_f2 - mean_fp * mean_fp) / (mean_fp * mean_fp)).max(0.0);
        TeacherMoments { mean_f2, mean_fp, delta_f }
    }
}

/// The activation `f` of the teacher `y* = (σ_βσ_X/⟨f′⟩) f(x·β/(σ_Xσ_β))`.
#[derive(Debug, Clone)]
pub struct TeacherActivation {
    kind: TeacherKind,
    moments: TeacherMoments,
}

impl TeacherActivation {
    pub fn linear() -> Self {
        TeacherActivation {
            kind: TeacherKind::Linear,
            moments: TeacherMoments { mean_f2: 1.0, mean_fp: 1.0, delta_f: 0.0 },
        }
    }

    /// Centered ReLU. Moments are exact: ⟨f²⟩ = 1/2 − 1/(2π), ⟨f′⟩ = 1/2.
    pub fn relu() -> Self {
        TeacherActivation {
            kind: TeacherKind::Relu,
            moments: TeacherMoments::from_raw(0.5 - 0.5 / PI, 0.5),
        }
    }

    pub fn tanh() -> Self {
        static MOMENTS: OnceLock<TeacherMoments> = OnceLock::new();
        let moments = *MOMENTS.get_or_init(|| {
            teacher_moments(f64::tanh, DEFAULT_QUADRATURE_ORDER).expect("tanh moments converge")
        });
        TeacherActivation { kind: TeacherKind::Tanh, moments }
    }

    /// Arbitrary centered activation; moments by quadrature.
    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let f: ScalarFn = Arc::new(f);
        let moments = teacher_moments(|h| f(h), DEFAULT_QUADRATURE_ORDER)?;
        Ok(TeacherActivation { kind: TeacherKind::Custom { name: name.into(), f }, moments })
    }

    pub fn kind(&self) -> &TeacherKind {
        &self.kind
    }

    pub fn name(&self) -> &str {
        match &self.kind {
            TeacherKind::Linear => "linear",
            TeacherKind::Relu => "relu",
            TeacherKind::Tanh => "tanh",
            TeacherKind::Custom { name, .. } => name,
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.kind, TeacherKind::Linear)
    }

    pub fn moments(&self) -> TeacherMoments {
        self.moments
    }

    pub fn mean_f2(&self) -> f64 {
        self.moments.mean_f2
    }

    pub fn mean_fp(&self) -> f64 {
        self.moments.mean_fp
    }

    pub fn delta_f(&self) -> f64 {
        self.moments.delta_f
    }

    pub fn eval(&self, h: f64) -> f64 {
        match &self.kind {
            TeacherKind::Linear => h,
            TeacherKind::Relu => h.max(0.0) - 1.0 / (2.0 * PI).sqrt(),
            TeacherKind::Tanh => h.tanh(),
            TeacherKind::Custom { f, .. } => f(h),
        }
    }
}

fn rule(order: usize) -> Arc<GaussHermite> {
    static RULES: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
    let mut rules = RULES.get_or_init(Default::default).lock().unwrap_or_else(|e| e.into_inner());
    rules
        .entry(order)
        .or_insert_with(|| Arc::new(GaussHermite::new(order.try_into().expect("order > 0"))))
        .clone()
}

/// E[f(h)] for h ~ N(0, 1) with an `order`-node Gauss–Hermite rule.
pub fn gaussian_expectation(f: impl Fn(f64) -> f64, order: usize) -> f64 {
    let scale = std::f64::consts::SQRT_2;
    rule(order).integrate(|x| f(scale * x)) / PI.sqrt()
}

/// ⟨f²⟩, ⟨f′⟩ (via the Stein identity E[f′(h)] = E[h f(h)]) and Δf.
///
/// Each moment is computed at `quadrature_order` and `2 · quadrature_order`
/// nodes; they must agree to 1e-10.
pub fn teacher_moments(f: impl Fn(f64) -> f64, quadrature_order: usize) -> Result<TeacherMoments> {
    if quadrature_order < 32 {
        return Err(Error::InvalidConfig(vec![format!(
            "quadrature order must be at least 32, got {quadrature_order}"
        )]));
    }
    let moments = |order: usize| {
        [
            gaussian_expectation(&f, order),
            gaussian_expectation(|h| f(h) * f(h), order),
            gaussian_expectation(|h| h * f(h), order),
        ]
    };
    let lo = moments(quadrature_order);
    let hi = moments(2 * quadrature_order);
    for (a, b) in lo.iter().zip(&hi) {
        let diff = (a - b).abs();
        if !(diff <= CONVERGENCE_TOL * b.abs().max(1.0)) {
            return Err(Error::QuadratureNotConverged { order: quadrature_order, diff });
        }
    }
    let [mean, mean_f2, mean_fp] = hi;
    if mean.abs() > CENTER_TOL * mean_f2.sqrt().max(1.0) {
        return Err(Error::NotCentered { mean });
    }
    if mean_fp.abs() < DEGENERATE_TOL {
        return Err(Error::DegenerateTeacher { mean_fp });
    }
    Ok(TeacherMoments::from_raw(mean_f2, mean_fp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn linear_moments_are_exact() {
        let t = TeacherActivation::linear();
        assert_eq!(t.moments(), TeacherMoments { mean_f2: 1.0, mean_fp: 1.0, delta_f: 0.0 });
        let q = teacher_moments(|h| h, 64).unwrap();
        assert!((q.mean_f2 - 1.0).abs() < 1e-13);
        assert!((q.mean_fp - 1.0).abs() < 1e-13);
        assert!(q.delta_f < 1e-12);
    }

    #[test]
    fn relu_delta_f_matches_monte_carlo() {
        let t = TeacherActivation::relu();
        assert!((t.delta_f() - (1.0 - 2.0 / PI)).abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let (mut s1, mut s2, mut sh) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let h: f64 = StandardNormal.sample(&mut rng);
            let f = t.eval(h);
            s1 += f;
            s2 += f * f;
            sh += h * f;
        }
        let n = n as f64;
        // standard errors are ~1e-3 at this sample size
        assert!((s1 / n).abs() < 4e-3);
        assert!((s2 / n - t.mean_f2()).abs() < 4e-3);
        assert!((sh / n - t.mean_fp()).abs() < 4e-3);
        let mc_delta = (s2 / n - (sh / n).powi(2)) / (sh / n).powi(2);
        assert!((mc_delta - 0.3633802276324187).abs() < 0.02, "{mc_delta}");
    }

    #[test]
    fn tanh_moments_converge() {
        let a = teacher_moments(f64::tanh, 128).unwrap();
        let b = teacher_moments(f64::tanh, 256).unwrap();
        assert!((a.mean_f2 - b.mean_f2).abs() < 1e-10);
        assert!((a.mean_fp - b.mean_fp).abs() < 1e-10);
        assert!((a.mean_f2 - 0.3942944903978).abs() < 1e-11);
        assert!((a.mean_fp - 0.6057055096021).abs() < 1e-11);
        assert!(a.delta_f > 0.0);
    }

    #[test]
    fn kinked_teacher_is_rejected_by_quadrature_check() {
        let err = teacher_moments(|h| h.abs() - (2.0 / PI).sqrt() + h, 64).unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged { .. }));
    }

    #[test]
    fn uncentered_and_degenerate_teachers() {
        assert!(matches!(teacher_moments(|h| h + 0.5, 64), Err(Error::NotCentered { .. })));
        assert!(matches!(teacher_moments(|h| h * h - 1.0, 64), Err(Error::DegenerateTeacher { .. })));
    }

    #[test]
    fn custom_cubic_teacher() {
        // f = h + h³: ⟨f′⟩ = 1 + 3 = 4, ⟨f²⟩ = 1 + 2·3 + 15 = 22
        let t = TeacherActivation::custom("cubic", |h| h + h * h * h).unwrap();
        assert!((t.mean_fp() - 4.0).abs() < 1e-12);
        assert!((t.mean_f2() - 22.0).abs() < 1e-11);
        assert!((t.delta_f() - 6.0 / 16.0).abs() < 1e-12);
        assert_eq!(t.name(), "cubic");
    }
}

//! λ → 0 closed forms for the three regimes.

use super::regime::{classify, Boundary, Regime, BOUNDARY_TOL};
use crate::config::ModelConfig;
use crate::value::Value;

/// c₀ + c₁λ̄.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Taylor {
    pub coef_0: Value,
    pub coef_1: Value,
}

/// c₋₁/λ̄ + c₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Laurent {
    pub coef_minus1: Value,
    pub coef_0: Value,
}

impl Taylor {
    pub fn eval(&self, lambda_bar: f64) -> Value {
        self.coef_0 + self.coef_1 * lambda_bar
    }
}

impl Laurent {
    pub fn eval(&self, lambda_bar: f64) -> Value {
        self.coef_minus1 / lambda_bar + self.coef_0
    }
}

/// Leading small-λ̄ behaviour of the five susceptibilities, in the same
/// units as their finite-λ counterparts (ν in 1/(σ_W²σ_X²), ω in σ_X²,
/// φ in 1/σ_X²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgelessSusceptibilities {
    pub chi: Taylor,
    pub nu: Laurent,
    pub kappa: Taylor,
    pub omega: Taylor,
    pub phi: Laurent,
}

/// Ridge-less closed forms. Each scalar may be [`Value::Divergent`].
///
/// Quantities whose λ → 0 limit vanishes carry their λ̄² coefficient in the
/// matching `*_lambda2` field (`None` when the limit is nonzero).
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryResult {
    pub regime: Regime,
    pub train_error: Value,
    pub test_error: Value,
    pub bias2: Value,
    pub variance: Value,
    pub w2: Value,
    pub u2: Value,
    pub dy2: Value,
    pub dbeta2: Value,
    pub cov_w: Value,
    pub cov_u: Value,
    pub cov_dbeta: Value,
    pub sigma_dy2: f64,
    pub u2_lambda2: Option<Value>,
    pub dy2_lambda2: Option<Value>,
    pub cov_u_lambda2: Option<Value>,
    pub cov_dbeta_lambda2: Option<Value>,
    pub susceptibilities: RidgelessSusceptibilities,
}

impl TheoryResult {
    /// Train, test, bias², variance divided by the label variance σ_y².
    pub fn scaled_errors(&self, cfg: &ModelConfig) -> [Value; 4] {
        let s = cfg.label_variance();
        [self.train_error / s, self.test_error / s, self.bias2 / s, self.variance / s]
    }

    /// Like [`scaled_errors`](Self::scaled_errors) at the configured λ: a
    /// train error or bias² that vanishes identically is replaced by its λ̄²
    /// term.
    pub fn scaled_errors_leading(&self, cfg: &ModelConfig) -> [Value; 4] {
        let lb2 = cfg.lambda_bar() * cfg.lambda_bar();
        let lift = |v: Value, coef: Option<Value>, unit: f64| match (v, coef) {
            (Value::Finite(x), Some(c)) if x == 0.0 => c * (unit * lb2),
            _ => v,
        };
        let s = cfg.label_variance();
        [
            lift(self.train_error, self.dy2_lambda2, 1.0) / s,
            self.test_error / s,
            lift(self.bias2, self.cov_dbeta_lambda2, cfg.sigma_x2) / s,
            self.variance / s,
        ]
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Branch {
    Nf,
    Np,
    M,
}

/// Snaps (α_f, α_p) onto the boundary and picks the branch whose formulas are
/// evaluated there.
fn branch_for(regime: Regime, af: f64, ap: f64) -> (Branch, f64, f64) {
    match regime {
        Regime::NfSmallest => (Branch::Nf, af, ap),
        Regime::NpSmallest => (Branch::Np, af, ap),
        Regime::MSmallest => (Branch::M, af, ap),
        Regime::Boundary(Boundary::NpEqualsM) => (Branch::Np, af, 1.0),
        Regime::Boundary(Boundary::NfEqualsM) => (Branch::Nf, 1.0, ap),
        Regime::Boundary(Boundary::NfEqualsNp) => {
            let a = 0.5 * (af + ap);
            (Branch::Nf, a, a)
        }
        Regime::Boundary(Boundary::AllEqual) => (Branch::Nf, 1.0, 1.0),
    }
}

fn r(num: f64, den: f64) -> Value {
    Value::ratio(num, den)
}

/// Ridge-less train/test/bias²/variance, squared averages and covariances.
///
/// λ in `cfg` is ignored. On a boundary, divergent quantities come back as
/// [`Value::Divergent`] and finite ones are the common limit of both sides.
pub fn closed_form(cfg: &ModelConfig) -> TheoryResult {
    let regime = classify(cfg.alpha_f, cfg.alpha_p, BOUNDARY_TOL);
    let (branch, af, ap) = branch_for(regime, cfg.alpha_f, cfg.alpha_p);

    let sb = cfg.sigma_beta2;
    let sx = cfg.sigma_x2;
    let sw = cfg.sigma_w2;
    let sdy = cfg.sigma_dy2();
    let n = cfg.effective_noise();
    let sbx = sb * sx;

    let mut out = match branch {
        Branch::Nf => {
            let d = ap - af;
            TheoryResult {
                regime,
                train_error: Value::from(n * (1.0 - af)),
                test_error: n * r(1.0, 1.0 - af),
                bias2: Value::from(sdy),
                variance: n * r(af, 1.0 - af),
                w2: sb / sw * r(af, d) + n / (sw * sx) * r(af * af, (1.0 - af) * d),
                u2: Value::ZERO,
                dy2: Value::from(n * (1.0 - af)),
                dbeta2: n / sx * r(af, 1.0 - af),
                cov_w: sb / sw * r(af, d),
                cov_u: Value::ZERO,
                cov_dbeta: Value::ZERO,
                sigma_dy2: sdy,
                u2_lambda2: Some(
                    sb * sx * sx * r(ap.powi(3), d.powi(3)) + sx * n * r(af * ap.powi(3), (1.0 - af) * d.powi(3)),
                ),
                dy2_lambda2: None,
                cov_u_lambda2: Some(sb * sx * sx * r(ap.powi(3), d.powi(3))),
                cov_dbeta_lambda2: Some(sb * r(af * af * ap.powi(3), (1.0 - af).powi(2) * d.powi(3))),
                susceptibilities: susceptibilities(branch, af, ap, sx, sw),
            }
        }
        Branch::Np => {
            let d = af - ap;
            let q = 1.0 - ap;
            TheoryResult {
                regime,
                train_error: Value::from(sbx * q * d / af + n * q),
                test_error: sbx * r(d, af * q) + n * r(1.0, q),
                bias2: Value::from(sbx * d / af + sdy),
                variance: sbx * r(ap * d, af * q) + n * r(ap, q),
                w2: sb / sw * r(ap * (q + d), q * d) + n / (sw * sx) * r(af * ap, q * d),
                u2: Value::from(sb * sx * sx * q * d * (q + d) / af.powi(3) + sx * n * q * d / (af * af)),
                dy2: Value::from(sbx * q * d / af + n * q),
                dbeta2: sb * r(d, af * q) + n / sx * r(ap, q),
                cov_w: sb / sw * r(ap, d),
                cov_u: Value::from(sb * sx * sx * q * q * d / af.powi(3)),
                cov_dbeta: Value::from(sb * d / af),
                sigma_dy2: sdy,
                u2_lambda2: None,
                dy2_lambda2: None,
                cov_u_lambda2: None,
                cov_dbeta_lambda2: None,
                susceptibilities: susceptibilities(branch, af, ap, sx, sw),
            }
        }
        Branch::M => {
            let f1 = af - 1.0;
            let p1 = ap - 1.0;
            let fp1 = af * ap - 1.0;
            TheoryResult {
                regime,
                train_error: Value::ZERO,
                test_error: sbx * r(ap * f1, af * p1) + n * r(fp1, f1 * p1),
                bias2: sbx * r(ap * f1 * f1, af * fp1) + sdy,
                variance: sbx * r(ap * f1 * (f1 + p1), af * p1 * fp1) + n * r(f1 + p1, f1 * p1),
                w2: sb / sw * r(1.0, p1) + n / (sw * sx) * r(af, f1 * p1),
                u2: Value::ZERO,
                dy2: Value::ZERO,
                dbeta2: sb * r(ap * f1, af * p1) + n / sx * r(f1 + p1, f1 * p1),
                cov_w: sb / sw * r(1.0, fp1),
                cov_u: Value::ZERO,
                cov_dbeta: sb * r(ap * f1 * f1, af * fp1),
                sigma_dy2: sdy,
                u2_lambda2: Some(sb * sx * sx * r(ap.powi(3), af * p1.powi(3)) + sx * n * r(ap.powi(3), f1 * p1.powi(3))),
                dy2_lambda2: Some(
                    sbx * r(af * ap.powi(3), f1 * p1.powi(3))
                        + n * r(af * af * ap * ap * fp1, f1.powi(3) * p1.powi(3)),
                ),
                cov_u_lambda2: Some(sb * sx * sx * r(ap.powi(3), af * p1 * p1 * fp1)),
                cov_dbeta_lambda2: None,
                susceptibilities: susceptibilities(branch, af, ap, sx, sw),
            }
        }
    };

    if regime.is_boundary() {
        for field in [
            &mut out.u2_lambda2,
            &mut out.dy2_lambda2,
            &mut out.cov_u_lambda2,
            &mut out.cov_dbeta_lambda2,
        ] {
            *field = Some(Value::Divergent);
        }
    }
    if regime == Regime::Boundary(Boundary::AllEqual) {
        // one-sided limits disagree at the triple point
        out.test_error = Value::Divergent;
        out.variance = Value::Divergent;
        out.w2 = Value::Divergent;
        out.dbeta2 = Value::Divergent;
    }
    out
}

fn susceptibilities(branch: Branch, af: f64, ap: f64, sx: f64, sw: f64) -> RidgelessSusceptibilities {
    let s = sw * sx;
    let v = Value::from;
    // dimensionless (bar) coefficients, converted below
    let (chi, nu_bar, kappa, omega_bar, phi_bar) = match branch {
        Branch::Nf => (
            (v(1.0 - af), r(af * af * ap, (af - 1.0) * (af - ap))),
            (v((ap - af) / ap), r(af * af, (af - 1.0) * (af - ap))),
            (Value::ZERO, r(af * ap, (af - 1.0) * (af - ap))),
            (Value::ZERO, r(ap, ap - af)),
            (Value::ZERO, r(af, af - 1.0)),
        ),
        Branch::Np => (
            (v(1.0 - ap), r(-af * ap * ap, (af - ap) * (ap - 1.0))),
            (Value::ZERO, r(-af * ap, (af - ap) * (ap - 1.0))),
            (v((af - ap) / af), r(-ap * ap, (af - ap) * (ap - 1.0))),
            (
                v((af - ap) * (1.0 - ap) / (af * af)),
                r(-ap * ap * (af - 2.0 * ap + 1.0), af * (af - ap) * (ap - 1.0)),
            ),
            (Value::ZERO, r(ap, ap - 1.0)),
        ),
        Branch::M => (
            (Value::ZERO, r(af * ap, (af - 1.0) * (ap - 1.0))),
            (v((ap - 1.0) / ap), r(af, (af - 1.0) * (ap - 1.0))),
            (v((af - 1.0) / af), r(ap, (af - 1.0) * (ap - 1.0))),
            (Value::ZERO, r(ap, af * (ap - 1.0))),
            (
                v(-(af - 1.0) * (ap - 1.0) / (af * ap)),
                r(-(af + ap - 2.0), (af - 1.0) * (ap - 1.0)),
            ),
        ),
    };
    RidgelessSusceptibilities {
        chi: Taylor { coef_0: chi.0, coef_1: chi.1 },
        nu: Laurent { coef_minus1: nu_bar.0 / s, coef_0: nu_bar.1 / s },
        kappa: Taylor { coef_0: kappa.0, coef_1: kappa.1 },
        omega: Taylor { coef_0: sx * omega_bar.0, coef_1: sx * omega_bar.1 },
        phi: Laurent { coef_minus1: phi_bar.0 / sx, coef_0: phi_bar.1 / sx },
    }
}

/// Coefficients of ν ≈ ν₋₁/λ + ν₀ (dimensionful λ).
///
/// ν₋₁ is the fraction of zero eigenvalues of ZᵀZ; ν₀ diverges on every
/// phase boundary.
pub fn nu_coefficients(cfg: &ModelConfig) -> (f64, Value) {
    let (af, ap) = (cfg.alpha_f, cfg.alpha_p);
    let nu_minus1 = crate::spectrum::zero_fraction(af, ap);
    let regime = classify(af, ap, BOUNDARY_TOL);
    if regime.is_boundary() {
        return (nu_minus1, Value::Divergent);
    }
    let s = cfg.sigma_w2 * cfg.sigma_x2;
    let nu_0 = match regime {
        Regime::NfSmallest => r(af * af, (1.0 - af) * (ap - af)),
        Regime::NpSmallest => r(af * ap, (1.0 - ap) * (af - ap)),
        _ => r(af, (af - 1.0) * (ap - 1.0)),
    };
    (nu_minus1, nu_0 / s)
}

use num_complex::Complex64;

/// Coefficients of the monic cubic in u = α_pλ̄ν̄ at real λ̄, with the
/// discriminant intermediates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCoeffs {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub q: f64,
    pub r: f64,
    pub d: f64,
}

impl CubicCoeffs {
    pub fn new(alpha_f: f64, alpha_p: f64, lambda_bar: f64) -> Self {
        let [a2, a1, a0] = nu_cubic(alpha_f, alpha_p, Complex64::new(lambda_bar, 0.0)).map(|c| c.re);
        let q = (a2 * a2 - 3.0 * a1) / 9.0;
        let r = (9.0 * a2 * a1 - 27.0 * a0 - 2.0 * a2 * a2 * a2) / 54.0;
        CubicCoeffs { a0, a1, a2, q, r, d: r * r - q * q * q }
    }
}

/// (a2, a1, a0) of u³ + a2u² + a1u + a0 = 0 with u = α_pλ̄ν̄.
pub(crate) fn nu_cubic(af: f64, ap: f64, lb: Complex64) -> [Complex64; 3] {
    let a2 = Complex64::new(1.0 - ap + af - ap, 0.0);
    let a1 = (1.0 - ap) * (af - ap) + af * ap * lb;
    let a0 = -af * ap * ap * lb;
    [a2, a1, a0]
}

pub(crate) fn eval(c: [Complex64; 3], u: Complex64) -> Complex64 {
    ((u + c[0]) * u + c[1]) * u + c[2]
}

/// |p(u)| relative to the magnitude of its terms.
pub(crate) fn scaled_residual(c: [Complex64; 3], u: Complex64) -> f64 {
    let n = u.norm();
    let size = n * n * n + c[0].norm() * n * n + c[1].norm() * n + c[2].norm();
    if size == 0.0 {
        0.0
    } else {
        eval(c, u).norm() / size
    }
}

/// All three roots of a monic complex cubic (Cardano, then Newton polish).
pub(crate) fn roots(c: [Complex64; 3]) -> [Complex64; 3] {
    let [a, b, cc] = c;
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + cc;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let s1 = -q / 2.0 + disc;
    let s2 = -q / 2.0 - disc;
    let s = if s1.norm() >= s2.norm() { s1 } else { s2 };
    let unit = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
    let mut out = [Complex64::new(0.0, 0.0); 3];
    if s.norm() == 0.0 {
        out = [-shift; 3];
    } else {
        let mut cr = s.cbrt();
        for root in out.iter_mut() {
            *root = cr - p / (3.0 * cr) - shift;
            cr *= unit;
        }
    }
    for root in out.iter_mut() {
        for _ in 0..3 {
            let f = eval(c, *root);
            let df = (3.0 * *root + 2.0 * a) * *root + b;
            if df.norm() == 0.0 {
                break;
            }
            let next = *root - f / df;
            if eval(c, next).norm() < f.norm() {
                *root = next;
            } else {
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_known_roots() {
        let z = [Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.0), Complex64::new(3.0, -1e-8)];
        // expand (u − z0)(u − z1)(u − z2)
        let a2 = -(z[0] + z[1] + z[2]);
        let a1 = z[0] * z[1] + z[0] * z[2] + z[1] * z[2];
        let a0 = -(z[0] * z[1] * z[2]);
        let mut got = roots([a2, a1, a0]);
        got.sort_by(|x, y| x.re.total_cmp(&y.re));
        let mut want = z;
        want.sort_by(|x, y| x.re.total_cmp(&y.re));
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < 1e-12, "{g} vs {w}");
        }
    }

    #[test]
    fn triple_and_double_roots() {
        // (u − 2)³
        let r = roots([Complex64::new(-6.0, 0.0), Complex64::new(12.0, 0.0), Complex64::new(-8.0, 0.0)]);
        for x in r {
            assert!((x - 2.0).norm() < 1e-4);
        }
        // u(u − 1)²
        let c = [Complex64::new(-2.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        for x in roots(c) {
            assert!(scaled_residual(c, x) < 1e-12);
        }
    }

    #[test]
    fn discriminant_intermediates() {
        let c = CubicCoeffs::new(4.0, 2.0, -1.5);
        assert!((c.q - (c.a2 * c.a2 - 3.0 * c.a1) / 9.0).abs() < 1e-15);
        assert!((c.d - (c.r * c.r - c.q.powi(3))).abs() < 1e-12);
        // u-cubic is the χ cubic shifted by χ = u − α_p + 1
        let chi = crate::theory::chi_cubic(4.0, 2.0, -1.5);
        for u in [-0.7, 0.2, 1.9] {
            let lhs = eval(nu_cubic(4.0, 2.0, Complex64::new(-1.5, 0.0)), Complex64::new(u, 0.0)).re;
            let rhs = crate::theory::eval_cubic(chi, u - 2.0 + 1.0);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}

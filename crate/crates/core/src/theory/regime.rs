use std::fmt;

/// Gap below which a point counts as lying on a phase boundary.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Which of M, N_f, N_p is smallest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    NfSmallest,
    NpSmallest,
    MSmallest,
    Boundary(Boundary),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// α_p = 1 with α_f ≥ 1 (interpolation threshold).
    NpEqualsM,
    /// α_f = 1 with α_p ≥ 1.
    NfEqualsM,
    /// α_f = α_p with both ≤ 1 (large/minimal bias transition).
    NfEqualsNp,
    /// α_f = α_p = 1.
    AllEqual,
}

impl Regime {
    pub fn is_boundary(self) -> bool {
        matches!(self, Regime::Boundary(_))
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::NfSmallest => f.write_str("nf_smallest"),
            Regime::NpSmallest => f.write_str("np_smallest"),
            Regime::MSmallest => f.write_str("m_smallest"),
            Regime::Boundary(Boundary::NpEqualsM) => f.write_str("boundary_np_eq_m"),
            Regime::Boundary(Boundary::NfEqualsM) => f.write_str("boundary_nf_eq_m"),
            Regime::Boundary(Boundary::NfEqualsNp) => f.write_str("boundary_nf_eq_np"),
            Regime::Boundary(Boundary::AllEqual) => f.write_str("boundary_triple"),
        }
    }
}

/// Classifies (α_f, α_p); a point is on a boundary when the two smallest of
/// {α_f, α_p, 1} are within `tol` of each other.
pub fn classify(alpha_f: f64, alpha_p: f64, tol: f64) -> Regime {
    let gap_f = (alpha_f - 1.0).abs();
    let gap_p = (alpha_p - 1.0).abs();
    let gap_fp = (alpha_f - alpha_p).abs();
    if gap_f < tol && gap_p < tol {
        return Regime::Boundary(Boundary::AllEqual);
    }
    if alpha_f < alpha_p.min(1.0) {
        // N_f smallest unless tied with the runner-up
        if gap_fp < tol {
            Regime::Boundary(Boundary::NfEqualsNp)
        } else if gap_f < tol {
            Regime::Boundary(Boundary::NfEqualsM)
        } else {
            Regime::NfSmallest
        }
    } else if alpha_p < alpha_f.min(1.0) {
        if gap_fp < tol {
            Regime::Boundary(Boundary::NfEqualsNp)
        } else if gap_p < tol {
            Regime::Boundary(Boundary::NpEqualsM)
        } else {
            Regime::NpSmallest
        }
    } else if gap_f < tol {
        Regime::Boundary(Boundary::NfEqualsM)
    } else if gap_p < tol {
        Regime::Boundary(Boundary::NpEqualsM)
    } else if alpha_f == alpha_p && alpha_f < 1.0 {
        Regime::Boundary(Boundary::NfEqualsNp)
    } else {
        Regime::MSmallest
    }
}

//! Scalars that can be marked divergent.
//!
//! Closed-form expressions have simple poles on phase boundaries. Rather than
//! letting a float division produce `inf` or `NaN`, an exact zero denominator
//! yields [`Value::Divergent`], which then propagates through arithmetic.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Finite(f64),
    Divergent,
}

impl Value {
    pub const ZERO: Value = Value::Finite(0.0);

    pub fn finite(self) -> Option<f64> {
        match self {
            Value::Finite(v) => Some(v),
            Value::Divergent => None,
        }
    }

    pub fn is_divergent(self) -> bool {
        matches!(self, Value::Divergent)
    }

    /// Returns the finite value, panicking on `Divergent`.
    #[track_caller]
    pub fn unwrap(self) -> f64 {
        match self {
            Value::Finite(v) => v,
            Value::Divergent => panic!("called `Value::unwrap` on a divergent value"),
        }
    }

    /// `num / den`, divergent when `den` is exactly zero.
    pub fn ratio(num: f64, den: f64) -> Value {
        Value::Finite(num) / Value::Finite(den)
    }

    /// Lossy conversion for plotting and numeric comparison.
    pub fn to_f64(self) -> f64 {
        match self {
            Value::Finite(v) => v,
            Value::Divergent => f64::INFINITY,
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Finite(v)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Finite(v) => write!(f, "{v:?}"),
            Value::Divergent => f.write_str("inf"),
        }
    }
}

impl Add for Value {
    type Output = Value;
    fn add(self, rhs: Value) -> Value {
        match (self, rhs) {
            (Value::Finite(a), Value::Finite(b)) => Value::Finite(a + b),
            _ => Value::Divergent,
        }
    }
}

impl Sub for Value {
    type Output = Value;
    fn sub(self, rhs: Value) -> Value {
        match (self, rhs) {
            (Value::Finite(a), Value::Finite(b)) => Value::Finite(a - b),
            _ => Value::Divergent,
        }
    }
}

impl Mul for Value {
    type Output = Value;
    // An exactly vanishing prefactor removes the term it multiplies, so 0 · Divergent = 0.
    fn mul(self, rhs: Value) -> Value {
        match (self, rhs) {
            (Value::Finite(a), Value::Finite(b)) => Value::Finite(a * b),
            (Value::Finite(z), Value::Divergent) | (Value::Divergent, Value::Finite(z)) if z == 0.0 => {
                Value::ZERO
            }
            _ => Value::Divergent,
        }
    }
}

impl Div for Value {
    type Output = Value;
    fn div(self, rhs: Value) -> Value {
        match (self, rhs) {
            (Value::Finite(_), Value::Finite(b)) if b == 0.0 => Value::Divergent,
            (Value::Finite(a), Value::Finite(b)) => Value::Finite(a / b),
            (Value::Finite(_), Value::Divergent) => Value::ZERO,
            (Value::Divergent, _) => Value::Divergent,
        }
    }
}

impl Neg for Value {
    type Output = Value;
    fn neg(self) -> Value {
        match self {
            Value::Finite(a) => Value::Finite(-a),
            Value::Divergent => Value::Divergent,
        }
    }
}

macro_rules! mixed_ops {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<f64> for Value {
            type Output = Value;
            fn $method(self, rhs: f64) -> Value {
                $tr::$method(self, Value::Finite(rhs))
            }
        }
        impl $tr<Value> for f64 {
            type Output = Value;
            fn $method(self, rhs: Value) -> Value {
                $tr::$method(Value::Finite(self), rhs)
            }
        }
    )*};
}

mixed_ops!(Add add, Sub sub, Mul mul, Div div);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_denominator_is_divergent() {
        assert_eq!(Value::ratio(1.0, 0.0), Value::Divergent);
        assert_eq!(Value::ratio(0.0, 0.0), Value::Divergent);
        assert_eq!(Value::ratio(3.0, 2.0), Value::Finite(1.5));
    }

    #[test]
    fn divergence_propagates() {
        let d = Value::Divergent;
        assert!((d + 1.0).is_divergent());
        assert!((1.0 - d).is_divergent());
        assert!((2.0 * d).is_divergent());
        assert!((-d).is_divergent());
        assert_eq!(0.0 * d, Value::ZERO);
        assert_eq!(1.0 / d, Value::ZERO);
    }

    #[test]
    fn display_tokens() {
        assert_eq!(Value::Divergent.to_string(), "inf");
        assert_eq!(Value::Finite(0.1).to_string(), "0.1");
        assert_eq!(Value::Finite(1e-300).to_string(), "1e-300");
    }
}

//! Nonnegative extended reals, the codomain of Φ, Φ* and of modulars.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A value in `[0, ∞]`.
///
/// Infinity is an explicit tag; the finite payload is never NaN, never an
/// IEEE infinity and never negative. Scaling follows the integration
/// convention `0 · ∞ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

pub use ExtReal::{Finite, Infinite};

impl ExtReal {
    pub const ZERO: ExtReal = Finite(0.0);

    /// Builds a value from an `f64`. `+inf` maps to `Infinite`; NaN and
    /// negative inputs are rejected. Values in `[-1e-300, 0)` are treated as
    /// rounding noise and clamped to zero.
    pub fn new(x: f64) -> Option<ExtReal> {
        if x.is_nan() {
            None
        } else if x == f64::INFINITY {
            Some(Infinite)
        } else if x >= 0.0 {
            Some(Finite(x))
        } else if x >= -1e-300 {
            Some(Finite(0.0))
        } else {
            None
        }
    }

    /// Like [`ExtReal::new`] but clamps small negative rounding residue
    /// (anything `>= -tol`) to zero.
    pub fn from_clamped(x: f64, tol: f64) -> Option<ExtReal> {
        if x < 0.0 && x >= -tol {
            Some(Finite(0.0))
        } else {
            ExtReal::new(x)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        !self.is_finite()
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Finite(x) => Some(x),
            Infinite => None,
        }
    }

    /// Lossy view for display and for code that already handled the
    /// infinite case.
    pub fn to_f64(self) -> f64 {
        match self {
            Finite(x) => x,
            Infinite => f64::INFINITY,
        }
    }

    /// `c · self` for `c >= 0`, with `0 · ∞ = 0`.
    pub fn scale(self, c: f64) -> ExtReal {
        debug_assert!(c >= 0.0 && !c.is_nan());
        match self {
            _ if c == 0.0 => Finite(0.0),
            Finite(x) => ExtReal::new(c * x).unwrap_or(Infinite),
            Infinite => Infinite,
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// `self <= x` for a plain real threshold.
    pub fn le(self, x: f64) -> bool {
        matches!(self, Finite(v) if v <= x)
    }

    pub fn lt(self, x: f64) -> bool {
        matches!(self, Finite(v) if v < x)
    }
}

impl Default for ExtReal {
    fn default() -> Self {
        ExtReal::ZERO
    }
}

impl From<f64> for ExtReal {
    /// Panics on NaN or negative input.
    fn from(x: f64) -> Self {
        ExtReal::new(x).unwrap_or_else(|| panic!("invalid extended real {x}"))
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Finite(a), Finite(b)) => a.partial_cmp(b),
            (Finite(_), Infinite) => Some(Ordering::Less),
            (Infinite, Finite(_)) => Some(Ordering::Greater),
            (Infinite, Infinite) => Some(Ordering::Equal),
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (Finite(a), Finite(b)) => ExtReal::new(a + b).unwrap_or(Infinite),
            _ => Infinite,
        }
    }
}

impl AddAssign for ExtReal {
    fn add_assign(&mut self, rhs: ExtReal) {
        *self = *self + rhs;
    }
}

impl std::iter::Sum for ExtReal {
    fn sum<I: Iterator<Item = ExtReal>>(iter: I) -> ExtReal {
        iter.fold(ExtReal::ZERO, |acc, x| acc + x)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finite(x) => fmt::Display::fmt(x, f),
            Infinite => f.write_str("inf"),
        }
    }
}

// JSON has no infinity literal: `Infinite` is the string "inf".
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Finite(x) => s.serialize_f64(*x),
            Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => {
                ExtReal::new(x).ok_or_else(|| serde::de::Error::custom("negative or NaN value"))
            }
            Raw::Str(s) if s == "inf" => Ok(Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_times_infinity_is_zero() {
        assert_eq!(Infinite.scale(0.0), Finite(0.0));
        assert_eq!(Infinite.scale(0.5), Infinite);
        assert_eq!(Finite(2.0).scale(0.25), Finite(0.5));
    }

    #[test]
    fn addition_absorbs_infinity() {
        assert_eq!(Finite(1.0) + Infinite, Infinite);
        assert_eq!(Finite(1.0) + Finite(2.5), Finite(3.5));
        let s: ExtReal = [Finite(1.0), Finite(2.0), Infinite].into_iter().sum();
        assert_eq!(s, Infinite);
    }

    #[test]
    fn ordering_puts_infinity_last() {
        assert!(Finite(1e300) < Infinite);
        assert!(Infinite <= Infinite);
        assert!(Finite(1.0).le(1.0));
        assert!(!Infinite.le(1e300));
    }

    #[test]
    fn rejects_nan_and_negative() {
        assert!(ExtReal::new(f64::NAN).is_none());
        assert!(ExtReal::new(-1.0).is_none());
        assert_eq!(ExtReal::new(f64::INFINITY), Some(Infinite));
        assert_eq!(ExtReal::from_clamped(-1e-14, 1e-12), Some(Finite(0.0)));
    }

    #[test]
    fn json_uses_inf_string() {
        let v = vec![Finite(0.5), Infinite];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"[0.5,"inf"]"#);
        let back: Vec<ExtReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}

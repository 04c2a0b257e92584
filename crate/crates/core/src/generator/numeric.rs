//! User-supplied generators given only by point evaluations.
//!
//! These carry no closed forms: derivatives come from Richardson-extrapolated
//! one-sided difference quotients and the bounds `a_Φ`, `b_Φ` from bisection.
//! Results are flagged as numeric in the capability metadata.

use std::fmt;
use std::sync::Arc;

use crate::ext::ExtReal;
use crate::search;

type Eval = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// `(t, u) ↦ Φ(t, u)`. Returning `f64::INFINITY` marks points outside the
/// effective domain.
#[derive(Clone)]
pub struct NumericFn {
    name: String,
    f: Arc<Eval>,
}

impl NumericFn {
    pub fn new(name: impl Into<String>, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        NumericFn { name: name.into(), f: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub(crate) fn call(&self, t: f64, u: f64) -> ExtReal {
        let x = (self.f)(t, u);
        if x.is_nan() {
            ExtReal::Infinite
        } else {
            ExtReal::from_clamped(x, 1e-12).unwrap_or(ExtReal::ZERO)
        }
    }
}

impl fmt::Debug for NumericFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumericFn({})", self.name)
    }
}

impl PartialEq for NumericFn {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.f, &other.f)
    }
}

/// A numeric generator frozen at one coordinate, with its bounds cached.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericSection {
    func: NumericFn,
    t: f64,
    zero_level: f64,
    cap: ExtReal,
}

const H0: f64 = 1e-4;
const RICHARDSON_STEPS: usize = 6;

impl NumericSection {
    pub(crate) fn new(func: NumericFn, t: f64) -> Self {
        let phi = |u: f64| func.call(t, u);
        let cap = match search::bracket_from_one("b_Φ", |x| phi(x).is_infinite()) {
            Ok(b) => {
                let b = search::bisect(b, 1e-14, |x| phi(x).is_infinite());
                // lower semicontinuity: the boundary point belongs to the domain
                // whenever the value there is finite
                ExtReal::Finite(if phi(b.hi).is_finite() { b.hi } else { b.lo })
            }
            Err(_) if phi(f64::MIN_POSITIVE).is_infinite() => ExtReal::ZERO,
            Err(_) => ExtReal::Infinite,
        };
        let positive = |x: f64| phi(x) > ExtReal::ZERO;
        let zero_level = match search::bracket_from_one("a_Φ", positive) {
            Ok(b) => search::bisect(b, 1e-14, positive).lo,
            Err(_) => 0.0,
        };
        NumericSection { func, t, zero_level, cap }
    }

    pub fn value(&self, u: f64) -> ExtReal {
        if let ExtReal::Finite(b) = self.cap {
            if u > b {
                return ExtReal::Infinite;
            }
        }
        self.func.call(self.t, u)
    }

    pub fn zero_level(&self) -> f64 {
        self.zero_level
    }

    pub fn cap(&self) -> ExtReal {
        self.cap
    }

    fn finite(&self, u: f64) -> f64 {
        self.value(u).to_f64()
    }

    /// Richardson extrapolation of the one-sided quotient with steps
    /// `h_j = h0 · 2^{-j}`, stopping where successive estimates stop improving.
    fn richardson(&self, u: f64, h0: f64, forward: bool) -> f64 {
        let q = |h: f64| {
            if forward {
                (self.finite(u + h) - self.finite(u)) / h
            } else {
                (self.finite(u) - self.finite(u - h)) / h
            }
        };
        let mut h = h0;
        let mut prev = q(h);
        let mut best = prev;
        let mut best_change = f64::INFINITY;
        let mut last_extrap: Option<f64> = None;
        for _ in 0..RICHARDSON_STEPS {
            h *= 0.5;
            let cur = q(h);
            let extrap = 2.0 * cur - prev;
            if let Some(le) = last_extrap {
                let change = (extrap - le).abs();
                if change < best_change {
                    best_change = change;
                    best = extrap;
                }
            } else {
                best = extrap;
            }
            last_extrap = Some(extrap);
            prev = cur;
        }
        best.max(0.0)
    }

    pub fn dminus(&self, u: f64) -> ExtReal {
        if u <= 0.0 {
            return ExtReal::ZERO;
        }
        if let ExtReal::Finite(b) = self.cap {
            if u > b {
                return ExtReal::Infinite;
            }
        }
        ExtReal::new(self.richardson(u, H0.min(0.5 * u), false)).unwrap_or(ExtReal::Infinite)
    }

    pub fn dplus(&self, u: f64) -> ExtReal {
        let mut h = H0;
        if let ExtReal::Finite(b) = self.cap {
            if u >= b {
                return ExtReal::Infinite;
            }
            h = h.min(0.5 * (b - u));
        }
        ExtReal::new(self.richardson(u, h, true)).unwrap_or(ExtReal::Infinite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_quadratic_matches_closed_form() {
        let s = NumericSection::new(NumericFn::new("half-square", |_, u| 0.5 * u * u), 0.0);
        assert_eq!(s.cap(), ExtReal::Infinite);
        assert_eq!(s.zero_level(), 0.0);
        for u in [0.3, 1.0, 2.5] {
            assert!((s.dplus(u).to_f64() - u).abs() < 1e-8);
            assert!((s.dminus(u).to_f64() - u).abs() < 1e-8);
        }
    }

    #[test]
    fn numeric_bounds_found_by_bisection() {
        // zero up to 0.5, linear after, infinite past 3
        let f = NumericFn::new("clip", |_, u| if u > 3.0 { f64::INFINITY } else { (u - 0.5).max(0.0) });
        let s = NumericSection::new(f, 0.0);
        assert!((s.cap().to_f64() - 3.0).abs() < 1e-12);
        assert!((s.zero_level() - 0.5).abs() < 1e-12);
        assert_eq!(s.dplus(3.0), ExtReal::Infinite);
    }
}

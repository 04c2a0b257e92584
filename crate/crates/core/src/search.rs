//! One-dimensional search primitives shared by the norm and conjugate code.

use crate::error::{Error, Result};

/// Maximum number of doublings/halvings when bracketing.
pub const MAX_DOUBLINGS: usize = 200;

const MAX_BISECTIONS: usize = 400;

/// Bracket of a monotone predicate on `(0, ∞)`: `pred(lo) == false`,
/// `pred(hi) == true`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Finds a bracket for a predicate that is false near 0 and true for large
/// arguments, starting at `x = 1` and doubling or halving.
pub fn bracket_from_one(what: &str, mut pred: impl FnMut(f64) -> bool) -> Result<Bracket> {
    let mut x = 1.0_f64;
    if pred(x) {
        for _ in 0..MAX_DOUBLINGS {
            let lo = 0.5 * x;
            if !pred(lo) {
                return Ok(Bracket { lo, hi: x });
            }
            x = lo;
        }
        Err(Error::Bracket(format!("{what}: predicate still true at {x:e}")))
    } else {
        for _ in 0..MAX_DOUBLINGS {
            let hi = 2.0 * x;
            if pred(hi) {
                return Ok(Bracket { lo: x, hi });
            }
            x = hi;
        }
        Err(Error::Bracket(format!("{what}: predicate still false at {x:e}")))
    }
}

/// Shrinks `b` (with `pred(lo) == false`, `pred(hi) == true`) until its
/// width is at most `rel_tol · hi`, or until floating point stops making
/// progress.
pub fn bisect(mut b: Bracket, rel_tol: f64, mut pred: impl FnMut(f64) -> bool) -> Bracket {
    for _ in 0..MAX_BISECTIONS {
        if b.width() <= rel_tol * b.hi.abs() {
            break;
        }
        let m = b.mid();
        if m <= b.lo || m >= b.hi {
            break;
        }
        if pred(m) {
            b.hi = m;
        } else {
            b.lo = m;
        }
    }
    b
}

/// Golden-section maximisation of a unimodal function on `[lo, hi]`. The
/// endpoints are evaluated too, so a maximum attained at the boundary is
/// not missed. Returns the best point seen.
pub fn golden_section_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, rel_tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut best = (lo, f(lo));
    let fh = f(hi);
    if fh > best.1 {
        best = (hi, fh);
    }
    let scale = hi.abs().max(lo.abs()).max(f64::MIN_POSITIVE);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > rel_tol * scale {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if c >= d {
            break;
        }
    }
    for (x, fx) in [(c, fc), (d, fd)] {
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brackets_in_both_directions() {
        let b = bracket_from_one("t", |x| x >= 37.0).unwrap();
        assert!(b.lo < 37.0 && b.hi >= 37.0);
        let b = bracket_from_one("t", |x| x >= 0.003).unwrap();
        assert!(b.lo < 0.003 && b.hi >= 0.003);
        assert!(bracket_from_one("t", |_| false).is_err());
    }

    #[test]
    fn bisection_hits_threshold() {
        let b = bracket_from_one("t", |x| x * x >= 2.0).unwrap();
        let b = bisect(b, 1e-12, |x| x * x >= 2.0);
        assert!((b.hi - 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn golden_section_finds_interior_and_boundary_maxima() {
        let (x, fx) = golden_section_max(|u| 3.0 * u - u * u, 0.0, 10.0, 1e-12);
        assert!((x - 1.5).abs() < 1e-6 && (fx - 2.25).abs() < 1e-12);
        let (x, _) = golden_section_max(|u| u, 0.0, 4.0, 1e-10);
        assert_eq!(x, 4.0);
    }
}

//! `Φ(t, ·)` at a fixed atom: values, one-sided derivatives, bounds and
//! closed-form conjugates.

use std::sync::Arc;

use crate::ext::{ExtReal, Finite, Infinite};
use crate::search;

use super::graph::SubdiffGraph;
use super::numeric::NumericSection;

/// Relative tolerance of the golden-section search in numeric conjugates.
pub const CONJUGATE_REL_TOL: f64 = 1e-10;

/// Threshold above which a running supremum is declared infinite.
const DIVERGENCE_LIMIT: f64 = 1e12;

/// One-variable section of a Musielak–Orlicz function.
#[derive(Debug, Clone, PartialEq)]
pub enum Section {
    /// `c · u^p`, `p > 1`.
    ScaledPower { c: f64, p: f64 },
    /// `e^u - 1 - u`.
    ExpMinusOne,
    /// `(1 + v) ln(1 + v) - v`, the conjugate of [`Section::ExpMinusOne`].
    ExpConjugate,
    /// `s · u`.
    Linear { slope: f64 },
    /// `0` on `[0, c]`, `∞` after.
    Indicator { c: f64 },
    Graph(Arc<SubdiffGraph>),
    /// `∫_0^u min(Φ'₋(x), n) dx`; `knee = sup{x : Φ'₋(x) <= n}`.
    Truncated { base: Box<Section>, n: f64, knee: ExtReal },
    /// Legendre–Fenchel transform evaluated numerically.
    Conjugate(Box<ConjugateSection>),
    Numeric(NumericSection),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateSection {
    base: Section,
    /// `a_{Φ*} = Φ'₊(0)`.
    zero_level: f64,
    /// `b_{Φ*}`: slope of Φ at infinity.
    cap: ExtReal,
}

fn series_exp_m1_minus_id(u: f64) -> f64 {
    // Σ_{k>=2} u^k / k!
    let mut term = u * u / 2.0;
    let mut sum = term;
    for k in 3..20 {
        term *= u / k as f64;
        sum += term;
    }
    sum
}

fn series_entropy(v: f64) -> f64 {
    // (1+v) ln(1+v) - v = Σ_{k>=2} (-1)^k v^k / (k(k-1))
    let mut pow = v * v;
    let mut sum = 0.0;
    for k in 2..30 {
        let kf = k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * pow / (kf * (kf - 1.0));
        pow *= v;
    }
    sum
}

fn ext(x: f64) -> ExtReal {
    ExtReal::new(x).unwrap_or(Infinite)
}

impl Section {
    /// `Φ(u)` for `u >= 0`.
    pub fn value(&self, u: f64) -> ExtReal {
        debug_assert!(u >= 0.0);
        match self {
            Section::ScaledPower { c, p } => ext(c * u.powf(*p)),
            Section::ExpMinusOne => {
                if u < 0.1 {
                    Finite(series_exp_m1_minus_id(u))
                } else {
                    ext(u.exp_m1() - u)
                }
            }
            Section::ExpConjugate => {
                if u < 0.1 {
                    Finite(series_entropy(u).max(0.0))
                } else {
                    ext((1.0 + u) * u.ln_1p() - u)
                }
            }
            Section::Linear { slope } => ext(slope * u),
            Section::Indicator { c } => {
                if u <= *c {
                    Finite(0.0)
                } else {
                    Infinite
                }
            }
            Section::Graph(g) => g.value(u),
            Section::Truncated { base, n, knee } => match knee {
                Finite(k) if u > *k => base.value(*k) + ext(n * (u - k)),
                _ => base.value(u),
            },
            Section::Conjugate(c) => c.value(u),
            Section::Numeric(s) => s.value(u),
        }
    }

    /// `Φ'₋(u)`, with `Φ'₋(0) = 0` and `∞` beyond the effective domain.
    pub fn dminus(&self, u: f64) -> ExtReal {
        if u <= 0.0 {
            return Finite(0.0);
        }
        match self {
            Section::ScaledPower { c, p } => ext(c * p * u.powf(p - 1.0)),
            Section::ExpMinusOne => ext(u.exp_m1()),
            Section::ExpConjugate => Finite(u.ln_1p()),
            Section::Linear { slope } => Finite(*slope),
            Section::Indicator { c } => {
                if u <= *c {
                    Finite(0.0)
                } else {
                    Infinite
                }
            }
            Section::Graph(g) => g.dminus(u),
            Section::Truncated { base, n, knee } => match knee {
                Finite(k) if u > *k => Finite(*n),
                _ => base.dminus(u).min(Finite(*n)),
            },
            Section::Conjugate(c) => c.dminus(u),
            Section::Numeric(s) => s.dminus(u),
        }
    }

    /// `Φ'₊(u)`; `∞` at a finite cap `b_Φ` and beyond.
    pub fn dplus(&self, u: f64) -> ExtReal {
        match self {
            Section::ScaledPower { c, p } => {
                if u <= 0.0 {
                    Finite(0.0)
                } else {
                    ext(c * p * u.powf(p - 1.0))
                }
            }
            Section::ExpMinusOne => ext(u.exp_m1()),
            Section::ExpConjugate => Finite(u.ln_1p()),
            Section::Linear { slope } => Finite(*slope),
            Section::Indicator { c } => {
                if u < *c {
                    Finite(0.0)
                } else {
                    Infinite
                }
            }
            Section::Graph(g) => g.dplus(u),
            Section::Truncated { base, n, knee } => match knee {
                Finite(k) if u >= *k => Finite(*n),
                _ => base.dplus(u).min(Finite(*n)),
            },
            Section::Conjugate(c) => c.dplus(u),
            Section::Numeric(s) => s.dplus(u),
        }
    }

    /// `a_Φ = sup{u >= 0 : Φ(u) = 0}`.
    pub fn zero_level(&self) -> f64 {
        match self {
            Section::ScaledPower { .. } | Section::ExpMinusOne | Section::ExpConjugate | Section::Linear { .. } => 0.0,
            Section::Indicator { c } => *c,
            Section::Graph(g) => g.zero_level(),
            Section::Truncated { base, .. } => base.zero_level(),
            Section::Conjugate(c) => c.zero_level,
            Section::Numeric(s) => s.zero_level(),
        }
    }

    /// `b_Φ = sup{u >= 0 : Φ(u) < ∞}`.
    pub fn cap(&self) -> ExtReal {
        match self {
            Section::ScaledPower { .. }
            | Section::ExpMinusOne
            | Section::ExpConjugate
            | Section::Linear { .. }
            | Section::Truncated { .. } => Infinite,
            Section::Indicator { c } => Finite(*c),
            Section::Graph(g) => g.cap(),
            Section::Conjugate(c) => c.cap,
            Section::Numeric(s) => s.cap(),
        }
    }

    /// `Φ(b_Φ)`, the value at the cap (taken as a limit when the cap is infinite).
    pub fn value_at_cap(&self) -> ExtReal {
        match self.cap() {
            Finite(b) => self.value(b),
            Infinite => Infinite,
        }
    }

    /// Whether `u` lies in the closed effective domain `{Φ < ∞}`.
    pub fn in_domain(&self, u: f64) -> bool {
        match self.cap() {
            Finite(b) => u < b || (u == b && self.value(b).is_finite()),
            Infinite => true,
        }
    }

    /// `sup{x >= 0 : Φ'₋(x) <= n}`, the point where truncation at level `n`
    /// takes over.
    pub fn level(&self, n: f64) -> ExtReal {
        match self {
            Section::ScaledPower { c, p } => ext((n / (c * p)).powf(1.0 / (p - 1.0))),
            Section::ExpMinusOne => Finite(n.ln_1p()),
            Section::ExpConjugate => ext(n.exp_m1()),
            Section::Linear { slope } => {
                if *slope <= n {
                    Infinite
                } else {
                    Finite(0.0)
                }
            }
            Section::Indicator { c } => Finite(*c),
            Section::Graph(g) => g.level(n),
            Section::Truncated { base, n: m, .. } => {
                if n >= *m {
                    Infinite
                } else {
                    base.level(n)
                }
            }
            // Φ*'₋(v) <= n  ⇔  v <= Φ'₊(n)
            Section::Conjugate(c) => c.base.dplus(n),
            Section::Numeric(_) => generic_level(self, n),
        }
    }

    /// Points where `Φ'` may jump, up to `horizon`, when they are known in
    /// closed form. `None` means the location has to be found by scanning.
    pub fn jump_points(&self, horizon: f64) -> Option<Vec<f64>> {
        let pts = match self {
            Section::ScaledPower { .. } | Section::ExpMinusOne | Section::ExpConjugate => vec![],
            Section::Linear { slope } => {
                if *slope > 0.0 {
                    vec![0.0]
                } else {
                    vec![]
                }
            }
            Section::Indicator { c } => vec![*c],
            Section::Graph(g) => g.jump_points(),
            Section::Truncated { base, knee, .. } => {
                let mut pts = base.jump_points(horizon)?;
                if let Finite(k) = knee {
                    pts.retain(|x| x <= k);
                    pts.push(*k);
                }
                pts
            }
            Section::Conjugate(_) | Section::Numeric(_) => return None,
        };
        Some(pts.into_iter().filter(|&x| x <= horizon).collect())
    }

    /// Closed-form conjugate when one exists, otherwise a numeric wrapper.
    pub fn conjugate(&self) -> Section {
        match self {
            Section::ScaledPower { c, p } => {
                let q = p / (p - 1.0);
                Section::ScaledPower { c: (c * p).powf(-(q - 1.0)) / q, p: q }
            }
            Section::ExpMinusOne => Section::ExpConjugate,
            Section::ExpConjugate => Section::ExpMinusOne,
            Section::Linear { slope } => Section::Indicator { c: *slope },
            Section::Indicator { c } => Section::Linear { slope: *c },
            Section::Graph(g) => Section::Graph(Arc::new(g.swapped())),
            _ => self.numeric_conjugate(),
        }
    }

    /// Always the numeric Legendre–Fenchel transform.
    pub fn numeric_conjugate(&self) -> Section {
        Section::Conjugate(Box::new(ConjugateSection::new(self.clone())))
    }

    pub fn is_differentiable(&self) -> bool {
        match self {
            Section::ScaledPower { .. } | Section::ExpMinusOne | Section::ExpConjugate => true,
            Section::Linear { slope } => *slope == 0.0,
            Section::Indicator { .. } => false,
            Section::Graph(g) => g.is_differentiable(),
            Section::Truncated { base, .. } => base.is_differentiable(),
            Section::Conjugate(_) | Section::Numeric(_) => false,
        }
    }
}

/// `sup{x : Φ'₋(x) <= n}` by doubling and bisection.
fn generic_level(s: &Section, n: f64) -> ExtReal {
    if let Finite(b) = s.cap() {
        if s.dminus(b) <= Finite(n) {
            return Finite(b);
        }
    }
    let above = |x: f64| s.dminus(x) > Finite(n);
    match search::bracket_from_one("derivative level", above) {
        Ok(b) => Finite(search::bisect(b, 1e-14, above).lo),
        Err(_) if above(f64::MIN_POSITIVE) => Finite(0.0),
        Err(_) => Infinite,
    }
}

impl ConjugateSection {
    pub fn new(base: Section) -> Self {
        let zero_level = base.dplus(0.0).to_f64();
        let cap = match base.cap() {
            Finite(_) => Infinite,
            Infinite => slope_at_infinity(&base),
        };
        ConjugateSection { base, zero_level, cap }
    }

    pub fn base(&self) -> &Section {
        &self.base
    }

    /// `Φ*(v) = sup_{u>0} (uv - Φ(u))`.
    pub fn value(&self, v: f64) -> ExtReal {
        if v <= 0.0 {
            return Finite(0.0);
        }
        if let Finite(b) = self.cap {
            if v > b {
                return Infinite;
            }
        }
        let base = &self.base;
        let objective = |u: f64| match base.value(u) {
            Finite(phi) => u * v - phi,
            Infinite => f64::NEG_INFINITY,
        };
        // bracket the maximiser: grow until the right slope v - Φ'₋ is <= 0
        let domain_end = base.cap();
        let mut hi = 1.0_f64;
        let mut found = false;
        for _ in 0..search::MAX_DOUBLINGS {
            if let Finite(b) = domain_end {
                if hi >= b {
                    hi = b;
                    found = true;
                    break;
                }
            }
            if base.dminus(hi) >= Finite(v) {
                found = true;
                break;
            }
            hi *= 2.0;
        }
        if !found {
            // v is at the slope at infinity: the supremum is a limit
            return limit_along_doubling(objective);
        }
        let (_, best) = search::golden_section_max(objective, 0.0, hi, CONJUGATE_REL_TOL);
        ext(best.max(0.0))
    }

    /// `Φ*'₋(v) = inf{u : Φ'₊(u) >= v}`.
    pub fn dminus(&self, v: f64) -> ExtReal {
        if v <= 0.0 {
            return Finite(0.0);
        }
        if let Finite(b) = self.cap {
            if v > b {
                return Infinite;
            }
        }
        let reached = |u: f64| self.base.dplus(u) >= Finite(v);
        if reached(0.0) {
            return Finite(0.0);
        }
        match search::bracket_from_one("conjugate derivative", reached) {
            Ok(b) => Finite(search::bisect(b, 1e-14, reached).hi),
            Err(_) if reached(f64::MIN_POSITIVE) => Finite(0.0),
            Err(_) => Infinite,
        }
    }

    /// `Φ*'₊(v) = sup{u : Φ'₋(u) <= v}`.
    pub fn dplus(&self, v: f64) -> ExtReal {
        if let Finite(b) = self.cap {
            if v >= b {
                return Infinite;
            }
        }
        self.base.level(v)
    }
}

/// Supremum of a nondecreasing-in-the-limit objective sampled at `2^k`.
fn limit_along_doubling(f: impl Fn(f64) -> f64) -> ExtReal {
    let mut x = 1.0_f64;
    let mut prev = f(x).max(0.0);
    for _ in 0..search::MAX_DOUBLINGS {
        x *= 2.0;
        let cur = f(x).max(prev);
        if cur > DIVERGENCE_LIMIT {
            return Infinite;
        }
        if cur - prev <= 1e-10 * cur.abs().max(1.0) {
            return Finite(cur);
        }
        prev = cur;
    }
    Infinite
}

/// `lim_{u→∞} Φ'₋(u)`, i.e. `b_{Φ*}`, along doubling `u`: two successive
/// values within `1e-10` relative end the search; no convergence within the
/// doubling budget means infinite.
fn slope_at_infinity(base: &Section) -> ExtReal {
    // a flat stretch of Φ' can look like the asymptote, so the slope has to
    // stay put over many doublings
    const STABLE: usize = 24;
    let mut u = 1.0_f64;
    let mut prev = base.dminus(u);
    let mut stable = 0;
    for _ in 0..search::MAX_DOUBLINGS {
        u *= 2.0;
        let cur = base.dminus(u);
        match (prev, cur) {
            (_, Infinite) => return Infinite,
            (Finite(a), Finite(b)) => {
                if b > DIVERGENCE_LIMIT {
                    return Infinite;
                }
                if (b - a).abs() <= 1e-10 * b.abs().max(f64::MIN_POSITIVE) {
                    stable += 1;
                    if stable == STABLE {
                        return Finite(b);
                    }
                } else {
                    stable = 0;
                }
            }
            (Infinite, Finite(_)) => unreachable!("derivative is nondecreasing"),
        }
        prev = cur;
    }
    Infinite
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::graph::Tail;

    fn assert_close(a: ExtReal, b: f64, tol: f64) {
        let x = a.finite().unwrap_or_else(|| panic!("expected finite, got {a}"));
        assert!((x - b).abs() <= tol * b.abs().max(1.0), "{x} vs {b}");
    }

    #[test]
    fn power_closed_forms() {
        let s = Section::ScaledPower { c: 0.5, p: 2.0 };
        assert_eq!(s.value(3.0), Finite(4.5));
        assert_eq!((s.dminus(3.0), s.dplus(3.0)), (Finite(3.0), Finite(3.0)));
        // Power(3) conjugate: (2/3) v^{3/2}
        let c = Section::ScaledPower { c: 1.0 / 3.0, p: 3.0 }.conjugate();
        assert_close(c.value(1.0), 2.0 / 3.0, 1e-15);
        assert_close(c.value(4.0), 2.0 / 3.0 * 8.0, 1e-14);
    }

    #[test]
    fn exp_minus_one_value_matches_series_oracle() {
        let s = Section::ExpMinusOne;
        // Σ_{k>=2} 1/k! = e - 2
        let oracle: f64 = (2..25).map(|k| 1.0 / (1..=k).map(|j| j as f64).product::<f64>()).sum();
        assert_close(s.value(1.0), oracle, 1e-15);
        assert_close(s.value(1.0), std::f64::consts::E - 2.0, 1e-15);
        // series branch is continuous with the closed form
        let a = s.value(0.0999999).to_f64();
        let b = s.value(0.1).to_f64();
        assert!((a - b).abs() < 1e-7);
    }

    #[test]
    fn entropy_conjugate_small_and_large() {
        let s = Section::ExpConjugate;
        assert_close(s.value(1e-8), 0.5e-16, 1e-6);
        let v: f64 = 3.0;
        assert_close(s.value(v), (1.0 + v) * (1.0 + v).ln() - v, 1e-14);
    }

    #[test]
    fn indicator_and_linear_are_dual() {
        let ind = Section::Indicator { c: 1.0 };
        assert_eq!(ind.value(1.0), Finite(0.0));
        assert_eq!(ind.value(1.5), Infinite);
        assert_eq!((ind.dminus(1.0), ind.dplus(1.0)), (Finite(0.0), Infinite));
        assert_eq!(ind.conjugate().value(2.0), Finite(2.0));
        let lin = Section::Linear { slope: 1.0 };
        assert_eq!(lin.conjugate(), Section::Indicator { c: 1.0 });
        assert_eq!((lin.zero_level(), lin.cap()), (0.0, Infinite));
    }

    #[test]
    fn truncation_of_indicator() {
        let base = Section::Indicator { c: 1.0 };
        let knee = base.level(5.0);
        let t = Section::Truncated { base: Box::new(base), n: 5.0, knee };
        assert_eq!(t.value(1.0), Finite(0.0));
        assert_eq!(t.value(3.0), Finite(10.0));
        assert_eq!((t.dminus(1.0), t.dplus(1.0)), (Finite(0.0), Finite(5.0)));
    }

    #[test]
    fn numeric_conjugate_agrees_with_closed_forms() {
        let cases = [
            Section::ScaledPower { c: 0.5, p: 2.0 },
            Section::ScaledPower { c: 1.0, p: 3.7 },
            Section::ExpMinusOne,
            Section::Linear { slope: 1.0 },
            Section::Indicator { c: 1.0 },
            Section::Graph(Arc::new(SubdiffGraph::kinked_quadratic(1.0, 1.0, Tail::Ray { slope: 0.0 }).unwrap())),
        ];
        for s in &cases {
            let exact = s.conjugate();
            let numeric = s.numeric_conjugate();
            assert_eq!(exact.cap(), numeric.cap(), "{s:?}");
            for v in [0.0, 0.3, 1.0, 1.5, 2.0, 2.5, 4.0] {
                match (exact.value(v), numeric.value(v)) {
                    (Finite(a), Finite(b)) => assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0), "{s:?} v={v}: {a} vs {b}"),
                    (a, b) => assert_eq!(a, b, "{s:?} v={v}"),
                }
                let (lo, hi) = (numeric.dminus(v), numeric.dplus(v));
                let (elo, ehi) = (exact.dminus(v), exact.dplus(v));
                for (x, y) in [(lo, elo), (hi, ehi)] {
                    match (x, y) {
                        (Finite(a), Finite(b)) => assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0), "{s:?} v={v}: {a} vs {b}"),
                        (a, b) => assert_eq!(a, b, "{s:?} v={v}"),
                    }
                }
            }
        }
    }
}

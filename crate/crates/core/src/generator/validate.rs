//! Sampled checks of the defining conditions of a Musielak–Orlicz function.

use serde::Serialize;

use crate::ext::{ExtReal, Finite, Infinite};
use crate::space::GridMeasureSpace;

use super::{OrliczGenerator, Section};

const CONVEXITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// `Φ(t, 0) != 0`.
    NonzeroAtZero,
    /// `Φ(t, u)` does not tend to `0` as `u ↓ 0`.
    NotContinuousAtZero,
    /// `Φ(t, ·)` is identically zero on the sample.
    Degenerate,
    NotMonotone,
    NotConvex,
    /// `Φ(t, u)` does not tend to `Φ(t, b_Φ)` as `u ↑ b_Φ`.
    NotLowerSemicontinuous,
    /// `Φ'₋ > Φ'₊` somewhere.
    DerivativeOrder,
    DerivativeNotMonotone,
    /// The generator could not be resolved on this atom.
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub atom: usize,
    pub t: f64,
    /// Sample points exhibiting the violation (for convexity: `u₁, mid, u₂`).
    pub witness: Vec<f64>,
    pub detail: String,
}

/// `0` followed by 60 log-spaced points on `[1e-3, 50]`.
pub fn default_sample_grid() -> Vec<f64> {
    let n = 60;
    let (lo, hi) = (1e-3f64.ln(), 50f64.ln());
    std::iter::once(0.0).chain((0..n).map(|j| (lo + (hi - lo) * j as f64 / (n - 1) as f64).exp())).collect()
}

/// Checks every atom of `space` on `sample_grid` (plus probes at `b_Φ`).
/// An empty result means no violation was found on the sample.
pub fn validate_generator(gen: &OrliczGenerator, space: &GridMeasureSpace, sample_grid: &[f64]) -> Vec<Violation> {
    let mut out = Vec::new();
    for site in space.sites() {
        match gen.section(site) {
            Ok(s) => check_section(&s, site.index, site.t, sample_grid, &mut out),
            Err(e) => out.push(Violation {
                kind: ViolationKind::Unresolved,
                atom: site.index,
                t: site.t,
                witness: vec![],
                detail: e.to_string(),
            }),
        }
    }
    out
}

fn check_section(s: &Section, atom: usize, t: f64, grid: &[f64], out: &mut Vec<Violation>) {
    let mut push = |kind, witness: Vec<f64>, detail: String| {
        if !out.iter().any(|v: &Violation| v.atom == atom && v.kind == kind) {
            out.push(Violation { kind, atom, t, witness, detail });
        }
    };

    let mut us: Vec<f64> = grid.iter().copied().filter(|u| *u >= 0.0 && u.is_finite()).collect();
    if let Finite(b) = s.cap() {
        us.extend([b * (1.0 - 1e-9), b, b * 1.5]);
    }
    us.sort_by(f64::total_cmp);
    us.dedup();
    let vals: Vec<ExtReal> = us.iter().map(|&u| s.value(u)).collect();

    if s.value(0.0) != Finite(0.0) {
        push(ViolationKind::NonzeroAtZero, vec![0.0], format!("Φ(0) = {}", s.value(0.0)));
    }
    let tiny = s.value(1e-12);
    if !tiny.le(1e-6) {
        push(ViolationKind::NotContinuousAtZero, vec![1e-12], format!("Φ(1e-12) = {tiny}"));
    }
    if vals.iter().all(|v| *v == Finite(0.0)) && s.value(1e12) == Finite(0.0) {
        push(ViolationKind::Degenerate, vec![1e12], "Φ vanishes on the whole sample".into());
    }

    for (i, w) in vals.windows(2).enumerate() {
        if w[1] < w[0] {
            push(
                ViolationKind::NotMonotone,
                vec![us[i], us[i + 1]],
                format!("Φ({}) = {} > Φ({}) = {}", us[i], w[0], us[i + 1], w[1]),
            );
        }
    }

    for i in 0..us.len() {
        for j in (i + 1)..us.len() {
            let (a, b) = (us[i], us[j]);
            let (fa, fb) = match (vals[i], vals[j]) {
                (Finite(x), Finite(y)) => (x, y),
                _ => continue,
            };
            let m = 0.5 * (a + b);
            if let Finite(fm) = s.value(m) {
                let rhs = 0.5 * (fa + fb);
                if fm - rhs > CONVEXITY_SLACK * rhs.abs().max(1.0) {
                    push(
                        ViolationKind::NotConvex,
                        vec![a, m, b],
                        format!("Φ({m}) = {fm} > (Φ({a}) + Φ({b}))/2 = {rhs}"),
                    );
                }
            }
        }
    }

    if let Finite(b) = s.cap() {
        if b > 0.0 {
            let left = s.value(b * (1.0 - 1e-9));
            match (left, s.value(b)) {
                (Finite(l), Finite(fb)) if (l - fb).abs() > 1e-6 * fb.max(1.0) => push(
                    ViolationKind::NotLowerSemicontinuous,
                    vec![b],
                    format!("Φ(b⁻) = {l}, Φ(b) = {fb}"),
                ),
                (Finite(l), Infinite) if l < 1e6 => push(
                    ViolationKind::NotLowerSemicontinuous,
                    vec![b],
                    format!("Φ(b⁻) = {l} but Φ(b) = ∞"),
                ),
                _ => {}
            }
        }
    }

    let mut prev: Option<(f64, ExtReal, ExtReal)> = None;
    for &u in us.iter().filter(|&&u| s.in_domain(u)) {
        let (lo, hi) = (s.dminus(u), s.dplus(u));
        if hi < lo {
            push(ViolationKind::DerivativeOrder, vec![u], format!("Φ'₋({u}) = {lo} > Φ'₊({u}) = {hi}"));
        }
        if let Some((pu, plo, phi)) = prev {
            let tol = |x: ExtReal| Finite(x.to_f64().abs() * 1e-9 + 1e-12);
            if lo + tol(lo) < plo || hi + tol(hi) < phi {
                push(
                    ViolationKind::DerivativeNotMonotone,
                    vec![pu, u],
                    format!("∂Φ({pu}) = [{plo}, {phi}], ∂Φ({u}) = [{lo}, {hi}]"),
                );
            }
        }
        prev = Some((u, lo, hi));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{NumericFn, SubdiffGraph, Tail};

    fn check(g: &OrliczGenerator) -> Vec<Violation> {
        validate_generator(g, &GridMeasureSpace::uniform(3).unwrap(), &default_sample_grid())
    }

    #[test]
    fn built_ins_have_no_violations() {
        let kink = SubdiffGraph::kinked_quadratic(1.0, 1.0, Tail::Ray { slope: 0.0 }).unwrap();
        for g in [
            OrliczGenerator::power(2.0).unwrap(),
            OrliczGenerator::power(1.5).unwrap(),
            OrliczGenerator::variable_exponent(vec![1.2, 2.0, 4.0]).unwrap(),
            OrliczGenerator::exp_minus_one(),
            OrliczGenerator::exp_minus_one().conjugate(),
            OrliczGenerator::linear(),
            OrliczGenerator::linear().conjugate(),
            OrliczGenerator::indicator(1.0).unwrap(),
            OrliczGenerator::piecewise(kink.clone()),
            OrliczGenerator::piecewise(kink.swapped()),
            OrliczGenerator::indicator(1.0).unwrap().truncate(5.0).unwrap(),
        ] {
            assert_eq!(check(&g), vec![], "{}", g.name());
        }
    }

    #[test]
    fn square_root_is_not_convex() {
        let g = OrliczGenerator::numeric(NumericFn::new("sqrt", |_, u| u.sqrt()));
        let v = check(&g);
        let c = v.iter().find(|v| v.kind == ViolationKind::NotConvex).expect("convexity violation");
        assert_eq!(c.witness.len(), 3);
        let [a, m, b] = [c.witness[0], c.witness[1], c.witness[2]];
        assert!(m.sqrt() > 0.5 * (a.sqrt() + b.sqrt()));
    }

    #[test]
    fn jump_at_zero_is_reported() {
        let g = OrliczGenerator::numeric(NumericFn::new("jump", |_, u| if u > 0.0 { 1.0 + u } else { 0.0 }));
        assert!(check(&g).iter().any(|v| v.kind == ViolationKind::NotContinuousAtZero));
    }
}

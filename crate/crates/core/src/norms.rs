//! Luxemburg and Orlicz/Amemiya norms, the minimizer interval `K(u)`, `θ_Φ`
//! and a sampled Δ₂ falsifier.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::{ExtReal, Finite, Infinite};
use crate::generator::{modular_ext, modular_of, OrliczGenerator, Section};
use crate::search::{self, Bracket};
use crate::space::{GridMeasureSpace, SimpleFunction};

/// Relative width at which norm and `k` bisections stop.
pub const BISECTION_REL_TOL: f64 = 1e-10;

/// Band for "= 1" and "= 0" comparisons downstream of two nested bisections.
pub const EPS_EQ: f64 = 1e-7;

/// `Φ` and `Φ*` resolved on every atom of a space.
#[derive(Debug, Clone)]
pub(crate) struct Setting<'a> {
    pub space: &'a GridMeasureSpace,
    pub phi: Vec<Section>,
    pub conj: Vec<Section>,
}

impl<'a> Setting<'a> {
    pub fn new(gen: &OrliczGenerator, space: &'a GridMeasureSpace) -> Result<Self> {
        let phi = gen.sections(space)?;
        let conj = phi.iter().map(Section::conjugate).collect();
        Ok(Setting { space, phi, conj })
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.space.weight(i)
    }

    /// `I_Φ(c·u)`.
    pub fn modular(&self, u: &SimpleFunction, c: f64) -> ExtReal {
        let vals = u.values();
        modular_of(&self.phi, self.space, |i| (c * vals[i]).abs())
    }

    /// `I_{Φ*}(v)`.
    pub fn conj_modular(&self, v: &[f64]) -> ExtReal {
        modular_of(&self.conj, self.space, |i| v[i].abs())
    }

    /// `I_{Φ*}(w)` for per-atom extended values `w`.
    pub fn conj_modular_ext(&self, w: impl Fn(usize) -> ExtReal) -> ExtReal {
        modular_ext(&self.conj, self.space, w)
    }

    /// `I_{Φ*}(Φ'₊(·, k|u|))`, nondecreasing in `k`.
    pub fn level_plus(&self, u: &SimpleFunction, k: f64) -> ExtReal {
        let vals = u.values();
        self.conj_modular_ext(|i| self.phi[i].dplus(k * vals[i].abs()))
    }

    /// `I_{Φ*}(b_{Φ*} χ_A)`.
    pub fn conj_at_cap(&self, mask: &[bool]) -> ExtReal {
        self.conj_modular_ext(|i| if mask[i] { self.conj[i].cap() } else { Finite(0.0) })
    }

    /// `(1 + I_Φ(ku)) / k`.
    pub fn amemiya(&self, u: &SimpleFunction, k: f64) -> ExtReal {
        (Finite(1.0) + self.modular(u, k)).scale(1.0 / k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KSet {
    /// `K(u) = [k_star, k_double_star]`.
    NonEmpty { k_star: f64, k_double_star: f64 },
    /// `K(u) = ∅`; the norm is `∫ |u| b_{Φ*} dμ`.
    Degenerate { l1_value: f64 },
}

impl KSet {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, KSet::Degenerate { .. })
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        match *self {
            KSet::NonEmpty { k_star, k_double_star } => Some((k_star, k_double_star)),
            KSet::Degenerate { .. } => None,
        }
    }
}

/// [`KSet`] together with the final bisection brackets of `k_u*` and `k_u**`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KInterval {
    pub kset: KSet,
    /// `F(lo) < 1 <= F(hi)` where `F(k) = I_{Φ*}(Φ'₊(·, k|u|))`.
    pub star: Option<Bracket>,
    /// `F(lo) <= 1 < F(hi)`.
    pub double_star: Option<Bracket>,
}

fn check_nonzero(space: &GridMeasureSpace, u: &SimpleFunction) -> Result<()> {
    space.check(u)?;
    if u.is_zero() {
        Err(Error::ZeroFunction)
    } else {
        Ok(())
    }
}

/// `‖u‖_Φ = inf{λ > 0 : I_Φ(u/λ) <= 1}`.
pub fn luxemburg_norm(gen: &OrliczGenerator, space: &GridMeasureSpace, u: &SimpleFunction) -> Result<f64> {
    space.check(u)?;
    if u.is_zero() {
        return Ok(0.0);
    }
    luxemburg_of(&gen.sections(space)?, space, u)
}

pub(crate) fn luxemburg_of(phi: &[Section], space: &GridMeasureSpace, u: &SimpleFunction) -> Result<f64> {
    if u.is_zero() {
        return Ok(0.0);
    }
    for (i, (s, &x)) in phi.iter().zip(u.values()).enumerate() {
        if x != 0.0 && s.cap() == Finite(0.0) {
            return Err(Error::InvalidSpace { atom: i, reason: "b_Φ = 0 on the support".into() });
        }
    }
    let vals = u.values();
    let feasible = |lam: f64| modular_of(phi, space, |i| vals[i].abs() / lam).le(1.0);
    let b = search::bracket_from_one("Luxemburg norm", feasible)?;
    Ok(search::bisect(b, BISECTION_REL_TOL, feasible).hi)
}

/// `θ_Φ(u) = inf{λ > 0 : I_Φ(u/λ) < ∞}`.
///
/// On a grid this is `max |u(t_i)| / b_Φ(t_i)` over atoms with finite
/// `b_Φ`, and `0` for finite-valued generators.
pub fn theta(gen: &OrliczGenerator, space: &GridMeasureSpace, u: &SimpleFunction) -> Result<f64> {
    space.check(u)?;
    if u.is_zero() || gen.capabilities().finite_valued {
        return Ok(0.0);
    }
    let phi = gen.sections(space)?;
    let mut theta = 0.0_f64;
    for (i, (s, &x)) in phi.iter().zip(u.values()).enumerate() {
        if x == 0.0 {
            continue;
        }
        if let Finite(b) = s.cap() {
            if b == 0.0 {
                return Err(Error::InvalidSpace { atom: i, reason: "b_Φ = 0 on the support".into() });
            }
            theta = theta.max(x.abs() / b);
        }
    }
    Ok(theta)
}

/// `K(u)`: the set of `k` attaining `inf_k (1 + I_Φ(ku)) / k`.
pub fn k_interval(gen: &OrliczGenerator, space: &GridMeasureSpace, u: &SimpleFunction) -> Result<KSet> {
    Ok(k_interval_detail(gen, space, u)?.kset)
}

pub fn k_interval_detail(gen: &OrliczGenerator, space: &GridMeasureSpace, u: &SimpleFunction) -> Result<KInterval> {
    check_nonzero(space, u)?;
    let st = Setting::new(gen, space)?;
    k_interval_of(&st, u)
}

pub(crate) fn k_interval_of(st: &Setting<'_>, u: &SimpleFunction) -> Result<KInterval> {
    let supp = u.support();
    if st.conj_at_cap(&supp).le(1.0) {
        let l1 = u
            .values()
            .iter()
            .enumerate()
            .filter(|(_, x)| **x != 0.0)
            .map(|(i, x)| st.weight(i) * x.abs() * st.conj[i].cap().to_f64())
            .sum();
        return Ok(KInterval { kset: KSet::Degenerate { l1_value: l1 }, star: None, double_star: None });
    }
    let reached = |k: f64| Finite(1.0) <= st.level_plus(u, k);
    let exceeded = |k: f64| Finite(1.0) < st.level_plus(u, k);
    let star = search::bisect(search::bracket_from_one("k_u*", reached)?, BISECTION_REL_TOL, reached);
    let double_star = search::bisect(search::bracket_from_one("k_u**", exceeded)?, BISECTION_REL_TOL, exceeded);
    let (mut k_star, mut k_double_star) = (star.hi, double_star.lo);
    if k_star > k_double_star {
        // k_u* = k_u**; the brackets overlap and the feasible side is kept
        k_star = k_double_star;
    }
    if k_double_star < k_star {
        k_double_star = k_star;
    }
    Ok(KInterval {
        kset: KSet::NonEmpty { k_star, k_double_star },
        star: Some(star),
        double_star: Some(double_star),
    })
}

/// `(1 + I_Φ(ku)) / k`, the Amemiya objective.
pub fn amemiya_objective(gen: &OrliczGenerator, space: &GridMeasureSpace, u: &SimpleFunction, k: f64) -> Result<ExtReal> {
    space.check(u)?;
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!("k must be > 0, got {k}")));
    }
    Ok(Setting::new(gen, space)?.amemiya(u, k))
}

/// `‖u‖_{Φ,0}`, equal to the Amemiya norm `inf_k (1 + I_Φ(ku)) / k`, with
/// `K(u)`. The set is `None` for `u = 0`.
pub fn orlicz_amemiya_norm(
    gen: &OrliczGenerator,
    space: &GridMeasureSpace,
    u: &SimpleFunction,
) -> Result<(f64, Option<KSet>)> {
    space.check(u)?;
    if u.is_zero() {
        return Ok((0.0, None));
    }
    let st = Setting::new(gen, space)?;
    let ki = k_interval_of(&st, u)?;
    Ok((orlicz_of(&st, u, &ki)?, Some(ki.kset)))
}

pub(crate) fn orlicz_of(st: &Setting<'_>, u: &SimpleFunction, ki: &KInterval) -> Result<f64> {
    match ki.kset {
        KSet::Degenerate { l1_value } => Ok(l1_value),
        KSet::NonEmpty { k_star, k_double_star } => {
            let mut candidates = vec![k_star, k_double_star];
            for b in [ki.star, ki.double_star].into_iter().flatten() {
                candidates.extend([b.lo, b.hi]);
            }
            candidates
                .into_iter()
                .filter_map(|k| st.amemiya(u, k).finite())
                .min_by(f64::total_cmp)
                .ok_or_else(|| Error::Bracket(format!("Amemiya objective infinite at every point near k_u* = {k_star}")))
        }
    }
}

/// Sample points for [`delta2_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct Delta2Samples {
    /// Upper end of the log-spaced scan.
    pub horizon: f64,
    /// Number of log-spaced points per atom.
    pub count: usize,
    /// Additional points, used where they lie above `f(t_i)`.
    pub extra: Vec<f64>,
}

impl Default for Delta2Samples {
    fn default() -> Self {
        Delta2Samples { horizon: 1e3, count: 400, extra: vec![] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Delta2Verdict {
    /// No violation among `samples` points. Not a proof.
    Holds { samples: usize },
    Violated { atom: usize, t: f64, u: f64, phi_u: ExtReal, phi_2u: ExtReal, ratio: ExtReal },
}

impl Delta2Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Delta2Verdict::Holds { .. })
    }
}

const DELTA2_SLACK: f64 = 1e-12;

/// Looks for `u >= f(t_i)` with `Φ(t_i, 2u) > K Φ(t_i, u)`.
pub fn delta2_check(
    gen: &OrliczGenerator,
    space: &GridMeasureSpace,
    k: f64,
    f: &SimpleFunction,
    samples: &Delta2Samples,
) -> Result<Delta2Verdict> {
    if !(k > 1.0) || !k.is_finite() {
        return Err(Error::InvalidParameter(format!("Δ₂ constant must be finite and > 1, got {k}")));
    }
    space.check(f)?;
    if f.values().iter().any(|x| *x < 0.0) {
        return Err(Error::Precondition("threshold f must be nonnegative".into()));
    }
    let phi = gen.sections(space)?;
    if modular_of(&phi, space, |i| f.values()[i]).is_infinite() {
        return Err(Error::Precondition("threshold f has infinite modular".into()));
    }
    let mut total = 0;
    for (i, s) in phi.iter().enumerate() {
        let f_i = f.values()[i];
        let mut us = vec![f_i];
        let lo = f_i.max(1e-6);
        if samples.horizon > lo && samples.count > 1 {
            let (a, b) = (lo.ln(), samples.horizon.ln());
            us.extend((0..samples.count).map(|j| (a + (b - a) * j as f64 / (samples.count - 1) as f64).exp()));
        }
        if let Finite(b) = s.cap() {
            us.extend([b, 0.5 * b, 0.5 * b * (1.0 + 1e-9)]);
        }
        us.extend(samples.extra.iter().copied());
        us.retain(|u| *u >= f_i && u.is_finite());
        us.sort_by(f64::total_cmp);
        us.dedup();
        total += us.len();
        for u in us {
            let (a, b) = (s.value(u), s.value(2.0 * u));
            let bound = a.scale(k * (1.0 + DELTA2_SLACK));
            if b > bound {
                let ratio = match (a, b) {
                    (Finite(x), Finite(y)) if x > 0.0 => Finite(y / x),
                    _ => Infinite,
                };
                let t = space.atoms()[i].t;
                return Ok(Delta2Verdict::Violated { atom: i, t, u, phi_u: a, phi_2u: b, ratio });
            }
        }
    }
    Ok(Delta2Verdict::Holds { samples: total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{SubdiffGraph, Tail};
    use approx::assert_abs_diff_eq;

    fn half() -> GridMeasureSpace {
        GridMeasureSpace::from_pairs(&[(0.25, 0.5), (0.75, 0.5)]).unwrap()
    }

    fn f(v: &[f64]) -> SimpleFunction {
        SimpleFunction::new(v.to_vec()).unwrap()
    }

    fn kink() -> OrliczGenerator {
        OrliczGenerator::piecewise(SubdiffGraph::kinked_quadratic(1.0, 1.0, Tail::Ray { slope: 0.0 }).unwrap())
    }

    #[test]
    fn luxemburg_examples() {
        let p2 = OrliczGenerator::power(2.0).unwrap();
        assert_abs_diff_eq!(luxemburg_norm(&p2, &half(), &f(&[1.0, 1.0])).unwrap(), 0.5f64.sqrt(), epsilon = 1e-9);
        let ind = OrliczGenerator::indicator(1.0).unwrap();
        assert_abs_diff_eq!(luxemburg_norm(&ind, &half(), &f(&[1.0, 2.0])).unwrap(), 2.0, epsilon = 1e-9);
        assert_eq!(luxemburg_norm(&ind, &half(), &f(&[0.0, 0.0])).unwrap(), 0.0);
    }

    #[test]
    fn k_interval_examples() {
        let p2 = OrliczGenerator::power(2.0).unwrap();
        let (a, b) = k_interval(&p2, &half(), &f(&[1.0, 1.0])).unwrap().bounds().unwrap();
        assert_abs_diff_eq!(a, 2f64.sqrt(), epsilon = 1e-9);
        assert_abs_diff_eq!(b, 2f64.sqrt(), epsilon = 1e-9);
        let ind = OrliczGenerator::indicator(1.0).unwrap();
        let (a, b) = k_interval(&ind, &half(), &f(&[1.0, 2.0])).unwrap().bounds().unwrap();
        assert_abs_diff_eq!(a, 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(b, 0.5, epsilon = 1e-9);
        let lin = OrliczGenerator::linear();
        assert_eq!(k_interval(&lin, &half(), &f(&[1.0, 2.0])).unwrap(), KSet::Degenerate { l1_value: 1.5 });
        assert!(matches!(k_interval(&lin, &half(), &f(&[0.0, 0.0])), Err(Error::ZeroFunction)));
    }

    #[test]
    fn orlicz_examples() {
        let p2 = OrliczGenerator::power(2.0).unwrap();
        let (n, _) = orlicz_amemiya_norm(&p2, &half(), &f(&[1.0, 1.0])).unwrap();
        assert_abs_diff_eq!(n, 2f64.sqrt(), epsilon = 1e-12);
        let (n, _) = orlicz_amemiya_norm(&p2, &half(), &f(&[1.0, 2.0])).unwrap();
        assert_abs_diff_eq!(n, 5f64.sqrt(), epsilon = 1e-12);
        let (n, k) = orlicz_amemiya_norm(&kink(), &half(), &f(&[1.0, 1.0])).unwrap();
        assert_abs_diff_eq!(n, 1.5, epsilon = 1e-12);
        let (a, b) = k.unwrap().bounds().unwrap();
        assert_abs_diff_eq!(a, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(b, 1.0, epsilon = 1e-9);
        assert_eq!(orlicz_amemiya_norm(&p2, &half(), &f(&[0.0, 0.0])).unwrap(), (0.0, None));
    }

    #[test]
    fn proper_interval_for_flat_conjugate() {
        // Φ' = 1 on (0, 2], then slope 3: Φ* vanishes on [0, 1]
        let g = SubdiffGraph::new(vec![(0.0, 0.0), (0.0, 1.0), (2.0, 1.0), (2.0, 3.0)], Tail::Ray { slope: 0.0 }).unwrap();
        let g = OrliczGenerator::piecewise(g);
        let u = f(&[1.0, 1.0]);
        let (a, b) = k_interval(&g, &half(), &u).unwrap().bounds().unwrap();
        assert!(a <= b);
        let (n, _) = orlicz_amemiya_norm(&g, &half(), &u).unwrap();
        for k in [a, 0.5 * (a + b), b] {
            assert_abs_diff_eq!(amemiya_objective(&g, &half(), &u, k).unwrap().to_f64(), n, epsilon = 1e-8);
        }
    }

    #[test]
    fn theta_examples() {
        let ind = OrliczGenerator::indicator(1.0).unwrap();
        assert_eq!(theta(&ind, &half(), &f(&[1.0, 2.0])).unwrap(), 2.0);
        assert_eq!(theta(&ind, &half(), &f(&[0.0, 0.0])).unwrap(), 0.0);
        let p2 = OrliczGenerator::power(2.0).unwrap();
        assert_eq!(theta(&p2, &half(), &f(&[5.0, -7.0])).unwrap(), 0.0);
    }

    #[test]
    fn delta2_examples() {
        let s = half();
        let zero = SimpleFunction::zeros(2);
        let p2 = OrliczGenerator::power(2.0).unwrap();
        assert!(delta2_check(&p2, &s, 4.0, &zero, &Delta2Samples::default()).unwrap().holds());
        let e = OrliczGenerator::exp_minus_one();
        match delta2_check(&e, &s, 100.0, &zero, &Delta2Samples::default()).unwrap() {
            Delta2Verdict::Violated { ratio, u, .. } => {
                assert!(ratio > Finite(100.0));
                let oracle = ((2.0 * u).exp() - 1.0 - 2.0 * u) / (u.exp() - 1.0 - u);
                assert_abs_diff_eq!(ratio.to_f64(), oracle, epsilon = 1e-9 * oracle);
            }
            v => panic!("{v:?}"),
        }
        // (e^12 - 13) / (e^6 - 7) ≈ 410.5
        let r = ((12f64).exp() - 13.0) / ((6f64).exp() - 7.0);
        assert_abs_diff_eq!(r, 410.5, epsilon = 0.1);
        let ind = OrliczGenerator::indicator(1.0).unwrap();
        let one = SimpleFunction::constant(2, 1.0);
        match delta2_check(&ind, &s, 1e6, &one, &Delta2Samples::default()).unwrap() {
            Delta2Verdict::Violated { u, phi_2u, .. } => {
                assert_eq!(u, 1.0);
                assert_eq!(phi_2u, Infinite);
            }
            v => panic!("{v:?}"),
        }
        let big = SimpleFunction::constant(2, 2.0);
        assert!(matches!(
            delta2_check(&ind, &s, 2.0, &big, &Delta2Samples::default()),
            Err(Error::Precondition(_))
        ));
    }
}

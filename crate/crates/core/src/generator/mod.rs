//! Musielak–Orlicz generator families.
//!
//! A generator is a closed-form family (optionally with per-atom parameters)
//! that resolves to a [`Section`] `Φ(t_i, ·)` at each atom. Closed forms give
//! exact derivatives and conjugates; [`Family::Numeric`] and
//! [`Family::Conjugate`] fall back to numerical procedures and are flagged as
//! such in [`Capabilities`].

mod graph;
mod numeric;
mod section;
mod validate;


use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::space::{GridMeasureSpace, Site, SimpleFunction};

pub use graph::{SubdiffGraph, Tail};
pub use numeric::NumericFn;
pub use section::{ConjugateSection, Section, CONJUGATE_REL_TOL};
pub use validate::{default_sample_grid, validate_generator, Violation, ViolationKind};

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `u^p / p`, constant `p > 1`.
    Power { p: f64 },
    /// `c_i · u^{p_i}` with per-atom exponent and coefficient.
    VariableExponent { exponents: Vec<f64>, coefficients: Vec<f64> },
    /// `e^u - 1 - u`.
    ExpMinusOne,
    /// `(1+v) ln(1+v) - v`.
    ExpConjugate,
    /// `s · u`.
    Linear { slope: f64 },
    /// `0` on `[0, c]`, `∞` beyond.
    Indicator { c: f64 },
    PiecewiseLinearQuadratic(Arc<SubdiffGraph>),
    Truncated { base: Box<Family>, n: f64 },
    /// Numerically evaluated Legendre–Fenchel transform of `base`.
    Conjugate(Box<Family>),
    Numeric(NumericFn),
}

/// What is known about a generator without sampling it.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Capabilities {
    pub finite_valued: bool,
    pub differentiable: bool,
    /// Name of the closed-form conjugate family, if there is one.
    pub analytic_conjugate: Option<&'static str>,
    /// Analytic Δ₂ verdict; `None` when it has to be sampled.
    pub delta2: Option<bool>,
    pub numeric: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrliczGenerator {
    family: Family,
}

impl OrliczGenerator {
    pub fn new(family: Family) -> Result<Self> {
        check_family(&family)?;
        Ok(OrliczGenerator { family })
    }

    pub fn power(p: f64) -> Result<Self> {
        Self::new(Family::Power { p })
    }

    /// `u^{p_i}` on atom `i`.
    pub fn variable_exponent(exponents: Vec<f64>) -> Result<Self> {
        let coefficients = vec![1.0; exponents.len()];
        Self::new(Family::VariableExponent { exponents, coefficients })
    }

    pub fn exp_minus_one() -> Self {
        OrliczGenerator { family: Family::ExpMinusOne }
    }

    pub fn linear() -> Self {
        OrliczGenerator { family: Family::Linear { slope: 1.0 } }
    }

    pub fn linear_with_slope(slope: f64) -> Result<Self> {
        Self::new(Family::Linear { slope })
    }

    pub fn indicator(c: f64) -> Result<Self> {
        Self::new(Family::Indicator { c })
    }

    pub fn piecewise(graph: SubdiffGraph) -> Self {
        OrliczGenerator { family: Family::PiecewiseLinearQuadratic(Arc::new(graph)) }
    }

    pub fn numeric(f: NumericFn) -> Self {
        OrliczGenerator { family: Family::Numeric(f) }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn name(&self) -> String {
        family_name(&self.family)
    }

    /// Number of atoms the per-atom parameters are sized for, if any.
    pub fn atom_count(&self) -> Option<usize> {
        fn walk(f: &Family) -> Option<usize> {
            match f {
                Family::VariableExponent { exponents, .. } => Some(exponents.len()),
                Family::Truncated { base, .. } | Family::Conjugate(base) => walk(base),
                _ => None,
            }
        }
        walk(&self.family)
    }

    /// Resolves `Φ(t, ·)` at `site`.
    pub fn section(&self, site: Site) -> Result<Section> {
        resolve(&self.family, site)
    }

    /// Sections at every atom of `space`.
    pub fn sections(&self, space: &GridMeasureSpace) -> Result<Vec<Section>> {
        if let Some(n) = self.atom_count() {
            if n != space.len() {
                return Err(Error::SpaceMismatch { expected: space.len(), found: n });
            }
        }
        space.sites().map(|s| self.section(s)).collect()
    }

    pub fn capabilities(&self) -> Capabilities {
        capabilities(&self.family)
    }

    /// Conjugate generator: closed form when available, numeric otherwise.
    pub fn conjugate(&self) -> OrliczGenerator {
        OrliczGenerator { family: conjugate_family(&self.family) }
    }

    /// Always the numeric Legendre–Fenchel transform.
    pub fn numeric_conjugate(&self) -> OrliczGenerator {
        OrliczGenerator { family: Family::Conjugate(Box::new(self.family.clone())) }
    }

    /// `Φ_n(t, u) = ∫_0^u min(Φ'₋(t, x), n) dx`: finite-valued, below `Φ`,
    /// and increasing to `Φ` as `n → ∞`.
    pub fn truncate(&self, n: f64) -> Result<OrliczGenerator> {
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidParameter(format!("truncation level must be finite and > 0, got {n}")));
        }
        Ok(OrliczGenerator { family: Family::Truncated { base: Box::new(self.family.clone()), n } })
    }
}

fn positive_finite(x: f64, what: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must be finite and > 0, got {x}")))
    }
}

fn check_family(f: &Family) -> Result<()> {
    match f {
        Family::Power { p } => {
            if !(*p > 1.0) || !p.is_finite() {
                return Err(Error::InvalidParameter(format!("power exponent must satisfy 1 < p < ∞, got {p}")));
            }
        }
        Family::VariableExponent { exponents, coefficients } => {
            if exponents.len() != coefficients.len() {
                return Err(Error::InvalidParameter("exponent and coefficient arrays differ in length".into()));
            }
            for (i, (&p, &c)) in exponents.iter().zip(coefficients).enumerate() {
                if !(p > 1.0) || !p.is_finite() {
                    return Err(Error::InvalidParameter(format!("exponent at atom {i} must satisfy 1 < p < ∞, got {p}")));
                }
                positive_finite(c, &format!("coefficient at atom {i}"))?;
            }
        }
        Family::Linear { slope } => positive_finite(*slope, "slope")?,
        Family::Indicator { c } => positive_finite(*c, "indicator threshold")?,
        Family::Truncated { base, n } => {
            positive_finite(*n, "truncation level")?;
            check_family(base)?;
        }
        Family::Conjugate(base) => check_family(base)?,
        Family::ExpMinusOne | Family::ExpConjugate | Family::PiecewiseLinearQuadratic(_) | Family::Numeric(_) => {}
    }
    Ok(())
}

fn family_name(f: &Family) -> String {
    match f {
        Family::Power { p } => format!("power(p={p})"),
        Family::VariableExponent { exponents, .. } => format!("varexp({} atoms)", exponents.len()),
        Family::ExpMinusOne => "exp-minus-one".into(),
        Family::ExpConjugate => "exp-conjugate".into(),
        Family::Linear { slope } => format!("linear(slope={slope})"),
        Family::Indicator { c } => format!("indicator(c={c})"),
        Family::PiecewiseLinearQuadratic(_) => "piecewise-linear-quadratic".into(),
        Family::Truncated { base, n } => format!("truncated({}, n={n})", family_name(base)),
        Family::Conjugate(base) => format!("conjugate({})", family_name(base)),
        Family::Numeric(f) => format!("numeric({})", f.name()),
    }
}

fn resolve(f: &Family, site: Site) -> Result<Section> {
    Ok(match f {
        Family::Power { p } => Section::ScaledPower { c: 1.0 / p, p: *p },
        Family::VariableExponent { exponents, coefficients } => {
            let i = site.index;
            if i >= exponents.len() {
                return Err(Error::SpaceMismatch { expected: i + 1, found: exponents.len() });
            }
            Section::ScaledPower { c: coefficients[i], p: exponents[i] }
        }
        Family::ExpMinusOne => Section::ExpMinusOne,
        Family::ExpConjugate => Section::ExpConjugate,
        Family::Linear { slope } => Section::Linear { slope: *slope },
        Family::Indicator { c } => Section::Indicator { c: *c },
        Family::PiecewiseLinearQuadratic(g) => Section::Graph(Arc::clone(g)),
        Family::Truncated { base, n } => {
            let base = resolve(base, site)?;
            let knee = base.level(*n);
            Section::Truncated { base: Box::new(base), n: *n, knee }
        }
        Family::Conjugate(base) => resolve(base, site)?.numeric_conjugate(),
        Family::Numeric(func) => Section::Numeric(numeric::NumericSection::new(func.clone(), site.t)),
    })
}

fn conjugate_family(f: &Family) -> Family {
    match f {
        Family::Power { p } => Family::Power { p: p / (p - 1.0) },
        Family::VariableExponent { exponents, coefficients } => {
            let (mut qs, mut cs) = (Vec::with_capacity(exponents.len()), Vec::with_capacity(exponents.len()));
            for (&p, &c) in exponents.iter().zip(coefficients) {
                if let Section::ScaledPower { c, p } = (Section::ScaledPower { c, p }).conjugate() {
                    qs.push(p);
                    cs.push(c);
                }
            }
            Family::VariableExponent { exponents: qs, coefficients: cs }
        }
        Family::ExpMinusOne => Family::ExpConjugate,
        Family::ExpConjugate => Family::ExpMinusOne,
        Family::Linear { slope } => Family::Indicator { c: *slope },
        Family::Indicator { c } => Family::Linear { slope: *c },
        Family::PiecewiseLinearQuadratic(g) => Family::PiecewiseLinearQuadratic(Arc::new(g.swapped())),
        other => Family::Conjugate(Box::new(other.clone())),
    }
}

fn capabilities(f: &Family) -> Capabilities {
    let caps = |finite_valued, differentiable, analytic_conjugate, delta2| Capabilities {
        finite_valued,
        differentiable,
        analytic_conjugate,
        delta2,
        numeric: false,
    };
    match f {
        Family::Power { .. } => caps(true, true, Some("power"), Some(true)),
        Family::VariableExponent { .. } => caps(true, true, Some("varexp"), Some(true)),
        Family::ExpMinusOne => caps(true, true, Some("exp-conjugate"), Some(false)),
        Family::ExpConjugate => caps(true, true, Some("exp-minus-one"), Some(true)),
        Family::Linear { .. } => caps(true, false, Some("indicator"), Some(true)),
        Family::Indicator { .. } => caps(false, false, Some("linear"), Some(false)),
        Family::PiecewiseLinearQuadratic(g) => {
            let finite = g.cap().is_infinite();
            caps(finite, g.is_differentiable(), Some("piecewise-linear-quadratic"), Some(finite))
        }
        Family::Truncated { base, .. } => {
            let b = capabilities(base);
            Capabilities {
                finite_valued: true,
                differentiable: b.differentiable && b.finite_valued,
                analytic_conjugate: None,
                // eventually linear
                delta2: Some(true),
                numeric: b.numeric,
            }
        }
        Family::Conjugate(_) | Family::Numeric(_) => {
            Capabilities { finite_valued: false, differentiable: false, analytic_conjugate: None, delta2: None, numeric: true }
        }
    }
}

/// `Φ(t, u)`.
pub fn eval_phi(gen: &OrliczGenerator, site: Site, u: f64) -> Result<ExtReal> {
    if !(u >= 0.0) {
        return Err(Error::Domain(format!("Φ is defined for u >= 0, got {u}")));
    }
    Ok(gen.section(site)?.value(u))
}

/// `∂Φ(t, u) = [Φ'₋(t, u), Φ'₊(t, u)]`.
pub fn subdiff(gen: &OrliczGenerator, site: Site, u: f64) -> Result<(ExtReal, ExtReal)> {
    if !(u >= 0.0) {
        return Err(Error::Domain(format!("∂Φ is defined for u >= 0, got {u}")));
    }
    let s = gen.section(site)?;
    if let ExtReal::Finite(b) = s.cap() {
        if u > b {
            return Err(Error::OutsideDomain { u, bound: b });
        }
    }
    Ok((s.dminus(u), s.dplus(u)))
}

/// `(a_Φ(t), b_Φ(t))`.
pub fn generator_bounds(gen: &OrliczGenerator, site: Site) -> Result<(f64, ExtReal)> {
    let s = gen.section(site)?;
    Ok((s.zero_level(), s.cap()))
}

/// `I_Φ(u) = Σ w_i Φ(t_i, |u_i|)`.
pub fn modular(gen: &OrliczGenerator, space: &GridMeasureSpace, u: &SimpleFunction) -> Result<ExtReal> {
    space.check(u)?;
    let sections = gen.sections(space)?;
    Ok(modular_of(&sections, space, |i| u.values()[i].abs()))
}

/// Modular over pre-resolved sections, with `|u_i|` supplied by `value`.
pub(crate) fn modular_of(sections: &[Section], space: &GridMeasureSpace, value: impl Fn(usize) -> f64) -> ExtReal {
    let mut acc = ExtReal::ZERO;
    for (i, (s, a)) in sections.iter().zip(space.atoms()).enumerate() {
        let x = value(i);
        if x == 0.0 {
            continue;
        }
        acc += s.value(x).scale(a.w);
        if acc.is_infinite() {
            break;
        }
    }
    acc
}

/// `Σ w_i Φ(t_i, y_i)` where the per-atom arguments may themselves be infinite
/// (`Φ(t, ∞) = ∞`).
pub(crate) fn modular_ext(sections: &[Section], space: &GridMeasureSpace, value: impl Fn(usize) -> ExtReal) -> ExtReal {
    let mut acc = ExtReal::ZERO;
    for (i, (s, a)) in sections.iter().zip(space.atoms()).enumerate() {
        let y = match value(i) {
            ExtReal::Finite(0.0) => continue,
            ExtReal::Finite(x) => s.value(x),
            ExtReal::Infinite => ExtReal::Infinite,
        };
        acc += y.scale(a.w);
        if acc.is_infinite() {
            break;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::{Finite, Infinite};

    fn two_atoms() -> GridMeasureSpace {
        GridMeasureSpace::uniform(2).unwrap()
    }

    fn site() -> Site {
        Site::new(0, 0.25)
    }

    #[test]
    fn eval_phi_examples() {
        assert_eq!(eval_phi(&OrliczGenerator::power(2.0).unwrap(), site(), 3.0).unwrap(), Finite(4.5));
        let ind = OrliczGenerator::indicator(1.0).unwrap();
        assert_eq!(eval_phi(&ind, site(), 1.0).unwrap(), Finite(0.0));
        assert_eq!(eval_phi(&ind, site(), 1.5).unwrap(), Infinite);
        let e = eval_phi(&OrliczGenerator::exp_minus_one(), site(), 1.0).unwrap().to_f64();
        assert!((e - 0.718_281_828_459_045).abs() < 1e-12);
        assert!(matches!(eval_phi(&ind, site(), -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn subdiff_examples() {
        let p2 = OrliczGenerator::power(2.0).unwrap();
        assert_eq!(subdiff(&p2, site(), 3.0).unwrap(), (Finite(3.0), Finite(3.0)));
        let kink = OrliczGenerator::piecewise(SubdiffGraph::kinked_quadratic(1.0, 1.0, Tail::Ray { slope: 0.0 }).unwrap());
        assert_eq!(subdiff(&kink, site(), 1.0).unwrap(), (Finite(1.0), Finite(2.0)));
        let ind = OrliczGenerator::indicator(1.0).unwrap();
        assert_eq!(subdiff(&ind, site(), 1.0).unwrap(), (Finite(0.0), Infinite));
        assert_eq!(subdiff(&ind, site(), 0.0).unwrap(), (Finite(0.0), Finite(0.0)));
        assert!(matches!(subdiff(&ind, site(), 2.0), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn piecewise_subdiff_matches_difference_quotients() {
        let kink = OrliczGenerator::piecewise(SubdiffGraph::kinked_quadratic(1.0, 1.0, Tail::Ray { slope: 0.0 }).unwrap());
        let s = kink.section(site()).unwrap();
        let h = 1e-7;
        let left = (s.value(1.0).to_f64() - s.value(1.0 - h).to_f64()) / h;
        let right = (s.value(1.0 + h).to_f64() - s.value(1.0).to_f64()) / h;
        assert!((left - 1.0).abs() < 1e-6 && (right - 2.0).abs() < 1e-6);
    }

    #[test]
    fn bounds_examples() {
        let p2 = OrliczGenerator::power(2.0).unwrap();
        assert_eq!(generator_bounds(&p2, site()).unwrap(), (0.0, Infinite));
        let ind = OrliczGenerator::indicator(1.0).unwrap();
        assert_eq!(generator_bounds(&ind, site()).unwrap(), (1.0, Finite(1.0)));
        let lin_conj = OrliczGenerator::linear().conjugate();
        assert_eq!(generator_bounds(&lin_conj, site()).unwrap(), (1.0, Finite(1.0)));
    }

    #[test]
    fn modular_examples() {
        let s = two_atoms();
        let p2 = OrliczGenerator::power(2.0).unwrap();
        assert_eq!(modular(&p2, &s, &vec![1.0, 1.0].into()).unwrap(), Finite(0.5));
        let ind = OrliczGenerator::indicator(1.0).unwrap();
        assert_eq!(modular(&ind, &s, &SimpleFunction::zeros(2)).unwrap(), Finite(0.0));
        assert_eq!(modular(&ind, &s, &vec![1.0, 2.0].into()).unwrap(), Infinite);
        assert!(matches!(modular(&p2, &s, &vec![1.0].into()), Err(Error::SpaceMismatch { .. })));
    }

    #[test]
    fn truncate_examples() {
        let ind = OrliczGenerator::indicator(1.0).unwrap();
        let t5 = ind.truncate(5.0).unwrap().section(site()).unwrap();
        assert_eq!(t5.value(0.7), Finite(0.0));
        assert_eq!(t5.value(1.0), Finite(0.0));
        assert_eq!(t5.value(2.0), Finite(5.0));
        let p2 = OrliczGenerator::power(2.0).unwrap();
        let inactive = p2.truncate(100.0).unwrap().section(site()).unwrap();
        let base = p2.section(site()).unwrap();
        for u in [0.0, 0.5, 3.0, 50.0] {
            assert_eq!(inactive.value(u), base.value(u));
        }
        // ∫_0^3 min(x, 1) dx = 2.5
        assert_eq!(p2.truncate(1.0).unwrap().section(site()).unwrap().value(3.0), Finite(2.5));
        assert!(p2.truncate(0.0).is_err());
    }

    #[test]
    fn variable_exponent_requires_matching_space() {
        let g = OrliczGenerator::variable_exponent(vec![2.0, 3.0, 4.0]).unwrap();
        assert!(matches!(g.sections(&two_atoms()), Err(Error::SpaceMismatch { .. })));
        assert!(OrliczGenerator::variable_exponent(vec![2.0, 1.0]).is_err());
    }

    #[test]
    fn conjugate_families_are_closed_forms() {
        let s = two_atoms();
        for (g, name) in [
            (OrliczGenerator::power(3.0).unwrap(), "power(p=1.5)"),
            (OrliczGenerator::linear(), "indicator(c=1)"),
            (OrliczGenerator::indicator(2.0).unwrap(), "linear(slope=2)"),
            (OrliczGenerator::exp_minus_one(), "exp-conjugate"),
        ] {
            assert_eq!(g.conjugate().name(), name);
            assert!(g.conjugate().sections(&s).is_ok());
        }
        let t = OrliczGenerator::exp_minus_one().truncate(3.0).unwrap();
        assert!(t.conjugate().capabilities().numeric);
    }
}

//! Legendre–Fenchel conjugation and Young-inequality diagnostics.

use crate::error::{Error, Result};
use crate::ext::{ExtReal, Finite, Infinite};
use crate::generator::OrliczGenerator;
use crate::space::Site;

/// `Φ*(t, v) = sup_{u>0} (uv - Φ(t, u))`, in closed form where the family
/// has one.
pub fn conjugate(gen: &OrliczGenerator) -> OrliczGenerator {
    gen.conjugate()
}

/// The conjugate evaluated by golden-section search on every atom, even when
/// a closed form exists. Used as an independent check of the closed forms.
pub fn numeric_conjugate(gen: &OrliczGenerator) -> OrliczGenerator {
    gen.numeric_conjugate()
}

/// `Φ(t, u) + Φ*(t, v) - uv`.
///
/// Nonnegative by Young's inequality up to rounding, so the result is a
/// signed float rather than an [`ExtReal`]; `+∞` when either term is
/// infinite.
pub fn young_gap(gen: &OrliczGenerator, site: Site, u: f64, v: f64) -> Result<f64> {
    if !(u >= 0.0) || !(v >= 0.0) {
        return Err(Error::Domain(format!("young_gap needs u, v >= 0, got u={u}, v={v}")));
    }
    let s = gen.section(site)?;
    let c = s.conjugate();
    Ok(match (s.value(u), c.value(v)) {
        (Finite(a), Finite(b)) => a + b - u * v,
        _ => f64::INFINITY,
    })
}

/// `max |Φ**(t, u) - Φ(t, u)|` over `u_grid`, with both conjugations done
/// numerically. A finite/infinite mismatch gives `+∞`.
pub fn biconjugate_residual(gen: &OrliczGenerator, site: Site, u_grid: &[f64]) -> Result<f64> {
    let s = gen.section(site)?;
    let bi = s.numeric_conjugate().numeric_conjugate();
    let mut worst = 0.0_f64;
    for &u in u_grid {
        if !(u >= 0.0) {
            return Err(Error::Domain(format!("biconjugate grid point {u} is negative")));
        }
        let r = match (s.value(u), bi.value(u)) {
            (Finite(a), Finite(b)) => (a - b).abs(),
            (Infinite, Infinite) => 0.0,
            _ => f64::INFINITY,
        };
        worst = worst.max(r);
    }
    Ok(worst)
}

/// `Φ*(t, v)` on a grid of `v`, closed form when available.
pub fn conjugate_table(gen: &OrliczGenerator, site: Site, vs: &[f64]) -> Result<Vec<(f64, ExtReal)>> {
    let c = gen.section(site)?.conjugate();
    vs.iter()
        .map(|&v| {
            if v >= 0.0 {
                Ok((v, c.value(v)))
            } else {
                Err(Error::Domain(format!("Φ* is defined for v >= 0, got {v}")))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{SubdiffGraph, Tail};

    fn site() -> Site {
        Site::new(0, 0.25)
    }

    /// Crude supremum over a uniform grid; a lower bound for `Φ*(v)`.
    fn grid_sup(gen: &OrliczGenerator, v: f64, hi: f64) -> f64 {
        let s = gen.section(site()).unwrap();
        (0..=200_000)
            .map(|j| hi * j as f64 / 200_000.0)
            .filter_map(|u| s.value(u).finite().map(|phi| u * v - phi))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn power_three_conjugate_at_one() {
        let g = OrliczGenerator::power(3.0).unwrap();
        let c = conjugate(&g).section(site()).unwrap().value(1.0).to_f64();
        assert!((c - 2.0 / 3.0).abs() < 1e-14);
        assert!((grid_sup(&g, 1.0, 3.0) - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn indicator_conjugate_is_linear() {
        let g = OrliczGenerator::indicator(1.0).unwrap();
        assert_eq!(conjugate(&g).section(site()).unwrap().value(2.0), Finite(2.0));
        assert!((grid_sup(&g, 2.0, 5.0) - 2.0).abs() < 1e-12);
        let n = numeric_conjugate(&g).section(site()).unwrap().value(2.0).to_f64();
        assert!((n - 2.0).abs() < 1e-9);
    }

    #[test]
    fn conjugate_at_zero_is_zero() {
        for g in [
            OrliczGenerator::power(2.0).unwrap(),
            OrliczGenerator::linear(),
            OrliczGenerator::exp_minus_one(),
            OrliczGenerator::indicator(1.0).unwrap(),
        ] {
            assert_eq!(conjugate(&g).section(site()).unwrap().value(0.0), Finite(0.0));
            assert_eq!(numeric_conjugate(&g).section(site()).unwrap().value(0.0), Finite(0.0));
        }
    }

    #[test]
    fn young_gap_examples() {
        let p2 = OrliczGenerator::power(2.0).unwrap();
        assert_eq!(young_gap(&p2, site(), 3.0, 3.0).unwrap(), 0.0);
        assert!((young_gap(&p2, site(), 3.0, 2.0).unwrap() - 0.5).abs() < 1e-15);
        let ind = OrliczGenerator::indicator(1.0).unwrap();
        assert_eq!(young_gap(&ind, site(), 1.0, 7.0).unwrap(), 0.0);
        assert_eq!(young_gap(&ind, site(), 2.0, 7.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn biconjugate_examples() {
        let cases: [(OrliczGenerator, &[f64]); 4] = [
            (OrliczGenerator::power(2.0).unwrap(), &[0.0, 1.0, 2.0, 3.0]),
            (OrliczGenerator::linear(), &[0.0, 0.5, 1.0]),
            (OrliczGenerator::indicator(1.0).unwrap(), &[0.5, 1.0]),
            (
                OrliczGenerator::piecewise(SubdiffGraph::kinked_quadratic(1.0, 1.0, Tail::Ray { slope: 0.0 }).unwrap()),
                &[0.0, 0.5, 1.0, 1.5, 3.0],
            ),
        ];
        for (g, grid) in cases {
            let r = biconjugate_residual(&g, site(), grid).unwrap();
            assert!(r <= 1e-9, "{}: {r}", g.name());
        }
    }

    #[test]
    fn table_is_closed_form() {
        let t = conjugate_table(&OrliczGenerator::linear(), site(), &[0.5, 1.0, 1.5]).unwrap();
        assert_eq!(t, vec![(0.5, Finite(0.0)), (1.0, Finite(0.0)), (1.5, Infinite)]);
    }
}

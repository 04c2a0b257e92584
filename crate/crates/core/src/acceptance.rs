//! The acceptance suite: twelve numbered checks with closed-form or
//! brute-force oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::conjugate::{biconjugate_residual, young_gap};
use crate::duality::{holder_gap, luxemburg_norm_bruteforce, orlicz_norm_bruteforce, truncated_norm_sequence};
use crate::error::Result;
use crate::ext::ExtReal;
use crate::gallery::{gallery_generators, half_space, two_atom_gallery};
use crate::generator::{OrliczGenerator, SubdiffGraph, Tail};
use crate::geometry::{
    check_space_smoothness, classify_smooth_point, construct_support_functional, support_density_census,
    verify_support_functional, Branch, SmoothnessSample, Verdict,
};
use crate::norms::{
    amemiya_objective, delta2_check, luxemburg_norm, orlicz_amemiya_norm, theta, Delta2Samples,
    Delta2Verdict, KSet,
};
use crate::space::{sgn, Atom, GridMeasureSpace, SimpleFunction};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "[PRIMARY] criterion {:>2} {status}  {}: {}", self.id, self.title, self.detail)
    }
}

pub const TITLES: [&str; 12] = [
    "norm equivalence",
    "orlicz equals amemiya",
    "power closed forms",
    "conjugation",
    "k-interval attainment",
    "duality expressions",
    "support functionals",
    "smooth-point classifier",
    "space smoothness",
    "truncation convergence",
    "theta functional",
    "delta2 classification",
];

type Check = fn() -> Result<(bool, String)>;

const CHECKS: [Check; 12] = [c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12];

pub fn run(id: u8) -> Outcome {
    let k = usize::from(id) - 1;
    let (pass, detail) = match CHECKS[k]() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome { id, title: TITLES[k], pass, detail }
}

pub fn run_all() -> Vec<Outcome> {
    (1..=12).map(run).collect()
}

fn f(v: &[f64]) -> SimpleFunction {
    SimpleFunction::new(v.to_vec()).expect("finite")
}

fn kink(tail: Tail) -> OrliczGenerator {
    OrliczGenerator::piecewise(SubdiffGraph::kinked_quadratic(1.0, 1.0, tail).expect("valid"))
}

fn random_space(rng: &mut ChaCha8Rng, n: usize) -> GridMeasureSpace {
    let mut t = 0.0;
    let atoms = (0..n)
        .map(|_| {
            t += rng.gen_range(0.05..1.0);
            Atom { t, w: rng.gen_range(0.1..1.0) }
        })
        .collect();
    GridMeasureSpace::new(atoms).expect("valid")
}

fn random_u(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> SimpleFunction {
    loop {
        let v: Vec<f64> =
            (0..n).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(-scale..scale) }).collect();
        if v.iter().any(|x| *x != 0.0) {
            return f(&v);
        }
    }
}

fn random_generator(rng: &mut ChaCha8Rng, n: usize) -> OrliczGenerator {
    match rng.gen_range(0..9) {
        0 => OrliczGenerator::power(rng.gen_range(1.2..4.0)).expect("valid"),
        1 => OrliczGenerator::variable_exponent((0..n).map(|_| rng.gen_range(1.2..4.0)).collect()).expect("valid"),
        2 => OrliczGenerator::exp_minus_one(),
        3 => OrliczGenerator::linear_with_slope(rng.gen_range(0.5..2.0)).expect("valid"),
        4 => OrliczGenerator::indicator(rng.gen_range(0.5..2.0)).expect("valid"),
        5 => kink(Tail::Ray { slope: 0.0 }),
        6 => kink(Tail::Ray { slope: 1.0 }),
        7 => OrliczGenerator::exp_minus_one().truncate(rng.gen_range(1.0..10.0)).expect("valid"),
        _ => OrliczGenerator::indicator(1.0).expect("valid").truncate(rng.gen_range(1.0..50.0)).expect("valid"),
    }
}

fn weighted_p_norm(space: &GridMeasureSpace, u: &SimpleFunction, p: f64) -> f64 {
    let s: f64 = (0..space.len()).map(|i| space.weight(i) * u.values()[i].abs().powf(p)).sum();
    s.powf(1.0 / p)
}

fn c1() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = f64::NEG_INFINITY;
    let mut bad = None;
    for trial in 0..1000 {
        let n = rng.gen_range(2..=8);
        let space = random_space(&mut rng, n);
        let phi = random_generator(&mut rng, n);
        let u = random_u(&mut rng, n, 3.0);
        let lux = luxemburg_norm(&phi, &space, &u)?;
        let (orl, _) = orlicz_amemiya_norm(&phi, &space, &u)?;
        let excess = (lux - orl).max(orl - 2.0 * lux);
        worst = worst.max(excess);
        if excess > 1e-9 && bad.is_none() {
            bad = Some(format!("trial {trial}: {} lux={lux} orl={orl}", phi.name()));
        }
    }
    let p2 = OrliczGenerator::power(2.0)?;
    let u = f(&[1.0, 1.0]);
    let ratio = orlicz_amemiya_norm(&p2, &half_space(), &u)?.0 / luxemburg_norm(&p2, &half_space(), &u)?;
    let pass = bad.is_none() && (ratio - 2.0).abs() <= 1e-9;
    let mut d = format!("1000 random instances, worst excess {worst:.2e}; power(2) ratio {ratio:.12}");
    if let Some(b) = bad {
        d.push_str(&format!("; {b}"));
    }
    Ok((pass, d))
}

fn c2() -> Result<(bool, String)> {
    let mut worst = (0.0_f64, String::new());
    for g in two_atom_gallery() {
        let brute = orlicz_norm_bruteforce(&g.phi, &g.space, &g.u, 400)?;
        let (am, _) = orlicz_amemiya_norm(&g.phi, &g.space, &g.u)?;
        let d = (brute - am).abs();
        if d > worst.0 {
            worst = (d, g.name.clone());
        }
    }
    Ok((worst.0 <= 5e-3, format!("{} instances, worst |brute - amemiya| = {:.2e} ({})", two_atom_gallery().len(), worst.0, worst.1)))
}

fn c3() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0_f64;
    for p in [1.5, 2.0, 3.0] {
        let phi = OrliczGenerator::power(p)?;
        let q = p / (p - 1.0);
        for _ in 0..100 {
            let n = rng.gen_range(2..=8);
            let space = random_space(&mut rng, n);
            let u = random_u(&mut rng, n, 2.0);
            let np = weighted_p_norm(&space, &u, p);
            let lux = luxemburg_norm(&phi, &space, &u)?;
            let (orl, _) = orlicz_amemiya_norm(&phi, &space, &u)?;
            worst = worst.max((lux - p.powf(-1.0 / p) * np).abs());
            worst = worst.max((orl - q.powf(1.0 / q) * np).abs());
        }
    }
    Ok((worst <= 1e-9, format!("300 random u over p in {{1.5, 2, 3}}, worst deviation {worst:.2e}")))
}

fn builtins() -> Vec<OrliczGenerator> {
    let mut g = gallery_generators();
    g.push(OrliczGenerator::new(crate::generator::Family::ExpConjugate).expect("valid"));
    g.push(kink(Tail::Vertical));
    g.push(OrliczGenerator::indicator(1.0).expect("valid").truncate(10.0).expect("valid"));
    g
}

fn c4() -> Result<(bool, String)> {
    let space = half_space();
    let grid: Vec<f64> = (0..=40).map(|j| 0.1 * j as f64).collect();
    let mut worst_bi = (0.0_f64, String::new());
    for g in builtins() {
        for site in space.sites() {
            let r = biconjugate_residual(&g, site, &grid)?;
            if r > worst_bi.0 {
                worst_bi = (r, g.name());
            }
        }
    }
    let gens = builtins();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut min_gap = f64::INFINITY;
    let mut worst_eq = 0.0_f64;
    for _ in 0..10_000 {
        let g = &gens[rng.gen_range(0..gens.len())];
        let site = space.site(rng.gen_range(0..2));
        let (u, v) = (rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0));
        min_gap = min_gap.min(young_gap(g, site, u, v)?);
        let s = g.section(site)?;
        if let (ExtReal::Finite(lo), ExtReal::Finite(hi)) = (s.dminus(u), s.dplus(u)) {
            let w = lo + rng.gen_range(0.0..=1.0) * (hi - lo);
            worst_eq = worst_eq.max(young_gap(g, site, u, w)?.abs());
        }
    }
    let pass = worst_bi.0 <= 1e-8 && min_gap >= -1e-12 && worst_eq <= 1e-9;
    Ok((
        pass,
        format!(
            "biconjugate residual {:.2e} ({}); min young gap {min_gap:.2e}; subdifferential pairs {worst_eq:.2e}",
            worst_bi.0, worst_bi.1
        ),
    ))
}

fn c5() -> Result<(bool, String)> {
    let mut cases: Vec<(OrliczGenerator, GridMeasureSpace, SimpleFunction)> =
        two_atom_gallery().into_iter().map(|g| (g.phi, g.space, g.u)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let n = rng.gen_range(2..=6);
        let space = random_space(&mut rng, n);
        let phi = random_generator(&mut rng, n);
        let u = random_u(&mut rng, n, 3.0);
        cases.push((phi, space, u));
    }
    let mut interior = 0.0_f64;
    let mut exterior_ok = true;
    let mut degenerate_err = 0.0_f64;
    let mut degenerate = 0;
    for (phi, space, u) in &cases {
        let (norm, kset) = orlicz_amemiya_norm(phi, space, u)?;
        match kset.expect("nonzero u") {
            KSet::NonEmpty { k_star, k_double_star } => {
                for j in 0..20 {
                    let k = k_star + (k_double_star - k_star) * (j as f64 + 0.5) / 20.0;
                    let h = amemiya_objective(phi, space, u, k)?;
                    interior = interior.max((h.to_f64() - norm).abs());
                }
                for k in [0.99 * k_star, 1.01 * k_double_star] {
                    if !(ExtReal::Finite(norm) < amemiya_objective(phi, space, u, k)?) {
                        exterior_ok = false;
                    }
                }
            }
            KSet::Degenerate { .. } => {}
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..50 {
        let n = rng.gen_range(2..=8);
        let space = random_space(&mut rng, n);
        let slope = rng.gen_range(0.5..2.0);
        let phi = OrliczGenerator::linear_with_slope(slope)?;
        let u = random_u(&mut rng, n, 3.0);
        let oracle: f64 = (0..n).map(|i| space.weight(i) * u.values()[i].abs() * slope).sum();
        let (norm, kset) = orlicz_amemiya_norm(&phi, &space, &u)?;
        if matches!(kset, Some(KSet::Degenerate { .. })) {
            degenerate += 1;
        }
        degenerate_err = degenerate_err.max((norm - oracle).abs());
    }
    let pass = interior <= 1e-8 && exterior_ok && degenerate == 50 && degenerate_err <= 1e-12;
    Ok((
        pass,
        format!(
            "{} instances, interior deviation {interior:.2e}, exterior strict: {exterior_ok}; linear degenerate {degenerate}/50 with error {degenerate_err:.2e}",
            cases.len()
        ),
    ))
}

fn c6() -> Result<(bool, String)> {
    let mut worst_lux = (0.0_f64, String::new());
    for g in two_atom_gallery() {
        let brute = luxemburg_norm_bruteforce(&g.phi, &g.space, &g.u, 400)?;
        let lux = luxemburg_norm(&g.phi, &g.space, &g.u)?;
        let d = (brute - lux).abs();
        if d > worst_lux.0 {
            worst_lux = (d, g.name.clone());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let gens = gallery_generators();
    let space = half_space();
    let mut min_gap = f64::INFINITY;
    for _ in 0..200 {
        let g = &gens[rng.gen_range(0..gens.len())];
        let u = random_u(&mut rng, 2, 3.0);
        let v = random_u(&mut rng, 2, 3.0);
        min_gap = min_gap.min(holder_gap(g, &space, &u, &v)?);
    }
    let mut worst_eq = 0.0_f64;
    let mut pairs = 0;
    for g in two_atom_gallery() {
        let sf = construct_support_functional(&g.phi, &g.space, &g.u)?;
        if sf.s_norm > 0.0 {
            continue;
        }
        // Hölder with the roles swapped: ‖v‖_{Φ*} = 1 and ∫uv = ‖u‖_{Φ,0}
        let gap = holder_gap(&g.phi.conjugate(), &g.space, &sf.density, &g.u)?;
        worst_eq = worst_eq.max(gap.abs());
        pairs += 1;
    }
    for p in [1.5, 2.0, 3.0] {
        let phi = OrliczGenerator::power(p)?;
        for u in [[1.0, 1.0], [1.0, -2.0], [0.5, 2.0]] {
            let u = f(&u);
            let v = power_luxemburg_support(&u, p, luxemburg_norm(&phi, &space, &u)?);
            worst_eq = worst_eq.max(holder_gap(&phi, &space, &u, &v)?.abs());
            pairs += 1;
        }
    }
    let pass = worst_lux.0 <= 5e-3 && min_gap >= -1e-9 && worst_eq <= 1e-6;
    Ok((
        pass,
        format!(
            "luxemburg brute force {:.2e} ({}); min holder gap {min_gap:.2e}; equality on {pairs} support pairs {worst_eq:.2e}",
            worst_lux.0, worst_lux.1
        ),
    ))
}

fn c7() -> Result<(bool, String)> {
    let mut cases: Vec<(OrliczGenerator, GridMeasureSpace, SimpleFunction)> =
        two_atom_gallery().into_iter().map(|g| (g.phi, g.space, g.u)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let n = rng.gen_range(2..=6);
        let space = random_space(&mut rng, n);
        let phi = random_generator(&mut rng, n);
        let u = random_u(&mut rng, n, 3.0);
        cases.push((phi, space, u));
    }
    let (mut checked, mut worst_a, mut worst_n, mut verify_fail) = (0, 0.0_f64, 0.0_f64, 0);
    for (phi, space, u) in &cases {
        let sf = construct_support_functional(phi, space, u)?;
        if sf.branch != Branch::KuNonEmpty || sf.s_norm > 0.0 {
            continue;
        }
        checked += 1;
        worst_a = worst_a.max((sf.achieved - sf.orlicz_norm).abs() / sf.orlicz_norm.max(1.0));
        worst_n = worst_n.max((sf.norm_value - 1.0).abs());
        if !verify_support_functional(phi, space, u, &sf.dual())?.pass {
            verify_fail += 1;
        }
    }
    let pass = worst_a <= 1e-7 && worst_n <= 1e-7 && verify_fail == 0;
    Ok((
        pass,
        format!("{checked} instances, |f(u) - norm| {worst_a:.2e}, |norm f - 1| {worst_n:.2e}, verify failures {verify_fail}"),
    ))
}

/// The curated two-atom suite for the smooth-point classifier.
pub fn curated_smooth_point_suite() -> Vec<(String, OrliczGenerator, SimpleFunction)> {
    let flat = SubdiffGraph::new(vec![(0.0, 0.0), (1.0, 1.0), (1.0, 1.5), (2.0, 1.5)], Tail::Ray { slope: 1.0 })
        .expect("valid graph");
    let cases = vec![
        (OrliczGenerator::power(2.0).expect("valid"), [1.0, 1.0]),
        (OrliczGenerator::power(3.0).expect("valid"), [1.0, -2.0]),
        (OrliczGenerator::power(1.5).expect("valid"), [0.5, 2.0]),
        (OrliczGenerator::variable_exponent(vec![2.0, 3.0]).expect("valid"), [1.0, 1.0]),
        (OrliczGenerator::exp_minus_one(), [1.0, 2.0]),
        (kink(Tail::Ray { slope: 0.0 }), [1.0, 1.0]),
        (kink(Tail::Ray { slope: 1.0 }), [1.0, 1.0]),
        (kink(Tail::Ray { slope: 0.0 }), [0.25, 0.5]),
        (OrliczGenerator::piecewise(flat), [1.0, 1.0]),
        (OrliczGenerator::linear(), [0.0, 2.0]),
        (OrliczGenerator::linear(), [1.0, 2.0]),
    ];
    cases.into_iter().map(|(g, u)| (format!("{} u=({}, {})", g.name(), u[0], u[1]), g, f(&u))).collect()
}

fn c8() -> Result<(bool, String)> {
    let space = half_space();
    let suite = curated_smooth_point_suite();
    let mut disagree = Vec::new();
    for (name, g, u) in &suite {
        let r = classify_smooth_point(g, &space, u)?;
        let census = support_density_census(g, &space, u, 400)?;
        let brute = if census.classes == 1 { Verdict::Smooth } else { Verdict::NotSmooth };
        if r.verdict != brute {
            disagree.push(format!("{name}: {:?} vs {} classes", r.verdict, census.classes));
        }
    }
    let k = classify_smooth_point(&kink(Tail::Ray { slope: 0.0 }), &space, &f(&[1.0, 1.0]))?;
    let kink_ok = match &k.witness {
        Some((a, b)) => [a, b].iter().all(|w| (w.values()[0] + w.values()[1] - 3.0).abs() <= 1e-7) && a != b,
        None => false,
    };
    let l = classify_smooth_point(&OrliczGenerator::linear(), &space, &f(&[0.0, 2.0]))?;
    let lin_ok = l.verdict == Verdict::NotSmooth && l.branch == Branch::KuEmpty && l.witness.is_some();
    let pass = disagree.is_empty() && kink_ok && lin_ok;
    let mut d = format!(
        "{}/{} agree with census at resolution 400; kink witnesses on a+b=3: {kink_ok}; linear off-support not smooth: {lin_ok}",
        suite.len() - disagree.len(),
        suite.len()
    );
    if !disagree.is_empty() {
        d.push_str(&format!("; {}", disagree.join("; ")));
    }
    Ok((pass, d))
}

fn c9() -> Result<(bool, String)> {
    let space = half_space();
    let sample = SmoothnessSample::default();
    let mut cases: Vec<(OrliczGenerator, Vec<&str>)> =
        [1.5, 2.0, 3.0].iter().map(|&p| (OrliczGenerator::power(p).expect("valid"), vec![])).collect();
    cases.push((OrliczGenerator::linear(), vec!["a", "c"]));
    cases.push((OrliczGenerator::indicator(1.0)?, vec!["b", "c"]));
    cases.push((kink(Tail::Ray { slope: 1.0 }), vec!["c"]));
    cases.push((OrliczGenerator::exp_minus_one(), vec!["b"]));
    let mut wrong = Vec::new();
    for (g, expected) in &cases {
        let r = check_space_smoothness(g, &space, &sample)?;
        if r.failing() != *expected || r.verdict != expected.is_empty() {
            wrong.push(format!("{}: failing {:?}, expected {:?}", g.name(), r.failing(), expected));
        }
    }
    let d = if wrong.is_empty() {
        format!("{} families with expected failing sets", cases.len())
    } else {
        wrong.join("; ")
    };
    Ok((wrong.is_empty(), d))
}

fn c10() -> Result<(bool, String)> {
    let ind = OrliczGenerator::indicator(1.0)?;
    let levels = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0];
    let seq = truncated_norm_sequence(&ind, &half_space(), &f(&[1.0, 2.0]), &levels)?;
    let monotone = seq.values.windows(2).all(|w| w[0].1 <= w[1].1);
    let last = seq.values.last().map_or(f64::NAN, |x| x.1);
    let gap = (last - 2.0).abs();
    Ok((monotone && gap <= 2e-3, format!("nondecreasing: {monotone}; norm at n=1000 is {last:.9}, |gap| {gap:.3e} (band 2e-3)")))
}

fn c11() -> Result<(bool, String)> {
    let space = half_space();
    let t = theta(&OrliczGenerator::indicator(1.0)?, &space, &f(&[1.0, 2.0]))?;
    let mut nonzero = Vec::new();
    for g in gallery_generators().into_iter().filter(|g| g.capabilities().finite_valued) {
        for u in [[1.0, 2.0], [-3.0, 0.5], [0.0, 7.0]] {
            let x = theta(&g, &space, &f(&u))?;
            if x != 0.0 {
                nonzero.push(format!("{}: {x}", g.name()));
            }
        }
    }
    let pass = (t - 2.0).abs() <= 1e-10 && nonzero.is_empty();
    Ok((pass, format!("theta(indicator, (1, 2)) = {t}; finite-valued families with nonzero theta: {}", nonzero.len())))
}

fn c12() -> Result<(bool, String)> {
    let space = half_space();
    let zero = SimpleFunction::zeros(2);
    let samples = Delta2Samples::default();
    let mut power_ok = true;
    for p in [1.5, 2.0, 3.0, 4.5] {
        let v = delta2_check(&OrliczGenerator::power(p)?, &space, 2f64.powf(p), &zero, &samples)?;
        power_ok &= v.holds();
    }
    let exp = delta2_check(&OrliczGenerator::exp_minus_one(), &space, 100.0, &zero, &samples)?;
    let exp_ok = match exp {
        Delta2Verdict::Violated { ratio, .. } => ExtReal::Finite(100.0) < ratio,
        _ => false,
    };
    let ind = delta2_check(&OrliczGenerator::indicator(1.0)?, &space, 100.0, &zero, &samples)?;
    let ind_ok = match ind {
        Delta2Verdict::Violated { u, phi_u, phi_2u, .. } => u <= 1.0 && phi_u.is_finite() && !phi_2u.is_finite(),
        _ => false,
    };
    Ok((power_ok && exp_ok && ind_ok, format!("power holds with K=2^p: {power_ok}; exp violated above K=100: {exp_ok}; indicator violated at the threshold: {ind_ok}")))
}

/// `sgn(u) |u|^{p-1} / λ^{p-1}` for `Φ = u^p/p`: the density attaining the
/// Luxemburg norm `λ` in Hölder's inequality.
pub fn power_luxemburg_support(u: &SimpleFunction, p: f64, lambda: f64) -> SimpleFunction {
    u.map(|x| sgn(x) * (x.abs() / lambda).powf(p - 1.0))
}

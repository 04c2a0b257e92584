use orlicz_core::acceptance::curated_smooth_point_suite;
use orlicz_core::gallery::{gallery_generators, half_space, two_atom_gallery};
use orlicz_core::geometry::{
    check_space_smoothness, classify_smooth_point, construct_support_functional, smoothness_gap_function,
    verify_support_functional, SmoothnessSample, Verdict,
};
use orlicz_core::{k_interval, ExtReal, GridMeasureSpace, OrliczGenerator, SimpleFunction};

#[test]
fn witnesses_pass_verification() {
    let s = half_space();
    for (name, g, u) in curated_smooth_point_suite() {
        let r = classify_smooth_point(&g, &s, &u).unwrap();
        if let Some((a, b)) = &r.witness {
            assert_eq!(r.verdict, Verdict::NotSmooth, "{name}");
            for w in [a, b] {
                let d = orlicz_core::duality::DualDensity::regular(w.clone());
                assert!(verify_support_functional(&g, &s, &u, &d).unwrap().pass, "{name}");
            }
        }
    }
}

#[test]
fn proper_k_interval_forces_a_unique_support_functional() {
    let s = half_space();
    let mut seen = 0;
    for g in two_atom_gallery() {
        let Some((a, b)) = k_interval(&g.phi, &g.space, &g.u).unwrap().bounds() else { continue };
        if b - a > 1e-6 {
            seen += 1;
            let sf = construct_support_functional(&g.phi, &s, &g.u).unwrap();
            assert_eq!(sf.s_norm, 0.0, "{}", g.name);
            assert_eq!(classify_smooth_point(&g.phi, &s, &g.u).unwrap().verdict, Verdict::Smooth, "{}", g.name);
        }
    }
    assert!(seen > 0);
}

#[test]
fn gap_function_postcondition() {
    let s = half_space();
    for g in gallery_generators() {
        for delta in [0.01, 0.1, 0.5, 1.0, 2.0] {
            let r = smoothness_gap_function(&g, &s, delta).unwrap();
            for (i, u) in r.u_delta.iter().enumerate() {
                let sec = g.section(s.site(i)).unwrap();
                let gap = |x: f64| match (sec.dminus(x), sec.dplus(x)) {
                    (ExtReal::Finite(a), ExtReal::Finite(b)) => b - a,
                    (ExtReal::Finite(_), ExtReal::Infinite) => f64::INFINITY,
                    _ => 0.0,
                };
                let top = match u {
                    ExtReal::Finite(x) => {
                        assert!(gap(*x) >= delta - 1e-9, "{} δ={delta}", g.name());
                        *x
                    }
                    ExtReal::Infinite => 50.0,
                };
                for j in 0..10 {
                    let x = top * j as f64 / 10.0;
                    if x >= top {
                        continue;
                    }
                    assert!(gap(x) < delta, "{} δ={delta} x={x}", g.name());
                }
            }
        }
    }
}

#[test]
fn space_smoothness_is_grid_independent_for_homogeneous_families() {
    for n in [1, 3, 7] {
        let s = GridMeasureSpace::uniform(n).unwrap();
        let r = check_space_smoothness(&OrliczGenerator::power(2.0).unwrap(), &s, &SmoothnessSample::default()).unwrap();
        assert!(r.verdict);
        let r = check_space_smoothness(&OrliczGenerator::linear(), &s, &SmoothnessSample::default()).unwrap();
        assert_eq!(r.failing(), vec!["a", "c"]);
    }
}

#[test]
fn support_functionals_on_larger_grids() {
    let s = GridMeasureSpace::uniform(6).unwrap();
    let u = SimpleFunction::new(vec![1.0, -2.0, 0.0, 0.5, 3.0, -1.0]).unwrap();
    for g in gallery_generators().into_iter().filter(|g| g.atom_count().is_none()) {
        let sf = construct_support_functional(&g, &s, &u).unwrap();
        if sf.s_norm > 0.0 {
            continue;
        }
        assert!((sf.norm_value - 1.0).abs() <= 1e-7, "{}", g.name());
        assert!((sf.achieved - sf.orlicz_norm).abs() <= 1e-7 * sf.orlicz_norm.max(1.0), "{}", g.name());
        assert!(verify_support_functional(&g, &s, &u, &sf.dual()).unwrap().pass, "{}", g.name());
    }
}

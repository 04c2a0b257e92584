//! Named example instances and the variable-exponent divergence demo.

use serde::Serialize;

use crate::error::Result;
use crate::ext::ExtReal;
use crate::generator::{modular, OrliczGenerator, SubdiffGraph, Tail};
use crate::space::{GridMeasureSpace, SimpleFunction};

#[derive(Debug, Clone)]
pub struct GalleryInstance {
    pub name: String,
    pub phi: OrliczGenerator,
    pub space: GridMeasureSpace,
    pub u: SimpleFunction,
}

/// Two atoms of mass 1/2 at `t = 1/4, 3/4`.
pub fn half_space() -> GridMeasureSpace {
    GridMeasureSpace::from_pairs(&[(0.25, 0.5), (0.75, 0.5)]).expect("valid space")
}

pub fn gallery_generators() -> Vec<OrliczGenerator> {
    let kink = |tail| OrliczGenerator::piecewise(SubdiffGraph::kinked_quadratic(1.0, 1.0, tail).expect("valid graph"));
    let flat = SubdiffGraph::new(vec![(0.0, 0.0), (1.0, 1.0), (1.0, 1.5), (2.0, 1.5)], Tail::Ray { slope: 1.0 })
        .expect("valid graph");
    vec![
        OrliczGenerator::power(1.5).expect("valid"),
        OrliczGenerator::power(2.0).expect("valid"),
        OrliczGenerator::power(3.0).expect("valid"),
        OrliczGenerator::variable_exponent(vec![2.0, 3.0]).expect("valid"),
        OrliczGenerator::exp_minus_one(),
        OrliczGenerator::linear(),
        OrliczGenerator::indicator(1.0).expect("valid"),
        kink(Tail::Ray { slope: 0.0 }),
        kink(Tail::Ray { slope: 1.0 }),
        OrliczGenerator::piecewise(flat),
        OrliczGenerator::exp_minus_one().truncate(5.0).expect("valid"),
    ]
}

pub fn gallery_functions() -> Vec<[f64; 2]> {
    vec![[1.0, 1.0], [1.0, -2.0], [0.5, 2.0], [0.0, 2.0], [0.25, 0.5]]
}

/// Every gallery generator paired with every gallery function on
/// [`half_space`].
pub fn two_atom_gallery() -> Vec<GalleryInstance> {
    let space = half_space();
    let mut out = Vec::new();
    for phi in gallery_generators() {
        for u in gallery_functions() {
            out.push(GalleryInstance {
                name: format!("{} u=({}, {})", phi.name(), u[0], u[1]),
                phi: phi.clone(),
                space: space.clone(),
                u: SimpleFunction::new(u.to_vec()).expect("finite"),
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceRow {
    pub resolution: usize,
    pub function: &'static str,
    pub lambda: f64,
    pub modular: ExtReal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceDemo {
    pub exponent: &'static str,
    pub note: &'static str,
    pub rows: Vec<DivergenceRow>,
}

impl DivergenceDemo {
    pub fn modular(&self, resolution: usize, function: &str, lambda: f64) -> Option<ExtReal> {
        self.rows
            .iter()
            .find(|r| r.resolution == resolution && r.function == function && r.lambda == lambda)
            .map(|r| r.modular)
    }
}

pub const DIVERGENCE_LAMBDAS: [f64; 5] = [0.0, 0.5, 0.99, 1.0, 1.01];

/// `I_Φ(λ u)` for `Φ(t, u) = u^{1 + 1/t}` on uniform grids of `[0, 1]` with
/// `u_lower ≡ 1` and `u_upper(t) = t^{-t/(1+t)}`.
///
/// The grid functions are heuristic analogues only: on a finite grid every
/// modular is finite, and the divergence shows as growth along refinement.
pub fn divergence_demo(ladder: &[usize]) -> Result<DivergenceDemo> {
    let mut rows = Vec::new();
    for &n in ladder {
        let space = GridMeasureSpace::uniform(n)?;
        let ts: Vec<f64> = space.atoms().iter().map(|a| a.t).collect();
        let phi = OrliczGenerator::variable_exponent(ts.iter().map(|t| 1.0 + 1.0 / t).collect())?;
        let lower = SimpleFunction::constant(n, 1.0);
        let upper = SimpleFunction::new(ts.iter().map(|t| t.powf(-t / (1.0 + t))).collect())?;
        for (name, u) in [("u_lower", &lower), ("u_upper", &upper)] {
            for lambda in DIVERGENCE_LAMBDAS {
                rows.push(DivergenceRow { resolution: n, function: name, lambda, modular: modular(&phi, &space, &u.scale(lambda))? });
            }
        }
    }
    Ok(DivergenceDemo {
        exponent: "p(t) = 1 + 1/t",
        note: "heuristic grid analogue; divergence appears as growth along refinement",
        rows,
    })
}

pub const DEFAULT_LADDER: [usize; 7] = [16, 32, 64, 128, 256, 512, 1024];

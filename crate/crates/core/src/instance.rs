//! Instance files: a grid, a generator and named functions.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::generator::{default_sample_grid, validate_generator, Family, OrliczGenerator, SubdiffGraph, Tail};
use crate::space::{Atom, GridMeasureSpace, SimpleFunction};

#[derive(Debug, Clone)]
pub struct Instance {
    pub space: GridMeasureSpace,
    pub phi: OrliczGenerator,
    pub functions: BTreeMap<String, SimpleFunction>,
}

impl Instance {
    pub fn function(&self, name: &str) -> Result<&SimpleFunction> {
        self.functions.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.functions.keys().map(String::as_str).collect();
            Error::Validation(format!("functions.{name}: not defined (known: {})", known.join(", ")))
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    space: SpaceSpec,
    phi: PhiSpec,
    #[serde(default)]
    functions: BTreeMap<String, Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceSpec {
    atoms: Vec<Atom>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Scalar {
    One(f64),
    PerAtom(Vec<f64>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TailSpec {
    Named(String),
    Slope { slope: f64 },
}

fn one() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
enum PhiSpec {
    Power {
        p: Scalar,
    },
    Varexp {
        p_values: Vec<f64>,
        #[serde(default)]
        coefficients: Option<Vec<f64>>,
    },
    #[serde(alias = "exp-minus-one")]
    Exp,
    ExpConjugate,
    Linear {
        #[serde(default = "one")]
        slope: f64,
    },
    Indicator {
        #[serde(default = "one")]
        c: f64,
    },
    Plq {
        vertices: Vec<(f64, f64)>,
        tail: TailSpec,
    },
    Kink {
        #[serde(default = "one")]
        knot: f64,
        #[serde(default = "one")]
        jump: f64,
        tail: TailSpec,
    },
    Truncated {
        base: Box<PhiSpec>,
        n: f64,
    },
}

fn tail(t: TailSpec) -> Result<Tail> {
    match t {
        TailSpec::Slope { slope } => Ok(Tail::Ray { slope }),
        TailSpec::Named(s) => match s.as_str() {
            "vertical" => Ok(Tail::Vertical),
            "linear" => Ok(Tail::Ray { slope: 0.0 }),
            "quadratic" => Ok(Tail::Ray { slope: 1.0 }),
            other => Err(Error::Validation(format!(
                "phi.tail: unknown tail {other:?} (expected vertical, linear, quadratic or {{\"slope\": s}})"
            ))),
        },
    }
}

fn shape(field: &str, found: usize, atoms: usize) -> Result<()> {
    if found == atoms {
        Ok(())
    } else {
        Err(Error::Validation(format!("phi.{field}: expected {atoms} per-atom values, found {found}")))
    }
}

fn family(spec: PhiSpec, atoms: usize) -> Result<Family> {
    Ok(match spec {
        PhiSpec::Power { p: Scalar::One(p) } => Family::Power { p },
        PhiSpec::Power { p: Scalar::PerAtom(ps) } => {
            shape("p", ps.len(), atoms)?;
            let coefficients = ps.iter().map(|p| 1.0 / p).collect();
            Family::VariableExponent { exponents: ps, coefficients }
        }
        PhiSpec::Varexp { p_values, coefficients } => {
            shape("p_values", p_values.len(), atoms)?;
            let coefficients = coefficients.unwrap_or_else(|| vec![1.0; p_values.len()]);
            shape("coefficients", coefficients.len(), atoms)?;
            Family::VariableExponent { exponents: p_values, coefficients }
        }
        PhiSpec::Exp => Family::ExpMinusOne,
        PhiSpec::ExpConjugate => Family::ExpConjugate,
        PhiSpec::Linear { slope } => Family::Linear { slope },
        PhiSpec::Indicator { c } => Family::Indicator { c },
        PhiSpec::Plq { vertices, tail: t } => Family::PiecewiseLinearQuadratic(SubdiffGraph::new(vertices, tail(t)?)?.into()),
        PhiSpec::Kink { knot, jump, tail: t } => {
            Family::PiecewiseLinearQuadratic(SubdiffGraph::kinked_quadratic(knot, jump, tail(t)?)?.into())
        }
        PhiSpec::Truncated { base, n } => Family::Truncated { base: Box::new(family(*base, atoms)?), n },
    })
}

/// Parses and validates an instance from JSON text.
pub fn parse_instance_str(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let space = GridMeasureSpace::new(file.space.atoms)?;
    let phi = OrliczGenerator::new(family(file.phi, space.len())?)?;
    if let Some(v) = validate_generator(&phi, &space, &default_sample_grid()).into_iter().next() {
        return Err(Error::Validation(format!("phi at atom {} (t={}): {:?}: {}", v.atom, v.t, v.kind, v.detail)));
    }
    let mut functions = BTreeMap::new();
    for (name, vals) in file.functions {
        if vals.len() != space.len() {
            return Err(Error::Validation(format!(
                "functions.{name}: expected {} values, found {}",
                space.len(),
                vals.len()
            )));
        }
        if let Some(i) = vals.iter().position(|x| !x.is_finite()) {
            return Err(Error::Validation(format!("functions.{name}: value at atom {i} is not finite")));
        }
        functions.insert(name, SimpleFunction::new(vals)?);
    }
    Ok(Instance { space, phi, functions })
}

pub fn parse_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_instance_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const POWER2: &str = r#"{
        "space": {"atoms": [{"t": 0.25, "w": 0.5}, {"t": 0.75, "w": 0.5}]},
        "phi": {"family": "power", "p": 2.0},
        "functions": {"u1": [1.0, 2.0]}
    }"#;

    #[test]
    fn power_two_atoms() {
        let inst = parse_instance_str(POWER2).unwrap();
        assert_eq!(inst.space.len(), 2);
        assert_eq!(inst.function("u1").unwrap().values(), &[1.0, 2.0]);
        assert!(inst.function("u2").is_err());
    }

    #[test]
    fn zero_weight_names_atom() {
        let text = POWER2.replace(r#""w": 0.5}]"#, r#""w": 0.0}]"#);
        let err = parse_instance_str(&text).unwrap_err().to_string();
        assert!(err.contains("atom 1"), "{err}");
    }

    #[test]
    fn per_atom_shape_errors() {
        let text = POWER2.replace(r#""p": 2.0"#, r#""p": [2.0, 3.0, 4.0]"#);
        let err = parse_instance_str(&text).unwrap_err().to_string();
        assert!(err.contains("phi.p") && err.contains("expected 2"), "{err}");
        let text = POWER2.replace(r#""family": "power", "p": 2.0"#, r#""family": "varexp", "p_values": [2.0]"#);
        assert!(parse_instance_str(&text).unwrap_err().to_string().contains("p_values"));
        let text = POWER2.replace("[1.0, 2.0]", "[1.0]");
        assert!(parse_instance_str(&text).unwrap_err().to_string().contains("functions.u1"));
    }

    #[test]
    fn other_families() {
        for phi in [
            r#"{"family": "kink", "tail": "linear"}"#,
            r#"{"family": "plq", "vertices": [[0,0],[1,1],[1,2]], "tail": {"slope": 1}}"#,
            r#"{"family": "truncated", "base": {"family": "indicator", "c": 1}, "n": 10}"#,
            r#"{"family": "exp"}"#,
            r#"{"family": "linear"}"#,
            r#"{"family": "varexp", "p_values": [2, 3]}"#,
        ] {
            let text = POWER2.replace(r#"{"family": "power", "p": 2.0}"#, phi);
            parse_instance_str(&text).unwrap_or_else(|e| panic!("{phi}: {e}"));
        }
        let text = POWER2.replace(r#""p": 2.0"#, r#""p": 0.5"#);
        assert!(parse_instance_str(&text).is_err());
        assert!(matches!(parse_instance_str("{"), Err(Error::Parse(_))));
    }
}

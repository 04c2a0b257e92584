//! Piecewise linear-quadratic generators described by the graph of their
//! subdifferential.
//!
//! The graph `{(u, v) : v ∈ ∂Φ(u)}` of a one-dimensional Orlicz function is
//! a monotone curve starting at the origin. When it is a polyline, `Φ` is
//! piecewise linear-quadratic: sloped segments are quadratic pieces,
//! horizontal segments linear pieces and vertical segments derivative
//! jumps. Conjugation swaps the two coordinates of the graph.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::ExtReal;

/// How the graph continues after its last vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// A ray with `dv/du = slope >= 0`: `Φ` keeps growing (quadratically
    /// if `slope > 0`, linearly otherwise).
    Ray { slope: f64 },
    /// A vertical ray: `Φ = ∞` beyond the last vertex.
    Vertical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphSpec", into = "GraphSpec")]
pub struct SubdiffGraph {
    vertices: Vec<(f64, f64)>,
    tail: Tail,
    /// `Φ(x_k)` at every vertex.
    areas: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphSpec {
    vertices: Vec<(f64, f64)>,
    tail: Tail,
}

impl TryFrom<GraphSpec> for SubdiffGraph {
    type Error = Error;
    fn try_from(s: GraphSpec) -> Result<Self> {
        SubdiffGraph::new(s.vertices, s.tail)
    }
}

impl From<SubdiffGraph> for GraphSpec {
    fn from(g: SubdiffGraph) -> Self {
        GraphSpec { vertices: g.vertices, tail: g.tail }
    }
}

impl SubdiffGraph {
    /// `vertices` must start at `(0, 0)` and be nondecreasing in both
    /// coordinates. Repeated vertices are dropped.
    pub fn new(vertices: Vec<(f64, f64)>, tail: Tail) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidParameter(format!("piecewise generator: {m}")));
        if vertices.first() != Some(&(0.0, 0.0)) {
            return bad("graph must start at (0, 0)");
        }
        let mut vs: Vec<(f64, f64)> = Vec::with_capacity(vertices.len());
        for &(x, y) in &vertices {
            if !x.is_finite() || !y.is_finite() {
                return bad("vertices must be finite");
            }
            if let Some(&(px, py)) = vs.last() {
                if x < px || y < py {
                    return bad("vertices must be nondecreasing in both coordinates");
                }
                if x == px && y == py {
                    continue;
                }
            }
            vs.push((x, y));
        }
        let &(lx, ly) = vs.last().unwrap();
        match tail {
            Tail::Ray { slope } if !(slope >= 0.0) || !slope.is_finite() => return bad("tail slope must be finite and >= 0"),
            Tail::Ray { slope } if slope == 0.0 && ly == 0.0 => return bad("Φ must be unbounded (last derivative value is 0)"),
            Tail::Vertical if lx == 0.0 => return bad("effective domain must not reduce to {0}"),
            _ => {}
        }
        let mut areas = Vec::with_capacity(vs.len());
        let mut acc = 0.0;
        areas.push(0.0);
        for k in 1..vs.len() {
            let (x0, y0) = vs[k - 1];
            let (x1, y1) = vs[k];
            acc += (x1 - x0) * 0.5 * (y0 + y1);
            areas.push(acc);
        }
        Ok(SubdiffGraph { vertices: vs, tail, areas })
    }

    /// `u²/2` on `[0, knot]`, then a derivative jump of size `jump` and
    /// slope continuing with `tail`.
    pub fn kinked_quadratic(knot: f64, jump: f64, tail: Tail) -> Result<Self> {
        Self::new(vec![(0.0, 0.0), (knot, knot), (knot, knot + jump)], tail)
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    fn last(&self) -> (f64, f64) {
        *self.vertices.last().unwrap()
    }

    pub fn cap(&self) -> ExtReal {
        match self.tail {
            Tail::Vertical => ExtReal::Finite(self.last().0),
            Tail::Ray { .. } => ExtReal::Infinite,
        }
    }

    /// Graph with the coordinates swapped: the subdifferential graph of Φ*.
    pub fn swapped(&self) -> SubdiffGraph {
        let vs = self.vertices.iter().map(|&(x, y)| (y, x)).collect();
        let tail = match self.tail {
            Tail::Vertical => Tail::Ray { slope: 0.0 },
            Tail::Ray { slope: 0.0 } => Tail::Vertical,
            Tail::Ray { slope } => Tail::Ray { slope: 1.0 / slope },
        };
        SubdiffGraph::new(vs, tail).expect("swapping preserves validity")
    }

    pub fn value(&self, u: f64) -> ExtReal {
        let (lx, ly) = self.last();
        if u > lx {
            return match self.tail {
                Tail::Vertical => ExtReal::Infinite,
                Tail::Ray { slope } => {
                    let d = u - lx;
                    ExtReal::new(self.areas[self.areas.len() - 1] + ly * d + 0.5 * slope * d * d)
                        .unwrap_or(ExtReal::Infinite)
                }
            };
        }
        // first vertex with x >= u
        let k = self.vertices.partition_point(|&(x, _)| x < u);
        if k == 0 {
            return ExtReal::ZERO;
        }
        let (x0, y0) = self.vertices[k - 1];
        let (x1, y1) = self.vertices[k];
        let yu = y0 + (y1 - y0) * (u - x0) / (x1 - x0);
        ExtReal::from(self.areas[k - 1] + (u - x0) * 0.5 * (y0 + yu))
    }

    /// `Φ'₋(u)` with `Φ'₋(0) = 0`; `∞` beyond the effective domain.
    pub fn dminus(&self, u: f64) -> ExtReal {
        if u <= 0.0 {
            return ExtReal::ZERO;
        }
        let (lx, ly) = self.last();
        if u > lx {
            return match self.tail {
                Tail::Vertical => ExtReal::Infinite,
                Tail::Ray { slope } => ExtReal::from(ly + slope * (u - lx)),
            };
        }
        let k = self.vertices.partition_point(|&(x, _)| x < u);
        let (x0, y0) = self.vertices[k - 1];
        let (x1, y1) = self.vertices[k];
        if x1 == u {
            return ExtReal::from(y1);
        }
        ExtReal::from(y0 + (y1 - y0) * (u - x0) / (x1 - x0))
    }

    /// `Φ'₊(u)`; `∞` at a vertical cap and beyond it.
    pub fn dplus(&self, u: f64) -> ExtReal {
        let (lx, ly) = self.last();
        if u >= lx {
            return match self.tail {
                Tail::Vertical => ExtReal::Infinite,
                Tail::Ray { slope } => ExtReal::from(ly + slope * (u - lx)),
            };
        }
        // last vertex with x <= u
        let k = self.vertices.partition_point(|&(x, _)| x <= u) - 1;
        let (x0, y0) = self.vertices[k];
        let (x1, y1) = self.vertices[k + 1];
        if x0 == u {
            return ExtReal::from(y0);
        }
        ExtReal::from(y0 + (y1 - y0) * (u - x0) / (x1 - x0))
    }

    /// `a_Φ`: the largest abscissa where the derivative is still zero.
    pub fn zero_level(&self) -> f64 {
        self.vertices.iter().filter(|v| v.1 == 0.0).map(|v| v.0).fold(0.0, f64::max)
    }

    /// `sup{x : Φ'₋(x) <= n}`.
    pub fn level(&self, n: f64) -> ExtReal {
        let (lx, ly) = self.last();
        if ly <= n {
            return match self.tail {
                Tail::Vertical => ExtReal::Finite(lx),
                Tail::Ray { slope: 0.0 } => ExtReal::Infinite,
                Tail::Ray { slope } => ExtReal::from(lx + (n - ly) / slope),
            };
        }
        // first vertex whose y exceeds n; the answer lies on the segment before it
        let k = self.vertices.partition_point(|&(_, y)| y <= n);
        let (x0, y0) = self.vertices[k - 1];
        let (x1, y1) = self.vertices[k];
        if x1 == x0 {
            ExtReal::from(x0)
        } else {
            ExtReal::from(x0 + (x1 - x0) * (n - y0) / (y1 - y0))
        }
    }

    /// Abscissae where `Φ'` jumps (vertical segments, including one at the
    /// origin and a vertical tail), in increasing order.
    pub fn jump_points(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.vertices.windows(2).filter(|w| w[0].0 == w[1].0).map(|w| w[0].0).collect();
        if self.tail == Tail::Vertical {
            out.push(self.last().0);
        }
        out.dedup();
        out
    }

    pub fn is_differentiable(&self) -> bool {
        self.tail != Tail::Vertical && self.vertices.windows(2).all(|w| w[0].0 != w[1].0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::{Finite, Infinite};

    fn kink() -> SubdiffGraph {
        // u²/2 on [0,1], then 1/2 + 2(u-1)
        SubdiffGraph::kinked_quadratic(1.0, 1.0, Tail::Ray { slope: 0.0 }).unwrap()
    }

    #[test]
    fn kinked_values_and_derivatives() {
        let g = kink();
        assert_eq!(g.value(1.0), Finite(0.5));
        assert_eq!(g.value(0.5), Finite(0.125));
        assert_eq!(g.value(3.0), Finite(4.5));
        assert_eq!((g.dminus(1.0), g.dplus(1.0)), (Finite(1.0), Finite(2.0)));
        assert_eq!((g.dminus(0.0), g.dplus(0.0)), (Finite(0.0), Finite(0.0)));
        assert_eq!(g.dminus(2.0), Finite(2.0));
        assert_eq!(g.cap(), Infinite);
        assert_eq!(g.jump_points(), vec![1.0]);
    }

    #[test]
    fn swapping_gives_the_conjugate_graph() {
        let c = kink().swapped();
        // Φ*(v) = v²/2 on [0,1], v - 1/2 on [1,2], ∞ after 2
        assert_eq!(c.value(0.5), Finite(0.125));
        assert_eq!(c.value(1.5), Finite(1.0));
        assert_eq!(c.value(2.0), Finite(1.5));
        assert_eq!(c.value(2.1), Infinite);
        assert_eq!(c.cap(), Finite(2.0));
        assert_eq!(c.dplus(2.0), Infinite);
        assert_eq!(c.level(5.0), Finite(2.0));
        assert_eq!(c.swapped(), kink());
    }

    #[test]
    fn level_inverts_left_derivative() {
        let g = kink();
        assert_eq!(g.level(0.5), Finite(0.5));
        assert_eq!(g.level(1.5), Finite(1.0));
        assert_eq!(g.level(2.0), Infinite);
    }

    #[test]
    fn rejects_invalid_graphs() {
        assert!(SubdiffGraph::new(vec![(0.0, 1.0)], Tail::Vertical).is_err());
        assert!(SubdiffGraph::new(vec![(0.0, 0.0), (1.0, 0.5), (0.5, 1.0)], Tail::Vertical).is_err());
        assert!(SubdiffGraph::new(vec![(0.0, 0.0), (1.0, 0.0)], Tail::Ray { slope: 0.0 }).is_err());
        assert!(SubdiffGraph::new(vec![(0.0, 0.0), (0.0, 1.0)], Tail::Vertical).is_err());
    }
}

//! Discretized measure spaces and simple functions on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One atom of a [`GridMeasureSpace`]: a coordinate and its (positive) mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub t: f64,
    pub w: f64,
}

/// Where a generator is evaluated: the atom index (for per-atom parameters)
/// and its coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub index: usize,
    pub t: f64,
}

impl Site {
    pub fn new(index: usize, t: f64) -> Self {
        Site { index, t }
    }
}

/// A finite weighted grid standing in for a non-atomic σ-finite measure space.
///
/// Atoms are ordered by strictly increasing coordinate and carry strictly
/// positive weights. Non-atomic behaviour is approached through [`refine`].
///
/// [`refine`]: GridMeasureSpace::refine
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridMeasureSpace {
    atoms: Vec<Atom>,
    total_mass: f64,
}

impl GridMeasureSpace {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidSpace { atom: 0, reason: "space has no atoms".into() });
        }
        for (i, a) in atoms.iter().enumerate() {
            if !a.t.is_finite() {
                return Err(Error::InvalidSpace { atom: i, reason: format!("coordinate {} is not finite", a.t) });
            }
            if !(a.w > 0.0) || !a.w.is_finite() {
                return Err(Error::InvalidSpace { atom: i, reason: format!("weight {} must be finite and > 0", a.w) });
            }
            if i > 0 && !(a.t > atoms[i - 1].t) {
                return Err(Error::InvalidSpace {
                    atom: i,
                    reason: format!("coordinates must increase strictly ({} after {})", a.t, atoms[i - 1].t),
                });
            }
        }
        let total_mass = atoms.iter().map(|a| a.w).sum();
        Ok(GridMeasureSpace { atoms, total_mass })
    }

    /// Midpoints of the uniform partition of `[0, 1]` into `n` cells, each of mass `1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpace { atom: 0, reason: "space has no atoms".into() });
        }
        let h = 1.0 / n as f64;
        Self::new((0..n).map(|i| Atom { t: (i as f64 + 0.5) * h, w: h }).collect())
    }

    /// Builds a space from parallel coordinate/weight slices.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(t, w)| Atom { t, w }).collect())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.atoms[i].w
    }

    pub fn site(&self, i: usize) -> Site {
        Site { index: i, t: self.atoms[i].t }
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.atoms.iter().enumerate().map(|(index, a)| Site { index, t: a.t })
    }

    /// Cell of atom `i`: bounded by the midpoints to its neighbours; the
    /// outer cells are mirrored so the atom sits at the centre.
    fn cell(&self, i: usize) -> (f64, f64) {
        let t = self.atoms[i].t;
        let left = if i > 0 { Some(0.5 * (self.atoms[i - 1].t + t)) } else { None };
        let right = if i + 1 < self.len() { Some(0.5 * (t + self.atoms[i + 1].t)) } else { None };
        match (left, right) {
            (Some(l), Some(r)) => (l, r),
            (Some(l), None) => (l, 2.0 * t - l),
            (None, Some(r)) => (2.0 * t - r, r),
            (None, None) => (t - 0.5 * self.atoms[i].w, t + 0.5 * self.atoms[i].w),
        }
    }

    /// Splits every cell into `k` equal sub-cells; each child gets `w/k`.
    /// On the default uniform grid this is again a uniform midpoint grid.
    pub fn refine(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Precondition("refinement factor must be >= 1".into()));
        }
        let mut atoms = Vec::with_capacity(self.len() * k);
        for (i, a) in self.atoms.iter().enumerate() {
            let (lo, hi) = self.cell(i);
            let h = (hi - lo) / k as f64;
            for j in 0..k {
                atoms.push(Atom { t: lo + (j as f64 + 0.5) * h, w: a.w / k as f64 });
            }
        }
        Self::new(atoms)
    }

    /// `μ(A)` for the atoms selected by `mask`.
    pub fn mass_where(&self, mask: impl Fn(usize) -> bool) -> f64 {
        self.atoms.iter().enumerate().filter(|(i, _)| mask(*i)).map(|(_, a)| a.w).sum()
    }

    /// `∫ f dμ` for a real-valued simple function.
    pub fn integrate(&self, f: &SimpleFunction) -> Result<f64> {
        self.check(f)?;
        Ok(self.atoms.iter().zip(f.values()).map(|(a, v)| a.w * v).sum())
    }

    /// `∫ u v dμ`.
    pub fn pairing(&self, u: &SimpleFunction, v: &SimpleFunction) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.atoms.iter().zip(u.values().iter().zip(v.values())).map(|(a, (x, y))| a.w * x * y).sum())
    }

    pub fn check(&self, f: &SimpleFunction) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::SpaceMismatch { expected: self.len(), found: f.len() });
        }
        Ok(())
    }
}

/// Real values, one per atom of the space they are used with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimpleFunction {
    values: Vec<f64>,
}

impl SimpleFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("value at atom {i} is not finite")));
        }
        Ok(SimpleFunction { values })
    }

    pub fn zeros(n: usize) -> Self {
        SimpleFunction { values: vec![0.0; n] }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        SimpleFunction { values: vec![c; n] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// `supp u = {t : |u(t)| > 0}` as a per-atom mask.
    pub fn support(&self) -> Vec<bool> {
        self.values.iter().map(|v| v.abs() > 0.0).collect()
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        SimpleFunction { values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn add(&self, other: &SimpleFunction) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::SpaceMismatch { expected: self.len(), found: other.len() });
        }
        Ok(SimpleFunction { values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() })
    }

    /// `u · χ_A` where `A` is given by a mask.
    pub fn restrict(&self, mask: &[bool]) -> Self {
        SimpleFunction {
            values: self.values.iter().zip(mask).map(|(&v, &m)| if m { v } else { 0.0 }).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl From<Vec<f64>> for SimpleFunction {
    /// Panics on non-finite values; use [`SimpleFunction::new`] for untrusted input.
    fn from(values: Vec<f64>) -> Self {
        SimpleFunction::new(values).expect("finite values")
    }
}

/// `sgn` with `sgn(0) = 0`.
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_midpoints() {
        let s = GridMeasureSpace::uniform(2).unwrap();
        assert_eq!(s.atoms(), &[Atom { t: 0.25, w: 0.5 }, Atom { t: 0.75, w: 0.5 }]);
        assert_eq!(s.total_mass(), 1.0);
    }

    #[test]
    fn rejects_bad_atoms() {
        let err = GridMeasureSpace::from_pairs(&[(0.1, 0.5), (0.2, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::InvalidSpace { atom: 1, .. }));
        let err = GridMeasureSpace::from_pairs(&[(0.3, 0.5), (0.2, 0.5)]).unwrap_err();
        assert!(matches!(err, Error::InvalidSpace { atom: 1, .. }));
        assert!(GridMeasureSpace::new(vec![]).is_err());
    }

    #[test]
    fn refinement_preserves_mass_and_order() {
        let s = GridMeasureSpace::from_pairs(&[(0.1, 0.3), (0.5, 0.2), (0.55, 1.7)]).unwrap();
        for k in 1..6 {
            let r = s.refine(k).unwrap();
            assert_eq!(r.len(), k * s.len());
            assert!((r.total_mass() - s.total_mass()).abs() <= 1e-12);
        }
        let u = GridMeasureSpace::uniform(4).unwrap().refine(2).unwrap();
        let expect = GridMeasureSpace::uniform(8).unwrap();
        for (a, b) in u.atoms().iter().zip(expect.atoms()) {
            assert!((a.t - b.t).abs() < 1e-15 && (a.w - b.w).abs() < 1e-15);
        }
    }

    #[test]
    fn support_and_sign() {
        let u = SimpleFunction::from(vec![0.0, -2.0, 3.0]);
        assert_eq!(u.support(), vec![false, true, true]);
        assert_eq!(sgn(0.0), 0.0);
        assert_eq!(sgn(-0.5), -1.0);
    }

    #[test]
    fn mismatch_is_reported() {
        let s = GridMeasureSpace::uniform(3).unwrap();
        let u = SimpleFunction::from(vec![1.0, 2.0]);
        assert_eq!(s.integrate(&u).unwrap_err(), Error::SpaceMismatch { expected: 3, found: 2 });
    }
}

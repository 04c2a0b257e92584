//! Brute-force dual expressions of the norms, Hölder diagnostics, norms of
//! dual functionals and the truncation sequence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::Finite;
use crate::generator::{modular_of, OrliczGenerator, Section};
use crate::norms::{k_interval_of, luxemburg_norm, orlicz_of, Setting, BISECTION_REL_TOL};
use crate::search;
use crate::space::{GridMeasureSpace, SimpleFunction};

/// Largest support size the brute-force oracles accept.
pub const ORACLE_MAX_ATOMS: usize = 4;

/// A functional `f = f_v + f_s` on the grid: the density `v` and the norm of
/// an abstract singular part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualDensity {
    pub v: SimpleFunction,
    pub s_norm: f64,
}

impl DualDensity {
    pub fn new(v: SimpleFunction, s_norm: f64) -> Result<Self> {
        if !(s_norm >= 0.0) || !s_norm.is_finite() {
            return Err(Error::InvalidParameter(format!("singular norm must be finite and >= 0, got {s_norm}")));
        }
        Ok(DualDensity { v, s_norm })
    }

    pub fn regular(v: SimpleFunction) -> Self {
        DualDensity { v, s_norm: 0.0 }
    }
}

/// `Φ*` playing the role of the generator and `Φ** = Φ` as its conjugate.
fn dual_setting<'a>(gen: &OrliczGenerator, space: &'a GridMeasureSpace) -> Result<Setting<'a>> {
    let st = Setting::new(gen, space)?;
    Ok(Setting { space, phi: st.conj, conj: st.phi })
}

/// `‖v‖_{Φ*,0}`, the Orlicz norm with respect to the conjugate generator.
pub fn conjugate_orlicz_norm(gen: &OrliczGenerator, space: &GridMeasureSpace, v: &SimpleFunction) -> Result<f64> {
    space.check(v)?;
    if v.is_zero() {
        return Ok(0.0);
    }
    let st = dual_setting(gen, space)?;
    let ki = k_interval_of(&st, v)?;
    orlicz_of(&st, v, &ki)
}

fn support_indices(space: &GridMeasureSpace, u: &SimpleFunction) -> Result<Vec<usize>> {
    space.check(u)?;
    let idx: Vec<usize> = (0..u.len()).filter(|&i| u.values()[i] != 0.0).collect();
    if idx.len() > ORACLE_MAX_ATOMS {
        return Err(Error::OracleScale { atoms: idx.len(), max: ORACLE_MAX_ATOMS });
    }
    Ok(idx)
}

/// Points per coordinate: the full resolution in one dimension, fewer in
/// higher dimensions so the product grid stays near `resolution²`.
fn per_axis(resolution: usize, dims: usize) -> usize {
    match dims {
        0 => 1,
        1 => resolution,
        d => ((resolution as f64).powf(2.0 / d as f64).ceil() as usize).clamp(8, resolution),
    }
}

/// Linear points on `[0, hi]` merged with log-spaced points on `[1e-6 hi, hi]`.
fn hybrid_grid(hi: f64, n: usize) -> Vec<f64> {
    let half = (n / 2).max(2);
    let mut g: Vec<f64> = (0..=half).map(|m| hi * m as f64 / half as f64).collect();
    g.extend((0..half).map(|m| hi * 10f64.powf(-6.0 + 6.0 * m as f64 / (half - 1) as f64)));
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// `sup{v >= 0 : w Φ*(v) <= r}`, capped at `hi`.
fn largest_within(c: &Section, w: f64, r: f64, hi: f64) -> f64 {
    if r < 0.0 {
        return f64::NAN;
    }
    let over = |v: f64| c.value(v).scale(w) > Finite(r);
    if !over(hi) {
        return hi;
    }
    let mut b = search::Bracket { lo: 0.0, hi };
    for _ in 0..200 {
        let m = b.mid();
        if m <= b.lo || m >= b.hi {
            break;
        }
        if over(m) {
            b.hi = m;
        } else {
            b.lo = m;
        }
    }
    b.lo
}

/// Coordinate-wise golden-section polish of a concave-ish objective on a box.
fn polish(x: &mut [f64], upper: &[f64], f: &impl Fn(&[f64]) -> f64, rounds: usize) -> f64 {
    let mut best = f(x);
    for _ in 0..rounds {
        let before = best;
        for j in 0..x.len() {
            let mut y = x.to_vec();
            let (xj, fx) = search::golden_section_max(
                |t| {
                    y[j] = t;
                    f(&y)
                },
                0.0,
                upper[j],
                1e-12,
            );
            if fx > best {
                best = fx;
                x[j] = xj;
            }
        }
        if best - before <= 1e-15 * best.abs().max(1.0) {
            break;
        }
    }
    best
}

/// Maximizes `f` over the product of per-axis grids, then polishes.
fn grid_search(axes: &[Vec<f64>], upper: &[f64], f: impl Fn(&[f64]) -> f64) -> f64 {
    let d = axes.len();
    let mut best_x = vec![0.0; d];
    let mut best = f(&best_x);
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    'outer: loop {
        for j in 0..d {
            x[j] = axes[j][idx[j]];
        }
        let fx = f(&x);
        if fx > best {
            best = fx;
            best_x.copy_from_slice(&x);
        }
        for j in 0..d {
            idx[j] += 1;
            if idx[j] < axes[j].len() {
                continue 'outer;
            }
            idx[j] = 0;
        }
        break;
    }
    if d > 0 {
        best = best.max(polish(&mut best_x, upper, &f, 60));
    }
    best
}

/// `sup{|∫ uv dμ| : I_{Φ*}(v) <= 1}` by direct search over `v`.
///
/// A lower bound that improves with `resolution`; independent of the
/// `k_u*` machinery in [`crate::norms`].
pub fn orlicz_norm_bruteforce(
    gen: &OrliczGenerator,
    space: &GridMeasureSpace,
    u: &SimpleFunction,
    resolution: usize,
) -> Result<f64> {
    let idx = support_indices(space, u)?;
    if idx.is_empty() {
        return Ok(0.0);
    }
    let st = Setting::new(gen, space)?;
    let w: Vec<f64> = idx.iter().map(|&i| space.weight(i)).collect();
    let a: Vec<f64> = idx.iter().map(|&i| u.values()[i].abs()).collect();
    let c: Vec<&Section> = idx.iter().map(|&i| &st.conj[i]).collect();
    // largest admissible value on each atom alone
    let upper: Vec<f64> = c
        .iter()
        .zip(&w)
        .map(|(c, &w)| {
            let cap = match c.cap() {
                Finite(b) => b,
                _ => {
                    let over = |v: f64| c.value(v).scale(w) > Finite(1.0);
                    search::bracket_from_one("oracle range", over).map(|b| b.hi)?
                }
            };
            Ok(largest_within(c, w, 1.0, cap))
        })
        .collect::<Result<_>>()?;
    let n = idx.len();
    let axes: Vec<Vec<f64>> = upper[..n - 1].iter().map(|&hi| hybrid_grid(hi, per_axis(resolution, n - 1))).collect();
    let objective = |x: &[f64]| {
        let used: f64 = (0..n - 1).map(|j| c[j].value(x[j]).scale(w[j])).fold(Finite(0.0), |s, y| s + y).to_f64();
        let r = 1.0 - used;
        if !(r >= 0.0) {
            return f64::NEG_INFINITY;
        }
        let last = largest_within(c[n - 1], w[n - 1], r, upper[n - 1]);
        (0..n - 1).map(|j| w[j] * a[j] * x[j]).sum::<f64>() + w[n - 1] * a[n - 1] * last
    };
    Ok(grid_search(&axes, &upper[..n - 1], objective))
}

/// `sup{|∫ uv dμ| : ‖v‖_{Φ*,0} <= 1}` by a search over directions of `v`.
pub fn luxemburg_norm_bruteforce(
    gen: &OrliczGenerator,
    space: &GridMeasureSpace,
    u: &SimpleFunction,
    resolution: usize,
) -> Result<f64> {
    let idx = support_indices(space, u)?;
    if idx.is_empty() {
        return Ok(0.0);
    }
    let st = dual_setting(gen, space)?;
    let n = idx.len();
    let quarter = std::f64::consts::FRAC_PI_2;
    let ratio = |angles: &[f64]| {
        // spherical coordinates on the positive orthant
        let mut d = vec![0.0; space.len()];
        let mut r = 1.0;
        for (j, &th) in angles.iter().enumerate() {
            d[idx[j]] = r * th.cos();
            r *= th.sin();
        }
        d[idx[n - 1]] = r;
        let pairing: f64 = idx.iter().map(|&i| space.weight(i) * u.values()[i].abs() * d[i]).sum();
        let d = SimpleFunction::from(d);
        let norm = k_interval_of(&st, &d).and_then(|ki| orlicz_of(&st, &d, &ki));
        match norm {
            Ok(x) if x > 0.0 => pairing / x,
            _ => f64::NEG_INFINITY,
        }
    };
    let axes: Vec<Vec<f64>> = (0..n - 1)
        .map(|_| {
            let m = per_axis(resolution, n - 1);
            (0..=m).map(|j| quarter * j as f64 / m as f64).collect()
        })
        .collect();
    let upper = vec![quarter; n - 1];
    Ok(grid_search(&axes, &upper, ratio))
}

/// `‖u‖_Φ ‖v‖_{Φ*,0} - |∫ uv dμ|`.
pub fn holder_gap(gen: &OrliczGenerator, space: &GridMeasureSpace, u: &SimpleFunction, v: &SimpleFunction) -> Result<f64> {
    let pairing = space.pairing(u, v)?.abs();
    if u.is_zero() {
        return Ok(0.0);
    }
    Ok(luxemburg_norm(gen, space, u)? * conjugate_orlicz_norm(gen, space, v)? - pairing)
}

/// `‖f‖ = inf{λ > 0 : I_{Φ*}(v/λ) + ‖f_s‖/λ <= 1}`.
pub fn dual_functional_norm(gen: &OrliczGenerator, space: &GridMeasureSpace, d: &DualDensity) -> Result<f64> {
    space.check(&d.v)?;
    if !(d.s_norm >= 0.0) {
        return Err(Error::InvalidParameter(format!("singular norm must be >= 0, got {}", d.s_norm)));
    }
    if d.v.is_zero() {
        return Ok(d.s_norm);
    }
    let conj: Vec<Section> = gen.sections(space)?.iter().map(Section::conjugate).collect();
    for (i, (c, &x)) in conj.iter().zip(d.v.values()).enumerate() {
        if x != 0.0 && c.cap() == Finite(0.0) {
            return Err(Error::InvalidSpace { atom: i, reason: "b_Φ* = 0 on the support of v".into() });
        }
    }
    let vals = d.v.values();
    let feasible = |lam: f64| (modular_of(&conj, space, |i| vals[i].abs() / lam) + Finite(d.s_norm / lam)).le(1.0);
    let b = search::bracket_from_one("dual functional norm", feasible)?;
    Ok(search::bisect(b, BISECTION_REL_TOL, feasible).hi)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationSequence {
    /// `(n, ‖u‖_{Φ_n})` in the order of the requested levels.
    pub values: Vec<(f64, f64)>,
    /// `‖u‖_Φ`.
    pub limit: f64,
    /// `‖u‖_Φ - ‖u‖_{Φ_n}` at the last level.
    pub final_gap: f64,
}

/// Luxemburg norms of `u` under the truncations `Φ_n`.
pub fn truncated_norm_sequence(
    gen: &OrliczGenerator,
    space: &GridMeasureSpace,
    u: &SimpleFunction,
    levels: &[f64],
) -> Result<TruncationSequence> {
    if levels.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("truncation levels must be strictly increasing".into()));
    }
    let values = levels
        .iter()
        .map(|&n| Ok((n, luxemburg_norm(&gen.truncate(n)?, space, u)?)))
        .collect::<Result<Vec<_>>>()?;
    let limit = luxemburg_norm(gen, space, u)?;
    let final_gap = values.last().map_or(0.0, |&(_, x)| limit - x);
    Ok(TruncationSequence { values, limit, final_gap })
}

//! Common refinements and pointwise arithmetic between grid functions.

use super::{Axis, Grid, GridFunction, Runs, Tail};
use crate::error::{Error, Result};

const MAX_DENOMINATOR: u64 = 1 << 20;
const RATIO_TOL: f64 = 1e-13;

/// Best rational approximation `num / den` of `x > 0` by continued fractions.
fn rational(x: f64) -> Option<(u64, u64)> {
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a > MAX_DENOMINATOR as f64 {
            break;
        }
        let a = a as u64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > MAX_DENOMINATOR || h2 > MAX_DENOMINATOR {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if ((h1 as f64 / k1 as f64) - x).abs() <= RATIO_TOL * x {
            return Some((h1, k1));
        }
        let frac = y - a as f64;
        if frac <= 0.0 {
            break;
        }
        y = 1.0 / frac;
    }
    None
}

/// Finest common grid of two spacings: returns `(g, a / g, b / g)`.
pub fn common_refinement(a: f64, b: f64) -> Result<(f64, u64, u64)> {
    if a.to_bits() == b.to_bits() {
        return Ok((a, 1, 1));
    }
    let (p, q) = rational(a / b).ok_or(Error::Incommensurable(a, b))?;
    // a = p g and b = q g with p, q coprime.
    let g = if p >= q { b / q as f64 } else { a / p as f64 };
    Ok((g, p, q))
}

/// Smallest spacing that is an integer multiple of both `a` and `b`.
pub fn common_multiple(a: f64, b: f64) -> Result<f64> {
    let (_, p, q) = common_refinement(a, b)?;
    Ok(if p >= q { a * q as f64 } else { b * p as f64 })
}

/// Re-expresses `f`'s cell values on `target`, a refinement of `f`'s grid
/// whose box contains it (zero padding elsewhere).
fn resample(f: &GridFunction, target: &Grid, factors: &[u64]) -> Runs {
    if f.is_empty() {
        return Runs::zeros(target.cell_count());
    }
    let src = f.grid();
    if src.dim() == 1 {
        let (a, t) = (src.axis(0), target.axis(0));
        let k = factors[0];
        let mut out = Runs::new();
        let lead = (a.start * k as i64 - t.start) as u64;
        out.push(0.0, lead);
        for r in f.values().iter() {
            out.push(r.value, r.len * k);
        }
        out.push(0.0, (t.end() - a.end() * k as i64) as u64);
        return out;
    }
    let dense = f.dense_values();
    let (t0, t1) = (target.axis(0), target.axis(1));
    let (s0, s1) = (src.axis(0), src.axis(1));
    let mut out = Runs::new();
    for i in 0..t0.cells {
        let gi = (t0.start + i as i64).div_euclid(factors[0] as i64) - s0.start;
        for j in 0..t1.cells {
            let gj = (t1.start + j as i64).div_euclid(factors[1] as i64) - s1.start;
            let v = if gi >= 0 && gj >= 0 && (gi as u64) < s0.cells && (gj as u64) < s1.cells {
                dense[(gi as u64 * s1.cells + gj as u64) as usize]
            } else {
                0.0
            };
            out.push(v, 1);
        }
    }
    out
}

/// Tail of `a f + b g`; boxes are given in the common refined units as
/// `(start, end)` on axis 0.
fn combine_tails(
    f: &GridFunction,
    a: f64,
    g: &GridFunction,
    b: f64,
    fbox: (i64, i64),
    gbox: (i64, i64),
) -> Result<(Tail, (i64, i64))> {
    let mut union = (fbox.0.min(gbox.0), fbox.1.max(gbox.1));
    if f.is_empty() {
        union = gbox;
    } else if g.is_empty() {
        union = fbox;
    }
    let check_edges =
        |t: &Tail, bx: (i64, i64), other: (i64, i64), other_empty: bool| -> Result<()> {
            if let Tail::PowerLaw(p) = t {
                if other_empty {
                    return Ok(());
                }
                if p.side.right() && other.1 > bx.1 {
                    return Err(Error::IncompatibleTails(
                        "other function extends past the right tail edge".into(),
                    ));
                }
                if p.side.left() && other.0 < bx.0 {
                    return Err(Error::IncompatibleTails(
                        "other function extends past the left tail edge".into(),
                    ));
                }
            }
            Ok(())
        };
    check_edges(f.tail(), fbox, gbox, g.is_empty())?;
    check_edges(g.tail(), gbox, fbox, f.is_empty())?;
    let tail = match (f.tail(), g.tail()) {
        (Tail::Zero, Tail::Zero) => Tail::Zero,
        (t @ Tail::PowerLaw(_), Tail::Zero) => t.map(a, None),
        (Tail::Zero, t @ Tail::PowerLaw(_)) => t.map(b, None),
        (Tail::PowerLaw(p), Tail::PowerLaw(q)) => {
            let same_shape =
                p.exponent == q.exponent && p.side == q.side && p.onset == q.onset && fbox == gbox;
            if !same_shape {
                return Err(Error::IncompatibleTails(format!(
                    "tails differ on an unbounded set: {p:?} vs {q:?}"
                )));
            }
            if p.cap.is_none() && q.cap.is_none() {
                Tail::power_law(a * p.coeff + b * q.coeff, p.exponent, p.onset, p.side)
                    .map(1.0, None)
            } else if p.cap == q.cap && p.coeff == q.coeff {
                Tail::PowerLaw(*p).map(a + b, None)
            } else {
                return Err(Error::IncompatibleTails(
                    "capped tails combine only when identical".into(),
                ));
            }
        }
    };
    Ok((tail, union))
}

impl GridFunction {
    /// `a f + b g` on the common refinement of both grids.
    pub fn linear_combination(&self, a: f64, g: &GridFunction, b: f64) -> Result<GridFunction> {
        if self.dim() != g.dim() {
            return Err(Error::DimensionMismatch(self.dim(), g.dim()));
        }
        let dim = self.dim();
        let mut axes = Vec::with_capacity(dim);
        let mut fac_f = Vec::with_capacity(dim);
        let mut fac_g = Vec::with_capacity(dim);
        let mut boxes = Vec::with_capacity(dim);
        for j in 0..dim {
            let (af, ag) = (self.grid().axis(j), g.grid().axis(j));
            let (h, kf, kg) = if self.is_empty() {
                (ag.spacing, 1, 1)
            } else if g.is_empty() {
                (af.spacing, 1, 1)
            } else {
                common_refinement(af.spacing, ag.spacing)?
            };
            let fb = (af.start * kf as i64, af.end() * kf as i64);
            let gb = (ag.start * kg as i64, ag.end() * kg as i64);
            boxes.push((fb, gb));
            fac_f.push(kf);
            fac_g.push(kg);
            axes.push(h);
        }
        let (tail, union0) = combine_tails(self, a, g, b, boxes[0].0, boxes[0].1)?;
        let mut grid_axes = Vec::with_capacity(dim);
        for j in 0..dim {
            let (fb, gb) = boxes[j];
            let (s, e) = if j == 0 {
                union0
            } else if self.is_empty() {
                gb
            } else if g.is_empty() {
                fb
            } else {
                (fb.0.min(gb.0), fb.1.max(gb.1))
            };
            grid_axes.push(Axis {
                start: s,
                cells: (e - s) as u64,
                spacing: axes[j],
            });
        }
        let grid = Grid { axes: grid_axes };
        let rf = resample(self, &grid, &fac_f);
        let rg = resample(g, &grid, &fac_g);
        let mut out = Runs::new();
        for (x, y, len) in rf.zip(&rg) {
            out.push(a * x + b * y + 0.0, len);
        }
        GridFunction::from_runs(grid, out, tail)
    }

    pub fn sub(&self, g: &GridFunction) -> Result<GridFunction> {
        self.linear_combination(1.0, g, -1.0)
    }

    pub fn add(&self, g: &GridFunction) -> Result<GridFunction> {
        self.linear_combination(1.0, g, 1.0)
    }

    pub fn scale(&self, lambda: f64) -> GridFunction {
        let values = self.values().map(|v| lambda * v + 0.0);
        self.with_values(values, self.tail().map(lambda, None))
    }

    /// Same function on a grid refined by integer `factors` per axis.
    pub fn refine(&self, factors: &[u64]) -> Result<GridFunction> {
        if factors.len() != self.dim() || factors.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "bad refinement factors {factors:?}"
            )));
        }
        let mut grid = self.grid().clone();
        for (a, &k) in grid.axes_mut().iter_mut().zip(factors) {
            a.start *= k as i64;
            a.cells *= k;
            a.spacing /= k as f64;
        }
        let values = resample(self, &grid, factors);
        GridFunction::from_runs(grid, values, *self.tail())
    }
}

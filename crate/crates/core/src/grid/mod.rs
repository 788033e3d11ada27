//! Piecewise-constant functions on uniform grids anchored at the origin.
//!
//! A [`GridFunction`] stores one value per cell of a box in R^n (n = 1 or 2)
//! plus a [`Tail`] describing the function outside the box. Cell `i` on an
//! axis with spacing `h` covers `[i h, (i + 1) h]`, so grids with
//! commensurable spacings always share a common refinement. Integrals of the
//! catalog [`Transform`]s are exact sums over cells (plus closed-form tail
//! terms); smooth functions sampled onto a grid carry O(h) discretization
//! error that this module does not try to estimate.

mod align;
mod runs;
mod set;
mod tail;

pub use align::{common_multiple, common_refinement};
pub use runs::{Run, Runs, Sum};
pub use set::{indicator, MeasurableSet};
pub use tail::{PowerLaw, Tail, TailSide};

use crate::error::{Error, Result};

/// Relative tolerance used when snapping real coordinates to grid lines.
pub(crate) const SNAP_TOL: f64 = 1e-9;

/// Rounds `x / h` to an integer when it is within [`SNAP_TOL`] of one.
pub(crate) fn snap(x: f64, h: f64) -> Option<i64> {
    let q = x / h;
    let r = q.round();
    if (q - r).abs() <= SNAP_TOL * r.abs().max(1.0) {
        Some(r as i64)
    } else {
        None
    }
}

/// One axis of a grid: cells `start .. start + cells` of width `spacing`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub start: i64,
    pub cells: u64,
    pub spacing: f64,
}

impl Axis {
    pub fn new(start: i64, cells: u64, spacing: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "spacing must be > 0, got {spacing}"
            )));
        }
        Ok(Self {
            start,
            cells,
            spacing,
        })
    }

    /// Axis covering `[lo, hi]`; both ends must lie on multiples of `h`.
    pub fn covering(lo: f64, hi: f64, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be > 0, got {h}")));
        }
        let a = snap(lo, h).ok_or_else(|| {
            Error::InvalidGrid(format!("box edge {lo} is not a multiple of spacing {h}"))
        })?;
        let b = snap(hi, h).ok_or_else(|| {
            Error::InvalidGrid(format!("box edge {hi} is not a multiple of spacing {h}"))
        })?;
        if b < a {
            return Err(Error::InvalidGrid(format!("empty box [{lo}, {hi}]")));
        }
        Axis::new(a, (b - a) as u64, h)
    }

    pub fn end(&self) -> i64 {
        self.start + self.cells as i64
    }

    pub fn lo(&self) -> f64 {
        self.start as f64 * self.spacing
    }

    pub fn hi(&self) -> f64 {
        self.end() as f64 * self.spacing
    }

    pub fn cell_lo(&self, i: u64) -> f64 {
        (self.start + i as i64) as f64 * self.spacing
    }

    pub fn cell_hi(&self, i: u64) -> f64 {
        (self.start + i as i64 + 1) as f64 * self.spacing
    }
}

/// Grid geometry in one or two dimensions; values are row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2, got {}",
                axes.len()
            )));
        }
        Ok(Self { axes })
    }

    pub fn line(lo: f64, hi: f64, h: f64) -> Result<Self> {
        Grid::new(vec![Axis::covering(lo, hi, h)?])
    }

    pub fn rect(lo: [f64; 2], hi: [f64; 2], h: [f64; 2]) -> Result<Self> {
        Grid::new(vec![
            Axis::covering(lo[0], hi[0], h[0])?,
            Axis::covering(lo[1], hi[1], h[1])?,
        ])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, j: usize) -> &Axis {
        &self.axes[j]
    }

    pub(crate) fn axes_mut(&mut self) -> &mut [Axis] {
        &mut self.axes
    }

    pub fn cell_count(&self) -> u64 {
        self.axes.iter().map(|a| a.cells).product()
    }

    pub fn cell_measure(&self) -> f64 {
        self.axes.iter().map(|a| a.spacing).product()
    }

    pub fn min_spacing(&self) -> f64 {
        self.axes
            .iter()
            .map(|a| a.spacing)
            .fold(f64::INFINITY, f64::min)
    }

    /// Multi-index of flat cell `k`.
    pub fn unflatten(&self, k: u64) -> [u64; 2] {
        match self.axes.len() {
            1 => [k, 0],
            _ => [k / self.axes[1].cells, k % self.axes[1].cells],
        }
    }

    pub fn cell_bounds(&self, k: u64) -> (Vec<f64>, Vec<f64>) {
        let idx = self.unflatten(k);
        let lo = self
            .axes
            .iter()
            .enumerate()
            .map(|(j, a)| a.cell_lo(idx[j]))
            .collect();
        let hi = self
            .axes
            .iter()
            .enumerate()
            .map(|(j, a)| a.cell_hi(idx[j]))
            .collect();
        (lo, hi)
    }

    /// Largest `|x|_inf` over the box.
    pub fn radius(&self) -> f64 {
        self.axes
            .iter()
            .map(|a| a.lo().abs().max(a.hi().abs()))
            .fold(0.0, f64::max)
    }
}

/// Pointwise maps with closed-form integrals over cells and tails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    /// `t -> |t|^p`
    Power(f64),
    /// `t -> min(|t|, 1)^p`
    ClampPower(f64),
    /// `t -> [|t| > m]`
    Threshold(f64),
}

impl Transform {
    pub fn apply(&self, t: f64) -> f64 {
        match *self {
            Transform::Power(p) => t.abs().powf(p),
            Transform::ClampPower(p) => t.abs().min(1.0).powf(p),
            Transform::Threshold(m) => {
                if t.abs() > m {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Integration domain. The cube is in the sup-norm so that every cell is
/// cut along grid-parallel planes and overlaps stay exact.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    All,
    /// Axis-aligned box; infinite bounds allowed.
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// `{x : |x|_inf > r}`.
    OutsideCube(f64),
}

impl Region {
    pub fn interval(lo: f64, hi: f64) -> Region {
        Region::Box {
            lo: vec![lo],
            hi: vec![hi],
        }
    }

    fn overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
        (a1.min(b1) - a0.max(b0)).max(0.0)
    }

    /// Measure of `[lo, hi] ∩ region` for an axis-aligned block.
    fn block_measure(&self, lo: &[f64], hi: &[f64], full: f64) -> f64 {
        match self {
            Region::All => full,
            Region::Box { lo: bl, hi: bh } => lo
                .iter()
                .zip(hi)
                .enumerate()
                .map(|(j, (&a, &b))| Self::overlap(a, b, bl[j], bh[j]))
                .product(),
            Region::OutsideCube(r) => {
                let inside: f64 = lo
                    .iter()
                    .zip(hi)
                    .map(|(&a, &b)| Self::overlap(a, b, -r, *r))
                    .product();
                (full - inside).max(0.0)
            }
        }
    }

    /// Distance windows `[a, b]` covered on the right tail (`x > edge`) and
    /// on the left tail (`x < edge`), as distances from the origin.
    fn tail_window(&self, right: bool, edge: f64) -> Option<(f64, f64)> {
        let (mut a, mut b) = (edge.abs(), f64::INFINITY);
        match self {
            Region::All => {}
            Region::OutsideCube(r) => a = a.max(*r),
            Region::Box { lo, hi } => {
                if right {
                    a = a.max(lo[0]);
                    b = hi[0];
                } else {
                    a = a.max(-hi[0]);
                    b = -lo[0];
                }
            }
        }
        (b > a).then_some((a, b))
    }
}

/// A real function on R^n, piecewise constant on a grid box, with a
/// closed-form tail outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Runs,
    tail: Tail,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>, tail: Tail) -> Result<Self> {
        Self::from_runs(grid, Runs::from_dense(&values), tail)
    }

    pub fn from_runs(grid: Grid, values: Runs, tail: Tail) -> Result<Self> {
        if values.cells() != grid.cell_count() {
            return Err(Error::InvalidGrid(format!(
                "{} values for {} cells",
                values.cells(),
                grid.cell_count()
            )));
        }
        let mut offset = 0usize;
        for r in values.iter() {
            if !r.value.is_finite() {
                return Err(Error::NonFiniteValue {
                    index: offset,
                    value: r.value,
                });
            }
            offset += r.len as usize;
        }
        if let Tail::PowerLaw(p) = &tail {
            p.validate()?;
            if grid.dim() != 1 {
                return Err(Error::InvalidTail(
                    "power-law tails are one-dimensional".into(),
                ));
            }
            let ax = grid.axis(0);
            let tol = SNAP_TOL * p.onset.max(1.0);
            if p.side.right() && ax.hi() < p.onset - tol {
                return Err(Error::InvalidTail(format!(
                    "box ends at {} before tail onset {}",
                    ax.hi(),
                    p.onset
                )));
            }
            if p.side.left() && ax.lo() > -p.onset + tol {
                return Err(Error::InvalidTail(format!(
                    "box starts at {} after tail onset {}",
                    ax.lo(),
                    -p.onset
                )));
            }
        }
        Ok(Self { grid, values, tail })
    }

    /// One-dimensional function on `[lo, hi]` with the given cell values.
    pub fn on_interval(lo: f64, hi: f64, h: f64, values: Vec<f64>) -> Result<Self> {
        Self::new(Grid::line(lo, hi, h)?, values, Tail::Zero)
    }

    /// Constant `value` on `[lo, hi]`, zero elsewhere.
    pub fn constant_on(lo: f64, hi: f64, h: f64, value: f64) -> Result<Self> {
        let grid = Grid::line(lo, hi, h)?;
        let n = grid.cell_count();
        let mut runs = Runs::new();
        runs.push(value, n);
        Self::from_runs(grid, runs, Tail::Zero)
    }

    /// The zero function on an empty box.
    pub fn zero(dim: usize) -> Self {
        let axes = (0..dim.clamp(1, 2))
            .map(|_| Axis {
                start: 0,
                cells: 0,
                spacing: 1.0,
            })
            .collect();
        Self {
            grid: Grid { axes },
            values: Runs::new(),
            tail: Tail::Zero,
        }
    }

    /// Samples `f` at cell midpoints.
    pub fn sample(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let n = grid.cell_count();
        let mut runs = Runs::new();
        for k in 0..n {
            let (lo, hi) = grid.cell_bounds(k);
            let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
            runs.push(f(&mid), 1);
        }
        Self::from_runs(grid, runs, Tail::Zero)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &Runs {
        &self.values
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.cell_count() == 0
    }

    pub fn dense_values(&self) -> Vec<f64> {
        self.values.to_dense()
    }

    /// `sup |f|` including the tail.
    pub fn sup_abs(&self) -> f64 {
        let mut s = self.values.max_abs();
        if let Tail::PowerLaw(p) = &self.tail {
            let ax = self.grid.axis(0);
            if p.side.right() {
                s = s.max(p.magnitude(ax.hi()));
            }
            if p.side.left() {
                s = s.max(p.magnitude(-ax.lo()));
            }
        }
        s
    }

    /// Value at a point (cell value inside the box, tail or zero outside).
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut idx = [0u64; 2];
        let mut inside = true;
        for (j, a) in self.grid.axes().iter().enumerate() {
            let c = (x[j] / a.spacing).floor() as i64 - a.start;
            if c < 0 || c >= a.cells as i64 {
                inside = false;
                break;
            }
            idx[j] = c as u64;
        }
        if inside {
            let k = match self.dim() {
                1 => idx[0],
                _ => idx[0] * self.grid.axis(1).cells + idx[1],
            };
            return self.values.get(k).unwrap_or(0.0);
        }
        if let Tail::PowerLaw(p) = &self.tail {
            let ax = self.grid.axis(0);
            let s = p.coeff.signum();
            if p.side.right() && x[0] > ax.hi() {
                return s * p.magnitude(x[0]);
            }
            if p.side.left() && x[0] < ax.lo() {
                return s * p.magnitude(-x[0]);
            }
        }
        0.0
    }

    pub(crate) fn with_values(&self, values: Runs, tail: Tail) -> Self {
        Self {
            grid: self.grid.clone(),
            values,
            tail,
        }
    }

    pub(crate) fn with_grid(&self, grid: Grid) -> Self {
        Self {
            grid,
            values: self.values.clone(),
            tail: self.tail,
        }
    }

    /// Grid part only, with the tail dropped.
    pub fn without_tail(&self) -> Self {
        self.with_values(self.values.clone(), Tail::Zero)
    }

    /// `int_region T(f) dx`, exact for the catalog transforms up to
    /// floating-point round-off.
    pub fn integrate(&self, transform: Transform, region: &Region) -> Result<f64> {
        let mut sum = Sum::default();
        let full = self.grid.cell_measure();
        if self.dim() == 1 {
            let ax = self.grid.axis(0);
            let mut offset = 0u64;
            for r in self.values.iter() {
                let t = transform.apply(r.value);
                if t != 0.0 {
                    let w = match region {
                        Region::All => r.len as f64 * full,
                        _ => {
                            let lo = ax.cell_lo(offset);
                            let hi = ax.cell_lo(offset + r.len);
                            region.block_measure(&[lo], &[hi], r.len as f64 * full)
                        }
                    };
                    sum.add(t * w);
                }
                offset += r.len;
            }
        } else {
            let mut k = 0u64;
            for r in self.values.iter() {
                let t = transform.apply(r.value);
                if t != 0.0 {
                    for c in k..k + r.len {
                        let w = match region {
                            Region::All => full,
                            _ => {
                                let (lo, hi) = self.grid.cell_bounds(c);
                                region.block_measure(&lo, &hi, full)
                            }
                        };
                        sum.add(t * w);
                    }
                }
                k += r.len;
            }
        }
        sum.add(self.tail_integral(transform, region)?);
        Ok(sum.value())
    }

    fn tail_integral(&self, transform: Transform, region: &Region) -> Result<f64> {
        let Tail::PowerLaw(p) = &self.tail else {
            return Ok(0.0);
        };
        let ax = self.grid.axis(0);
        let mut total = 0.0;
        for (right, edge) in [(true, ax.hi()), (false, ax.lo())] {
            let active = if right { p.side.right() } else { p.side.left() };
            if !active {
                continue;
            }
            let Some((a, b)) = region.tail_window(right, edge) else {
                continue;
            };
            total += match transform {
                Transform::Power(q) => p.integral(q, None, a, b)?,
                Transform::ClampPower(q) => p.integral(q, Some(1.0), a, b)?,
                Transform::Threshold(m) => p.measure_above(m, a, b),
            };
        }
        Ok(total)
    }

    /// `|{x : |f(x)| > level}|`, strict inequality.
    pub fn superlevel_measure(&self, level: f64) -> f64 {
        self.integrate(Transform::Threshold(level), &Region::All)
            .expect("threshold integrals are always finite")
    }

    /// Confirms `int min(|f|,1)^p < inf`, i.e. membership in the space for
    /// exponent `p` relative to the declared tail.
    pub fn check_membership(&self, p: f64) -> Result<()> {
        self.integrate(Transform::ClampPower(p), &Region::All)
            .map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> GridFunction {
        GridFunction::constant_on(0.0, 1.0, 0.25, 1.0).unwrap()
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(Grid::line(0.0, 1.0, 0.3).is_err());
        assert!(Grid::line(0.0, 1.0, -1.0).is_err());
        assert!(GridFunction::on_interval(0.0, 1.0, 0.5, vec![1.0]).is_err());
        assert!(matches!(
            GridFunction::on_interval(0.0, 1.0, 0.5, vec![1.0, f64::NAN]),
            Err(Error::NonFiniteValue { index: 1, .. })
        ));
    }

    #[test]
    fn unit_indicator_integrals() {
        let f = unit();
        for p in [1.0, 2.0, 3.5] {
            assert_eq!(
                f.integrate(Transform::ClampPower(p), &Region::All).unwrap(),
                1.0
            );
        }
        assert_eq!(f.superlevel_measure(2.0), 0.0);
        assert_eq!(f.superlevel_measure(0.5), 1.0);
    }

    #[test]
    fn region_cuts_cells_exactly() {
        let f = unit();
        let v = f
            .integrate(Transform::Power(1.0), &Region::interval(0.1, 0.6))
            .unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        let out = f
            .integrate(Transform::Power(1.0), &Region::OutsideCube(0.3))
            .unwrap();
        assert!((out - 0.7).abs() < 1e-15);
    }

    #[test]
    fn inverse_power_tail() {
        // x^-1 on [1, inf): grid box [0,1] is empty of mass, tail from 1.
        let g = Grid::line(0.0, 1.0, 0.5).unwrap();
        let f = GridFunction::new(
            g,
            vec![0.0, 0.0],
            Tail::power_law(1.0, 1.0, 1.0, TailSide::Right),
        )
        .unwrap();
        let l2 = f.integrate(Transform::Power(2.0), &Region::All).unwrap();
        assert!((l2 - 1.0).abs() < 1e-15);
        assert!(matches!(
            f.integrate(Transform::Power(1.0), &Region::All),
            Err(Error::NotIntegrable { .. })
        ));
        assert!(f.check_membership(1.0).is_err());
        assert!(f.check_membership(1.5).is_ok());
    }

    #[test]
    fn tail_requires_box_to_reach_onset() {
        let g = Grid::line(0.0, 1.0, 0.5).unwrap();
        let r = GridFunction::new(
            g,
            vec![0.0, 0.0],
            Tail::power_law(1.0, 1.0, 2.0, TailSide::Right),
        );
        assert!(matches!(r, Err(Error::InvalidTail(_))));
    }

    #[test]
    fn eval_inside_and_tail() {
        let g = Grid::line(0.0, 2.0, 0.5).unwrap();
        let f = GridFunction::new(
            g,
            vec![1.0, 2.0, 3.0, 4.0],
            Tail::power_law(1.0, 1.0, 2.0, TailSide::Right),
        )
        .unwrap();
        assert_eq!(f.eval(&[0.7]), 2.0);
        assert_eq!(f.eval(&[4.0]), 0.25);
        assert_eq!(f.eval(&[-1.0]), 0.0);
    }

    #[test]
    fn two_dimensional_measure() {
        let g = Grid::rect([0.0, 0.0], [1.0, 2.0], [0.5, 0.5]).unwrap();
        let f = GridFunction::new(g, vec![3.0; 8], Tail::Zero).unwrap();
        assert_eq!(f.superlevel_measure(1.0), 2.0);
        let out = f
            .integrate(Transform::ClampPower(1.0), &Region::OutsideCube(1.0))
            .unwrap();
        assert!((out - 1.0).abs() < 1e-15);
    }
}

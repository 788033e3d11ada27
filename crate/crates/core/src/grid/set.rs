use super::{Grid, GridFunction, Runs, Tail};
use crate::error::{Error, Result};

/// A finite union of grid cells plus an optional interval outside the box
/// (one-dimensional only; `hi` may be infinite).
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurableSet {
    grid: Grid,
    cells: Vec<bool>,
    outside: Vec<(f64, f64)>,
}

impl MeasurableSet {
    pub fn empty(grid: Grid) -> Self {
        let n = grid.cell_count() as usize;
        Self {
            grid,
            cells: vec![false; n],
            outside: Vec::new(),
        }
    }

    pub fn from_cells(grid: Grid, cells: Vec<bool>) -> Result<Self> {
        if cells.len() as u64 != grid.cell_count() {
            return Err(Error::InvalidGrid(format!(
                "{} flags for {} cells",
                cells.len(),
                grid.cell_count()
            )));
        }
        Ok(Self {
            grid,
            cells,
            outside: Vec::new(),
        })
    }

    /// `[lo, hi]` on the grid of spacing `h`.
    pub fn interval(lo: f64, hi: f64, h: f64) -> Result<Self> {
        let grid = Grid::line(lo, hi, h)?;
        let n = grid.cell_count() as usize;
        Self::from_cells(grid, vec![true; n])
    }

    /// Adds the interval `[lo, hi]` lying outside the grid box.
    pub fn with_outside(mut self, lo: f64, hi: f64) -> Result<Self> {
        if self.grid.dim() != 1 || hi < lo {
            return Err(Error::InvalidParameter(format!(
                "bad outside interval [{lo}, {hi}]"
            )));
        }
        let ax = self.grid.axis(0);
        if lo < ax.hi() && hi > ax.lo() && ax.cells > 0 {
            return Err(Error::InvalidParameter(
                "outside interval overlaps the box".into(),
            ));
        }
        if hi > lo {
            self.outside.push((lo, hi));
        }
        Ok(self)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn outside(&self) -> &[(f64, f64)] {
        &self.outside
    }

    pub fn cell_indices(&self) -> Vec<u64> {
        self.cells
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i as u64))
            .collect()
    }

    pub fn contains_cell(&self, k: u64) -> bool {
        self.cells.get(k as usize).copied().unwrap_or(false)
    }

    pub fn cell_count(&self) -> u64 {
        self.cells.iter().filter(|&&b| b).count() as u64
    }

    pub fn is_bounded(&self) -> bool {
        self.outside
            .iter()
            .all(|(a, b)| a.is_finite() && b.is_finite())
    }

    pub fn measure(&self) -> f64 {
        self.cell_count() as f64 * self.grid.cell_measure()
            + self.outside.iter().map(|(a, b)| b - a).sum::<f64>()
    }

    /// Union of two sets on the same grid.
    pub fn union(&self, other: &MeasurableSet) -> Result<MeasurableSet> {
        if self.grid != other.grid {
            return Err(Error::InvalidParameter(
                "sets live on different grids".into(),
            ));
        }
        let cells = self
            .cells
            .iter()
            .zip(&other.cells)
            .map(|(a, b)| *a || *b)
            .collect();
        let mut outside = self.outside.clone();
        outside.extend_from_slice(&other.outside);
        Ok(Self {
            grid: self.grid.clone(),
            cells,
            outside,
        })
    }

    pub fn is_disjoint(&self, other: &MeasurableSet) -> bool {
        self.grid == other.grid
            && self.cells.iter().zip(&other.cells).all(|(a, b)| !(a & b))
            && self.outside.iter().all(|&(a0, a1)| {
                other
                    .outside
                    .iter()
                    .all(|&(b0, b1)| a1.min(b1) <= a0.max(b0))
            })
    }

    /// `{x : |f(x)| > level}` with the tail part recorded as outside intervals.
    pub fn superlevel(f: &GridFunction, level: f64) -> MeasurableSet {
        let cells = f
            .values()
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.value.abs() > level, r.len as usize))
            .collect();
        let mut set = MeasurableSet {
            grid: f.grid().clone(),
            cells,
            outside: Vec::new(),
        };
        if let Tail::PowerLaw(p) = f.tail() {
            let ax = f.grid().axis(0);
            if p.side.right() {
                let len = p.measure_above(level, ax.hi(), f64::INFINITY);
                if len > 0.0 {
                    set.outside.push((ax.hi(), ax.hi() + len));
                }
            }
            if p.side.left() {
                let len = p.measure_above(level, -ax.lo(), f64::INFINITY);
                if len > 0.0 {
                    set.outside.push((ax.lo() - len, ax.lo()));
                }
            }
        }
        set
    }
}

/// `χ_E` for a bounded grid-aligned set.
pub fn indicator(set: &MeasurableSet) -> Result<GridFunction> {
    if !set.outside.is_empty() {
        return Err(Error::UnboundedSet);
    }
    let mut runs = Runs::new();
    for &b in &set.cells {
        runs.push(if b { 1.0 } else { 0.0 }, 1);
    }
    GridFunction::from_runs(set.grid.clone(), runs, Tail::Zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Region, Transform};

    #[test]
    fn indicator_of_unit_interval() {
        let f = indicator(&MeasurableSet::interval(0.0, 1.0, 0.25).unwrap()).unwrap();
        assert_eq!(f.dense_values(), vec![1.0; 4]);
        assert_eq!(f.eval(&[1.5]), 0.0);
        assert_eq!(f.eval(&[-0.1]), 0.0);
    }

    #[test]
    fn indicator_of_empty_set_is_zero() {
        let grid = Grid::line(0.0, 1.0, 0.5).unwrap();
        let f = indicator(&MeasurableSet::empty(grid)).unwrap();
        assert_eq!(
            f.integrate(Transform::Power(1.0), &Region::All).unwrap(),
            0.0
        );
    }

    #[test]
    fn unit_intervals_have_unit_measure() {
        for k in [-3i32, 0, 1, 7, 100] {
            let s = MeasurableSet::interval(k as f64, k as f64 + 1.0, 0.125).unwrap();
            assert_eq!(s.measure(), 1.0);
        }
    }

    #[test]
    fn unbounded_indicator_rejected() {
        let s = MeasurableSet::interval(0.0, 1.0, 0.5)
            .unwrap()
            .with_outside(1.0, f64::INFINITY)
            .unwrap();
        assert!(!s.is_bounded());
        assert_eq!(indicator(&s), Err(Error::UnboundedSet));
    }

    #[test]
    fn additive_on_disjoint_sets() {
        let grid = Grid::line(0.0, 2.0, 0.25).unwrap();
        let a = MeasurableSet::from_cells(grid.clone(), (0..8).map(|i| i < 3).collect()).unwrap();
        let b = MeasurableSet::from_cells(grid, (0..8).map(|i| i >= 5).collect()).unwrap();
        assert!(a.is_disjoint(&b));
        assert_eq!(a.union(&b).unwrap().measure(), a.measure() + b.measure());
    }
}

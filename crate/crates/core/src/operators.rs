//! Translation `τ_y f(x) = f(x + y)`, truncation `T_M` and the unit clamp.

use crate::error::{Error, Result};
use crate::grid::{snap, GridFunction, Tail};

/// Shift by whole cells: `m[j]` cells along axis `j`.
pub fn translate_cells(f: &GridFunction, m: &[i64]) -> Result<GridFunction> {
    if m.len() != f.dim() {
        return Err(Error::DimensionMismatch(m.len(), f.dim()));
    }
    if !f.tail().is_zero() {
        return Err(Error::TailNotSupported("translate"));
    }
    let mut grid = f.grid().clone();
    for (a, &s) in grid.axes_mut().iter_mut().zip(m) {
        a.start -= s;
    }
    Ok(f.with_grid(grid))
}

/// `τ_y f`; each component of `y` must be a multiple of the spacing on
/// that axis.
pub fn translate(f: &GridFunction, y: &[f64]) -> Result<GridFunction> {
    if y.len() != f.dim() {
        return Err(Error::DimensionMismatch(y.len(), f.dim()));
    }
    let m = aligned_cells(f, y)?;
    translate_cells(f, &m)
}

pub(crate) fn aligned_cells(f: &GridFunction, y: &[f64]) -> Result<Vec<i64>> {
    f.grid()
        .axes()
        .iter()
        .zip(y)
        .map(|(a, &yj)| {
            snap(yj, a.spacing).ok_or_else(|| Error::MisalignedShift {
                requested: yj,
                spacing: a.spacing,
                nearest: (yj / a.spacing).round() * a.spacing,
            })
        })
        .collect()
}

/// `T_M(t) = max(−M, min(t, M))` applied pointwise; tails get capped at `M`.
pub fn truncate(f: &GridFunction, level: f64) -> Result<GridFunction> {
    if level.is_nan() || level <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "truncation level must be > 0, got {level}"
        )));
    }
    let values = f.values().map(|v| v.clamp(-level, level));
    Ok(f.with_values(values, f.tail().map(1.0, Some(level))))
}

/// `x -> min(|f(x)|, 1)`.
pub fn clamp_unit(f: &GridFunction) -> GridFunction {
    let values = f.values().map(|v| v.abs().min(1.0));
    let tail = match f.tail() {
        Tail::Zero => Tail::Zero,
        Tail::PowerLaw(p) => Tail::power_law(p.coeff.abs(), p.exponent, p.onset, p.side)
            .map(1.0, Some(p.cap.map_or(1.0, |c| c.min(1.0)))),
    };
    f.with_values(values, tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fnorms::{alpha_norm, NormParams};
    use crate::grid::{Grid, Region, TailSide, Transform};

    fn unit() -> GridFunction {
        GridFunction::constant_on(0.0, 1.0, 0.25, 1.0).unwrap()
    }

    #[test]
    fn zero_shift_is_identity() {
        assert_eq!(translate(&unit(), &[0.0]).unwrap(), unit());
    }

    #[test]
    fn shift_moves_support_left() {
        let g = translate(&unit(), &[0.5]).unwrap();
        assert_eq!(g.eval(&[-0.4]), 1.0);
        assert_eq!(g.eval(&[0.6]), 0.0);
        let p = NormParams::new(2.0).unwrap();
        assert_eq!(alpha_norm(&g, p).unwrap(), alpha_norm(&unit(), p).unwrap());
    }

    #[test]
    fn misaligned_shift_suggests_nearest() {
        match translate(&unit(), &[0.3]) {
            Err(Error::MisalignedShift { nearest, .. }) => assert_eq!(nearest, 0.25),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tailed_functions_do_not_translate() {
        let g = Grid::line(0.0, 1.0, 0.5).unwrap();
        let f = GridFunction::new(
            g,
            vec![0.0; 2],
            Tail::power_law(1.0, 1.0, 1.0, TailSide::Right),
        )
        .unwrap();
        assert_eq!(
            translate(&f, &[0.5]),
            Err(Error::TailNotSupported("translate"))
        );
    }

    #[test]
    fn truncation_caps_values() {
        let f = GridFunction::constant_on(0.0, 1.0, 0.5, 9.0).unwrap();
        let t = truncate(&f, 2.0).unwrap();
        assert_eq!(t.dense_values(), vec![2.0, 2.0]);
        let small = GridFunction::on_interval(0.0, 1.0, 0.5, vec![-1.0, 2.0]).unwrap();
        assert_eq!(truncate(&small, 2.0).unwrap(), small);
        assert!(truncate(&small, 0.0).is_err());
    }

    #[test]
    fn truncated_tail_is_capped() {
        let g = Grid::line(0.0, 1.0, 0.5).unwrap();
        let f = GridFunction::new(
            g,
            vec![0.0; 2],
            Tail::power_law(8.0, 1.0, 1.0, TailSide::Right),
        )
        .unwrap();
        let t = truncate(&f, 2.0).unwrap();
        // 8/x > 2 on (1, 4): capped at 2 there.
        assert_eq!(t.eval(&[3.0]), 2.0);
        assert_eq!(t.eval(&[8.0]), 1.0);
        assert_eq!(t.superlevel_measure(1.5), 8.0 / 1.5 - 1.0);
    }

    #[test]
    fn clamp_of_large_constant() {
        let f = GridFunction::constant_on(0.0, 1.0, 0.25, 3.0).unwrap();
        assert_eq!(clamp_unit(&f), unit());
        assert_eq!(clamp_unit(&GridFunction::zero(1)), GridFunction::zero(1));
    }

    #[test]
    fn clamp_of_tail_matches_clamp_integral() {
        let g = Grid::line(0.0, 1.0, 0.5).unwrap();
        let f = GridFunction::new(
            g,
            vec![5.0, -0.5],
            Tail::power_law(-3.0, 2.0, 1.0, TailSide::Right),
        )
        .unwrap();
        let c = clamp_unit(&f);
        let a = f
            .integrate(Transform::ClampPower(2.0), &Region::All)
            .unwrap();
        let b = c.integrate(Transform::Power(2.0), &Region::All).unwrap();
        assert!((a - b).abs() < 1e-14);
    }
}

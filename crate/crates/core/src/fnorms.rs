//! The F-norm `‖f‖_{α_p} = ‖min(|f|, 1)‖_p`, the `L^p` norm, and the metric
//! `d(f, g) = ‖f − g‖_{α_p}`.
//!
//! The metric satisfies the triangle inequality for every `p >= 1`:
//! `min(|a + b|, 1) <= min(|a|, 1) + min(|b|, 1)` pointwise, and Minkowski's
//! inequality does the rest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, Region, Transform};

/// Integrability exponent, `1 <= p < inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    p: f64,
}

impl NormParams {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(Self { p })
        } else {
            Err(Error::InvalidParameter(format!(
                "p must satisfy 1 <= p < inf, got {p}"
            )))
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// `(int |f|^p)^(1/p)`; `f64::INFINITY` when a power-law tail diverges.
pub fn lp_norm(f: &GridFunction, params: NormParams) -> f64 {
    match f.integrate(Transform::Power(params.p), &Region::All) {
        Ok(v) => v.powf(1.0 / params.p),
        Err(_) => f64::INFINITY,
    }
}

/// `(int min(|f|,1)^p)^(1/p)`.
pub fn alpha_norm(f: &GridFunction, params: NormParams) -> Result<f64> {
    Ok(alpha_integral(f, params)?.powf(1.0 / params.p))
}

/// `int min(|f|,1)^p`, i.e. `alpha_norm(f)^p` without the root.
pub fn alpha_integral(f: &GridFunction, params: NormParams) -> Result<f64> {
    f.integrate(Transform::ClampPower(params.p), &Region::All)
}

pub fn alpha_distance(f: &GridFunction, g: &GridFunction, params: NormParams) -> Result<f64> {
    alpha_norm(&f.sub(g)?, params)
}

/// `‖f − g‖_p`, possibly infinite.
pub fn lp_distance(f: &GridFunction, g: &GridFunction, params: NormParams) -> Result<f64> {
    Ok(lp_norm(&f.sub(g)?, params))
}

/// Finite-horizon α_p-convergence diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// `d_k = ‖f_k − f‖_{α_p}` for `k = 1..=K`.
    pub distances: Vec<f64>,
    pub tol: f64,
    /// `d_K < tol`.
    pub converged: bool,
    /// Whether `d_k` never increases along the sequence.
    pub nonincreasing: bool,
}

impl ConvergenceReport {
    pub(crate) fn from_sequence(distances: Vec<f64>, tol: f64) -> Self {
        let converged = distances.last().is_some_and(|&d| d < tol);
        let nonincreasing = distances.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        Self {
            distances,
            tol,
            converged,
            nonincreasing,
        }
    }
}

pub fn alpha_converges(
    seq: &[GridFunction],
    limit: &GridFunction,
    params: NormParams,
    tol: f64,
) -> Result<ConvergenceReport> {
    if seq.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let distances = seq
        .iter()
        .enumerate()
        .map(|(k, f)| alpha_distance(f, limit, params).map_err(|e| Error::member(k, e)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport::from_sequence(distances, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, Tail, TailSide};

    fn p(v: f64) -> NormParams {
        NormParams::new(v).unwrap()
    }

    #[test]
    fn rejects_small_p() {
        assert!(NormParams::new(0.5).is_err());
        assert!(NormParams::new(f64::INFINITY).is_err());
    }

    #[test]
    fn unit_indicator_norms() {
        let f = GridFunction::constant_on(0.0, 1.0, 0.25, 1.0).unwrap();
        for q in [1.0, 2.0, 5.0] {
            assert_eq!(lp_norm(&f, p(q)), 1.0);
            assert_eq!(alpha_norm(&f, p(q)).unwrap(), 1.0);
        }
    }

    #[test]
    fn zero_and_half() {
        assert_eq!(alpha_norm(&GridFunction::zero(1), p(2.0)).unwrap(), 0.0);
        let half = GridFunction::constant_on(0.0, 1.0, 0.5, 0.5).unwrap();
        assert_eq!(alpha_norm(&half, p(1.0)).unwrap(), 0.5);
    }

    #[test]
    fn saturated_bump_has_unit_alpha_norm() {
        for k in [1.0, 7.0, 1000.0] {
            let f = GridFunction::constant_on(0.0, 1.0, 0.5, k).unwrap();
            assert_eq!(alpha_norm(&f, p(3.0)).unwrap(), 1.0);
        }
    }

    #[test]
    fn harmonic_tail_infinite_l1() {
        let g = Grid::line(0.0, 1.0, 0.25).unwrap();
        let f = GridFunction::new(
            g,
            vec![0.0; 4],
            Tail::power_law(1.0, 1.0, 1.0, TailSide::Right),
        )
        .unwrap();
        assert_eq!(lp_norm(&f, p(1.0)), f64::INFINITY);
        assert!((lp_norm(&f, p(2.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn self_distance_is_zero() {
        let f = GridFunction::on_interval(0.0, 1.0, 0.25, vec![3.0, -1.0, 0.2, 9.0]).unwrap();
        assert_eq!(alpha_distance(&f, &f, p(1.5)).unwrap(), 0.0);
    }

    #[test]
    fn translated_bumps_do_not_converge() {
        let seq: Vec<_> = (1..=5)
            .map(|k| GridFunction::constant_on(k as f64, k as f64 + 1.0, 1.0, 1.0).unwrap())
            .collect();
        let r = alpha_converges(&seq, &GridFunction::zero(1), p(2.0), 0.01).unwrap();
        assert!(r.distances.iter().all(|&d| d == 1.0));
        assert!(!r.converged);
    }

    #[test]
    fn constant_sequence_converges() {
        let f = GridFunction::constant_on(0.0, 2.0, 0.5, 4.0).unwrap();
        let r = alpha_converges(&vec![f.clone(); 4], &f, p(1.0), 1e-9).unwrap();
        assert_eq!(r.distances, vec![0.0; 4]);
        assert!(r.converged && r.nonincreasing);
    }
}

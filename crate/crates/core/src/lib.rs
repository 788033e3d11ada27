//! Numerical toolkit for the asymptotic Lebesgue spaces `Λ^p(R^n)`: functions
//! that are `p`-integrable off sets of arbitrarily small measure, with the
//! F-norm `‖f‖_{α_p} = ‖min(|f|, 1)‖_p`.
//!
//! Functions are piecewise constant on uniform grids in one or two
//! dimensions, with optional closed-form power-law tails, so every integral
//! the checks need is exact up to round-off.

pub mod bounded;
pub mod criteria;
pub mod error;
pub mod families;
pub mod fnorms;
pub mod grid;
pub mod io;
pub mod nets;
pub mod operators;
pub mod verdicts;

pub use criteria::{ConditionId, ConditionReport, FamilySpec, ScanConfig, ShiftLattice, Verdict};
pub use error::{Error, Result};
pub use fnorms::{alpha_distance, alpha_norm, lp_distance, lp_norm, NormParams};
pub use grid::{indicator, GridFunction, MeasurableSet, Region, Tail, TailSide, Transform};
pub use nets::EpsNet;
pub use operators::{clamp_unit, translate, translate_cells, truncate};

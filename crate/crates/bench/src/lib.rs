//! Fixture families shared by the benchmarks.

use lambdap_core::families::GeneratorSpec;
use lambdap_core::{FamilySpec, GridFunction};

/// Family built from a generator string such as `"u:k=1..64"`.
pub fn family(spec: &str, p: f64) -> FamilySpec {
    let g: GeneratorSpec = spec.parse().expect("fixture generator");
    FamilySpec::from_generator(&g, p).expect("fixture family")
}

/// Two dense functions on a fine common grid.
pub fn dense_pair(cells: usize) -> (GridFunction, GridFunction) {
    let h = 1.0 / cells as f64;
    let a: Vec<f64> = (0..cells)
        .map(|i| ((i * 7919) % 101) as f64 / 50.0 - 1.0)
        .collect();
    let b: Vec<f64> = (0..cells)
        .map(|i| ((i * 104729) % 97) as f64 / 40.0 - 1.2)
        .collect();
    (
        GridFunction::on_interval(0.0, 1.0, h, a).expect("fixture"),
        GridFunction::on_interval(0.0, 1.0, h, b).expect("fixture"),
    )
}

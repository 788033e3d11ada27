use lambdap_core::criteria::{full_report, reverify};
use lambdap_core::io::{family_from_json, family_to_json};
use lambdap_core::nets::{greedy_net, verify_covering};
use lambdap_core::{
    alpha_distance, alpha_norm, clamp_unit, lp_distance, translate_cells, truncate, FamilySpec,
    GridFunction, NormParams, ScanConfig,
};
use proptest::prelude::*;

const SPACINGS: [f64; 5] = [0.5, 0.25, 1.0 / 3.0, 0.2, 0.125];

fn function() -> impl Strategy<Value = GridFunction> {
    (0..SPACINGS.len(), -8i64..8, 1usize..24).prop_flat_map(|(hi, start, n)| {
        prop::collection::vec(prop_oneof![Just(0.0), -1.0..1.0f64, -10.0..10.0f64], n).prop_map(
            move |values| {
                let h = SPACINGS[hi];
                let lo = start as f64 * h;
                GridFunction::on_interval(lo, lo + n as f64 * h, h, values).unwrap()
            },
        )
    })
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(2.0), 1.0..4.0f64]
}

fn params(p: f64) -> NormParams {
    NormParams::new(p).unwrap()
}

proptest! {
    #[test]
    fn metric_is_symmetric_and_vanishes_on_diagonal(f in function(), g in function(), p in exponent()) {
        let pr = params(p);
        prop_assert_eq!(alpha_distance(&f, &f, pr).unwrap(), 0.0);
        let (a, b) = (alpha_distance(&f, &g, pr).unwrap(), alpha_distance(&g, &f, pr).unwrap());
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn fnorm_is_dominated_by_lp_and_by_measure(f in function(), p in exponent()) {
        let pr = params(p);
        let zero = GridFunction::zero(1);
        let a = alpha_norm(&f, pr).unwrap();
        prop_assert!(a <= lp_distance(&f, &zero, pr).unwrap() + 1e-12);
        let support = f.superlevel_measure(0.0);
        prop_assert!(a.powf(p) <= support + 1e-12);
    }

    #[test]
    fn distance_is_translation_invariant(f in function(), g in function(), m in -20i64..20, p in exponent()) {
        let pr = params(p);
        // Every spacing divides 1, so an integer shift is aligned on both grids.
        let hf = f.grid().axis(0).spacing;
        let hg = g.grid().axis(0).spacing;
        let y = m as f64;
        let cf = (y / hf).round() as i64;
        let cg = (y / hg).round() as i64;
        let d0 = alpha_distance(&f, &g, pr).unwrap();
        let d1 = alpha_distance(&translate_cells(&f, &[cf]).unwrap(), &translate_cells(&g, &[cg]).unwrap(), pr).unwrap();
        prop_assert!((d0 - d1).abs() <= 1e-12, "{} vs {}", d0, d1);
    }

    #[test]
    fn truncation_is_idempotent_and_bounded(f in function(), m in 0.01..20.0f64) {
        let t = truncate(&f, m).unwrap();
        prop_assert_eq!(&truncate(&t, m).unwrap(), &t);
        prop_assert!(t.sup_abs() <= m);
        prop_assert!(clamp_unit(&f).sup_abs() <= 1.0);
    }

    #[test]
    fn json_round_trip(fs in prop::collection::vec(function(), 1..5)) {
        let text = family_to_json(&fs).unwrap();
        prop_assert_eq!(family_from_json(&text).unwrap(), fs);
    }

    #[test]
    fn report_entries_reverify(fs in prop::collection::vec(function(), 1..6), p in exponent(), eps in 0.1..1.5f64) {
        let family = FamilySpec::new(fs, params(p)).unwrap();
        let report = full_report(&family, &[eps], &ScanConfig::default()).unwrap();
        for e in &report.entries {
            prop_assert!(reverify(&family, e, eps).unwrap(), "{:?}", e);
        }
    }

    #[test]
    fn greedy_nets_cover(fs in prop::collection::vec(function(), 1..12), p in exponent(), eps in 0.05..2.0f64) {
        let family = FamilySpec::new(fs, params(p)).unwrap();
        let net = greedy_net(&family, eps).unwrap();
        prop_assert!(verify_covering(&family, &net).unwrap().pass);
        prop_assert!(net.size() <= family.len());
    }
}

use decoherence_core::kernels::{
    kernel_k_asymptotic, kernel_k_closed, kernel_k_coincident_limit, kernel_k_numeric, segment_i_aa, segment_i_ab,
    segment_j_ab_closed, segment_j_ab_numeric,
};
use decoherence_core::{Branch, JabForm, QuadratureConfig, SegmentPairInput};
use proptest::prelude::*;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

#[test]
fn closed_kernel_matches_principal_value() {
    for ratio in [1.5, 2.0, 5.0, 10.0, 100.0] {
        for rho in [1e-3, 1.0, 250.0] {
            let closed = kernel_k_closed(ratio * rho, rho).unwrap();
            let num = kernel_k_numeric(ratio * rho, rho, &cfg()).unwrap();
            assert!(((closed - num.value) / closed).abs() < 1e-8, "T/rho = {ratio}: {closed} vs {num:?}");
        }
    }
}

#[test]
fn coincident_limit_from_both_sides() {
    let lim = kernel_k_coincident_limit();
    assert!((lim + 2.0 * std::f64::consts::LN_2).abs() < 1e-15);
    let near = kernel_k_closed(1.0 + 1e-12, 1.0).unwrap();
    assert!((near - lim).abs() < 1e-10);
}

#[test]
fn asymptote_within_one_percent_at_ratio_100() {
    let k = kernel_k_closed(100.0, 1.0).unwrap();
    let a = kernel_k_asymptotic(100.0, 1.0).unwrap();
    assert!(((k - a) / k).abs() < 0.01);
}

#[test]
fn segment_oracles_at_small_speed() {
    let theta = 0.9;
    let inp = SegmentPairInput::new(200.0, 2e4, 1.0, 0.01, theta).unwrap();
    for (name, closed, num) in [
        (
            "I_aa",
            segment_i_aa(&inp, Branch::Closed, &cfg()).unwrap(),
            segment_i_aa(&inp, Branch::Numeric, &cfg()).unwrap(),
        ),
        (
            "I_ab",
            segment_i_ab(&inp, Branch::Closed, &cfg()).unwrap(),
            segment_i_ab(&inp, Branch::Numeric, &cfg()).unwrap(),
        ),
    ] {
        assert!(((num.value - closed.value) / closed.value).abs() < 0.02, "{name}: {num:?} vs {closed:?}");
    }
    let exact = segment_j_ab_closed(&inp, JabForm::Exact);
    let num = segment_j_ab_numeric(&inp, &cfg()).unwrap();
    assert!((exact - num.value).abs() < 1e-8);
}

#[test]
fn i_aa_negative_below_unit_log_argument() {
    for (l1, v, theta) in [(100.0, 0.01, 0.3), (1e3, 0.05, 1.2), (50.0, 0.1, 1.5)] {
        let inp = SegmentPairInput::new(l1, 100.0 * l1, 1.0, v, theta).unwrap();
        let closed = segment_i_aa(&inp, Branch::Closed, &cfg()).unwrap().value;
        let num = segment_i_aa(&inp, Branch::Numeric, &cfg().with_rel_tol(1e-8)).unwrap().value;
        assert!(closed < 0.0 && num < 0.0, "{closed} {num}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernel_is_scale_invariant(ratio in 0.05f64..500.0, lambda in prop::sample::select(vec![0.1, 3.0, 42.0])) {
        prop_assume!((ratio - 1.0).abs() > 1e-6);
        let base = kernel_k_closed(ratio, 1.0).unwrap();
        let scaled = kernel_k_closed(lambda * ratio, lambda).unwrap();
        prop_assert!((base - scaled).abs() <= 1e-12 * base.abs().max(1.0));
    }

    #[test]
    fn kernel_closed_and_numeric_agree(ratio in 1.05f64..300.0) {
        let closed = kernel_k_closed(ratio, 1.0).unwrap();
        let num = kernel_k_numeric(ratio, 1.0, &cfg()).unwrap();
        prop_assert!(((closed - num.value) / closed).abs() < 1e-8);
    }

    #[test]
    fn kernel_asymptote_envelope(ratio in 10.0f64..1e6) {
        let k = kernel_k_closed(ratio, 1.0).unwrap();
        let a = kernel_k_asymptotic(ratio, 1.0).unwrap();
        prop_assert!((k - a).abs() <= 3.0 / ratio);
    }

    #[test]
    fn kernel_finite_away_from_coincidence(ratio in 1e-4f64..1e4) {
        prop_assume!((ratio - 1.0).abs() > 1e-9);
        prop_assert!(kernel_k_closed(ratio, 1.0).unwrap().is_finite());
    }

    #[test]
    fn j_ab_exact_matches_double_integral(l1 in 5.0f64..500.0, m in 2.0f64..200.0, v in 0.001f64..0.5, theta in 0.1f64..1.5) {
        let inp = SegmentPairInput::new(l1, m * l1, 1.0, v, theta).unwrap();
        let exact = segment_j_ab_closed(&inp, JabForm::Exact);
        let num = segment_j_ab_numeric(&inp, &cfg()).unwrap();
        prop_assert!((exact - num.value).abs() < 1e-8, "{exact} vs {num:?}");
    }
}

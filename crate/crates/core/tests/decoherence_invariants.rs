use std::f64::consts::{FRAC_PI_2, PI};

use decoherence_core::decoherence::{
    w_parallel_plateau, w_photon_intersecting_reference, w_total_intersecting_reference,
    w_total_intersecting_with_kappa, w_total_parallel_with_kappa,
};
use decoherence_core::{
    interference_pattern, w_total_intersecting, w_total_parallel, Branch, IntersectingGeometry, KappaResult,
    ParallelGeometry, PhysicalConstants, QuadratureConfig, Wavepacket,
};
use proptest::prelude::*;

fn consts() -> PhysicalConstants {
    PhysicalConstants::default()
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

#[test]
fn parallel_plateau_for_sphere_packet() {
    let wp = Wavepacket::sphere(0.5).unwrap();
    let w4 = w_total_parallel(&ParallelGeometry::new(100.0, 1e6, 0.05).unwrap(), &wp, &cfg(), &consts()).unwrap();
    let w5 = w_total_parallel(&ParallelGeometry::new(100.0, 1e7, 0.05).unwrap(), &wp, &cfg(), &consts()).unwrap();
    assert!((w4.w_total - w5.w_total).abs() < 1e-3 * w4.w_total.abs());
    let kap = KappaResult::from_parts(-1.5, 1.0).unwrap();
    let plateau = w_parallel_plateau(100.0, &kap, &consts());
    assert!(((w5.w_total - plateau) / plateau).abs() < 0.005);
}

#[test]
fn intersecting_closed_is_independent_of_ell_and_l2() {
    let geom = IntersectingGeometry::new(100.0, 1e4, 0.8, 0.02).unwrap();
    let base =
        w_total_intersecting(&geom, &Wavepacket::sphere(0.5).unwrap(), Branch::Closed, &cfg(), &consts()).unwrap();
    let wider =
        w_total_intersecting(&geom, &Wavepacket::sphere(5.0).unwrap(), Branch::Closed, &cfg(), &consts()).unwrap();
    let longer = IntersectingGeometry::new(100.0, 1e5, 0.8, 0.02).unwrap();
    let longer =
        w_total_intersecting(&longer, &Wavepacket::sphere(0.5).unwrap(), Branch::Closed, &cfg(), &consts()).unwrap();
    let eps = 8.0 * f64::EPSILON * base.w_vacuum.abs().max(base.w_photon.abs());
    assert!((base.w_total - wider.w_total).abs() <= eps);
    assert!((base.w_total - longer.w_total).abs() <= eps);
}

#[test]
fn intersecting_assembled_tracks_closed_within_truncation() {
    let geom = IntersectingGeometry::new(300.0, 3e4, 0.6, 0.01).unwrap();
    let kap = KappaResult::from_parts(-1.5, 1.0).unwrap();
    let closed = w_total_intersecting_with_kappa(&geom, &kap, Branch::Closed, &cfg(), &consts()).unwrap();
    let assembled =
        w_total_intersecting_with_kappa(&geom, &kap, Branch::Numeric, &cfg().with_rel_tol(1e-8), &consts()).unwrap();
    assert!(((assembled.w_total - closed.w_total) / closed.w_total).abs() < 0.02, "{assembled:?} vs {closed:?}");
    let reference = w_total_intersecting_reference(&geom, &kap, &consts());
    assert!((closed.w_total - reference).abs() < 1e-15);
}

#[test]
fn photon_term_assembly_is_exact() {
    let geom = IntersectingGeometry::new(50.0, 8e3, 1.1, 0.07).unwrap();
    let kap = KappaResult::from_parts(-1.2, 0.3).unwrap();
    let r = w_total_intersecting_with_kappa(&geom, &kap, Branch::Closed, &cfg(), &consts()).unwrap();
    let i = 2.0 * r.get("I_aa").unwrap() + r.get("I_bb").unwrap() + 4.0 * r.get("I_ab").unwrap();
    let s = 0.07 * 1.1f64.sin();
    let bracket = -2.0 * (1.0 - std::f64::consts::LN_2 + (8e3 / (0.3 * s)).ln());
    assert!((i - bracket).abs() <= 16.0 * f64::EPSILON * bracket.abs());
    assert!((r.w_photon - w_photon_intersecting_reference(&geom, 0.3, &consts())).abs() < 1e-15);
}

#[test]
fn magnitude_for_perpendicular_opening() {
    let geom = IntersectingGeometry::new(100.0, 1e4, FRAC_PI_2, 0.1).unwrap();
    let r = w_total_intersecting(&geom, &Wavepacket::sphere(0.5).unwrap(), Branch::Closed, &cfg(), &consts()).unwrap();
    assert!((r.w_total - 0.0222).abs() < 5e-4);
    let change = r.contrast - 1.0;
    assert!((0.01..=0.03).contains(&change.abs()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn totals_are_exact_sums(r0 in 1.0f64..1e3, ratio in 2.0f64..1e6, v in 0.001f64..0.9, kappa in -3.0f64..0.0) {
        let kap = KappaResult::from_parts(kappa, 1.0).unwrap();
        let g = ParallelGeometry::new(r0, r0 * ratio, v).unwrap();
        let r = w_total_parallel_with_kappa(&g, &kap, &consts()).unwrap();
        prop_assert_eq!(r.w_total, r.w_vacuum + r.w_photon);
        prop_assert_eq!(r.contrast, r.w_total.exp());
    }

    #[test]
    fn photon_emission_only_decoheres(l1 in 20.0f64..1e3, m in 10.0f64..1e3, theta in 0.05f64..FRAC_PI_2, v in 0.001f64..0.2) {
        let geom = IntersectingGeometry::new(l1, m * l1, theta, v).unwrap();
        let kap = KappaResult::from_parts(-1.5, 1.0).unwrap();
        let r = w_total_intersecting_with_kappa(&geom, &kap, Branch::Closed, &cfg(), &consts()).unwrap();
        prop_assert!(r.w_photon.exp() <= 1.0);
        prop_assert_eq!(r.w_total, r.w_vacuum + r.w_photon);
    }

    #[test]
    fn density_nonnegative_when_exponent_nonpositive(a in 0.0f64..4.0, b in 0.0f64..4.0, w in -1.0f64..0.0) {
        let geom = ParallelGeometry::new(10.0, 1e3, 0.1).unwrap();
        let kap = KappaResult::from_parts(0.0, 1.0).unwrap();
        let mut r = w_total_parallel_with_kappa(&geom, &kap, &consts()).unwrap();
        r.w_total = w;
        r.contrast = w.exp();
        for k in 0..1000 {
            let phase = 2.0 * PI * k as f64 / 1000.0;
            prop_assert!(interference_pattern(a, b, phase, &r).unwrap() >= -1e-15);
        }
    }
}

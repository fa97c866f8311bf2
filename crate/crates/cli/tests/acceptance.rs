//! Acceptance suite. One line per criterion; exits nonzero if any fail.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, LN_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use decoherence_core::decoherence::{
    w_parallel_plateau, w_photon_intersecting, w_photon_intersecting_reference, w_total_intersecting_reference,
    w_total_parallel_with_kappa, w_vacuum_intersecting, w_vacuum_intersecting_reference,
};
use decoherence_core::kernels::{
    kernel_k_asymptotic, kernel_k_closed, kernel_k_coincident_limit, kernel_k_numeric, segment_i_aa, segment_i_ab,
    segment_j_ab_closed, segment_j_ab_numeric,
};
use decoherence_core::wavepacket::{kappa_bruteforce_oracle, kappa_numeric, SPHERE_KAPPA};
use decoherence_core::{
    interference_pattern, kappa, max_flight_distance, w_total_intersecting, Branch, DecoherenceResult,
    IntersectingGeometry, JabForm, KappaResult, LengthUnit, ParallelGeometry, PhysicalConstants, QuadratureConfig,
    SegmentPairInput, ValidityInput, Wavepacket,
};

type Outcome = Result<String, String>;
type Criterion = (u32, Option<Duration>, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let stamp = |s: String| format!("{s}; {:.2} s", took.as_secs_f64());
    match (out, limit) {
        (Ok(s), Some(lim)) if took > lim => Err(stamp(format!("{s}; over the {} s limit", lim.as_secs()))),
        (Ok(s), _) => Ok(stamp(s)),
        (Err(s), _) => Err(stamp(s)),
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn c1() -> Outcome {
    let cfg = QuadratureConfig::default();
    let sphere = Wavepacket::sphere(1.0).map_err(err)?;
    let num = kappa_numeric(&sphere, &cfg).map_err(err)?;
    let mc = kappa_bruteforce_oracle(&sphere, 10_000_000, 1).map_err(err)?;
    let num_dev = (num.kappa - SPHERE_KAPPA).abs();
    let mc_dev = (mc.kappa - SPHERE_KAPPA).abs();
    check(
        num_dev < 1e-3 && mc_dev <= 4.0 * mc.error_estimate,
        format!(
            "quadrature {:.10} (|dev| {num_dev:.1e}), sampling {:.5} ± {:.1e} at 1e7",
            num.kappa, mc.kappa, mc.error_estimate
        ),
    )
}

fn c2() -> Outcome {
    let argv = ["decoherence", "kappa-sweep", "--beta-min", "0.1", "--beta-max", "20", "--steps", "40", "--log"];
    let (mut out, mut errs) = (Vec::new(), Vec::new());
    let code = decoherence_cli::run(argv, &mut out, &mut errs);
    if code != 0 {
        return Err(format!("exit {code}: {}", String::from_utf8_lossy(&errs)));
    }
    let text = String::from_utf8(out).map_err(err)?;
    let mut lines = text.lines();
    if lines.next() != Some("beta,kappa,error_estimate") {
        return Err("unexpected header".into());
    }
    let rows: Vec<[f64; 3]> = lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect();
            [v[0], v[1], v[2]]
        })
        .collect();
    if rows.len() != 41 {
        return Err(format!("{} rows, expected 40 plus the β = 2 node", rows.len()));
    }
    if rows.iter().any(|r| r.iter().any(|x| !x.is_finite())) {
        return Err("non-finite value in sweep".into());
    }
    let i = rows.iter().position(|r| r[0] == 2.0).ok_or("β = 2 missing from sweep")?;
    let (l, m, r) = (rows[i - 1], rows[i], rows[i + 1]);
    let left = (m[1] - l[1]) / (m[0] - l[0]);
    let right = (r[1] - m[1]) / (r[0] - m[0]);
    let sigma = (m[2] + l[2]) / (m[0] - l[0]) + (r[2] + m[2]) / (r[0] - m[0]);
    let jump = (left - right).abs();

    // continuity: no step between neighbours larger than the log-grid spacing allows
    let max_step = rows.windows(2).map(|w| (w[1][1] - w[0][1]).abs()).fold(0.0, f64::max);
    let (lo, hi) = rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r[1].abs()), hi.max(r[1].abs())));
    check(
        jump > 5.0 * sigma && max_step < 0.25 && lo > 0.1 && hi < 10.0,
        format!(
            "slopes at β = 2: {left:.4} | {right:.4}, jump {jump:.3} vs 5σ = {:.1e}; |κ| in [{lo:.3}, {hi:.3}], largest step {max_step:.3}",
            5.0 * sigma
        ),
    )
}

fn c3() -> Outcome {
    let cfg = QuadratureConfig::default();
    let mut worst = 0.0f64;
    for ratio in [1.5, 2.0, 5.0, 10.0, 100.0] {
        let closed = kernel_k_closed(ratio, 1.0).map_err(err)?;
        let pv = kernel_k_numeric(ratio, 1.0, &cfg).map_err(err)?;
        worst = worst.max(((closed - pv.value) / pv.value).abs());
    }
    let limit = kernel_k_coincident_limit();
    let limit_dev = (limit + 2.0 * LN_2).abs();
    let near_dev = (kernel_k_closed(1.0 + 1e-12, 1.0).map_err(err)? + 2.0 * LN_2).abs();
    check(
        worst < 1e-8 && limit_dev <= 1e-10 && near_dev <= 1e-10,
        format!("worst relative deviation {worst:.1e}; limit {limit:.15}, closed form at T/ρ = 1 + 1e-12 off by {near_dev:.1e}"),
    )
}

fn c4() -> Outcome {
    let closed = kernel_k_closed(100.0, 1.0).map_err(err)?;
    let asym = kernel_k_asymptotic(100.0, 1.0).map_err(err)?;
    let rel = ((closed - asym) / closed).abs();
    check(rel < 0.01, format!("K = {closed:.10}, asymptote {asym:.10}, relative gap {rel:.1e}"))
}

fn c5() -> Outcome {
    let cfg = QuadratureConfig::default();
    let consts = PhysicalConstants::default();
    let kap = kappa(&Wavepacket::sphere(0.5).map_err(err)?, &cfg).map_err(err)?;
    let r0 = 100.0 * kap.ell;
    let w = |t: f64| -> Result<DecoherenceResult, String> {
        let g = ParallelGeometry::new(r0, t, 0.01).map_err(err)?;
        w_total_parallel_with_kappa(&g, &kap, &consts).map_err(err)
    };
    let (w4, w5) = (w(1e4 * r0)?.w_total, w(1e5 * r0)?.w_total);
    let drift = (w4 - w5).abs() / w5.abs();
    let plateau = w_parallel_plateau(r0, &kap, &consts);
    let target = consts.alpha_fs / PI * (2.0 * 100f64.ln() + 1.5);
    let rel = ((w5 - target) / target).abs();
    check(
        drift < 1e-3 && rel < 5e-3 && (plateau - target).abs() <= 1e-15,
        format!("W(1e4 r0) = {w4:.10}, W(1e5 r0) = {w5:.10}, drift {drift:.1e}; plateau {target:.10}, gap {rel:.1e}"),
    )
}

fn c6() -> Outcome {
    let cfg = QuadratureConfig::default();
    let consts = PhysicalConstants::default();
    let kap = KappaResult::from_parts(SPHERE_KAPPA, 1.0).map_err(err)?;
    let mut worst_identity = 0.0f64;
    let mut worst_invariance = 0.0f64;
    for (l1, l2, theta, v) in [(100.0, 1e4, FRAC_PI_2, 0.1), (1e3, 1e6, 0.3, 0.01), (50.0, 2e3, 1.1, 0.05)] {
        let g = IntersectingGeometry::new(l1, l2, theta, v).map_err(err)?;
        let wg = w_photon_intersecting(&g, &kap, Branch::Closed, &cfg, &consts).map_err(err)?;
        let wg_ref = w_photon_intersecting_reference(&g, kap.ell, &consts);
        let wv = w_vacuum_intersecting(&g, &kap, Branch::Closed, &consts).map_err(err)?;
        let wv_ref = w_vacuum_intersecting_reference(&g, &kap, &consts);
        worst_identity = worst_identity.max(((wg - wg_ref) / wg_ref).abs()).max(((wv - wv_ref) / wv_ref).abs());

        let base = w_total_intersecting(&g, &Wavepacket::sphere(0.5).map_err(err)?, Branch::Closed, &cfg, &consts)
            .map_err(err)?
            .w_total;
        let wide = w_total_intersecting(&g, &Wavepacket::sphere(5.0).map_err(err)?, Branch::Closed, &cfg, &consts)
            .map_err(err)?
            .w_total;
        let g_long = IntersectingGeometry::new(l1, 10.0 * l2, theta, v).map_err(err)?;
        let long = w_total_intersecting(&g_long, &Wavepacket::sphere(0.5).map_err(err)?, Branch::Closed, &cfg, &consts)
            .map_err(err)?
            .w_total;
        let reference = w_total_intersecting_reference(&g, &kap, &consts);
        for w in [wide, long, reference] {
            worst_invariance = worst_invariance.max(((w - base) / base).abs());
        }
    }
    // a few ulps of the O(10) log terms that cancel
    let tol = 64.0 * f64::EPSILON;
    check(
        worst_identity <= tol && worst_invariance <= tol,
        format!(
            "assembly vs bracket {worst_identity:.1e}, ℓ and L₂ rescaling {worst_invariance:.1e} (tolerance {tol:.1e})"
        ),
    )
}

fn c7() -> Outcome {
    let cfg = QuadratureConfig::default();
    let aa_in = SegmentPairInput::new(1e3, 1e5, 1.0, 0.01, FRAC_PI_6).map_err(err)?;
    let aa_num = segment_i_aa(&aa_in, Branch::Numeric, &cfg).map_err(err)?.value;
    let aa_closed = segment_i_aa(&aa_in, Branch::Closed, &cfg).map_err(err)?.value;
    let ab_in = SegmentPairInput::new(1.0, 100.0, 0.01, 0.01, FRAC_PI_4).map_err(err)?;
    let ab_num = segment_i_ab(&ab_in, Branch::Numeric, &cfg).map_err(err)?.value;
    let ab_closed = segment_i_ab(&ab_in, Branch::Closed, &cfg).map_err(err)?.value;
    let aa_rel = ((aa_closed - aa_num) / aa_num).abs();
    let ab_rel = ((ab_closed - ab_num) / ab_num).abs();
    let mut jab_worst = 0.0f64;
    for (l1, l2, v, theta) in [(100.0, 1e4, 0.01, 0.3), (7.0, 50.0, 0.3, 1.2), (20.0, 400.0, 0.1, FRAC_PI_2)] {
        let inp = SegmentPairInput::new(l1, l2, 1.0, v, theta).map_err(err)?;
        let num = segment_j_ab_numeric(&inp, &cfg).map_err(err)?.value;
        jab_worst = jab_worst.max((segment_j_ab_closed(&inp, JabForm::Exact) - num).abs());
    }
    check(
        aa_rel < 0.02 && ab_rel < 0.02 && jab_worst < 1e-8,
        format!(
            "I_aa {aa_num:.8} vs {aa_closed:.8} ({:.2}%), I_ab {ab_num:.8} vs {ab_closed:.8} ({:.2}%), J_ab worst {jab_worst:.1e}",
            100.0 * aa_rel,
            100.0 * ab_rel
        ),
    )
}

fn c8() -> Outcome {
    let cfg = QuadratureConfig::default();
    let consts = PhysicalConstants::default();
    let g = IntersectingGeometry::new(100.0, 1e4, FRAC_PI_2, 0.1).map_err(err)?;
    let r =
        w_total_intersecting(&g, &Wavepacket::sphere(0.5).map_err(err)?, Branch::Closed, &cfg, &consts).map_err(err)?;
    let change = (r.contrast - 1.0).abs();
    check(
        (r.w_total - 0.022).abs() < 0.0005 && (0.01..=0.03).contains(&change),
        format!("W = {:.6}, |e^W − 1| = {:.3}%", r.w_total, 100.0 * change),
    )
}

fn c9() -> Outcome {
    let inp = ValidityInput::new(1e4, 1.0, LengthUnit::Micrometer).map_err(err)?;
    let d = max_flight_distance(&inp).meters;
    check((0.9..=1.1).contains(&d), format!("L_max = {d:.4} m"))
}

fn c10() -> Outcome {
    let consts = PhysicalConstants::default();
    let kap = KappaResult::from_parts(SPHERE_KAPPA, 1.0).map_err(err)?;
    let g = ParallelGeometry::new(100.0, 1e6, 0.01).map_err(err)?;
    let template = w_total_parallel_with_kappa(&g, &kap, &consts).map_err(err)?;
    let with_w = |w: f64| DecoherenceResult { w_total: w, contrast: w.exp(), ..template.clone() };

    let (mut worst_free, mut lowest) = (0.0f64, f64::INFINITY);
    let intensities: [(f64, f64); 4] = [(1.0, 1.0), (0.3, 2.0), (0.0, 1.5), (4.0, 0.25)];
    for k in 0..1000 {
        let phase = 2.0 * PI * k as f64 / 1000.0;
        for &(a, b) in &intensities {
            let free = a + b + 2.0 * (a * b).sqrt() * phase.cos();
            let n0 = interference_pattern(a, b, phase, &with_w(0.0)).map_err(err)?;
            worst_free = worst_free.max((n0 - free).abs());
            for w in [-1e-3, -0.1, -1.0, -10.0] {
                lowest = lowest.min(interference_pattern(a, b, phase, &with_w(w)).map_err(err)?);
            }
        }
    }
    check(
        worst_free <= 4.0 * f64::EPSILON && lowest >= -4.0 * f64::EPSILON,
        format!("W = 0 deviation {worst_free:.1e}; lowest density for W ≤ 0 is {lowest:.3e}"),
    )
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria: [Criterion; 10] = [
        (1, secs(30), c1),
        (2, secs(300), c2),
        (3, secs(10), c3),
        (4, None, c4),
        (5, None, c5),
        (6, None, c6),
        (7, secs(120), c7),
        (8, None, c8),
        (9, None, c9),
        (10, None, c10),
    ];
    let mut failed = 0;
    for (n, limit, f) in criteria {
        match timed(limit, f) {
            Ok(detail) => println!("criterion {n}: PASS ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n}: FAIL ({detail})");
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

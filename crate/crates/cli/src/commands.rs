use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};
use std::fs::File;
use std::io::{BufWriter, Write};

use rayon::prelude::*;

use decoherence_core::decoherence::{
    w_parallel_plateau, w_total_intersecting_reference, w_total_intersecting_with_kappa, w_total_parallel_with_kappa,
};
use decoherence_core::kernels::{
    kernel_k_asymptotic, kernel_k_closed, kernel_k_coincident_limit, kernel_k_numeric, segment_i_aa, segment_i_ab,
    segment_i_bb, segment_i_bb_kernel, segment_j_ab_closed, segment_j_ab_numeric,
};
use decoherence_core::wavepacket::{kappa_bruteforce_oracle, kappa_numeric, SPHERE_KAPPA};
use decoherence_core::{
    check_regime, kappa, max_flight_distance, Branch, Geometry, IntersectingGeometry, JabForm, KappaResult,
    ParallelGeometry, QuadratureConfig, RegimeWarning, SegmentPairInput, ValidityInput, Wavepacket,
};

use crate::args::{
    BeamArgs, Cli, Command, IntersectArgs, IntersectBranch, KappaSweepArgs, ParallelArgs, ShapeArgs, ShapeKind, Suite,
    ValidityArgs, VerifyArgs,
};
use crate::format::{sig, Csv};
use crate::CliError;

struct Ctx<'a> {
    cli: &'a Cli,
    cfg: QuadratureConfig,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn unit(&self) -> &'static str {
        self.cli.unit.symbol()
    }

    /// CSV destination: `--out` if given, standard output otherwise.
    fn csv_sink(&mut self) -> Result<Box<dyn Write + '_>, CliError> {
        match &self.cli.out {
            Some(path) => {
                let f = File::create(path)
                    .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))?;
                Ok(Box::new(BufWriter::new(f)))
            }
            None => Ok(Box::new(&mut *self.stdout)),
        }
    }

    fn warn_all(&mut self, warnings: &[RegimeWarning]) -> Result<(), CliError> {
        for w in warnings {
            writeln!(self.stderr, "warning: {w}")?;
        }
        Ok(())
    }
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let cfg = QuadratureConfig::default().with_rel_tol(cli.rel_tol);
    cfg.validate()?;
    let mut ctx = Ctx { cli, cfg, stdout, stderr };
    match &cli.command {
        Command::KappaSweep(a) => kappa_sweep(&mut ctx, a),
        Command::Parallel(a) => parallel(&mut ctx, a),
        Command::Intersect(a) => intersect(&mut ctx, a),
        Command::Verify(a) => verify(&mut ctx, a),
        Command::Validity(a) => validity(&mut ctx, a),
    }
}

pub fn grid(lo: f64, hi: f64, steps: usize, log: bool) -> Result<Vec<f64>, CliError> {
    if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) {
        return Err(CliError::Usage(format!("sweep range needs 0 < from < to (got {lo}, {hi})")));
    }
    if steps < 2 {
        return Err(CliError::Usage(format!("steps must be at least 2 (got {steps})")));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            let t = i as f64 / last;
            match (i, log) {
                (0, _) => lo,
                (i, _) if i == steps - 1 => hi,
                (_, true) => lo * (hi / lo).powf(t),
                (_, false) => lo + (hi - lo) * t,
            }
        })
        .collect())
}

/// The κ(β) cusp sits at β = 2; make sure the grid resolves it.
pub fn with_cusp(mut betas: Vec<f64>) -> Vec<f64> {
    const CUSP: f64 = 2.0;
    let (lo, hi) = (betas[0], betas[betas.len() - 1]);
    if lo < CUSP && CUSP < hi && !betas.iter().any(|&b| (b - CUSP).abs() <= 1e-12 * CUSP) {
        betas.push(CUSP);
        betas.sort_by(f64::total_cmp);
    }
    betas
}

fn kappa_sweep(ctx: &mut Ctx, a: &KappaSweepArgs) -> Result<(), CliError> {
    let header = ["beta", "kappa", "error_estimate"];
    if a.shape == ShapeKind::Sphere {
        let mut csv = Csv::new(ctx.csv_sink()?, &header)?;
        csv.row(&["-".into(), sig(SPHERE_KAPPA), sig(0.0)])?;
        return Ok(csv.finish()?);
    }
    let betas = with_cusp(grid(a.beta_min, a.beta_max, a.steps, a.log)?);
    let cfg = ctx.cfg.clone();
    let results: Vec<_> =
        betas.par_iter().map(|&beta| Wavepacket::cylinder(1.0, beta).and_then(|wp| kappa(&wp, &cfg))).collect();

    let mut csv = Csv::new(ctx.csv_sink()?, &header)?;
    let mut failure = None;
    for (beta, r) in betas.iter().zip(results) {
        match r {
            Ok(k) => csv.numbers(&[*beta, k.kappa, k.error_estimate])?,
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    csv.finish()?;
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn wavepacket(s: &ShapeArgs) -> Result<Wavepacket, CliError> {
    match s.shape {
        ShapeKind::Sphere => Ok(Wavepacket::sphere(s.radius)?),
        ShapeKind::Cylinder => {
            let length = s.length.ok_or_else(|| CliError::Usage("--length is required for --shape cylinder".into()))?;
            Ok(Wavepacket::cylinder(s.radius, length)?)
        }
    }
}

fn describe(wp: &Wavepacket, kap: &KappaResult, unit: &str) -> String {
    let shape = match wp.shape() {
        decoherence_core::Shape::UniformSphere { radius } => format!("uniform sphere R = {} {unit}", sig(radius)),
        decoherence_core::Shape::UniformCylinder { radius, length } => {
            format!("uniform cylinder R = {} {unit}, L = {} {unit}", sig(radius), sig(length))
        }
    };
    format!("{shape}; ell = {} {unit}, kappa = {} ± {}", sig(kap.ell), sig(kap.kappa), sig(kap.error_estimate))
}

fn beam(ctx: &Ctx, b: &BeamArgs) -> Result<Option<ValidityInput>, CliError> {
    match (b.energy_ev, b.dx0) {
        (Some(e), Some(dx)) => Ok(Some(ValidityInput::new(e, dx, ctx.cli.unit)?)),
        _ => Ok(None),
    }
}

fn merged(mut a: Vec<RegimeWarning>, b: Vec<RegimeWarning>) -> Vec<RegimeWarning> {
    for w in b {
        if !a.contains(&w) {
            a.push(w);
        }
    }
    a
}

fn parallel(ctx: &mut Ctx, a: &ParallelArgs) -> Result<(), CliError> {
    let geom = ParallelGeometry::new(a.r0, a.t, a.v)?;
    let wp = wavepacket(&a.shape)?;
    let beam = beam(ctx, &a.beam)?;
    let kap = kappa(&wp, &ctx.cfg)?;
    let consts = Default::default();

    if a.sweep.is_some() {
        let ts = grid(a.from.unwrap_or_default(), a.to.unwrap_or_default(), a.steps, true)?;
        let rows: Vec<_> = ts
            .par_iter()
            .map(|&t| ParallelGeometry::new(a.r0, t, a.v).and_then(|g| w_total_parallel_with_kappa(&g, &kap, &consts)))
            .collect();
        let mut csv = Csv::new(ctx.csv_sink()?, &["T", "w_vacuum", "w_photon", "w_total"])?;
        let mut failure = None;
        for (t, r) in ts.iter().zip(rows) {
            match r {
                Ok(r) => csv.numbers(&[*t, r.w_vacuum, r.w_photon, r.w_total])?,
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        csv.finish()?;
        if let Some(e) = failure {
            return Err(e.into());
        }
        let warnings = check_regime(&Geometry::Parallel(geom), &wp, beam.as_ref());
        return ctx.warn_all(&warnings);
    }

    let r = w_total_parallel_with_kappa(&geom, &kap, &consts)?;
    let u = ctx.unit();
    let out = &mut *ctx.stdout;
    writeln!(
        out,
        "parallel paths: r0 = {} {u}, T = {} {u} (rest frame, c = 1), v = {}",
        sig(a.r0),
        sig(a.t),
        sig(a.v)
    )?;
    writeln!(out, "wavepacket: {}", describe(&wp, &kap, u))?;
    writeln!(out, "K(T, r0)  = {}", sig(r.get("K").unwrap_or(f64::NAN)))?;
    writeln!(out, "W_V       = {}", sig(r.w_vacuum))?;
    writeln!(out, "W_gamma   = {}", sig(r.w_photon))?;
    writeln!(out, "W         = {}", sig(r.w_total))?;
    writeln!(out, "contrast  = e^W = {}", sig(r.contrast))?;
    writeln!(out, "plateau (T >> r0): W = {}", sig(w_parallel_plateau(a.r0, &kap, &consts)))?;
    let warnings = merged(r.warnings, check_regime(&Geometry::Parallel(geom), &wp, beam.as_ref()));
    ctx.warn_all(&warnings)
}

fn intersect(ctx: &mut Ctx, a: &IntersectArgs) -> Result<(), CliError> {
    let geom = IntersectingGeometry::new(a.l1, a.l2, a.theta, a.v)?;
    let wp = wavepacket(&a.shape)?;
    let beam = beam(ctx, &a.beam)?;
    let kap = kappa(&wp, &ctx.cfg)?;
    let consts = Default::default();
    let branch = match a.branch {
        IntersectBranch::Closed => Branch::Closed,
        IntersectBranch::Assembled => Branch::Numeric,
    };

    if a.sweep.is_some() {
        let ells = grid(a.from.unwrap_or_default(), a.to.unwrap_or_default(), a.steps, true)?;
        let cfg = ctx.cfg.clone();
        // κ is scale-free: rescaling the packet only moves ℓ
        let rows: Vec<_> = ells
            .par_iter()
            .map(|&ell| {
                let k = KappaResult { ell, ..kap };
                w_total_intersecting_with_kappa(&geom, &k, branch, &cfg, &consts)
            })
            .collect();
        let mut csv = Csv::new(ctx.csv_sink()?, &["ell", "w_vacuum", "w_photon", "w_total"])?;
        let mut failure = None;
        for (ell, r) in ells.iter().zip(rows) {
            match r {
                Ok(r) => csv.numbers(&[*ell, r.w_vacuum, r.w_photon, r.w_total])?,
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        csv.finish()?;
        return match failure {
            Some(e) => Err(e.into()),
            None => Ok(()),
        };
    }

    let r = w_total_intersecting_with_kappa(&geom, &kap, branch, &ctx.cfg, &consts)?;
    let reference = w_total_intersecting_reference(&geom, &kap, &consts);
    let u = ctx.unit();
    let out = &mut *ctx.stdout;
    writeln!(
        out,
        "intersecting paths: L1 = {} {u}, L2 = {} {u}, theta = {} rad, v = {}",
        sig(a.l1),
        sig(a.l2),
        sig(a.theta),
        sig(a.v)
    )?;
    writeln!(out, "wavepacket: {}", describe(&wp, &kap, u))?;
    writeln!(out, "branch: {}", if branch == Branch::Closed { "closed" } else { "assembled" })?;
    for (label, value) in r.breakdown.iter().filter(|(l, _)| *l != "kappa") {
        writeln!(out, "{label:<9} = {}", sig(*value))?;
    }
    writeln!(out, "W_V       = {}", sig(r.w_vacuum))?;
    writeln!(out, "W_gamma   = {}", sig(r.w_photon))?;
    writeln!(out, "W         = {}", sig(r.w_total))?;
    writeln!(out, "contrast  = e^W = {} (change {}%)", sig(r.contrast), sig(100.0 * (r.contrast - 1.0)))?;
    writeln!(out, "closed form (α/2π)[2 ln(2 sinθ/v²) + 4 − 3κ] = {}", sig(reference))?;
    if branch == Branch::Numeric {
        writeln!(out, "quadrature error budget = {}", sig(r.error_estimate))?;
        writeln!(out, "assembled − closed = {} (small-v and finite-length corrections)", sig(r.w_total - reference))?;
    }
    let warnings = merged(r.warnings, check_regime(&Geometry::Intersecting(geom), &wp, beam.as_ref()));
    ctx.warn_all(&warnings)
}

fn validity(ctx: &mut Ctx, a: &ValidityArgs) -> Result<(), CliError> {
    let inp = ValidityInput::new(a.energy_ev, a.dx0, ctx.cli.unit)?;
    let b = max_flight_distance(&inp);
    let u = ctx.unit();
    writeln!(ctx.stdout, "E = {} eV, dx0 = {} {u}", sig(a.energy_ev), sig(a.dx0))?;
    writeln!(ctx.stdout, "max flight distance 2 sqrt(2mE) dx0^2 / hbar = {} m ({})", sig(b.meters), approx(b.meters))?;
    writeln!(ctx.stdout, "scaling 1 m (E/10 keV)^1/2 (dx0/1 um)^2 = {} m", sig(b.scaling_estimate_m))?;
    ctx.warn_all(&b.warnings)
}

/// One significant digit, for the headline figure.
pub fn approx(meters: f64) -> String {
    let mut e = meters.log10().floor() as i32;
    let mut m = (meters / 10f64.powi(e)).round();
    if m >= 10.0 {
        m = 1.0;
        e += 1;
    }
    if e == 0 {
        format!("≈ {m} m")
    } else {
        format!("≈ {m}e{e} m")
    }
}

pub struct Check {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub deviation: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, reference: f64, deviation: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, reference, deviation, tolerance }
    }

    fn absolute(name: impl Into<String>, value: f64, reference: f64, tolerance: f64) -> Self {
        Self::new(name, value, reference, (value - reference).abs(), tolerance)
    }

    fn relative(name: impl Into<String>, value: f64, reference: f64, tolerance: f64) -> Self {
        Self::new(name, value, reference, ((value - reference) / reference).abs(), tolerance)
    }

    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

pub fn kernel_checks(cfg: &QuadratureConfig) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    for ratio in [1.5, 2.0, 5.0, 10.0, 100.0] {
        let closed = kernel_k_closed(ratio, 1.0)?;
        let pv = kernel_k_numeric(ratio, 1.0, cfg)?;
        checks.push(Check::relative(format!("K closed vs PV, T/rho = {ratio}"), closed, pv.value, 1e-8));
    }
    let near = kernel_k_closed(1.0 + 1e-12, 1.0)?;
    checks.push(Check::absolute("K at T = rho", near, kernel_k_coincident_limit(), 1e-10));
    let k100 = kernel_k_closed(100.0, 1.0)?;
    checks.push(Check::relative("K asymptote, T/rho = 100", kernel_k_asymptotic(100.0, 1.0)?, k100, 0.01));

    for (l1, l2, v, theta) in [(100.0, 1e4, 0.01, 0.3), (7.0, 50.0, 0.3, 1.2)] {
        let inp = SegmentPairInput::new(l1, l2, 1.0, v, theta)?;
        let num = segment_j_ab_numeric(&inp, cfg)?;
        checks.push(Check::absolute(
            format!("J_ab exact vs double integral, L1 = {l1}"),
            segment_j_ab_closed(&inp, JabForm::Exact),
            num.value,
            1e-8,
        ));
    }

    let inp = SegmentPairInput::new(1e3, 1e5, 1.0, 0.01, FRAC_PI_6)?;
    let num = segment_i_aa(&inp, Branch::Numeric, cfg)?;
    let closed = segment_i_aa(&inp, Branch::Closed, cfg)?;
    checks.push(Check::relative("I_aa closed vs PV, v = 0.01", closed.value, num.value, 0.02));

    let inp = SegmentPairInput::new(1.0, 100.0, 0.01, 0.01, FRAC_PI_4)?;
    let num = segment_i_ab(&inp, Branch::Numeric, cfg)?;
    let closed = segment_i_ab(&inp, Branch::Closed, cfg)?;
    checks.push(Check::relative("I_ab closed vs PV, v = 0.01", closed.value, num.value, 0.02));

    let inp = SegmentPairInput::new(1.0, 100.0, 0.01, 0.01, FRAC_PI_4)?;
    let kernel = segment_i_bb_kernel(&inp, cfg)?;
    let exact = kernel_k_closed(inp.t2(), 2.0 * inp.l1 * inp.theta.sin())?;
    checks.push(Check::relative("I_bb kernel PV vs closed K", kernel.value, exact, 1e-8));
    checks.push(Check::relative("I_bb asymptote vs kernel", segment_i_bb(&inp), kernel.value, 0.01));
    Ok(checks)
}

pub fn kappa_checks(cfg: &QuadratureConfig, samples: u64, seed: u64) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let sphere = Wavepacket::sphere(1.0)?;
    let num = kappa_numeric(&sphere, cfg)?;
    checks.push(Check::absolute("sphere kappa, quadrature", num.kappa, SPHERE_KAPPA, 1e-6));
    let mc = kappa_bruteforce_oracle(&sphere, samples, seed)?;
    checks.push(Check::absolute("sphere kappa, sampling (4 sigma)", mc.kappa, SPHERE_KAPPA, 4.0 * mc.error_estimate));

    let betas = [0.25, 1.0, 2.0, 4.0, 8.0];
    let pairs: Vec<_> = betas
        .par_iter()
        .enumerate()
        .map(|(i, &beta)| -> Result<(KappaResult, KappaResult), CliError> {
            let wp = Wavepacket::cylinder(1.0, beta)?;
            Ok((kappa(&wp, cfg)?, kappa_bruteforce_oracle(&wp, samples, seed.wrapping_add(1 + i as u64))?))
        })
        .collect();
    for (beta, pair) in betas.iter().zip(pairs) {
        let (quad, mc) = pair?;
        let sigma = (mc.error_estimate.powi(2) + quad.error_estimate.powi(2)).sqrt();
        checks.push(Check::absolute(
            format!("cylinder kappa beta = {beta}, quadrature vs sampling (4 sigma)"),
            quad.kappa,
            mc.kappa,
            4.0 * sigma,
        ));
    }
    Ok(checks)
}

fn verify(ctx: &mut Ctx, a: &VerifyArgs) -> Result<(), CliError> {
    let mut checks = Vec::new();
    if matches!(a.suite, Suite::Kernels | Suite::All) {
        checks.extend(kernel_checks(&ctx.cfg)?);
    }
    if matches!(a.suite, Suite::Kappa | Suite::All) {
        checks.extend(kappa_checks(&ctx.cfg, a.samples, ctx.cli.seed)?);
    }
    let width = checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
    let out = &mut *ctx.stdout;
    writeln!(
        out,
        "{:<width$}  {:>20}  {:>20}  {:>10}  {:>10}  result",
        "check", "value", "reference", "deviation", "tolerance"
    )?;
    for c in &checks {
        writeln!(
            out,
            "{:<width$}  {:>20}  {:>20}  {:>10.3e}  {:>10.3e}  {}",
            c.name,
            sig(c.value),
            sig(c.reference),
            c.deviation,
            c.tolerance,
            if c.passed() { "PASS" } else { "FAIL" }
        )?;
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    writeln!(out, "{} of {} checks passed", checks.len() - failed, checks.len())?;
    if failed > 0 {
        return Err(CliError::VerificationFailed(failed));
    }
    Ok(())
}

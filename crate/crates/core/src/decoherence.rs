//! Decoherence exponents for the parallel-path and intersecting-path
//! geometries, the contrast factor they imply, and the validity checks that
//! go with them.
//!
//! Lengths and times share one unit (c = 1). `W = W_V + W_γ` multiplies the
//! interference term by `e^W`.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use crate::error::{require_positive, Error, Result};
use crate::kernels::{
    kernel_k_asymptotic, kernel_k_closed, segment_i_aa, segment_i_ab, segment_i_bb, segment_i_bb_kernel,
    segment_j_ab_closed, segment_j_straight, Branch, JabForm, SegmentPairInput,
};
use crate::quadrature::QuadratureConfig;
use crate::wavepacket::{kappa, KappaResult, Wavepacket};

/// ħc in eV·m.
pub const HBAR_C_EV_M: f64 = 197.326_980_4e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub alpha_fs: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { alpha_fs: 7.297_352_569_3e-3 }
    }
}

impl PhysicalConstants {
    pub fn new(alpha_fs: f64) -> Result<Self> {
        if alpha_fs > 0.0 && alpha_fs < 1.0 {
            Ok(Self { alpha_fs })
        } else {
            Err(Error::InvalidInput(format!("alpha_fs must lie in (0, 1) (got {alpha_fs})")))
        }
    }
}

/// A violated (or informational) modelling assumption. Never fatal.
#[derive(Debug, Clone, PartialEq)]
pub enum RegimeWarning {
    /// A `≪` assumption holds by less than a factor of 10.
    ScaleSeparation { assumption: &'static str, ratio: f64 },
    /// Speed too high for the nonrelativistic reductions.
    Relativistic { v: f64 },
    /// Transverse speed too high for the small-`v sinθ` expansion.
    SmallVExpansion { v_sin_theta: f64 },
    /// Kinetic energy is not small against the rest energy.
    RelativisticEnergy { energy_ev: f64, mass_ev: f64 },
    /// Path length comparable with the wavepacket-spreading bound.
    Spreading { path_m: f64, bound_m: f64 },
    /// `W > 0`: contrast enhanced rather than reduced. Returned unclamped.
    PositiveExponent { w: f64 },
}

impl fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ScaleSeparation { assumption, ratio } => {
                write!(f, "{assumption} violated (ratio {ratio:.3}, want ≥ 10)")
            }
            Self::Relativistic { v } => write!(f, "nonrelativistic assumption violated: v = {v} > 0.2"),
            Self::SmallVExpansion { v_sin_theta } => {
                write!(f, "small-v expansion questionable: v sinθ = {v_sin_theta:.4} > 0.2")
            }
            Self::RelativisticEnergy { energy_ev, mass_ev } => {
                write!(f, "nonrelativistic assumption violated: E = {energy_ev} eV exceeds 5% of m = {mass_ev} eV")
            }
            Self::Spreading { path_m, bound_m } => {
                write!(f, "path length {path_m:.4e} m is not small against the spreading bound {bound_m:.4e} m")
            }
            Self::PositiveExponent { w } => write!(f, "note: W = {w:.6e} > 0, contrast enhanced"),
        }
    }
}

fn check_speed(v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("v must lie in (0, 1) (got {v})")))
    }
}

/// Two parallel straight paths a distance `r0` apart, flown for proper time
/// `t` at speed `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParallelGeometry {
    pub r0: f64,
    pub t: f64,
    pub v: f64,
}

impl ParallelGeometry {
    pub fn new(r0: f64, t: f64, v: f64) -> Result<Self> {
        require_positive("r0", r0)?;
        require_positive("T", t)?;
        check_speed(v)?;
        Ok(Self { r0, t, v })
    }

    /// Distance flown, `vT`.
    pub fn path_length(&self) -> f64 {
        self.v * self.t
    }
}

/// Two paths leaving a common point at half-angle `theta` for a length `l1`,
/// then running parallel for `l2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntersectingGeometry {
    pub l1: f64,
    pub l2: f64,
    pub theta: f64,
    pub v: f64,
}

impl IntersectingGeometry {
    pub fn new(l1: f64, l2: f64, theta: f64, v: f64) -> Result<Self> {
        require_positive("L1", l1)?;
        require_positive("L2", l2)?;
        if l2 <= l1 {
            return Err(Error::InvalidInput(format!("L2 must exceed L1 (got L1 = {l1}, L2 = {l2})")));
        }
        if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidInput(format!("theta must lie in (0, pi/2] (got {theta})")));
        }
        check_speed(v)?;
        Ok(Self { l1, l2, theta, v })
    }

    pub fn segment_input(&self, ell: f64) -> Result<SegmentPairInput> {
        SegmentPairInput::new(self.l1, self.l2, ell, self.v, self.theta)
    }

    pub fn path_length(&self) -> f64 {
        self.l1 + self.l2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceResult {
    pub w_vacuum: f64,
    pub w_photon: f64,
    pub w_total: f64,
    /// `e^{w_total}`
    pub contrast: f64,
    /// Quadrature error carried into `w_total`; zero for closed forms.
    pub error_estimate: f64,
    /// Labelled intermediate quantities, in assembly order.
    pub breakdown: Vec<(&'static str, f64)>,
    pub warnings: Vec<RegimeWarning>,
}

impl DecoherenceResult {
    fn assemble(
        w_vacuum: f64,
        w_photon: f64,
        error_estimate: f64,
        breakdown: Vec<(&'static str, f64)>,
        mut warnings: Vec<RegimeWarning>,
    ) -> Self {
        let w_total = w_vacuum + w_photon;
        if w_total > 0.0 {
            warnings.push(RegimeWarning::PositiveExponent { w: w_total });
        }
        Self { w_vacuum, w_photon, w_total, contrast: w_total.exp(), error_estimate, breakdown, warnings }
    }

    /// Relative reduction of the fringe amplitude, `1 − e^W`.
    pub fn contrast_change(&self) -> f64 {
        -self.w_total.exp_m1()
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.breakdown.iter().find(|(l, _)| *l == label).map(|&(_, v)| v)
    }
}

/// `W_V = (α/π)[2 − κ + 2 ln(T/ℓ)]` for a straight path of proper duration T.
pub fn w_vacuum_parallel(geom: &ParallelGeometry, kap: &KappaResult, consts: &PhysicalConstants) -> f64 {
    consts.alpha_fs / PI * (2.0 - kap.kappa + 2.0 * (geom.t / kap.ell).ln())
}

/// Which kernel to use for the cross-path term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhotonMode {
    /// `(α/π) K(T, r₀)` with the closed-form kernel.
    ExactKernel,
    /// `−2(α/π)[1 + ln(T/r₀)]`
    Asymptotic,
}

pub fn w_photon_parallel(geom: &ParallelGeometry, mode: PhotonMode, consts: &PhysicalConstants) -> Result<f64> {
    let k = match mode {
        PhotonMode::ExactKernel => kernel_k_closed(geom.t, geom.r0)?,
        PhotonMode::Asymptotic => kernel_k_asymptotic(geom.t, geom.r0)?,
    };
    Ok(consts.alpha_fs / PI * k)
}

/// `W_V + W_γ` for the parallel geometry with the exact kernel. For
/// `T ≫ r₀` this approaches the T-independent `(α/π)[2 ln(r₀/ℓ) − κ]`.
pub fn w_total_parallel(
    geom: &ParallelGeometry,
    wp: &Wavepacket,
    cfg: &QuadratureConfig,
    consts: &PhysicalConstants,
) -> Result<DecoherenceResult> {
    let kap = kappa(wp, cfg)?;
    w_total_parallel_with_kappa(geom, &kap, consts)
}

pub fn w_total_parallel_with_kappa(
    geom: &ParallelGeometry,
    kap: &KappaResult,
    consts: &PhysicalConstants,
) -> Result<DecoherenceResult> {
    let w_vacuum = w_vacuum_parallel(geom, kap, consts);
    let k = kernel_k_closed(geom.t, geom.r0)?;
    let w_photon = consts.alpha_fs / PI * k;
    let error = consts.alpha_fs / PI * kap.error_estimate;
    let breakdown = vec![("kappa", kap.kappa), ("K", k)];
    Ok(DecoherenceResult::assemble(w_vacuum, w_photon, error, breakdown, parallel_warnings(geom, kap.ell)))
}

/// T-independent plateau `(α/π)[2 ln(r₀/ℓ) − κ]`.
pub fn w_parallel_plateau(r0: f64, kap: &KappaResult, consts: &PhysicalConstants) -> f64 {
    consts.alpha_fs / PI * (2.0 * (r0 / kap.ell).ln() - kap.kappa)
}

fn intersecting_input(geom: &IntersectingGeometry, kap: &KappaResult) -> Result<SegmentPairInput> {
    geom.segment_input(kap.ell)
}

struct VacuumParts {
    j_aa: f64,
    j_bb: f64,
    j_ab: f64,
}

fn vacuum_parts(geom: &IntersectingGeometry, kap: &KappaResult, branch: Branch) -> Result<VacuumParts> {
    let inp = intersecting_input(geom, kap)?;
    let form = match branch {
        Branch::Closed => JabForm::Asymptotic,
        Branch::Numeric => JabForm::Exact,
    };
    Ok(VacuumParts {
        j_aa: segment_j_straight(geom.l1, kap.ell, geom.v, kap.kappa)?,
        j_bb: segment_j_straight(geom.l2, kap.ell, geom.v, kap.kappa)?,
        j_ab: segment_j_ab_closed(&inp, form),
    })
}

/// `W_V = −(α/2π)(2J_aa + J_bb + 4J_ab)`. The closed branch takes the
/// asymptotic J_ab and reproduces `(α/2π)[3(2 − κ) + 2 ln(L₂/(ℓv³))]`
/// exactly; the numeric branch keeps the finite-cutoff J_ab.
pub fn w_vacuum_intersecting(
    geom: &IntersectingGeometry,
    kap: &KappaResult,
    branch: Branch,
    consts: &PhysicalConstants,
) -> Result<f64> {
    let p = vacuum_parts(geom, kap, branch)?;
    Ok(-consts.alpha_fs / (2.0 * PI) * (2.0 * p.j_aa + p.j_bb + 4.0 * p.j_ab))
}

/// Reference value `(α/2π)[3(2 − κ) + 2 ln(L₂/(ℓv³))]`.
pub fn w_vacuum_intersecting_reference(
    geom: &IntersectingGeometry,
    kap: &KappaResult,
    consts: &PhysicalConstants,
) -> f64 {
    consts.alpha_fs / (2.0 * PI) * (3.0 * (2.0 - kap.kappa) + 2.0 * (geom.l2 / (kap.ell * geom.v.powi(3))).ln())
}

struct PhotonParts {
    i_aa: f64,
    i_bb: f64,
    i_ab: f64,
    error: f64,
}

fn photon_parts(
    geom: &IntersectingGeometry,
    kap: &KappaResult,
    branch: Branch,
    cfg: &QuadratureConfig,
) -> Result<PhotonParts> {
    let inp = intersecting_input(geom, kap)?;
    let aa = segment_i_aa(&inp, branch, cfg)?;
    let ab = segment_i_ab(&inp, branch, cfg)?;
    let bb = match branch {
        Branch::Closed => crate::quadrature::IntegrationResult::exact(segment_i_bb(&inp)),
        Branch::Numeric => segment_i_bb_kernel(&inp, cfg)?,
    };
    Ok(PhotonParts {
        i_aa: aa.value,
        i_bb: bb.value,
        i_ab: ab.value,
        error: 2.0 * aa.error_estimate + bb.error_estimate + 4.0 * ab.error_estimate,
    })
}

/// `W_γ = (α/2π)(2I_aa + I_bb + 4I_ab)`.
pub fn w_photon_intersecting(
    geom: &IntersectingGeometry,
    kap: &KappaResult,
    branch: Branch,
    cfg: &QuadratureConfig,
    consts: &PhysicalConstants,
) -> Result<f64> {
    let p = photon_parts(geom, kap, branch, cfg)?;
    Ok(consts.alpha_fs / (2.0 * PI) * (2.0 * p.i_aa + p.i_bb + 4.0 * p.i_ab))
}

/// Reference value `−(α/π)[1 − ln 2 + ln(L₂/(ℓ v sinθ))]`.
pub fn w_photon_intersecting_reference(geom: &IntersectingGeometry, ell: f64, consts: &PhysicalConstants) -> f64 {
    -consts.alpha_fs / PI * (1.0 - LN_2 + (geom.l2 / (ell * geom.v * geom.theta.sin())).ln())
}

/// Reference value `(α/2π)[2 ln(2 sinθ/v²) + 4 − 3κ]`; independent of both
/// ℓ and L₂.
pub fn w_total_intersecting_reference(
    geom: &IntersectingGeometry,
    kap: &KappaResult,
    consts: &PhysicalConstants,
) -> f64 {
    consts.alpha_fs / (2.0 * PI) * (2.0 * (2.0 * geom.theta.sin() / (geom.v * geom.v)).ln() + 4.0 - 3.0 * kap.kappa)
}

pub fn w_total_intersecting(
    geom: &IntersectingGeometry,
    wp: &Wavepacket,
    branch: Branch,
    cfg: &QuadratureConfig,
    consts: &PhysicalConstants,
) -> Result<DecoherenceResult> {
    let kap = kappa(wp, cfg)?;
    w_total_intersecting_with_kappa(geom, &kap, branch, cfg, consts)
}

pub fn w_total_intersecting_with_kappa(
    geom: &IntersectingGeometry,
    kap: &KappaResult,
    branch: Branch,
    cfg: &QuadratureConfig,
    consts: &PhysicalConstants,
) -> Result<DecoherenceResult> {
    let vac = vacuum_parts(geom, kap, branch)?;
    let ph = photon_parts(geom, kap, branch, cfg)?;
    let a = consts.alpha_fs / (2.0 * PI);
    let w_vacuum = -a * (2.0 * vac.j_aa + vac.j_bb + 4.0 * vac.j_ab);
    let w_photon = a * (2.0 * ph.i_aa + ph.i_bb + 4.0 * ph.i_ab);
    // κ enters J_aa twice and J_bb once
    let error = a * (ph.error + 3.0 * kap.error_estimate);
    let breakdown = vec![
        ("kappa", kap.kappa),
        ("J_aa", vac.j_aa),
        ("J_bb", vac.j_bb),
        ("J_ab", vac.j_ab),
        ("I_aa", ph.i_aa),
        ("I_bb", ph.i_bb),
        ("I_ab", ph.i_ab),
    ];
    let warnings = intersecting_input(geom, kap)?.regime_warnings();
    Ok(DecoherenceResult::assemble(w_vacuum, w_photon, error, breakdown, warnings))
}

/// `n = |ψ₁|² + |ψ₂|² + 2e^W |ψ₁ψ₂| cos φ`.
pub fn interference_pattern(psi1_sq: f64, psi2_sq: f64, phase: f64, result: &DecoherenceResult) -> Result<f64> {
    if !(psi1_sq >= 0.0 && psi2_sq >= 0.0) {
        return Err(Error::InvalidInput(format!("intensities must be nonnegative (got {psi1_sq}, {psi2_sq})")));
    }
    Ok(psi1_sq + psi2_sq + 2.0 * result.contrast * (psi1_sq * psi2_sq).sqrt() * phase.cos())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LengthUnit {
    Meter,
    Millimeter,
    #[default]
    Micrometer,
    Nanometer,
}

impl LengthUnit {
    pub fn meters(self) -> f64 {
        match self {
            Self::Meter => 1.0,
            Self::Millimeter => 1e-3,
            Self::Micrometer => 1e-6,
            Self::Nanometer => 1e-9,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Self::Meter => "m",
            Self::Millimeter => "mm",
            Self::Micrometer => "um",
            Self::Nanometer => "nm",
        }
    }
}

impl std::str::FromStr for LengthUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m" => Ok(Self::Meter),
            "mm" => Ok(Self::Millimeter),
            "um" | "µm" | "μm" => Ok(Self::Micrometer),
            "nm" => Ok(Self::Nanometer),
            other => Err(Error::InvalidInput(format!("unknown length unit '{other}' (use m, mm, um, nm)"))),
        }
    }
}

/// Electron beam parameters for the spreading bound. `dx0` is in `unit`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityInput {
    pub energy_ev: f64,
    pub dx0: f64,
    pub unit: LengthUnit,
    pub electron_mass_ev: f64,
}

impl ValidityInput {
    pub const ELECTRON_MASS_EV: f64 = 510_998.95;

    pub fn new(energy_ev: f64, dx0: f64, unit: LengthUnit) -> Result<Self> {
        require_positive("energy", energy_ev)?;
        require_positive("dx0", dx0)?;
        Ok(Self { energy_ev, dx0, unit, electron_mass_ev: Self::ELECTRON_MASS_EV })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlightBound {
    pub meters: f64,
    /// `1 m · (E/10 keV)^{1/2} (Δx₀/1 μm)²`
    pub scaling_estimate_m: f64,
    pub warnings: Vec<RegimeWarning>,
}

/// Distance over which a minimum-uncertainty packet of size `Δx₀` stays
/// rigid: `L ≪ 2√(2mE)(Δx₀)²/ħ`.
pub fn max_flight_distance(inp: &ValidityInput) -> FlightBound {
    let dx0_m = inp.dx0 * inp.unit.meters();
    let meters = 2.0 * (2.0 * inp.electron_mass_ev * inp.energy_ev).sqrt() * dx0_m * dx0_m / HBAR_C_EV_M;
    let scaling_estimate_m = (inp.energy_ev / 1e4).sqrt() * (dx0_m / 1e-6).powi(2);
    let mut warnings = Vec::new();
    if inp.energy_ev > 0.05 * inp.electron_mass_ev {
        warnings.push(RegimeWarning::RelativisticEnergy { energy_ev: inp.energy_ev, mass_ev: inp.electron_mass_ev });
    }
    FlightBound { meters, scaling_estimate_m, warnings }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    Parallel(ParallelGeometry),
    Intersecting(IntersectingGeometry),
}

fn parallel_warnings(geom: &ParallelGeometry, ell: f64) -> Vec<RegimeWarning> {
    let mut w = Vec::new();
    for (assumption, ratio) in [("ℓ ≪ T", geom.t / ell), ("r₀ ≪ T", geom.t / geom.r0), ("ℓ ≪ r₀", geom.r0 / ell)]
    {
        if ratio < 10.0 {
            w.push(RegimeWarning::ScaleSeparation { assumption, ratio });
        }
    }
    if geom.v > 0.2 {
        w.push(RegimeWarning::Relativistic { v: geom.v });
    }
    w
}

/// All soft assumptions the chosen geometry and packet violate. With
/// `beam` supplied, geometry lengths are read in `beam.unit` and the path
/// is compared with the spreading bound.
pub fn check_regime(geom: &Geometry, wp: &Wavepacket, beam: Option<&ValidityInput>) -> Vec<RegimeWarning> {
    let ell = crate::wavepacket::characteristic_length(wp);
    let (mut w, path) = match geom {
        Geometry::Parallel(g) => (parallel_warnings(g, ell), g.path_length()),
        Geometry::Intersecting(g) => {
            let w = g.segment_input(ell).map(|inp| inp.regime_warnings()).unwrap_or_default();
            (w, g.path_length())
        }
    };
    if let Some(beam) = beam {
        let bound = max_flight_distance(beam);
        w.extend(bound.warnings);
        let path_m = path * beam.unit.meters();
        if path_m > 0.1 * bound.meters {
            w.push(RegimeWarning::Spreading { path_m, bound_m: bound.meters });
        }
    }
    w
}

//! Worldline kernels: the straight-segment kernel `K(T, ρ)` and the
//! segment-pair integrals of the intersecting-path geometry.
//!
//! Every closed form here has a numeric counterpart evaluated with the
//! principal-value engine. Which one is used is always the caller's choice.

use std::f64::consts::{FRAC_PI_2, LN_2};

use crate::decoherence::RegimeWarning;
use crate::error::{require_positive, Error, Result};
use crate::quadrature::{
    integrate_1d_with_breaks, integrate_nd, pv_integrate_1d, Axis, InnerErrors, IntegrationResult, QuadratureConfig,
};

/// Evaluation branch for quantities with both a closed form and a
/// quadrature route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// The small-v / long-path closed form.
    Closed,
    /// Principal-value quadrature of the underlying double integral.
    Numeric,
}

/// `K(T, ρ) → −2 ln 2` as `ρ → T`.
pub fn kernel_k_coincident_limit() -> f64 {
    -2.0 * LN_2
}

fn check_kernel_args(t: f64, rho: f64) -> Result<()> {
    require_positive("flight time T", t)?;
    require_positive("separation rho", rho)
}

fn is_coincident(t: f64, rho: f64) -> bool {
    (t - rho).abs() <= 4.0 * f64::EPSILON * t.max(rho)
}

/// `K(T, ρ) = 2 ∫₀ᵀ dτ (T − τ)/(τ² − ρ²)` (principal value) in closed form:
///
/// `(T/ρ) ln|(T − ρ)/(T + ρ)| − ln(|T² − ρ²|/ρ²)`.
///
/// The logarithm's denominator is `T + ρ`; the `τ + ρ` that sometimes appears
/// in print is a misprint, as the `T ≫ ρ` and `T → ρ` limits and the
/// quadrature route all confirm. For `T < ρ` there is no pole and the same
/// expression holds with absolute values.
pub fn kernel_k_closed(t: f64, rho: f64) -> Result<f64> {
    check_kernel_args(t, rho)?;
    if is_coincident(t, rho) {
        return Err(Error::DegenerateInput(format!("K is singular in form at T = rho = {t}; use the limit -2 ln 2")));
    }
    let ratio = t / rho;
    let diff = (t - rho).abs();
    Ok(ratio * (diff / (t + rho)).ln() - (diff * (t + rho) / (rho * rho)).ln())
}

/// `T ≫ ρ` asymptote `−2 − ln(T²/ρ²)`.
pub fn kernel_k_asymptotic(t: f64, rho: f64) -> Result<f64> {
    check_kernel_args(t, rho)?;
    Ok(-2.0 - 2.0 * (t / rho).ln())
}

/// Principal-value quadrature of `2 ∫₀ᵀ dτ (T − τ)/(τ² − ρ²)`.
pub fn kernel_k_numeric(t: f64, rho: f64, cfg: &QuadratureConfig) -> Result<IntegrationResult> {
    check_kernel_args(t, rho)?;
    if is_coincident(t, rho) {
        return Err(Error::PoleOnBoundary { pole: rho });
    }
    pv_integrate_1d(|tau| 2.0 * (t - tau) / ((tau - rho) * (tau + rho)), 0.0, t, &[rho], cfg)
}

/// `J` contribution of a straight segment of length `L` traversed with the
/// segment's own path: `−2 + κ − 2 ln(L/(ℓv))`.
pub fn segment_j_straight(length: f64, ell: f64, v: f64, kappa: f64) -> Result<f64> {
    require_positive("segment length L", length)?;
    require_positive("ell", ell)?;
    check_speed(v)?;
    Ok(-2.0 + kappa - 2.0 * (length / (ell * v)).ln())
}

fn check_speed(v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("speed v must lie in (0, 1) (got {v})")))
    }
}

/// Parameters shared by the segment-pair integrals of the intersecting
/// geometry: inclined segments `a` of length `L₁`, parallel segments `b` of
/// length `L₂`, half-opening angle `θ`, speed `v` and wavepacket length `ℓ`.
/// Times follow as `T₁ = L₁/v`, `T₂ = L₂/v`, `τ = ℓ/v` (c = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentPairInput {
    pub l1: f64,
    pub l2: f64,
    pub ell: f64,
    pub v: f64,
    pub theta: f64,
    /// Multiplier on the near-apex cutoffs (`ℓ/v` for I_aa, `±τ/2` for
    /// J_ab). 1 reproduces the standard convention.
    pub cutoff_scale: f64,
}

impl SegmentPairInput {
    pub fn new(l1: f64, l2: f64, ell: f64, v: f64, theta: f64) -> Result<Self> {
        let inp = Self { l1, l2, ell, v, theta, cutoff_scale: 1.0 };
        inp.validate()?;
        Ok(inp)
    }

    pub fn with_cutoff_scale(mut self, scale: f64) -> Result<Self> {
        self.cutoff_scale = scale;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("L1", self.l1)?;
        require_positive("L2", self.l2)?;
        require_positive("ell", self.ell)?;
        require_positive("cutoff scale", self.cutoff_scale)?;
        check_speed(self.v)?;
        if !(self.theta > 0.0 && self.theta <= FRAC_PI_2) {
            return Err(Error::InvalidInput(format!("theta must lie in (0, pi/2] (got {})", self.theta)));
        }
        Ok(())
    }

    pub fn t1(&self) -> f64 {
        self.l1 / self.v
    }

    pub fn t2(&self) -> f64 {
        self.l2 / self.v
    }

    /// Cutoff time `τ = ℓ/v`, including the cutoff scale.
    pub fn tau(&self) -> f64 {
        self.cutoff_scale * self.ell / self.v
    }

    fn transverse_speed(&self) -> f64 {
        self.v * self.theta.sin()
    }

    /// Separation-of-scales assumptions behind the closed forms.
    pub fn regime_warnings(&self) -> Vec<RegimeWarning> {
        let mut w = Vec::new();
        if self.l1 / self.ell < 10.0 {
            w.push(RegimeWarning::ScaleSeparation { assumption: "ℓ ≪ L₁", ratio: self.l1 / self.ell });
        }
        if self.l2 / self.l1 < 10.0 {
            w.push(RegimeWarning::ScaleSeparation { assumption: "L₁ ≪ L₂", ratio: self.l2 / self.l1 });
        }
        if self.v > 0.2 {
            w.push(RegimeWarning::Relativistic { v: self.v });
        }
        if self.transverse_speed() > 0.2 {
            w.push(RegimeWarning::SmallVExpansion { v_sin_theta: self.transverse_speed() });
        }
        w
    }
}

/// Which form of J_ab to return from [`segment_j_ab_closed`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JabForm {
    /// `ln[(T₁ + τ/2)(T₂ + τ/2) / (τ(T₁ + T₂))]`
    Exact,
    /// `ln(L₁/ℓ)`
    Asymptotic,
}

/// J_ab for the segment pair, from the elementary double integral of
/// `(t − t')⁻²` over `0 ≤ t ≤ T₁ − τ/2`, `T₁ + τ/2 ≤ t' ≤ T₁ + T₂`.
pub fn segment_j_ab_closed(inp: &SegmentPairInput, form: JabForm) -> f64 {
    match form {
        JabForm::Exact => {
            let (t1, t2, tau) = (inp.t1(), inp.t2(), inp.tau());
            ((t1 + 0.5 * tau) * (t2 + 0.5 * tau) / (tau * (t1 + t2))).ln()
        }
        JabForm::Asymptotic => (inp.l1 / (inp.cutoff_scale * inp.ell)).ln(),
    }
}

/// Quadrature of the J_ab double integral (times in units of τ).
pub fn segment_j_ab_numeric(inp: &SegmentPairInput, cfg: &QuadratureConfig) -> Result<IntegrationResult> {
    inp.validate()?;
    let n1 = inp.t1() / inp.tau();
    let n2 = inp.t2() / inp.tau();
    if n1 <= 0.5 {
        return Err(Error::InvalidInput("cutoff τ/2 exceeds T₁".into()));
    }
    let axes = [Axis::new(0.0, n1 - 0.5), Axis::new(n1 + 0.5, n1 + n2)];
    integrate_nd(|p| (p[0] - p[1]).powi(-2), &axes, cfg)
}

/// I_aa: both points on the same inclined segment, cut off at `ℓ/v` from
/// the apex. Closed branch `ln(ℓv² sin²θ/L₁) + 2(ln 2 − 1)`; numeric branch
/// evaluates
///
/// `∫∫_{ℓ/v}^{T₁} dt dt' [(t − t')² − v² sin²θ (t + t')²]⁻¹`
///
/// as a nested principal value.
pub fn segment_i_aa(inp: &SegmentPairInput, branch: Branch, cfg: &QuadratureConfig) -> Result<IntegrationResult> {
    inp.validate()?;
    let s = inp.transverse_speed();
    match branch {
        Branch::Closed => {
            Ok(IntegrationResult::exact((inp.cutoff_scale * inp.ell * s * s / inp.l1).ln() + 2.0 * (LN_2 - 1.0)))
        }
        Branch::Numeric => i_aa_numeric(inp.t1() / inp.tau(), s, cfg),
    }
}

// Scale-free form: t = τx, x, y ∈ [1, n].
fn i_aa_numeric(n: f64, s: f64, cfg: &QuadratureConfig) -> Result<IntegrationResult> {
    if n <= 1.0 {
        return Err(Error::InvalidInput("cutoff ℓ/v exceeds T₁".into()));
    }
    let lo_ratio = (1.0 - s) / (1.0 + s);
    let hi_ratio = (1.0 + s) / (1.0 - s);
    let scale = 1.0 / ((1.0 - s) * (1.0 + s));

    let mut inner_cfg = cfg.tightened(0.1);
    inner_cfg.abs_tol = inner_cfg.abs_tol.max(0.1 * cfg.rel_tol / n);
    let inner_errors = InnerErrors::default();

    let outer_integrand = |x: f64| {
        // (x − y)² − s²(x + y)² = (1 − s²)(y − r₁)(y − r₂); factored around
        // the float poles so that y − r is exact near each of them
        let (r1, r2) = (x * lo_ratio, x * hi_ratio);
        let f = |y: f64| scale / ((y - r1) * (y - r2));
        let poles = [r1, r2];
        inner_errors.absorb(x, measure_zero_if_on_boundary(pv_integrate_1d(f, 1.0, n, &poles, &inner_cfg)))
    };

    let mut breaks = vec![1.0, n];
    for b in [hi_ratio, n * lo_ratio] {
        if b > 1.0 && b < n {
            breaks.push(b);
        }
    }
    breaks.sort_by(f64::total_cmp);
    let outer = integrate_1d_with_breaks(outer_integrand, &breaks, &cfg.outer_share());
    inner_errors.finish(outer, 1.0, n, cfg)
}

// The outer integrand is log-singular where an inner pole crosses a limit.
// An outer node within rounding of such a crossing has negligible weight.
fn measure_zero_if_on_boundary(r: Result<IntegrationResult>) -> Result<IntegrationResult> {
    match r {
        Err(Error::PoleOnBoundary { .. }) => Ok(IntegrationResult::exact(0.0)),
        other => other,
    }
}

/// I_ab: one point on an inclined segment, the other on the opposite path's
/// parallel segment. Closed branch `1 − ln(2v sinθ)`; numeric branch
///
/// `∫₀^{T₁}dt ∫_{T₁}^{T₁+T₂}dt' [(t − t')² − 4T₁²v² sin²θ]⁻¹`.
pub fn segment_i_ab(inp: &SegmentPairInput, branch: Branch, cfg: &QuadratureConfig) -> Result<IntegrationResult> {
    inp.validate()?;
    let s = inp.transverse_speed();
    match branch {
        Branch::Closed => Ok(IntegrationResult::exact(1.0 - (2.0 * s).ln())),
        Branch::Numeric => i_ab_numeric(inp.l2 / inp.l1, 2.0 * s, cfg),
    }
}

// Scale-free form: t = T₁x, x ∈ [0, 1], y ∈ [1, 1 + m], half-gap c = 2v sinθ.
fn i_ab_numeric(m: f64, c: f64, cfg: &QuadratureConfig) -> Result<IntegrationResult> {
    let mut inner_cfg = cfg.tightened(0.1);
    inner_cfg.abs_tol = inner_cfg.abs_tol.max(0.1 * cfg.rel_tol);
    let inner_errors = InnerErrors::default();

    let outer_integrand = |x: f64| {
        let (p_hi, p_lo) = (x + c, x - c);
        let f = |y: f64| 1.0 / ((y - p_hi) * (y - p_lo));
        let poles = [p_hi, p_lo];
        inner_errors.absorb(x, measure_zero_if_on_boundary(pv_integrate_1d(f, 1.0, 1.0 + m, &poles, &inner_cfg)))
    };

    let mut breaks = vec![0.0, 1.0];
    if c < 1.0 {
        breaks.insert(1, 1.0 - c);
    }
    let outer = integrate_1d_with_breaks(outer_integrand, &breaks, &cfg.outer_share());
    inner_errors.finish(outer, 0.0, 1.0, cfg)
}

/// I_bb closed form `−2[1 + ln(L₂/(2L₁ v sinθ))]`: the `T ≫ r₀` asymptote of
/// `K(L₂/v, 2L₁ sinθ)`.
pub fn segment_i_bb(inp: &SegmentPairInput) -> f64 {
    -2.0 * (1.0 + (inp.l2 / (2.0 * inp.l1 * inp.transverse_speed())).ln())
}

/// I_bb before the long-path asymptote: principal-value `K(T₂, r₀)` with the
/// separation of the parallel segments `r₀ = 2L₁ sinθ`.
pub fn segment_i_bb_kernel(inp: &SegmentPairInput, cfg: &QuadratureConfig) -> Result<IntegrationResult> {
    inp.validate()?;
    kernel_k_numeric(inp.t2(), 2.0 * inp.l1 * inp.theta.sin(), cfg)
}

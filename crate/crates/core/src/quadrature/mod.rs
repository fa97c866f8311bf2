//! Adaptive quadrature engine.
//!
//! Everything in the crate that is checked against a closed form goes
//! through this module: plain adaptive Gauss-Kronrod integration, Cauchy
//! principal values with symmetric pole excision, and iterated cubature in
//! two or three dimensions.

mod cubature;
mod extrapolate;
mod gauss_kronrod;
mod pv;

pub use cubature::{integrate_nd, Axis};
pub use extrapolate::extrapolate_to_zero;
pub use pv::pv_integrate_1d;

pub(crate) use cubature::InnerErrors;

use crate::error::{Error, Result};
use gauss_kronrod::{adaptive, Piece};

/// Tolerances and limits shared by every integrator in this module.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of subintervals held by one adaptive run.
    pub max_subdivisions: usize,
    /// Excision half-widths used for principal values, as fractions of each
    /// pole's window half-width. Strictly decreasing, all in (0, 1].
    pub excision_sequence: Vec<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 4096,
            excision_sequence: (1..=12).map(|k| 0.5f64.powi(k)).collect(),
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("rel_tol must be positive (got {})", self.rel_tol)));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("abs_tol must be positive (got {})", self.abs_tol)));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidConfig("max_subdivisions must be at least 1".into()));
        }
        let seq = &self.excision_sequence;
        if seq.len() < 2 {
            return Err(Error::InvalidConfig("excision_sequence needs at least two entries".into()));
        }
        if seq.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
            return Err(Error::InvalidConfig("excision_sequence entries must lie in (0, 1]".into()));
        }
        if seq.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidConfig("excision_sequence must be strictly decreasing".into()));
        }
        Ok(())
    }

    /// Tolerance target for a running estimate.
    pub fn target(&self, value: f64) -> f64 {
        (self.rel_tol * value.abs()).max(self.abs_tol)
    }

    /// Copy with both tolerances scaled by `factor`, used for inner levels of
    /// iterated integrals so their noise stays below the outer tolerance.
    /// Budget for the outer rule of an iterated integral; the remaining
    /// tenth is left for the propagated inner errors.
    pub(crate) fn outer_share(&self) -> Self {
        self.tightened(0.9)
    }

    pub(crate) fn tightened(&self, factor: f64) -> Self {
        Self {
            rel_tol: (self.rel_tol * factor).max(10.0 * f64::EPSILON),
            abs_tol: (self.abs_tol * factor).max(f64::MIN_POSITIVE),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl IntegrationResult {
    /// A value known exactly (closed forms routed through the same type).
    pub fn exact(value: f64) -> Self {
        Self { value, error_estimate: 0.0, evaluations: 0, converged: true }
    }

    pub(crate) fn into_checked(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergence(Box::new(self)))
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self { value: self.value * factor, error_estimate: self.error_estimate * factor.abs(), ..self }
    }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if a.is_finite() && b.is_finite() && a < b {
        Ok(())
    } else {
        Err(Error::InvalidInterval { a, b })
    }
}

/// Adaptive 21-point Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// Endpoints are never evaluated, so integrable endpoint singularities such
/// as `ln x` at 0 are handled by the bisection grading toward them.
pub fn integrate_1d<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<IntegrationResult>
where
    F: Fn(f64) -> f64,
{
    integrate_1d_with_breaks(f, &[a, b], cfg)
}

/// Like [`integrate_1d`] but seeded with the given breakpoints (sorted,
/// first and last are the limits). Use this to place known kinks or
/// integrable singularities at subinterval ends.
pub fn integrate_1d_with_breaks<F>(f: F, points: &[f64], cfg: &QuadratureConfig) -> Result<IntegrationResult>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    if points.len() < 2 {
        return Err(Error::InvalidInput("need at least two breakpoints".into()));
    }
    check_interval(points[0], points[points.len() - 1])?;
    if points.windows(2).any(|w| w[1] < w[0] || !w[1].is_finite()) {
        return Err(Error::InvalidInput("breakpoints must be finite and sorted".into()));
    }
    let pieces: Vec<Piece<'_>> =
        points.windows(2).filter(|w| w[1] > w[0]).map(|w| Piece { lo: w[0], hi: w[1], integrand: &f }).collect();
    adaptive(&pieces, cfg)?.result.into_checked()
}

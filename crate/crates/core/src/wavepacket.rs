//! Uniform wavepacket models and the shape constant κ.
//!
//! κ is the double average of `ln(ρ²/ℓ²)` over two independent points drawn
//! from the packet's probability density, `ρ` being their separation and
//! `ℓ` the packet's characteristic length. With this normalisation the
//! uniform sphere has κ = −3/2 exactly and the vacuum exponent for a
//! straight path reads `(α/π)[2 − κ + 2 ln(T/ℓ)]`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{require_positive, Error, Result};
use crate::quadrature::{integrate_1d, integrate_nd, Axis, InnerErrors, QuadratureConfig};

/// κ of the uniform sphere with ℓ = 2R.
pub const SPHERE_KAPPA: f64 = -1.5;

/// Smallest sample count accepted by the Monte-Carlo oracle.
pub const MIN_ORACLE_SAMPLES: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    UniformSphere { radius: f64 },
    UniformCylinder { radius: f64, length: f64 },
}

/// A rigid (non-spreading) wavepacket with uniform probability density.
/// All lengths share one user-chosen unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavepacket {
    shape: Shape,
}

impl Wavepacket {
    pub fn sphere(radius: f64) -> Result<Self> {
        require_positive("sphere radius R", radius)?;
        Ok(Self { shape: Shape::UniformSphere { radius } })
    }

    pub fn cylinder(radius: f64, length: f64) -> Result<Self> {
        require_positive("cylinder radius R", radius)?;
        require_positive("cylinder length L", length)?;
        Ok(Self { shape: Shape::UniformCylinder { radius, length } })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// The same shape with every length multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        match self.shape {
            Shape::UniformSphere { radius } => Self::sphere(radius * factor),
            Shape::UniformCylinder { radius, length } => Self::cylinder(radius * factor, length * factor),
        }
    }

    /// Aspect ratio L/R for cylinders.
    pub fn beta(&self) -> Option<f64> {
        match self.shape {
            Shape::UniformSphere { .. } => None,
            Shape::UniformCylinder { radius, length } => Some(length / radius),
        }
    }

    /// Value of the normalised density inside the support.
    pub fn density(&self) -> f64 {
        match self.shape {
            Shape::UniformSphere { radius } => 3.0 / (4.0 * PI * radius.powi(3)),
            Shape::UniformCylinder { radius, length } => 1.0 / (PI * radius * radius * length),
        }
    }

    pub fn contains(&self, p: [f64; 3]) -> bool {
        match self.shape {
            Shape::UniformSphere { radius } => p.iter().map(|c| c * c).sum::<f64>() <= radius * radius,
            Shape::UniformCylinder { radius, length } => {
                p[0] * p[0] + p[1] * p[1] <= radius * radius && (0.0..=length).contains(&p[2])
            }
        }
    }
}

/// The larger of the packet's length scales: the diameter of a sphere, and
/// `max(2R, L)` for a cylinder.
pub fn characteristic_length(wp: &Wavepacket) -> f64 {
    match wp.shape {
        Shape::UniformSphere { radius } => 2.0 * radius,
        Shape::UniformCylinder { radius, length } => (2.0 * radius).max(length),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaResult {
    pub kappa: f64,
    pub error_estimate: f64,
    /// The characteristic length the value refers to.
    pub ell: f64,
    /// L/R for cylinders.
    pub beta: Option<f64>,
}

impl KappaResult {
    /// A shape factor supplied directly rather than computed from a packet.
    pub fn from_parts(kappa: f64, ell: f64) -> Result<Self> {
        require_positive("characteristic length ell", ell)?;
        if !kappa.is_finite() {
            return Err(Error::InvalidInput(format!("kappa must be finite (got {kappa})")));
        }
        Ok(Self { kappa, error_estimate: 0.0, ell, beta: None })
    }
}

/// κ for the given packet. Spheres take the exact value; cylinders evaluate
/// the three-dimensional reduction
///
/// `κ = (4/π) ∫₀¹dρ ρ ∫₀¹dρ' ρ' ∫₀^{2π}dφ F(ρ, ρ', φ)`
///
/// in which the axial pair average has been done in closed form (see
/// [`cylinder_f`]).
pub fn kappa(wp: &Wavepacket, cfg: &QuadratureConfig) -> Result<KappaResult> {
    let ell = characteristic_length(wp);
    match wp.shape {
        Shape::UniformSphere { .. } => Ok(KappaResult { kappa: SPHERE_KAPPA, error_estimate: 0.0, ell, beta: None }),
        Shape::UniformCylinder { radius, length } => cylinder_kappa(radius, length, ell, cfg),
    }
}

/// Quadrature evaluation of κ for every shape, including the sphere (for
/// which [`kappa`] returns the exact value without integrating).
pub fn kappa_numeric(wp: &Wavepacket, cfg: &QuadratureConfig) -> Result<KappaResult> {
    let ell = characteristic_length(wp);
    match wp.shape {
        Shape::UniformSphere { radius } => {
            // rotational symmetry leaves (r₁, r₂, cos γ); pair density (9/2) r₁² r₂²
            let ell_sq = (ell / radius).powi(2);
            let f = |p: &[f64]| {
                let (r1, r2, c) = (p[0], p[1], p[2]);
                let d_sq = (r1 - r2) * (r1 - r2) + 2.0 * r1 * r2 * (1.0 - c);
                4.5 * r1 * r1 * r2 * r2 * (d_sq / ell_sq).ln()
            };
            let axes = [Axis::new(0.0, 1.0), Axis::new(0.0, 1.0), Axis::new(-1.0, 1.0)];
            let r = integrate_nd(f, &axes, cfg)?;
            Ok(KappaResult { kappa: r.value, error_estimate: r.error_estimate, ell, beta: None })
        }
        Shape::UniformCylinder { .. } => kappa(wp, cfg),
    }
}

/// Axial pair average of `ln(ρ/R)` for two points whose transverse
/// separation is `b·R`, with z, z' uniform on a segment of length `β·R`:
///
/// `β⁻²{ b² ln b + ½(β² − b²) ln(b² + β²) + 2βb·arctan(β/b) − 3β²/2 }`
///
/// written as `½ln(b² + β²) − ln(1 + t²)/(2t²) + (2/t)arctan t − 3/2` with
/// `t = β/b`, which has no cancellation as `b → 0` or `β → 0`.
fn axial_log_average(b: f64, beta: f64) -> f64 {
    if b == 0.0 {
        return beta.ln() - 1.5;
    }
    let t = beta / b;
    let t_sq = t * t;
    0.5 * (b * b + beta * beta).ln() - t_sq.ln_1p() / (2.0 * t_sq) + 2.0 * t.atan() / t - 1.5
}

/// Cylinder integrand
///
/// `F = ln(R/ℓ) + β⁻²{ b² ln b + ½(β² − b²) ln(b² + β²) + 2βb·arctan(β/b) − 3β²/2 }`
///
/// with `b² = ρ² − 2ρρ'cos φ + ρ'²`. At `b = 0` the finite limit
/// `ln(R/ℓ) + ln β − 3/2` is returned. For β → 0 this tends to
/// `ln(R/ℓ) + ln b`, for β → ∞ to `ln(L/ℓ) − 3/2`.
pub fn cylinder_f(rho: f64, rho_p: f64, phi: f64, beta: f64, r_over_ell: f64) -> Result<f64> {
    for (name, v) in [("rho", rho), ("rho_p", rho_p)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::DomainError(format!("{name} must lie in [0, 1] (got {v})")));
        }
    }
    if !phi.is_finite() {
        return Err(Error::DomainError(format!("phi must be finite (got {phi})")));
    }
    require_positive("beta", beta)?;
    require_positive("R/ell", r_over_ell)?;
    let raw = rho * rho - 2.0 * rho * rho_p * phi.cos() + rho_p * rho_p;
    if raw < -1e-12 {
        return Err(Error::DomainError(format!("b² = {raw} is negative")));
    }
    Ok(r_over_ell.ln() + axial_log_average(transverse_separation(rho, rho_p, phi), beta))
}

// (ρ − ρ')² + 4ρρ' sin²(φ/2): same as the law of cosines, without cancellation near φ = 0
fn transverse_separation(rho: f64, rho_p: f64, phi: f64) -> f64 {
    let s = (0.5 * phi).sin();
    ((rho - rho_p).powi(2) + 4.0 * rho * rho_p * s * s).sqrt()
}

fn cylinder_kappa(radius: f64, length: f64, ell: f64, cfg: &QuadratureConfig) -> Result<KappaResult> {
    let beta = length / radius;
    let prefactor = 16.0 / PI;
    // the ln(R/ℓ) term of F integrates to exactly 2 ln(R/ℓ)
    let offset = 2.0 * (radius / ell).ln();
    // tolerances refer to κ, which stays O(1) where the reduced integral
    // crosses zero; inner floors follow rel_tol for the same reason
    let outer_cfg =
        QuadratureConfig { abs_tol: cfg.abs_tol.max(cfg.rel_tol * offset.abs().max(1.0) / prefactor), ..cfg.clone() };
    let mut mid_cfg = cfg.tightened(0.1);
    mid_cfg.abs_tol = mid_cfg.abs_tol.max(0.005 * cfg.rel_tol);
    let mut inner_cfg = cfg.tightened(0.01);
    inner_cfg.abs_tol = inner_cfg.abs_tol.max(0.0005 * cfg.rel_tol);

    // ρ ↔ ρ' and φ ↔ 2π − φ symmetry: integrate ρ' < ρ, φ ∈ [0, π], times 4.
    let outer_errors = InnerErrors::default();
    let outer = integrate_1d(
        |rho| {
            let mid_errors = InnerErrors::default();
            let mid = integrate_1d(
                |rho_p| {
                    let inner = integrate_1d(
                        |phi| axial_log_average(transverse_separation(rho, rho_p, phi), beta),
                        0.0,
                        PI,
                        &inner_cfg,
                    );
                    rho_p * mid_errors.absorb(rho_p, inner)
                },
                0.0,
                rho.max(f64::MIN_POSITIVE),
                &mid_cfg.outer_share(),
            );
            rho * outer_errors.absorb(rho, mid_errors.finish(mid, 0.0, rho, &mid_cfg))
        },
        0.0,
        1.0,
        &outer_cfg.outer_share(),
    );
    let reduced = outer_errors.finish(outer, 0.0, 1.0, &outer_cfg)?;
    let kappa = offset + prefactor * reduced.value;
    Ok(KappaResult { kappa, error_estimate: prefactor * reduced.error_estimate, ell, beta: Some(beta) })
}

/// Plain Monte-Carlo estimate of κ straight from its six-dimensional
/// definition: draw independent point pairs uniformly from the support and
/// average `ln(ρ²/ℓ²)`. The error estimate is the standard error of the mean.
pub fn kappa_bruteforce_oracle(wp: &Wavepacket, samples: u64, seed: u64) -> Result<KappaResult> {
    if samples < MIN_ORACLE_SAMPLES {
        return Err(Error::InvalidInput(format!("oracle needs at least {MIN_ORACLE_SAMPLES} samples (got {samples})")));
    }
    let ell = characteristic_length(wp);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for n in 1..=samples {
        let a = sample_point(wp, &mut rng);
        let b = sample_point(wp, &mut rng);
        let d_sq: f64 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum();
        let x = (d_sq / (ell * ell)).ln();
        let delta = x - mean;
        mean += delta / n as f64;
        m2 += delta * (x - mean);
    }
    let variance = m2 / (samples - 1) as f64;
    Ok(KappaResult { kappa: mean, error_estimate: (variance / samples as f64).sqrt(), ell, beta: wp.beta() })
}

fn sample_point<R: Rng>(wp: &Wavepacket, rng: &mut R) -> [f64; 3] {
    match wp.shape {
        Shape::UniformSphere { radius } => loop {
            let p = [rng.gen_range(-radius..radius), rng.gen_range(-radius..radius), rng.gen_range(-radius..radius)];
            if p.iter().map(|c| c * c).sum::<f64>() <= radius * radius {
                return p;
            }
        },
        Shape::UniformCylinder { radius, length } => loop {
            let (x, y) = (rng.gen_range(-radius..radius), rng.gen_range(-radius..radius));
            if x * x + y * y <= radius * radius {
                return [x, y, rng.gen_range(0.0..length)];
            }
        },
    }
}

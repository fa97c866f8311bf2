//! Iterated (tensor-product) cubature for two and three dimensions.

use std::cell::{Cell, RefCell};

use super::{integrate_1d, IntegrationResult, QuadratureConfig};
use crate::error::{Error, Result};

/// One coordinate of an integration box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    /// The integrand is periodic in this coordinate with period `hi - lo`;
    /// integrate with the equal-weight (trapezoidal) periodic rule.
    pub periodic: bool,
}

impl Axis {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi, periodic: false }
    }

    pub fn periodic(lo: f64, hi: f64) -> Self {
        Self { lo, hi, periodic: true }
    }
}

/// Bookkeeping for iterated integrals: the inner error at every outer node,
/// the total evaluation count, and the first hard failure. An inner integral
/// that runs out of budget is not fatal; its error estimate is carried into
/// the outer one and the final tolerance check decides.
#[derive(Default)]
pub(crate) struct InnerErrors {
    profile: RefCell<Vec<(f64, f64)>>,
    evaluations: Cell<usize>,
    hard: RefCell<Option<Error>>,
}

impl InnerErrors {
    /// Record the inner result at outer node `x` and return the value to
    /// feed the outer rule.
    pub fn absorb(&self, x: f64, r: Result<IntegrationResult>) -> f64 {
        match r {
            Ok(r) => self.note(x, &r),
            Err(Error::NonConvergence(best)) => self.note(x, &best),
            Err(e) => {
                self.hard.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    }

    fn note(&self, x: f64, r: &IntegrationResult) -> f64 {
        self.profile.borrow_mut().push((x, r.error_estimate));
        self.evaluations.set(self.evaluations.get() + r.evaluations);
        r.value
    }

    /// Integrated inner error: trapezoid rule over the sorted outer nodes,
    /// extended flat to the range ends. Nodes crowding an integrable
    /// singularity, where inner integrals are ill-conditioned, get the small
    /// weight their spacing implies.
    fn integrated(&self, lo: f64, hi: f64) -> f64 {
        let mut p = self.profile.take();
        if p.is_empty() {
            return 0.0;
        }
        p.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut total = (p[0].0 - lo).abs() * p[0].1 + (hi - p[p.len() - 1].0).abs() * p[p.len() - 1].1;
        for w in p.windows(2) {
            total += 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1);
        }
        total
    }

    /// Combine an outer result (or failure) over `[lo, hi]` with the inner
    /// bookkeeping.
    pub fn finish(
        self,
        outer: Result<IntegrationResult>,
        lo: f64,
        hi: f64,
        cfg: &QuadratureConfig,
    ) -> Result<IntegrationResult> {
        if let Some(e) = self.hard.take() {
            return Err(e);
        }
        let (outer, outer_ok) = match outer {
            Ok(r) => (r, true),
            Err(Error::NonConvergence(best)) => (*best, false),
            Err(e) => return Err(e),
        };
        let error_estimate = outer.error_estimate + self.integrated(lo, hi);
        IntegrationResult {
            value: outer.value,
            error_estimate,
            evaluations: outer.evaluations + self.evaluations.get(),
            converged: outer_ok && error_estimate <= cfg.target(outer.value),
        }
        .into_checked()
    }
}

/// Integrate `f` over a 2- or 3-dimensional box by iterated adaptive
/// quadrature. The first axis is outermost.
///
/// A coarse pilot pass fixes the magnitude of the result; each inner level
/// then gets an absolute tolerance ten times tighter than its share of the
/// outer target, so inner integrals that happen to be near zero do not chase
/// the global `abs_tol`.
pub fn integrate_nd<F>(f: F, axes: &[Axis], cfg: &QuadratureConfig) -> Result<IntegrationResult>
where
    F: Fn(&[f64]) -> f64,
{
    cfg.validate()?;
    if !(2..=3).contains(&axes.len()) {
        return Err(Error::InvalidInput(format!("integrate_nd supports 2 or 3 dimensions, got {}", axes.len())));
    }
    for ax in axes {
        super::check_interval(ax.lo, ax.hi)?;
    }
    let point = RefCell::new(vec![0.0; axes.len()]);

    let pilot_cfg = QuadratureConfig { rel_tol: 1e-4, abs_tol: cfg.abs_tol.max(1e-10), ..cfg.clone() };
    let pilot = match level(&f, axes, 0, &point, &pilot_cfg, pilot_cfg.abs_tol) {
        Ok(r) => r.value,
        Err(Error::NonConvergence(best)) => best.value,
        Err(e) => return Err(e),
    };
    level(&f, axes, 0, &point, cfg, cfg.target(pilot))
}

fn level(
    f: &dyn Fn(&[f64]) -> f64,
    axes: &[Axis],
    depth: usize,
    point: &RefCell<Vec<f64>>,
    cfg: &QuadratureConfig,
    target: f64,
) -> Result<IntegrationResult> {
    let axis = axes[depth];
    let innermost = depth + 1 == axes.len();
    let width = axis.hi - axis.lo;
    let inner_target = 0.1 * target / width;
    let mut inner_cfg = cfg.tightened(0.1);
    inner_cfg.abs_tol = inner_cfg.abs_tol.max(inner_target);
    let inner = InnerErrors::default();

    let g = |x: f64| {
        point.borrow_mut()[depth] = x;
        if innermost {
            let p = point.borrow();
            let v = f(&p);
            // a node landing exactly on an integrable singularity carries no measure
            if v.is_infinite() {
                0.0
            } else {
                v
            }
        } else {
            inner.absorb(x, level(f, axes, depth + 1, point, &inner_cfg, inner_target))
        }
    };

    let outer = if axis.periodic {
        periodic_trapezoid(g, axis.lo, axis.hi, &cfg.outer_share())
    } else {
        integrate_1d(g, axis.lo, axis.hi, &cfg.outer_share())
    };
    inner.finish(outer, axis.lo, axis.hi, cfg)
}

/// Equal-weight rule for periodic integrands, doubling the node count until
/// two successive estimates agree.
fn periodic_trapezoid<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<IntegrationResult> {
    const MAX_NODES: usize = 1 << 20;
    let period = hi - lo;
    let mut n = 8usize;
    let mut sum: f64 = (0..n).map(|i| f(lo + period * i as f64 / n as f64)).sum();
    let mut evaluations = n;
    let mut estimate = sum * period / n as f64;
    loop {
        // add the midpoints of the current grid
        let added: f64 = (0..n).map(|i| f(lo + period * (i as f64 + 0.5) / n as f64)).sum();
        evaluations += n;
        sum += added;
        n *= 2;
        let refined = sum * period / n as f64;
        if !refined.is_finite() {
            return Err(Error::NonFiniteIntegrand { near: lo });
        }
        let error = (refined - estimate).abs();
        estimate = refined;
        let done = error <= cfg.target(refined);
        if done || n >= MAX_NODES {
            return IntegrationResult { value: refined, error_estimate: error, evaluations, converged: done }
                .into_checked();
        }
    }
}

//! Cauchy principal values by symmetric excision.
//!
//! Around each interior pole `p` a window `[p - d, p + d]` is carved out.
//! Inside the window the two flanking panels are summed pointwise,
//! `g(u) = f(p + u) + f(p - u)`, which cancels the `1/u` divergence before
//! anything is integrated. The window is cut into slices at the excision
//! half-widths `e_k d`; the partial sums `I(e_k)` are the excised integrals,
//! and their extrapolation to zero half-width is the principal value.

use super::extrapolate::extrapolate_to_zero;
use super::gauss_kronrod::{adaptive, Piece};
use super::{check_interval, IntegrationResult, QuadratureConfig};
use crate::error::{Error, Result};

struct Window {
    pole: f64,
    half_width: f64,
}

/// Principal value of `∫_a^b f` where `f` has at most simple poles at the
/// listed locations. Poles outside `[a, b]` are ignored; poles on an endpoint
/// are rejected.
pub fn pv_integrate_1d<F>(f: F, a: f64, b: f64, poles: &[f64], cfg: &QuadratureConfig) -> Result<IntegrationResult>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    check_interval(a, b)?;

    let scale = a.abs().max(b.abs()).max(b - a);
    let tiny = 8.0 * f64::EPSILON * scale;

    let mut interior = Vec::with_capacity(poles.len());
    for &p in poles {
        if !p.is_finite() {
            return Err(Error::InvalidInput(format!("pole location {p} is not finite")));
        }
        if (p - a).abs() <= tiny || (p - b).abs() <= tiny {
            return Err(Error::PoleOnBoundary { pole: p });
        }
        if p > a && p < b {
            interior.push(p);
        }
    }
    interior.sort_by(f64::total_cmp);
    for w in interior.windows(2) {
        if w[1] - w[0] <= tiny {
            return Err(Error::PolesTooClose { first: w[0], second: w[1] });
        }
    }

    let windows: Vec<Window> = interior
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let mut d = (p - a).min(b - p);
            if i > 0 {
                d = d.min(0.5 * (p - interior[i - 1]));
            }
            if i + 1 < interior.len() {
                d = d.min(0.5 * (interior[i + 1] - p));
            }
            Window { pole: p, half_width: d }
        })
        .collect();

    // Slices narrower than the spacing of floats near the pole cannot be
    // sampled; such a window (a pole within rounding of an endpoint or a
    // neighbour) is measure-small and gets a one-node estimate instead.
    let seq = &cfg.excision_sequence;
    let smallest = seq[seq.len() - 1];
    let (resolved, unresolved): (Vec<Window>, Vec<Window>) =
        windows.into_iter().partition(|w| smallest * w.half_width > 64.0 * f64::EPSILON * w.pole.abs());
    let mut unresolved_value = 0.0;
    let mut unresolved_error = 0.0;
    let mut unresolved_evals = 0;
    for w in &unresolved {
        if w.half_width <= 0.0 {
            continue;
        }
        // f = r/(x − p) + h: with exact float offsets u± the residue cancels
        // in f(x₊)u₊ + f(x₋)u₋ = (u₊ + u₋) h, the window's principal value.
        let window = |d: f64| {
            let (xp, xm) = (w.pole + d, w.pole - d);
            let (up, um) = (xp - w.pole, w.pole - xm);
            f(xp) * up + f(xm) * um
        };
        let full = window(w.half_width);
        let half = window(0.5 * w.half_width);
        if !(full.is_finite() && half.is_finite()) {
            return Err(Error::NonFiniteIntegrand { near: w.pole });
        }
        unresolved_value += full;
        unresolved_error += (full - 2.0 * half).abs();
        unresolved_evals += 4;
    }

    let folded: Vec<Box<dyn Fn(f64) -> f64 + '_>> = resolved
        .iter()
        .map(|w| {
            let p = w.pole;
            let f = &f;
            Box::new(move |u: f64| f(p + u) + f(p - u)) as Box<dyn Fn(f64) -> f64>
        })
        .collect();

    let mut pieces = Vec::new();
    let mut cursor = a;
    let mut all: Vec<&Window> = resolved.iter().chain(&unresolved).collect();
    all.sort_by(|x, y| x.pole.total_cmp(&y.pole));
    for w in all {
        let lo = w.pole - w.half_width;
        if lo > cursor {
            pieces.push(Piece { lo: cursor, hi: lo, integrand: &f });
        }
        cursor = w.pole + w.half_width;
    }
    if b > cursor {
        pieces.push(Piece { lo: cursor, hi: b, integrand: &f });
    }
    let plain_count = pieces.len();

    for (w, g) in resolved.iter().zip(&folded) {
        let mut outer = w.half_width;
        for &e in seq {
            let inner = e * w.half_width;
            pieces.push(Piece { lo: inner, hi: outer, integrand: g.as_ref() });
            outer = inner;
        }
    }

    let outcome = adaptive(&pieces, cfg)?;

    let mut value: f64 = outcome.per_piece[..plain_count].iter().sum::<f64>() + unresolved_value;
    let mut extrapolation_error = unresolved_error;
    for k in 0..resolved.len() {
        let start = plain_count + k * seq.len();
        let slices = &outcome.per_piece[start..start + seq.len()];
        let partial: Vec<f64> = slices
            .iter()
            .scan(0.0, |acc, s| {
                *acc += s;
                Some(*acc)
            })
            .collect();
        let (limit, err) = extrapolate_to_zero(seq, &partial);
        value += limit;
        extrapolation_error += err;
    }

    let error_estimate = outcome.result.error_estimate + extrapolation_error;
    IntegrationResult {
        value,
        error_estimate,
        evaluations: outcome.result.evaluations + unresolved_evals,
        converged: outcome.result.converged && error_estimate <= cfg.target(value),
    }
    .into_checked()
}

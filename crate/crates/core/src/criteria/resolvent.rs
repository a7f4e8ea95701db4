//! Resolvent forms of the Hilbert-space criteria: the zen resolvent test
//! (R1) and the fractional resolvent test on the real axis (R7).

use num_complex::Complex64;
use rayon::prelude::*;

use super::{evaluate_levels, CriterionId, CriterionOptions, CriterionReport, Evaluation, Real, ScaleGrid, ScaleValue, Witness};
use crate::error::{Error, Result};
use crate::parallel::{argmax, det_sum};
use crate::special::ln_gamma;
use crate::system::{spectral_measure, AtomicMeasure, DiagonalSystem};
use crate::zen::{weight, RadialMeasure, WeightTerm};

const R1_NAME: &str = "zen resolvent criterion (R1)";
const R7_NAME: &str = "fractional resolvent criterion (R7)";

fn require_hilbert(sys: &DiagonalSystem, criterion: &'static str) -> Result<()> {
    if sys.q() != 2.0 {
        return Err(Error::hypothesis(criterion, format!("stated for q = 2, got q = {}", sys.q())));
    }
    Ok(())
}

fn order_converges(terms: &[WeightTerm], n: u32) -> bool {
    terms.iter().all(|t| 2.0 * n as f64 - 2.0 + t.power > -1.0)
}

/// Smallest `N ≥ 2` for which `∫ t^{2N−2} e^{−2xt} w(t) dt` converges at 0.
pub fn r1_default_order(zen: &RadialMeasure) -> u32 {
    let terms = zen.weight_terms();
    (2..).find(|&n| order_converges(&terms, n)).unwrap_or(2)
}

/// `∫_0^∞ t^{2N−2} e^{−2xt} w(t) dt` term by term in closed form.
pub fn r1_denominator(terms: &[WeightTerm], n: u32, x: f64) -> f64 {
    terms
        .iter()
        .map(|t| {
            let s = 2.0 * n as f64 - 1.0 + t.power;
            let c = 2.0 * x + t.rate;
            t.coeff * (ln_gamma(s) - s * c.ln()).exp()
        })
        .sum()
}

fn r1_numerator(m: &AtomicMeasure, n: u32, lambda: Complex64) -> f64 {
    det_sum(m.atoms(), |a| {
        if a.mass == 0.0 {
            0.0
        } else {
            a.mass * (lambda + a.location).norm_sqr().powi(-(n as i32))
        }
    })
}

/// `Σ |b_k|² / |λ − λ_k|^{2N}` divided by the weighted Gamma integral; the
/// squared form of the tested ratio.
pub fn r1_ratio(m: &AtomicMeasure, zen: &RadialMeasure, n: u32, lambda: Complex64) -> Result<f64> {
    if !(lambda.re > 0.0) {
        return Err(Error::InvalidMeasure(format!("λ = {lambda} is not in the open right half-plane")));
    }
    let terms = weight(zen)?.terms().to_vec();
    check_order(&terms, n)?;
    Ok(r1_numerator(m, n, lambda) / r1_denominator(&terms, n, lambda.re))
}

fn check_order(terms: &[WeightTerm], n: u32) -> Result<()> {
    if n == 0 || !order_converges(terms, n) {
        return Err(Error::hypothesis(
            R1_NAME,
            format!("the weighted integral diverges at t = 0 for N = {n}; increase N"),
        ));
    }
    Ok(())
}

/// Test points `λ = 2^a + i·s·2^e`, with `a` log-spaced over the grid and the
/// imaginary offsets log-spaced over the range of `|Im z_k|`.
fn lambda_grid(m: &AtomicMeasure, grid: ScaleGrid, per_octave: u32) -> Vec<(Complex64, i32)> {
    let ppo = per_octave.max(1) as i32;
    let ys: Vec<f64> = m
        .atoms()
        .iter()
        .filter(|a| a.mass > 0.0 && a.location.im != 0.0)
        .map(|a| a.location.im.abs())
        .collect();
    let y_range = if ys.is_empty() {
        None
    } else {
        let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ys.iter().cloned().fold(0.0, f64::max);
        Some((lo.log2().floor() - 1.0, hi.log2().ceil() + 1.0))
    };
    let mut out = Vec::new();
    for n in grid.exponents() {
        let steps = if n == grid.n_max { 1 } else { ppo };
        for j in 0..steps {
            let a = n as f64 + j as f64 / ppo as f64;
            let re = a.exp2();
            out.push((Complex64::new(re, 0.0), n));
            if let Some((e_lo, e_hi)) = y_range {
                let start = e_lo.max(a - 6.0);
                let count = ((e_hi - start) * ppo as f64).floor() as i64;
                for i in 0..=count.max(-1) {
                    let im = (start + i as f64 / ppo as f64).exp2();
                    out.push((Complex64::new(re, im), n));
                    out.push((Complex64::new(re, -im), n));
                }
            }
        }
    }
    out
}

fn sup_over(points: &[(Complex64, i32)], grid: ScaleGrid, ratio: impl Fn(Complex64) -> f64 + Sync) -> Evaluation {
    let values: Vec<f64> = points.par_iter().map(|&(l, _)| ratio(l)).collect();
    let mut profile: Vec<ScaleValue> = Vec::new();
    for (&(l, _), &v) in points.iter().zip(&values) {
        let log2_scale = l.re.log2();
        match profile.last_mut() {
            Some(last) if last.log2_scale == log2_scale => last.value = last.value.max(v),
            _ => profile.push(ScaleValue { log2_scale, value: v }),
        }
    }
    match argmax(values.iter().copied()) {
        Some((i, v)) if v > 0.0 => Evaluation {
            constant: v,
            witness: Some(Witness::Lambda {
                re: points[i].0.re,
                im: points[i].0.im,
            }),
            profile,
            witness_at_edge: grid.is_edge(points[i].1),
            boundary_hits: 0,
        },
        _ => Evaluation {
            profile,
            ..Evaluation::default()
        },
    }
}

/// R1: `sup_λ (‖(λ−A)^{−N}B‖² / ∫ |t^{N−1}e^{−λt}|² w dt)^{1/2}`.
pub fn r1_resolvent(
    sys: &DiagonalSystem,
    zen: &RadialMeasure,
    n: Option<u32>,
    opts: CriterionOptions,
) -> Result<CriterionReport> {
    require_hilbert(sys, R1_NAME)?;
    let w = weight(zen).map_err(|e| Error::hypothesis(R1_NAME, e.to_string()))?;
    let terms = w.terms().to_vec();
    let order = n.unwrap_or_else(|| r1_default_order(zen));
    check_order(&terms, order)?;
    let m = spectral_measure(sys);
    let points = lambda_grid(&m, opts.grid, opts.per_octave);
    let mut report = evaluate_levels(CriterionId::R1, m.len(), 0.5, |k| {
        let mk = m.prefix(k);
        Ok(sup_over(&points, opts.grid, |l| {
            (r1_numerator(&mk, order, l) / r1_denominator(&terms, order, l.re)).sqrt()
        }))
    })?;
    report.diagnostics.secondary.insert("order_N".into(), Real(order as f64));
    Ok(report)
}

/// `(Σ |b_k|² |λ − λ_k|^{2α−2})^{1/2} / λ^{(α−1)/2}` at real `λ > 0`.
pub fn r7_ratio(m: &AtomicMeasure, alpha: f64, lambda: f64) -> f64 {
    let s = det_sum(m.atoms(), |a| {
        if a.mass == 0.0 {
            0.0
        } else {
            a.mass * (lambda + a.location).norm_sqr().powf(alpha - 1.0)
        }
    });
    s.sqrt() * lambda.powf(0.5 * (1.0 - alpha))
}

/// R7: `sup_{λ>0} ‖(λ−A)^{α−1}B‖ / λ^{(α−1)/2}` over a log-spaced real grid.
pub fn r7_fractional_resolvent(sys: &DiagonalSystem, alpha: f64, opts: CriterionOptions) -> Result<CriterionReport> {
    require_hilbert(sys, R7_NAME)?;
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::hypothesis(R7_NAME, format!("requires 0 ≤ α < 1, got α = {alpha}")));
    }
    let m = spectral_measure(sys);
    let ppo = opts.per_octave.max(1) as i32;
    let points: Vec<(Complex64, i32)> = opts
        .grid
        .exponents()
        .flat_map(|n| {
            let steps = if n == opts.grid.n_max { 1 } else { ppo };
            (0..steps).map(move |j| (Complex64::new((n as f64 + j as f64 / ppo as f64).exp2(), 0.0), n))
        })
        .collect();
    evaluate_levels(CriterionId::R7, m.len(), 0.5, |k| {
        let mk = m.prefix(k);
        Ok(sup_over(&points, opts.grid, |l| r7_ratio(&mk, alpha, l.re)))
    })
}

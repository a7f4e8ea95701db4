//! Dyadic-strip summability (C4) and the Sobolev balayage test (C6), the
//! criteria for the regime `q < p`.

use num_complex::Complex64;

use super::carleson::sobolev_weighted;
use super::{evaluate_levels, require_sectorial, CriterionId, CriterionReport, Evaluation, Real, ScaleGrid, ScaleValue, Verdict, Witness};
use crate::error::{Error, Result};
use crate::geometry::{balayage_norm, strip_masses, DyadicStrip};
use crate::parallel::{argmax, det_sum};
use crate::system::{conjugate_exponent, AtomicMeasure};

const C4_NAME: &str = "strip summability criterion (C4)";
const C6_NAME: &str = "Sobolev balayage criterion (C6)";

/// Largest measure for which balayage norms are evaluated: each quadrature
/// node costs a pass over every atom.
pub const BALAYAGE_ATOM_LIMIT: usize = 2000;

fn require_regime(p: f64, q: f64, criterion: &'static str) -> Result<()> {
    if !(q >= 1.0) || !(q < p) || !p.is_finite() {
        return Err(Error::hypothesis(criterion, format!("requires 1 ≤ q < p, got p = {p}, q = {q}")));
    }
    Ok(())
}

fn lp_norm(values: impl Iterator<Item = f64>, s: f64) -> f64 {
    values.map(|v| v.powf(s)).sum::<f64>().powf(1.0 / s)
}

fn outside_strips(m: &AtomicMeasure, grid: ScaleGrid) -> usize {
    m.atoms()
        .iter()
        .filter(|a| a.mass > 0.0)
        .filter(|a| match DyadicStrip::containing(a.location.re) {
            Some(s) => s.n < grid.n_min || s.n > grid.n_max,
            None => true,
        })
        .count()
}

/// `(2^{−nq/p'} μ(S_n))_n` over the grid.
pub fn strip_sequence(m: &AtomicMeasure, p: f64, q: f64, grid: ScaleGrid) -> Result<Vec<(i32, f64)>> {
    let pp = conjugate_exponent(p)?;
    Ok(strip_masses(m, grid.n_min, grid.n_max)
        .into_iter()
        .map(|(n, mass)| (n, (-(n as f64) * q / pp).exp2() * mass))
        .collect())
}

/// `(2^{n/p} ‖(2^n − A)^{−1}B‖_{ℓ^q})_n` over the grid.
pub fn resolvent_sequence(m: &AtomicMeasure, p: f64, q: f64, grid: ScaleGrid) -> Vec<(i32, f64)> {
    grid.exponents()
        .map(|n| {
            let l = Complex64::new((n as f64).exp2(), 0.0);
            let s = det_sum(m.atoms(), |a| a.mass * (l + a.location).norm().powf(-q));
            (n, (n as f64 / p).exp2() * s.powf(1.0 / q))
        })
        .collect()
}

/// C4: `‖(2^{−nq/p'} μ(S_n))‖_{ℓ^{p/(p−q)}}`.
pub fn c4_strip_summability(m: &AtomicMeasure, p: f64, q: f64, grid: ScaleGrid) -> Result<CriterionReport> {
    require_regime(p, q, C4_NAME)?;
    require_sectorial(m, C4_NAME)?;
    let s = p / (p - q);
    let mut report = evaluate_levels(CriterionId::C4, m.len(), 1.0, |k| {
        let mk = m.prefix(k);
        let seq = strip_sequence(&mk, p, q, grid)?;
        let constant = lp_norm(seq.iter().map(|t| t.1), s);
        let best = argmax(seq.iter().map(|t| t.1)).filter(|b| b.1 > 0.0);
        Ok(Evaluation {
            constant,
            witness: best.map(|(i, _)| Witness::Strip { n: seq[i].0 }),
            profile: seq
                .iter()
                .map(|&(n, v)| ScaleValue {
                    log2_scale: n as f64,
                    value: v,
                })
                .collect(),
            witness_at_edge: outside_strips(&mk, grid) > 0,
            boundary_hits: 0,
        })
    })?;

    let d = &mut report.diagnostics;
    let outside = outside_strips(m, grid);
    if outside > 0 {
        d.notes.push(format!("{outside} atoms lie outside the tested strips"));
    }
    let rs = resolvent_sequence(m, p, q, grid);
    let rs_exp = q * p / (p - q);
    d.secondary
        .insert("resolvent_sequence_norm".into(), Real(lp_norm(rs.iter().map(|t| t.1), rs_exp)));

    let pp = conjugate_exponent(p)?;
    if pp < q {
        let a = q * (2.0 - p) / p;
        if m.len() > BALAYAGE_ATOM_LIMIT {
            d.notes.push(format!(
                "balayage branch skipped: {} atoms exceed the limit of {BALAYAGE_ATOM_LIMIT}",
                m.len()
            ));
        } else {
            let b = balayage_norm(m, a, s)?;
            d.secondary.insert("balayage_norm".into(), Real(b.value));
            if let Some(end) = b.divergent_end {
                d.notes.push(format!(
                    "balayage branch (weight |t|^{a:.4}, exponent {s:.4}) diverges at the {end:?} end; reported only"
                ));
            }
        }
    }
    Ok(report)
}

/// C6: `‖S_{μ_{q,β}}‖_{L^{p/(p−q)}}` with `dμ_{q,β} = (1 + |z|^{−qβ}) dμ`.
/// Sufficient only: a divergent norm is never evidence of unboundedness.
pub fn c6_sobolev_balayage(m: &AtomicMeasure, p: f64, q: f64, beta: f64) -> Result<CriterionReport> {
    require_regime(p, q, C6_NAME)?;
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::hypothesis(C6_NAME, format!("requires β ≥ 0, got β = {beta}")));
    }
    require_sectorial(m, C6_NAME)?;
    if m.len() > BALAYAGE_ATOM_LIMIT {
        return Err(Error::Unsupported(format!(
            "balayage norms are limited to {BALAYAGE_ATOM_LIMIT} atoms, got {}",
            m.len()
        )));
    }
    let s = p / (p - q);
    let weighted = sobolev_weighted(m, q, beta);
    let mut report = evaluate_levels(CriterionId::C6, m.len(), 1.0, |k| {
        let b = balayage_norm(&weighted.prefix(k), 0.0, s)?;
        Ok(Evaluation {
            constant: b.value,
            witness_at_edge: !b.converged,
            ..Evaluation::default()
        })
    })?;
    if report.verdict == Verdict::UnboundedEvidence {
        report.verdict = Verdict::Inconclusive;
    }
    report
        .diagnostics
        .notes
        .push("sufficient condition only: a large or divergent norm is inconclusive".into());
    report
        .diagnostics
        .notes
        .push("swept measure is (1 + |z|^(-qβ)) dμ(z)".into());
    Ok(report)
}

//! Exact controllability: the `ν_λ` Carleson measure, weighted interpolation
//! sums and the Sobolev controllability test, all through truncated Blaschke
//! products.

use num_complex::Complex64;
use serde::Serialize;

use crate::criteria::carleson::hardy_carleson;
use crate::criteria::{CriterionId, CriterionReport, Real, ScaleGrid, Verdict};
use crate::error::{Error, Result};
use crate::geometry::{blaschke_products, BlaschkeReport};
use crate::system::{AtomicMeasure, DiagonalSystem};

/// Minimal tail factor of the converged core before a verdict is trusted.
pub const TAIL_THRESHOLD: f64 = 0.5;

/// Points `z_k`, nonzero weights `g_k` and smoothness `β ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolationProblem {
    points: Vec<Complex64>,
    weights: Vec<Complex64>,
    beta: f64,
}

impl InterpolationProblem {
    pub fn new(points: Vec<Complex64>, weights: Vec<Complex64>, beta: f64) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::InvalidSystem(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if let Some(z) = points.iter().find(|z| !(z.re > 0.0) || !z.im.is_finite()) {
            return Err(Error::InvalidSystem(format!("point {z} is not in the open right half-plane")));
        }
        if let Some(k) = weights.iter().position(|g| g.norm() == 0.0 || !g.norm().is_finite()) {
            return Err(Error::InvalidSystem(format!("weight g_{k} must be finite and nonzero")));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::InvalidSystem(format!("smoothness β = {beta} must be ≥ 0")));
        }
        Ok(Self { points, weights, beta })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn prefix(&self, k: usize) -> Self {
        Self {
            points: self.points[..k].to_vec(),
            weights: self.weights[..k].to_vec(),
            beta: self.beta,
        }
    }
}

fn products(points: &[Complex64]) -> Result<BlaschkeReport> {
    let report = blaschke_products(points, points.len() / 4)?;
    if report.degenerate {
        return Err(Error::Singular(
            "repeated points: a Blaschke product vanishes and the mass is infinite".into(),
        ));
    }
    Ok(report)
}

fn atoms(points: &[Complex64], masses: impl Iterator<Item = f64>) -> Result<AtomicMeasure> {
    AtomicMeasure::from_pairs(points.iter().copied().zip(masses))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControllabilityMeasure {
    pub measure: AtomicMeasure,
    pub blaschke: BlaschkeReport,
}

fn require_hilbert(sys: &DiagonalSystem) -> Result<()> {
    if sys.q() != 2.0 {
        return Err(Error::hypothesis(
            "exact controllability",
            format!("stated for a Hilbert state space (q = 2), got q = {}", sys.q()),
        ));
    }
    if let Some(k) = sys.coeffs().iter().position(|b| b.norm() == 0.0) {
        return Err(Error::hypothesis(
            "exact controllability",
            format!("b_{k} = 0: mode {k} is not reached by this input"),
        ));
    }
    Ok(())
}

/// `ν_λ = Σ |Re λ_n|² / (|b_n|² b_{∞,n}²) δ_{−λ_n}`.
pub fn controllability_measure(sys: &DiagonalSystem) -> Result<ControllabilityMeasure> {
    require_hilbert(sys)?;
    let points: Vec<Complex64> = sys.eigenvalues().iter().map(|l| -l).collect();
    let blaschke = products(&points)?;
    let measure = atoms(
        &points,
        points
            .iter()
            .zip(sys.coeffs())
            .zip(&blaschke.products)
            .map(|((z, b), p)| z.re * z.re / (b.norm_sqr() * p * p)),
    )?;
    Ok(ControllabilityMeasure { measure, blaschke })
}

/// `Σ |2 Re z_k|² |1 + z_k|^{2β} / (b_{∞,k}² |g_k|²) δ_{z_k}`.
pub fn interpolation_measure(prob: &InterpolationProblem) -> Result<(AtomicMeasure, BlaschkeReport)> {
    let blaschke = products(&prob.points)?;
    let measure = atoms(
        &prob.points,
        prob.points
            .iter()
            .zip(&prob.weights)
            .zip(&blaschke.products)
            .map(|((z, g), p)| {
                let two_re = 2.0 * z.re;
                two_re * two_re * (Complex64::new(1.0, 0.0) + z).norm().powf(2.0 * prob.beta) / (p * p * g.norm_sqr())
            }),
    )?;
    Ok((measure, blaschke))
}

/// Masses and their tail-adjusted upper estimates, from one Blaschke report.
/// Points inside the window keep their nominal mass: their window factors are
/// materialized neighbours, not an estimate of the missing ones.
fn with_tail_bound(m: &AtomicMeasure, b: &BlaschkeReport) -> Result<AtomicMeasure> {
    let inner = b.tail_factor.len() - b.tail_factor.len() / 4;
    atoms(
        &m.atoms().iter().map(|a| a.location).collect::<Vec<_>>(),
        m.atoms()
            .iter()
            .zip(&b.tail_factor)
            .enumerate()
            .map(|(k, (a, t))| if k < inner { a.mass / (t * t) } else { a.mass }),
    )
}

fn core_tail_factor(b: &BlaschkeReport) -> f64 {
    let core = (b.products.len() / 4).max(1).min(b.products.len());
    b.tail_factor[..core].iter().cloned().fold(1.0, f64::min)
}

/// Hardy Carleson test of a measure built from truncated products, once with
/// the products and once with their tail-adjusted lower estimates.
fn uncertain_carleson<F>(id: CriterionId, modes: usize, grid: ScaleGrid, build: F) -> Result<CriterionReport>
where
    F: Fn(usize) -> Result<(AtomicMeasure, BlaschkeReport)>,
{
    let sizes = crate::criteria::truncation_levels(modes);
    let mut nominal = Vec::new();
    let mut adjusted = Vec::new();
    let mut full = None;
    for &k in &sizes {
        let (m, b) = build(k)?;
        let lo = hardy_carleson(id, &m, grid)?;
        let hi = hardy_carleson(id, &with_tail_bound(&m, &b)?, grid)?;
        nominal.push(crate::criteria::LevelConstant {
            modes: k,
            constant: lo.constant,
        });
        adjusted.push(crate::criteria::LevelConstant {
            modes: k,
            constant: hi.constant,
        });
        full = Some((lo, hi, b));
    }
    let (mut report, upper, b) = full.ok_or_else(|| Error::InvalidSystem("no points".into()))?;
    let edge = report.diagnostics.witness_at_grid_edge;
    let v_lo = crate::criteria::classify(&nominal, 1.0, edge);
    let v_hi = crate::criteria::classify(&adjusted, 1.0, upper.diagnostics.witness_at_grid_edge);
    report.diagnostics.levels = nominal;
    let d = &mut report.diagnostics;
    d.secondary.insert("constant_tail_adjusted".into(), Real(upper.constant));
    let tail = core_tail_factor(&b);
    d.secondary.insert("core_tail_factor".into(), Real(tail));
    let min_factor = b.min_factor.iter().cloned().fold(1.0, f64::min);
    d.secondary.insert("min_pseudo_hyperbolic_distance".into(), Real(min_factor));
    report.verdict = v_lo;
    if v_lo != v_hi {
        d.notes.push(format!(
            "verdict flips within the product uncertainty ({v_lo} vs {v_hi})"
        ));
        report.verdict = Verdict::Inconclusive;
    }
    if tail < TAIL_THRESHOLD {
        d.notes.push(format!(
            "truncated products not converged: core tail factor {tail:.3} < {TAIL_THRESHOLD}"
        ));
        report.verdict = Verdict::Inconclusive;
    }
    if b.summability_growth {
        d.notes
            .push("Σ Re z_k/(1+|z_k|²) keeps growing: the points may not be a Blaschke sequence".into());
    }
    Ok(report)
}

/// Exact controllability evidence: Hardy Carleson test of `ν_λ`.
pub fn exact_controllability(sys: &DiagonalSystem, grid: ScaleGrid) -> Result<CriterionReport> {
    require_hilbert(sys)?;
    uncertain_carleson(CriterionId::ExactControl, sys.truncation(), grid, |k| {
        let cm = controllability_measure(&sys.prefix(k))?;
        Ok((cm.measure, cm.blaschke))
    })
}

/// Weighted interpolation constant: Hardy Carleson test of the
/// interpolation measure.
pub fn interpolation_sum(prob: &InterpolationProblem, grid: ScaleGrid) -> Result<CriterionReport> {
    uncertain_carleson(CriterionId::Interpolation, prob.points.len(), grid, |k| {
        interpolation_measure(&prob.prefix(k))
    })
}

fn sobolev_problem(sys: &DiagonalSystem, beta: f64, g: Option<&[Complex64]>) -> Result<InterpolationProblem> {
    require_hilbert(sys)?;
    let points: Vec<Complex64> = sys.eigenvalues().iter().map(|l| -l).collect();
    let weights = match g {
        Some(g) => g.to_vec(),
        None => sys.coeffs().to_vec(),
    };
    InterpolationProblem::new(points, weights, beta)
}

/// Interpolation masses of the Sobolev controllability test, with
/// `z_k = −λ_k` and `g_k = b_k` unless weights are given.
pub fn sobolev_controllability_masses(
    sys: &DiagonalSystem,
    beta: f64,
    g: Option<&[Complex64]>,
) -> Result<AtomicMeasure> {
    Ok(interpolation_measure(&sobolev_problem(sys, beta, g)?)?.0)
}

/// Exact `H²_β`-controllability evidence.
pub fn sobolev_controllability(
    sys: &DiagonalSystem,
    beta: f64,
    g: Option<&[Complex64]>,
    grid: ScaleGrid,
) -> Result<CriterionReport> {
    if !(beta > 0.0) {
        return Err(Error::hypothesis(
            "Sobolev controllability",
            format!("requires β > 0, got β = {beta}"),
        ));
    }
    let prob = sobolev_problem(sys, beta, g)?;
    let mut report = interpolation_sum(&prob, grid)?;
    report.criterion = CriterionId::SobolevControl;
    if g.is_none() {
        report
            .diagnostics
            .notes
            .push("weights g_k taken as the control coefficients b_k".into());
    }
    Ok(report)
}

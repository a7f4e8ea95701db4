//! Routing of a system and an input space to the criteria whose hypotheses
//! hold, with a combined verdict.

use serde::{Deserialize, Serialize};

use super::carleson::{c1_zen_carleson, c2_power_square, c5_sobolev_square, c7_halfsquare, c8_shifted_carleson};
use super::resolvent::{r1_resolvent, r7_fractional_resolvent};
use super::strips::{c4_strip_summability, c6_sobolev_balayage};
use super::{CriterionId, CriterionOptions, CriterionReport, InputSpace, Verdict};
use crate::error::{Error, Result};
use crate::oracle::{default_kernel, kernel_condition_sweep, KernelGrid};
use crate::system::{
    conjugate_exponent, dual_system, sector_check, spectral_measure, AtomicMeasure, DiagonalSystem, SectorCheck,
    SectorSpec,
};
use num_complex::Complex64;
use crate::zen::RadialMeasure;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispatchOptions {
    pub criteria: CriterionOptions,
    /// Opening angle below which the spectral measure counts as sectorial.
    pub sector_theta: f64,
    /// Run only this criterion instead of routing.
    pub forced: Option<CriterionId>,
    /// Override of the resolvent order `N`.
    pub order: Option<u32>,
    pub kernel_grid: KernelGrid,
    /// Also run resolvent forms and kernel sweeps next to the routed criteria.
    pub cross_checks: bool,
}

impl Default for DispatchOptions {
    fn default() -> Self {
        Self {
            criteria: CriterionOptions::default(),
            sector_theta: 1.5,
            forced: None,
            order: None,
            kernel_grid: KernelGrid::default(),
            cross_checks: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispatchOutcome {
    pub space: InputSpace,
    pub sector: SectorCheck,
    pub sectorial: bool,
    /// Criteria that decide the combined verdict, ordered by id.
    pub reports: Vec<CriterionReport>,
    /// Resolvent forms and kernel sweeps, reported next to the routed criteria.
    pub cross_checks: Vec<CriterionReport>,
    pub combined: Verdict,
    /// Set when no criterion covers this parameter regime.
    pub no_characterization: Option<String>,
    pub disagreements: Vec<String>,
    pub notes: Vec<String>,
}

fn run(sys: &DiagonalSystem, m: &AtomicMeasure, space: &InputSpace, id: CriterionId, opts: &DispatchOptions) -> Result<CriterionReport> {
    let grid = opts.criteria.grid;
    let q = sys.q();
    let wrong = || {
        Error::Unsupported(format!("criterion {id} does not apply to the space {}", space.label()))
    };
    match (id, space) {
        (CriterionId::C1, InputSpace::WeightedL2 { measure }) => c1_zen_carleson(m, measure, grid),
        (CriterionId::C1, InputSpace::Lp { p }) if *p == 2.0 => c1_zen_carleson(m, &RadialMeasure::hardy(), grid),
        (CriterionId::R1, InputSpace::WeightedL2 { measure }) => r1_resolvent(sys, measure, opts.order, opts.criteria),
        (CriterionId::R1, InputSpace::Lp { p }) if *p == 2.0 => {
            r1_resolvent(sys, &RadialMeasure::hardy(), opts.order, opts.criteria)
        }
        (CriterionId::C2, InputSpace::Lp { p }) => c2_power_square(m, *p, q, false, grid),
        (CriterionId::C3, InputSpace::Lp { p }) => c2_power_square(m, *p, q, true, grid),
        (CriterionId::C4, InputSpace::Lp { p }) => c4_strip_summability(m, *p, q, grid),
        (CriterionId::C5, InputSpace::Sobolev { p, beta }) => c5_sobolev_square(m, *p, q, *beta, grid),
        (CriterionId::C6, InputSpace::Sobolev { p, beta }) => c6_sobolev_balayage(m, *p, q, *beta),
        (CriterionId::C8, InputSpace::Sobolev { p, beta }) => {
            if *p != 2.0 || q != 2.0 {
                return Err(Error::hypothesis(
                    "shifted Carleson criterion (C8)",
                    format!("stated for p = q = 2, got p = {p}, q = {q}"),
                ));
            }
            c8_shifted_carleson(m, *beta, grid)
        }
        (CriterionId::C7, InputSpace::PowerL2 { alpha }) => c7_halfsquare(m, *alpha, grid),
        (CriterionId::C7, InputSpace::Lp { p }) if *p == 2.0 => c7_halfsquare(m, 0.0, grid),
        (CriterionId::R7, InputSpace::PowerL2 { alpha }) => r7_fractional_resolvent(sys, *alpha, opts.criteria),
        (CriterionId::R7, InputSpace::Lp { p }) if *p == 2.0 => r7_fractional_resolvent(sys, 0.0, opts.criteria),
        (CriterionId::Kernel, _) => kernel_condition_sweep(sys, space, default_kernel(space, q)?, opts.kernel_grid),
        _ => Err(wrong()),
    }
}

/// Primary criteria and cross-checks whose hypotheses hold, or the reason
/// none does.
pub fn route(space: &InputSpace, q: f64, sectorial: bool) -> std::result::Result<(Vec<CriterionId>, Vec<CriterionId>), String> {
    let mut primary = Vec::new();
    let mut cross = Vec::new();
    match space {
        InputSpace::Lp { p } => {
            let p = *p;
            if p <= 2.0 && conjugate_exponent(p).is_ok_and(|pp| pp <= q) {
                primary.push(CriterionId::C2);
            }
            if sectorial && p <= q {
                primary.push(CriterionId::C3);
            }
            if sectorial && q < p {
                primary.push(CriterionId::C4);
            }
            if sectorial {
                cross.push(CriterionId::Kernel);
            }
            if primary.is_empty() {
                return Err(format!(
                    "Lp with p = {p}, q = {q} and a non-sectorial spectrum is outside every known characterization"
                ));
            }
        }
        InputSpace::WeightedL2 { .. } => {
            if q != 2.0 {
                return Err(format!("weighted L² inputs are characterized for q = 2 only, got q = {q}"));
            }
            primary.push(CriterionId::C1);
            cross.push(CriterionId::R1);
        }
        InputSpace::PowerL2 { .. } => {
            if q != 2.0 || !sectorial {
                return Err(format!(
                    "power-weighted L² inputs are characterized for q = 2 and sectorial spectra only (q = {q}, sectorial = {sectorial})"
                ));
            }
            primary.push(CriterionId::C7);
            cross.push(CriterionId::R7);
            cross.push(CriterionId::Kernel);
        }
        InputSpace::Sobolev { p, .. } => {
            let p = *p;
            if sectorial && q >= p {
                primary.push(CriterionId::C5);
                cross.push(CriterionId::Kernel);
            }
            if sectorial && q < p {
                primary.push(CriterionId::C6);
            }
            if p == 2.0 && q == 2.0 {
                primary.push(CriterionId::C8);
            }
            if primary.is_empty() {
                return Err(format!(
                    "Sobolev inputs with p = {p}, q = {q} and a non-sectorial spectrum are outside every known characterization"
                ));
            }
        }
    }
    Ok((primary, cross))
}

fn combine(reports: &[CriterionReport]) -> Verdict {
    match reports.first() {
        None => Verdict::Inconclusive,
        Some(first) if reports.iter().all(|r| r.verdict == first.verdict) => first.verdict,
        _ => Verdict::Inconclusive,
    }
}

/// Select the applicable criteria, run them and combine their verdicts.
pub fn dispatch(sys: &DiagonalSystem, space: &InputSpace, opts: &DispatchOptions) -> Result<DispatchOutcome> {
    let m = spectral_measure(sys);
    let sector = sector_check(&m, SectorSpec::new(opts.sector_theta)?);
    let mut outcome = DispatchOutcome {
        space: space.clone(),
        sector,
        sectorial: sector.inside,
        reports: Vec::new(),
        cross_checks: Vec::new(),
        combined: Verdict::Inconclusive,
        no_characterization: None,
        disagreements: Vec::new(),
        notes: Vec::new(),
    };

    if let Some(id) = opts.forced {
        let r = run(sys, &m, space, id, opts)?;
        outcome.combined = r.verdict;
        outcome.reports.push(r);
        return Ok(outcome);
    }

    let (primary, cross) = match route(space, sys.q(), sector.inside) {
        Ok(r) => r,
        Err(reason) => {
            outcome.no_characterization = Some(reason);
            return Ok(outcome);
        }
    };
    let mut failed = false;
    for id in primary {
        match run(sys, &m, space, id, opts) {
            Ok(r) => outcome.reports.push(r),
            Err(e) => {
                failed = true;
                outcome.notes.push(format!("{id}: {e}"));
            }
        }
    }
    if opts.cross_checks {
        for id in cross {
            match run(sys, &m, space, id, opts) {
                Ok(r) => outcome.cross_checks.push(r),
                Err(e) => outcome.notes.push(format!("{id}: {e}")),
            }
        }
    }
    outcome.reports.sort_by_key(|r| r.criterion);
    outcome.cross_checks.sort_by_key(|r| r.criterion);
    outcome.combined = if failed {
        Verdict::Inconclusive
    } else {
        combine(&outcome.reports)
    };
    if outcome.reports.len() > 1 && outcome.reports.iter().any(|r| r.verdict != outcome.reports[0].verdict) {
        outcome.disagreements.push(format!(
            "routed criteria disagree: {}",
            outcome
                .reports
                .iter()
                .map(|r| format!("{}={}", r.criterion, r.verdict))
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }
    let decided = outcome.combined != Verdict::Inconclusive;
    for c in &outcome.cross_checks {
        if decided && c.verdict != Verdict::Inconclusive && c.verdict != outcome.combined {
            outcome
                .disagreements
                .push(format!("{} reports {} against the combined {}", c.criterion, c.verdict, outcome.combined));
        }
    }
    Ok(outcome)
}

/// Observation-side question for `C φ_k = c_k`: the control question for the
/// dual system in the dual exponents.
pub fn observation_dispatch(
    sys: &DiagonalSystem,
    obs_coeffs: &[Complex64],
    space: &InputSpace,
    opts: &DispatchOptions,
) -> Result<DispatchOutcome> {
    let dual = dual_system(sys, obs_coeffs)?;
    dispatch(&dual, &space.dual()?, opts)
}

//! Criterion selection and evaluation shared by the subcommands.

use admiss_core::controllability::{exact_controllability, interpolation_sum, sobolev_controllability, InterpolationProblem};
use admiss_core::{dispatch, CriterionId, CriterionReport, DispatchOptions, DispatchOutcome, InputSpace, SystemConfig, Verdict};
use num_complex::Complex64;
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Auto,
    Forced(CriterionId),
}

impl Selection {
    pub fn parse(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Selection::Auto);
        }
        CriterionId::parse(s).map(Selection::Forced).ok_or_else(|| {
            format!("unknown criterion `{s}` (auto, C1..C8, R1, R7, kernel, exact_control, sobolev_control, interpolation)")
        })
    }

    pub fn name(&self) -> String {
        match self {
            Selection::Auto => "auto".into(),
            Selection::Forced(id) => id.name().into(),
        }
    }

    /// Controllability criteria read the system document only.
    pub fn needs_space(&self) -> bool {
        !matches!(
            self,
            Selection::Forced(CriterionId::ExactControl | CriterionId::SobolevControl | CriterionId::Interpolation)
        )
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Evaluation {
    Dispatch(DispatchOutcome),
    Single { combined: Verdict, reports: Vec<CriterionReport> },
}

impl Evaluation {
    pub fn combined(&self) -> Verdict {
        match self {
            Evaluation::Dispatch(d) => d.combined,
            Evaluation::Single { combined, .. } => *combined,
        }
    }

    pub fn reports(&self) -> &[CriterionReport] {
        match self {
            Evaluation::Dispatch(d) => &d.reports,
            Evaluation::Single { reports, .. } => reports,
        }
    }

    pub fn cross_checks(&self) -> &[CriterionReport] {
        match self {
            Evaluation::Dispatch(d) => &d.cross_checks,
            Evaluation::Single { .. } => &[],
        }
    }

    pub fn notes(&self) -> Vec<String> {
        match self {
            Evaluation::Dispatch(d) => {
                let mut notes = d.notes.clone();
                notes.extend(d.no_characterization.iter().map(|r| format!("no characterization: {r}")));
                notes.extend(d.disagreements.iter().cloned());
                notes
            }
            Evaluation::Single { reports, .. } => reports.iter().flat_map(|r| r.diagnostics.notes.clone()).collect(),
        }
    }
}

fn single(report: CriterionReport) -> Evaluation {
    Evaluation::Single {
        combined: report.verdict,
        reports: vec![report],
    }
}

pub fn evaluate(
    cfg: &SystemConfig,
    space: Option<&InputSpace>,
    selection: Selection,
    opts: &DispatchOptions,
) -> Result<Evaluation, CliError> {
    let grid = opts.criteria.grid;
    let sys = &cfg.system;
    match selection {
        Selection::Forced(CriterionId::ExactControl) => Ok(single(exact_controllability(sys, grid)?)),
        Selection::Forced(CriterionId::SobolevControl) => {
            let beta = cfg
                .beta
                .ok_or_else(|| CliError::usage("sobolev_control needs \"beta\" in the system document"))?;
            Ok(single(sobolev_controllability(sys, beta, cfg.g.as_deref(), grid)?))
        }
        Selection::Forced(CriterionId::Interpolation) => {
            let points: Vec<Complex64> = sys.eigenvalues().iter().map(|l| -l).collect();
            let weights = cfg.g.clone().unwrap_or_else(|| sys.coeffs().to_vec());
            let prob = InterpolationProblem::new(points, weights, cfg.beta.unwrap_or(0.0))?;
            Ok(single(interpolation_sum(&prob, grid)?))
        }
        Selection::Forced(id) => {
            let space = space.ok_or_else(|| CliError::usage(format!("criterion {id} needs --space")))?;
            let opts = DispatchOptions { forced: Some(id), ..*opts };
            Ok(Evaluation::Dispatch(dispatch(sys, space, &opts)?))
        }
        Selection::Auto => {
            let space = space.ok_or_else(|| CliError::usage("--space is required"))?;
            Ok(Evaluation::Dispatch(dispatch(sys, space, opts)?))
        }
    }
}

pub fn exit_code(v: Verdict) -> u8 {
    match v {
        Verdict::BoundedEvidence => 0,
        Verdict::UnboundedEvidence => 2,
        Verdict::Inconclusive => 3,
    }
}

//! Admissibility criteria: Carleson-square, strip, balayage and resolvent
//! tests, each reported with a constant, a witness and a three-valued verdict.

pub mod carleson;
pub mod dispatch;
pub mod report;
pub mod resolvent;
pub mod strips;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config;
use crate::error::{Error, Result};
use crate::system::{conjugate_exponent, AtomicMeasure};
use crate::zen::RadialMeasure;

pub use report::{CriterionId, CriterionReport, Diagnostics, LevelConstant, Real, ScaleValue, Verdict, Witness};

/// Input function space `Z` on `(0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum InputSpace {
    #[serde(rename = "Lp")]
    Lp { p: f64 },
    #[serde(rename = "weightedL2")]
    WeightedL2 { measure: RadialMeasure },
    /// `L²(t^α dt)`.
    #[serde(rename = "powerL2")]
    PowerL2 { alpha: f64 },
    /// `H^p_β(0, ∞)`.
    #[serde(rename = "sobolev")]
    Sobolev { p: f64, beta: f64 },
}

impl InputSpace {
    pub fn lp(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidMeasure(format!("Lp exponent {p} must be finite and > 1")));
        }
        Ok(InputSpace::Lp { p })
    }

    pub fn power_l2(alpha: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::InvalidMeasure(format!("power weight exponent {alpha} must lie in [0, 1)")));
        }
        Ok(InputSpace::PowerL2 { alpha })
    }

    pub fn sobolev(p: f64, beta: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidMeasure(format!("Sobolev exponent {p} must be finite and > 1")));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidMeasure(format!("smoothness {beta} must be > 0")));
        }
        Ok(InputSpace::Sobolev { p, beta })
    }

    pub fn weighted_l2(measure: RadialMeasure) -> Result<Self> {
        if measure.is_zero() {
            return Err(Error::InvalidMeasure("radial measure is zero".into()));
        }
        Ok(InputSpace::WeightedL2 { measure })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_value(&config::parse_document(text)?, "$")
    }

    pub fn from_value(v: &Value, path: &str) -> Result<Self> {
        let obj = config::as_object(v, path)?;
        let kind = config::required(obj, "kind", path)?
            .as_str()
            .ok_or_else(|| Error::config(format!("{path}.kind"), "expected a string"))?;
        let at = |key: &str| format!("{path}.{key}");
        let space = match kind {
            "Lp" => Self::lp(config::required_number(obj, "p", path)?).map_err(|e| Error::config(at("p"), e.to_string()))?,
            "powerL2" => Self::power_l2(config::required_number(obj, "alpha", path)?)
                .map_err(|e| Error::config(at("alpha"), e.to_string()))?,
            "sobolev" => {
                let p = config::required_number(obj, "p", path)?;
                let beta = config::required_number(obj, "beta", path)?;
                Self::sobolev(p, beta).map_err(|e| Error::config(path, e.to_string()))?
            }
            "weightedL2" => {
                let m = RadialMeasure::from_value(config::required(obj, "measure", path)?, &at("measure"))?;
                Self::weighted_l2(m).map_err(|e| Error::config(at("measure"), e.to_string()))?
            }
            other => {
                return Err(Error::config(
                    at("kind"),
                    format!("unknown space kind `{other}` (known: Lp, weightedL2, powerL2, sobolev)"),
                ))
            }
        };
        Ok(space)
    }

    /// Integrability exponent of the space (2 for the Hilbert kinds).
    pub fn exponent(&self) -> f64 {
        match self {
            InputSpace::Lp { p } | InputSpace::Sobolev { p, .. } => *p,
            _ => 2.0,
        }
    }

    /// Dual exponents for the observation problem: `Lp ↦ Lp'`.
    pub fn dual(&self) -> Result<Self> {
        match self {
            InputSpace::Lp { p } => Self::lp(conjugate_exponent(*p)?),
            other => Err(Error::Unsupported(format!(
                "no dual parameters are implemented for {}",
                other.label()
            ))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            InputSpace::Lp { p } => format!("L^{p}"),
            InputSpace::WeightedL2 { .. } => "L²_w".into(),
            InputSpace::PowerL2 { alpha } => format!("L²(t^{alpha} dt)"),
            InputSpace::Sobolev { p, beta } => format!("H^{p}_{beta}"),
        }
    }
}

/// Dyadic exponents `n_min ≤ n ≤ n_max` of the tested lengths `2^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleGrid {
    pub n_min: i32,
    pub n_max: i32,
}

impl Default for ScaleGrid {
    fn default() -> Self {
        Self { n_min: -20, n_max: 40 }
    }
}

impl ScaleGrid {
    pub fn new(n_min: i32, n_max: i32) -> Result<Self> {
        if n_min > n_max {
            return Err(Error::InvalidMeasure(format!("empty scale grid {n_min}:{n_max}")));
        }
        Ok(Self { n_min, n_max })
    }

    /// Parse `n_min:n_max`.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidMeasure(format!("grid `{s}` is not of the form n_min:n_max")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<i32>()
                .map_err(|_| Error::InvalidMeasure(format!("grid bound `{t}` is not an integer")))
        };
        Self::new(parse(a)?, parse(b)?)
    }

    pub fn exponents(&self) -> impl Iterator<Item = i32> + Clone {
        self.n_min..=self.n_max
    }

    pub fn is_edge(&self, n: i32) -> bool {
        n == self.n_min || n == self.n_max
    }
}

/// Evaluation options shared by every criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionOptions {
    pub grid: ScaleGrid,
    /// Points per octave of the resolvent λ-grids.
    pub per_octave: u32,
}

impl Default for CriterionOptions {
    fn default() -> Self {
        Self {
            grid: ScaleGrid::default(),
            per_octave: 2,
        }
    }
}

/// Minimal per-step growth (in measure units) counted as divergence.
pub const GROWTH_FACTOR: f64 = 1.2;
/// Number of nested truncation levels.
pub const LEVELS: u32 = 4;

/// Nested truncations `K_j = ⌈K^{j/4}⌉`, `j = 1..4`.
pub fn truncation_levels(k: usize) -> Vec<usize> {
    if k == 0 {
        return vec![0];
    }
    (1..=LEVELS)
        .map(|j| ((k as f64).powf(j as f64 / LEVELS as f64).ceil() as usize).clamp(1, k))
        .collect()
}

fn grows(prev: f64, next: f64) -> bool {
    if prev == 0.0 {
        next > 0.0
    } else {
        next >= GROWTH_FACTOR * prev
    }
}

/// Three-valued verdict from the constants at nested truncations.
///
/// Constants are compared in measure units, `constant^{1/degree}`, where
/// `degree` is the homogeneity of the constant in the measure.
pub fn classify(levels: &[LevelConstant], degree: f64, witness_at_edge: bool) -> Verdict {
    if levels.iter().any(|l| !l.constant.is_finite()) {
        return Verdict::UnboundedEvidence;
    }
    let units: Vec<f64> = levels.iter().map(|l| l.constant.powf(1.0 / degree)).collect();
    let steps: Vec<bool> = units
        .windows(2)
        .zip(levels.windows(2))
        .map(|(u, l)| l[1].modes > l[0].modes && grows(u[0], u[1]))
        .collect();
    if steps.len() >= 3 && steps[steps.len() - 3..].iter().all(|&g| g) {
        return Verdict::UnboundedEvidence;
    }
    let last_grows = steps.last().copied().unwrap_or(false);
    if !last_grows && !witness_at_edge {
        Verdict::BoundedEvidence
    } else {
        Verdict::Inconclusive
    }
}

/// One evaluation of a criterion on a fixed measure.
#[derive(Debug, Clone, PartialEq, Default)]
pub(crate) struct Evaluation {
    pub constant: f64,
    pub witness: Option<Witness>,
    pub profile: Vec<ScaleValue>,
    pub witness_at_edge: bool,
    pub boundary_hits: usize,
}

/// Evaluate on each nested truncation and classify.
pub(crate) fn evaluate_levels<F>(
    id: CriterionId,
    modes: usize,
    degree: f64,
    eval: F,
) -> Result<CriterionReport>
where
    F: Fn(usize) -> Result<Evaluation>,
{
    let sizes = truncation_levels(modes);
    let mut levels = Vec::with_capacity(sizes.len());
    let mut last = None;
    for &k in &sizes {
        let e = eval(k)?;
        levels.push(LevelConstant {
            modes: k,
            constant: e.constant,
        });
        last = Some(e);
    }
    let full = last.unwrap_or_default();
    let verdict = classify(&levels, degree, full.witness_at_edge);
    Ok(CriterionReport {
        criterion: id,
        constant: full.constant,
        witness: full.witness,
        verdict,
        diagnostics: Diagnostics {
            levels,
            scale_profile: full.profile,
            witness_at_grid_edge: full.witness_at_edge,
            boundary_hits: full.boundary_hits,
            ..Diagnostics::default()
        },
    })
}

/// Reject measures with atoms on the imaginary axis, where no sector contains them.
pub(crate) fn require_sectorial(m: &AtomicMeasure, criterion: &'static str) -> Result<()> {
    if let Some(a) = m.atoms().iter().find(|a| a.mass > 0.0 && !(a.location.re > 0.0)) {
        return Err(Error::hypothesis(
            criterion,
            format!("atom at {} is outside every sector |arg z| < θ < π/2", a.location),
        ));
    }
    Ok(())
}

/// `mass / den`, infinite when the denominator vanishes under positive mass.
pub(crate) fn mass_ratio(mass: f64, den: f64) -> f64 {
    if mass == 0.0 {
        0.0
    } else if den > 0.0 {
        mass / den
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(v: &[(usize, f64)]) -> Vec<LevelConstant> {
        v.iter()
            .map(|&(modes, constant)| LevelConstant { modes, constant })
            .collect()
    }

    #[test]
    fn levels_are_nested_powers() {
        assert_eq!(truncation_levels(100_000), vec![18, 317, 5624, 100_000]);
        assert_eq!(truncation_levels(1), vec![1, 1, 1, 1]);
    }

    #[test]
    fn growth_in_every_step_is_unbounded() {
        let l = lv(&[(2, 1.0), (4, 1.3), (8, 1.6), (16, 2.0)]);
        assert_eq!(classify(&l, 1.0, false), Verdict::UnboundedEvidence);
    }

    #[test]
    fn degree_converts_to_measure_units() {
        // a 1.1 step in a square-root constant is a 1.21 step in the measure
        let l = lv(&[(2, 1.0), (4, 1.1), (8, 1.21), (16, 1.331)]);
        assert_eq!(classify(&l, 1.0, false), Verdict::BoundedEvidence);
        assert_eq!(classify(&l, 0.5, false), Verdict::UnboundedEvidence);
    }

    #[test]
    fn stable_constant_is_bounded() {
        let l = lv(&[(2, 1.0), (4, 1.5), (8, 1.6), (16, 1.6)]);
        assert_eq!(classify(&l, 1.0, false), Verdict::BoundedEvidence);
        assert_eq!(classify(&l, 1.0, true), Verdict::Inconclusive);
    }

    #[test]
    fn infinite_constant_is_unbounded() {
        let l = lv(&[(1, f64::INFINITY)]);
        assert_eq!(classify(&l, 1.0, false), Verdict::UnboundedEvidence);
    }

    #[test]
    fn repeated_levels_never_count_as_growth() {
        let l = lv(&[(1, 1.0), (1, 1.0), (1, 1.0), (1, 1.0)]);
        assert_eq!(classify(&l, 1.0, false), Verdict::BoundedEvidence);
    }

    #[test]
    fn space_documents_parse() {
        assert_eq!(InputSpace::from_json_str(r#"{"kind":"Lp","p":1.5}"#).unwrap(), InputSpace::Lp { p: 1.5 });
        assert_eq!(
            InputSpace::from_json_str(r#"{"kind":"sobolev","p":2,"beta":1}"#).unwrap(),
            InputSpace::Sobolev { p: 2.0, beta: 1.0 }
        );
        let w = InputSpace::from_json_str(r#"{"kind":"weightedL2","measure":"hardy"}"#).unwrap();
        assert_eq!(w, InputSpace::WeightedL2 { measure: RadialMeasure::hardy() });
        let err = InputSpace::from_json_str(r#"{"kind":"Lp","p":1}"#).unwrap_err().to_string();
        assert!(err.contains("$.p"), "{err}");
        let err = InputSpace::from_json_str(r#"{"kind":"Lq"}"#).unwrap_err().to_string();
        assert!(err.contains("$.kind"), "{err}");
    }

    #[test]
    fn lp_dual() {
        assert_eq!(InputSpace::Lp { p: 4.0 }.dual().unwrap(), InputSpace::Lp { p: 4.0 / 3.0 });
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(ScaleGrid::parse("-10:45").unwrap(), ScaleGrid { n_min: -10, n_max: 45 });
        assert!(ScaleGrid::parse("3:1").is_err());
        assert!(ScaleGrid::parse("3").is_err());
    }
}

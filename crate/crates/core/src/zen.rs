//! Radial measures `ν̃` on `[0, ∞)` defining Zen spaces, their (Δ₂) doubling
//! constant, the time-domain weight `w` and Carleson-square masses of
//! `ν = ν̃ ⊗ Lebesgue`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config;
use crate::error::{Error, Result};
use crate::quadrature::{self, QuadOptions, QuadResult};
use crate::special::gamma;

/// Density `scale · r^alpha dr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerDensity {
    pub alpha: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RadialMeasure {
    #[serde(rename = "atom0")]
    pub atom_at_zero: f64,
    pub atoms: Vec<(f64, f64)>,
    pub density: Option<PowerDensity>,
}

impl RadialMeasure {
    pub fn new(atom_at_zero: f64, atoms: Vec<(f64, f64)>, density: Option<PowerDensity>) -> Result<Self> {
        if !(atom_at_zero >= 0.0) || !atom_at_zero.is_finite() {
            return Err(Error::InvalidMeasure(format!("atom at 0 has mass {atom_at_zero}")));
        }
        for &(r, m) in &atoms {
            if !(r > 0.0) || !r.is_finite() || !(m >= 0.0) || !m.is_finite() {
                return Err(Error::InvalidMeasure(format!("radial atom ({r}, {m}) is invalid")));
            }
        }
        if let Some(d) = density {
            if !(d.alpha > -1.0) || !d.alpha.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "density exponent {} must exceed -1",
                    d.alpha
                )));
            }
            if !(d.scale >= 0.0) || !d.scale.is_finite() {
                return Err(Error::InvalidMeasure(format!("density scale {}", d.scale)));
            }
        }
        Ok(Self {
            atom_at_zero,
            atoms,
            density,
        })
    }

    /// Dirac mass at 0: the Hardy space `H²(ℂ₊)`.
    pub fn hardy() -> Self {
        Self {
            atom_at_zero: 1.0,
            ..Self::default()
        }
    }

    /// `r^α dr`: the standard weighted Bergman space.
    pub fn bergman(alpha: f64) -> Result<Self> {
        Self::new(0.0, Vec::new(), Some(PowerDensity { alpha, scale: 1.0 }))
    }

    pub fn is_zero(&self) -> bool {
        self.atom_at_zero == 0.0
            && self.atoms.iter().all(|&(_, m)| m == 0.0)
            && self.density.map_or(true, |d| d.scale == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            atom_at_zero: self.atom_at_zero * c,
            atoms: self.atoms.iter().map(|&(r, m)| (r, m * c)).collect(),
            density: self.density.map(|d| PowerDensity {
                scale: d.scale * c,
                ..d
            }),
        }
    }

    /// `ν̃[0, r)`.
    pub fn mass_below(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let atoms: f64 = self.atoms.iter().filter(|&&(ra, _)| ra < r).map(|&(_, m)| m).sum();
        let density = self
            .density
            .map_or(0.0, |d| d.scale * r.powf(d.alpha + 1.0) / (d.alpha + 1.0));
        self.atom_at_zero + atoms + density
    }

    /// Decomposition `w(t) = Σ coeff · t^power · e^{−rate·t}` of the weight.
    pub fn weight_terms(&self) -> Vec<WeightTerm> {
        let mut terms = Vec::new();
        if self.atom_at_zero > 0.0 {
            terms.push(WeightTerm {
                coeff: 2.0 * PI * self.atom_at_zero,
                power: 0.0,
                rate: 0.0,
            });
        }
        for &(r, m) in &self.atoms {
            if m > 0.0 {
                terms.push(WeightTerm {
                    coeff: 2.0 * PI * m,
                    power: 0.0,
                    rate: 2.0 * r,
                });
            }
        }
        if let Some(d) = self.density.filter(|d| d.scale > 0.0) {
            terms.push(WeightTerm {
                coeff: 2.0 * PI * d.scale * gamma(d.alpha + 1.0) * 2f64.powf(-d.alpha - 1.0),
                power: -d.alpha - 1.0,
                rate: 0.0,
            });
        }
        terms
    }

    /// Parse a measure document or one of the presets `"hardy"`,
    /// `"bergman:<alpha>"`.
    pub fn from_value(v: &Value, path: &str) -> Result<Self> {
        if let Some(name) = v.as_str() {
            return Self::preset(name).map_err(|e| Error::config(path, e.to_string()));
        }
        let obj = config::as_object(v, path)?;
        let atom0 = config::optional_number(obj, "atom0", path)?.unwrap_or(0.0);
        let atoms = match obj.get("atoms") {
            None | Some(Value::Null) => Vec::new(),
            Some(a) => config::pair_list(a, &format!("{path}.atoms"))?,
        };
        let density = match obj.get("density") {
            None | Some(Value::Null) => None,
            Some(d) => {
                let p = format!("{path}.density");
                let dobj = config::as_object(d, &p)?;
                Some(PowerDensity {
                    alpha: config::required_number(dobj, "alpha", &p)?,
                    scale: config::optional_number(dobj, "scale", &p)?.unwrap_or(1.0),
                })
            }
        };
        Self::new(atom0, atoms, density).map_err(|e| Error::config(path, e.to_string()))
    }

    pub fn preset(name: &str) -> Result<Self> {
        if name == "hardy" {
            return Ok(Self::hardy());
        }
        if let Some(a) = name.strip_prefix("bergman:") {
            let alpha: f64 = a
                .trim()
                .parse()
                .map_err(|_| Error::InvalidMeasure(format!("bad Bergman exponent `{a}`")))?;
            return Self::bergman(alpha);
        }
        Err(Error::InvalidMeasure(format!(
            "unknown preset `{name}` (known: hardy, bergman:<alpha>)"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightTerm {
    pub coeff: f64,
    pub power: f64,
    pub rate: f64,
}

impl WeightTerm {
    pub fn eval(&self, t: f64) -> f64 {
        self.coeff * t.powf(self.power) * (-self.rate * t).exp()
    }
}

/// Geometric grid `r = 2^{k / per_octave}` for `log2_min ≤ k/per_octave ≤ log2_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub log2_min: f64,
    pub log2_max: f64,
    pub per_octave: u32,
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self {
            log2_min: -20.0,
            log2_max: 40.0,
            per_octave: 4,
        }
    }
}

impl RadialGrid {
    fn points(&self) -> Vec<f64> {
        let steps = ((self.log2_max - self.log2_min) * self.per_octave as f64).round() as i64;
        (0..=steps)
            .map(|k| 2f64.powf(self.log2_min + k as f64 / self.per_octave as f64))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Delta2Report {
    /// `sup ν̃[0,2r)/ν̃[0,r)` over the grid; infinite when the condition fails.
    pub constant: f64,
    pub witness_r: f64,
    /// The supremum sits at a grid end: the true supremum may be larger.
    pub sup_at_grid_edge: bool,
}

pub fn delta2_constant(m: &RadialMeasure, grid: RadialGrid) -> Delta2Report {
    let mut points = grid.points();
    let (lo, hi) = (points[0], points[points.len() - 1]);
    // jumps of the ratio happen just above r_a/2 and r_a
    for &(ra, mass) in &m.atoms {
        if mass > 0.0 {
            for cand in [0.5 * ra * (1.0 + 1e-12), ra * (1.0 + 1e-12)] {
                if cand > lo && cand < hi {
                    points.push(cand);
                }
            }
        }
    }
    points.sort_by(f64::total_cmp);

    let mut best = Delta2Report {
        constant: 0.0,
        witness_r: points[0],
        sup_at_grid_edge: false,
    };
    let mut best_idx = 0;
    for (i, &r) in points.iter().enumerate() {
        let below = m.mass_below(r);
        let doubled = m.mass_below(2.0 * r);
        let ratio = if below > 0.0 {
            doubled / below
        } else if doubled > 0.0 {
            f64::INFINITY
        } else {
            continue;
        };
        if ratio > best.constant {
            best.constant = ratio;
            best.witness_r = r;
            best_idx = i;
        }
        if ratio.is_infinite() {
            break;
        }
    }
    if m.is_zero() {
        best.constant = f64::INFINITY;
    }
    best.sup_at_grid_edge =
        best.constant.is_finite() && best.constant > 1.0 && (best_idx == 0 || best_idx + 1 == points.len());
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightProvenance {
    Hardy,
    Bergman,
    Mixture,
    Quadrature,
}

/// `w(t) = 2π ∫ e^{−2rt} dν̃(r)`, strictly positive and nonincreasing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightFunction {
    measure: RadialMeasure,
    terms: Vec<WeightTerm>,
    provenance: WeightProvenance,
}

impl WeightFunction {
    pub fn provenance(&self) -> WeightProvenance {
        self.provenance
    }

    pub fn terms(&self) -> &[WeightTerm] {
        &self.terms
    }

    pub fn measure(&self) -> &RadialMeasure {
        &self.measure
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self.provenance {
            WeightProvenance::Quadrature => weight_by_quadrature(&self.measure, t).value,
            _ => self.terms.iter().map(|term| term.eval(t)).sum(),
        }
    }

    /// Same weight, but every evaluation goes through adaptive quadrature.
    pub fn quadrature(m: &RadialMeasure) -> Result<Self> {
        let mut w = weight(m)?;
        w.provenance = WeightProvenance::Quadrature;
        Ok(w)
    }
}

pub fn weight(m: &RadialMeasure) -> Result<WeightFunction> {
    let d2 = delta2_constant(m, RadialGrid::default());
    if !d2.constant.is_finite() {
        return Err(Error::Delta2(format!(
            "ν̃[0,2r)/ν̃[0,r) is unbounded near r = {:.3e}",
            d2.witness_r
        )));
    }
    let has_atoms = m.atoms.iter().any(|&(_, mass)| mass > 0.0);
    let has_density = m.density.is_some_and(|d| d.scale > 0.0);
    let provenance = match (m.atom_at_zero > 0.0, has_atoms, has_density) {
        (true, false, false) => WeightProvenance::Hardy,
        (false, false, true) => WeightProvenance::Bergman,
        _ => WeightProvenance::Mixture,
    };
    Ok(WeightFunction {
        measure: m.clone(),
        terms: m.weight_terms(),
        provenance,
    })
}

/// Quadrature evaluation of `w(t)`: atoms exactly, the density on
/// `(0, R_max)` with `e^{−2 R_max t} < 1e−16`.
pub fn weight_by_quadrature(m: &RadialMeasure, t: f64) -> QuadResult {
    let mut value = 2.0 * PI * m.atom_at_zero;
    value += m
        .atoms
        .iter()
        .map(|&(r, mass)| 2.0 * PI * mass * (-2.0 * r * t).exp())
        .sum::<f64>();
    let mut result = QuadResult {
        value,
        error: 0.0,
        converged: true,
    };
    if let Some(d) = m.density.filter(|d| d.scale > 0.0) {
        let r_max = 16.0 * std::f64::consts::LN_10 / (2.0 * t);
        let opts = QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-13,
            max_intervals: 2000,
        };
        let q = quadrature::integrate_power_origin(|r| (-2.0 * r * t).exp(), d.alpha, r_max, opts);
        result.value += 2.0 * PI * d.scale * q.value;
        result.error += 2.0 * PI * d.scale * q.error;
        result.converged &= q.converged;
    }
    result
}

/// `ν(Q_I) = ν̃[0, |I|) · |I|`, counting the boundary mass at `x = 0`.
pub fn nu_square_mass(m: &RadialMeasure, interval_length: f64) -> f64 {
    m.mass_below(interval_length) * interval_length
}

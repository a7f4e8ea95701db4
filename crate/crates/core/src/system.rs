//! Diagonal semigroup systems on ℓ^q and the atomic measures they induce on
//! the closed right half-plane.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config;
use crate::error::{Error, Result};

/// Symbolic origin of a system, so callers can regenerate larger truncations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    Heat1d,
}

/// A diagonal generator with eigenvalues `λ_k`, scalar control coefficients
/// `b_k` and state space ℓ^q, truncated to `K` modes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalSystem {
    eigenvalues: Vec<Complex64>,
    coeffs: Vec<Complex64>,
    q: f64,
    generator: Option<Generator>,
}

impl DiagonalSystem {
    pub fn new(eigenvalues: Vec<Complex64>, coeffs: Vec<Complex64>, q: f64) -> Result<Self> {
        if eigenvalues.len() != coeffs.len() {
            return Err(Error::InvalidSystem(format!(
                "{} eigenvalues but {} coefficients",
                eigenvalues.len(),
                coeffs.len()
            )));
        }
        if !(q >= 1.0) || !q.is_finite() {
            return Err(Error::InvalidSystem(format!("state exponent q = {q} must be >= 1")));
        }
        if let Some((k, l)) = eigenvalues
            .iter()
            .enumerate()
            .find(|(_, l)| !(l.re < 0.0) || !l.im.is_finite())
        {
            return Err(Error::InvalidSystem(format!(
                "eigenvalue {k} = {l} is not in the open left half-plane"
            )));
        }
        if let Some(k) = coeffs.iter().position(|b| !b.re.is_finite() || !b.im.is_finite()) {
            return Err(Error::InvalidSystem(format!("coefficient {k} is not finite")));
        }
        Ok(Self {
            eigenvalues,
            coeffs,
            q,
            generator: None,
        })
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn truncation(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn generator(&self) -> Option<Generator> {
        self.generator
    }

    /// First `k` modes (all of them when `k` exceeds the truncation).
    pub fn prefix(&self, k: usize) -> DiagonalSystem {
        let k = k.min(self.truncation());
        DiagonalSystem {
            eigenvalues: self.eigenvalues[..k].to_vec(),
            coeffs: self.coeffs[..k].to_vec(),
            q: self.q,
            generator: self.generator,
        }
    }

    /// Same spectrum, every coefficient multiplied by `c`.
    pub fn scaled(&self, c: Complex64) -> DiagonalSystem {
        DiagonalSystem {
            coeffs: self.coeffs.iter().map(|b| b * c).collect(),
            ..self.clone()
        }
    }

    /// Parse the system JSON document.
    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(SystemConfig::from_json_str(text)?.system)
    }
}

/// One point mass of an [`AtomicMeasure`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: Complex64,
    pub mass: f64,
}

/// Finite positive measure on the closed right half-plane, stored as atoms in
/// mode order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        for (k, a) in atoms.iter().enumerate() {
            if !(a.location.re >= 0.0) || !a.location.im.is_finite() || !a.location.re.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "atom {k} at {} lies outside the closed right half-plane",
                    a.location
                )));
            }
            if !(a.mass >= 0.0) {
                return Err(Error::InvalidMeasure(format!("atom {k} has mass {}", a.mass)));
            }
        }
        Ok(Self { atoms })
    }

    pub fn from_pairs<I: IntoIterator<Item = (Complex64, f64)>>(pairs: I) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(location, mass)| Atom { location, mass })
                .collect(),
        )
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Total mass; infinite masses propagate.
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn prefix(&self, k: usize) -> AtomicMeasure {
        AtomicMeasure {
            atoms: self.atoms[..k.min(self.atoms.len())].to_vec(),
        }
    }

    /// Reweight every atom by `factor(location)`; masses may become infinite.
    pub fn reweighted<F: Fn(Complex64) -> f64>(&self, factor: F) -> AtomicMeasure {
        AtomicMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    location: a.location,
                    mass: if a.mass == 0.0 { 0.0 } else { a.mass * factor(a.location) },
                })
                .collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> AtomicMeasure {
        self.reweighted(|_| c)
    }

    /// Largest modulus among atoms with positive mass.
    pub(crate) fn real_part_range(&self) -> Option<(f64, f64)> {
        self.atoms.iter().filter(|a| a.mass > 0.0).fold(None, |acc, a| {
            let x = a.location.re;
            Some(match acc {
                None => (x, x),
                Some((lo, hi)) => (f64::min(lo, x), f64::max(hi, x)),
            })
        })
    }
}

/// Opening angle `θ ∈ (0, π/2)` of the sector `S(θ) = {|arg z| < θ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorSpec {
    theta: f64,
}

impl SectorSpec {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < PI / 2.0) {
            return Err(Error::InvalidMeasure(format!(
                "sector angle {theta} must lie in (0, π/2)"
            )));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorCheck {
    pub inside: bool,
    /// Atom with the largest |arg| (or the first atom sitting at the origin).
    pub worst: Option<Atom>,
    /// `None` when the worst atom sits at 0 and its argument is undefined.
    pub worst_arg: Option<f64>,
}

/// Atoms `−λ_k` with masses `|b_k|^q`, in mode order.
pub fn spectral_measure(sys: &DiagonalSystem) -> AtomicMeasure {
    AtomicMeasure {
        atoms: sys
            .eigenvalues
            .iter()
            .zip(&sys.coeffs)
            .map(|(l, b)| Atom {
                location: -l,
                mass: b.norm().powf(sys.q),
            })
            .collect(),
    }
}

/// Eigenvalues `−n²π²`, `b_n = 1`, `q = 2`: the Neumann-boundary-controlled
/// heat equation on `[0, 1]`.
pub fn heat_system(modes: usize) -> Result<DiagonalSystem> {
    if modes == 0 {
        return Err(Error::InvalidSystem("heat1d needs at least one mode".into()));
    }
    let eigenvalues = (1..=modes)
        .map(|n| {
            let n = n as f64;
            Complex64::new(-n * n * PI * PI, 0.0)
        })
        .collect();
    Ok(DiagonalSystem {
        eigenvalues,
        coeffs: vec![Complex64::new(1.0, 0.0); modes],
        q: 2.0,
        generator: Some(Generator::Heat1d),
    })
}

pub fn sector_check(m: &AtomicMeasure, s: SectorSpec) -> SectorCheck {
    let mut worst: Option<(Atom, Option<f64>)> = None;
    for a in m.atoms.iter().filter(|a| a.mass > 0.0) {
        if a.location.norm() == 0.0 {
            return SectorCheck {
                inside: false,
                worst: Some(*a),
                worst_arg: None,
            };
        }
        let arg = a.location.arg().abs();
        if worst.map_or(true, |(_, w)| arg > w.unwrap_or(f64::NEG_INFINITY)) {
            worst = Some((*a, Some(arg)));
        }
    }
    match worst {
        None => SectorCheck {
            inside: true,
            worst: None,
            worst_arg: None,
        },
        Some((atom, arg)) => SectorCheck {
            inside: arg.is_some_and(|x| x < s.theta),
            worst: Some(atom),
            worst_arg: arg,
        },
    }
}

/// Conjugate exponent `q' = q/(q−1)`.
pub fn conjugate_exponent(q: f64) -> Result<f64> {
    if !(q > 1.0) || !q.is_finite() {
        return Err(Error::InvalidSystem(format!(
            "conjugate exponent of q = {q} is not a finite number > 1"
        )));
    }
    Ok(q / (q - 1.0))
}

/// The system whose control-side criteria answer the observation question for
/// `C φ_k = c_k`: same spectrum, coefficients `c_k`, exponent `q'`.
pub fn dual_system(sys: &DiagonalSystem, obs_coeffs: &[Complex64]) -> Result<DiagonalSystem> {
    if obs_coeffs.len() != sys.truncation() {
        return Err(Error::InvalidSystem(format!(
            "{} observation coefficients for {} modes",
            obs_coeffs.len(),
            sys.truncation()
        )));
    }
    let q_dual = conjugate_exponent(sys.q)?;
    let mut dual = DiagonalSystem::new(sys.eigenvalues.clone(), obs_coeffs.to_vec(), q_dual)?;
    dual.generator = sys.generator;
    Ok(dual)
}

/// A parsed system document together with the optional controllability
/// extras (`g`, `beta`).
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub system: DiagonalSystem,
    pub g: Option<Vec<Complex64>>,
    pub beta: Option<f64>,
}

impl SystemConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_value(&config::parse_document(text)?)
    }

    pub fn from_value(doc: &Value) -> Result<Self> {
        let obj = config::as_object(doc, "$")?;
        let system = if let Some(gen) = obj.get("generator") {
            let name = gen
                .as_str()
                .ok_or_else(|| Error::config("$.generator", "expected a string"))?;
            if name != "heat1d" {
                return Err(Error::config(
                    "$.generator",
                    format!("unknown generator `{name}` (known: heat1d)"),
                ));
            }
            let modes = config::required(obj, "modes", "$")?
                .as_u64()
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::config("$.modes", "expected a positive integer"))?;
            heat_system(modes as usize)?
        } else {
            let eig = config::complex_list(config::required(obj, "eigenvalues", "$")?, "$.eigenvalues")?;
            let coeffs = config::complex_list(config::required(obj, "coeffs", "$")?, "$.coeffs")?;
            let q = config::required_number(obj, "q", "$")?;
            DiagonalSystem::new(eig, coeffs, q).map_err(|e| Error::config("$", e.to_string()))?
        };
        let g = match obj.get("g") {
            None | Some(Value::Null) => None,
            Some(v) => {
                let g = config::complex_list(v, "$.g")?;
                if g.len() != system.truncation() {
                    return Err(Error::config(
                        "$.g",
                        format!("expected {} entries, found {}", system.truncation(), g.len()),
                    ));
                }
                Some(g)
            }
        };
        let beta = config::optional_number(obj, "beta", "$")?;
        Ok(Self { system, g, beta })
    }

    /// Replace a generator-backed system with a different truncation.
    pub fn with_modes(mut self, modes: usize) -> Result<Self> {
        if let Some(Generator::Heat1d) = self.system.generator {
            self.system = heat_system(modes)?;
            self.g = None;
        }
        Ok(self)
    }
}

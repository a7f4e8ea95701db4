use std::collections::BTreeMap;

use serde::{Deserialize, Serialize, Serializer};

use crate::geometry::SquarePart;

/// Criterion identities. `Kernel` marks the oracle's kernel sweeps; the
/// last three are the exact-controllability tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CriterionId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
    R1,
    R7,
    #[serde(rename = "kernel")]
    Kernel,
    #[serde(rename = "exact_control")]
    ExactControl,
    #[serde(rename = "interpolation")]
    Interpolation,
    #[serde(rename = "sobolev_control")]
    SobolevControl,
}

impl CriterionId {
    pub fn name(&self) -> &'static str {
        match self {
            CriterionId::C1 => "C1",
            CriterionId::C2 => "C2",
            CriterionId::C3 => "C3",
            CriterionId::C4 => "C4",
            CriterionId::C5 => "C5",
            CriterionId::C6 => "C6",
            CriterionId::C7 => "C7",
            CriterionId::C8 => "C8",
            CriterionId::R1 => "R1",
            CriterionId::R7 => "R7",
            CriterionId::Kernel => "kernel",
            CriterionId::ExactControl => "exact_control",
            CriterionId::Interpolation => "interpolation",
            CriterionId::SobolevControl => "sobolev_control",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let all = [
            CriterionId::C1,
            CriterionId::C2,
            CriterionId::C3,
            CriterionId::C4,
            CriterionId::C5,
            CriterionId::C6,
            CriterionId::C7,
            CriterionId::C8,
            CriterionId::R1,
            CriterionId::R7,
            CriterionId::Kernel,
            CriterionId::ExactControl,
            CriterionId::Interpolation,
            CriterionId::SobolevControl,
        ];
        all.into_iter().find(|c| c.name().eq_ignore_ascii_case(s))
    }
}

impl std::fmt::Display for CriterionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    BoundedEvidence,
    UnboundedEvidence,
    Inconclusive,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::BoundedEvidence => "bounded-evidence",
            Verdict::UnboundedEvidence => "unbounded-evidence",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Where the reported supremum (or the dominant sequence term) was found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Square {
        center_y: f64,
        length: f64,
        part: SquarePart,
    },
    Strip {
        n: i32,
    },
    Lambda {
        re: f64,
        im: f64,
    },
    Scale {
        n: i32,
    },
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Witness::Square {
                center_y,
                length,
                part,
            } => {
                let tag = match part {
                    SquarePart::Full => "Q",
                    SquarePart::RightHalf => "T",
                };
                write!(f, "{tag}(c={center_y:.4e}, |I|={length:.4e})")
            }
            Witness::Strip { n } => write!(f, "S_{n}"),
            Witness::Lambda { re, im } => write!(f, "λ={re:.4e}{im:+.4e}i"),
            Witness::Scale { n } => write!(f, "2^{n}"),
        }
    }
}

/// Serialize a float, writing non-finite values as strings.
pub(crate) fn real<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// A float that serializes like [`real`].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        real(&self.0, s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelConstant {
    pub modes: usize,
    #[serde(serialize_with = "real")]
    pub constant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleValue {
    pub log2_scale: f64,
    #[serde(serialize_with = "real")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Diagnostics {
    /// Constant at each nested truncation level.
    pub levels: Vec<LevelConstant>,
    /// Tested ratio (or sequence term) per scale at the full truncation.
    pub scale_profile: Vec<ScaleValue>,
    /// The supremum sits at an end of the tested grid.
    pub witness_at_grid_edge: bool,
    /// Atoms found within the boundary tolerance of a tested edge.
    pub boundary_hits: usize,
    /// Bound on the constant lost by restricting to the dyadic family.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covering_factor: Option<Real>,
    pub secondary: BTreeMap<String, Real>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub criterion: CriterionId,
    #[serde(serialize_with = "real")]
    pub constant: f64,
    pub witness: Option<Witness>,
    pub verdict: Verdict,
    pub diagnostics: Diagnostics,
}

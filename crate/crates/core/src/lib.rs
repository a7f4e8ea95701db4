//! Weighted admissibility and exact controllability of diagonal semigroup
//! systems through Carleson-type, resolvent-type and balayage-type criteria,
//! with a direct Laplace-embedding oracle for cross-checks.

mod config;
mod parallel;

pub mod controllability;
pub mod criteria;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod quadrature;
pub mod special;
pub mod system;
pub mod zen;

pub use criteria::dispatch::{dispatch, observation_dispatch, DispatchOptions, DispatchOutcome};
pub use criteria::{CriterionId, CriterionOptions, CriterionReport, InputSpace, ScaleGrid, Verdict, Witness};
pub use error::{Error, Result};
pub use system::{heat_system, spectral_measure, AtomicMeasure, DiagonalSystem, SystemConfig};
pub use zen::RadialMeasure;

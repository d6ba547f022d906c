//! Thermodynamics of the Dicke model across all total-spin sectors.

// `!(x > 0.0)` style guards deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod canonical;
pub mod degeneracy;
pub mod diag;
pub mod error;
pub mod micro;
pub mod model;
pub mod numerics;
pub mod scaling;
pub mod sector;
pub mod thermo;

pub use canonical::{CriticalPoint, EpsilonMode, FiniteCanonical, LaplaceState, SpinSpace};
pub use degeneracy::DegeneracyProfile;
pub use diag::{CacheDir, Histogram, SectorBasis, SpectrumCache};
pub use error::{DickeError, Result};
pub use micro::{FullMicro, MicroConfig, MicroPoint};
pub use model::{ModelParams, SectorId};
pub use scaling::{PowerLawFit, Precursor, ScalingReport};
pub use sector::{Branch, JxWeight, SectorCurve, SemiclassicalSector, TurningPoints};
pub use thermo::{Ensemble, ThermoCurve, ThermoPoint};

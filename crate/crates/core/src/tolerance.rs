use serde::{Deserialize, Serialize};

use crate::report::real17;

/// Numerical thresholds shared by the classifiers. Every verdict records the
/// values it was computed with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// A chain value counts as zero below `zero * scale`.
    #[serde(serialize_with = "real17::one")]
    pub zero: f64,
    /// A singular value counts as zero below `rank * sigma_max`.
    #[serde(serialize_with = "real17::one")]
    pub rank: f64,
    /// `lambda(p)` counts as zero below `singular * scale`.
    #[serde(serialize_with = "real17::one")]
    pub singular: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            zero: 1e-7,
            rank: 1e-8,
            singular: 1e-9,
        }
    }
}

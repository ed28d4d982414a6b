pub mod classify;
pub mod cusp;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod tolerance;
pub mod zeroset;

pub use error::{Error, Result};
pub use geometry::{HomogeneousPoint, MapKind, MapSpec};
pub use jet::{Jet, MultiIndex};
pub use scalar::{Field, Scalar};
pub use num_complex::Complex64;
pub use tolerance::Tolerances;

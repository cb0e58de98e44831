//! Exact extended probability: Popper spaces, lexicographic probability
//! systems and nonstandard probability measures valued in `ℝ(ε)`.

pub mod belief;
pub mod countable;
pub mod error;
pub mod exec;
pub mod field;
pub mod fixtures;
pub mod format;
pub mod generate;
pub mod independence;
pub mod linalg;
pub mod lps;
pub mod measure;
pub mod nps;
pub mod popper;
pub mod space;

pub use error::{Error, Result};
pub use exec::Exec;
pub use field::{NonstdNumber, Rational, Scalar};
pub use measure::{Measure, NonstdMeasure, StdMeasure, ValidationReport};
pub use space::{Event, RandomVariable, SpaceAlgebra};

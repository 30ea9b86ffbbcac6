//! Pseudo-pure GHZ states: construction, separability tests and
//! entanglement measures, with dense-matrix cross-checks for small registers.

pub mod cli;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod report;
pub mod separability;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{Bipartition, DensityMatrix, LogBase, PureState};
pub use measures::{measure_report, MeasureReport};
pub use separability::{SeparabilityVerdict, Verdict};
pub use states::{PhaseConvention, PseudoPureParams};

//! Tests of concavity for distribution functions supported on `[0, 1]`.
//!
//! The statistics compare the empirical CDF with its least concave majorant
//! in an L^p norm. Their limits under a concave null are simulated from
//! Wiener paths; the uniform law gives the largest limit, so its quantiles
//! serve as critical values for the whole null.

pub mod error;
pub mod models;
pub mod norm;
pub mod path;
pub mod pwl;
mod quad;
pub mod sim;
pub mod statistics;
pub mod stream;

pub use error::{Error, Result};
pub use models::{AffineInterval, ConcaveCdf, IntervalStructure};
pub use norm::NormIndex;
pub use path::SampledPath;
pub use pwl::{DiffSegments, PiecewiseLinear, StepCdf};
pub use sim::{CriticalValueTable, SimConfig};
pub use statistics::{StatisticKind, StatisticResult};
pub use stream::StreamToken;

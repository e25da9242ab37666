//! Monte Carlo engine for the limiting laws of the concavity statistics.
//!
//! Paths are drawn on finite grids and read as linear interpolants, so every
//! majorant and norm below is exact for the discretized path. Grids used by
//! the pathwise couplings contain every point the coupling needs, which makes
//! those identities hold to rounding rather than in distribution.

mod coupling;
mod draws;
mod operator;
mod quantile;
mod table;
mod wiener;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stream::DEFAULT_SEED;

pub use coupling::{verify_prop1_coupling, verify_thm1_coupling, Prop1Coupling, Thm1Coupling};
pub use draws::{
    derivative_route_norm, limit_draw_derivative_route, limit_draw_general, limit_draw_uniform,
    uniform_norms,
};
pub use operator::{d_norm, d_norms, hull_gap};
pub use quantile::{estimate_quantiles, QuantileEstimate};
pub use table::{
    build_critical_table, entries_sha256, simulate_limit_quantiles, CriticalValue, CriticalValueTable,
    LimitQuantiles, Provenance,
};
pub use wiener::{coupling_grid, sample_wiener, sample_wiener_with, to_bridge, CouplingGrid};

/// Tolerance for the pathwise coupling identities; anything larger is a bug.
pub const COUPLING_TOL: f64 = 1e-9;

/// Resolution and size of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Number of steps `m` of the uniform base grid `{j/m}`.
    pub grid_size: usize,
    pub replications: usize,
    pub master_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            grid_size: 16_384,
            replications: 200_000,
            master_seed: DEFAULT_SEED,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_size < 2 {
            return Err(Error::InvalidConfig(format!(
                "grid_size must be at least 2, got {}",
                self.grid_size
            )));
        }
        if self.replications < 1 {
            return Err(Error::InvalidConfig("replications must be at least 1".into()));
        }
        Ok(())
    }
}

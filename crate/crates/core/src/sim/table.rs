use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::models::ConcaveCdf;
use crate::norm::NormIndex;
use crate::path::uniform_grid;
use crate::stream::StreamToken;

use super::draws::{limit_draw_general, uniform_norms};
use super::quantile::estimate_quantiles;
use super::SimConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValue {
    pub p: NormIndex,
    pub alpha: f64,
    pub q: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub grid_size: usize,
    pub replications: usize,
    pub master_seed: u64,
    pub built_at: String,
}

impl Provenance {
    fn new(config: &SimConfig) -> Self {
        Self {
            grid_size: config.grid_size,
            replications: config.replications,
            master_seed: config.master_seed,
            built_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

/// SHA-256 (hex) of a list of critical values in their JSON form.
pub fn entries_sha256(entries: &[CriticalValue]) -> String {
    let bytes = serde_json::to_vec(entries).expect("entries serialize");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Simulated upper-tail quantiles of `||D W||_p`, the limit of `S_{n,p}`
/// under the uniform law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalValueTable {
    pub entries: Vec<CriticalValue>,
    pub provenance: Provenance,
}

impl CriticalValueTable {
    pub fn lookup(&self, p: NormIndex, alpha: f64) -> Option<&CriticalValue> {
        self.entries
            .iter()
            .find(|e| e.p == p && (e.alpha - alpha).abs() < 1e-12)
    }

    /// SHA-256 of the serialized entries; identifies the numbers a report
    /// relied on independently of when the table was built.
    pub fn entries_sha256(&self) -> String {
        entries_sha256(&self.entries)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Runs `config.replications` uniform-law draws and tabulates quantiles for
/// every `(p, alpha)`. Each replication draws one path from stream
/// `(master_seed, index)` and evaluates all `ps` on it, so the result does
/// not depend on the number of worker threads.
pub fn build_critical_table(
    config: &SimConfig,
    alphas: &[f64],
    ps: &[NormIndex],
) -> Result<CriticalValueTable> {
    config.validate()?;
    if ps.is_empty() || alphas.is_empty() {
        return Err(Error::InvalidConfig("need at least one p and one alpha".into()));
    }
    let grid = uniform_grid(config.grid_size);
    let rows: Vec<Vec<f64>> = (0..config.replications as u64)
        .into_par_iter()
        .map(|r| uniform_norms(&grid, ps, StreamToken::new(config.master_seed, r)))
        .collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(ps.len() * alphas.len());
    for (col, &p) in ps.iter().enumerate() {
        let draws: Vec<f64> = rows.iter().map(|r| r[col]).collect();
        for est in estimate_quantiles(&draws, alphas)? {
            entries.push(CriticalValue { p, alpha: est.alpha, q: est.q, se: est.se });
        }
    }
    Ok(CriticalValueTable { entries, provenance: Provenance::new(config) })
}

/// Quantiles of the limit law of `S_{n,p}` for a concave `F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitQuantiles {
    pub cdf: ConcaveCdf,
    pub p: NormIndex,
    pub quantiles: Vec<CriticalValue>,
    pub provenance: Provenance,
}

/// Simulates the limit for a general concave law from independent
/// per-interval Wiener processes and estimates its quantiles.
pub fn simulate_limit_quantiles(
    cdf: &ConcaveCdf,
    p: NormIndex,
    config: &SimConfig,
    alphas: &[f64],
) -> Result<LimitQuantiles> {
    config.validate()?;
    let iv = cdf.extract_intervals();
    let draws: Vec<f64> = (0..config.replications as u64)
        .into_par_iter()
        .map(|r| limit_draw_general(&iv, p, config.grid_size, StreamToken::new(config.master_seed, r)))
        .collect::<Result<_>>()?;
    let quantiles = estimate_quantiles(&draws, alphas)?
        .into_iter()
        .map(|e| CriticalValue { p, alpha: e.alpha, q: e.q, se: e.se })
        .collect();
    Ok(LimitQuantiles {
        cdf: cdf.clone(),
        p,
        quantiles,
        provenance: Provenance::new(config),
    })
}

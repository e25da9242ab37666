use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileEstimate {
    pub alpha: f64,
    /// Estimated `(1 - alpha)`-quantile.
    pub q: f64,
    /// Half the width of the order-statistic bracket `N q +- sqrt(N q (1-q))`.
    pub se: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// Upper-tail quantiles: the `ceil((1 - alpha) N)`-th smallest draw.
pub fn estimate_quantiles(draws: &[f64], alphas: &[f64]) -> Result<Vec<QuantileEstimate>> {
    if draws.is_empty() {
        return Err(Error::EmptyDraws);
    }
    for &a in alphas {
        check_alpha(a)?;
    }
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let nf = n as f64;
    let at = |rank: f64| -> f64 {
        // rank is 1-based
        let r = (rank.max(1.0) as usize).min(n);
        sorted[r - 1]
    };
    Ok(alphas
        .iter()
        .map(|&alpha| {
            let level = 1.0 - alpha;
            // Guard against 0.9 * 10 = 9.000000000000002.
            let rank = (level * nf - 1e-9).ceil();
            let half = (nf * level * alpha).sqrt();
            let lo = at((level * nf - half).floor());
            let hi = at((level * nf + half).ceil());
            QuantileEstimate {
                alpha,
                q: at(rank),
                se: 0.5 * (hi - lo),
            }
        })
        .collect())
}

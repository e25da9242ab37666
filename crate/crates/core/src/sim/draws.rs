use crate::error::{Error, Result};
use crate::models::{ConcaveCdf, IntervalStructure};
use crate::norm::NormIndex;
use crate::path::{uniform_grid, SampledPath};
use crate::stream::StreamToken;

use super::operator::{d_norm, d_norms, hull_gap};
use super::wiener::{coupling_grid, sample_wiener_with, to_bridge};
use super::SimConfig;

/// `||D W||_p` for each index in `ps`, from one Wiener path on `grid`.
pub fn uniform_norms(grid: &[f64], ps: &[NormIndex], stream: StreamToken) -> Result<Vec<f64>> {
    let w = sample_wiener_with(grid.to_vec(), &mut stream.rng());
    d_norms(&w, ps)
}

/// One draw of the limit under the uniform law, `||D W||_p`, on the base
/// grid `{j/m}`.
pub fn limit_draw_uniform(config: &SimConfig, p: NormIndex, stream: StreamToken) -> Result<f64> {
    config.validate()?;
    let grid = uniform_grid(config.grid_size);
    Ok(uniform_norms(&grid, &[p], stream)?[0])
}

fn is_unit_interval(iv: &IntervalStructure) -> bool {
    matches!(iv.intervals(), [k] if k.a == 0.0 && k.b == 1.0 && k.d == 1.0 && k.h == 1.0)
}

/// One draw of `(sum_k d_k h_k^(p/2) ||D W_k||_p^p)^(1/p)` with independent
/// Wiener processes `W_k`, each on the grid `{j/m}`.
///
/// Strictly concave laws (no affine intervals) have a degenerate limit at 0.
/// For `p = inf` only the uniform law and the degenerate case are handled.
pub fn limit_draw_general(
    iv: &IntervalStructure,
    p: NormIndex,
    grid_size: usize,
    stream: StreamToken,
) -> Result<f64> {
    if iv.is_empty() {
        return Ok(0.0);
    }
    if grid_size < 2 {
        return Err(Error::InvalidConfig("grid_size must be at least 2".into()));
    }
    let grid = uniform_grid(grid_size);
    let mut rng = stream.rng();
    let pf = match p {
        NormIndex::Infinity if is_unit_interval(iv) => {
            let w = sample_wiener_with(grid, &mut rng);
            return d_norm(&w, p);
        }
        NormIndex::Infinity => {
            return Err(Error::Unsupported(
                "p = inf limit draws are only available for the uniform law".into(),
            ))
        }
        NormIndex::Finite(pf) => pf,
    };
    if let [k] = iv.intervals() {
        let w = sample_wiener_with(grid, &mut rng);
        return Ok(k.d.powf(1.0 / pf) * k.h.sqrt() * d_norm(&w, p)?);
    }
    let mut acc = 0.0;
    for k in iv.intervals() {
        let w = sample_wiener_with(grid.clone(), &mut rng);
        let gap = hull_gap(w.grid(), w.values())?;
        acc += k.d * k.h.powf(pf / 2.0) * gap.power_integral(pf);
    }
    Ok(acc.powf(1.0 / pf))
}

/// `||M'_F B_F - B_F||_p` for a piecewise-affine `F` with the given knots,
/// where `B_F = B o F` and `B` is the bridge of `w`.
///
/// The directional derivative of the majorant at `F` acts as the majorant
/// over each affine piece `[a_k, b_k]` and as the identity elsewhere, so the
/// norm collects the per-piece gaps. `spans[k]` is the index range of
/// `[F(a_k), F(b_k)]` in the grid of `w`.
pub fn derivative_route_norm(
    knots: &[(f64, f64)],
    p: NormIndex,
    w: &SampledPath,
    spans: &[(usize, usize)],
) -> Result<f64> {
    if spans.len() + 1 != knots.len() {
        return Err(Error::InvalidConfig(format!(
            "{} affine pieces but {} grid spans",
            knots.len() - 1,
            spans.len()
        )));
    }
    let b = to_bridge(w)?;
    let (t, bv) = (b.grid(), b.values());
    let mut acc = 0.0;
    for (piece, &(i, j)) in knots.windows(2).zip(spans) {
        let (a, d) = (piece[0].0, piece[1].0 - piece[0].0);
        let (t0, t1) = (t[i], t[j]);
        // Abscissas x = F^{-1}(t) on this piece.
        let xs: Vec<f64> = t[i..=j].iter().map(|&s| a + d * ((s - t0) / (t1 - t0))).collect();
        let gap = hull_gap(&xs, &bv[i..=j])?;
        match p {
            NormIndex::Infinity => acc = f64::max(acc, gap.sup()),
            NormIndex::Finite(pf) => acc += gap.power_integral(pf),
        }
    }
    Ok(match p {
        NormIndex::Infinity => acc,
        NormIndex::Finite(pf) => acc.powf(1.0 / pf),
    })
}

/// One draw of the limit of `S_{n,p}` under a piecewise-affine concave law,
/// computed through the directional derivative of the majorant.
///
/// `W` lives on the grid `{F(a_k) + h_k j/m}` merged with `{j/m}`.
pub fn limit_draw_derivative_route(
    cdf: &ConcaveCdf,
    p: NormIndex,
    grid_size: usize,
    stream: StreamToken,
) -> Result<f64> {
    let knots = cdf.affine_knots().ok_or_else(|| {
        Error::Unsupported(
            "the derivative route needs a piecewise-affine law; strictly concave laws have a \
             degenerate limit"
                .into(),
        )
    })?;
    let blocks = affine_blocks(&knots);
    let cg = coupling_grid(grid_size, &blocks)?;
    let w = sample_wiener_with(cg.grid, &mut stream.rng());
    derivative_route_norm(&knots, p, &w, &cg.spans)
}

/// `(F(a_k), h_k)` for each affine piece.
pub(super) fn affine_blocks(knots: &[(f64, f64)]) -> Vec<(f64, f64)> {
    knots.windows(2).map(|w| (w[0].1, w[1].1 - w[0].1)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_and_error_cases() {
        let power = ConcaveCdf::power(0.5).unwrap();
        let iv = power.extract_intervals();
        for p in [NormIndex::Finite(1.0), NormIndex::Finite(2.0), NormIndex::Infinity] {
            assert_eq!(limit_draw_general(&iv, p, 64, StreamToken::new(0, 0)).unwrap(), 0.0);
        }
        assert!(matches!(
            limit_draw_derivative_route(&power, NormIndex::Finite(2.0), 64, StreamToken::new(0, 0)),
            Err(Error::Unsupported(_))
        ));
        let two = ConcaveCdf::piecewise(&[(0.0, 0.0), (0.5, 0.75), (1.0, 1.0)]).unwrap();
        assert!(limit_draw_general(&two.extract_intervals(), NormIndex::Infinity, 64, StreamToken::new(0, 0)).is_err());
    }

    #[test]
    fn uniform_routes_agree_bitwise() {
        let cfg = SimConfig { grid_size: 256, replications: 1, master_seed: 5 };
        let iv = ConcaveCdf::Uniform.extract_intervals();
        for s in 0..20 {
            let tok = StreamToken::new(5, s);
            for p in [NormIndex::Finite(1.0), NormIndex::Finite(2.0), NormIndex::Finite(3.0), NormIndex::Infinity] {
                let u = limit_draw_uniform(&cfg, p, tok).unwrap();
                assert!(u >= 0.0);
                assert_eq!(limit_draw_general(&iv, p, 256, tok).unwrap(), u);
                assert_eq!(limit_draw_derivative_route(&ConcaveCdf::Uniform, p, 256, tok).unwrap(), u);
            }
        }
    }
}

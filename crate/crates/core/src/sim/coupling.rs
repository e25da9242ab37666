//! Pathwise checks of the two couplings behind the limit theory: the
//! representation of the limit through independent per-interval Wiener
//! processes, and the packing argument showing the uniform law dominates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{l_weights, pack_intervals, ConcaveCdf, IntervalStructure};
use crate::norm::NormIndex;
use crate::pwl::{lcm_of_path, MAJORIZATION_TOL};
use crate::stream::StreamToken;

use super::draws::{affine_blocks, derivative_route_norm};
use super::operator::{d_norm, hull_gap};
use super::wiener::{coupling_grid, sample_wiener_with};
use super::COUPLING_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prop1Coupling {
    /// Derivative-route norm `||M'_F B_F - B_F||_p`.
    pub lhs: f64,
    /// `(sum_k d_k h_k^(p/2) ||D W_k||_p^p)^(1/p)` with the `W_k` rescaled
    /// from the same path.
    pub rhs: f64,
    pub gap: f64,
}

impl Prop1Coupling {
    pub fn holds(&self) -> bool {
        self.gap < COUPLING_TOL
    }
}

/// Evaluates both sides of the per-interval representation on one Wiener
/// path, with `W_k(u) = h_k^(-1/2) (W(F(a_k) + h_k u) - W(F(a_k)))`.
pub fn verify_prop1_coupling(
    cdf: &ConcaveCdf,
    p: NormIndex,
    grid_size: usize,
    stream: StreamToken,
) -> Result<Prop1Coupling> {
    let pf = p.finite("the per-interval representation")?;
    let knots = cdf.affine_knots().ok_or_else(|| {
        Error::Unsupported("the coupling needs a piecewise-affine law".into())
    })?;
    let blocks = affine_blocks(&knots);
    let cg = coupling_grid(grid_size, &blocks)?;
    let w = sample_wiener_with(cg.grid, &mut stream.rng());
    let lhs = derivative_route_norm(&knots, p, &w, &cg.spans)?;

    let (t, wv) = (w.grid(), w.values());
    let mut acc = 0.0;
    for (piece, &(i, j)) in knots.windows(2).zip(&cg.spans) {
        let d = piece[1].0 - piece[0].0;
        let h = piece[1].1 - piece[0].1;
        let (t0, t1) = (t[i], t[j]);
        let scale = 1.0 / h.sqrt();
        let u: Vec<f64> = t[i..=j].iter().map(|&s| (s - t0) / (t1 - t0)).collect();
        let wk: Vec<f64> = wv[i..=j].iter().map(|&v| scale * (v - wv[i])).collect();
        acc += d * h.powf(pf / 2.0) * hull_gap(&u, &wk)?.power_integral(pf);
    }
    let rhs = acc.powf(1.0 / pf);
    Ok(Prop1Coupling { lhs, rhs, gap: (lhs - rhs).abs() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thm1Coupling {
    /// `(sum_k l_k^((p+2)/2) ||D W_k||_p^p)^(1/p)` with `W_k` carved out of
    /// the packed intervals of one path.
    pub lhs: f64,
    /// `||D W||_p` for the same path.
    pub rhs: f64,
    /// `lhs > rhs + COUPLING_TOL`.
    pub violation: bool,
    /// Grid points where the majorant over a packed interval exceeds the
    /// majorant over `[0, 1]`.
    pub hull_violations: usize,
    pub max_hull_excess: f64,
}

/// Evaluates the dominance coupling on one Wiener path: intervals of length
/// `l_k` are packed into `[0, 1]`, `W_k(u) = l_k^(-1/2) (W(a*_k + l_k u) -
/// W(a*_k))`, and the weighted per-interval norms must not exceed `||D W||_p`.
pub fn verify_thm1_coupling(
    iv: &IntervalStructure,
    p: NormIndex,
    grid_size: usize,
    stream: StreamToken,
) -> Result<Thm1Coupling> {
    let pf = p.finite("the dominance coupling")?;
    if iv.is_empty() {
        return Err(Error::Unsupported(
            "no affine intervals: the limit is degenerate and there is nothing to couple".into(),
        ));
    }
    let lengths = l_weights(iv, p)?;
    let packed = pack_intervals(&lengths)?;
    let blocks: Vec<(f64, f64)> = packed.iter().zip(&lengths).map(|(&(a, _), &l)| (a, l)).collect();
    let cg = coupling_grid(grid_size, &blocks)?;
    let w = sample_wiener_with(cg.grid, &mut stream.rng());
    let rhs = d_norm(&w, p)?;

    let (t, wv) = (w.grid(), w.values());
    let full = lcm_of_path(&w, t[0], *t.last().unwrap())?;
    let mut acc = 0.0;
    let mut hull_violations = 0;
    let mut max_hull_excess = f64::NEG_INFINITY;
    for (&l, &(i, j)) in lengths.iter().zip(&cg.spans) {
        let (t0, t1) = (t[i], t[j]);
        let scale = 1.0 / l.sqrt();
        let u: Vec<f64> = t[i..=j].iter().map(|&s| (s - t0) / (t1 - t0)).collect();
        let wk: Vec<f64> = wv[i..=j].iter().map(|&v| scale * (v - wv[i])).collect();
        acc += l.powf((pf + 2.0) / 2.0) * hull_gap(&u, &wk)?.power_integral(pf);

        let local = lcm_of_path(&w, t0, t1)?;
        for &s in &t[i..=j] {
            let excess = local.eval(s) - full.eval(s);
            max_hull_excess = max_hull_excess.max(excess);
            if excess > MAJORIZATION_TOL {
                hull_violations += 1;
            }
        }
    }
    let lhs = acc.powf(1.0 / pf);
    Ok(Thm1Coupling {
        lhs,
        rhs,
        violation: lhs > rhs + COUPLING_TOL,
        hull_violations,
        max_hull_excess,
    })
}

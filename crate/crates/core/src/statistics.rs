//! Finite-sample concavity statistics built from the empirical CDF and its
//! least concave majorant.
//!
//! * `S = sqrt(n) ||M F_n - F_n||_p` with Lebesgue measure on `[0, 1]`,
//! * `R` integrates the same gap against a given `dF`,
//! * `T` integrates it against the empirical measure `dF_n`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::models::ConcaveCdf;
use crate::norm::NormIndex;
use crate::pwl::{self, mean_power, DiffSegments, PiecewiseLinear, StepCdf};
use crate::quad;

/// Absolute tolerance for the quadrature behind power-law weights.
pub const R_QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StatisticKind {
    S,
    R,
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatisticResult {
    pub kind: StatisticKind,
    pub value: f64,
    pub n: usize,
    pub p: NormIndex,
}

/// The empirical CDF, its majorant on `[0, 1]` and their difference.
pub struct EcdfGap {
    pub ecdf: StepCdf,
    pub majorant: PiecewiseLinear,
    pub gap: DiffSegments,
}

impl EcdfGap {
    pub fn new(samples: &[f64]) -> Result<Self> {
        let ecdf = pwl::build_ecdf(samples)?;
        let majorant = pwl::lcm_of_step(&ecdf);
        let gap = pwl::diff_segments(&majorant, &ecdf, 0.0, 1.0)?;
        Ok(Self { ecdf, majorant, gap })
    }
}

pub fn s_statistic(samples: &[f64], p: NormIndex) -> Result<StatisticResult> {
    let g = EcdfGap::new(samples)?;
    let n = samples.len();
    Ok(StatisticResult {
        kind: StatisticKind::S,
        value: (n as f64).sqrt() * pwl::lp_norm(&g.gap, p),
        n,
        p,
    })
}

/// `sqrt(n) (int (M F_n - F_n)^p dF)^(1/p)` for a concave weight `F`.
///
/// Exact for uniform and piecewise-affine weights; power-law weights are
/// integrated numerically after substituting `t = u^gamma`, which removes the
/// density's singularity at 0.
pub fn r_statistic(samples: &[f64], p: NormIndex, weight: &ConcaveCdf) -> Result<StatisticResult> {
    let pf = p.finite("the dF-weighted statistic")?;
    let g = EcdfGap::new(samples)?;
    let n = samples.len();
    let integral = weighted_power_integral(&g.gap, pf, weight);
    Ok(StatisticResult {
        kind: StatisticKind::R,
        value: (n as f64).sqrt() * integral.powf(1.0 / pf),
        n,
        p,
    })
}

fn weighted_power_integral(gap: &DiffSegments, p: f64, weight: &ConcaveCdf) -> f64 {
    match weight {
        ConcaveCdf::Power(pl) if pl.gamma() < 1.0 => {
            let gamma = pl.gamma();
            let inv = 1.0 / gamma;
            let segs = gap.segments();
            let tol = R_QUAD_TOL / segs.len().max(1) as f64;
            segs.iter()
                .filter(|s| s.lo > 0.0 || s.hi > 0.0)
                .map(|s| {
                    let (t0, t1) = (s.x_lo.powf(gamma), s.x_hi.powf(gamma));
                    let integrand = |t: f64| {
                        let u = t.powf(inv).clamp(s.x_lo, s.x_hi);
                        s.value_at(u).max(0.0).powf(p)
                    };
                    quad::integrate(&integrand, t0, t1, tol)
                })
                .sum()
        }
        _ => {
            // Piecewise-constant density: split each gap segment at the
            // weight's knots and integrate exactly.
            let knots = weight
                .affine_knots()
                .expect("non-power concave CDFs are piecewise affine");
            let mut total = 0.0;
            for s in gap.segments() {
                for w in knots.windows(2) {
                    let (a, b) = (w[0].0.max(s.x_lo), w[1].0.min(s.x_hi));
                    if a >= b {
                        continue;
                    }
                    let density = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                    total += density * (b - a) * mean_power(s.value_at(a), s.value_at(b), p);
                }
            }
            total
        }
    }
}

/// `sqrt(n) ((1/n) sum_i (M F_n(X_i) - F_n(X_i))^p)^(1/p)`, with `F_n`
/// taken right-continuously at each observation.
pub fn t_statistic(samples: &[f64], p: NormIndex) -> Result<StatisticResult> {
    let pf = p.finite("the dF_n-weighted statistic")?;
    let g = EcdfGap::new(samples)?;
    let n = samples.len();
    let nf = n as f64;
    let mut prev = 0.0;
    let mut sum = 0.0;
    for (x, v) in g.ecdf.jumps() {
        let mass = v - prev;
        prev = v;
        let diff = (g.majorant.eval(x) - v).max(0.0);
        sum += mass * diff.powf(pf);
    }
    Ok(StatisticResult {
        kind: StatisticKind::T,
        value: nf.sqrt() * sum.powf(1.0 / pf),
        n,
        p,
    })
}

/// One sample of the two-point probability-integral-transform example.
#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleCase {
    pub sample: Vec<f64>,
    /// `S_{2,2}` from the closed-form integral.
    pub value: f64,
    pub squared: f64,
    /// `squared` as an exact fraction, when it has a small denominator.
    pub squared_fraction: Option<String>,
    /// Pointwise adaptive quadrature of the same integral.
    pub quadrature_check: f64,
    /// Two-decimal value reported in the literature for this sample.
    pub reported: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub statistic: String,
    pub cases: Vec<CounterexampleCase>,
    pub note: String,
}

/// `S_{2,2}(0.25, 1)` and `S_{2,2}(0.5, 1)`, the second being the first
/// sample after the transform by `F(u) = sqrt(u)`.
pub fn counterexample() -> CounterexampleReport {
    let p = NormIndex::Finite(2.0);
    let cases: Vec<CounterexampleCase> = [(vec![0.25, 1.0], 0.37), (vec![0.5, 1.0], 0.29)]
        .into_iter()
        .map(|(sample, reported)| {
            let value = s_statistic(&sample, p).expect("fixed valid sample").value;
            let squared = value * value;
            CounterexampleCase {
                squared_fraction: as_fraction(squared, 10_000).map(|(a, b)| format!("{a}/{b}")),
                quadrature_check: pointwise_quadrature_s(&sample, 2.0),
                sample,
                value,
                squared,
                reported,
            }
        })
        .collect();
    let note = format!(
        "Exact integration gives S_2,2 = {:.6} for both samples (both gaps integrate to 1/12), \
         so the transform leaves the statistic unchanged here; the reported 0.37 and 0.29 are \
         not reproduced by sqrt(n) times the unweighted L2 norm on [0, 1].",
        cases[0].value
    );
    CounterexampleReport {
        statistic: "S_{n,p} with n = 2, p = 2".into(),
        cases,
        note,
    }
}

/// `S_{n,p}` by adaptive quadrature of the pointwise gap, split at jumps.
fn pointwise_quadrature_s(samples: &[f64], p: f64) -> f64 {
    let g = EcdfGap::new(samples).expect("valid sample");
    let mut cuts: Vec<f64> = vec![0.0];
    cuts.extend(g.ecdf.abscissas().iter().chain(g.majorant.xs()).copied());
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let total: f64 = cuts
        .windows(2)
        .map(|w| {
            // The ECDF jumps at the right end of a piece; use its left limit there.
            let f = |x: f64| {
                let fx = if x >= w[1] { g.ecdf.left_limit(w[1]) } else { g.ecdf.eval(x) };
                (g.majorant.eval(x) - fx).max(0.0).powf(p)
            };
            quad::integrate(&f, w[0], w[1], 1e-14)
        })
        .sum();
    (samples.len() as f64).sqrt() * total.powf(1.0 / p)
}

/// Best rational approximation with denominator at most `max_den`, if it
/// matches `x` to rounding.
fn as_fraction(x: f64, max_den: i64) -> Option<(i64, i64)> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        let ai = a as i64;
        let (h2, k2) = (ai.checked_mul(h1)? + h0, ai.checked_mul(k1)? + k0);
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if ((h1 as f64) / (k1 as f64) - x).abs() <= 1e-13 * x.abs().max(1.0) {
            return Some((h1, k1));
        }
        let frac = r - a;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

//! Step functions, piecewise-linear functions and their least concave
//! majorants.
//!
//! Everything here is exact up to floating-point rounding: majorants are upper
//! convex hulls of finitely many corner points, and the gap between a
//! majorant and the function below it is affine between consecutive
//! breakpoints, so its L^p norms have closed forms.

use crate::error::{Error, Result};
use crate::norm::NormIndex;
use crate::path::SampledPath;

/// Absolute slack allowed when checking that a majorant lies above its
/// function. Anything larger is a bug in the hull, not rounding.
pub const MAJORIZATION_TOL: f64 = 1e-12;

/// A right-continuous nondecreasing step function on `[0, inf)` that is `0`
/// before its first jump and `1` from its last jump on.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCdf {
    xs: Vec<f64>,
    vs: Vec<f64>,
}

impl StepCdf {
    /// Builds a step function from `(abscissa, post-jump value)` pairs.
    pub fn from_jumps(jumps: &[(f64, f64)]) -> Result<Self> {
        if jumps.is_empty() {
            return Err(Error::InvalidStep("no jumps".into()));
        }
        let (xs, vs): (Vec<f64>, Vec<f64>) = jumps.iter().copied().unzip();
        if xs.iter().chain(&vs).any(|v| !v.is_finite()) {
            return Err(Error::InvalidStep("non-finite jump".into()));
        }
        if xs[0] < 0.0 || vs[0] <= 0.0 {
            return Err(Error::InvalidStep(
                "first jump must have abscissa >= 0 and a positive value".into(),
            ));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidStep("abscissas not strictly increasing".into()));
        }
        if vs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidStep("values not strictly increasing".into()));
        }
        if *vs.last().unwrap() != 1.0 {
            return Err(Error::InvalidStep("final value must be exactly 1".into()));
        }
        Ok(Self { xs, vs })
    }

    pub fn jumps(&self) -> impl ExactSizeIterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.vs.iter().copied())
    }

    pub fn abscissas(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.vs
    }

    /// Right-continuous value at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        match self.xs.partition_point(|&a| a <= x) {
            0 => 0.0,
            i => self.vs[i - 1],
        }
    }

    /// Limit from the left at `x`.
    pub fn left_limit(&self, x: f64) -> f64 {
        match self.xs.partition_point(|&a| a < x) {
            0 => 0.0,
            i => self.vs[i - 1],
        }
    }

    /// Right-continuous values at every point of a sorted slice.
    fn eval_sorted(&self, at: &[f64]) -> Vec<f64> {
        let mut i = 0;
        at.iter()
            .map(|&x| {
                while i < self.xs.len() && self.xs[i] <= x {
                    i += 1;
                }
                if i == 0 {
                    0.0
                } else {
                    self.vs[i - 1]
                }
            })
            .collect()
    }
}

/// Empirical distribution function of a sample from `[0, 1]`.
///
/// Tied observations merge into a single jump of size multiplicity / n.
pub fn build_ecdf(samples: &[f64]) -> Result<StepCdf> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some((index, &value)) = samples
        .iter()
        .enumerate()
        .find(|(_, v)| !(0.0..=1.0).contains(*v))
    {
        return Err(Error::OutOfUnitInterval { index, value });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let nf = n as f64;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (i, &x) in sorted.iter().enumerate() {
        if i + 1 < n && sorted[i + 1] == x {
            continue;
        }
        xs.push(x);
        // i + 1 == n on the last point, so the final value is exactly 1.
        vs.push((i + 1) as f64 / nf);
    }
    Ok(StepCdf { xs, vs })
}

/// A continuous piecewise-linear function on `[x_0, x_last]`, given by its
/// knots.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(knots: &[(f64, f64)]) -> Result<Self> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = knots.iter().copied().unzip();
        Self::from_parts(xs, ys)
    }

    pub fn from_parts(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidKnots("abscissa and ordinate counts differ".into()));
        }
        if xs.len() < 2 {
            return Err(Error::InvalidKnots("need at least two knots".into()));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidKnots("non-finite knot".into()));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidKnots("abscissas not strictly increasing".into()));
        }
        Ok(Self { xs, ys })
    }

    /// Upper concave hull of the points `(xs[i], ys[i])`, with collinear
    /// interior points dropped. `xs` must be strictly increasing.
    pub fn upper_hull(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::InvalidKnots("need at least two points of equal length".into()));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidKnots("abscissas not strictly increasing".into()));
        }
        let idx = upper_hull_indices(xs, ys);
        Ok(Self {
            xs: idx.iter().map(|&i| xs[i]).collect(),
            ys: idx.iter().map(|&i| ys[i]).collect(),
        })
    }

    pub fn knots(&self) -> impl ExactSizeIterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn slopes(&self) -> Vec<f64> {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect()
    }

    /// Strictly decreasing slopes: concave with no redundant knots.
    pub fn is_concave(&self) -> bool {
        self.slopes().windows(2).all(|s| s[0] > s[1])
    }

    /// Value at `x`, extended as a constant outside the knot range.
    pub fn eval(&self, x: f64) -> f64 {
        let k = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[k - 1] {
            return self.ys[k - 1];
        }
        let i = self.xs.partition_point(|&a| a <= x);
        self.interpolate(i - 1, x)
    }

    fn interpolate(&self, i: usize, x: f64) -> f64 {
        if x == self.xs[i] {
            return self.ys[i];
        }
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        y0 + (y1 - y0) * ((x - x0) / (x1 - x0))
    }

    fn eval_sorted(&self, at: &[f64]) -> Vec<f64> {
        let k = self.xs.len();
        let mut i = 0;
        at.iter()
            .map(|&x| {
                if x <= self.xs[0] {
                    return self.ys[0];
                }
                if x >= self.xs[k - 1] {
                    return self.ys[k - 1];
                }
                while self.xs[i + 1] <= x {
                    i += 1;
                }
                self.interpolate(i, x)
            })
            .collect()
    }
}

/// Indices of the upper-hull vertices of a point set sorted by abscissa
/// (Andrew's monotone chain, upper half). Collinear points are dropped.
pub(crate) fn upper_hull_indices(xs: &[f64], ys: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(xs.len().min(64));
    for c in 0..xs.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // b survives only if it lies strictly above the chord from a to c.
            let cross = (xs[b] - xs[a]) * (ys[c] - ys[a]) - (ys[b] - ys[a]) * (xs[c] - xs[a]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(c);
    }
    hull
}

/// Least concave majorant of a step CDF, restricted to `[0, 1]`.
///
/// Any concave majorant must dominate every post-jump corner, so the
/// majorant is the upper hull of `(0, 0)`, the corners, and `(1, 1)`.
pub fn lcm_of_step(f: &StepCdf) -> PiecewiseLinear {
    let mut xs = Vec::with_capacity(f.xs.len() + 2);
    let mut ys = Vec::with_capacity(f.xs.len() + 2);
    if f.xs[0] > 0.0 {
        xs.push(0.0);
        ys.push(0.0);
    }
    xs.extend_from_slice(&f.xs);
    ys.extend_from_slice(&f.vs);
    if *f.xs.last().unwrap() < 1.0 {
        xs.push(1.0);
        ys.push(1.0);
    }
    let idx = upper_hull_indices(&xs, &ys);
    PiecewiseLinear {
        xs: idx.iter().map(|&i| xs[i]).collect(),
        ys: idx.iter().map(|&i| ys[i]).collect(),
    }
}

/// Least concave majorant over `[lo, hi]` of the linear interpolant of a
/// sampled path. Both ends must be grid points.
pub fn lcm_of_path(path: &SampledPath, lo: f64, hi: f64) -> Result<PiecewiseLinear> {
    let i = path.index_of(lo)?;
    let j = path.index_of(hi)?;
    if i >= j {
        return Err(Error::InvalidPath(format!("empty domain [{lo}, {hi}]")));
    }
    let xs = &path.grid()[i..=j];
    let ys = &path.values()[i..=j];
    let idx = upper_hull_indices(xs, ys);
    Ok(PiecewiseLinear {
        xs: idx.iter().map(|&k| xs[k]).collect(),
        ys: idx.iter().map(|&k| ys[k]).collect(),
    })
}

/// The function a majorant is compared against.
#[derive(Debug, Clone, Copy)]
pub enum Minorant<'a> {
    Step(&'a StepCdf),
    Linear(&'a PiecewiseLinear),
}

impl<'a> From<&'a StepCdf> for Minorant<'a> {
    fn from(f: &'a StepCdf) -> Self {
        Minorant::Step(f)
    }
}

impl<'a> From<&'a PiecewiseLinear> for Minorant<'a> {
    fn from(f: &'a PiecewiseLinear) -> Self {
        Minorant::Linear(f)
    }
}

/// On `[x_lo, x_hi]` the difference is affine, running from `lo` to `hi`.
///
/// Endpoint values are stored instead of intercept and slope; integrating
/// from them avoids cancellation on short segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffSegment {
    pub x_lo: f64,
    pub x_hi: f64,
    pub lo: f64,
    pub hi: f64,
}

impl DiffSegment {
    pub fn slope(&self) -> f64 {
        (self.hi - self.lo) / (self.x_hi - self.x_lo)
    }

    /// Intercept of the affine form `intercept + slope * x`.
    pub fn intercept(&self) -> f64 {
        self.lo - self.slope() * self.x_lo
    }

    pub fn value_at(&self, x: f64) -> f64 {
        if x == self.x_lo {
            self.lo
        } else if x == self.x_hi {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * ((x - self.x_lo) / (self.x_hi - self.x_lo))
        }
    }

    pub fn len(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    /// `int (difference)^p` over the segment.
    pub fn power_integral(&self, p: f64) -> f64 {
        self.len() * mean_power(self.lo, self.hi, p)
    }
}

/// The nonnegative gap between a majorant and a function, as contiguous
/// affine pieces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiffSegments {
    segments: Vec<DiffSegment>,
}

impl DiffSegments {
    pub fn segments(&self) -> &[DiffSegment] {
        &self.segments
    }

    pub fn domain(&self) -> Option<(f64, f64)> {
        Some((self.segments.first()?.x_lo, self.segments.last()?.x_hi))
    }

    /// Largest difference, approached at some segment endpoint.
    pub fn sup(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.lo.max(s.hi))
            .fold(0.0, f64::max)
    }

    /// `int (difference)^p` over the whole domain, for finite `p >= 1`.
    pub fn power_integral(&self, p: f64) -> f64 {
        debug_assert!(p >= 1.0);
        self.segments.iter().map(|s| s.power_integral(p)).sum()
    }
}

/// `int_0^1 (a + (b - a) t)^p dt` for `a, b >= 0`.
pub(crate) fn mean_power(a: f64, b: f64, p: f64) -> f64 {
    if p == 1.0 {
        return 0.5 * (a + b);
    }
    if p == 2.0 {
        return (a * a + a * b + b * b) / 3.0;
    }
    let mid = 0.5 * (a + b);
    if mid == 0.0 {
        return 0.0;
    }
    let r = 0.5 * (b - a) / mid;
    if r.abs() < 1e-3 {
        // Even Taylor series in the half-width; the closed form below would
        // cancel catastrophically here.
        let r2 = r * r;
        let c2 = p * (p - 1.0) / 6.0;
        let c4 = c2 * (p - 2.0) * (p - 3.0) / 20.0;
        let c6 = c4 * (p - 4.0) * (p - 5.0) / 42.0;
        return mid.powf(p) * (1.0 + r2 * (c2 + r2 * (c4 + r2 * c6)));
    }
    (b.powf(p + 1.0) - a.powf(p + 1.0)) / ((p + 1.0) * (b - a))
}

/// Merges the breakpoints of two sorted slices falling strictly inside
/// `(lo, hi)`, bracketed by `lo` and `hi`.
fn merge_breakpoints(a: &[f64], b: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let a = &a[a.partition_point(|&x| x <= lo)..a.partition_point(|&x| x < hi)];
    let b = &b[b.partition_point(|&x| x <= lo)..b.partition_point(|&x| x < hi)];
    let mut out = Vec::with_capacity(a.len() + b.len() + 2);
    out.push(lo);
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = if j >= b.len() || (i < a.len() && a[i] <= b[j]) {
            i += 1;
            a[i - 1]
        } else {
            j += 1;
            b[j - 1]
        };
        if next > *out.last().unwrap() {
            out.push(next);
        }
    }
    out.push(hi);
    out
}

/// Splits `m - f` on `[lo, hi]` into affine pieces.
///
/// Breakpoints are the union of the majorant's knots and the function's
/// jumps or knots. For a step function the right end of each piece uses the
/// left limit, so the pieces describe the difference on half-open intervals.
pub fn diff_segments<'a>(
    m: &PiecewiseLinear,
    f: impl Into<Minorant<'a>>,
    lo: f64,
    hi: f64,
) -> Result<DiffSegments> {
    let f = f.into();
    if !(lo < hi) {
        return Err(Error::InvalidKnots(format!("empty domain [{lo}, {hi}]")));
    }
    let (m_lo, m_hi) = m.domain();
    if lo < m_lo || hi > m_hi {
        return Err(Error::InvalidKnots(format!(
            "domain [{lo}, {hi}] exceeds the majorant's span [{m_lo}, {m_hi}]"
        )));
    }
    let f_breaks: &[f64] = match f {
        Minorant::Step(s) => &s.xs,
        Minorant::Linear(g) => {
            let (g_lo, g_hi) = g.domain();
            if lo < g_lo || hi > g_hi {
                return Err(Error::InvalidKnots(format!(
                    "domain [{lo}, {hi}] exceeds the function's span [{g_lo}, {g_hi}]"
                )));
            }
            &g.xs
        }
    };
    let bps = merge_breakpoints(&m.xs, f_breaks, lo, hi);
    let mv = m.eval_sorted(&bps);
    // f_right[i]: value at bps[i]; f_left[i]: value approaching bps[i + 1].
    let (f_right, f_left): (Vec<f64>, Vec<f64>) = match f {
        Minorant::Step(s) => {
            let r = s.eval_sorted(&bps);
            let l = r[..r.len() - 1].to_vec();
            (r, l)
        }
        Minorant::Linear(g) => {
            let r = g.eval_sorted(&bps);
            let l = r[1..].to_vec();
            (r, l)
        }
    };
    let check = |x: f64, gap: f64| -> Result<f64> {
        if gap < -MAJORIZATION_TOL {
            Err(Error::MajorizationViolated { x, gap: -gap })
        } else {
            Ok(gap.max(0.0))
        }
    };
    let mut segments = Vec::with_capacity(bps.len() - 1);
    for i in 0..bps.len() - 1 {
        segments.push(DiffSegment {
            x_lo: bps[i],
            x_hi: bps[i + 1],
            lo: check(bps[i], mv[i] - f_right[i])?,
            hi: check(bps[i + 1], mv[i + 1] - f_left[i])?,
        });
    }
    Ok(DiffSegments { segments })
}

/// L^p norm of a difference: closed-form integration for finite `p`, the
/// largest breakpoint value for `p = inf`.
pub fn lp_norm(d: &DiffSegments, p: NormIndex) -> f64 {
    match p {
        NormIndex::Infinity => d.sup(),
        NormIndex::Finite(p) => d.power_integral(p).powf(1.0 / p),
    }
}

//! Concave distribution functions on `[0, 1]`, the maximal intervals on which
//! they are affine, and sampling from them.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm::NormIndex;
use crate::stream::StreamToken;

/// Relative slope difference below which adjacent segments are merged.
const SLOPE_MERGE_TOL: f64 = 1e-12;

/// Slack allowed when packed interval lengths are checked against 1.
pub const PACKING_TOL: f64 = 1e-12;

/// A concave distribution function with `F(0) = 0` and support in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CdfRepr", into = "CdfRepr")]
pub enum ConcaveCdf {
    Uniform,
    /// `F(u) = u^gamma`, `0 < gamma <= 1`.
    Power(PowerLaw),
    Piecewise(PiecewiseAffine),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    gamma: f64,
}

impl PowerLaw {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidCdf(format!(
                "power exponent must lie in (0, 1], got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Concave piecewise-affine CDF from `(0, 0)` to `(x_bar, 1)`, equal to 1
/// beyond `x_bar`. Stored with strictly decreasing slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseAffine {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PiecewiseAffine {
    pub fn new(knots: &[(f64, f64)]) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidCdf(msg));
        if knots.len() < 2 {
            return bad("need at least two knots".into());
        }
        if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return bad("non-finite knot".into());
        }
        if knots[0] != (0.0, 0.0) {
            return bad(format!("first knot must be (0, 0), got {:?}", knots[0]));
        }
        let (x_bar, y_last) = *knots.last().unwrap();
        if y_last != 1.0 {
            return bad(format!("last knot must have ordinate 1, got {y_last}"));
        }
        if x_bar > 1.0 {
            return bad(format!("support must end by 1, last knot is at {x_bar}"));
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return bad("abscissas must be strictly increasing".into());
            }
            if w[1].1 <= w[0].1 {
                return bad("ordinates must be strictly increasing".into());
            }
        }
        let slope = |a: (f64, f64), b: (f64, f64)| (b.1 - a.1) / (b.0 - a.0);
        let mut kept: Vec<(f64, f64)> = vec![knots[0]];
        for i in 1..knots.len() {
            let k = knots[i];
            if i + 1 < knots.len() {
                let s_in = slope(*kept.last().unwrap(), k);
                let s_out = slope(k, knots[i + 1]);
                if s_out > s_in * (1.0 + SLOPE_MERGE_TOL) {
                    return bad(format!(
                        "slope increases at x = {} ({s_in} to {s_out}); not concave",
                        k.0
                    ));
                }
                if (s_in - s_out).abs() <= SLOPE_MERGE_TOL * s_in {
                    continue;
                }
            }
            kept.push(k);
        }
        let (xs, ys) = kept.into_iter().unzip();
        Ok(Self { xs, ys })
    }

    pub fn knots(&self) -> impl ExactSizeIterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn x_bar(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= self.x_bar() {
            return 1.0;
        }
        let i = self.xs.partition_point(|&a| a <= x) - 1;
        let (x0, x1, y0, y1) = (self.xs[i], self.xs[i + 1], self.ys[i], self.ys[i + 1]);
        y0 + (y1 - y0) * ((x - x0) / (x1 - x0))
    }

    fn quantile(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return self.x_bar();
        }
        let i = self.ys.partition_point(|&a| a <= u) - 1;
        let (x0, x1, y0, y1) = (self.xs[i], self.xs[i + 1], self.ys[i], self.ys[i + 1]);
        x0 + (x1 - x0) * ((u - y0) / (y1 - y0))
    }
}

/// One maximal open interval `(a, b)` on which the CDF is affine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineInterval {
    pub a: f64,
    pub b: f64,
    /// Depth `b - a`.
    pub d: f64,
    /// Height `F(b) - F(a)`.
    pub h: f64,
}

/// The maximal affine intervals of a concave CDF, plus the right end of its
/// support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalStructure {
    intervals: Vec<AffineInterval>,
    x_bar: f64,
}

impl IntervalStructure {
    pub fn new(intervals: Vec<AffineInterval>, x_bar: f64) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidCdf(msg));
        if !(x_bar > 0.0 && x_bar <= 1.0) {
            return bad(format!("x_bar must lie in (0, 1], got {x_bar}"));
        }
        for iv in &intervals {
            if !(iv.a >= 0.0 && iv.b <= x_bar && iv.a < iv.b && iv.h > 0.0) {
                return bad(format!("invalid interval {iv:?}"));
            }
            if (iv.d - (iv.b - iv.a)).abs() > 1e-12 {
                return bad(format!("depth of {iv:?} is not b - a"));
            }
        }
        let mut sorted = intervals.clone();
        sorted.sort_by(|l, r| l.a.total_cmp(&r.a));
        if sorted.windows(2).any(|w| w[1].a < w[0].b) {
            return bad("intervals overlap".into());
        }
        let total_h: f64 = intervals.iter().map(|iv| iv.h).sum();
        if total_h > 1.0 + PACKING_TOL {
            return bad(format!("heights sum to {total_h} > 1"));
        }
        Ok(Self { intervals, x_bar })
    }

    pub fn intervals(&self) -> &[AffineInterval] {
        &self.intervals
    }

    pub fn x_bar(&self) -> f64 {
        self.x_bar
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

impl ConcaveCdf {
    pub fn power(gamma: f64) -> Result<Self> {
        Ok(ConcaveCdf::Power(PowerLaw::new(gamma)?))
    }

    pub fn piecewise(knots: &[(f64, f64)]) -> Result<Self> {
        Ok(ConcaveCdf::Piecewise(PiecewiseAffine::new(knots)?))
    }

    /// Right end of the support, `inf{x > 0 : F(x) = 1}`.
    pub fn x_bar(&self) -> f64 {
        match self {
            ConcaveCdf::Uniform | ConcaveCdf::Power(_) => 1.0,
            ConcaveCdf::Piecewise(pw) => pw.x_bar(),
        }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            ConcaveCdf::Uniform => x.min(1.0),
            ConcaveCdf::Power(pl) => x.min(1.0).powf(pl.gamma),
            ConcaveCdf::Piecewise(pw) => pw.eval(x),
        }
    }

    /// Left-continuous inverse on `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self {
            ConcaveCdf::Uniform => u,
            ConcaveCdf::Power(pl) => u.powf(1.0 / pl.gamma),
            ConcaveCdf::Piecewise(pw) => pw.quantile(u),
        }
    }

    /// Knots when the CDF is affine on every piece of `[0, x_bar]`; `None`
    /// for strictly concave members.
    pub fn affine_knots(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            ConcaveCdf::Uniform => Some(vec![(0.0, 0.0), (1.0, 1.0)]),
            ConcaveCdf::Power(pl) if pl.gamma == 1.0 => Some(vec![(0.0, 0.0), (1.0, 1.0)]),
            ConcaveCdf::Power(_) => None,
            ConcaveCdf::Piecewise(pw) => Some(pw.knots().collect()),
        }
    }

    /// The maximal open subintervals of `(0, x_bar)` on which `F` is affine.
    pub fn extract_intervals(&self) -> IntervalStructure {
        let intervals = match self.affine_knots() {
            None => Vec::new(),
            Some(knots) => knots
                .windows(2)
                .map(|w| AffineInterval {
                    a: w[0].0,
                    b: w[1].0,
                    d: w[1].0 - w[0].0,
                    h: w[1].1 - w[0].1,
                })
                .collect(),
        };
        IntervalStructure {
            intervals,
            x_bar: self.x_bar(),
        }
    }

    /// `count` i.i.d. draws by inversion, deterministic in `stream`.
    pub fn sample(&self, count: usize, stream: StreamToken) -> Vec<f64> {
        let mut rng = stream.rng();
        (0..count)
            .map(|_| self.quantile(rng.random::<f64>()))
            .collect()
    }

    /// Probability-integral transform `X_i -> F(X_i)`.
    pub fn pit_transform(&self, samples: &[f64]) -> Vec<f64> {
        samples.iter().map(|&x| self.evaluate(x)).collect()
    }
}

/// Interval lengths `d^(2/(p+2)) h^(p/(p+2))` used to pack the per-interval
/// Wiener processes into the unit interval. By the weighted AM-GM inequality
/// they sum to at most 1.
pub fn l_weights(iv: &IntervalStructure, p: NormIndex) -> Result<Vec<f64>> {
    let p = p.finite("interval packing weights")?;
    let wd = 2.0 / (p + 2.0);
    let wh = p / (p + 2.0);
    Ok(iv
        .intervals
        .iter()
        .map(|k| {
            if k.d == k.h {
                k.d
            } else {
                k.d.powf(wd) * k.h.powf(wh)
            }
        })
        .collect())
}

/// Lays intervals of the given lengths end to end from 0, in order.
pub fn pack_intervals(lengths: &[f64]) -> Result<Vec<(f64, f64)>> {
    let total: f64 = lengths.iter().sum();
    if total > 1.0 + PACKING_TOL {
        return Err(Error::PackingOverflow(total));
    }
    if let Some(l) = lengths.iter().find(|l| !(**l > 0.0)) {
        return Err(Error::InvalidCdf(format!("interval length {l} is not positive")));
    }
    let mut a = 0.0;
    Ok(lengths
        .iter()
        .map(|&l| {
            let b = a + l;
            let out = (a, b);
            a = b;
            out
        })
        .collect())
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum CdfRepr {
    Uniform,
    Power { gamma: f64 },
    Piecewise { knots: Vec<[f64; 2]> },
}

impl TryFrom<CdfRepr> for ConcaveCdf {
    type Error = Error;

    fn try_from(r: CdfRepr) -> Result<Self> {
        match r {
            CdfRepr::Uniform => Ok(ConcaveCdf::Uniform),
            CdfRepr::Power { gamma } => ConcaveCdf::power(gamma),
            CdfRepr::Piecewise { knots } => {
                let k: Vec<(f64, f64)> = knots.into_iter().map(|[x, y]| (x, y)).collect();
                ConcaveCdf::piecewise(&k)
            }
        }
    }
}

impl From<ConcaveCdf> for CdfRepr {
    fn from(c: ConcaveCdf) -> Self {
        match c {
            ConcaveCdf::Uniform => CdfRepr::Uniform,
            ConcaveCdf::Power(pl) => CdfRepr::Power { gamma: pl.gamma },
            ConcaveCdf::Piecewise(pw) => CdfRepr::Piecewise {
                knots: pw.knots().map(|(x, y)| [x, y]).collect(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_segment() -> ConcaveCdf {
        ConcaveCdf::piecewise(&[(0.0, 0.0), (0.5, 0.75), (1.0, 1.0)]).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(ConcaveCdf::Uniform.evaluate(0.3), 0.3);
        assert_eq!(ConcaveCdf::power(0.5).unwrap().evaluate(0.25), 0.5);
        assert_eq!(two_segment().evaluate(0.25), 0.375);
        assert_eq!(two_segment().evaluate(1.7), 1.0);
        let short = ConcaveCdf::piecewise(&[(0.0, 0.0), (0.4, 0.6), (0.8, 1.0)]).unwrap();
        assert_eq!(short.evaluate(0.9), 1.0);
        assert_eq!(short.x_bar(), 0.8);
    }

    #[test]
    fn validation() {
        assert!(ConcaveCdf::power(0.0).is_err());
        assert!(ConcaveCdf::power(1.5).is_err());
        // Slope increases from 0.5 to 1.5.
        assert!(ConcaveCdf::piecewise(&[(0.0, 0.0), (0.5, 0.25), (1.0, 1.0)]).is_err());
        assert!(ConcaveCdf::piecewise(&[(0.1, 0.0), (1.0, 1.0)]).is_err());
        assert!(ConcaveCdf::piecewise(&[(0.0, 0.0), (1.2, 1.0)]).is_err());
        assert!(ConcaveCdf::piecewise(&[(0.0, 0.0), (0.5, 0.9)]).is_err());
        assert!(ConcaveCdf::piecewise(&[(0.0, 0.0), (0.5, 1.0), (0.8, 1.0)]).is_err());
    }

    #[test]
    fn collinear_knots_merge() {
        let c = ConcaveCdf::piecewise(&[(0.0, 0.0), (0.25, 0.25), (0.5, 0.5), (1.0, 1.0)]).unwrap();
        assert_eq!(c.affine_knots().unwrap(), vec![(0.0, 0.0), (1.0, 1.0)]);
    }

    #[test]
    fn interval_examples() {
        let u = ConcaveCdf::Uniform.extract_intervals();
        assert_eq!(u.intervals(), &[AffineInterval { a: 0.0, b: 1.0, d: 1.0, h: 1.0 }]);
        assert_eq!(u.x_bar(), 1.0);
        let p = ConcaveCdf::power(0.5).unwrap().extract_intervals();
        assert!(p.is_empty());
        assert_eq!(p.x_bar(), 1.0);
        let t = two_segment().extract_intervals();
        assert_eq!(
            t.intervals(),
            &[
                AffineInterval { a: 0.0, b: 0.5, d: 0.5, h: 0.75 },
                AffineInterval { a: 0.5, b: 1.0, d: 0.5, h: 0.25 },
            ]
        );
    }

    #[test]
    fn interval_structure_validation() {
        let iv = |a: f64, b: f64, h: f64| AffineInterval { a, b, d: b - a, h };
        assert!(IntervalStructure::new(vec![iv(0.0, 0.5, 0.5), iv(0.4, 0.9, 0.2)], 1.0).is_err());
        assert!(IntervalStructure::new(vec![iv(0.0, 0.5, 0.7), iv(0.5, 0.9, 0.4)], 1.0).is_err());
        assert!(IntervalStructure::new(vec![iv(0.0, 0.9, 0.5)], 0.8).is_err());
        assert!(IntervalStructure::new(vec![iv(0.0, 0.5, 0.5)], 1.0).is_ok());
    }

    #[test]
    fn l_weight_examples() {
        let w = l_weights(&two_segment().extract_intervals(), NormIndex::Finite(2.0)).unwrap();
        assert!((w[0] - 0.375f64.sqrt()).abs() < 1e-15);
        assert!((w[1] - 0.125f64.sqrt()).abs() < 1e-15);
        assert!((w[0] + w[1] - 0.965_925_826_289_068_3).abs() < 1e-12);

        let uni = ConcaveCdf::Uniform.extract_intervals();
        for p in [1.0, 2.0, 3.5] {
            assert_eq!(l_weights(&uni, NormIndex::Finite(p)).unwrap(), vec![1.0]);
        }
        let half = IntervalStructure::new(
            vec![AffineInterval { a: 0.0, b: 0.5, d: 0.5, h: 0.5 }],
            1.0,
        )
        .unwrap();
        assert_eq!(l_weights(&half, NormIndex::Finite(2.0)).unwrap(), vec![0.5]);
        assert!(matches!(
            l_weights(&uni, NormIndex::Infinity),
            Err(Error::InfiniteNorm(_))
        ));
    }

    #[test]
    fn pack_examples() {
        let packed = pack_intervals(&[0.6, 0.3]).unwrap();
        assert_eq!(packed[0], (0.0, 0.6));
        assert_eq!(packed[1].0, 0.6);
        assert!((packed[1].1 - 0.9).abs() < 1e-15);
        assert_eq!(pack_intervals(&[1.0]).unwrap(), vec![(0.0, 1.0)]);
        let packed = pack_intervals(&[0.612372, 0.353553]).unwrap();
        assert_eq!(packed[0], (0.0, 0.612372));
        assert_eq!(packed[1].0, 0.612372);
        assert!((packed[1].1 - 0.965925).abs() < 1e-12);
        assert!(matches!(pack_intervals(&[0.7, 0.4]), Err(Error::PackingOverflow(_))));
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(ConcaveCdf::Uniform.quantile(0.42), 0.42);
        assert_eq!(ConcaveCdf::power(0.5).unwrap().quantile(0.5), 0.25);
        assert_eq!(two_segment().quantile(0.75), 0.5);
    }

    #[test]
    fn pit_examples() {
        let p = ConcaveCdf::power(0.5).unwrap();
        assert_eq!(p.pit_transform(&[0.25, 1.0]), vec![0.5, 1.0]);
        let xs = vec![0.1, 0.77, 0.0, 1.0];
        assert_eq!(ConcaveCdf::Uniform.pit_transform(&xs), xs);
        assert_eq!(two_segment().pit_transform(&[0.5]), vec![0.75]);
    }

    #[test]
    fn pit_of_samples_is_uniform() {
        for cdf in [ConcaveCdf::Uniform, ConcaveCdf::power(0.3).unwrap(), two_segment()] {
            let n = 100_000;
            let mut u = cdf.pit_transform(&cdf.sample(n, StreamToken::new(11, 0)));
            u.sort_by(f64::total_cmp);
            let ks = u
                .iter()
                .enumerate()
                .map(|(i, &v)| ((i + 1) as f64 / n as f64 - v).max(v - i as f64 / n as f64))
                .fold(0.0, f64::max);
            // Kolmogorov 0.999 quantile is 1.949 / sqrt(n).
            assert!(ks < 1.949 / (n as f64).sqrt(), "{cdf:?}: KS = {ks}");
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let c = two_segment();
        assert_eq!(c.sample(5, StreamToken::new(1, 2)), c.sample(5, StreamToken::new(1, 2)));
        assert_ne!(c.sample(5, StreamToken::new(1, 2)), c.sample(5, StreamToken::new(1, 3)));
    }

    #[test]
    fn json_format() {
        let c: ConcaveCdf = serde_json::from_str(r#"{"type":"uniform"}"#).unwrap();
        assert_eq!(c, ConcaveCdf::Uniform);
        let c: ConcaveCdf = serde_json::from_str(r#"{"type":"power","gamma":0.5}"#).unwrap();
        assert_eq!(c, ConcaveCdf::power(0.5).unwrap());
        let c: ConcaveCdf =
            serde_json::from_str(r#"{"type":"piecewise","knots":[[0,0],[0.5,0.75],[1,1]]}"#).unwrap();
        assert_eq!(c, two_segment());
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            r#"{"type":"piecewise","knots":[[0.0,0.0],[0.5,0.75],[1.0,1.0]]}"#
        );
        assert!(serde_json::from_str::<ConcaveCdf>(r#"{"type":"power","gamma":2}"#).is_err());
        assert!(serde_json::from_str::<ConcaveCdf>(
            r#"{"type":"piecewise","knots":[[0,0],[0.5,0.25],[1,1]]}"#
        )
        .is_err());
    }
}

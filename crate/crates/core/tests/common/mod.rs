//! Independent oracles shared by the integration and acceptance tests. None
//! of these call into the hull or norm code they are used to check.
#![allow(dead_code)]

use rand::Rng;

/// Upper-hull value at each point by brute force: the largest chord value
/// over all bracketing pairs (the point itself included).
pub fn hull_values(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    (0..n)
        .map(|i| {
            let mut best = ys[i];
            for j in 0..i {
                for k in i + 1..n {
                    let t = (xs[i] - xs[j]) / (xs[k] - xs[j]);
                    best = best.max(ys[j] + t * (ys[k] - ys[j]));
                }
            }
            best
        })
        .collect()
}

/// Indices that are hull vertices: endpoints, plus every point lying
/// strictly above all chords that bracket it.
pub fn hull_vertices(xs: &[f64], ys: &[f64]) -> Vec<usize> {
    let n = xs.len();
    (0..n)
        .filter(|&i| {
            if i == 0 || i == n - 1 {
                return true;
            }
            (0..i).all(|j| {
                (i + 1..n).all(|k| {
                    // ys[i] strictly above the chord j-k, compared without division.
                    (ys[i] - ys[j]) * (xs[k] - xs[j]) > (ys[k] - ys[j]) * (xs[i] - xs[j])
                })
            })
        })
        .collect()
}

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

fn gl5(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
    GL5_NODES
        .iter()
        .zip(GL5_WEIGHTS)
        .map(|(&t, w)| w * f(c + r * t))
        .sum::<f64>()
        * r
}

fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (l, r) = (gl5(f, a, m), gl5(f, m, b));
    if depth == 0 || (l + r - whole).abs() <= tol.max(1e-14 * (l + r).abs()) {
        return l + r;
    }
    adaptive(f, a, m, l, 0.5 * tol, depth - 1) + adaptive(f, m, b, r, 0.5 * tol, depth - 1)
}

/// Adaptive 5-point Gauss-Legendre on `[a, b]`, starting from 16 panels.
pub fn gauss(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let h = (b - a) / 16.0;
    (0..16)
        .map(|k| {
            let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            adaptive(&f, lo, hi, gl5(&f, lo, hi), tol / 16.0, 20)
        })
        .sum()
}

/// `int_lo^hi g(x)^p dx` split at `cuts` (kinks or jumps of `g`), with the
/// integrand only ever evaluated in the interior of each piece.
pub fn piecewise_power_integral(g: impl Fn(f64) -> f64, cuts: &[f64], p: f64) -> f64 {
    let mut c = cuts.to_vec();
    c.sort_by(f64::total_cmp);
    c.dedup();
    c.windows(2)
        .map(|w| gauss(|x| g(x).max(0.0).powf(p), w[0], w[1], 1e-15))
        .sum()
}

/// Right-continuous ECDF straight from the sample.
pub fn ecdf_at(sorted: &[f64], x: f64) -> f64 {
    sorted.iter().filter(|&&s| s <= x).count() as f64 / sorted.len() as f64
}

/// Random sample from `[0, 1]` with occasional ties.
pub fn random_sample<R: Rng>(rng: &mut R, max_len: usize) -> Vec<f64> {
    let n = rng.random_range(1..=max_len);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    if n > 2 && rng.random_bool(0.3) {
        v[1] = v[0];
    }
    v
}

/// Random concave piecewise-affine CDF knots: decreasing positive slopes.
pub fn random_concave_knots<R: Rng>(rng: &mut R) -> Vec<(f64, f64)> {
    let pieces = rng.random_range(1..=5);
    let x_bar = if rng.random_bool(0.5) { 1.0 } else { rng.random_range(0.3..1.0) };
    let mut cuts: Vec<f64> = (0..pieces - 1).map(|_| rng.random_range(0.0..x_bar)).collect();
    cuts.sort_by(f64::total_cmp);
    let mut xs = vec![0.0];
    xs.extend(cuts);
    xs.push(x_bar);
    xs.dedup();
    let mut slopes: Vec<f64> = (0..xs.len() - 1).map(|_| rng.random_range(0.1..5.0)).collect();
    slopes.sort_by(|a, b| b.total_cmp(a));
    let mut ys = vec![0.0];
    for (w, s) in xs.windows(2).zip(&slopes) {
        let last = *ys.last().unwrap();
        ys.push(last + s * (w[1] - w[0]));
    }
    let total = *ys.last().unwrap();
    let mut knots: Vec<(f64, f64)> = xs.into_iter().zip(ys.into_iter().map(|y| y / total)).collect();
    knots.last_mut().unwrap().1 = 1.0;
    knots
}

/// Linear interpolation through `(xs, ys)`, `x` inside the span.
pub fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let k = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
    let t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    ys[k - 1] + t * (ys[k] - ys[k - 1])
}

/// Random step CDF on `(0, 1]` with up to `max_jumps` jumps.
pub fn random_jumps<R: Rng>(rng: &mut R, max_jumps: usize) -> Vec<(f64, f64)> {
    let k = rng.random_range(1..=max_jumps);
    let mut xs: Vec<f64> = (0..k).map(|_| rng.random_range(1e-6..1.0)).collect();
    if rng.random_bool(0.2) {
        xs[0] = 1.0;
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let incs: Vec<f64> = (0..xs.len()).map(|_| rng.random_range(0.01..1.0)).collect();
    let total: f64 = incs.iter().sum();
    let mut acc = 0.0;
    let mut out: Vec<(f64, f64)> = xs
        .into_iter()
        .zip(incs)
        .map(|(x, d)| {
            acc += d;
            (x, acc / total)
        })
        .collect();
    out.last_mut().unwrap().1 = 1.0;
    out
}

/// Checks one random step function: the majorant against the brute-force
/// hull, and its L^p gap against quadrature.
pub fn check_step_oracle<R: Rng>(rng: &mut R) -> Result<f64, String> {
    use concave_lcm::pwl::{diff_segments, lcm_of_step, lp_norm};
    use concave_lcm::{NormIndex, StepCdf};

    let jumps = random_jumps(rng, 50);
    let f = StepCdf::from_jumps(&jumps).map_err(|e| e.to_string())?;
    let m = lcm_of_step(&f);

    let mut px = vec![0.0];
    let mut py = vec![0.0];
    for &(x, y) in &jumps {
        px.push(x);
        py.push(y);
    }
    if px[px.len() - 1] < 1.0 {
        px.push(1.0);
        py.push(1.0);
    }
    let verts = hull_vertices(&px, &py);
    let vx: Vec<f64> = verts.iter().map(|&i| px[i]).collect();
    let vy: Vec<f64> = verts.iter().map(|&i| py[i]).collect();
    if m.xs() != vx.as_slice() || m.ys() != vy.as_slice() {
        return Err(format!("vertex sets differ: {:?} vs {:?}", m.xs(), vx));
    }
    let hv = hull_values(&px, &py);
    for (i, (&x, &h)) in px.iter().zip(&hv).enumerate() {
        let got = m.eval(x);
        if (got - h).abs() > 4.0 * f64::EPSILON {
            return Err(format!("hull value at point {i} ({x}): {got} vs oracle {h}"));
        }
    }

    let gap = diff_segments(&m, &f, 0.0, 1.0).map_err(|e| e.to_string())?;
    let g = |x: f64| interp(&vx, &vy, x) - ecdf_from_jumps(&jumps, x);
    let mut worst: f64 = 0.0;
    for p in [1.0, 2.0, 2.5, 3.0] {
        let got = lp_norm(&gap, NormIndex::Finite(p));
        let want = piecewise_power_integral(g, &px, p).powf(1.0 / p);
        let rel = (got - want).abs() / want.max(f64::MIN_POSITIVE);
        if rel > 1e-8 {
            return Err(format!("p = {p}: lp_norm {got} vs quadrature {want} (rel {rel:e})"));
        }
        worst = worst.max(rel);
    }
    Ok(worst)
}

pub fn ecdf_from_jumps(jumps: &[(f64, f64)], x: f64) -> f64 {
    jumps.iter().take_while(|j| j.0 <= x).last().map_or(0.0, |j| j.1)
}

/// Random path on a random strictly increasing grid starting at 0, with
/// heavy-tailed increments.
pub fn random_path<R: Rng>(rng: &mut R, max_len: usize) -> (Vec<f64>, Vec<f64>) {
    let n = rng.random_range(2..=max_len);
    let mut grid = vec![0.0];
    let mut vals = vec![rng.random_range(-1.0..1.0)];
    for _ in 1..n {
        let step: f64 = rng.random_range(1e-4..1.0);
        grid.push(grid.last().unwrap() + step);
        let z: f64 = rng.random_range(-1.0..1.0);
        vals.push(vals.last().unwrap() + z * z * z * 3.0);
    }
    let span = *grid.last().unwrap();
    for g in &mut grid {
        *g /= span;
    }
    *grid.last_mut().unwrap() = 1.0;
    (grid, vals)
}

/// Raw (non-canonicalized) hull gap at each grid point.
pub fn raw_gap(grid: &[f64], vals: &[f64]) -> Vec<f64> {
    use concave_lcm::pwl::lcm_of_path;
    use concave_lcm::SampledPath;
    let path = SampledPath::new(grid.to_vec(), vals.to_vec()).unwrap();
    let hull = lcm_of_path(&path, grid[0], *grid.last().unwrap()).unwrap();
    grid.iter().zip(vals).map(|(&x, &y)| hull.eval(x) - y).collect()
}

/// `M(theta + a) - (theta + a)` against `M theta - theta` at every grid
/// point, for a random affine `a`. Returns the largest discrepancy.
pub fn check_affine_shift<R: Rng>(rng: &mut R) -> f64 {
    let (grid, vals) = random_path(rng, 200);
    let (a, b) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
    let shifted: Vec<f64> = grid.iter().zip(&vals).map(|(&x, &y)| y + a + b * x).collect();
    let g0 = raw_gap(&grid, &vals);
    let g1 = raw_gap(&grid, &shifted);
    g0.iter().zip(&g1).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
}

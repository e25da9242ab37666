use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::path::SampledPath;
use crate::stream::StreamToken;

/// Grid points closer than this are treated as one point.
const MERGE_TOL: f64 = 1e-12;

/// Wiener path on `grid` from independent Gaussian increments.
pub fn sample_wiener(grid: Vec<f64>, stream: StreamToken) -> Result<SampledPath> {
    if grid.first() != Some(&0.0) {
        return Err(Error::InvalidPath("Wiener grid must start at 0".into()));
    }
    let values = vec![0.0; grid.len()];
    // Validates ordering and length.
    SampledPath::new(grid.clone(), values)?;
    Ok(sample_wiener_with(grid, &mut stream.rng()))
}

/// As [`sample_wiener`], drawing from an existing generator. `grid` must be
/// valid and start at 0.
pub fn sample_wiener_with<R: Rng + ?Sized>(grid: Vec<f64>, rng: &mut R) -> SampledPath {
    let mut values = Vec::with_capacity(grid.len());
    let mut w = 0.0;
    values.push(w);
    for pair in grid.windows(2) {
        let z: f64 = rng.sample(StandardNormal);
        w += (pair[1] - pair[0]).sqrt() * z;
        values.push(w);
    }
    SampledPath::from_parts_unchecked(grid, values)
}

/// Brownian bridge `B(u) = W(u) - u W(1)` on a grid spanning `[0, 1]`.
pub fn to_bridge(w: &SampledPath) -> Result<SampledPath> {
    let g = w.grid();
    if g[0] != 0.0 || *g.last().unwrap() != 1.0 {
        return Err(Error::InvalidPath("bridge needs a grid spanning [0, 1]".into()));
    }
    let w1 = *w.values().last().unwrap();
    let values = g
        .iter()
        .zip(w.values())
        .map(|(&t, &v)| v - t * w1)
        .collect();
    Ok(SampledPath::from_parts_unchecked(g.to_vec(), values))
}

/// A grid on `[0, 1]` containing `start + len * j/m` for every requested
/// block, plus the base points `j/m`.
#[derive(Debug, Clone)]
pub struct CouplingGrid {
    pub grid: Vec<f64>,
    /// Index range `(first, last)` of each block in `grid`.
    pub spans: Vec<(usize, usize)>,
}

pub fn coupling_grid(m: usize, blocks: &[(f64, f64)]) -> Result<CouplingGrid> {
    if m < 1 {
        return Err(Error::InvalidConfig("grid needs at least one step".into()));
    }
    let mf = m as f64;
    // (value, priority): exact endpoints beat block points beat base points
    // when nearby candidates are merged.
    let mut cand: Vec<(f64, u8)> = Vec::with_capacity((blocks.len() + 1) * (m + 1));
    cand.push((0.0, 0));
    cand.push((1.0, 0));
    for &(start, len) in blocks {
        if !(start >= -MERGE_TOL && len > 0.0 && start + len <= 1.0 + MERGE_TOL) {
            return Err(Error::InvalidConfig(format!(
                "block [{start}, {}] does not fit in [0, 1]",
                start + len
            )));
        }
        cand.extend((0..=m).map(|j| (start + len * (j as f64 / mf), 1)));
    }
    cand.extend((0..=m).map(|j| (j as f64 / mf, 2)));
    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut grid: Vec<f64> = Vec::with_capacity(cand.len());
    let mut i = 0;
    while i < cand.len() {
        let mut j = i + 1;
        let mut best = cand[i];
        while j < cand.len() && cand[j].0 - cand[j - 1].0 <= MERGE_TOL {
            if cand[j].1 < best.1 {
                best = cand[j];
            }
            j += 1;
        }
        grid.push(best.0);
        i = j;
    }

    let nearest = |x: f64| -> usize {
        let k = grid.partition_point(|&g| g < x);
        match (k.checked_sub(1), grid.get(k)) {
            (Some(l), Some(&r)) if x - grid[l] < r - x => l,
            (Some(l), None) => l,
            _ => k,
        }
    };
    let spans = blocks
        .iter()
        .map(|&(start, len)| (nearest(start), nearest(start + len)))
        .collect();
    Ok(CouplingGrid { grid, spans })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::uniform_grid;

    #[test]
    fn starts_at_zero_and_is_deterministic() {
        let a = sample_wiener(uniform_grid(8), StreamToken::new(1, 1)).unwrap();
        let b = sample_wiener(uniform_grid(8), StreamToken::new(1, 1)).unwrap();
        assert_eq!(a.values()[0], 0.0);
        assert_eq!(a, b);
        assert!(sample_wiener(vec![0.1, 0.5], StreamToken::new(1, 1)).is_err());
    }

    #[test]
    fn bridge_pins_both_ends() {
        let w = sample_wiener(uniform_grid(16), StreamToken::new(3, 0)).unwrap();
        let b = to_bridge(&w).unwrap();
        assert_eq!(b.values()[0], 0.0);
        assert_eq!(*b.values().last().unwrap(), 0.0);
        let zero = SampledPath::new(uniform_grid(4), vec![0.0; 5]).unwrap();
        assert!(to_bridge(&zero).unwrap().values().iter().all(|&v| v == 0.0));
        let short = SampledPath::new(vec![0.0, 0.5], vec![0.0, 1.0]).unwrap();
        assert!(to_bridge(&short).is_err());
    }

    #[test]
    fn coupling_grid_contains_blocks() {
        let cg = coupling_grid(4, &[(0.0, 0.75), (0.75, 0.25)]).unwrap();
        assert_eq!(cg.grid[0], 0.0);
        assert_eq!(*cg.grid.last().unwrap(), 1.0);
        assert!(cg.grid.windows(2).all(|w| w[0] < w[1]));
        for (k, &(s, l)) in [(0.0, 0.75), (0.75, 0.25)].iter().enumerate() {
            let (i, j) = cg.spans[k];
            assert_eq!(cg.grid[i], s);
            assert!((cg.grid[j] - (s + l)).abs() < 1e-15);
            for q in 0..=4 {
                let x = s + l * q as f64 / 4.0;
                assert!(cg.grid.iter().any(|&g| (g - x).abs() <= 1e-12));
            }
        }
        assert!(coupling_grid(4, &[(0.5, 0.7)]).is_err());
    }
}

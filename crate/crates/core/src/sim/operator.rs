use crate::error::Result;
use crate::norm::NormIndex;
use crate::path::SampledPath;
use crate::pwl::{self, DiffSegments, PiecewiseLinear};

/// `M theta - theta` on the span of the grid, for the linear interpolant of
/// `values`.
///
/// The chord between the end values is subtracted first. The majorant
/// commutes with adding affine functions, so this changes nothing
/// mathematically, but it makes the computation for a Wiener path and for
/// its bridge `W(u) - u W(1)` identical to the last bit.
pub fn hull_gap(grid: &[f64], values: &[f64]) -> Result<DiffSegments> {
    let (x0, x1) = (grid[0], *grid.last().unwrap());
    let (y0, y1) = (values[0], *values.last().unwrap());
    let rise = y1 - y0;
    let span = x1 - x0;
    let canon: Vec<f64> = grid
        .iter()
        .zip(values)
        .map(|(&x, &y)| (y - y0) - ((x - x0) / span) * rise)
        .collect();
    let path = SampledPath::from_parts_unchecked(grid.to_vec(), canon);
    let hull = pwl::lcm_of_path(&path, x0, x1)?;
    let (g, v) = path.into_parts();
    let interp = PiecewiseLinear::from_parts(g, v)?;
    pwl::diff_segments(&hull, &interp, x0, x1)
}

/// `||M theta - theta||_p` over the span of the path's grid.
pub fn d_norm(path: &SampledPath, p: NormIndex) -> Result<f64> {
    Ok(pwl::lp_norm(&hull_gap(path.grid(), path.values())?, p))
}

/// [`d_norm`] for several indices, sharing one majorant.
pub fn d_norms(path: &SampledPath, ps: &[NormIndex]) -> Result<Vec<f64>> {
    let gap = hull_gap(path.grid(), path.values())?;
    Ok(ps.iter().map(|&p| pwl::lp_norm(&gap, p)).collect())
}

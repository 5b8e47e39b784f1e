//! Grid fitting and binning of birth–persistence points.

use crate::diagram::{to_birth_persistence, BPPoint, InfinitePolicy, PersistenceDiagram};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, QuantizedMeasure, Scaling};

/// Scalar log score `log(1 + b*a1 + p*a2)`.
pub fn log_rescale(pt: BPPoint, alpha: [f64; 2]) -> f64 {
    (pt.b * alpha[0] + pt.p * alpha[1]).ln_1p()
}

fn extent(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

/// `count` equispaced edges starting at `lo`, spacing `(hi - lo) / count`.
///
/// A zero-width range is widened to one unit so the edges stay strictly increasing.
fn equispaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let span = if hi > lo { hi - lo } else { 1.0 };
    (0..count)
        .map(|i| lo + i as f64 * span / count as f64)
        .collect()
}

fn check_sizes(points: &[BPPoint], r: usize, s: usize) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if r == 0 || s == 0 {
        return Err(Error::InvalidGrid(format!("grid size must be >= 1, got {r}x{s}")));
    }
    Ok(())
}

/// Fits `r x s` equispaced edges between the extremal values of `training`.
pub fn build_uniform_grid(training: &[BPPoint], r: usize, s: usize) -> Result<GridSpec> {
    check_sizes(training, r, s)?;
    let (b_lo, b_hi) = extent(training.iter().map(|p| p.b)).unwrap();
    let (p_lo, p_hi) = extent(training.iter().map(|p| p.p)).unwrap();
    GridSpec::uniform(equispaced(b_lo, b_hi, r), equispaced(p_lo, p_hi, s))
}

/// Edges equispaced in `u = log(1 + alpha * x)` and mapped back through `x = (e^u - 1) / alpha`.
fn log_edges(lo: f64, hi: f64, count: usize, alpha: f64) -> Vec<f64> {
    let hi = if hi > lo { hi } else { lo + 1.0 };
    let u_lo = (alpha * lo).ln_1p();
    let u_hi = (alpha * hi).ln_1p();
    let mut edges: Vec<f64> = equispaced(u_lo, u_hi, count)
        .into_iter()
        .map(|u| u.exp_m1() / alpha)
        .collect();
    // Pin the first edge so the training minimum always lands in bin 0.
    edges[0] = lo;
    edges
}

/// Fits a log-scaled grid: each axis is rescaled independently by `x -> log(1 + alpha_k x)`,
/// edges are equispaced in rescaled coordinates, then mapped back to the original axis.
pub fn build_log_grid(
    training: &[BPPoint],
    r: usize,
    s: usize,
    alpha: [f64; 2],
) -> Result<GridSpec> {
    check_sizes(training, r, s)?;
    if !(alpha[0] > 0.0 && alpha[1] > 0.0) {
        return Err(Error::InvalidGrid(format!("alpha must be positive, got {alpha:?}")));
    }
    let (b_lo, b_hi) = extent(training.iter().map(|p| p.b)).unwrap();
    let (p_lo, p_hi) = extent(training.iter().map(|p| p.p)).unwrap();
    if b_lo < 0.0 || p_lo < 0.0 {
        return Err(Error::InvalidGrid(
            "log-scaled grids need non-negative birth and persistence".into(),
        ));
    }
    GridSpec::new(
        log_edges(b_lo, b_hi, r, alpha[0]),
        log_edges(p_lo, p_hi, s, alpha[1]),
        Scaling::LogScaled,
        Some(alpha),
    )
}

/// Index of the half-open bin holding `x`, or `None` when `x` is below the first edge.
fn bin_index(edges: &[f64], x: f64) -> Option<usize> {
    edges.partition_point(|&e| e <= x).checked_sub(1)
}

/// Bins birth–persistence points; returns the measure and the number of discarded points.
pub fn quantize_points(points: &[BPPoint], grid: &GridSpec) -> (QuantizedMeasure, usize) {
    let mut measure = QuantizedMeasure::zeros(grid.rows(), grid.cols());
    let mut discarded = 0;
    for pt in points {
        match (bin_index(grid.b_edges(), pt.b), bin_index(grid.p_edges(), pt.p)) {
            (Some(i), Some(j)) => measure.add(i, j, 1.0),
            _ => discarded += 1,
        }
    }
    (measure, discarded)
}

/// Counts diagram points per grid box; points below the first edge on either axis are discarded.
pub fn quantize(
    diagram: &PersistenceDiagram,
    grid: &GridSpec,
    policy: InfinitePolicy,
) -> Result<QuantizedMeasure> {
    let points = to_birth_persistence(diagram, policy)?;
    Ok(quantize_points(&points, grid).0)
}

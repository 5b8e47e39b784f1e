//! Wall-clock timings of quantization and transforms on synthetic diagrams.

use std::hint::black_box;
use std::path::PathBuf;
use std::time::Instant;

use qupid_core::datasets::SeededRng;
use qupid_core::{apply, build_uniform_grid, quantize_points, BPPoint, GridSpec, QuantizedMeasure, TransformKind};
use serde::{Deserialize, Serialize};
use serde_with::skip_serializing_none;

use crate::config::{resolve, GridSize};
use crate::{usage, write_json};

#[skip_serializing_none]
#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// Timing JSON output path (printed to stdout when omitted).
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Diagram sizes for the quantization timings.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Grid for quantization and transform timings.
    #[arg(long)]
    pub grid: Option<GridSize>,
    /// Grids for the Fourier scaling timings.
    #[arg(long, value_delimiter = ',')]
    pub fft_grids: Option<Vec<GridSize>>,
    #[arg(long = "transform", value_delimiter = ',')]
    #[serde(rename = "transforms")]
    pub transforms: Option<Vec<String>>,
    /// Timed runs per measurement (the median is reported).
    #[arg(long)]
    pub runs: Option<usize>,
    /// Calls per timed run.
    #[arg(long)]
    pub inner: Option<usize>,
    /// Diagrams in the end-to-end batch (0 skips it).
    #[arg(long)]
    pub batch: Option<usize>,
    /// Points per diagram in the batch.
    #[arg(long)]
    pub batch_points: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub grid: GridSize,
    pub fft_grids: Vec<GridSize>,
    pub transforms: Vec<String>,
    pub runs: usize,
    pub inner: usize,
    pub batch: usize,
    pub batch_points: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![1000, 2000, 4000],
            grid: GridSize { rows: 32, cols: 32 },
            fft_grids: vec![
                GridSize { rows: 32, cols: 32 },
                GridSize { rows: 32, cols: 64 },
                GridSize { rows: 64, cols: 64 },
            ],
            transforms: vec!["id".into(), "fft".into(), "db1".into(), "coif2".into()],
            runs: 20,
            inner: 20,
            batch: 1000,
            batch_points: 1000,
            seed: 0,
        }
    }
}

/// `n` points with birth and persistence uniform in `[0, 1)`.
pub fn synthetic_points(n: usize, rng: &mut SeededRng) -> Vec<BPPoint> {
    (0..n).map(|_| BPPoint::new(rng.next_f64(), rng.next_f64())).collect()
}

/// The grid on `[0, 1]^2` used by all timings.
pub fn unit_grid(rows: usize, cols: usize) -> GridSpec {
    let corners = [BPPoint::new(0.0, 0.0), BPPoint::new(1.0, 1.0)];
    build_uniform_grid(&corners, rows, cols).expect("sizes are positive")
}

/// Median seconds per call of `f` over `runs` runs of `inner` calls each.
pub fn median_time<F: FnMut()>(runs: usize, inner: usize, mut f: F) -> f64 {
    let inner = inner.max(1);
    let mut times: Vec<f64> = (0..runs.max(1))
        .map(|_| {
            let t = Instant::now();
            for _ in 0..inner {
                f();
            }
            t.elapsed().as_secs_f64() / inner as f64
        })
        .collect();
    times.sort_by(f64::total_cmp);
    let m = times.len() / 2;
    if times.len() % 2 == 1 {
        times[m]
    } else {
        0.5 * (times[m - 1] + times[m])
    }
}

/// Least-squares slope of `log y` against `log x`, skipping non-positive values.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SizeTiming {
    pub size: usize,
    pub median_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransformTiming {
    pub transform: String,
    pub median_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridTiming {
    pub grid: GridSize,
    pub cells: usize,
    pub median_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BatchTiming {
    pub diagrams: usize,
    pub points: usize,
    pub transform: String,
    pub total_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub quantize: Vec<SizeTiming>,
    /// Ratio of consecutive quantize medians.
    pub quantize_ratios: Vec<f64>,
    pub quantize_loglog_slope: Option<f64>,
    pub transforms: Vec<TransformTiming>,
    pub fft: Vec<GridTiming>,
    pub fft_ratios: Vec<f64>,
    /// Model `c * n log n` prediction of each FFT ratio.
    pub fft_nlogn_ratios: Vec<f64>,
    pub batch: Option<BatchTiming>,
}

fn ratios(xs: &[f64]) -> Vec<f64> {
    xs.windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { f64::NAN })
        .map(|r| if r.is_finite() { r } else { 0.0 })
        .collect()
}

/// Median quantization time per diagram size on a fixed grid.
pub fn quantize_timings(sizes: &[usize], grid: GridSize, runs: usize, inner: usize, seed: u64) -> Vec<SizeTiming> {
    let g = unit_grid(grid.rows, grid.cols);
    sizes
        .iter()
        .map(|&n| {
            let pts = synthetic_points(n, &mut SeededRng::new(seed ^ n as u64));
            let median_s = median_time(runs, inner, || {
                black_box(quantize_points(black_box(&pts), &g));
            });
            SizeTiming { size: n, median_s }
        })
        .collect()
}

fn random_measure(rows: usize, cols: usize, rng: &mut SeededRng) -> QuantizedMeasure {
    let v = (0..rows * cols).map(|_| rng.below(5) as f64).collect();
    QuantizedMeasure::from_vec(rows, cols, v).expect("non-negative masses")
}

/// Quantizes and transforms `diagrams` synthetic diagrams of `points` points one after the
/// other on the calling thread; returns total seconds.
pub fn batch_time(diagrams: usize, points: usize, grid: GridSize, kind: TransformKind, seed: u64) -> f64 {
    let g = unit_grid(grid.rows, grid.cols);
    let mut rng = SeededRng::new(seed);
    let data: Vec<Vec<BPPoint>> = (0..diagrams).map(|_| synthetic_points(points, &mut rng)).collect();
    let t = Instant::now();
    for pts in &data {
        let (m, _) = quantize_points(pts, &g);
        black_box(apply(&m, kind).expect("valid transform"));
    }
    t.elapsed().as_secs_f64()
}

pub fn run_bench(cfg: &BenchConfig) -> anyhow::Result<BenchReport> {
    let kinds: Vec<TransformKind> = cfg
        .transforms
        .iter()
        .map(|t| t.parse().map_err(usage))
        .collect::<anyhow::Result<_>>()?;
    let quantize = quantize_timings(&cfg.sizes, cfg.grid, cfg.runs, cfg.inner, cfg.seed);
    let qt: Vec<f64> = quantize.iter().map(|t| t.median_s).collect();
    let sizes: Vec<f64> = cfg.sizes.iter().map(|&n| n as f64).collect();

    let mut rng = SeededRng::new(cfg.seed);
    let m = random_measure(cfg.grid.rows, cfg.grid.cols, &mut rng);
    let transforms = kinds
        .iter()
        .map(|&k| TransformTiming {
            transform: k.name(),
            median_s: median_time(cfg.runs, cfg.inner, || {
                black_box(apply(black_box(&m), k).expect("valid transform"));
            }),
        })
        .collect();

    let fft: Vec<GridTiming> = cfg
        .fft_grids
        .iter()
        .map(|&g| {
            let m = random_measure(g.rows, g.cols, &mut rng);
            GridTiming {
                grid: g,
                cells: g.rows * g.cols,
                median_s: median_time(cfg.runs, cfg.inner, || {
                    black_box(apply(black_box(&m), TransformKind::Fourier).expect("fft"));
                }),
            }
        })
        .collect();
    let ft: Vec<f64> = fft.iter().map(|t| t.median_s).collect();
    let nlogn = |n: f64| n * n.max(2.0).ln();
    let fft_nlogn_ratios = fft
        .windows(2)
        .map(|w| nlogn(w[1].cells as f64) / nlogn(w[0].cells as f64))
        .collect();

    let batch = (cfg.batch > 0).then(|| {
        let kind = TransformKind::Coiflet(2);
        BatchTiming {
            diagrams: cfg.batch,
            points: cfg.batch_points,
            transform: kind.name(),
            total_s: batch_time(cfg.batch, cfg.batch_points, cfg.grid, kind, cfg.seed),
        }
    });

    Ok(BenchReport {
        config: cfg.clone(),
        quantize_ratios: ratios(&qt),
        quantize_loglog_slope: log_log_slope(&sizes, &qt),
        quantize,
        transforms,
        fft_ratios: ratios(&ft),
        fft_nlogn_ratios,
        fft,
        batch,
    })
}

pub fn run(args: Args) -> anyhow::Result<()> {
    let flags = serde_json::to_value(&args)?;
    let cfg = resolve(BenchConfig::default(), args.config.as_deref(), flags)?;
    let report = run_bench(&cfg)?;
    match &args.out {
        Some(p) => write_json(p, &report),
        None => {
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(())
        }
    }
}

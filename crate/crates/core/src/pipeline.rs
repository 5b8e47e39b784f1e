//! End-to-end vectorization of multi-diagram samples.
//!
//! A sample is a fixed list of diagrams, one per *channel* (for point clouds `h0`, `h1`; for
//! graphs one per direction, diffusion time and degree). Grids are fitted per channel from
//! training samples only, every channel is quantized and transformed, and the per-channel
//! vectors are concatenated in channel order.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::MANIFEST_FILE;
use crate::diagram::{to_birth_persistence, BPPoint, InfinitePolicy, PersistenceDiagram};
use crate::error::{io_err, Error, Result};
use crate::grid::{GridSpec, Scaling};
use crate::quantize::{build_log_grid, build_uniform_grid, quantize_points};
use crate::transforms::{apply, FeatureVector, Layout, TransformKind};

/// Name of the graph channel for a filtration direction, diffusion time and degree.
pub fn graph_channel(superlevel: bool, t: f64, degree: usize) -> String {
    let dir = if superlevel { "sup" } else { "sub" };
    format!("{dir}_t{t}_h{degree}")
}

/// Graph channels ordered by degree, then sublevel before superlevel, then ascending time.
pub fn graph_channels(times: &[f64]) -> Vec<String> {
    let mut ts = times.to_vec();
    ts.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    for degree in 0..2 {
        for sup in [false, true] {
            for &t in &ts {
                out.push(graph_channel(sup, t, degree));
            }
        }
    }
    out
}

pub fn cloud_channels() -> Vec<String> {
    vec!["h0".into(), "h1".into()]
}

/// How essential classes enter the birth–persistence plane.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EssentialPolicy {
    #[default]
    Drop,
    /// Clamp each essential death to the largest finite value of its own diagram.
    ClampToMax,
}

impl EssentialPolicy {
    pub fn for_diagram(self, d: &PersistenceDiagram) -> InfinitePolicy {
        match self {
            Self::Drop => InfinitePolicy::Drop,
            Self::ClampToMax => {
                let max = d.max_finite_value().unwrap_or(0.0);
                let birth = d
                    .points()
                    .iter()
                    .filter(|p| p.is_essential())
                    .map(|p| p.birth())
                    .fold(f64::NEG_INFINITY, f64::max);
                InfinitePolicy::ClampTo(max.max(birth))
            }
        }
    }
}

impl FromStr for EssentialPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drop" => Ok(Self::Drop),
            "clamp" | "clamp_to_max" => Ok(Self::ClampToMax),
            _ => Err(Error::InvalidInput(format!("unknown essential policy '{s}'"))),
        }
    }
}

/// A transform together with the grid scaling it is evaluated on.
///
/// Written `name` or `name@uniform` / `name@log`; without a suffix the pipeline default applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransformSpec {
    pub kind: TransformKind,
    pub scaling: Option<Scaling>,
}

impl TransformSpec {
    pub fn new(kind: TransformKind) -> Self {
        Self { kind, scaling: None }
    }

    pub fn scaling_or(&self, default: Scaling) -> Scaling {
        self.scaling.unwrap_or(default)
    }

    pub fn label(&self) -> String {
        match self.scaling {
            None => self.kind.name(),
            Some(Scaling::Uniform) => format!("{}@uniform", self.kind.name()),
            Some(Scaling::LogScaled) => format!("{}@log", self.kind.name()),
        }
    }
}

impl FromStr for TransformSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, scaling) = match s.split_once('@') {
            None => (s, None),
            Some((n, sc)) => (n, Some(parse_scaling(sc)?)),
        };
        Ok(Self {
            kind: name.parse()?,
            scaling,
        })
    }
}

impl Serialize for TransformSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for TransformSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn parse_scaling(s: &str) -> Result<Scaling> {
    match s {
        "uniform" => Ok(Scaling::Uniform),
        "log" | "log_scaled" => Ok(Scaling::LogScaled),
        _ => Err(Error::InvalidInput(format!("unknown scaling '{s}'"))),
    }
}

/// Grid and transform settings shared by every channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorizeConfig {
    pub rows: usize,
    pub cols: usize,
    pub scaling: Scaling,
    pub alpha: [f64; 2],
    pub essential: EssentialPolicy,
}

impl Default for VectorizeConfig {
    fn default() -> Self {
        Self {
            rows: 32,
            cols: 32,
            scaling: Scaling::LogScaled,
            alpha: [500.0, 500.0],
            essential: EssentialPolicy::Drop,
        }
    }
}

/// Birth–persistence points of one diagram under the configured essential policy.
pub fn bp_points(d: &PersistenceDiagram, essential: EssentialPolicy) -> Result<Vec<BPPoint>> {
    to_birth_persistence(d, essential.for_diagram(d))
}

/// Fits one grid on the pooled points of one channel.
///
/// A channel without any training point gets the grid fitted on the single point `(0, 0)`.
pub fn fit_channel_grid(
    points: &[BPPoint],
    rows: usize,
    cols: usize,
    scaling: Scaling,
    alpha: [f64; 2],
) -> Result<GridSpec> {
    let fallback = [BPPoint::new(0.0, 0.0)];
    let pts = if points.is_empty() { &fallback[..] } else { points };
    match scaling {
        Scaling::Uniform => build_uniform_grid(pts, rows, cols),
        Scaling::LogScaled => build_log_grid(pts, rows, cols, alpha),
    }
}

/// Per-channel grids fitted on a list of training samples.
pub fn fit_grids(
    training: &[&[PersistenceDiagram]],
    n_channels: usize,
    cfg: &VectorizeConfig,
    scaling: Scaling,
) -> Result<Vec<GridSpec>> {
    let mut pooled = vec![Vec::new(); n_channels];
    for sample in training {
        check_channels(sample, n_channels)?;
        for (c, d) in sample.iter().enumerate() {
            pooled[c].extend(bp_points(d, cfg.essential)?);
        }
    }
    pooled
        .iter()
        .map(|pts| fit_channel_grid(pts, cfg.rows, cfg.cols, scaling, cfg.alpha))
        .collect()
}

fn check_channels(sample: &[PersistenceDiagram], n_channels: usize) -> Result<()> {
    if sample.len() != n_channels {
        return Err(Error::DimensionMismatch {
            expected: n_channels,
            got: sample.len(),
        });
    }
    Ok(())
}

/// Quantizes every channel on its grid, applies `kind`, and concatenates with segment names
/// prefixed by the channel name.
pub fn vectorize_sample(
    sample: &[PersistenceDiagram],
    channels: &[String],
    grids: &[GridSpec],
    kind: TransformKind,
    essential: EssentialPolicy,
) -> Result<FeatureVector> {
    check_channels(sample, channels.len())?;
    check_channels(sample, grids.len())?;
    let mut values = Vec::new();
    let mut layout = Layout::default();
    for ((d, name), grid) in sample.iter().zip(channels).zip(grids) {
        let (m, _) = quantize_points(&bp_points(d, essential)?, grid);
        let (v, l) = apply(&m, kind)?.into_parts();
        values.extend(v);
        layout.extend(l.prefixed(name));
    }
    FeatureVector::new(values, layout)
}

/// Reads of diagram samples, with an audit of reads from indices marked as held out.
#[derive(Debug)]
pub struct DiagramSet {
    pub channels: Vec<String>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    sources: Vec<Source>,
    cache: Vec<OnceLock<Vec<PersistenceDiagram>>>,
    sealed: Vec<AtomicBool>,
    sealed_reads: AtomicUsize,
}

#[derive(Debug)]
enum Source {
    Memory,
    Files(Vec<PathBuf>),
}

/// `manifest.json` of a diagram directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramManifest {
    pub kind: String,
    pub channels: Vec<String>,
    pub class_names: Vec<String>,
    pub counts: Vec<usize>,
    pub config: serde_json::Value,
}

impl DiagramSet {
    pub fn from_memory(
        channels: Vec<String>,
        samples: Vec<Vec<PersistenceDiagram>>,
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if samples.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: samples.len(),
                got: labels.len(),
            });
        }
        for s in &samples {
            check_channels(s, channels.len())?;
        }
        let n = samples.len();
        let cache = samples
            .into_iter()
            .map(|s| {
                let cell = OnceLock::new();
                let _ = cell.set(s);
                cell
            })
            .collect();
        Ok(Self {
            channels,
            labels,
            class_names,
            sources: (0..n).map(|_| Source::Memory).collect(),
            cache,
            sealed: (0..n).map(|_| AtomicBool::new(false)).collect(),
            sealed_reads: AtomicUsize::new(0),
        })
    }

    /// Opens `dir/diagrams/{label}/{index}_{channel}.csv` as described by `dir/manifest.json`.
    /// Files are read on first access.
    pub fn open(dir: &Path) -> Result<Self> {
        let manifest_path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
        let manifest: DiagramManifest = serde_json::from_str(&text)?;
        let root = dir.join("diagrams");
        let mut items: BTreeMap<(usize, usize), ()> = BTreeMap::new();
        let label_dirs = fs::read_dir(&root).map_err(io_err(&root))?;
        for entry in label_dirs {
            let path = entry.map_err(io_err(&root))?.path();
            let Some(label) = file_stem_number(&path, None) else {
                continue;
            };
            for f in fs::read_dir(&path).map_err(io_err(&path))? {
                let f = f.map_err(io_err(&path))?.path();
                if let Some(index) = file_stem_number(&f, Some('_')) {
                    items.insert((label, index), ());
                }
            }
        }
        if items.is_empty() {
            return Err(Error::InvalidInput(format!("no diagrams under {}", root.display())));
        }
        let mut labels = Vec::with_capacity(items.len());
        let mut sources = Vec::with_capacity(items.len());
        for &(label, index) in items.keys() {
            labels.push(label);
            let class_dir = root.join(label.to_string());
            sources.push(Source::Files(
                manifest
                    .channels
                    .iter()
                    .map(|c| class_dir.join(format!("{index}_{c}.csv")))
                    .collect(),
            ));
        }
        let n = labels.len();
        Ok(Self {
            channels: manifest.channels,
            labels,
            class_names: manifest.class_names,
            sources,
            cache: (0..n).map(|_| OnceLock::new()).collect(),
            sealed: (0..n).map(|_| AtomicBool::new(false)).collect(),
            sealed_reads: AtomicUsize::new(0),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names
            .len()
            .max(self.labels.iter().max().map_or(0, |m| m + 1))
    }

    /// Marks `idx` as held out; reading them counts towards [`DiagramSet::sealed_reads`].
    pub fn seal(&self, idx: &[usize]) {
        for &i in idx {
            self.sealed[i].store(true, Ordering::SeqCst);
        }
    }

    pub fn unseal_all(&self) {
        for s in &self.sealed {
            s.store(false, Ordering::SeqCst);
        }
    }

    /// Number of reads of sealed samples so far.
    pub fn sealed_reads(&self) -> usize {
        self.sealed_reads.load(Ordering::SeqCst)
    }

    /// The diagrams of sample `i`, one per channel.
    pub fn sample(&self, i: usize) -> Result<&[PersistenceDiagram]> {
        if self.sealed[i].load(Ordering::SeqCst) {
            self.sealed_reads.fetch_add(1, Ordering::SeqCst);
        }
        if let Some(s) = self.cache[i].get() {
            return Ok(s);
        }
        let loaded = match &self.sources[i] {
            Source::Memory => unreachable!("in-memory samples are always cached"),
            Source::Files(paths) => paths
                .iter()
                .map(|p| PersistenceDiagram::read_csv(p))
                .collect::<Result<Vec<_>>>()?,
        };
        Ok(self.cache[i].get_or_init(|| loaded))
    }

    pub fn samples(&self, idx: &[usize]) -> Result<Vec<&[PersistenceDiagram]>> {
        idx.iter().map(|&i| self.sample(i)).collect()
    }
}

/// Leading number of a file or directory name; with `sep`, the part before the separator.
fn file_stem_number(path: &Path, sep: Option<char>) -> Option<usize> {
    let name = path.file_name()?.to_str()?;
    let head = match sep {
        Some(c) => name.split_once(c)?.0,
        None => name,
    };
    head.parse().ok()
}

/// Fits grids on `train` and vectorizes `targets` in parallel, preserving order.
pub fn featurize(
    set: &DiagramSet,
    train: &[usize],
    targets: &[usize],
    spec: TransformSpec,
    cfg: &VectorizeConfig,
) -> Result<(Vec<Vec<f64>>, Layout, Vec<GridSpec>)> {
    let grids = fit_grids(
        &set.samples(train)?,
        set.channels.len(),
        cfg,
        spec.scaling_or(cfg.scaling),
    )?;
    let (rows, layout) = vectorize_indices(set, targets, &grids, spec.kind, cfg.essential)?;
    Ok((rows, layout, grids))
}

/// Vectorizes samples `idx` on fixed grids; rows come back in the order of `idx`.
pub fn vectorize_indices(
    set: &DiagramSet,
    idx: &[usize],
    grids: &[GridSpec],
    kind: TransformKind,
    essential: EssentialPolicy,
) -> Result<(Vec<Vec<f64>>, Layout)> {
    let vectors = idx
        .par_iter()
        .map(|&i| vectorize_sample(set.sample(i)?, &set.channels, grids, kind, essential))
        .collect::<Result<Vec<_>>>()?;
    let layout = match vectors.first() {
        Some(v) => v.layout().clone(),
        None => {
            // The layout depends only on the grids, so an all-empty sample yields it.
            let blank: Vec<PersistenceDiagram> =
                (0..grids.len()).map(PersistenceDiagram::empty).collect();
            vectorize_sample(&blank, &set.channels, grids, kind, essential)?
                .layout()
                .clone()
        }
    };
    Ok((vectors.into_iter().map(|v| v.into_parts().0).collect(), layout))
}

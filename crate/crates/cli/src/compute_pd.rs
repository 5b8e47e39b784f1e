use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use log::info;
use qupid_core::datasets::{list_items, read_manifest, ItemRef, MANIFEST_FILE};
use qupid_core::homology::{
    graph_sublevel_persistence, graph_superlevel_persistence, hks, rips_h0, rips_h1, PointCloud,
    WeightedGraph,
};
use qupid_core::pipeline::{cloud_channels, graph_channel, graph_channels, DiagramManifest};
use qupid_core::PersistenceDiagram;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_with::skip_serializing_none;

use crate::config::resolve;
use crate::{path_str, prepare_out_dir, usage, write_json};

#[skip_serializing_none]
#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// Dataset directory containing `clouds/` or `graphs/`.
    #[arg(long)]
    #[serde(skip)]
    pub input: PathBuf,
    /// Output directory for `diagrams/{label}/{index}_{channel}.csv`.
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub force: bool,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Rips truncation scale for degree-1 persistence of point clouds.
    #[arg(long)]
    pub max_scale: Option<f64>,
    /// Heat kernel diffusion times for graphs.
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComputePdConfig {
    pub max_scale: f64,
    pub times: Vec<f64>,
}

impl Default for ComputePdConfig {
    fn default() -> Self {
        Self {
            max_scale: 0.5,
            times: vec![0.1, 10.0],
        }
    }
}

#[derive(Debug, Serialize)]
struct Echo<'a> {
    input: String,
    #[serde(flatten)]
    settings: &'a ComputePdConfig,
}

fn write_sample(out: &Path, item: &ItemRef, named: &[(String, PersistenceDiagram)]) -> anyhow::Result<()> {
    let dir = out.join("diagrams").join(item.label.to_string());
    for (channel, d) in named {
        d.write_csv(&dir.join(format!("{}_{channel}.csv", item.index)))?;
    }
    Ok(())
}

fn cloud_diagrams(path: &Path, max_scale: f64) -> anyhow::Result<Vec<(String, PersistenceDiagram)>> {
    let cloud = PointCloud::read_csv(path)?;
    let h1 = rips_h1(&cloud, max_scale).with_context(|| format!("while processing {}", path.display()))?;
    Ok(vec![("h0".into(), rips_h0(&cloud)), ("h1".into(), h1)])
}

fn graph_diagrams(path: &Path, times: &[f64]) -> anyhow::Result<Vec<(String, PersistenceDiagram)>> {
    let g = WeightedGraph::read(path)?;
    let mut by_name = BTreeMap::new();
    for &t in times {
        let f = hks(&g, t)?;
        let (s0, s1) = graph_sublevel_persistence(&g, &f)?;
        let (u0, u1) = graph_superlevel_persistence(&g, &f)?;
        by_name.insert(graph_channel(false, t, 0), s0);
        by_name.insert(graph_channel(false, t, 1), s1);
        by_name.insert(graph_channel(true, t, 0), u0);
        by_name.insert(graph_channel(true, t, 1), u1);
    }
    Ok(graph_channels(times)
        .into_iter()
        .map(|c| {
            let d = by_name.remove(&c).expect("every channel is computed");
            (c, d)
        })
        .collect())
}

pub fn run(args: Args) -> anyhow::Result<()> {
    let flags = serde_json::to_value(&args)?;
    let cfg = resolve(ComputePdConfig::default(), args.config.as_deref(), flags)?;
    if !(cfg.max_scale > 0.0 && cfg.max_scale.is_finite()) {
        return Err(usage(format!("--max-scale must be positive, got {}", cfg.max_scale)));
    }
    if cfg.times.is_empty() || cfg.times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(usage("--times must be a non-empty list of positive numbers"));
    }
    let mut times = cfg.times.clone();
    times.sort_by(f64::total_cmp);
    times.dedup();

    let is_graphs = args.input.join("graphs").is_dir();
    let (kind, subdir, ext, channels) = if is_graphs {
        ("graphs", "graphs", ".txt", graph_channels(&times))
    } else {
        ("clouds", "clouds", ".csv", cloud_channels())
    };
    let items = list_items(&args.input, subdir, ext)?;
    if items.is_empty() {
        bail!("no input items under {}", args.input.join(subdir).display());
    }
    let source = read_manifest(&args.input)?;
    let n_classes = items.iter().map(|it| it.label + 1).max().unwrap_or(0);
    let class_names = match source {
        Some(m) if m.class_names.len() >= n_classes => m.class_names,
        _ => (0..n_classes).map(|c| c.to_string()).collect(),
    };

    prepare_out_dir(&args.out, args.force, &["diagrams", MANIFEST_FILE])?;
    for c in 0..n_classes {
        let d = args.out.join("diagrams").join(c.to_string());
        fs::create_dir_all(&d).with_context(|| format!("cannot create {}", d.display()))?;
    }
    info!("computing {kind} diagrams for {} items", items.len());
    items.par_iter().try_for_each(|item| -> anyhow::Result<()> {
        let named = if is_graphs {
            graph_diagrams(&item.path, &times)?
        } else {
            cloud_diagrams(&item.path, cfg.max_scale)?
        };
        write_sample(&args.out, item, &named)
    })?;

    let mut counts = vec![0; n_classes];
    for it in &items {
        counts[it.label] += 1;
    }
    let manifest = DiagramManifest {
        kind: kind.into(),
        channels,
        class_names,
        counts,
        config: serde_json::to_value(Echo {
            input: path_str(&args.input),
            settings: &cfg,
        })?,
    };
    write_json(&args.out.join(MANIFEST_FILE), &manifest)
}

use std::path::PathBuf;

use clap::ValueEnum;
use log::info;
use qupid_core::datasets::{
    generate_graph_set, generate_orbit_dataset, generate_pattern_set, write_cloud_dataset,
    write_graph_dataset, GraphClass, PatternClass, MANIFEST_FILE, ORBIT_RHOS,
};
use serde::{Deserialize, Serialize};
use serde_with::skip_serializing_none;

use crate::config::resolve;
use crate::{prepare_out_dir, usage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Orbit,
    Patterns,
    Graphs,
}

#[skip_serializing_none]
#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// Dataset family.
    #[arg(value_enum)]
    pub kind: Kind,
    /// Output directory.
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    /// Overwrite a non-empty output directory.
    #[arg(long)]
    #[serde(skip)]
    pub force: bool,
    /// JSON file with default settings (flags take precedence).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Items per class.
    #[arg(long)]
    pub per_class: Option<usize>,
    /// Points per cloud (orbit, patterns).
    #[arg(long)]
    pub points: Option<usize>,
    /// Vertices per graph (graphs).
    #[arg(long)]
    pub vertices: Option<usize>,
    /// Orbit parameters, one class each.
    #[arg(long, value_delimiter = ',')]
    pub rhos: Option<Vec<f64>>,
    /// Pattern classes (circles, clusters, uniform) or graph classes (random, ring, tree).
    #[arg(long, value_delimiter = ',')]
    pub classes: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateConfig {
    pub kind: Kind,
    pub seed: u64,
    pub per_class: usize,
    pub points: usize,
    pub vertices: usize,
    pub rhos: Vec<f64>,
    /// Empty means the default classes of `kind`.
    pub classes: Vec<String>,
}

impl GenerateConfig {
    fn defaults(kind: Kind) -> Self {
        Self {
            kind,
            seed: 0,
            per_class: 50,
            points: 300,
            vertices: 20,
            rhos: ORBIT_RHOS.to_vec(),
            classes: Vec::new(),
        }
    }
}

fn default_classes(kind: Kind) -> Vec<String> {
    let names: &[&str] = match kind {
        Kind::Orbit => &[],
        Kind::Patterns => &["circles", "clusters", "uniform"],
        Kind::Graphs => &["random", "ring", "tree"],
    };
    names.iter().map(|s| s.to_string()).collect()
}

pub fn run(args: Args) -> anyhow::Result<()> {
    let flags = serde_json::to_value(&args)?;
    let mut cfg = resolve(GenerateConfig::defaults(args.kind), args.config.as_deref(), flags)?;
    if cfg.classes.is_empty() {
        cfg.classes = default_classes(cfg.kind);
    }
    if cfg.kind == Kind::Orbit {
        cfg.classes.clear();
    }
    let params = serde_json::to_value(&cfg)?;
    match cfg.kind {
        Kind::Orbit => {
            if cfg.rhos.is_empty() {
                return Err(usage("--rhos needs at least one value"));
            }
            let set = generate_orbit_dataset(&cfg.rhos, cfg.per_class, cfg.points, cfg.seed).map_err(usage)?;
            prepare_out_dir(&args.out, args.force, &["clouds", MANIFEST_FILE])?;
            write_cloud_dataset(&args.out, &set, "orbit", Some(cfg.seed), params)?;
            info!("wrote {} orbit clouds to {}", set.len(), args.out.display());
        }
        Kind::Patterns => {
            let classes = cfg
                .classes
                .iter()
                .map(|c| c.parse::<PatternClass>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(usage)?;
            let set = generate_pattern_set(&classes, cfg.per_class, cfg.points, cfg.seed).map_err(usage)?;
            prepare_out_dir(&args.out, args.force, &["clouds", MANIFEST_FILE])?;
            write_cloud_dataset(&args.out, &set, "patterns", Some(cfg.seed), params)?;
            info!("wrote {} pattern clouds to {}", set.len(), args.out.display());
        }
        Kind::Graphs => {
            let classes = cfg
                .classes
                .iter()
                .map(|c| c.parse::<GraphClass>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(usage)?;
            if cfg.vertices == 0 {
                return Err(usage("--vertices must be at least 1"));
            }
            let (graphs, labels) = generate_graph_set(&classes, cfg.per_class, cfg.vertices, cfg.seed);
            let names: Vec<String> = classes.iter().map(|c| c.name().to_string()).collect();
            prepare_out_dir(&args.out, args.force, &["graphs", MANIFEST_FILE])?;
            write_graph_dataset(&args.out, &graphs, &labels, &names, Some(cfg.seed), params)?;
            info!("wrote {} graphs to {}", graphs.len(), args.out.display());
        }
    }
    Ok(())
}

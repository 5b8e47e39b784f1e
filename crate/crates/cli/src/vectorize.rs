use std::path::PathBuf;

use log::info;
use qupid_core::learn::split_train_test;
use qupid_core::pipeline::{featurize, parse_scaling, DiagramSet, EssentialPolicy, TransformSpec, VectorizeConfig};
use qupid_core::GridSpec;
use serde::{Deserialize, Serialize};
use serde_with::skip_serializing_none;

use crate::config::{parse_pair, resolve, GridSize};
use crate::features::{file_tag, FeatureFile, LayoutFile, TEST, TRAIN};
use crate::{path_str, prepare_out_dir, usage, write_json};

#[skip_serializing_none]
#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// Diagram directory written by `compute-pd`.
    #[arg(long)]
    #[serde(skip)]
    pub input: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub force: bool,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Transforms: id, fft, db1..db3 (haar = db1), coif1..coif3, optionally suffixed with
    /// `@uniform` or `@log` to override the grid scaling.
    #[arg(long = "transform", value_delimiter = ',')]
    #[serde(rename = "transforms")]
    pub transforms: Option<Vec<String>>,
    /// Grid size `RxS`.
    #[arg(long)]
    pub grid: Option<GridSize>,
    /// Default grid scaling: uniform or log.
    #[arg(long)]
    pub scaling: Option<String>,
    /// Log-grid parameter `a1,a2`.
    #[arg(long, value_parser = parse_pair)]
    pub alpha: Option<[f64; 2]>,
    /// Fraction of items (stratified) used to fit the grids.
    #[arg(long)]
    pub train_ratio: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Essential classes: drop, or clamp to the diagram's largest finite value.
    #[arg(long)]
    pub essential: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorizeCmdConfig {
    pub transforms: Vec<String>,
    pub grid: GridSize,
    pub scaling: String,
    pub alpha: [f64; 2],
    pub train_ratio: f64,
    pub seed: u64,
    pub essential: String,
}

impl Default for VectorizeCmdConfig {
    fn default() -> Self {
        Self {
            transforms: vec!["coif2".into()],
            grid: GridSize { rows: 32, cols: 32 },
            scaling: "log".into(),
            alpha: [500.0, 500.0],
            train_ratio: 0.7,
            seed: 0,
            essential: "drop".into(),
        }
    }
}

impl VectorizeCmdConfig {
    pub fn specs(&self) -> anyhow::Result<Vec<TransformSpec>> {
        if self.transforms.is_empty() {
            return Err(usage("at least one transform is required"));
        }
        self.transforms.iter().map(|t| t.parse().map_err(usage)).collect()
    }

    pub fn vectorize_config(&self) -> anyhow::Result<VectorizeConfig> {
        Ok(VectorizeConfig {
            rows: self.grid.rows,
            cols: self.grid.cols,
            scaling: parse_scaling(&self.scaling).map_err(usage)?,
            alpha: self.alpha,
            essential: self.essential.parse::<EssentialPolicy>().map_err(usage)?,
        })
    }
}

#[derive(Debug, Serialize)]
struct ChannelGrid<'a> {
    channel: &'a str,
    grid: &'a GridSpec,
}

#[derive(Debug, Serialize)]
struct RunRecord<'a> {
    input: String,
    config: &'a VectorizeCmdConfig,
    train: &'a [usize],
    test: &'a [usize],
}

pub fn run(args: Args) -> anyhow::Result<()> {
    let flags = serde_json::to_value(&args)?;
    let cfg = resolve(VectorizeCmdConfig::default(), args.config.as_deref(), flags)?;
    let specs = cfg.specs()?;
    let vcfg = cfg.vectorize_config()?;
    if !(0.0..=1.0).contains(&cfg.train_ratio) || cfg.train_ratio == 0.0 {
        return Err(usage("--train-ratio must be in (0, 1]"));
    }
    let set = DiagramSet::open(&args.input)?;
    let (train, test) = split_train_test(set.len(), cfg.train_ratio, Some(&set.labels), cfg.seed)?;
    let all: Vec<usize> = (0..set.len()).collect();
    let splits: Vec<String> = {
        let mut s = vec![TEST.to_string(); set.len()];
        train.iter().for_each(|&i| s[i] = TRAIN.into());
        s
    };

    prepare_out_dir(&args.out, args.force, &[])?;
    for spec in specs {
        let (rows, layout, grids) = featurize(&set, &train, &all, spec, &vcfg)?;
        let tag = file_tag(&spec.label());
        FeatureFile {
            columns: layout.column_names(),
            index: all.clone(),
            labels: set.labels.clone(),
            splits: splits.clone(),
            rows,
        }
        .write(&args.out.join(format!("features_{tag}.csv")))?;
        write_json(
            &args.out.join(format!("layout_{tag}.json")),
            &LayoutFile {
                transform: spec.label(),
                channels: set.channels.clone(),
                layout,
            },
        )?;
        let named: Vec<ChannelGrid> = set
            .channels
            .iter()
            .zip(&grids)
            .map(|(c, g)| ChannelGrid { channel: c, grid: g })
            .collect();
        write_json(&args.out.join(format!("grids_{tag}.json")), &named)?;
        info!("{}: {} items vectorized", spec.label(), set.len());
    }
    write_json(
        &args.out.join("config.json"),
        &RunRecord {
            input: path_str(&args.input),
            config: &cfg,
            train: &train,
            test: &test,
        },
    )
}

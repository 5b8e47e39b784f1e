use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use qupid_core::learn::{train_forest, FeatureTable, ForestParams, MaxFeatures};
use serde::{Deserialize, Serialize};
use serde_with::skip_serializing_none;

use crate::config::resolve;
use crate::features::{FeatureFile, LayoutFile, TRAIN};
use crate::{path_str, prepare_out_dir, usage, write_json};

#[skip_serializing_none]
#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// Feature CSV written by `vectorize`.
    #[arg(long)]
    #[serde(skip)]
    pub features: PathBuf,
    /// Layout JSON (defaults to the `layout_*.json` next to the feature file).
    #[arg(long)]
    #[serde(skip)]
    pub layout: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub force: bool,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trees: Option<usize>,
    #[arg(long)]
    pub max_features: Option<String>,
    /// Train on every row instead of the rows marked `train`.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub all_rows: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImportanceConfig {
    pub seed: u64,
    pub trees: usize,
    pub max_features: String,
    pub all_rows: bool,
}

impl Default for ImportanceConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trees: 100,
            max_features: "sqrt".into(),
            all_rows: false,
        }
    }
}

/// One coefficient: its column name, channel, segment within the channel and position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub column: String,
    pub channel: String,
    pub segment: String,
    pub row: usize,
    pub col: usize,
    pub importance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSum {
    pub channel: String,
    pub segment: String,
    pub sum: f64,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    features: String,
    transform: &'a str,
    config: &'a ImportanceConfig,
    n_train: usize,
    n_splits: usize,
    segments: Vec<GroupSum>,
    channels: Vec<GroupSum>,
}

/// `dir/features_X.csv` maps to `dir/layout_X.json`.
fn sibling_layout(features: &Path) -> Option<PathBuf> {
    let name = features.file_name()?.to_str()?;
    let tag = name.strip_prefix("features_")?.strip_suffix(".csv")?;
    Some(features.with_file_name(format!("layout_{tag}.json")))
}

/// Splits a layout segment name `{channel}_{segment}` using the known channel names.
fn split_segment<'a>(name: &'a str, channels: &[String]) -> (String, &'a str) {
    channels
        .iter()
        .filter_map(|c| name.strip_prefix(c.as_str())?.strip_prefix('_').map(|rest| (c, rest)))
        .max_by_key(|(c, _)| c.len())
        .map(|(c, rest)| (c.clone(), rest))
        .unwrap_or((String::new(), name))
}

/// Per-coefficient importances labelled through `layout`.
pub fn label_importances(values: &[f64], layout: &LayoutFile) -> anyhow::Result<Vec<Coefficient>> {
    if values.len() != layout.layout.len() {
        bail!("layout describes {} columns but the features have {}", layout.layout.len(), values.len());
    }
    let names = layout.layout.column_names();
    let mut out = Vec::with_capacity(values.len());
    let mut k = 0;
    for seg in &layout.layout.segments {
        let (channel, segment) = split_segment(&seg.name, &layout.channels);
        for i in 0..seg.rows {
            for j in 0..seg.cols {
                out.push(Coefficient {
                    column: names[k].clone(),
                    channel: channel.clone(),
                    segment: segment.to_string(),
                    row: i,
                    col: j,
                    importance: values[k],
                });
                k += 1;
            }
        }
    }
    Ok(out)
}

fn group_sums(coeffs: &[Coefficient], by_segment: bool) -> Vec<GroupSum> {
    let mut out: Vec<GroupSum> = Vec::new();
    for c in coeffs {
        let segment = if by_segment { c.segment.clone() } else { String::new() };
        match out.iter_mut().find(|g| g.channel == c.channel && g.segment == segment) {
            Some(g) => g.sum += c.importance,
            None => out.push(GroupSum {
                channel: c.channel.clone(),
                segment,
                sum: c.importance,
            }),
        }
    }
    out
}

pub fn run(args: Args) -> anyhow::Result<()> {
    let flags = serde_json::to_value(&args)?;
    let cfg = resolve(ImportanceConfig::default(), args.config.as_deref(), flags)?;
    let max_features = match cfg.max_features.as_str() {
        "sqrt" => MaxFeatures::Sqrt,
        "all" => MaxFeatures::All,
        m => return Err(usage(format!("unknown max-features '{m}'"))),
    };
    if cfg.trees == 0 {
        return Err(usage("--trees must be at least 1"));
    }
    let file = FeatureFile::read(&args.features)?;
    let layout_path = match args.layout.clone().or_else(|| sibling_layout(&args.features)) {
        Some(p) => p,
        None => return Err(usage("cannot infer the layout file; pass --layout")),
    };
    let layout = LayoutFile::read(&layout_path).context("a layout file is needed to name coefficients")?;

    let use_all = cfg.all_rows || !file.splits.iter().any(|s| s == TRAIN);
    let idx: Vec<usize> = (0..file.rows.len())
        .filter(|&i| use_all || file.splits[i] == TRAIN)
        .collect();
    let table = FeatureTable::new(
        idx.iter().map(|&i| file.rows[i].clone()).collect(),
        idx.iter().map(|&i| file.labels[i]).collect(),
    )?;
    let model = train_forest(
        &table,
        &ForestParams {
            n_trees: cfg.trees,
            max_features,
            seed: cfg.seed,
            ..ForestParams::default()
        },
    )?;
    let coeffs = label_importances(&model.feature_importance(), &layout)?;

    prepare_out_dir(&args.out, args.force, &["importance.csv", "summary.json"])?;
    let path = args.out.join("importance.csv");
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("cannot write {}", path.display()))?;
    for c in &coeffs {
        w.serialize(c)?;
    }
    w.flush()?;
    write_json(
        &args.out.join("summary.json"),
        &Summary {
            features: path_str(&args.features),
            transform: &layout.transform,
            config: &cfg,
            n_train: idx.len(),
            n_splits: model.trees.iter().map(|t| t.n_splits()).sum(),
            segments: group_sums(&coeffs, true),
            channels: group_sums(&coeffs, false),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use qupid_core::{Layout, Segment};

    #[test]
    fn channel_prefixes_use_longest_match() {
        let ch = vec!["sub_t0.1_h0".to_string(), "sub_t0.1_h0_x".to_string()];
        assert_eq!(split_segment("sub_t0.1_h0_cA", &ch), ("sub_t0.1_h0".into(), "cA"));
        assert_eq!(split_segment("sub_t0.1_h0_x_id", &ch), ("sub_t0.1_h0_x".into(), "id"));
    }

    #[test]
    fn labels_and_sums() {
        let layout = LayoutFile {
            transform: "db1".into(),
            channels: vec!["h0".into(), "h1".into()],
            layout: Layout {
                segments: vec![Segment::new("h0_cH", 1, 2), Segment::new("h1_cA", 1, 1)],
            },
        };
        let c = label_importances(&[0.25, 0.25, 0.5], &layout).unwrap();
        assert_eq!(c[1].column, "h0_cH_0_1");
        assert_eq!(c[2].channel, "h1");
        let sums = group_sums(&c, false);
        assert_eq!(sums[0].sum, 0.5);
        assert!(label_importances(&[1.0], &layout).is_err());
    }

    #[test]
    fn sibling_layout_names() {
        assert_eq!(
            sibling_layout(Path::new("out/features_coif2-log.csv")).unwrap(),
            Path::new("out/layout_coif2-log.json")
        );
        assert!(sibling_layout(Path::new("x.csv")).is_none());
    }
}

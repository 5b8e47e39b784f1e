use std::path::PathBuf;

use anyhow::bail;
use log::info;
use qupid_core::datasets::derive_seed;
use qupid_core::learn::{
    accuracy, default_alpha_candidates, evaluate_holdout, k_fold, split_train_test, train_forest,
    FeatureTable, ForestParams, HoldoutConfig, HoldoutResult, MaxFeatures,
};
use qupid_core::pipeline::{DiagramSet, TransformSpec};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use serde_with::skip_serializing_none;

use crate::config::{parse_pair, resolve, GridSize};
use crate::features::FeatureFile;
use crate::vectorize::VectorizeCmdConfig;
use crate::{path_str, usage, write_json, UsageError};

#[skip_serializing_none]
#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// Diagram directory written by `compute-pd`.
    #[arg(long, conflicts_with = "features", required_unless_present = "features")]
    #[serde(skip)]
    pub input: Option<PathBuf>,
    /// Classify a precomputed feature CSV instead of diagrams.
    #[arg(long)]
    #[serde(skip)]
    pub features: Option<PathBuf>,
    /// Metrics JSON output path.
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Transforms to compare (see `vectorize --transform`).
    #[arg(long = "transform", value_delimiter = ',')]
    #[serde(rename = "transforms")]
    pub transforms: Option<Vec<String>>,
    #[arg(long)]
    pub grid: Option<GridSize>,
    #[arg(long)]
    pub scaling: Option<String>,
    /// Fixed log-grid parameter `a1,a2` (disables the search).
    #[arg(long, value_parser = parse_pair, conflicts_with = "alpha_candidates")]
    #[serde(skip)]
    pub alpha: Option<[f64; 2]>,
    /// Candidates for the cross-validated search, `a,b;c,d;...`.
    #[arg(long, value_parser = parse_pair, value_delimiter = ';')]
    #[serde(skip)]
    pub alpha_candidates: Option<Vec<[f64; 2]>>,
    /// Folds of the alpha search.
    #[arg(long)]
    pub cv_k: Option<usize>,
    /// `holdout` (stratified split) or `kfold`.
    #[arg(long)]
    pub protocol: Option<String>,
    #[arg(long)]
    pub train_ratio: Option<f64>,
    /// Folds of the `kfold` protocol.
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trees: Option<usize>,
    /// `sqrt` or `all`.
    #[arg(long)]
    pub max_features: Option<String>,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long)]
    pub min_leaf: Option<usize>,
    #[arg(long)]
    pub essential: Option<String>,
    /// Also evaluate every transform at each of these grid sizes.
    #[arg(long, value_delimiter = ',')]
    pub ablate_grids: Option<Vec<GridSize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    pub transforms: Vec<String>,
    pub grid: GridSize,
    pub scaling: String,
    pub alpha_candidates: Vec<[f64; 2]>,
    pub cv_k: usize,
    pub protocol: String,
    pub train_ratio: f64,
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    pub trees: usize,
    pub max_features: String,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub essential: String,
    pub ablate_grids: Vec<GridSize>,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            transforms: vec!["id".into(), "fft".into(), "db1".into(), "coif2".into()],
            grid: GridSize { rows: 32, cols: 32 },
            scaling: "log".into(),
            alpha_candidates: default_alpha_candidates(),
            cv_k: 3,
            protocol: "holdout".into(),
            train_ratio: 0.7,
            folds: 10,
            repeats: 3,
            seed: 0,
            trees: 100,
            max_features: "sqrt".into(),
            max_depth: None,
            min_leaf: 1,
            essential: "drop".into(),
            ablate_grids: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Protocol {
    Holdout,
    KFold,
}

impl ClassifyConfig {
    fn protocol(&self) -> anyhow::Result<Protocol> {
        match self.protocol.as_str() {
            "holdout" => Ok(Protocol::Holdout),
            "kfold" => Ok(Protocol::KFold),
            p => Err(usage(format!("unknown protocol '{p}' (expected holdout or kfold)"))),
        }
    }

    fn forest(&self) -> anyhow::Result<ForestParams> {
        let max_features = match self.max_features.as_str() {
            "sqrt" => MaxFeatures::Sqrt,
            "all" => MaxFeatures::All,
            m => return Err(usage(format!("unknown max-features '{m}' (expected sqrt or all)"))),
        };
        if self.trees == 0 {
            return Err(usage("--trees must be at least 1"));
        }
        Ok(ForestParams {
            n_trees: self.trees,
            max_features,
            min_leaf: self.min_leaf.max(1),
            max_depth: self.max_depth,
            seed: 0,
        })
    }

    fn holdout_config(&self, grid: GridSize) -> anyhow::Result<HoldoutConfig> {
        let v = VectorizeCmdConfig {
            transforms: self.transforms.clone(),
            grid,
            scaling: self.scaling.clone(),
            alpha: self.alpha_candidates.first().copied().unwrap_or([1.0, 1.0]),
            train_ratio: self.train_ratio,
            seed: self.seed,
            essential: self.essential.clone(),
        };
        if self.alpha_candidates.is_empty() {
            return Err(usage("alpha candidates must not be empty"));
        }
        Ok(HoldoutConfig {
            vectorize: v.vectorize_config()?,
            forest: self.forest()?,
            alpha_candidates: self.alpha_candidates.clone(),
            cv_k: self.cv_k,
        })
    }
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransformSummary {
    pub transform: String,
    pub grid: GridSize,
    /// One accuracy per repeat (mean over folds for `kfold`).
    pub accuracies: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub runs: Vec<HoldoutResult>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metrics {
    pub config: Value,
    pub results: Vec<TransformSummary>,
    pub ablation: Vec<TransformSummary>,
    /// Total reads of held-out samples before their model was fixed.
    pub test_reads_before_eval: usize,
}

/// (train, test) index pairs per repeat.
fn evaluation_splits(
    labels: &[usize],
    cfg: &ClassifyConfig,
    protocol: Protocol,
) -> anyhow::Result<Vec<Vec<(Vec<usize>, Vec<usize>)>>> {
    let n = labels.len();
    (0..cfg.repeats)
        .map(|r| {
            let seed = derive_seed(cfg.seed, &[r as u64]);
            match protocol {
                Protocol::Holdout => Ok(vec![split_train_test(n, cfg.train_ratio, Some(labels), seed)?]),
                Protocol::KFold => {
                    let folds = k_fold(n, cfg.folds, Some(labels), seed)?;
                    Ok(folds
                        .iter()
                        .map(|test| {
                            let mut in_test = vec![false; n];
                            test.iter().for_each(|&i| in_test[i] = true);
                            ((0..n).filter(|&i| !in_test[i]).collect(), test.clone())
                        })
                        .collect())
                }
            }
        })
        .collect()
}

fn summarize(transform: String, grid: GridSize, per_repeat: Vec<Vec<HoldoutResult>>) -> TransformSummary {
    let accuracies: Vec<f64> = per_repeat
        .iter()
        .map(|runs| runs.iter().map(|r| r.accuracy).sum::<f64>() / runs.len() as f64)
        .collect();
    let (mean, std) = mean_std(&accuracies);
    TransformSummary {
        transform,
        grid,
        accuracies,
        mean,
        std,
        runs: per_repeat.into_iter().flatten().collect(),
    }
}

fn evaluate_diagrams(
    set: &DiagramSet,
    cfg: &ClassifyConfig,
    specs: &[TransformSpec],
    grid: GridSize,
    splits: &[Vec<(Vec<usize>, Vec<usize>)>],
) -> anyhow::Result<Vec<TransformSummary>> {
    let hc = cfg.holdout_config(grid)?;
    let mut out = Vec::new();
    for &spec in specs {
        let mut per_repeat = Vec::new();
        for (r, rep) in splits.iter().enumerate() {
            let mut runs = Vec::new();
            for (f, (train, test)) in rep.iter().enumerate() {
                let seed = derive_seed(cfg.seed, &[r as u64, f as u64 + 1]);
                runs.push(evaluate_holdout(set, train, test, spec, &hc, seed)?);
            }
            per_repeat.push(runs);
        }
        let s = summarize(spec.label(), grid, per_repeat);
        info!("{} {}: {:.4} ± {:.4}", s.transform, grid, s.mean, s.std);
        out.push(s);
    }
    Ok(out)
}

fn evaluate_features(
    file: &FeatureFile,
    cfg: &ClassifyConfig,
    splits: &[Vec<(Vec<usize>, Vec<usize>)>],
) -> anyhow::Result<TransformSummary> {
    let forest = cfg.forest()?;
    let mut per_repeat = Vec::new();
    for (r, rep) in splits.iter().enumerate() {
        let mut runs = Vec::new();
        for (f, (train, test)) in rep.iter().enumerate() {
            let pick = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<usize>) {
                (idx.iter().map(|&i| file.rows[i].clone()).collect(), idx.iter().map(|&i| file.labels[i]).collect())
            };
            let (tr_rows, tr_labels) = pick(train);
            let (te_rows, te_labels) = pick(test);
            let params = ForestParams {
                seed: derive_seed(cfg.seed, &[r as u64, f as u64 + 1, 1]),
                ..forest
            };
            let model = train_forest(&FeatureTable::new(tr_rows, tr_labels)?, &params)?;
            runs.push(HoldoutResult {
                transform: "features".into(),
                alpha: None,
                accuracy: accuracy(&model.predict(&te_rows)?, &te_labels),
                n_train: train.len(),
                n_test: test.len(),
                n_features: file.columns.len(),
                test_reads_before_eval: 0,
                alpha_search: Vec::new(),
            });
        }
        per_repeat.push(runs);
    }
    Ok(summarize("features".into(), cfg.grid, per_repeat))
}

#[derive(Debug, Serialize)]
struct Echo<'a> {
    input: Option<String>,
    features: Option<String>,
    #[serde(flatten)]
    settings: &'a ClassifyConfig,
}

pub fn run(args: Args) -> anyhow::Result<()> {
    let mut flags = serde_json::to_value(&args)?;
    let map = flags.as_object_mut().expect("flags serialize to an object");
    if let Some(a) = args.alpha {
        map.insert("alpha_candidates".into(), serde_json::to_value([a])?);
    }
    if let Some(c) = &args.alpha_candidates {
        map.insert("alpha_candidates".into(), serde_json::to_value(c)?);
    }
    let cfg = resolve(ClassifyConfig::default(), args.config.as_deref(), flags)?;
    let protocol = cfg.protocol()?;
    if cfg.repeats == 0 {
        return Err(usage("--repeats must be at least 1"));
    }

    let (results, ablation, reads) = if let Some(path) = &args.features {
        if !cfg.ablate_grids.is_empty() {
            return Err(usage("--ablate-grids needs diagram input"));
        }
        let file = FeatureFile::read(path)?;
        let splits = evaluation_splits(&file.labels, &cfg, protocol)?;
        (vec![evaluate_features(&file, &cfg, &splits)?], Vec::new(), 0)
    } else {
        let Some(input) = &args.input else {
            return Err(UsageError("either --input or --features is required".into()).into());
        };
        let specs: Vec<TransformSpec> = cfg
            .transforms
            .iter()
            .map(|t| t.parse().map_err(usage))
            .collect::<anyhow::Result<_>>()?;
        if specs.is_empty() {
            return Err(usage("at least one transform is required"));
        }
        let set = DiagramSet::open(input)?;
        let splits = evaluation_splits(&set.labels, &cfg, protocol)?;
        let results = evaluate_diagrams(&set, &cfg, &specs, cfg.grid, &splits)?;
        let mut ablation = Vec::new();
        for &g in &cfg.ablate_grids {
            ablation.extend(evaluate_diagrams(&set, &cfg, &specs, g, &splits)?);
        }
        let reads = results
            .iter()
            .chain(&ablation)
            .flat_map(|s| &s.runs)
            .map(|r| r.test_reads_before_eval)
            .sum();
        (results, ablation, reads)
    };
    for s in results.iter().chain(&ablation) {
        println!("{:<14} {:>7}  {:.4} ± {:.4}", s.transform, s.grid.to_string(), s.mean, s.std);
    }
    let metrics = Metrics {
        config: serde_json::to_value(Echo {
            input: args.input.as_deref().map(path_str),
            features: args.features.as_deref().map(path_str),
            settings: &cfg,
        })?,
        results,
        ablation,
        test_reads_before_eval: reads,
    };
    write_json(&args.out, &metrics)?;
    if reads > 0 {
        bail!("held-out samples were read {reads} times before evaluation");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_sample_std() {
        assert_eq!(mean_std(&[0.5]), (0.5, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-15);
    }
}

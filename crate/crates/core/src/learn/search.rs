//! Cross-validated choice of the log-grid parameter and held-out evaluation.

use serde::{Deserialize, Serialize};

use super::{accuracy, k_fold, train_forest, FeatureTable, ForestParams};
use crate::datasets::derive_seed;
use crate::error::{Error, Result};
use crate::grid::Scaling;
use crate::pipeline::{featurize, vectorize_indices, DiagramSet, TransformSpec, VectorizeConfig};

/// `{1, 10, 100, 500, 1000}` on both axes.
pub fn default_alpha_candidates() -> Vec<[f64; 2]> {
    let axis = [1.0, 10.0, 100.0, 500.0, 1000.0];
    axis.iter()
        .flat_map(|&a| axis.iter().map(move |&b| [a, b]))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaScore {
    pub alpha: [f64; 2],
    pub fold_accuracy: Vec<f64>,
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSearch {
    pub best: [f64; 2],
    pub table: Vec<AlphaScore>,
}

fn lex_less(a: [f64; 2], b: [f64; 2]) -> bool {
    a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])).is_lt()
}

/// Trains on the rows `train` and scores on the rows `test` of an already vectorized table.
fn fit_score(
    rows: Vec<Vec<f64>>,
    labels: Vec<usize>,
    test_rows: &[Vec<f64>],
    test_labels: &[usize],
    forest: &ForestParams,
) -> Result<f64> {
    let model = train_forest(&FeatureTable::new(rows, labels)?, forest)?;
    Ok(accuracy(&model.predict(test_rows)?, test_labels))
}

/// Picks `alpha` by `cv_k`-fold cross-validation restricted to `train`.
///
/// For each candidate the log grids are refitted on every CV-training fold, so the validation
/// fold never influences its own grid. The best candidate has the highest mean accuracy; ties
/// go to the lexicographically smallest `(alpha_1, alpha_2)`. A single candidate is returned
/// without evaluation.
#[allow(clippy::too_many_arguments)]
pub fn grid_search_alpha(
    set: &DiagramSet,
    train: &[usize],
    spec: TransformSpec,
    cfg: &VectorizeConfig,
    candidates: &[[f64; 2]],
    cv_k: usize,
    forest: &ForestParams,
    seed: u64,
) -> Result<AlphaSearch> {
    let Some(&first) = candidates.first() else {
        return Err(Error::EmptyCandidates);
    };
    if candidates.len() == 1 {
        return Ok(AlphaSearch {
            best: first,
            table: Vec::new(),
        });
    }
    let labels: Vec<usize> = train.iter().map(|&i| set.labels[i]).collect();
    let folds = k_fold(train.len(), cv_k, Some(&labels), derive_seed(seed, &[0]))?;
    let mut table = Vec::with_capacity(candidates.len());
    for &alpha in candidates {
        let c = VectorizeConfig {
            alpha,
            ..cfg.clone()
        };
        let mut fold_accuracy = Vec::with_capacity(folds.len());
        for (f, fold) in folds.iter().enumerate() {
            let in_fold: Vec<bool> = {
                let mut m = vec![false; train.len()];
                fold.iter().for_each(|&p| m[p] = true);
                m
            };
            let fit_idx: Vec<usize> = (0..train.len()).filter(|&p| !in_fold[p]).map(|p| train[p]).collect();
            let val_idx: Vec<usize> = fold.iter().map(|&p| train[p]).collect();
            let (fit_rows, _, grids) = featurize(set, &fit_idx, &fit_idx, spec, &c)?;
            let (val_rows, _) = vectorize_indices(set, &val_idx, &grids, spec.kind, c.essential)?;
            let fit_labels = fit_idx.iter().map(|&i| set.labels[i]).collect();
            let val_labels: Vec<usize> = val_idx.iter().map(|&i| set.labels[i]).collect();
            let params = ForestParams {
                seed: derive_seed(seed, &[1, f as u64]),
                ..*forest
            };
            fold_accuracy.push(fit_score(fit_rows, fit_labels, &val_rows, &val_labels, &params)?);
        }
        let mean_accuracy = fold_accuracy.iter().sum::<f64>() / fold_accuracy.len() as f64;
        table.push(AlphaScore {
            alpha,
            fold_accuracy,
            mean_accuracy,
        });
    }
    let best = table
        .iter()
        .fold(None::<&AlphaScore>, |acc, s| match acc {
            Some(b)
                if b.mean_accuracy > s.mean_accuracy
                    || (b.mean_accuracy == s.mean_accuracy && !lex_less(s.alpha, b.alpha)) =>
            {
                Some(b)
            }
            _ => Some(s),
        })
        .map(|s| s.alpha)
        .unwrap_or(first);
    Ok(AlphaSearch { best, table })
}

/// Outcome of one train/test evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldoutResult {
    pub transform: String,
    pub alpha: Option<[f64; 2]>,
    pub accuracy: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub n_features: usize,
    /// Reads of test samples before the model was fixed; always 0 for a correct protocol.
    pub test_reads_before_eval: usize,
    pub alpha_search: Vec<AlphaScore>,
}

/// Settings for [`evaluate_holdout`].
#[derive(Debug, Clone, PartialEq)]
pub struct HoldoutConfig {
    pub vectorize: VectorizeConfig,
    pub forest: ForestParams,
    /// Searched only for log-scaled transforms; empty means "use `vectorize.alpha`".
    pub alpha_candidates: Vec<[f64; 2]>,
    pub cv_k: usize,
}

/// Seals `test`, chooses alpha and fits grids and the forest on `train` only, then unseals and
/// scores on `test`.
pub fn evaluate_holdout(
    set: &DiagramSet,
    train: &[usize],
    test: &[usize],
    spec: TransformSpec,
    cfg: &HoldoutConfig,
    seed: u64,
) -> Result<HoldoutResult> {
    set.seal(test);
    let reads_before = set.sealed_reads();
    let log = spec.scaling_or(cfg.vectorize.scaling) == Scaling::LogScaled;
    let (alpha, alpha_search) = if log && !cfg.alpha_candidates.is_empty() {
        let s = grid_search_alpha(
            set,
            train,
            spec,
            &cfg.vectorize,
            &cfg.alpha_candidates,
            cfg.cv_k,
            &cfg.forest,
            derive_seed(seed, &[0]),
        )?;
        (s.best, s.table)
    } else {
        (cfg.vectorize.alpha, Vec::new())
    };
    let vcfg = VectorizeConfig {
        alpha,
        ..cfg.vectorize.clone()
    };
    let (train_rows, layout, grids) = featurize(set, train, train, spec, &vcfg)?;
    let train_labels = train.iter().map(|&i| set.labels[i]).collect();
    let forest = ForestParams {
        seed: derive_seed(seed, &[1]),
        ..cfg.forest
    };
    let model = train_forest(&FeatureTable::new(train_rows, train_labels)?, &forest)?;
    let test_reads_before_eval = set.sealed_reads() - reads_before;
    set.unseal_all();
    let (test_rows, _) = vectorize_indices(set, test, &grids, spec.kind, vcfg.essential)?;
    let test_labels: Vec<usize> = test.iter().map(|&i| set.labels[i]).collect();
    let acc = accuracy(&model.predict(&test_rows)?, &test_labels);
    Ok(HoldoutResult {
        transform: spec.label(),
        alpha: log.then_some(alpha),
        accuracy: acc,
        n_train: train.len(),
        n_test: test.len(),
        n_features: layout.len(),
        test_reads_before_eval,
        alpha_search,
    })
}

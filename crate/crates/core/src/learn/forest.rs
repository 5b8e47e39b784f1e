//! CART classification trees on bootstrap samples, combined by majority vote.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FeatureTable;
use crate::datasets::{derive_seed, SeededRng};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    /// `max(1, floor(sqrt(d)))` candidate features per node.
    Sqrt,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_features: MaxFeatures,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_features: MaxFeatures::Sqrt,
            min_leaf: 1,
            max_depth: None,
            seed: 0,
        }
    }
}

impl ForestParams {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        class: usize,
        samples: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        /// Sample-weighted Gini decrease `n g - n_l g_l - n_r g_r`.
        gain: f64,
        samples: usize,
        left: usize,
        right: usize,
    },
}

/// A fitted tree stored as a flat node arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict_row(&self, row: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { class, .. } => return *class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => at = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn n_splits(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Split { .. }))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub n_features: usize,
    pub n_classes: usize,
    pub params: ForestParams,
    pub trees: Vec<Tree>,
}

fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>()
}

/// Majority class; ties go to the smallest label.
fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &n) in counts.iter().enumerate() {
        if n > counts[best] {
            best = c;
        }
    }
    best
}

struct Builder<'a> {
    table: &'a FeatureTable,
    n_classes: usize,
    params: &'a ForestParams,
    mtry: usize,
    rng: SeededRng,
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

impl Builder<'_> {
    fn class_counts(&self, samples: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &s in samples {
            counts[self.table.labels[s]] += 1;
        }
        counts
    }

    /// Lowest weighted child impurity over midpoints of consecutive distinct values of
    /// `feature`, or `None` if the feature is constant on `samples`.
    fn best_threshold(&self, feature: usize, samples: &[usize]) -> Option<(f64, f64)> {
        let mut pairs: Vec<(f64, usize)> = samples
            .iter()
            .map(|&s| (self.table.value(s, feature), self.table.labels[s]))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pairs.first()?.0 == pairs.last()?.0 {
            return None;
        }
        let n = pairs.len();
        let min_leaf = self.params.min_leaf.max(1);
        let mut left = vec![0usize; self.n_classes];
        let mut right = vec![0usize; self.n_classes];
        for &(_, c) in &pairs {
            right[c] += 1;
        }
        let mut best: Option<(f64, f64)> = None;
        for i in 0..n - 1 {
            let c = pairs[i].1;
            left[c] += 1;
            right[c] -= 1;
            if pairs[i].0 == pairs[i + 1].0 {
                continue;
            }
            let (nl, nr) = (i + 1, n - i - 1);
            if nl < min_leaf || nr < min_leaf {
                continue;
            }
            let imp = (nl as f64 * gini(&left, nl) + nr as f64 * gini(&right, nr)) / n as f64;
            if best.is_none_or(|(b, _)| imp < b) {
                let mid = 0.5 * (pairs[i].0 + pairs[i + 1].0);
                // Guard against midpoints rounding up to the right value.
                let thr = if mid < pairs[i + 1].0 { mid } else { pairs[i].0 };
                best = Some((imp, thr));
            }
        }
        best
    }

    fn find_split(&mut self, samples: &[usize]) -> Option<BestSplit> {
        let d = self.table.n_features();
        let mut order: Vec<usize> = (0..d).collect();
        self.rng.shuffle(&mut order);
        let mut tried = 0;
        let mut best: Option<BestSplit> = None;
        for f in order {
            if tried >= self.mtry {
                break;
            }
            let Some((imp, thr)) = self.best_threshold(f, samples) else {
                continue;
            };
            tried += 1;
            if best.as_ref().is_none_or(|b| imp < b.impurity) {
                best = Some(BestSplit {
                    feature: f,
                    threshold: thr,
                    impurity: imp,
                });
            }
        }
        best
    }

    fn build(&mut self, samples: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let counts = self.class_counts(&samples);
        let n = samples.len();
        self.nodes.push(Node::Leaf {
            class: majority(&counts),
            samples: n,
        });
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_capped = self.params.max_depth.is_some_and(|m| depth >= m);
        if pure || depth_capped || n < 2 * self.params.min_leaf.max(1) {
            return id;
        }
        let Some(split) = self.find_split(&samples) else {
            return id;
        };
        let (left, right): (Vec<usize>, Vec<usize>) = samples
            .iter()
            .partition(|&&s| self.table.value(s, split.feature) <= split.threshold);
        let gain = n as f64 * gini(&counts, n) - n as f64 * split.impurity;
        let l = self.build(left, depth + 1);
        let r = self.build(right, depth + 1);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            gain: gain.max(0.0),
            samples: n,
            left: l,
            right: r,
        };
        id
    }
}

fn n_classes_of(labels: &[usize]) -> usize {
    labels.iter().max().map_or(0, |m| m + 1)
}

/// Bootstrap sample (with replacement, size `n`) drawn from the tree's stream.
pub fn bootstrap_indices(n: usize, rng: &mut SeededRng) -> Vec<usize> {
    (0..n).map(|_| rng.below(n)).collect()
}

fn fit_tree(table: &FeatureTable, n_classes: usize, params: &ForestParams, tree_seed: u64) -> Tree {
    let mut rng = SeededRng::new(tree_seed);
    let samples = bootstrap_indices(table.n_rows(), &mut rng);
    let d = table.n_features();
    let mtry = match params.max_features {
        MaxFeatures::Sqrt => ((d as f64).sqrt().floor() as usize).max(1),
        MaxFeatures::All => d,
    };
    let mut b = Builder {
        table,
        n_classes,
        params,
        mtry,
        rng,
        nodes: Vec::new(),
    };
    b.build(samples, 0);
    Tree { nodes: b.nodes }
}

/// Trains `n_trees` CART trees, tree `k` seeded with `derive_seed(seed, [k])`.
pub fn train_forest(table: &FeatureTable, params: &ForestParams) -> Result<ForestModel> {
    let n_classes = n_classes_of(&table.labels);
    let present = {
        let mut seen = vec![false; n_classes];
        for &l in &table.labels {
            seen[l] = true;
        }
        seen.iter().filter(|&&s| s).count()
    };
    if present < 2 {
        return Err(Error::SingleClass(present));
    }
    if params.n_trees == 0 {
        return Err(Error::InvalidInput("n_trees must be >= 1".into()));
    }
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|k| fit_tree(table, n_classes, params, derive_seed(params.seed, &[k as u64])))
        .collect();
    Ok(ForestModel {
        n_features: table.n_features(),
        n_classes,
        params: *params,
        trees,
    })
}

impl ForestModel {
    /// Majority vote over trees; ties go to the smallest label.
    pub fn predict(&self, rows: &[Vec<f64>]) -> Result<Vec<usize>> {
        rows.iter()
            .map(|row| {
                if row.len() != self.n_features {
                    return Err(Error::DimensionMismatch {
                        expected: self.n_features,
                        got: row.len(),
                    });
                }
                let mut votes = vec![0usize; self.n_classes];
                for t in &self.trees {
                    votes[t.predict_row(row)] += 1;
                }
                Ok(majority(&votes))
            })
            .collect()
    }

    /// Mean sample-weighted Gini decrease per feature, normalized to sum to one.
    /// All zeros when no tree has a split.
    pub fn feature_importance(&self) -> Vec<f64> {
        let mut total = vec![0.0; self.n_features];
        for tree in &self.trees {
            let root_samples = match tree.nodes.first() {
                Some(Node::Leaf { samples, .. }) | Some(Node::Split { samples, .. }) => *samples,
                None => continue,
            };
            for node in &tree.nodes {
                if let Node::Split { feature, gain, .. } = node {
                    total[*feature] += gain / root_samples as f64;
                }
            }
        }
        let sum: f64 = total.iter().sum();
        if sum > 0.0 {
            total.iter_mut().for_each(|v| *v /= sum);
        }
        total
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Fraction of `predicted` equal to `truth`.
pub fn accuracy(predicted: &[usize], truth: &[usize]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}

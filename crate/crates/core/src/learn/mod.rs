//! Random-forest classification and the data splits around it.

mod forest;
mod search;
mod split;

pub use forest::{
    accuracy, bootstrap_indices, train_forest, ForestModel, ForestParams, MaxFeatures, Node, Tree,
};
pub use search::{
    default_alpha_candidates, evaluate_holdout, grid_search_alpha, AlphaScore, AlphaSearch,
    HoldoutConfig, HoldoutResult,
};
pub use split::{k_fold, split_train_test};

use crate::error::{Error, Result};

/// Dense row-major feature matrix with one class label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    n_features: usize,
    data: Vec<f64>,
    pub labels: Vec<usize>,
}

impl FeatureTable {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("feature table has no rows".into()));
        }
        if rows.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                got: labels.len(),
            });
        }
        let n_features = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * n_features);
        for row in &rows {
            if row.len() != n_features {
                return Err(Error::DimensionMismatch {
                    expected: n_features,
                    got: row.len(),
                });
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("non-finite feature value {v}")));
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            n_features,
            data,
            labels,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.data[row * self.n_features + feature]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.n_features..(row + 1) * self.n_features]
    }

    pub fn row_vecs(&self) -> Vec<Vec<f64>> {
        (0..self.n_rows()).map(|r| self.row(r).to_vec()).collect()
    }

    /// Rows `idx` in the given order.
    pub fn subset(&self, idx: &[usize]) -> Result<Self> {
        Self::new(
            idx.iter().map(|&i| self.row(i).to_vec()).collect(),
            idx.iter().map(|&i| self.labels[i]).collect(),
        )
    }
}

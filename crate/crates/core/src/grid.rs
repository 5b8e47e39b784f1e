//! Quantization grids and the discrete measures they produce.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{io_err, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    Uniform,
    LogScaled,
}

/// Edge sets on the birth and persistence axes.
///
/// Box `(i, j)` is `[b_edges[i], b_edges[i+1]) x [p_edges[j], p_edges[j+1])`, with the
/// last box on each axis extending to `+inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    b_edges: Vec<f64>,
    p_edges: Vec<f64>,
    scaling: Scaling,
    alpha: Option<[f64; 2]>,
}

impl GridSpec {
    pub fn new(
        b_edges: Vec<f64>,
        p_edges: Vec<f64>,
        scaling: Scaling,
        alpha: Option<[f64; 2]>,
    ) -> Result<Self> {
        let grid = Self {
            b_edges,
            p_edges,
            scaling,
            alpha,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn uniform(b_edges: Vec<f64>, p_edges: Vec<f64>) -> Result<Self> {
        Self::new(b_edges, p_edges, Scaling::Uniform, None)
    }

    fn validate(&self) -> Result<()> {
        for (name, edges) in [("b_edges", &self.b_edges), ("p_edges", &self.p_edges)] {
            if edges.is_empty() {
                return Err(Error::InvalidGrid(format!("{name} is empty")));
            }
            if edges.iter().any(|e| !e.is_finite()) {
                return Err(Error::InvalidGrid(format!("{name} has non-finite entries")));
            }
            if edges.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidGrid(format!("{name} is not strictly increasing")));
            }
        }
        match (self.scaling, self.alpha) {
            (Scaling::LogScaled, Some([a1, a2])) if a1 > 0.0 && a2 > 0.0 => Ok(()),
            (Scaling::LogScaled, _) => Err(Error::InvalidGrid(
                "log-scaled grid needs alpha with both entries > 0".into(),
            )),
            (Scaling::Uniform, _) => Ok(()),
        }
    }

    pub fn b_edges(&self) -> &[f64] {
        &self.b_edges
    }

    pub fn p_edges(&self) -> &[f64] {
        &self.p_edges
    }

    pub fn scaling(&self) -> Scaling {
        self.scaling
    }

    pub fn alpha(&self) -> Option<[f64; 2]> {
        self.alpha
    }

    /// Number of birth bins `r`.
    pub fn rows(&self) -> usize {
        self.b_edges.len()
    }

    /// Number of persistence bins `s`.
    pub fn cols(&self) -> usize {
        self.p_edges.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let grid: Self = serde_json::from_str(text)?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_json(&text)
    }
}

/// Non-negative bin masses on an `rows x cols` grid, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedMeasure {
    rows: usize,
    cols: usize,
    masses: Vec<f64>,
}

impl QuantizedMeasure {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            masses: vec![0.0; rows * cols],
        }
    }

    /// Builds a measure from row-major masses. Entries must be finite and non-negative.
    pub fn from_vec(rows: usize, cols: usize, masses: Vec<f64>) -> Result<Self> {
        if masses.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: masses.len(),
            });
        }
        if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::InvalidInput(
                "masses must be finite and non-negative".into(),
            ));
        }
        Ok(Self { rows, cols, masses })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let s = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != s) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        Self::from_vec(r, s, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.masses[i * self.cols + j]
    }

    pub(crate) fn add(&mut self, i: usize, j: usize, mass: f64) {
        self.masses[i * self.cols + j] += mass;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_increasing_edges() {
        assert!(GridSpec::uniform(vec![0.0, 0.0], vec![0.0]).is_err());
        assert!(GridSpec::uniform(vec![], vec![0.0]).is_err());
        assert!(GridSpec::new(vec![0.0], vec![0.0], Scaling::LogScaled, None).is_err());
        assert!(GridSpec::new(vec![0.0], vec![0.0], Scaling::LogScaled, Some([1.0, 0.0])).is_err());
    }

    #[test]
    fn json_field_names() {
        let g = GridSpec::new(vec![0.0, 0.5], vec![0.0], Scaling::LogScaled, Some([500.0, 500.0]))
            .unwrap();
        let v: serde_json::Value = serde_json::from_str(&g.to_json().unwrap()).unwrap();
        assert_eq!(v["scaling"], "log_scaled");
        assert_eq!(v["alpha"][0], 500.0);
        assert_eq!(v["b_edges"][1], 0.5);
        assert_eq!(GridSpec::from_json(&g.to_json().unwrap()).unwrap(), g);
    }

    #[test]
    fn measure_rejects_negative() {
        assert!(QuantizedMeasure::from_vec(1, 1, vec![-1.0]).is_err());
        assert!(QuantizedMeasure::from_vec(1, 2, vec![1.0]).is_err());
    }
}

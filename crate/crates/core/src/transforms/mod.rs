//! Discrete transforms turning a quantized measure into a flat real feature vector.
//!
//! Three families are provided: the identity (bin masses as-is), the 2-D discrete Fourier
//! transform (magnitude and phase), and single-level 2-D orthogonal wavelet transforms from
//! the Daubechies and Coiflet families.

mod fourier;
mod wavelet;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::QuantizedMeasure;

pub use fourier::{dft2d, transform_fourier, ComplexMatrix};
pub use wavelet::{
    dwt2_single_level, idwt2_single_level, transform_wavelet, wavelet_filters, FilterPair,
    Subbands,
};

pub use rustfft::num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TransformKind {
    Identity,
    Fourier,
    Daubechies(u8),
    Coiflet(u8),
}

impl TransformKind {
    /// Every transform the pipeline knows about, in table order.
    pub const ALL: [TransformKind; 8] = [
        TransformKind::Identity,
        TransformKind::Fourier,
        TransformKind::Daubechies(1),
        TransformKind::Daubechies(2),
        TransformKind::Daubechies(3),
        TransformKind::Coiflet(1),
        TransformKind::Coiflet(2),
        TransformKind::Coiflet(3),
    ];

    pub fn is_wavelet(&self) -> bool {
        matches!(self, Self::Daubechies(_) | Self::Coiflet(_))
    }

    /// Short name used on the command line and in output files.
    pub fn name(&self) -> String {
        match self {
            Self::Identity => "id".into(),
            Self::Fourier => "fft".into(),
            Self::Daubechies(p) => format!("db{p}"),
            Self::Coiflet(p) => format!("coif{p}"),
        }
    }

    /// Length of the feature vector produced for an `rows x cols` measure.
    pub fn output_len(&self, rows: usize, cols: usize) -> usize {
        match self {
            Self::Identity => rows * cols,
            Self::Fourier => 2 * rows * cols,
            Self::Daubechies(_) | Self::Coiflet(_) => 4 * rows.div_ceil(2) * cols.div_ceil(2),
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let order = |digits: &str, family: &'static str| -> Result<u8> {
            let p: u8 = digits
                .parse()
                .map_err(|_| Error::UnknownTransform(s.clone()))?;
            if (1..=3).contains(&p) {
                Ok(p)
            } else {
                Err(Error::UnsupportedOrder { family, order: p })
            }
        };
        match s.as_str() {
            "id" | "identity" => Ok(Self::Identity),
            "fft" | "fourier" => Ok(Self::Fourier),
            "haar" => Ok(Self::Daubechies(1)),
            _ => {
                if let Some(d) = s.strip_prefix("db") {
                    Ok(Self::Daubechies(order(d, "daubechies")?))
                } else if let Some(d) = s.strip_prefix("coif") {
                    Ok(Self::Coiflet(order(d, "coiflet")?))
                } else {
                    Err(Error::UnknownTransform(s))
                }
            }
        }
    }
}

impl TryFrom<String> for TransformKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TransformKind> for String {
    fn from(k: TransformKind) -> String {
        k.name()
    }
}

/// A named rectangular block inside a feature vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
}

impl Segment {
    pub fn new(name: impl Into<String>, rows: usize, cols: usize) -> Self {
        Self {
            name: name.into(),
            rows,
            cols,
        }
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Ordered list of segments describing how a feature vector is laid out.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub segments: Vec<Segment>,
}

impl Layout {
    pub fn len(&self) -> usize {
        self.segments.iter().map(Segment::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Column names `{segment}_{i}_{j}` in row-major order within each segment.
    pub fn column_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.len());
        for seg in &self.segments {
            for i in 0..seg.rows {
                for j in 0..seg.cols {
                    names.push(format!("{}_{i}_{j}", seg.name));
                }
            }
        }
        names
    }

    /// Same layout with every segment name prefixed by `prefix_`.
    pub fn prefixed(&self, prefix: &str) -> Layout {
        Layout {
            segments: self
                .segments
                .iter()
                .map(|s| Segment::new(format!("{prefix}_{}", s.name), s.rows, s.cols))
                .collect(),
        }
    }

    pub fn extend(&mut self, other: Layout) {
        self.segments.extend(other.segments);
    }
}

/// Flat real output of a discrete transform together with its layout.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
    layout: Layout,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, layout: Layout) -> Result<Self> {
        if values.len() != layout.len() {
            return Err(Error::DimensionMismatch {
                expected: layout.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("feature vector has non-finite entries".into()));
        }
        Ok(Self { values, layout })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn into_parts(self) -> (Vec<f64>, Layout) {
        (self.values, self.layout)
    }
}

/// Row-major flattening of the bin masses.
pub fn transform_identity(m: &QuantizedMeasure) -> FeatureVector {
    let layout = Layout {
        segments: vec![Segment::new("id", m.rows(), m.cols())],
    };
    FeatureVector::new(m.as_slice().to_vec(), layout).expect("measure entries are finite")
}

/// Dispatches to the transform selected by `kind`.
pub fn apply(m: &QuantizedMeasure, kind: TransformKind) -> Result<FeatureVector> {
    match kind {
        TransformKind::Identity => Ok(transform_identity(m)),
        TransformKind::Fourier => Ok(transform_fourier(m)),
        TransformKind::Daubechies(_) | TransformKind::Coiflet(_) => transform_wavelet(m, kind),
    }
}

//! Vectorization of persistence diagrams by quantization on a grid followed by a discrete
//! transform (identity, Fourier, or orthogonal wavelets), together with the desk-scale
//! machinery needed to exercise it end to end: Vietoris–Rips and graph persistence, synthetic
//! datasets, and a random-forest classifier.

pub mod datasets;
pub mod diagram;
pub mod error;
pub mod grid;
pub mod homology;
pub mod learn;
pub mod pipeline;
pub mod quantize;
pub mod transforms;

pub use diagram::{to_birth_persistence, BPPoint, DiagramPoint, InfinitePolicy, PersistenceDiagram};
pub use error::{Error, Result};
pub use grid::{GridSpec, QuantizedMeasure, Scaling};
pub use quantize::{build_log_grid, build_uniform_grid, log_rescale, quantize, quantize_points};
pub use transforms::{apply, FeatureVector, Layout, Segment, TransformKind};

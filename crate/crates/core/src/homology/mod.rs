//! Desk-scale persistent homology.
//!
//! Point clouds go through the Vietoris–Rips filtration (degree 0 via Kruskal, degree 1 via
//! boundary-matrix reduction over GF(2)). Graphs carry a vertex function, typically the heat
//! kernel signature, and are filtered by lower-star sublevel or superlevel sets.

mod graph;
mod hks;
mod rips;
mod union_find;

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{io_err, Error, Result};

pub use graph::{extend_to_edges, graph_superlevel_persistence, graph_sublevel_persistence};
pub use hks::{hks, jacobi_eigen, normalized_laplacian, SymmetricEigen};
pub use rips::{rips_h0, rips_h1, RIPS_TRIANGLE_BUDGET};
pub use union_find::UnionFind;

/// Points in `R^dim`, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("point dimension must be >= 1".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: coords.len().next_multiple_of(dim),
                got: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("coordinates must be finite".into()));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(1, Vec::len);
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidInput("points have mixed dimensions".into()));
        }
        Self::new(dim, points.concat())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.point(i)
            .iter()
            .zip(self.point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// First `n` points (or all of them).
    pub fn truncated(&self, n: usize) -> PointCloud {
        let n = n.min(self.len());
        PointCloud {
            dim: self.dim,
            coords: self.coords[..n * self.dim].to_vec(),
        }
    }

    /// One row per point, comma-separated coordinates, no header.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for i in 0..self.len() {
            for (k, c) in self.point(i).iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{c}");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(text: &str, origin: &Path) -> Result<Self> {
        let mut points = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse {
                    path: origin.to_path_buf(),
                    msg: format!("line {}: {e}", n + 1),
                })?;
            points.push(row);
        }
        Self::from_points(&points).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            msg: e.to_string(),
        })
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::parse_csv(&text, path)
    }
}

/// Simple undirected graph without self-loops or repeated edges.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl WeightedGraph {
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for &(u, v) in &edges {
            if u >= n_vertices || v >= n_vertices {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) out of range for {n_vertices} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at vertex {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidInput(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(Self { n_vertices, edges })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_vertices];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Number of connected components.
    pub fn components(&self) -> usize {
        let mut uf = UnionFind::new(self.n_vertices);
        for &(u, v) in &self.edges {
            uf.union(u, v);
        }
        uf.count()
    }

    /// First line `n_vertices`, then one `u v` line per edge.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n_vertices);
        for (u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let perr = |msg: String| Error::Parse {
            path: origin.to_path_buf(),
            msg,
        };
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| perr("missing vertex count".into()))?
            .parse()
            .map_err(|e| perr(format!("vertex count: {e}")))?;
        let mut edges = Vec::new();
        for line in lines {
            let mut it = line.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
                _ => return Err(perr(format!("bad edge line {line:?}"))),
            }
        }
        Self::new(n, edges).map_err(|e| perr(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::parse(&text, path)
    }
}

/// One real value per vertex of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction {
    values: Vec<f64>,
}

impl VertexFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("vertex values must be finite".into()));
        }
        Ok(Self { values })
    }

    pub fn for_graph(g: &WeightedGraph, values: Vec<f64>) -> Result<Self> {
        if values.len() != g.n_vertices() {
            return Err(Error::DimensionMismatch {
                expected: g.n_vertices(),
                got: values.len(),
            });
        }
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

//! Synthetic labelled datasets and their on-disk layout.

mod io;
mod rng;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homology::{PointCloud, WeightedGraph};

pub use io::{
    list_items, read_cloud_dataset, read_graph_dataset, read_manifest, write_cloud_dataset,
    write_graph_dataset, DatasetManifest, ItemRef, MANIFEST_FILE,
};
pub use rng::{derive_seed, SeededRng};

/// The five parameter values of the ORBIT5K benchmark.
pub const ORBIT_RHOS: [f64; 5] = [2.5, 3.5, 4.0, 4.1, 4.3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitParams {
    pub rho: f64,
    pub n_points: usize,
    pub seed: u64,
}

impl OrbitParams {
    pub fn new(rho: f64, n_points: usize, seed: u64) -> Result<Self> {
        if !(rho > 0.0) || n_points == 0 {
            return Err(Error::InvalidInput(format!(
                "orbit needs rho > 0 and n_points >= 1, got rho={rho}, n_points={n_points}"
            )));
        }
        Ok(Self {
            rho,
            n_points,
            seed,
        })
    }
}

/// Clouds with integer class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCloudSet {
    pub clouds: Vec<PointCloud>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
}

impl LabeledCloudSet {
    pub fn len(&self) -> usize {
        self.clouds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clouds.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }
}

/// Orbit of the linked twist map started at `(x0, y0)`:
/// `x <- x + rho y (1 - y) mod 1`, then `y <- y + rho x (1 - x) mod 1` with the updated `x`.
/// The starting point is the first of the `n_points` returned.
pub fn orbit_from(x0: f64, y0: f64, rho: f64, n_points: usize) -> PointCloud {
    let mut coords = Vec::with_capacity(2 * n_points);
    let (mut x, mut y) = (x0, y0);
    for k in 0..n_points {
        if k > 0 {
            x = (x + rho * y * (1.0 - y)) % 1.0;
            y = (y + rho * x * (1.0 - x)) % 1.0;
        }
        coords.push(x);
        coords.push(y);
    }
    PointCloud::new(2, coords).expect("orbit coordinates are finite")
}

/// Orbit whose starting point is drawn uniformly from `[0, 1)^2` with the params' seed.
pub fn generate_orbit(p: &OrbitParams) -> PointCloud {
    let mut rng = SeededRng::new(p.seed);
    let x0 = rng.next_f64();
    let y0 = rng.next_f64();
    orbit_from(x0, y0, p.rho, p.n_points)
}

/// `per_class` orbits for each value in `rhos`; cloud `i` of class `c` uses the seed
/// `derive_seed(seed, [c, i])`.
pub fn generate_orbit_dataset(
    rhos: &[f64],
    per_class: usize,
    n_points: usize,
    seed: u64,
) -> Result<LabeledCloudSet> {
    let mut clouds = Vec::with_capacity(rhos.len() * per_class);
    let mut labels = Vec::with_capacity(rhos.len() * per_class);
    for (c, &rho) in rhos.iter().enumerate() {
        for i in 0..per_class {
            let params = OrbitParams::new(rho, n_points, derive_seed(seed, &[c as u64, i as u64]))?;
            clouds.push(generate_orbit(&params));
            labels.push(c);
        }
    }
    Ok(LabeledCloudSet {
        clouds,
        labels,
        class_names: rhos.iter().map(|r| format!("rho={r}")).collect(),
    })
}

/// Geometric pattern families used as a stand-in for external point-cloud data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PatternClass {
    /// Points on circles with Gaussian radial jitter, plus a fraction of uniform background.
    CirclesPlusNoise {
        circles: Vec<([f64; 2], f64)>,
        jitter: f64,
        background: f64,
    },
    /// Isotropic Gaussian blobs around `centers` with standard deviation `sigma`.
    Clusters { centers: Vec<[f64; 2]>, sigma: f64 },
    /// Uniform in the unit square.
    Uniform,
}

impl PatternClass {
    pub fn name(&self) -> &'static str {
        match self {
            Self::CirclesPlusNoise { .. } => "circles",
            Self::Clusters { .. } => "clusters",
            Self::Uniform => "uniform",
        }
    }

    fn sample(&self, n: usize, rng: &mut SeededRng) -> PointCloud {
        let mut coords = Vec::with_capacity(2 * n);
        match self {
            Self::CirclesPlusNoise {
                circles,
                jitter,
                background,
            } => {
                for _ in 0..n {
                    if circles.is_empty() || rng.next_f64() < *background {
                        coords.push(rng.next_f64());
                        coords.push(rng.next_f64());
                        continue;
                    }
                    let (centre, radius) = circles[rng.below(circles.len())];
                    let angle = std::f64::consts::TAU * rng.next_f64();
                    let r = radius + jitter * rng.normal();
                    coords.push(centre[0] + r * angle.cos());
                    coords.push(centre[1] + r * angle.sin());
                }
            }
            Self::Clusters { centers, sigma } => {
                for _ in 0..n {
                    let c = centers[rng.below(centers.len())];
                    coords.push(c[0] + sigma * rng.normal());
                    coords.push(c[1] + sigma * rng.normal());
                }
            }
            Self::Uniform => {
                for _ in 0..2 * n {
                    coords.push(rng.next_f64());
                }
            }
        }
        PointCloud::new(2, coords).expect("samples are finite")
    }
}

impl FromStr for PatternClass {
    type Err = Error;

    /// Default parameters for each named family.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "circles" => Ok(Self::CirclesPlusNoise {
                circles: vec![([0.3, 0.5], 0.18), ([0.72, 0.5], 0.12)],
                jitter: 0.01,
                background: 0.1,
            }),
            "clusters" => Ok(Self::Clusters {
                centers: vec![[0.25, 0.3], [0.7, 0.35], [0.5, 0.75]],
                sigma: 0.05,
            }),
            "uniform" => Ok(Self::Uniform),
            other => Err(Error::InvalidInput(format!(
                "unknown pattern class {other:?} (expected circles, clusters or uniform)"
            ))),
        }
    }
}

/// `per_class` clouds of `n_points` for each pattern class, labelled by position in `classes`.
pub fn generate_pattern_set(
    classes: &[PatternClass],
    per_class: usize,
    n_points: usize,
    seed: u64,
) -> Result<LabeledCloudSet> {
    let no_centres = |c: &PatternClass| matches!(c, PatternClass::Clusters { centers, .. } if centers.is_empty());
    if classes.iter().any(no_centres) {
        return Err(Error::InvalidInput("cluster pattern needs at least one centre".into()));
    }
    let mut clouds = Vec::new();
    let mut labels = Vec::new();
    for (c, class) in classes.iter().enumerate() {
        for i in 0..per_class {
            let mut rng = SeededRng::new(derive_seed(seed, &[c as u64, i as u64]));
            clouds.push(class.sample(n_points, &mut rng));
            labels.push(c);
        }
    }
    Ok(LabeledCloudSet {
        clouds,
        labels,
        class_names: classes.iter().map(|c| c.name().to_string()).collect(),
    })
}

/// Random graph families for exercising the graph pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphClass {
    /// Erdős–Rényi graph with edge probability `4 / n`.
    Random,
    /// Ring where every vertex links to its two nearest neighbours on each side.
    RingLattice,
    /// Star-like trees grown by preferential attachment.
    Tree,
}

impl FromStr for GraphClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "random" => Ok(Self::Random),
            "ring" => Ok(Self::RingLattice),
            "tree" => Ok(Self::Tree),
            other => Err(Error::InvalidInput(format!(
                "unknown graph class {other:?} (expected random, ring or tree)"
            ))),
        }
    }
}

impl GraphClass {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Random => "random",
            Self::RingLattice => "ring",
            Self::Tree => "tree",
        }
    }

    pub fn sample(&self, n: usize, rng: &mut SeededRng) -> WeightedGraph {
        let mut edges = Vec::new();
        match self {
            Self::Random => {
                let p = (4.0 / n.max(1) as f64).min(1.0);
                for u in 0..n {
                    for v in u + 1..n {
                        if rng.next_f64() < p {
                            edges.push((u, v));
                        }
                    }
                }
            }
            Self::RingLattice => {
                let mut set = std::collections::BTreeSet::new();
                for u in 0..n {
                    for k in 1..=2 {
                        let v = (u + k) % n;
                        if u != v {
                            set.insert((u.min(v), u.max(v)));
                        }
                    }
                }
                edges.extend(set);
            }
            Self::Tree => {
                let mut degree_list = Vec::new();
                for v in 1..n {
                    let u = if degree_list.is_empty() {
                        0
                    } else {
                        degree_list[rng.below(degree_list.len())]
                    };
                    edges.push((u, v));
                    degree_list.push(u);
                    degree_list.push(v);
                }
            }
        }
        WeightedGraph::new(n, edges).expect("generated edges are valid")
    }
}

/// `per_class` graphs of `n_vertices` for each class.
pub fn generate_graph_set(
    classes: &[GraphClass],
    per_class: usize,
    n_vertices: usize,
    seed: u64,
) -> (Vec<WeightedGraph>, Vec<usize>) {
    let mut graphs = Vec::new();
    let mut labels = Vec::new();
    for (c, class) in classes.iter().enumerate() {
        for i in 0..per_class {
            let mut rng = SeededRng::new(derive_seed(seed, &[c as u64, i as u64]));
            graphs.push(class.sample(n_vertices, &mut rng));
            labels.push(c);
        }
    }
    (graphs, labels)
}

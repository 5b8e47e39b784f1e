//! Persistence diagrams and the birth–persistence change of coordinates.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{io_err, Error, Result};

/// A single (birth, death) pair. `death` may be `+inf` for essential classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramPoint {
    birth: f64,
    death: f64,
}

impl DiagramPoint {
    pub fn new(birth: f64, death: f64) -> Result<Self> {
        if !birth.is_finite() {
            return Err(Error::InvalidPoint {
                birth,
                death,
                reason: "birth must be finite",
            });
        }
        if death.is_nan() || death == f64::NEG_INFINITY || death < birth {
            return Err(Error::InvalidPoint {
                birth,
                death,
                reason: "death must be >= birth",
            });
        }
        Ok(Self { birth, death })
    }

    /// Essential class born at `birth`.
    pub fn essential(birth: f64) -> Result<Self> {
        Self::new(birth, f64::INFINITY)
    }

    pub fn birth(&self) -> f64 {
        self.birth
    }

    pub fn death(&self) -> f64 {
        self.death
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

/// How points with infinite death are handled when leaving diagram space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "policy", content = "value", rename_all = "snake_case")]
pub enum InfinitePolicy {
    #[default]
    Drop,
    ClampTo(f64),
}

/// A finite multiset of diagram points in a fixed homology degree, stored as a flat list.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    degree: usize,
    points: Vec<DiagramPoint>,
}

impl PersistenceDiagram {
    pub fn new(degree: usize, points: Vec<DiagramPoint>) -> Self {
        Self { degree, points }
    }

    pub fn empty(degree: usize) -> Self {
        Self::new(degree, Vec::new())
    }

    /// Builds a diagram from raw pairs, validating each one.
    pub fn from_pairs(degree: usize, pairs: &[(f64, f64)]) -> Result<Self> {
        let points = pairs
            .iter()
            .map(|&(b, d)| DiagramPoint::new(b, d))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(degree, points))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn points(&self) -> &[DiagramPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn push(&mut self, point: DiagramPoint) {
        self.points.push(point);
    }

    pub fn essential_count(&self) -> usize {
        self.points.iter().filter(|p| p.is_essential()).count()
    }

    /// Points sorted by (birth, death); the canonical form used for equality.
    pub fn sorted_points(&self) -> Vec<DiagramPoint> {
        let mut pts = self.points.clone();
        pts.sort_by(|a, b| {
            a.birth
                .total_cmp(&b.birth)
                .then(a.death.total_cmp(&b.death))
        });
        pts
    }

    /// Largest finite value (birth or death) appearing in the diagram.
    pub fn max_finite_value(&self) -> Option<f64> {
        self.points
            .iter()
            .flat_map(|p| [Some(p.birth), p.death.is_finite().then_some(p.death)])
            .flatten()
            .reduce(f64::max)
    }

    /// Writes the diagram as `birth,death` CSV, using `inf` for essential classes.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("birth,death\n");
        for p in &self.points {
            if p.death.is_infinite() {
                let _ = writeln!(out, "{},inf", p.birth);
            } else {
                let _ = writeln!(out, "{},{}", p.birth, p.death);
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(io_err(path))
    }

    pub fn parse_csv(degree: usize, text: &str, origin: &Path) -> Result<Self> {
        let parse_err = |line: usize, msg: String| Error::Parse {
            path: origin.to_path_buf(),
            msg: format!("line {line}: {msg}"),
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim() == "birth,death" => {}
            Some((_, header)) => {
                return Err(parse_err(1, format!("expected header birth,death, got {header:?}")))
            }
            None => return Err(parse_err(1, "missing header".into())),
        }
        let mut points = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (b, d) = line
                .split_once(',')
                .ok_or_else(|| parse_err(i + 1, format!("expected two fields in {line:?}")))?;
            let birth = parse_value(b).map_err(|m| parse_err(i + 1, m))?;
            let death = parse_value(d).map_err(|m| parse_err(i + 1, m))?;
            points.push(DiagramPoint::new(birth, death).map_err(|e| parse_err(i + 1, e.to_string()))?);
        }
        Ok(Self::new(degree, points))
    }

    /// Reads a diagram file; the degree comes from the `_h{k}.csv` filename suffix.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let degree = degree_from_filename(path).ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            msg: "filename must end in _h{k}.csv".into(),
        })?;
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::parse_csv(degree, &text, path)
    }
}

impl PartialEq for PersistenceDiagram {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.sorted_points() == other.sorted_points()
    }
}

fn parse_value(field: &str) -> std::result::Result<f64, String> {
    match field.trim() {
        "inf" | "+inf" | "Inf" | "infinity" => Ok(f64::INFINITY),
        s => s.parse::<f64>().map_err(|e| format!("{s:?}: {e}")),
    }
}

/// Extracts `k` from a path ending in `_h{k}.csv`.
pub fn degree_from_filename(path: &Path) -> Option<usize> {
    let name = path.file_name()?.to_str()?;
    let stem = name.strip_suffix(".csv")?;
    let (_, k) = stem.rsplit_once("_h")?;
    k.parse().ok()
}

/// A point in birth–persistence coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BPPoint {
    pub b: f64,
    pub p: f64,
}

impl BPPoint {
    pub fn new(b: f64, p: f64) -> Self {
        debug_assert!(p >= 0.0, "persistence must be non-negative");
        Self { b, p }
    }
}

/// Maps each (birth, death) to (birth, death - birth).
///
/// Essential points are dropped or clamped per `policy`; multiplicities are kept.
pub fn to_birth_persistence(
    diagram: &PersistenceDiagram,
    policy: InfinitePolicy,
) -> Result<Vec<BPPoint>> {
    let mut out = Vec::with_capacity(diagram.len());
    for pt in diagram.points() {
        let death = if pt.is_essential() {
            match policy {
                InfinitePolicy::Drop => continue,
                InfinitePolicy::ClampTo(v) => {
                    if v < pt.birth {
                        return Err(Error::ClampBelowBirth {
                            clamp: v,
                            birth: pt.birth,
                        });
                    }
                    v
                }
            }
        } else {
            pt.death
        };
        out.push(BPPoint::new(pt.birth, death - pt.birth));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_maps_to_empty() {
        let d = PersistenceDiagram::empty(1);
        assert!(to_birth_persistence(&d, InfinitePolicy::Drop).unwrap().is_empty());
    }

    #[test]
    fn single_point_shift() {
        let d = PersistenceDiagram::from_pairs(1, &[(0.2, 0.5)]).unwrap();
        let bp = to_birth_persistence(&d, InfinitePolicy::Drop).unwrap();
        assert_eq!(bp.len(), 1);
        assert_eq!(bp[0].b, 0.2);
        assert!((bp[0].p - 0.3).abs() < 1e-15);
    }

    #[test]
    fn drop_policy_removes_essential() {
        let d = PersistenceDiagram::from_pairs(0, &[(0.0, f64::INFINITY), (0.0, 1.0)]).unwrap();
        let bp = to_birth_persistence(&d, InfinitePolicy::Drop).unwrap();
        assert_eq!(bp, vec![BPPoint::new(0.0, 1.0)]);
    }

    #[test]
    fn clamp_policy_and_error() {
        let d = PersistenceDiagram::from_pairs(0, &[(0.5, f64::INFINITY)]).unwrap();
        let bp = to_birth_persistence(&d, InfinitePolicy::ClampTo(2.0)).unwrap();
        assert_eq!(bp, vec![BPPoint::new(0.5, 1.5)]);
        let err = to_birth_persistence(&d, InfinitePolicy::ClampTo(0.1)).unwrap_err();
        assert!(err.to_string().contains("clamp below birth"));
    }

    #[test]
    fn rejects_bad_points() {
        assert!(DiagramPoint::new(1.0, 0.5).is_err());
        assert!(DiagramPoint::new(f64::INFINITY, f64::INFINITY).is_err());
        assert!(DiagramPoint::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn csv_roundtrip_with_inf() {
        let d = PersistenceDiagram::from_pairs(1, &[(0.25, 0.75), (0.0, f64::INFINITY)]).unwrap();
        let text = d.to_csv_string();
        assert_eq!(text, "birth,death\n0.25,0.75\n0,inf\n");
        let back = PersistenceDiagram::parse_csv(1, &text, Path::new("x_h1.csv")).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn degree_suffix() {
        assert_eq!(degree_from_filename(Path::new("a/3_h1.csv")), Some(1));
        assert_eq!(degree_from_filename(Path::new("a/3_sub_t0.1_h0.csv")), Some(0));
        assert_eq!(degree_from_filename(Path::new("a/3.csv")), None);
    }

    #[test]
    fn equality_ignores_order() {
        let a = PersistenceDiagram::from_pairs(0, &[(0.0, 1.0), (0.0, 2.0)]).unwrap();
        let b = PersistenceDiagram::from_pairs(0, &[(0.0, 2.0), (0.0, 1.0)]).unwrap();
        assert_eq!(a, b);
    }

    fn arb_diagram() -> impl Strategy<Value = PersistenceDiagram> {
        prop::collection::vec((0.0f64..10.0, 0.0f64..10.0, prop::bool::weighted(0.2)), 0..40).prop_map(
            |v| {
                let pts = v
                    .into_iter()
                    .map(|(b, l, inf)| {
                        DiagramPoint::new(b, if inf { f64::INFINITY } else { b + l }).unwrap()
                    })
                    .collect();
                PersistenceDiagram::new(1, pts)
            },
        )
    }

    proptest! {
        #[test]
        fn cardinality_under_policies(d in arb_diagram()) {
            let dropped = to_birth_persistence(&d, InfinitePolicy::Drop).unwrap();
            prop_assert_eq!(dropped.len(), d.len() - d.essential_count());
            let clamped = to_birth_persistence(&d, InfinitePolicy::ClampTo(100.0)).unwrap();
            prop_assert_eq!(clamped.len(), d.len());
            prop_assert!(clamped.iter().chain(dropped.iter()).all(|p| p.p >= 0.0));
        }
    }
}

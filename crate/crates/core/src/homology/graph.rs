use super::{UnionFind, VertexFunction, WeightedGraph};
use crate::diagram::PersistenceDiagram;
use crate::error::{Error, Result};

/// Per-edge value `max(f(u), f(v))`.
pub fn extend_to_edges(g: &WeightedGraph, f: &VertexFunction) -> Result<Vec<f64>> {
    check(g, f)?;
    let vals = f.values();
    Ok(g.edges().iter().map(|&(u, v)| vals[u].max(vals[v])).collect())
}

fn check(g: &WeightedGraph, f: &VertexFunction) -> Result<()> {
    if f.len() != g.n_vertices() {
        return Err(Error::DimensionMismatch {
            expected: g.n_vertices(),
            got: f.len(),
        });
    }
    Ok(())
}

/// Lower-star persistence of `values` on `g`, with essential classes clamped to `clamp`.
///
/// Returns raw `(birth, death)` pairs for degree 0 and degree 1.
fn lower_star(
    g: &WeightedGraph,
    values: &[f64],
    clamp: f64,
) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let n = g.n_vertices();
    let mut h0 = Vec::new();
    let mut h1 = Vec::new();

    // Vertices enter at f(v); edges at the max of their endpoints, after vertices of equal
    // value. Ties are broken by the sorted vertex tuple.
    let mut edges: Vec<(f64, usize, usize)> = g
        .edges()
        .iter()
        .map(|&(u, v)| (values[u].max(values[v]), u.max(v), u.min(v)))
        .collect();
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut uf = UnionFind::new(n);
    // Birth vertex of the component rooted at each representative.
    let oldest: Vec<usize> = (0..n).collect();
    let older = |a: usize, b: usize| (values[a], a) < (values[b], b);

    // Every vertex starts as its own component; only the edges need to be replayed.
    for &(value, hi, lo) in &edges {
        let (ru, rv) = (uf.find(hi), uf.find(lo));
        if ru == rv {
            h1.push((value, clamp));
            continue;
        }
        let (bu, bv) = (oldest[ru], oldest[rv]);
        let (survivor, dying) = if older(bu, bv) { (ru, rv) } else { (rv, ru) };
        let dying_birth = values[oldest[dying]];
        if value > dying_birth {
            h0.push((dying_birth, value));
        }
        uf.attach(dying, survivor);
    }
    let mut roots: Vec<usize> = (0..n).filter(|&v| uf.find(v) == v).collect();
    roots.sort_by_key(|&r| (oldest[r], r));
    for r in roots {
        h0.push((values[oldest[r]], clamp));
    }
    (h0, h1)
}

fn to_diagram(degree: usize, pairs: Vec<(f64, f64)>) -> Result<PersistenceDiagram> {
    PersistenceDiagram::from_pairs(degree, &pairs)
}

fn max_value(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Sublevel-set persistence of the lower-star filtration induced by `f`.
///
/// Degree 0 uses the elder rule (smaller birth survives, ties to the smaller vertex index);
/// every edge closing a cycle starts a degree-1 class. Classes that never die are clamped to
/// the global maximum of `f`. Finite zero-persistence pairs are dropped.
pub fn graph_sublevel_persistence(
    g: &WeightedGraph,
    f: &VertexFunction,
) -> Result<(PersistenceDiagram, PersistenceDiagram)> {
    check(g, f)?;
    let vals = f.values();
    let (h0, h1) = lower_star(g, vals, max_value(vals));
    Ok((to_diagram(0, h0)?, to_diagram(1, h1)?))
}

/// Superlevel-set persistence: lower-star persistence of `-f`, with essential classes clamped
/// to the global minimum of `f`.
///
/// Each class alive on the superlevel interval from `a` down to `c <= a` is reported as the
/// point `(c, a)`, so that coordinates stay in the range of `f` with `birth <= death`.
pub fn graph_superlevel_persistence(
    g: &WeightedGraph,
    f: &VertexFunction,
) -> Result<(PersistenceDiagram, PersistenceDiagram)> {
    check(g, f)?;
    let neg: Vec<f64> = f.values().iter().map(|v| -v).collect();
    let (h0, h1) = lower_star(g, &neg, max_value(&neg));
    let flip = |pairs: Vec<(f64, f64)>| pairs.into_iter().map(|(b, d)| (-d, -b)).collect();
    Ok((to_diagram(0, flip(h0))?, to_diagram(1, flip(h1))?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn func(v: &[f64]) -> VertexFunction {
        VertexFunction::new(v.to_vec()).unwrap()
    }

    fn dg(degree: usize, pairs: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::from_pairs(degree, pairs).unwrap()
    }

    #[test]
    fn edge_extension() {
        let g = WeightedGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(extend_to_edges(&g, &func(&[0.0, 2.0, 1.0])).unwrap(), [2.0, 2.0]);
        assert_eq!(extend_to_edges(&g, &func(&[4.0; 3])).unwrap(), [4.0, 4.0]);
        let e = WeightedGraph::new(2, vec![(0, 1)]).unwrap();
        assert_eq!(extend_to_edges(&e, &func(&[1.0, 3.0])).unwrap(), [3.0]);
        assert!(extend_to_edges(&e, &func(&[1.0])).is_err());
    }

    #[test]
    fn path_sublevel() {
        let g = WeightedGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let (h0, h1) = graph_sublevel_persistence(&g, &func(&[0.0, 1.0, 2.0])).unwrap();
        assert_eq!(h0, dg(0, &[(0.0, 2.0)]));
        assert!(h1.is_empty());
    }

    #[test]
    fn late_edge_between_isolated_vertices() {
        let g = WeightedGraph::new(2, vec![(0, 1)]).unwrap();
        let (h0, _) = graph_sublevel_persistence(&g, &func(&[0.0, 1.0])).unwrap();
        assert_eq!(h0, dg(0, &[(0.0, 1.0)]));
    }

    #[test]
    fn elder_rule_kills_younger_component() {
        // 0 (f=0) and 2 (f=1) are separate minima joined through vertex 1 (f=3).
        let g = WeightedGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let (h0, _) = graph_sublevel_persistence(&g, &func(&[0.0, 3.0, 1.0])).unwrap();
        assert_eq!(h0, dg(0, &[(1.0, 3.0), (0.0, 3.0)]));
    }

    #[test]
    fn cycle_sublevel() {
        let g = WeightedGraph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let (h0, h1) = graph_sublevel_persistence(&g, &func(&[0.0; 3])).unwrap();
        assert_eq!(h0, dg(0, &[(0.0, 0.0)]));
        assert_eq!(h1, dg(1, &[(0.0, 0.0)]));
    }

    #[test]
    fn superlevel_examples() {
        let g = WeightedGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let c = func(&[0.7; 3]);
        assert_eq!(graph_superlevel_persistence(&g, &c).unwrap(), graph_sublevel_persistence(&g, &c).unwrap());

        let single = WeightedGraph::new(1, vec![]).unwrap();
        let (h0, h1) = graph_superlevel_persistence(&single, &func(&[0.4])).unwrap();
        assert_eq!(h0, dg(0, &[(0.4, 0.4)]));
        assert!(h1.is_empty());

        // Two maxima (f=3 at 0, f=2 at 2) merging at the saddle value 1.
        let (h0, _) = graph_superlevel_persistence(&g, &func(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(h0, dg(0, &[(1.0, 2.0), (1.0, 3.0)]));
    }

    #[test]
    fn superlevel_is_negated_sublevel() {
        let g = WeightedGraph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let vals = [0.3, 0.9, 0.1, 0.5];
        let neg: Vec<f64> = vals.iter().map(|v| -v).collect();
        let (s0, s1) = graph_sublevel_persistence(&g, &func(&neg)).unwrap();
        let (p0, p1) = graph_superlevel_persistence(&g, &func(&vals)).unwrap();
        let mirror = |d: &PersistenceDiagram| {
            let pairs: Vec<_> = d.points().iter().map(|p| (-p.death(), -p.birth())).collect();
            dg(d.degree(), &pairs)
        };
        assert_eq!(p0, mirror(&s0));
        assert_eq!(p1, mirror(&s1));
    }
}

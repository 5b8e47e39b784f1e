use std::collections::HashMap;

use super::{PointCloud, UnionFind};
use crate::diagram::{DiagramPoint, PersistenceDiagram};
use crate::error::{Error, Result};

/// Maximum number of triangles `rips_h1` is willing to enumerate.
pub const RIPS_TRIANGLE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy)]
struct Edge {
    len: f64,
    u: u32,
    v: u32,
}

/// Edges no longer than `max_scale`, sorted by (length, u, v) with `u < v`.
fn sorted_edges(cloud: &PointCloud, max_scale: f64) -> Vec<Edge> {
    let n = cloud.len();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let len = cloud.distance(u, v);
            if len <= max_scale {
                edges.push(Edge {
                    len,
                    u: u as u32,
                    v: v as u32,
                });
            }
        }
    }
    edges.sort_by(|a, b| {
        a.len
            .total_cmp(&b.len)
            .then(a.u.cmp(&b.u))
            .then(a.v.cmp(&b.v))
    });
    edges
}

/// Degree-0 Rips persistence: every point is born at 0, and Kruskal merges record deaths at
/// edge lengths. One essential class `(0, inf)` remains; zero-length merges are dropped.
pub fn rips_h0(cloud: &PointCloud) -> PersistenceDiagram {
    let mut diagram = PersistenceDiagram::empty(0);
    if cloud.is_empty() {
        return diagram;
    }
    let mut uf = UnionFind::new(cloud.len());
    for e in sorted_edges(cloud, f64::INFINITY) {
        if uf.union(e.u as usize, e.v as usize) {
            if e.len > 0.0 {
                diagram.push(DiagramPoint::new(0.0, e.len).expect("lengths are non-negative"));
            }
            if uf.count() == 1 {
                break;
            }
        }
    }
    diagram.push(DiagramPoint::essential(0.0).expect("finite birth"));
    diagram
}

/// Sort key of a triangle: diameter first, then the sorted vertex tuple.
///
/// Diameters are non-negative, so their IEEE bit patterns order like the values.
fn triangle_key(diam: f64, mut t: [u32; 3]) -> u128 {
    t.sort_unstable();
    ((diam.to_bits() as u128) << 64) | ((t[0] as u128) << 42) | ((t[1] as u128) << 21) | t[2] as u128
}

fn key_diameter(key: u128) -> f64 {
    f64::from_bits((key >> 64) as u64)
}

/// Symmetric difference of two sorted key lists.
fn add_keys(a: &[u128], b: &[u128], out: &mut Vec<u128>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// Symmetric difference of two sorted edge lists.
fn add_u32(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// Degree-1 Rips persistence up to `max_scale`.
///
/// Simplices are edges and triangles with filtration value equal to their diameter, ordered by
/// (value, dimension, lexicographic vertex tuple). The pairs are computed by reducing edge
/// coboundaries in reverse filtration order; edges that merge components are skipped since
/// they never create a cycle. Each remaining edge is paired with the earliest triangle left
/// in its reduced coboundary. Cycles still alive at `max_scale` are dropped, as are
/// zero-persistence pairs.
pub fn rips_h1(cloud: &PointCloud, max_scale: f64) -> Result<PersistenceDiagram> {
    if !(max_scale > 0.0) {
        return Err(Error::InvalidInput(format!("max_scale must be > 0, got {max_scale}")));
    }
    let n = cloud.len();
    if n >= 1 << 21 {
        return Err(Error::InvalidInput(format!("too many points for degree-1 persistence: {n}")));
    }
    let edges = sorted_edges(cloud, max_scale);
    let mut index = vec![u32::MAX; n * n];
    let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (k, e) in edges.iter().enumerate() {
        let (u, v) = (e.u as usize, e.v as usize);
        index[u * n + v] = k as u32;
        index[v * n + u] = k as u32;
        neighbors[u].push(e.v);
    }
    for nb in &mut neighbors {
        nb.sort_unstable();
    }
    let n64 = n as u64;
    let worst = n64 * n64.saturating_sub(1) * n64.saturating_sub(2) / 6;
    let total = if worst <= RIPS_TRIANGLE_BUDGET { 0 } else { count_triangles(&neighbors, &index, n) };
    if total > RIPS_TRIANGLE_BUDGET {
        return Err(Error::SimplexBudget {
            count: total,
            max_scale,
            suggested: max_scale * (RIPS_TRIANGLE_BUDGET as f64 / total as f64).cbrt(),
        });
    }

    let mut adjacent: Vec<Vec<u32>> = vec![Vec::new(); n];
    for e in &edges {
        adjacent[e.u as usize].push(e.v);
        adjacent[e.v as usize].push(e.u);
    }
    for a in &mut adjacent {
        a.sort_unstable();
    }
    let mut merges = vec![false; edges.len()];
    let mut uf = UnionFind::new(n);
    for (k, e) in edges.iter().enumerate() {
        merges[k] = uf.union(e.u as usize, e.v as usize);
    }

    let len_of = |a: u32, b: u32| edges[index[a as usize * n + b as usize] as usize].len;
    // Coboundary of edge `k` as sorted triangle keys.
    let coboundary = |k: usize, out: &mut Vec<u128>| {
        let e = edges[k];
        out.clear();
        let (nu, nv) = (&adjacent[e.u as usize], &adjacent[e.v as usize]);
        let (mut i, mut j) = (0, 0);
        while i < nu.len() && j < nv.len() {
            match nu[i].cmp(&nv[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let w = nu[i];
                    let diam = e.len.max(len_of(e.u, w)).max(len_of(e.v, w));
                    out.push(triangle_key(diam, [e.u, e.v, w]));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.sort_unstable();
    };

    // Reduced columns are kept implicitly as the set of edges summed into them, which is
    // far smaller than the columns themselves on dense complexes.
    let mut owner: HashMap<u128, usize> = HashMap::new();
    let mut combos: Vec<Vec<u32>> = Vec::new();
    let mut diagram = PersistenceDiagram::empty(1);
    let (mut col, mut scratch, mut other) = (Vec::new(), Vec::new(), Vec::new());
    for (k, e) in edges.iter().enumerate().rev() {
        if merges[k] {
            continue;
        }
        coboundary(k, &mut col);
        let mut combo = vec![k as u32];
        while let Some(&pivot) = col.first() {
            match owner.get(&pivot) {
                None => {
                    owner.insert(pivot, combos.len());
                    let death = key_diameter(pivot);
                    if death > e.len {
                        diagram.push(DiagramPoint::new(e.len, death)?);
                    }
                    combos.push(combo);
                    break;
                }
                Some(&o) => {
                    for &m in &combos[o] {
                        coboundary(m as usize, &mut other);
                        add_keys(&col, &other, &mut scratch);
                        std::mem::swap(&mut col, &mut scratch);
                    }
                    let mut merged = Vec::with_capacity(combo.len() + combos[o].len());
                    let mut sorted = combos[o].clone();
                    sorted.sort_unstable();
                    combo.sort_unstable();
                    add_u32(&combo, &sorted, &mut merged);
                    combo = merged;
                }
            }
        }
    }
    Ok(diagram)
}

fn count_triangles(neighbors: &[Vec<u32>], index: &[u32], n: usize) -> u64 {
    let mut total = 0;
    for nb in neighbors {
        for (a, &j) in nb.iter().enumerate() {
            total += nb[a + 1..]
                .iter()
                .filter(|&&k| index[j as usize * n + k as usize] != u32::MAX)
                .count() as u64;
        }
    }
    total
}

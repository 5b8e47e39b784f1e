use super::{VertexFunction, WeightedGraph};
use crate::error::{Error, Result};

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues and orthonormal eigenvectors of a symmetric matrix.
///
/// `vectors` is row-major `n x n`; column `k` is the eigenvector of `values[k]`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub n: usize,
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
}

impl SymmetricEigen {
    pub fn vector_entry(&self, vertex: usize, k: usize) -> f64 {
        self.vectors[vertex * self.n + k]
    }
}

/// `L = I - D^{-1/2} A D^{-1/2}`, row-major. Isolated vertices get a zero row and column.
pub fn normalized_laplacian(g: &WeightedGraph) -> Vec<f64> {
    let n = g.n_vertices();
    let deg = g.degrees();
    let inv_sqrt: Vec<f64> = deg
        .iter()
        .map(|&d| if d == 0 { 0.0 } else { 1.0 / (d as f64).sqrt() })
        .collect();
    let mut l = vec![0.0; n * n];
    for v in 0..n {
        if deg[v] > 0 {
            l[v * n + v] = 1.0;
        }
    }
    for &(u, v) in g.edges() {
        let w = -inv_sqrt[u] * inv_sqrt[v];
        l[u * n + v] = w;
        l[v * n + u] = w;
    }
    l
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigendecomposition of a symmetric `n x n` row-major matrix.
///
/// Sweeps rotate every off-diagonal pair until the off-diagonal Frobenius norm is at most
/// `1e-12`.
pub fn jacobi_eigen(matrix: &[f64], n: usize) -> Result<SymmetricEigen> {
    if matrix.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: matrix.len(),
        });
    }
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a, n) <= JACOBI_TOL {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[p * n + p], a[q * n + q]);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[i * n + i]).collect();
    Ok(SymmetricEigen {
        n,
        values,
        vectors: v,
    })
}

/// Heat kernel signature `HKS_t(v) = sum_k exp(-t lambda_k) psi_k(v)^2` over the full spectrum of
/// the normalized Laplacian.
pub fn hks(g: &WeightedGraph, t: f64) -> Result<VertexFunction> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("diffusion time must be > 0, got {t}")));
    }
    let n = g.n_vertices();
    let eig = jacobi_eigen(&normalized_laplacian(g), n)?;
    let weights: Vec<f64> = eig.values.iter().map(|&l| (-t * l).exp()).collect();
    let values = (0..n)
        .map(|v| {
            (0..n)
                .map(|k| weights[k] * eig.vector_entry(v, k).powi(2))
                .sum()
        })
        .collect();
    VertexFunction::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isolated_vertex_keeps_all_heat() {
        let g = WeightedGraph::new(1, vec![]).unwrap();
        assert_eq!(hks(&g, 3.0).unwrap().values(), &[1.0]);
    }

    #[test]
    fn single_edge_closed_form() {
        let g = WeightedGraph::new(2, vec![(0, 1)]).unwrap();
        for t in [0.1f64, 1.0, 10.0] {
            let want = 0.5 + 0.5 * (-2.0 * t).exp();
            for v in hks(&g, t).unwrap().values() {
                assert!((v - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn triangle_closed_form() {
        let g = WeightedGraph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        for t in [0.1f64, 1.0, 10.0] {
            let want = 1.0 / 3.0 + 2.0 / 3.0 * (-1.5 * t).exp();
            for v in hks(&g, t).unwrap().values() {
                assert!((v - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_reconstructs_matrix() {
        let m = vec![4.0, 1.0, -2.0, 1.0, 2.0, 0.5, -2.0, 0.5, 3.0];
        let e = jacobi_eigen(&m, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let r: f64 = (0..3).map(|k| e.vector_entry(i, k) * e.values[k] * e.vector_entry(j, k)).sum();
                assert!((r - m[i * 3 + j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_non_positive_time() {
        let g = WeightedGraph::new(1, vec![]).unwrap();
        assert!(hks(&g, 0.0).is_err());
    }
}

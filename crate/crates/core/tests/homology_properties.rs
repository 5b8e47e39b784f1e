use proptest::prelude::*;
use qupid_core::datasets::{generate_graph_set, GraphClass, SeededRng};
use qupid_core::homology::{
    graph_sublevel_persistence, graph_superlevel_persistence, hks, jacobi_eigen, normalized_laplacian,
    rips_h0, rips_h1, PointCloud, VertexFunction, WeightedGraph,
};

fn random_cloud(n: usize, seed: u64) -> PointCloud {
    let mut rng = SeededRng::new(seed);
    let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.next_f64(), rng.next_f64()]).collect();
    PointCloud::from_points(&pts).unwrap()
}

/// Prim's algorithm on the complete distance graph.
fn mst_weight(c: &PointCloud) -> f64 {
    let n = c.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    let mut total = 0.0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .unwrap();
        in_tree[v] = true;
        total += best[v];
        for u in 0..n {
            if !in_tree[u] {
                best[u] = best[u].min(c.distance(u, v));
            }
        }
    }
    total
}

fn random_graph(n: usize, p: f64, seed: u64) -> WeightedGraph {
    let mut rng = SeededRng::new(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.next_f64() < p {
                edges.push((u, v));
            }
        }
    }
    WeightedGraph::new(n, edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn h0_deaths_sum_to_mst_weight(n in 1usize..40, seed in any::<u64>()) {
        let c = random_cloud(n, seed);
        let d = rips_h0(&c);
        prop_assert_eq!(d.essential_count(), 1);
        let finite: f64 = d.points().iter().filter(|p| !p.is_essential()).map(|p| p.death()).sum();
        prop_assert!((finite - mst_weight(&c)).abs() < 1e-9);
    }

    #[test]
    fn h1_points_lie_inside_the_truncation(n in 3usize..30, seed in any::<u64>(), scale in 0.05f64..1.5) {
        let d = rips_h1(&random_cloud(n, seed), scale).unwrap();
        for p in d.points() {
            prop_assert!(p.birth() < p.death());
            prop_assert!(p.death() <= scale);
        }
    }

    #[test]
    fn graph_h1_count_is_first_betti_number(n in 1usize..25, p in 0.0f64..0.6, seed in any::<u64>()) {
        let g = random_graph(n, p, seed);
        let f = hks(&g, 1.0).unwrap();
        let betti1 = g.edges().len() + g.components() - g.n_vertices();
        let (sub0, sub1) = graph_sublevel_persistence(&g, &f).unwrap();
        let (sup0, sup1) = graph_superlevel_persistence(&g, &f).unwrap();
        prop_assert_eq!(sub1.len(), betti1);
        prop_assert_eq!(sup1.len(), betti1);
        // One class per component survives to the end, clamped but kept.
        prop_assert!(sub0.len() >= g.components());
        prop_assert!(sup0.len() >= g.components());
    }

    #[test]
    fn laplacian_spectrum_in_zero_two(n in 1usize..20, p in 0.0f64..0.8, seed in any::<u64>()) {
        let g = random_graph(n, p, seed);
        let e = jacobi_eigen(&normalized_laplacian(&g), n).unwrap();
        for &l in &e.values {
            prop_assert!((-1e-9..=2.0 + 1e-9).contains(&l));
        }
        let zeros = e.values.iter().filter(|l| l.abs() < 1e-9).count();
        prop_assert_eq!(zeros, g.components());
    }

    #[test]
    fn sublevel_of_constant_has_no_finite_h0(n in 1usize..15, seed in any::<u64>()) {
        let g = random_graph(n, 0.4, seed);
        let f = VertexFunction::for_graph(&g, vec![0.25; n]).unwrap();
        let (h0, _) = graph_sublevel_persistence(&g, &f).unwrap();
        prop_assert_eq!(h0.len(), g.components());
    }
}

#[test]
fn generated_graph_classes_are_valid() {
    let classes = [GraphClass::Random, GraphClass::RingLattice, GraphClass::Tree];
    let (graphs, labels) = generate_graph_set(&classes, 3, 12, 1);
    assert_eq!(graphs.len(), 9);
    assert_eq!(labels, [0, 0, 0, 1, 1, 1, 2, 2, 2]);
    for g in &graphs[6..] {
        assert_eq!(g.edges().len(), g.n_vertices() - 1);
        assert_eq!(g.components(), 1);
    }
}

//! The neighbourhood of a random vertex of `Ŵ` should look like the sampled
//! limit tree: compare mean node counts per depth and class.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wincuckoo::bp::tree::{sample_with, NodeKind};
use wincuckoo::models::{gen_windows, EdgeKind, InstanceSpec, Scheme, WeightedHypergraph};
use wincuckoo::ModelParams;

const DEPTH: usize = 4;

/// Node ids: vertices `0..n`, edges `n..n+|E|`.
fn ball_profile(h: &WeightedHypergraph, incident: &[Vec<usize>], root: usize) -> Vec<[u64; 3]> {
    let n = h.n;
    let mut seen = std::collections::HashSet::new();
    let mut profile = vec![[0u64; 3]; DEPTH + 1];
    let mut layer = vec![root];
    seen.insert(root);
    profile[0][NodeKind::Vertex.index()] += 1;
    for row in profile.iter_mut().skip(1) {
        let mut next = Vec::new();
        for &node in &layer {
            let neighbours: Vec<usize> = if node < n {
                incident[node].iter().map(|&e| n + e).collect()
            } else {
                h.edges[node - n].vertices.iter().map(|&v| v as usize).collect()
            };
            for u in neighbours {
                if seen.insert(u) {
                    let kind = if u < n {
                        NodeKind::Vertex
                    } else if h.edges[u - n].kind == EdgeKind::Helper {
                        NodeKind::Helper
                    } else {
                        NodeKind::Ordinary
                    };
                    row[kind.index()] += 1;
                    next.push(u);
                }
            }
        }
        layer = next;
    }
    profile
}

#[test]
fn vertex_neighbourhoods_match_the_limit_tree() {
    let (k, ell, c) = (3u32, 2u32, 0.8);
    let params = ModelParams::new(k, ell).unwrap();
    let n = 200_000;
    let pair = gen_windows(InstanceSpec::new(Scheme::Windows, n, (c * n as f64) as usize, k, ell, 4).unwrap()).unwrap();
    let h = &pair.w_hat;
    let mut incident = vec![Vec::new(); n];
    for (i, e) in h.edges.iter().enumerate() {
        for v in e.distinct_vertices() {
            incident[v as usize].push(i);
        }
    }

    let samples = 4000;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut graph = [[0f64; 3]; DEPTH + 1];
    let mut tree = [[0f64; 3]; DEPTH + 1];
    for _ in 0..samples {
        let root = rng.random_range(0..n);
        for (acc, row) in graph.iter_mut().zip(ball_profile(h, &incident, root)) {
            for j in 0..3 {
                acc[j] += row[j] as f64 / samples as f64;
            }
        }
        let t = sample_with(params, c, DEPTH as u32, Some(NodeKind::Vertex), &mut rng);
        for (acc, row) in tree.iter_mut().zip(t.depth_profile(DEPTH as u32)) {
            for j in 0..3 {
                acc[j] += row[j] as f64 / samples as f64;
            }
        }
    }

    // Depth 1 has a closed form: two helpers and Po(kc) ordinary edges.
    assert!((graph[1][NodeKind::Helper.index()] - 2.0).abs() < 1e-9);
    assert!((graph[1][NodeKind::Ordinary.index()] - k as f64 * c).abs() < 0.1);
    for d in 1..=DEPTH {
        for j in 0..3 {
            let (g, t) = (graph[d][j], tree[d][j]);
            let tol = 0.06 * t.max(1.0);
            assert!((g - t).abs() < tol, "depth {d} class {j}: graph {g:.3} vs tree {t:.3}");
        }
    }
}

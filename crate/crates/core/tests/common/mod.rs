#![allow(dead_code)]

use circle_feat::{build_graph, Graph, NodePair};
use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi graph drawn from a caller-owned stream.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    build_graph(&edges, n).unwrap()
}

pub fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || rng.random_range(-1.0..1.0))
}

/// Ordered pairs `(i, j)` with `i ≠ j`.
pub fn all_pairs(g: &Graph) -> Vec<NodePair> {
    let n = g.num_nodes();
    (0..n)
        .flat_map(|src| {
            (0..n)
                .filter(move |&dst| dst != src)
                .map(move |dst| NodePair { src, dst })
        })
        .collect()
}

/// Distance and number of shortest paths by enumerating every simple path.
pub fn brute_force_paths(g: &Graph, p: NodePair) -> (Option<usize>, u64) {
    fn walk(g: &Graph, dst: usize, path: &mut Vec<usize>, lens: &mut Vec<usize>) {
        let v = *path.last().unwrap();
        if v == dst {
            lens.push(path.len() - 1);
            return;
        }
        for &w in g.neighbors(v).unwrap() {
            if !path.contains(&w) {
                path.push(w);
                walk(g, dst, path, lens);
                path.pop();
            }
        }
    }
    let mut lens = Vec::new();
    walk(g, p.dst, &mut vec![p.src], &mut lens);
    match lens.iter().min() {
        None => (None, 0),
        Some(&m) => (Some(m), lens.iter().filter(|&&l| l == m).count() as u64),
    }
}

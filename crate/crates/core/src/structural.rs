//! Classical pairwise structural features: common neighbors, Adamic-Adar,
//! Jaccard, and shortest-path distance/count.
//!
//! All sums are accumulated in a label-independent order so that relabeling
//! the graph reproduces bit-identical values.

use std::collections::{BTreeMap, VecDeque};

use crate::error::Result;
use crate::graph::{Graph, NodePair};

/// Default saturation cap for shortest-path counts.
pub const DEFAULT_PATH_COUNT_CAP: u64 = 1_000_000_000;

/// Shortest-path distance and number of distinct shortest paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathInfo {
    /// Hop count; `None` when the endpoints are in different components.
    pub distance: Option<usize>,
    /// Saturates at the cap passed to [`shortest_paths_capped`]; zero iff unreachable.
    pub num_shortest: u64,
}

impl PathInfo {
    pub const UNREACHABLE: PathInfo = PathInfo {
        distance: None,
        num_shortest: 0,
    };

    pub fn is_reachable(&self) -> bool {
        self.distance.is_some()
    }
}

/// Sorted intersection of two sorted slices.
pub(crate) fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub(crate) fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

pub fn common_neighbors(g: &Graph, p: NodePair) -> Result<Vec<usize>> {
    let p = p.validate(g)?;
    Ok(intersect_sorted(g.adj(p.src), g.adj(p.dst)))
}

/// Σ over common neighbors `u` of `1 / ln(deg(u))`.
pub fn adamic_adar(g: &Graph, p: NodePair) -> Result<f64> {
    let common = common_neighbors(g, p)?;
    // group by degree so the summation order does not depend on node labels
    let mut by_degree: BTreeMap<usize, u64> = BTreeMap::new();
    for u in common {
        *by_degree.entry(g.adj(u).len()).or_default() += 1;
    }
    Ok(by_degree
        .into_iter()
        .map(|(deg, count)| count as f64 / (deg as f64).ln())
        .sum())
}

/// |Γ(src) ∩ Γ(dst)| / |Γ(src) ∪ Γ(dst)|, or 0 when both are isolated.
pub fn jaccard(g: &Graph, p: NodePair) -> Result<f64> {
    let p = p.validate(g)?;
    let (a, b) = (g.adj(p.src), g.adj(p.dst));
    let inter = intersection_size(a, b);
    let union = a.len() + b.len() - inter;
    if union == 0 {
        Ok(0.0)
    } else {
        Ok(inter as f64 / union as f64)
    }
}

pub fn shortest_paths(g: &Graph, p: NodePair) -> Result<PathInfo> {
    shortest_paths_capped(g, p, DEFAULT_PATH_COUNT_CAP)
}

/// Breadth-first distance and shortest-path count, with the count saturating at `cap`.
pub fn shortest_paths_capped(g: &Graph, p: NodePair, cap: u64) -> Result<PathInfo> {
    let p = p.validate(g)?;
    let n = g.num_nodes();
    let mut dist = vec![usize::MAX; n];
    let mut count = vec![0u64; n];
    let mut queue = VecDeque::new();
    dist[p.src] = 0;
    count[p.src] = 1;
    queue.push_back(p.src);

    while let Some(v) = queue.pop_front() {
        // every predecessor of dst on a shortest path sits one level above it,
        // and the whole level is drained before dst is popped
        if v == p.dst {
            break;
        }
        let next = dist[v] + 1;
        for &w in g.adj(v) {
            if dist[w] == usize::MAX {
                dist[w] = next;
                count[w] = count[v];
                queue.push_back(w);
            } else if dist[w] == next {
                count[w] = count[w].saturating_add(count[v]).min(cap);
            }
        }
    }

    if dist[p.dst] == usize::MAX {
        Ok(PathInfo::UNREACHABLE)
    } else {
        Ok(PathInfo {
            distance: Some(dist[p.dst]),
            num_shortest: count[p.dst].min(cap),
        })
    }
}

/// [`PathInfo`] from `src` to every node, from a single full traversal.
pub fn path_infos_from(g: &Graph, src: usize, cap: u64) -> Result<Vec<PathInfo>> {
    g.check_node(src)?;
    let n = g.num_nodes();
    let mut dist = vec![usize::MAX; n];
    let mut count = vec![0u64; n];
    let mut queue = VecDeque::new();
    dist[src] = 0;
    count[src] = 1;
    queue.push_back(src);
    while let Some(v) = queue.pop_front() {
        let next = dist[v] + 1;
        for &w in g.adj(v) {
            if dist[w] == usize::MAX {
                dist[w] = next;
                count[w] = count[v];
                queue.push_back(w);
            } else if dist[w] == next {
                count[w] = count[w].saturating_add(count[v]).min(cap);
            }
        }
    }
    Ok(dist
        .into_iter()
        .zip(count)
        .map(|(d, c)| {
            if d == usize::MAX {
                PathInfo::UNREACHABLE
            } else {
                PathInfo {
                    distance: Some(d),
                    num_shortest: c.min(cap),
                }
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, generate_synthetic, SyntheticKind};

    fn pair(g: &Graph, a: usize, b: usize) -> NodePair {
        NodePair::new(g, a, b).unwrap()
    }

    fn synth(kind: SyntheticKind) -> Graph {
        generate_synthetic(&kind, 0).unwrap()
    }

    #[test]
    fn common_neighbor_cases() {
        let k3 = synth(SyntheticKind::Complete { n: 3 });
        assert_eq!(common_neighbors(&k3, pair(&k3, 0, 1)).unwrap(), vec![2]);
        let path = synth(SyntheticKind::Path { n: 3 });
        assert_eq!(common_neighbors(&path, pair(&path, 0, 2)).unwrap(), vec![1]);
        let iso = build_graph(&[], 2).unwrap();
        assert!(common_neighbors(&iso, pair(&iso, 0, 1)).unwrap().is_empty());
        let bad = NodePair { src: 0, dst: 9 };
        assert!(common_neighbors(&iso, bad).is_err());
    }

    #[test]
    fn adamic_adar_cases() {
        let iso = build_graph(&[], 2).unwrap();
        assert_eq!(adamic_adar(&iso, pair(&iso, 0, 1)).unwrap(), 0.0);
        let k3 = synth(SyntheticKind::Complete { n: 3 });
        let v = adamic_adar(&k3, pair(&k3, 0, 1)).unwrap();
        assert!((v - 1.0 / 2f64.ln()).abs() < 1e-12);
        assert_eq!(format!("{v:.6}"), "1.442695");
        let theta = synth(SyntheticKind::Theta { k: 3, len: 2 });
        let v = adamic_adar(&theta, pair(&theta, 0, 1)).unwrap();
        assert!((v - 4.328085).abs() < 1e-6);
    }

    #[test]
    fn jaccard_cases() {
        let iso = build_graph(&[], 2).unwrap();
        assert_eq!(jaccard(&iso, pair(&iso, 0, 1)).unwrap(), 0.0);
        let k3 = synth(SyntheticKind::Complete { n: 3 });
        assert_eq!(jaccard(&k3, pair(&k3, 0, 1)).unwrap(), 1.0 / 3.0);
        let theta = synth(SyntheticKind::Theta { k: 3, len: 2 });
        assert_eq!(jaccard(&theta, pair(&theta, 0, 1)).unwrap(), 1.0);
    }

    #[test]
    fn shortest_path_cases() {
        let path = synth(SyntheticKind::Path { n: 3 });
        assert_eq!(
            shortest_paths(&path, pair(&path, 0, 2)).unwrap(),
            PathInfo {
                distance: Some(2),
                num_shortest: 1
            }
        );
        let c4 = synth(SyntheticKind::Cycle { n: 4 });
        assert_eq!(
            shortest_paths(&c4, pair(&c4, 0, 2)).unwrap(),
            PathInfo {
                distance: Some(2),
                num_shortest: 2
            }
        );
        let two = build_graph(&[(0, 1), (2, 3)], 4).unwrap();
        assert_eq!(
            shortest_paths(&two, pair(&two, 0, 3)).unwrap(),
            PathInfo::UNREACHABLE
        );
    }

    #[test]
    fn shortest_path_count_saturates() {
        // layered graph: 0 -> 4 middle nodes -> 4 middle nodes -> sink gives 16 paths
        let mut edges = Vec::new();
        for a in 1..=4 {
            edges.push((0, a));
            for b in 5..=8 {
                edges.push((a, b));
            }
        }
        for b in 5..=8 {
            edges.push((b, 9));
        }
        let g = build_graph(&edges, 10).unwrap();
        let p = pair(&g, 0, 9);
        assert_eq!(shortest_paths(&g, p).unwrap().num_shortest, 16);
        let capped = shortest_paths_capped(&g, p, 10).unwrap();
        assert_eq!(capped.num_shortest, 10);
        assert_eq!(capped.distance, Some(3));
        let all = path_infos_from(&g, 0, 10).unwrap();
        assert_eq!(all[9], capped);
        assert_eq!(all[0].distance, Some(0));
    }
}

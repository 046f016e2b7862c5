//! Circle features: swing-plus and bridge.
//!
//! A *circle* for a pair `(i, j)` is a simple cycle of length at most
//! `max_circle_len` through both nodes. Cutting it at `i` and `j` yields two
//! internally disjoint `i–j` paths; each such path of length ≥ 2 is a
//! *bridge*. The direct edge never counts as a bridge since adjacency enters
//! both features separately through `a_ij`.

use std::collections::{BTreeMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodePair};
use crate::structural::{intersect_sorted, intersection_size};

#[derive(Debug, Clone, PartialEq)]
pub struct CircleConfig {
    /// Damping constant in the swing-plus denominator.
    pub alpha: f64,
    /// Whether `u = v` terms enter the swing-plus double sum.
    pub include_self_pairs: bool,
    /// Longest circle considered, in edges.
    pub max_circle_len: usize,
    /// Upper bound on enumerated bridges per pair.
    pub max_bridges: usize,
}

impl Default for CircleConfig {
    fn default() -> Self {
        CircleConfig {
            alpha: 1.0,
            include_self_pairs: true,
            max_circle_len: 6,
            max_bridges: 100_000,
        }
    }
}

impl CircleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!(
                "alpha must be positive and finite, got {}",
                self.alpha
            )));
        }
        if self.max_circle_len < 4 {
            return Err(Error::Config(format!(
                "max_circle_len must be at least 4, got {}",
                self.max_circle_len
            )));
        }
        if self.max_bridges == 0 {
            return Err(Error::Config("max_bridges must be at least 1".into()));
        }
        Ok(())
    }
}

/// A simple path from `src` to `dst` with at least one internal vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bridge {
    /// Full node sequence, starting at `src` and ending at `dst`.
    pub path: Vec<usize>,
}

impl Bridge {
    /// Number of edges.
    pub fn len(&self) -> usize {
        self.path.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.path.len() < 2
    }

    pub fn internal(&self) -> &[usize] {
        &self.path[1..self.path.len() - 1]
    }
}

/// `a_ij + Σ_{u,v ∈ Γi∩Γj} 1 / (α + |Γu ∩ Γv|)`.
pub fn swing_plus(g: &Graph, p: NodePair, cfg: &CircleConfig) -> Result<f64> {
    cfg.validate()?;
    let p = p.validate(g)?;
    let common = intersect_sorted(g.adj(p.src), g.adj(p.dst));

    // Histogram of overlap sizes; summing per bucket in key order keeps the
    // result independent of node labels and of (src, dst) orientation.
    let mut overlaps: BTreeMap<usize, u64> = BTreeMap::new();
    for (a, &u) in common.iter().enumerate() {
        if cfg.include_self_pairs {
            *overlaps.entry(g.adj(u).len()).or_default() += 1;
        }
        for &v in &common[a + 1..] {
            *overlaps
                .entry(intersection_size(g.adj(u), g.adj(v)))
                .or_default() += 2;
        }
    }
    let sum: f64 = overlaps
        .into_iter()
        .map(|(size, count)| count as f64 / (cfg.alpha + size as f64))
        .sum();
    Ok(g.adjacency_value(p) + sum)
}

/// Straight evaluation of the swing-plus double sum with every set rebuilt
/// from scratch per term. Used to cross-check [`swing_plus`].
pub fn swing_plus_oracle(g: &Graph, p: NodePair, cfg: &CircleConfig) -> Result<f64> {
    cfg.validate()?;
    let p = p.validate(g)?;
    let gamma = |x: usize| -> HashSet<usize> { g.adj(x).iter().copied().collect() };

    let common: Vec<usize> = gamma(p.src).intersection(&gamma(p.dst)).copied().collect();
    let a_ij = if gamma(p.src).contains(&p.dst) {
        1.0
    } else {
        0.0
    };
    let mut total = a_ij;
    for &u in &common {
        for &v in &common {
            if u == v && !cfg.include_self_pairs {
                continue;
            }
            let shared = gamma(u).intersection(&gamma(v)).count();
            total += 1.0 / (cfg.alpha + shared as f64);
        }
    }
    Ok(total)
}

/// Hop distances from `origin` (`usize::MAX` for unreachable).
fn bfs_distances(g: &Graph, origin: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.num_nodes()];
    let mut queue = VecDeque::from([origin]);
    dist[origin] = 0;
    while let Some(v) = queue.pop_front() {
        for &w in g.adj(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Depth-first walk over all simple `src–dst` paths with
/// `2 ≤ length ≤ max_len`, visiting neighbors in ascending order so paths
/// arrive in lexicographic order. `visit` receives each full node sequence.
fn walk_bridges(
    g: &Graph,
    p: NodePair,
    max_len: usize,
    max_bridges: usize,
    mut visit: impl FnMut(&[usize]),
) -> Result<()> {
    let to_dst = bfs_distances(g, p.dst);
    let mut found = 0usize;
    let mut on_path = vec![false; g.num_nodes()];
    let mut path = Vec::with_capacity(max_len + 1);
    path.push(p.src);
    on_path[p.src] = true;
    // explicit stack of (node, next neighbor index)
    let mut stack: Vec<(usize, usize)> = vec![(p.src, 0)];

    while let Some(&mut (v, ref mut next)) = stack.last_mut() {
        let nbrs = g.adj(v);
        if *next >= nbrs.len() {
            stack.pop();
            path.pop();
            on_path[v] = false;
            continue;
        }
        let w = nbrs[*next];
        *next += 1;
        let len_to_w = path.len();
        if w == p.dst {
            if len_to_w >= 2 {
                found += 1;
                if found > max_bridges {
                    return Err(Error::CapExceeded {
                        src: p.src,
                        dst: p.dst,
                        cap: max_bridges,
                    });
                }
                path.push(w);
                visit(&path);
                path.pop();
            }
            continue;
        }
        if on_path[w] || to_dst[w] == usize::MAX || len_to_w + to_dst[w] > max_len {
            continue;
        }
        on_path[w] = true;
        path.push(w);
        stack.push((w, 0));
    }
    Ok(())
}

/// All simple `src–dst` paths with `2 ≤ length ≤ max_circle_len − 2`, in
/// lexicographic order of node sequence.
pub fn enumerate_bridges(g: &Graph, p: NodePair, cfg: &CircleConfig) -> Result<Vec<Bridge>> {
    cfg.validate()?;
    let p = p.validate(g)?;
    let mut out = Vec::new();
    walk_bridges(g, p, cfg.max_circle_len - 2, cfg.max_bridges, |path| {
        out.push(Bridge {
            path: path.to_vec(),
        })
    })?;
    Ok(out)
}

/// Number of bridges that have at least one internally disjoint partner
/// bridge with combined length ≤ `max_circle_len`.
pub fn bridge_count(g: &Graph, p: NodePair, cfg: &CircleConfig) -> Result<usize> {
    cfg.validate()?;
    let p = p.validate(g)?;
    let mut set = BridgeSet::default();
    walk_bridges(g, p, cfg.max_circle_len - 2, cfg.max_bridges, |path| {
        set.push(path)
    })?;
    Ok(set.count_with_partners(g.num_nodes(), cfg.max_circle_len))
}

/// [`bridge_count`] from `src` to every node of `g` at once (entry `src`
/// is 0). One depth-first walk over all simple paths of length
/// ≤ `max_circle_len − 2` leaving `src`; every such path of length ≥ 2 is a
/// bridge for the pair formed by its endpoints.
pub fn bridge_counts_from(g: &Graph, src: usize, cfg: &CircleConfig) -> Result<Vec<usize>> {
    bridge_counts_where(g, src, cfg, |_| true)
}

/// [`bridge_counts_from`] restricted to targets accepted by `want`; other
/// entries are 0.
pub(crate) fn bridge_counts_where<F: Fn(usize) -> bool>(
    g: &Graph,
    src: usize,
    cfg: &CircleConfig,
    want: F,
) -> Result<Vec<usize>> {
    cfg.validate()?;
    g.check_node(src)?;
    let n = g.num_nodes();
    let max_len = cfg.max_circle_len - 2;
    let mut sets: Vec<BridgeSet> = vec![BridgeSet::default(); n];
    let mut on_path = vec![false; n];
    let mut path = Vec::with_capacity(max_len + 1);
    path.push(src);
    on_path[src] = true;
    let mut stack: Vec<(usize, usize)> = vec![(src, 0)];

    while let Some(&mut (v, ref mut next)) = stack.last_mut() {
        let nbrs = g.adj(v);
        if *next >= nbrs.len() {
            stack.pop();
            path.pop();
            on_path[v] = false;
            continue;
        }
        let w = nbrs[*next];
        *next += 1;
        if on_path[w] {
            continue;
        }
        path.push(w);
        if path.len() >= 3 && want(w) {
            let set = &mut sets[w];
            set.push(&path);
            if set.len() > cfg.max_bridges {
                return Err(Error::CapExceeded {
                    src,
                    dst: w,
                    cap: cfg.max_bridges,
                });
            }
        }
        if path.len() <= max_len {
            on_path[w] = true;
            stack.push((w, 0));
        } else {
            path.pop();
        }
    }
    Ok(sets
        .iter()
        .map(|s| s.count_with_partners(n, cfg.max_circle_len))
        .collect())
}

/// Bridges of one pair: lengths plus flattened internal vertex lists.
#[derive(Debug, Clone, Default)]
struct BridgeSet {
    lens: Vec<usize>,
    internal: Vec<usize>,
    offsets: Vec<usize>,
}

impl BridgeSet {
    fn push(&mut self, path: &[usize]) {
        if self.offsets.is_empty() {
            self.offsets.push(0);
        }
        self.lens.push(path.len() - 1);
        self.internal.extend_from_slice(&path[1..path.len() - 1]);
        self.offsets.push(self.internal.len());
    }

    fn len(&self) -> usize {
        self.lens.len()
    }

    fn verts(&self, i: usize) -> &[usize] {
        &self.internal[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Bridges with an internally disjoint partner within the length budget.
    fn count_with_partners(&self, num_nodes: usize, max_circle_len: usize) -> usize {
        let count = self.len();
        if count < 2 {
            return 0;
        }
        // positions in ascending length order, so "partner length ≤ budget"
        // is a prefix of positions
        let mut order: Vec<usize> = (0..count).collect();
        order.sort_by_key(|&i| self.lens[i]);
        let sorted_lens: Vec<usize> = order.iter().map(|&i| self.lens[i]).collect();
        let words = count.div_ceil(64);

        // per internal vertex: bitset over positions of bridges through it
        let mut slot = vec![usize::MAX; num_nodes];
        let mut through: Vec<u64> = Vec::new();
        for (pos, &i) in order.iter().enumerate() {
            for &v in self.verts(i) {
                if slot[v] == usize::MAX {
                    slot[v] = through.len() / words;
                    through.resize(through.len() + words, 0);
                }
                through[slot[v] * words + pos / 64] |= 1 << (pos % 64);
            }
        }

        let has_partner = |i: usize| -> bool {
            let budget = max_circle_len - self.lens[i];
            let end = sorted_lens.partition_point(|&l| l <= budget);
            let verts = self.verts(i);
            (0..end.div_ceil(64)).any(|w| {
                let blocked = verts
                    .iter()
                    .fold(0u64, |acc, &v| acc | through[slot[v] * words + w]);
                let valid = if (w + 1) * 64 <= end {
                    u64::MAX
                } else {
                    (1u64 << (end - w * 64)) - 1
                };
                !blocked & valid != 0
            })
        };
        (0..count).filter(|&i| has_partner(i)).count()
    }
}

/// Independent ground truth for [`bridge_count`]: enumerates every simple
/// cycle of length ≤ `max_circle_len` through `src`, keeps those that also
/// pass through `dst`, cuts each at both endpoints and counts the distinct
/// resulting paths (only cycles whose two halves both have length ≥ 2).
///
/// Exponential in the cycle bound; intended for graphs of roughly 20 nodes.
pub fn bridge_count_oracle(g: &Graph, p: NodePair, cfg: &CircleConfig) -> Result<usize> {
    cfg.validate()?;
    let p = p.validate(g)?;
    let mut halves: HashSet<Vec<usize>> = HashSet::new();
    let mut visited = 0usize;

    fn walk(
        g: &Graph,
        p: NodePair,
        k: usize,
        path: &mut Vec<usize>,
        halves: &mut HashSet<Vec<usize>>,
        visited: &mut usize,
        cap: usize,
    ) -> Result<()> {
        let v = *path.last().unwrap();
        for &w in g.adj(v) {
            if w == p.src {
                // closing edge; path already holds ≥ 3 nodes for a real cycle
                if path.len() >= 3 {
                    if let Some(pos) = path.iter().position(|&x| x == p.dst) {
                        let first: Vec<usize> = path[..=pos].to_vec();
                        let mut second: Vec<usize> = vec![p.src];
                        second.extend(path[pos..].iter().rev());
                        if first.len() >= 3 && second.len() >= 3 {
                            halves.insert(first);
                            halves.insert(second);
                        }
                    }
                }
                continue;
            }
            if path.contains(&w) || path.len() >= k {
                continue;
            }
            *visited += 1;
            if *visited > cap.saturating_mul(1000) {
                return Err(Error::CapExceeded {
                    src: p.src,
                    dst: p.dst,
                    cap,
                });
            }
            path.push(w);
            walk(g, p, k, path, halves, visited, cap)?;
            path.pop();
        }
        Ok(())
    }

    let mut path = vec![p.src];
    walk(
        g,
        p,
        cfg.max_circle_len,
        &mut path,
        &mut halves,
        &mut visited,
        cfg.max_bridges,
    )?;
    Ok(halves.len())
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Squashes a bridge count into `[0, 1)`: `½·tanh(c) + σ(c) − ½`.
pub fn bridge_score(count: usize) -> f64 {
    let c = count as f64;
    0.5 * c.tanh() + sigmoid(c) - 0.5
}

/// `a_ij + ½·tanh(c) + σ(c) − ½` with `c` from [`bridge_count`].
pub fn bridge_feature(g: &Graph, p: NodePair, cfg: &CircleConfig) -> Result<f64> {
    let c = bridge_count(g, p, cfg)?;
    Ok(g.adjacency_value(p) + bridge_score(c))
}

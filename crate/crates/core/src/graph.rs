//! Immutable undirected simple graph in compressed sparse row form.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Undirected simple graph. Neighbor lists are sorted, deduplicated and
/// free of self-loops; adjacency is symmetric.
#[derive(Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    node_features: Option<Array2<f64>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("num_nodes", &self.num_nodes())
            .field("num_edges", &self.num_edges())
            .field("has_features", &self.node_features.is_some())
            .finish()
    }
}

/// An ordered pair of distinct, in-range nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodePair {
    pub src: usize,
    pub dst: usize,
}

impl NodePair {
    pub fn new(g: &Graph, src: usize, dst: usize) -> Result<Self> {
        g.check_node(src)?;
        g.check_node(dst)?;
        if src == dst {
            return Err(Error::SelfPair { src, dst });
        }
        Ok(NodePair { src, dst })
    }

    pub fn reversed(self) -> Self {
        NodePair {
            src: self.dst,
            dst: self.src,
        }
    }

    /// Re-validates a pair against a (possibly different) graph.
    pub fn validate(self, g: &Graph) -> Result<Self> {
        NodePair::new(g, self.src, self.dst)
    }
}

/// Builds a graph from an edge list. Edges are symmetrized and deduplicated;
/// self-loops are dropped.
pub fn build_graph(edges: &[(usize, usize)], num_nodes: usize) -> Result<Graph> {
    let mut degree = vec![0usize; num_nodes];
    for &(u, v) in edges {
        for node in [u, v] {
            if node >= num_nodes {
                return Err(Error::OutOfRange { node, num_nodes });
            }
        }
        if u != v {
            degree[u] += 1;
            degree[v] += 1;
        }
    }

    let mut offsets = vec![0usize; num_nodes + 1];
    for (i, d) in degree.iter().enumerate() {
        offsets[i + 1] = offsets[i] + d;
    }
    let mut fill = offsets.clone();
    let mut targets = vec![0usize; offsets[num_nodes]];
    for &(u, v) in edges {
        if u == v {
            continue;
        }
        targets[fill[u]] = v;
        fill[u] += 1;
        targets[fill[v]] = u;
        fill[v] += 1;
    }

    // sort + dedup each row, then compact
    let mut compact_offsets = vec![0usize; num_nodes + 1];
    let mut compact = Vec::with_capacity(targets.len());
    for i in 0..num_nodes {
        let row = &mut targets[offsets[i]..offsets[i + 1]];
        row.sort_unstable();
        let mut last = None;
        for &t in row.iter() {
            if last != Some(t) {
                compact.push(t);
                last = Some(t);
            }
        }
        compact_offsets[i + 1] = compact.len();
    }

    Ok(Graph {
        offsets: compact_offsets,
        targets: compact,
        node_features: None,
    })
}

impl Graph {
    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn check_node(&self, v: usize) -> Result<()> {
        if v < self.num_nodes() {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                node: v,
                num_nodes: self.num_nodes(),
            })
        }
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> Result<&[usize]> {
        self.check_node(v)?;
        Ok(self.adj(v))
    }

    /// Unchecked neighbor view for internal hot loops; panics on bad ids.
    pub(crate) fn adj(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> Result<usize> {
        self.neighbors(v).map(<[usize]>::len)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> Result<bool> {
        self.check_node(v)?;
        Ok(self.neighbors(u)?.binary_search(&v).is_ok())
    }

    /// 1.0 if the pair is adjacent, else 0.0.
    pub(crate) fn adjacency_value(&self, p: NodePair) -> f64 {
        if self.adj(p.src).binary_search(&p.dst).is_ok() {
            1.0
        } else {
            0.0
        }
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_nodes()).flat_map(move |u| {
            self.adj(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn node_features(&self) -> Option<&Array2<f64>> {
        self.node_features.as_ref()
    }

    /// Attaches an N×d feature matrix.
    pub fn with_node_features(mut self, features: Array2<f64>) -> Result<Self> {
        if features.nrows() != self.num_nodes() {
            return Err(Error::Shape(format!(
                "feature matrix has {} rows, graph has {} nodes",
                features.nrows(),
                self.num_nodes()
            )));
        }
        self.node_features = Some(features);
        Ok(self)
    }

    /// Copy of the graph with the undirected edge `{u, v}` removed (if present).
    pub fn without_edge(&self, u: usize, v: usize) -> Graph {
        let edges: Vec<_> = self
            .edges()
            .filter(|&(a, b)| !((a == u && b == v) || (a == v && b == u)))
            .collect();
        let mut g = build_graph(&edges, self.num_nodes()).expect("edges already in range");
        g.node_features = self.node_features.clone();
        g
    }

    /// Induced subgraph on `nodes` (which must be sorted, distinct and in
    /// range). Local id `i` corresponds to `nodes[i]`; features are carried
    /// over row by row.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Graph> {
        for w in nodes.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Config(
                    "subgraph node list must be sorted and distinct".into(),
                ));
            }
        }
        let mut edges = Vec::new();
        for (local, &orig) in nodes.iter().enumerate() {
            self.check_node(orig)?;
            for &nb in self.adj(orig) {
                if nb > orig {
                    if let Ok(j) = nodes.binary_search(&nb) {
                        edges.push((local, j));
                    }
                }
            }
        }
        let mut g = build_graph(&edges, nodes.len())?;
        if let Some(x) = &self.node_features {
            g.node_features = Some(x.select(ndarray::Axis(0), nodes));
        }
        Ok(g)
    }

    /// Returns a copy with node `v` relabeled to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.num_nodes() {
            return Err(Error::Shape(format!(
                "permutation has length {}, graph has {} nodes",
                perm.len(),
                self.num_nodes()
            )));
        }
        let edges: Vec<_> = self.edges().map(|(u, v)| (perm[u], perm[v])).collect();
        build_graph(&edges, self.num_nodes())
    }
}

/// Parses an edge-list file; the node count is `1 + max id`.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    load_edge_list_with(path, None)
}

/// Parses an edge-list file. `num_nodes` overrides the inferred node count
/// (needed for trailing isolated nodes) and must cover every id in the file.
pub fn load_edge_list_with(path: impl AsRef<Path>, num_nodes: Option<usize>) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let pairs = parse_pairs(path, &text)?;
    if pairs.is_empty() {
        return Err(Error::EmptyGraph {
            path: path.to_path_buf(),
        });
    }
    let inferred = pairs.iter().map(|&(u, v)| u.max(v)).max().unwrap_or(0) + 1;
    let n = match num_nodes {
        Some(n) if n < inferred => {
            return Err(Error::Config(format!(
                "{}: node count override {n} is smaller than max id + 1 = {inferred}",
                path.display()
            )))
        }
        Some(n) => n,
        None => inferred,
    };
    build_graph(&pairs, n)
}

/// Parses whitespace-separated id pairs, skipping blank lines and `#` comments.
/// Also used for pair files.
pub fn parse_pairs(path: &Path, text: &str) -> Result<Vec<(usize, usize)>> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            msg,
        };
        let mut tokens = line.split_whitespace();
        let mut next_id = || -> Result<usize> {
            let tok = tokens
                .next()
                .ok_or_else(|| err("expected two node ids".into()))?;
            tok.parse::<usize>()
                .map_err(|_| err(format!("invalid node id {tok:?}")))
        };
        let u = next_id()?;
        let v = next_id()?;
        if let Some(extra) = tokens.next() {
            return Err(err(format!("unexpected trailing token {extra:?}")));
        }
        pairs.push((u, v));
    }
    Ok(pairs)
}

/// Renders the graph in edge-list format, one `u v` line per edge with `u < v`.
pub fn format_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn write_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(format_edge_list(g).as_bytes())
        .map_err(|e| Error::io(path, e))
}

/// Synthetic graph families used as fixtures and toy benchmarks.
#[derive(Debug, Clone, PartialEq)]
pub enum SyntheticKind {
    Path {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    Complete {
        n: usize,
    },
    /// Terminals 0 and 1 joined by `k` internally disjoint paths of `len` edges.
    Theta {
        k: usize,
        len: usize,
    },
    /// Erdős–Rényi G(n, p).
    Er {
        n: usize,
        p: f64,
    },
    /// Two equal-sized blocks (first `n/2` ids, then the rest).
    Sbm2 {
        n: usize,
        p_in: f64,
        p_out: f64,
    },
}

impl SyntheticKind {
    pub fn name(&self) -> &'static str {
        match self {
            SyntheticKind::Path { .. } => "path",
            SyntheticKind::Cycle { .. } => "cycle",
            SyntheticKind::Complete { .. } => "complete",
            SyntheticKind::Theta { .. } => "theta",
            SyntheticKind::Er { .. } => "er",
            SyntheticKind::Sbm2 { .. } => "sbm2",
        }
    }

    fn validate(&self) -> Result<()> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be in [0, 1], got {p}")))
            }
        };
        match *self {
            SyntheticKind::Path { n } | SyntheticKind::Complete { n } if n == 0 => {
                Err(Error::Config("n must be at least 1".into()))
            }
            SyntheticKind::Cycle { n } if n < 3 => {
                Err(Error::Config(format!("cycle needs n >= 3, got {n}")))
            }
            SyntheticKind::Theta { k, len } if k < 2 || len < 2 => Err(Error::Config(format!(
                "theta needs k >= 2 and len >= 2, got k={k} len={len}"
            ))),
            SyntheticKind::Er { n, p } => {
                if n == 0 {
                    return Err(Error::Config("n must be at least 1".into()));
                }
                prob("p", p)
            }
            SyntheticKind::Sbm2 { n, p_in, p_out } => {
                if n < 2 {
                    return Err(Error::Config(format!("sbm2 needs n >= 2, got {n}")));
                }
                prob("p_in", p_in)?;
                prob("p_out", p_out)
            }
            _ => Ok(()),
        }
    }
}

/// Deterministic synthetic graph. The seed only matters for random families.
pub fn generate_synthetic(kind: &SyntheticKind, seed: u64) -> Result<Graph> {
    kind.validate()?;
    match *kind {
        SyntheticKind::Path { n } => {
            let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
            build_graph(&edges, n)
        }
        SyntheticKind::Cycle { n } => {
            let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            build_graph(&edges, n)
        }
        SyntheticKind::Complete { n } => {
            let edges: Vec<_> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect();
            build_graph(&edges, n)
        }
        SyntheticKind::Theta { k, len } => {
            let n = 2 + k * (len - 1);
            let mut edges = Vec::with_capacity(k * len);
            let mut next = 2;
            for _ in 0..k {
                let mut prev = 0;
                for _ in 0..len - 1 {
                    edges.push((prev, next));
                    prev = next;
                    next += 1;
                }
                edges.push((prev, 1));
            }
            build_graph(&edges, n)
        }
        SyntheticKind::Er { n, p } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let edges: Vec<_> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|_| rng.random::<f64>() < p)
                .collect();
            build_graph(&edges, n)
        }
        SyntheticKind::Sbm2 { n, p_in, p_out } => {
            let half = n / 2;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let edges: Vec<_> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| {
                    let p = if (i < half) == (j < half) {
                        p_in
                    } else {
                        p_out
                    };
                    rng.random::<f64>() < p
                })
                .collect();
            build_graph(&edges, n)
        }
    }
}

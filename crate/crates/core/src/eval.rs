//! Link-prediction harness: enclosing subgraphs, negative sampling,
//! pessimistic ranking and mean reciprocal rank.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt::Write as _;
use std::path::PathBuf;

use rand::seq::{index, SliceRandom};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::attention::{
    self, input_dim_for, pair_bias, AttentionParams, BiasMode, BiasSource, LinkConfig,
    PairFeatures, NUM_BIAS_TERMS,
};
use crate::error::{Error, Result};
use crate::graph::{
    build_graph, generate_synthetic, load_edge_list_with, Graph, NodePair, SyntheticKind,
};

/// Induced neighborhood of a node pair, relabeled to local ids.
#[derive(Debug, Clone)]
pub struct EnclosingSubgraph {
    pub graph: Graph,
    /// `mapping[local] = original id`, ascending.
    pub mapping: Vec<usize>,
    /// Local ids of `(src, dst)`.
    pub centers: (usize, usize),
}

/// Induced subgraph on all nodes within `hops` of either endpoint, with the
/// pair's own edge removed.
pub fn extract_enclosing_subgraph(
    g: &Graph,
    p: NodePair,
    hops: usize,
) -> Result<EnclosingSubgraph> {
    let p = p.validate(g)?;
    if hops == 0 {
        return Err(Error::Config("hops must be at least 1".into()));
    }
    let mut dist = vec![usize::MAX; g.num_nodes()];
    let mut queue = VecDeque::new();
    for s in [p.src, p.dst] {
        dist[s] = 0;
        queue.push_back(s);
    }
    let mut nodes = BTreeSet::from([p.src, p.dst]);
    while let Some(v) = queue.pop_front() {
        if dist[v] == hops {
            continue;
        }
        for &w in g.adj(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                nodes.insert(w);
                queue.push_back(w);
            }
        }
    }
    let mapping: Vec<usize> = nodes.into_iter().collect();
    let local = |v: usize| mapping.binary_search(&v).expect("endpoint in node set");
    let centers = (local(p.src), local(p.dst));
    let sub = g.induced_subgraph(&mapping)?;
    let graph = if sub.adj(centers.0).binary_search(&centers.1).is_ok() {
        sub.without_edge(centers.0, centers.1)
    } else {
        sub
    };
    Ok(EnclosingSubgraph {
        graph,
        mapping,
        centers,
    })
}

/// `k` distinct nodes that are neither `source` nor adjacent to it. The
/// random stream depends on both `seed` and `source`, so sources can be
/// sampled in any order or in parallel.
pub fn sample_negatives(g: &Graph, source: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    let nbrs = g.neighbors(source)?;
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    let candidates: Vec<usize> = (0..g.num_nodes())
        .filter(|&v| v != source && nbrs.binary_search(&v).is_err())
        .collect();
    if candidates.len() < k {
        return Err(Error::Config(format!(
            "node {source} has {} non-neighbors, {k} negatives requested",
            candidates.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(source as u64);
    Ok(index::sample(&mut rng, candidates.len(), k)
        .into_iter()
        .map(|i| candidates[i])
        .collect())
}

/// `1 + |{s ∈ neg_scores : s ≥ pos_score}|`; ties count against the positive.
pub fn rank_of_positive(pos_score: f64, neg_scores: &[f64]) -> Result<usize> {
    if neg_scores.is_empty() {
        return Err(Error::Config("no negative scores".into()));
    }
    if !pos_score.is_finite() || neg_scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Numeric("non-finite score in ranking".into()));
    }
    Ok(1 + neg_scores.iter().filter(|&&s| s >= pos_score).count())
}

pub fn mrr(ranks: &[usize]) -> Result<f64> {
    if ranks.is_empty() {
        return Err(Error::Config("no ranks to average".into()));
    }
    if ranks.contains(&0) {
        return Err(Error::Config("ranks must be at least 1".into()));
    }
    Ok(ranks.iter().map(|&r| 1.0 / r as f64).sum::<f64>() / ranks.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSpec {
    Synthetic {
        kind: SyntheticKind,
        seed: u64,
    },
    File {
        path: PathBuf,
        num_nodes: Option<usize>,
    },
}

impl GraphSpec {
    pub fn load(&self) -> Result<Graph> {
        match self {
            GraphSpec::Synthetic { kind, seed } => generate_synthetic(kind, *seed),
            GraphSpec::File { path, num_nodes } => load_edge_list_with(path, *num_nodes),
        }
    }

    fn echo(&self, out: &mut Vec<(String, String)>) {
        match self {
            GraphSpec::Synthetic { kind, seed } => {
                out.push(("graph.kind".into(), kind.name().into()));
                let mut push = |k: &str, v: String| out.push((format!("graph.{k}"), v));
                match *kind {
                    SyntheticKind::Path { n }
                    | SyntheticKind::Cycle { n }
                    | SyntheticKind::Complete { n } => push("n", n.to_string()),
                    SyntheticKind::Theta { k, len } => {
                        push("k", k.to_string());
                        push("len", len.to_string());
                    }
                    SyntheticKind::Er { n, p } => {
                        push("n", n.to_string());
                        push("p", format!("{p:.6}"));
                    }
                    SyntheticKind::Sbm2 { n, p_in, p_out } => {
                        push("n", n.to_string());
                        push("p_in", format!("{p_in:.6}"));
                        push("p_out", format!("{p_out:.6}"));
                    }
                }
                push("seed", seed.to_string());
            }
            GraphSpec::File { path, num_nodes } => {
                out.push(("graph.path".into(), path.display().to_string()));
                if let Some(n) = num_nodes {
                    out.push(("graph.num_nodes".into(), n.to_string()));
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelMode {
    /// Logistic regression over the six pair features.
    FeaturesLogistic,
    /// Biased attention with a logistic readout.
    Attention,
    /// Every pair scores 0.5.
    Constant,
}

impl ModelMode {
    pub fn name(&self) -> &'static str {
        match self {
            ModelMode::FeaturesLogistic => "features-logistic",
            ModelMode::Attention => "attention",
            ModelMode::Constant => "constant",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    /// Fraction of edges held out as evaluation positives.
    pub holdout_fraction: f64,
    pub k_negatives: usize,
    pub mode: ModelMode,
    pub seed: u64,
    pub link: LinkConfig,
    pub epochs: usize,
    pub learning_rate: f64,
    pub attention_dim: usize,
    pub bias_mode: BiasMode,
    /// Training positives sampled from the remaining edges (with as many
    /// sampled non-edges as negatives).
    pub train_pairs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            graph: GraphSpec::Synthetic {
                kind: SyntheticKind::Sbm2 {
                    n: 200,
                    p_in: 0.15,
                    p_out: 0.01,
                },
                seed: 11,
            },
            holdout_fraction: 0.1,
            k_negatives: 100,
            mode: ModelMode::FeaturesLogistic,
            seed: 0,
            link: LinkConfig::default(),
            epochs: 200,
            learning_rate: attention::DEFAULT_LEARNING_RATE,
            attention_dim: 8,
            bias_mode: BiasMode::Raw,
            train_pairs: 200,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.link.circle.validate()?;
        if !(self.holdout_fraction > 0.0 && self.holdout_fraction < 1.0) {
            return Err(Error::Config(format!(
                "holdout fraction must be in (0, 1), got {}",
                self.holdout_fraction
            )));
        }
        if self.k_negatives == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.link.hops == 0 || self.link.d_max == 0 {
            return Err(Error::Config("hops and d_max must be at least 1".into()));
        }
        if self.attention_dim == 0 {
            return Err(Error::Config("attention dim must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if self.train_pairs == 0 && self.mode != ModelMode::Constant {
            return Err(Error::Config("train_pairs must be at least 1".into()));
        }
        Ok(())
    }

    /// Every setting as ordered key/value pairs.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        self.graph.echo(&mut out);
        let c = &self.link.circle;
        let mut push = |k: &str, v: String| out.push((k.to_string(), v));
        push("holdout_fraction", format!("{:.6}", self.holdout_fraction));
        push("k_negatives", self.k_negatives.to_string());
        push("mode", self.mode.name().into());
        push("seed", self.seed.to_string());
        push("alpha", format!("{:.6}", c.alpha));
        push("include_self_pairs", c.include_self_pairs.to_string());
        push("max_circle_len", c.max_circle_len.to_string());
        push("max_bridges", c.max_bridges.to_string());
        push("d_max", self.link.d_max.to_string());
        push("hops", self.link.hops.to_string());
        push(
            "bias_source",
            match self.link.bias_source {
                BiasSource::Subgraph => "subgraph",
                BiasSource::FullGraph => "full-graph",
            }
            .into(),
        );
        push("epochs", self.epochs.to_string());
        push("learning_rate", format!("{:.6}", self.learning_rate));
        push("attention_dim", self.attention_dim.to_string());
        push(
            "bias_mode",
            match self.bias_mode {
                BiasMode::Raw => "raw",
                BiasMode::Weighted => "weighted",
            }
            .into(),
        );
        push("train_pairs", self.train_pairs.to_string());
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// `(source, rank)` for every evaluated source, ascending by source.
    pub per_source_ranks: Vec<(usize, usize)>,
    pub mrr: f64,
    pub config_echo: Vec<(String, String)>,
    pub seed: u64,
}

impl EvalReport {
    /// Key/value header followed by a `source,rank` section.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "mrr = {:.6}", self.mrr).unwrap();
        writeln!(s, "num_sources = {}", self.per_source_ranks.len()).unwrap();
        writeln!(s, "seed = {}", self.seed).unwrap();
        for (k, v) in &self.config_echo {
            writeln!(s, "config.{k} = {v}").unwrap();
        }
        s.push_str("\n[ranks]\nsource,rank\n");
        for (src, rank) in &self.per_source_ranks {
            writeln!(s, "{src},{rank}").unwrap();
        }
        s
    }
}

// named sub-streams of the experiment seed
const STREAM_HOLDOUT: u64 = 1;
const STREAM_TRAIN_POS: u64 = 2;
const STREAM_TRAIN_NEG: u64 = 3;
const STREAM_INIT: u64 = 4;
const STREAM_EVAL_NEG: u64 = 5;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn sub_seed(seed: u64, id: u64) -> u64 {
    stream(seed, id).next_u64()
}

/// Standardized logistic regression over the six pair features.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    mean: [f64; NUM_BIAS_TERMS],
    scale: [f64; NUM_BIAS_TERMS],
    pub weights: [f64; NUM_BIAS_TERMS],
    pub intercept: f64,
}

impl LogisticModel {
    pub fn fit(samples: &[(PairFeatures, f64)], epochs: usize, learning_rate: f64) -> Self {
        let m = samples.len().max(1) as f64;
        let mut mean = [0.0; NUM_BIAS_TERMS];
        let mut scale = [0.0; NUM_BIAS_TERMS];
        for (f, _) in samples {
            for (t, v) in f.to_array().iter().enumerate() {
                mean[t] += v / m;
            }
        }
        for (f, _) in samples {
            for (t, v) in f.to_array().iter().enumerate() {
                scale[t] += (v - mean[t]).powi(2) / m;
            }
        }
        for s in scale.iter_mut() {
            *s = if *s > 0.0 { s.sqrt() } else { 1.0 };
        }
        let mut model = LogisticModel {
            mean,
            scale,
            weights: [0.0; NUM_BIAS_TERMS],
            intercept: 0.0,
        };
        let xs: Vec<[f64; NUM_BIAS_TERMS]> =
            samples.iter().map(|(f, _)| model.standardize(f)).collect();
        for _ in 0..epochs {
            let mut gw = [0.0; NUM_BIAS_TERMS];
            let mut gb = 0.0;
            for (x, (_, y)) in xs.iter().zip(samples) {
                let err = (model.probability(x) - y) / m;
                for (g, xt) in gw.iter_mut().zip(x) {
                    *g += err * xt;
                }
                gb += err;
            }
            for (w, g) in model.weights.iter_mut().zip(gw) {
                *w -= learning_rate * g;
            }
            model.intercept -= learning_rate * gb;
        }
        model
    }

    fn standardize(&self, f: &PairFeatures) -> [f64; NUM_BIAS_TERMS] {
        let a = f.to_array();
        std::array::from_fn(|t| (a[t] - self.mean[t]) / self.scale[t])
    }

    fn probability(&self, x: &[f64; NUM_BIAS_TERMS]) -> f64 {
        let z: f64 = self.intercept + x.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>();
        1.0 / (1.0 + (-z).exp())
    }

    pub fn predict(&self, f: &PairFeatures) -> f64 {
        self.probability(&self.standardize(f))
    }
}

/// Features of the centered pair of its enclosing subgraph (or of the full
/// graph minus the pair's edge).
pub fn link_features(g: &Graph, p: NodePair, cfg: &LinkConfig) -> Result<PairFeatures> {
    match cfg.bias_source {
        BiasSource::Subgraph => {
            let sub = extract_enclosing_subgraph(g, p, cfg.hops)?;
            let centers = NodePair {
                src: sub.centers.0,
                dst: sub.centers.1,
            };
            pair_bias(&sub.graph, centers, &cfg.circle, cfg.d_max)
        }
        BiasSource::FullGraph => {
            pair_bias(&g.without_edge(p.src, p.dst), p, &cfg.circle, cfg.d_max)
        }
    }
}

enum Scorer {
    Constant,
    Logistic(LogisticModel),
    Attention(AttentionParams),
}

impl Scorer {
    fn score(&self, g: &Graph, p: NodePair, cfg: &LinkConfig) -> Result<f64> {
        match self {
            Scorer::Constant => Ok(0.5),
            Scorer::Logistic(m) => Ok(m.predict(&link_features(g, p, cfg)?)),
            Scorer::Attention(params) => attention::score_link(g, p, params, cfg),
        }
    }
}

/// Holds out edges, trains the selected model on the rest and reports MRR
/// of each held-out edge against `k` sampled negatives of its source.
pub fn run_toy_experiment(config: &ExperimentConfig) -> Result<EvalReport> {
    config.validate()?;
    let full = config.graph.load()?;
    let k = config.k_negatives;

    // one held-out positive per source
    let mut edges: Vec<(usize, usize)> = full.edges().collect();
    let mut rng = stream(config.seed, STREAM_HOLDOUT);
    edges.shuffle(&mut rng);
    let target = ((config.holdout_fraction * edges.len() as f64).round() as usize).max(1);
    let mut used_sources = HashSet::new();
    let mut held_out: Vec<(usize, usize)> = Vec::new();
    let mut held_set = HashSet::new();
    for &(u, v) in &edges {
        if held_out.len() == target {
            break;
        }
        let (s, t) = if rng.random::<bool>() { (u, v) } else { (v, u) };
        let non_neighbors = full.num_nodes() - 1 - full.adj(s).len();
        if used_sources.contains(&s) || non_neighbors < k {
            continue;
        }
        used_sources.insert(s);
        held_out.push((s, t));
        held_set.insert((u.min(v), u.max(v)));
    }
    if held_out.is_empty() {
        return Err(Error::Config(
            "no held-out positives: graph too small or too dense for k negatives".into(),
        ));
    }
    let train_edges: Vec<(usize, usize)> = full.edges().filter(|e| !held_set.contains(e)).collect();
    let train_graph = build_graph(&train_edges, full.num_nodes())?;

    let scorer = match config.mode {
        ModelMode::Constant => Scorer::Constant,
        mode => {
            let samples = training_pairs(&full, &train_edges, config)?;
            match mode {
                ModelMode::FeaturesLogistic => {
                    let feats = samples
                        .par_iter()
                        .map(|&(p, y)| link_features(&train_graph, p, &config.link).map(|f| (f, y)))
                        .collect::<Result<Vec<_>>>()?;
                    Scorer::Logistic(LogisticModel::fit(
                        &feats,
                        config.epochs,
                        config.learning_rate,
                    ))
                }
                _ => {
                    let examples = samples
                        .par_iter()
                        .map(|&(p, y)| attention::prepare_example(&train_graph, p, &config.link, y))
                        .collect::<Result<Vec<_>>>()?;
                    let mut params = AttentionParams::random(
                        input_dim_for(&train_graph),
                        config.attention_dim,
                        config.bias_mode,
                        sub_seed(config.seed, STREAM_INIT),
                    );
                    attention::train(&mut params, &examples, config.epochs, config.learning_rate)?;
                    Scorer::Attention(params)
                }
            }
        }
    };

    let neg_seed = sub_seed(config.seed, STREAM_EVAL_NEG);
    let mut per_source_ranks = held_out
        .par_iter()
        .map(|&(s, t)| -> Result<(usize, usize)> {
            let negatives = sample_negatives(&full, s, k, neg_seed)?;
            let pos = scorer.score(&train_graph, NodePair { src: s, dst: t }, &config.link)?;
            let negs = negatives
                .iter()
                .map(|&n| scorer.score(&train_graph, NodePair { src: s, dst: n }, &config.link))
                .collect::<Result<Vec<_>>>()?;
            Ok((s, rank_of_positive(pos, &negs)?))
        })
        .collect::<Result<Vec<_>>>()?;
    per_source_ranks.sort_unstable();

    let ranks: Vec<usize> = per_source_ranks.iter().map(|&(_, r)| r).collect();
    Ok(EvalReport {
        mrr: mrr(&ranks)?,
        per_source_ranks,
        config_echo: config.echo(),
        seed: config.seed,
    })
}

/// Labeled training pairs: sampled remaining edges (label 1) and sampled
/// non-edges of the full graph (label 0).
fn training_pairs(
    full: &Graph,
    train_edges: &[(usize, usize)],
    config: &ExperimentConfig,
) -> Result<Vec<(NodePair, f64)>> {
    if train_edges.is_empty() {
        return Err(Error::Config("no training edges left after holdout".into()));
    }
    let count = config.train_pairs.min(train_edges.len());
    let mut rng = stream(config.seed, STREAM_TRAIN_POS);
    let mut out: Vec<(NodePair, f64)> = index::sample(&mut rng, train_edges.len(), count)
        .into_iter()
        .map(|i| {
            let (u, v) = train_edges[i];
            (NodePair { src: u, dst: v }, 1.0)
        })
        .collect();

    let n = full.num_nodes();
    let max_non_edges = n * (n - 1) / 2 - full.num_edges();
    if max_non_edges < count {
        return Err(Error::Config(
            "graph too dense to sample training non-edges".into(),
        ));
    }
    let mut rng = stream(config.seed, STREAM_TRAIN_NEG);
    let mut seen = HashSet::new();
    while seen.len() < count {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v || full.adj(u).binary_search(&v).is_ok() || !seen.insert((u.min(v), u.max(v))) {
            continue;
        }
        out.push((NodePair { src: u, dst: v }, 0.0));
    }
    Ok(out)
}

//! Single-head self-attention with additive structural bias and a logistic
//! link-scoring head.
//!
//! Logits are `L[i][j] = Q_i·K_j / √d + Σ_t c_t · term_t(i, j)` where the six
//! terms are the [`PairFeatures`] of nodes `i` and `j`. In [`BiasMode::Raw`]
//! every coefficient is fixed at 1.0; [`BiasMode::Weighted`] makes them
//! trainable.
//!
//! Reductions across nodes (softmax denominators and value aggregation) sum
//! their terms in sorted order, so permuting the node order permutes the
//! output rows bit for bit.

use ndarray::{s, Array1, Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circle::{self, CircleConfig};
use crate::error::{Error, Result};
use crate::eval::extract_enclosing_subgraph;
use crate::graph::{Graph, NodePair};
use crate::structural;

pub const NUM_BIAS_TERMS: usize = 6;
/// Width of the one-hot degree encoding used when a graph has no node features.
pub const DEGREE_BUCKETS: usize = 16;
pub const DEFAULT_D_MAX: usize = 10;
pub const DEFAULT_LEARNING_RATE: f64 = 0.05;

/// The six structural bias terms for one node pair.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PairFeatures {
    pub dist_bias: f64,
    pub num_bias: f64,
    pub aa: f64,
    pub jac: f64,
    pub swing: f64,
    pub bridge: f64,
}

impl PairFeatures {
    pub fn to_array(&self) -> [f64; NUM_BIAS_TERMS] {
        [
            self.dist_bias,
            self.num_bias,
            self.aa,
            self.jac,
            self.swing,
            self.bridge,
        ]
    }

    pub fn from_array(a: [f64; NUM_BIAS_TERMS]) -> Self {
        PairFeatures {
            dist_bias: a[0],
            num_bias: a[1],
            aa: a[2],
            jac: a[3],
            swing: a[4],
            bridge: a[5],
        }
    }

    pub fn dot(&self, coeffs: &[f64; NUM_BIAS_TERMS]) -> f64 {
        self.to_array().iter().zip(coeffs).map(|(f, c)| f * c).sum()
    }
}

/// Computes all six bias terms for `p`. Distances are clipped to `d_max`;
/// unreachable pairs get `d_max + 1`.
pub fn pair_bias(g: &Graph, p: NodePair, cfg: &CircleConfig, d_max: usize) -> Result<PairFeatures> {
    if d_max == 0 {
        return Err(Error::Config("d_max must be at least 1".into()));
    }
    let p = p.validate(g)?;
    assemble(
        g,
        p,
        cfg,
        d_max,
        structural::shortest_paths(g, p)?,
        circle::bridge_count(g, p, cfg)?,
    )
}

fn assemble(
    g: &Graph,
    p: NodePair,
    cfg: &CircleConfig,
    d_max: usize,
    paths: structural::PathInfo,
    bridges: usize,
) -> Result<PairFeatures> {
    let dist_bias = match paths.distance {
        Some(d) => d.min(d_max) as f64,
        None => (d_max + 1) as f64,
    };
    Ok(PairFeatures {
        dist_bias,
        num_bias: paths.num_shortest as f64,
        aa: structural::adamic_adar(g, p)?,
        jac: structural::jaccard(g, p)?,
        swing: circle::swing_plus(g, p, cfg)?,
        bridge: g.adjacency_value(p) + circle::bridge_score(bridges),
    })
}

/// Per-pair bias terms over an ordered node set. The diagonal is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasMatrix {
    n: usize,
    terms: Vec<[f64; NUM_BIAS_TERMS]>,
}

impl BiasMatrix {
    pub fn zeros(n: usize) -> Self {
        BiasMatrix {
            n,
            terms: vec![[0.0; NUM_BIAS_TERMS]; n * n],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn features(&self, a: usize, b: usize) -> PairFeatures {
        PairFeatures::from_array(self.terms[a * self.n + b])
    }

    pub fn set_features(&mut self, a: usize, b: usize, f: PairFeatures) {
        self.terms[a * self.n + b] = f.to_array();
    }

    /// `B[a][b] = Σ_t coeffs[t] · term_t(a, b)`.
    pub fn value(&self, a: usize, b: usize, coeffs: &[f64; NUM_BIAS_TERMS]) -> f64 {
        self.features(a, b).dot(coeffs)
    }

    pub fn combined(&self, coeffs: &[f64; NUM_BIAS_TERMS]) -> Array2<f64> {
        Array2::from_shape_fn((self.n, self.n), |(a, b)| self.value(a, b, coeffs))
    }

    /// Reorders nodes so that new index `i` holds old index `order[i]`.
    pub fn reordered(&self, order: &[usize]) -> Self {
        let n = self.n;
        let mut out = BiasMatrix::zeros(n);
        for (i, &oi) in order.iter().enumerate() {
            for (j, &oj) in order.iter().enumerate() {
                out.terms[i * n + j] = self.terms[oi * n + oj];
            }
        }
        out
    }
}

/// Bias matrix over `nodes` (ids in `g`). Pairs are computed in parallel.
pub fn build_bias_matrix(
    g: &Graph,
    nodes: &[usize],
    cfg: &CircleConfig,
    d_max: usize,
) -> Result<BiasMatrix> {
    for &v in nodes {
        g.check_node(v)?;
    }
    let mut sorted = nodes.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Config("bias matrix nodes must be distinct".into()));
    }

    if d_max == 0 {
        return Err(Error::Config("d_max must be at least 1".into()));
    }
    cfg.validate()?;

    let n = nodes.len();
    // when the node set spans the graph, one traversal per row serves every
    // pair in it; otherwise per-pair searches touch far less of the graph
    let spans = n == g.num_nodes();
    let mut position = vec![0; g.num_nodes()];
    for (i, &v) in nodes.iter().enumerate() {
        position[v] = i;
    }
    let rows = (0..n)
        .into_par_iter()
        .map(|a| -> Result<Vec<PairFeatures>> {
            let src = nodes[a];
            let infos = structural::path_infos_from(g, src, structural::DEFAULT_PATH_COUNT_CAP)?;
            let counts = if spans {
                Some(circle::bridge_counts_where(g, src, cfg, |w| {
                    position[w] > a
                })?)
            } else {
                None
            };
            (a + 1..n)
                .map(|b| {
                    let p = NodePair { src, dst: nodes[b] };
                    let c = match &counts {
                        Some(c) => c[p.dst],
                        None => circle::bridge_count(g, p, cfg)?,
                    };
                    assemble(g, p, cfg, d_max, infos[p.dst], c)
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let upper = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
    let feats = rows.into_iter().flatten();

    // every feature is symmetric in the pair, so mirror the upper triangle
    let mut m = BiasMatrix::zeros(n);
    for ((a, b), f) in upper.zip(feats) {
        m.set_features(a, b, f);
        m.set_features(b, a, f);
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasMode {
    /// Bias terms added with coefficient 1.0.
    Raw,
    /// One trainable coefficient per bias term.
    Weighted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttentionParams {
    pub dim: usize,
    pub mode: BiasMode,
    pub w_query: Array2<f64>,
    pub w_key: Array2<f64>,
    pub w_value: Array2<f64>,
    pub bias_coeffs: [f64; NUM_BIAS_TERMS],
    /// Length `2 * dim`: weights over the concatenated outputs of both centered nodes.
    pub readout: Array1<f64>,
    pub intercept: f64,
}

impl AttentionParams {
    /// All projection and readout weights zero; coefficients at 1.0.
    pub fn zeros(input_dim: usize, dim: usize, mode: BiasMode) -> Self {
        AttentionParams {
            dim,
            mode,
            w_query: Array2::zeros((input_dim, dim)),
            w_key: Array2::zeros((input_dim, dim)),
            w_value: Array2::zeros((input_dim, dim)),
            bias_coeffs: [1.0; NUM_BIAS_TERMS],
            readout: Array1::zeros(2 * dim),
            intercept: 0.0,
        }
    }

    /// Glorot-uniform projections and readout, zero intercept.
    pub fn random(input_dim: usize, dim: usize, mode: BiasMode, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut uniform = |rows: usize, cols: usize| {
            let limit = (6.0 / (rows + cols) as f64).sqrt();
            Array2::from_shape_simple_fn((rows, cols), || rng.random_range(-limit..limit))
        };
        let w_query = uniform(input_dim, dim);
        let w_key = uniform(input_dim, dim);
        let w_value = uniform(input_dim, dim);
        let readout = uniform(2 * dim, 1).into_shape_with_order(2 * dim).unwrap();
        AttentionParams {
            dim,
            mode,
            w_query,
            w_key,
            w_value,
            bias_coeffs: [1.0; NUM_BIAS_TERMS],
            readout,
            intercept: 0.0,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.w_query.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("attention dim must be at least 1".into()));
        }
        let want = (self.input_dim(), self.dim);
        for (name, w) in [
            ("w_query", &self.w_query),
            ("w_key", &self.w_key),
            ("w_value", &self.w_value),
        ] {
            if w.dim() != want {
                return Err(Error::Shape(format!(
                    "{name} is {:?}, expected {want:?}",
                    w.dim()
                )));
            }
        }
        if self.readout.len() != 2 * self.dim {
            return Err(Error::Shape(format!(
                "readout has length {}, expected {}",
                self.readout.len(),
                2 * self.dim
            )));
        }
        Ok(())
    }

    /// Trainable parameters flattened in a fixed order. Coefficients are
    /// included only in weighted mode.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::new();
        v.extend(self.w_query.iter());
        v.extend(self.w_key.iter());
        v.extend(self.w_value.iter());
        v.extend(self.readout.iter());
        v.push(self.intercept);
        if self.mode == BiasMode::Weighted {
            v.extend(self.bias_coeffs);
        }
        v
    }

    /// Inverse of [`to_vec`](Self::to_vec).
    pub fn set_from_vec(&mut self, v: &[f64]) {
        let mut it = v.iter().copied();
        for x in self
            .w_query
            .iter_mut()
            .chain(self.w_key.iter_mut())
            .chain(self.w_value.iter_mut())
            .chain(self.readout.iter_mut())
        {
            *x = it.next().expect("parameter vector too short");
        }
        self.intercept = it.next().expect("parameter vector too short");
        if self.mode == BiasMode::Weighted {
            for c in self.bias_coeffs.iter_mut() {
                *c = it.next().expect("parameter vector too short");
            }
        }
    }

    fn zeros_like(&self) -> Self {
        let mut z = AttentionParams::zeros(self.input_dim(), self.dim, self.mode);
        z.bias_coeffs = [0.0; NUM_BIAS_TERMS];
        z
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttentionOutput {
    /// n×d aggregated values.
    pub output: Array2<f64>,
    /// n×n row-stochastic attention weights.
    pub weights: Array2<f64>,
}

/// Intermediate values kept for the backward pass.
struct ForwardCache {
    q: Array2<f64>,
    k: Array2<f64>,
    v: Array2<f64>,
    weights: Array2<f64>,
    output: Array2<f64>,
}

fn sorted_sum(terms: &mut [f64]) -> f64 {
    terms.sort_unstable_by(f64::total_cmp);
    terms.iter().sum()
}

/// Row-wise `x · w`, each row computed independently.
fn project(x: ArrayView2<f64>, w: &Array2<f64>) -> Array2<f64> {
    let (n, din) = x.dim();
    let d = w.ncols();
    Array2::from_shape_fn((n, d), |(i, c)| {
        (0..din).map(|k| x[[i, k]] * w[[k, c]]).sum()
    })
}

fn forward(
    x: ArrayView2<f64>,
    params: &AttentionParams,
    bias: Option<&BiasMatrix>,
) -> Result<ForwardCache> {
    params.validate()?;
    let n = x.nrows();
    if x.ncols() != params.input_dim() {
        return Err(Error::Shape(format!(
            "input has {} columns, parameters expect {}",
            x.ncols(),
            params.input_dim()
        )));
    }
    if let Some(b) = bias {
        if b.len() != n {
            return Err(Error::Shape(format!(
                "bias matrix is {}x{0}, input has {n} rows",
                b.len()
            )));
        }
    }

    let q = project(x, &params.w_query);
    let k = project(x, &params.w_key);
    let v = project(x, &params.w_value);
    let scale = (params.dim as f64).sqrt();

    let mut weights = Array2::zeros((n, n));
    let mut row = vec![0.0; n];
    for i in 0..n {
        for (j, slot) in row.iter_mut().enumerate() {
            let qk: f64 = (0..params.dim).map(|c| q[[i, c]] * k[[j, c]]).sum::<f64>() / scale;
            *slot = match bias {
                Some(b) => qk + b.value(i, j, &params.bias_coeffs),
                None => qk,
            };
        }
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for l in row.iter_mut() {
            *l = (*l - max).exp();
        }
        let mut scratch = row.clone();
        let denom = sorted_sum(&mut scratch);
        for j in 0..n {
            weights[[i, j]] = row[j] / denom;
        }
    }

    let mut output = Array2::zeros((n, params.dim));
    let mut terms = vec![0.0; n];
    for i in 0..n {
        for c in 0..params.dim {
            for (j, t) in terms.iter_mut().enumerate() {
                *t = weights[[i, j]] * v[[j, c]];
            }
            output[[i, c]] = sorted_sum(&mut terms);
        }
    }

    Ok(ForwardCache {
        q,
        k,
        v,
        weights,
        output,
    })
}

/// Biased self-attention over the rows of `x`.
pub fn attention_forward(
    x: &Array2<f64>,
    params: &AttentionParams,
    bias: &BiasMatrix,
) -> Result<AttentionOutput> {
    let c = forward(x.view(), params, Some(bias))?;
    Ok(AttentionOutput {
        output: c.output,
        weights: c.weights,
    })
}

/// Plain scaled dot-product self-attention, without any structural bias.
pub fn attention_forward_unbiased(
    x: &Array2<f64>,
    params: &AttentionParams,
) -> Result<AttentionOutput> {
    let c = forward(x.view(), params, None)?;
    Ok(AttentionOutput {
        output: c.output,
        weights: c.weights,
    })
}

/// One scored pair: node inputs and biases of its enclosing subgraph, the
/// local indices of the two centered nodes, and a 0/1 label.
#[derive(Debug, Clone)]
pub struct LinkExample {
    pub x: Array2<f64>,
    pub bias: BiasMatrix,
    pub centers: (usize, usize),
    pub label: f64,
}

fn readout_logit(params: &AttentionParams, output: &Array2<f64>, centers: (usize, usize)) -> f64 {
    let d = params.dim;
    let (a, b) = centers;
    let mut z = params.intercept;
    for c in 0..d {
        z += params.readout[c] * output[[a, c]] + params.readout[d + c] * output[[b, c]];
    }
    z
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// `−[y ln σ(z) + (1−y) ln(1−σ(z))]` in a form that never overflows.
fn bce_with_logit(z: f64, y: f64) -> f64 {
    z.max(0.0) - y * z + (-z.abs()).exp().ln_1p()
}

fn check_example(ex: &LinkExample) -> Result<()> {
    let n = ex.x.nrows();
    if ex.centers.0 >= n || ex.centers.1 >= n {
        return Err(Error::Shape(format!(
            "centers {:?} out of range for {n} nodes",
            ex.centers
        )));
    }
    Ok(())
}

/// Link probability for a prepared example.
pub fn score_example(params: &AttentionParams, ex: &LinkExample) -> Result<f64> {
    check_example(ex)?;
    let cache = forward(ex.x.view(), params, Some(&ex.bias))?;
    Ok(sigmoid(readout_logit(params, &cache.output, ex.centers)))
}

/// Mean binary cross-entropy over `examples`.
pub fn loss(params: &AttentionParams, examples: &[LinkExample]) -> Result<f64> {
    if examples.is_empty() {
        return Err(Error::Config("no examples".into()));
    }
    let mut terms = Vec::with_capacity(examples.len());
    for ex in examples {
        check_example(ex)?;
        let cache = forward(ex.x.view(), params, Some(&ex.bias))?;
        terms.push(bce_with_logit(
            readout_logit(params, &cache.output, ex.centers),
            ex.label,
        ));
    }
    // sorted so that mirrored perturbations of a flat loss cancel exactly
    let l = sorted_sum(&mut terms) / examples.len() as f64;
    if !l.is_finite() {
        return Err(Error::Numeric(format!("loss is {l}")));
    }
    Ok(l)
}

/// Mean loss and its gradient with respect to every trainable parameter,
/// by reverse-mode differentiation. The gradient is returned in the shape
/// of the parameters; in raw mode its coefficient entries are zero.
pub fn analytic_gradient(
    params: &AttentionParams,
    examples: &[LinkExample],
) -> Result<(f64, AttentionParams)> {
    if examples.is_empty() {
        return Err(Error::Config("no examples".into()));
    }
    let m = examples.len() as f64;
    let d = params.dim;
    let scale = (d as f64).sqrt();
    let mut grad = params.zeros_like();
    let mut total = 0.0;

    for ex in examples {
        check_example(ex)?;
        let n = ex.x.nrows();
        let cache = forward(ex.x.view(), params, Some(&ex.bias))?;
        let z = readout_logit(params, &cache.output, ex.centers);
        total += bce_with_logit(z, ex.label);
        let dz = (sigmoid(z) - ex.label) / m;

        let (a, b) = ex.centers;
        grad.intercept += dz;
        let mut d_out = Array2::<f64>::zeros((n, d));
        for c in 0..d {
            grad.readout[c] += dz * cache.output[[a, c]];
            grad.readout[d + c] += dz * cache.output[[b, c]];
            d_out[[a, c]] += dz * params.readout[c];
            d_out[[b, c]] += dz * params.readout[d + c];
        }

        let d_weights = d_out.dot(&cache.v.t());
        let d_v = cache.weights.t().dot(&d_out);

        // softmax backward, row by row
        let mut d_logits = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            let dot: f64 = (0..n)
                .map(|j| cache.weights[[i, j]] * d_weights[[i, j]])
                .sum();
            for j in 0..n {
                d_logits[[i, j]] = cache.weights[[i, j]] * (d_weights[[i, j]] - dot);
            }
        }

        if params.mode == BiasMode::Weighted {
            for i in 0..n {
                for j in 0..n {
                    let f = ex.bias.features(i, j).to_array();
                    for (g, ft) in grad.bias_coeffs.iter_mut().zip(f) {
                        *g += d_logits[[i, j]] * ft;
                    }
                }
            }
        }

        let d_q = d_logits.dot(&cache.k) / scale;
        let d_k = d_logits.t().dot(&cache.q) / scale;
        let xt = ex.x.t();
        grad.w_query += &xt.dot(&d_q);
        grad.w_key += &xt.dot(&d_k);
        grad.w_value += &xt.dot(&d_v);
    }

    let l = total / m;
    if !l.is_finite() {
        return Err(Error::Numeric(format!("loss is {l}")));
    }
    Ok((l, grad))
}

/// Central finite-difference gradient of [`loss`].
pub fn numeric_gradient(
    params: &AttentionParams,
    examples: &[LinkExample],
    epsilon: f64,
) -> Result<AttentionParams> {
    let base = params.to_vec();
    let mut probe = params.clone();
    let mut out = Vec::with_capacity(base.len());
    for idx in 0..base.len() {
        let mut v = base.clone();
        v[idx] = base[idx] + epsilon;
        probe.set_from_vec(&v);
        let up = loss(&probe, examples)?;
        v[idx] = base[idx] - epsilon;
        probe.set_from_vec(&v);
        let down = loss(&probe, examples)?;
        out.push((up - down) / (2.0 * epsilon));
    }
    let mut grad = params.zeros_like();
    grad.set_from_vec(&out);
    Ok(grad)
}

/// Max over trainable entries of `|a − b| / max(1e-8, |a| + |b|)`.
pub fn max_relative_error(a: &AttentionParams, b: &AttentionParams) -> f64 {
    a.to_vec()
        .iter()
        .zip(b.to_vec())
        .map(|(x, y)| (x - y).abs() / (x.abs() + y.abs()).max(1e-8))
        .fold(0.0, f64::max)
}

/// Compares [`analytic_gradient`] against [`numeric_gradient`] and returns
/// the max relative error.
pub fn gradient_check(
    params: &AttentionParams,
    examples: &[LinkExample],
    epsilon: f64,
) -> Result<f64> {
    if !(1e-7..=1e-3).contains(&epsilon) {
        return Err(Error::Config(format!(
            "epsilon must be in [1e-7, 1e-3], got {epsilon}"
        )));
    }
    let (_, analytic) = analytic_gradient(params, examples)?;
    let numeric = numeric_gradient(params, examples, epsilon)?;
    Ok(max_relative_error(&analytic, &numeric))
}

/// Full-batch gradient descent; returns the loss before each step.
pub fn train(
    params: &mut AttentionParams,
    examples: &[LinkExample],
    epochs: usize,
    learning_rate: f64,
) -> Result<Vec<f64>> {
    let mut history = Vec::with_capacity(epochs);
    for _ in 0..epochs {
        let (l, grad) = analytic_gradient(params, examples)?;
        history.push(l);
        let step: Vec<f64> = params
            .to_vec()
            .iter()
            .zip(grad.to_vec())
            .map(|(p, g)| p - learning_rate * g)
            .collect();
        params.set_from_vec(&step);
    }
    Ok(history)
}

/// Node inputs: the graph's own feature rows, or one-hot degree buckets
/// (degrees ≥ 15 share the last bucket).
pub fn node_inputs(g: &Graph) -> Array2<f64> {
    if let Some(x) = g.node_features() {
        return x.clone();
    }
    let mut x = Array2::zeros((g.num_nodes(), DEGREE_BUCKETS));
    for v in 0..g.num_nodes() {
        let bucket = g.adj(v).len().min(DEGREE_BUCKETS - 1);
        x[[v, bucket]] = 1.0;
    }
    x
}

/// Where pair biases for a scored subgraph are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasSource {
    /// On the enclosing subgraph itself.
    Subgraph,
    /// On the whole graph with the scored edge removed.
    FullGraph,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub circle: CircleConfig,
    pub d_max: usize,
    pub hops: usize,
    pub bias_source: BiasSource,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig {
            circle: CircleConfig::default(),
            d_max: DEFAULT_D_MAX,
            hops: 1,
            bias_source: BiasSource::Subgraph,
        }
    }
}

/// Builds the attention input for scoring `p`: enclosing subgraph, node
/// inputs and bias matrix. The label is set to `label`.
pub fn prepare_example(
    g: &Graph,
    p: NodePair,
    cfg: &LinkConfig,
    label: f64,
) -> Result<LinkExample> {
    let sub = extract_enclosing_subgraph(g, p, cfg.hops)?;
    let n = sub.graph.num_nodes();
    let bias = match cfg.bias_source {
        BiasSource::Subgraph => {
            let local: Vec<usize> = (0..n).collect();
            build_bias_matrix(&sub.graph, &local, &cfg.circle, cfg.d_max)?
        }
        BiasSource::FullGraph => {
            let reduced = g.without_edge(p.src, p.dst);
            build_bias_matrix(&reduced, &sub.mapping, &cfg.circle, cfg.d_max)?
        }
    };
    Ok(LinkExample {
        x: node_inputs(&sub.graph),
        bias,
        centers: sub.centers,
        label,
    })
}

/// Probability that `p` is a link, from the attention outputs of its two
/// centered nodes.
pub fn score_link(
    g: &Graph,
    p: NodePair,
    params: &AttentionParams,
    cfg: &LinkConfig,
) -> Result<f64> {
    let ex = prepare_example(g, p, cfg, 0.0)?;
    score_example(params, &ex)
}

/// Input width expected by [`node_inputs`] for `g`.
pub fn input_dim_for(g: &Graph) -> usize {
    g.node_features()
        .map(|x| x.ncols())
        .unwrap_or(DEGREE_BUCKETS)
}

/// Slice of the output rows for the centered pair, concatenated.
pub fn center_embedding(out: &AttentionOutput, centers: (usize, usize)) -> Array1<f64> {
    let d = out.output.ncols();
    let mut h = Array1::zeros(2 * d);
    h.slice_mut(s![..d]).assign(&out.output.row(centers.0));
    h.slice_mut(s![d..]).assign(&out.output.row(centers.1));
    h
}

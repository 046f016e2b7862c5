//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage or configuration errors, 1 for
//! runtime failures (I/O, parse errors, enumeration caps).

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::attention::{
    attention_forward, input_dim_for, prepare_example, score_example, AttentionParams, BiasMode,
    BiasSource, LinkConfig, PairFeatures,
};
use crate::circle::CircleConfig;
use crate::error::{Error, Result};
use crate::eval::{run_toy_experiment, ExperimentConfig, GraphSpec, ModelMode};
use crate::graph::{
    format_edge_list, generate_synthetic, load_edge_list_with, parse_pairs, Graph, NodePair,
    SyntheticKind,
};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "CIRCLE_FEAT_THREADS";

pub const FEATURES_HEADER: &str = "src,dst,dist,nsp,aa,jac,swing_plus,bridge";

#[derive(Debug, Parser)]
#[command(
    name = "circle-feat",
    version,
    about = "Circle features and structural attention bias for link prediction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic graph as an edge list.
    Gen(GenArgs),
    /// Compute the six pair features for a list of node pairs.
    Features(FeaturesArgs),
    /// Run one biased attention pass over a pair's enclosing subgraph.
    Attend(AttendArgs),
    /// Run a link-prediction experiment and report MRR.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Path,
    Cycle,
    Complete,
    Theta,
    Er,
    Sbm2,
}

#[derive(Debug, Args)]
struct SyntheticArgs {
    /// Number of nodes (path, cycle, complete, er, sbm2).
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Number of disjoint paths (theta).
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Length of each path in edges (theta).
    #[arg(long, default_value_t = 2)]
    len: usize,
    /// Edge probability (er).
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    /// Within-block edge probability (sbm2).
    #[arg(long, default_value_t = 0.15)]
    p_in: f64,
    /// Across-block edge probability (sbm2).
    #[arg(long, default_value_t = 0.01)]
    p_out: f64,
}

impl SyntheticArgs {
    fn kind(&self, kind: KindArg) -> SyntheticKind {
        match kind {
            KindArg::Path => SyntheticKind::Path { n: self.n },
            KindArg::Cycle => SyntheticKind::Cycle { n: self.n },
            KindArg::Complete => SyntheticKind::Complete { n: self.n },
            KindArg::Theta => SyntheticKind::Theta {
                k: self.k,
                len: self.len,
            },
            KindArg::Er => SyntheticKind::Er {
                n: self.n,
                p: self.p,
            },
            KindArg::Sbm2 => SyntheticKind::Sbm2 {
                n: self.n,
                p_in: self.p_in,
                p_out: self.p_out,
            },
        }
    }
}

#[derive(Debug, Args)]
struct FeatureArgs {
    /// Swing-plus damping constant.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Leave u = v terms out of the swing-plus double sum.
    #[arg(long)]
    exclude_self_pairs: bool,
    /// Longest circle considered, in edges.
    #[arg(long, default_value_t = 6)]
    max_circle_len: usize,
    /// Cap on enumerated bridges per pair.
    #[arg(long, default_value_t = 100_000)]
    max_bridges: usize,
    /// Distance clip; unreachable pairs map to d_max + 1.
    #[arg(long, default_value_t = 10)]
    d_max: usize,
}

impl FeatureArgs {
    fn circle(&self) -> CircleConfig {
        CircleConfig {
            alpha: self.alpha,
            include_self_pairs: !self.exclude_self_pairs,
            max_circle_len: self.max_circle_len,
            max_bridges: self.max_bridges,
        }
    }

    fn validate(&self) -> Result<()> {
        self.circle().validate()?;
        if self.d_max == 0 {
            return Err(Error::Config("d_max must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BiasSourceArg {
    Subgraph,
    FullGraph,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BiasModeArg {
    Raw,
    Weighted,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    FeaturesLogistic,
    Attention,
    Constant,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Neighborhood radius of enclosing subgraphs.
    #[arg(long, default_value_t = 1)]
    hops: usize,
    /// Graph on which pair biases are computed.
    #[arg(long, value_enum, default_value_t = BiasSourceArg::Subgraph)]
    bias_source: BiasSourceArg,
    /// Fixed unit bias coefficients or trainable ones.
    #[arg(long, value_enum, default_value_t = BiasModeArg::Raw)]
    bias_mode: BiasModeArg,
    /// Attention dimension d.
    #[arg(long, default_value_t = 8)]
    dim: usize,
}

impl ModelArgs {
    fn link(&self, features: &FeatureArgs) -> LinkConfig {
        LinkConfig {
            circle: features.circle(),
            d_max: features.d_max,
            hops: self.hops,
            bias_source: match self.bias_source {
                BiasSourceArg::Subgraph => BiasSource::Subgraph,
                BiasSourceArg::FullGraph => BiasSource::FullGraph,
            },
        }
    }

    fn bias_mode(&self) -> BiasMode {
        match self.bias_mode {
            BiasModeArg::Raw => BiasMode::Raw,
            BiasModeArg::Weighted => BiasMode::Weighted,
        }
    }
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[command(flatten)]
    synthetic: SyntheticArgs,
    /// Random seed (er, sbm2).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path, or "-" for standard output.
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct FeaturesArgs {
    /// Edge-list file.
    #[arg(long)]
    graph: PathBuf,
    /// Node count override for graphs with trailing isolated nodes.
    #[arg(long)]
    num_nodes: Option<usize>,
    /// Pair file in edge-list format; every unordered pair when omitted.
    #[arg(long)]
    pairs: Option<PathBuf>,
    #[command(flatten)]
    features: FeatureArgs,
    /// Output path, or "-" for standard output.
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct AttendArgs {
    /// Edge-list file.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    num_nodes: Option<usize>,
    #[arg(long)]
    src: usize,
    #[arg(long)]
    dst: usize,
    #[command(flatten)]
    features: FeatureArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Seed for the random parameter initialization.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path, or "-" for standard output.
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Edge-list file; a synthetic graph from --kind is used when omitted.
    #[arg(long, conflicts_with = "kind")]
    graph: Option<PathBuf>,
    #[arg(long)]
    num_nodes: Option<usize>,
    /// Synthetic graph family.
    #[arg(long, value_enum, default_value_t = KindArg::Sbm2)]
    kind: KindArg,
    #[command(flatten)]
    synthetic: SyntheticArgs,
    /// Seed of the synthetic graph.
    #[arg(long, default_value_t = 11)]
    graph_seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::FeaturesLogistic)]
    mode: ModeArg,
    /// Negatives per held-out positive.
    #[arg(long, default_value_t = 100)]
    k_negatives: usize,
    /// Fraction of edges held out for evaluation.
    #[arg(long, default_value_t = 0.1)]
    holdout: f64,
    /// Experiment seed (splits, sampling, initialization).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 0.05)]
    learning_rate: f64,
    /// Training positives (and as many negatives).
    #[arg(long, default_value_t = 200)]
    train_pairs: usize,
    #[command(flatten)]
    features: FeatureArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Output path, or "-" for standard output.
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

/// Renders features as comma-separated text with a fixed header and six
/// decimal places.
pub fn format_features(pairs: &[NodePair], rows: &[PairFeatures]) -> Result<String> {
    if pairs.len() != rows.len() {
        return Err(Error::Shape(format!(
            "{} pairs but {} feature rows",
            pairs.len(),
            rows.len()
        )));
    }
    let mut s = String::new();
    s.push_str(FEATURES_HEADER);
    s.push('\n');
    for (p, f) in pairs.iter().zip(rows) {
        writeln!(
            s,
            "{},{},{},{},{:.6},{:.6},{:.6},{:.6}",
            p.src, p.dst, f.dist_bias as u64, f.num_bias as u64, f.aa, f.jac, f.swing, f.bridge
        )
        .unwrap();
    }
    Ok(s)
}

pub fn write_features(pairs: &[NodePair], rows: &[PairFeatures], path: &Path) -> Result<()> {
    let text = format_features(pairs, rows)?;
    write_output(path, &text)
}

fn write_output(path: &Path, text: &str) -> Result<()> {
    if path == Path::new("-") {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| Error::io("<stdout>", e))
    } else {
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

fn load_graph(path: &Path, num_nodes: Option<usize>) -> Result<Graph> {
    load_edge_list_with(path, num_nodes)
}

fn run_gen(args: &GenArgs) -> Result<()> {
    let g = generate_synthetic(&args.synthetic.kind(args.kind), args.seed)?;
    write_output(&args.out, &format_edge_list(&g))
}

fn run_features(args: &FeaturesArgs) -> Result<()> {
    args.features.validate()?;
    let g = load_graph(&args.graph, args.num_nodes)?;
    let pairs: Vec<NodePair> = match &args.pairs {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_pairs(path, &text)?
                .into_iter()
                .map(|(u, v)| NodePair::new(&g, u, v))
                .collect::<Result<_>>()?
        }
        None => (0..g.num_nodes())
            .flat_map(|u| (u + 1..g.num_nodes()).map(move |v| NodePair { src: u, dst: v }))
            .collect(),
    };
    let cfg = args.features.circle();
    let rows = pairs
        .par_iter()
        .map(|&p| crate::attention::pair_bias(&g, p, &cfg, args.features.d_max))
        .collect::<Result<Vec<_>>>()?;
    write_features(&pairs, &rows, &args.out)
}

fn run_attend(args: &AttendArgs) -> Result<()> {
    args.features.validate()?;
    if args.model.dim == 0 || args.model.hops == 0 {
        return Err(Error::Config("dim and hops must be at least 1".into()));
    }
    let g = load_graph(&args.graph, args.num_nodes)?;
    let p = NodePair::new(&g, args.src, args.dst)?;
    let link = args.model.link(&args.features);
    let ex = prepare_example(&g, p, &link, 0.0)?;
    let params = AttentionParams::random(
        input_dim_for(&g),
        args.model.dim,
        args.model.bias_mode(),
        args.seed,
    );
    let out = attention_forward(&ex.x, &params, &ex.bias)?;
    let score = score_example(&params, &ex)?;
    let sub = crate::eval::extract_enclosing_subgraph(&g, p, link.hops)?;

    let mut s = String::new();
    writeln!(s, "src = {}", p.src).unwrap();
    writeln!(s, "dst = {}", p.dst).unwrap();
    writeln!(s, "score = {score:.6}").unwrap();
    let ids: Vec<String> = sub.mapping.iter().map(|v| v.to_string()).collect();
    writeln!(s, "nodes = {}", ids.join(",")).unwrap();
    let matrix = |s: &mut String, title: &str, m: &ndarray::Array2<f64>| {
        writeln!(s, "\n[{title}]").unwrap();
        for row in m.rows() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
            writeln!(s, "{}", cells.join(",")).unwrap();
        }
    };
    matrix(&mut s, "bias", &ex.bias.combined(&params.bias_coeffs));
    matrix(&mut s, "weights", &out.weights);
    matrix(&mut s, "output", &out.output);
    write_output(&args.out, &s)
}

fn run_eval(args: &EvalArgs) -> Result<()> {
    args.features.validate()?;
    let graph = match &args.graph {
        Some(path) => GraphSpec::File {
            path: path.clone(),
            num_nodes: args.num_nodes,
        },
        None => GraphSpec::Synthetic {
            kind: args.synthetic.kind(args.kind),
            seed: args.graph_seed,
        },
    };
    let config = ExperimentConfig {
        graph,
        holdout_fraction: args.holdout,
        k_negatives: args.k_negatives,
        mode: match args.mode {
            ModeArg::FeaturesLogistic => ModelMode::FeaturesLogistic,
            ModeArg::Attention => ModelMode::Attention,
            ModeArg::Constant => ModelMode::Constant,
        },
        seed: args.seed,
        link: args.model.link(&args.features),
        epochs: args.epochs,
        learning_rate: args.learning_rate,
        attention_dim: args.model.dim,
        bias_mode: args.model.bias_mode(),
        train_pairs: args.train_pairs,
    };
    let report = run_toy_experiment(&config)?;
    write_output(&args.out, &report.to_text())
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            Error::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {raw:?}"
            ))
        })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let rendered = e.to_string();
            let line = rendered.lines().next().unwrap_or("usage error");
            eprintln!("circle-feat: {}", line.trim_start_matches("error: "));
            return 2;
        }
    };

    let result = thread_pool().and_then(|pool| {
        pool.install(|| match &cli.command {
            Command::Gen(a) => run_gen(a),
            Command::Features(a) => run_features(a),
            Command::Attend(a) => run_attend(a),
            Command::Eval(a) => run_eval(a),
        })
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("circle-feat: {e}");
            if e.is_config() {
                2
            } else {
                1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attention::pair_bias;
    use crate::graph::build_graph;

    #[test]
    fn features_row_format() {
        let g = generate_synthetic(&SyntheticKind::Cycle { n: 4 }, 0).unwrap();
        let p = NodePair::new(&g, 0, 2).unwrap();
        let f = pair_bias(&g, p, &CircleConfig::default(), 10).unwrap();
        let text = format_features(&[p], &[f]).unwrap();
        assert_eq!(
            text,
            "src,dst,dist,nsp,aa,jac,swing_plus,bridge\n0,2,2,2,2.885390,1.000000,1.333333,0.862811\n"
        );
    }

    #[test]
    fn features_empty_and_mismatch() {
        assert_eq!(
            format_features(&[], &[]).unwrap(),
            format!("{FEATURES_HEADER}\n")
        );
        let p = NodePair { src: 0, dst: 1 };
        assert!(format_features(&[p], &[]).is_err());
    }

    #[test]
    fn features_disconnected_sentinel() {
        let g = build_graph(&[(0, 1), (2, 3)], 4).unwrap();
        let p = NodePair::new(&g, 0, 3).unwrap();
        let f = pair_bias(&g, p, &CircleConfig::default(), 10).unwrap();
        let text = format_features(&[p], &[f]).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("0,3,11,0,"));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_cli(["circle-feat", "bogus"]), 2);
        assert_eq!(
            run_cli(["circle-feat", "gen", "--kind", "theta", "--k", "x"]),
            2
        );
        // parses, but theta needs k >= 2
        assert_eq!(
            run_cli(["circle-feat", "gen", "--kind", "theta", "--k", "1"]),
            2
        );
    }

    #[test]
    fn help_lists_defaults() {
        use clap::CommandFactory;
        let mut cmd = Cli::command();
        let help = cmd
            .find_subcommand_mut("features")
            .unwrap()
            .render_long_help()
            .to_string();
        for flag in [
            "--alpha",
            "--max-circle-len",
            "--d-max",
            "--max-bridges",
            "--out",
        ] {
            assert!(help.contains(flag), "missing {flag}");
        }
        assert!(help.contains("[default: 1]"));
        assert!(help.contains("[default: 6]"));
        assert!(help.contains("[default: 10]"));
        assert!(help.contains("[default: 100000]"));
        let eval = cmd
            .find_subcommand_mut("eval")
            .unwrap()
            .render_long_help()
            .to_string();
        assert!(eval.contains("[default: 100]"));
        assert!(eval.contains("[default: 0.1]"));
    }
}

//! Circle features and structural attention biases for link prediction.
//!
//! The crate computes six per-pair structural scalars on an undirected
//! simple graph:
//!
//! - shortest-path distance and shortest-path count,
//! - Adamic-Adar and Jaccard common-neighbor indices,
//! - the *swing-plus* score (adjacency plus a double sum over common
//!   neighbors damped by their shared neighborhood size),
//! - the *bridge* score (adjacency plus a squashed count of src–dst paths
//!   that participate in a short cycle through both endpoints).
//!
//! These are injected as additive logit biases into a single-head
//! self-attention layer ([`attention`]) and evaluated as a link scorer with
//! mean reciprocal rank ([`eval`]).
//!
//! ```
//! use circle_feat::{circle, generate_synthetic, CircleConfig, NodePair, SyntheticKind};
//!
//! let g = generate_synthetic(&SyntheticKind::Theta { k: 3, len: 2 }, 0).unwrap();
//! let cfg = CircleConfig::default();
//! let pair = NodePair::new(&g, 0, 1).unwrap();
//! assert_eq!(circle::bridge_count(&g, pair, &cfg).unwrap(), 3);
//! ```

pub mod attention;
pub mod circle;
pub mod cli;
pub mod error;
pub mod eval;
pub mod graph;
pub mod structural;

pub use attention::{AttentionParams, BiasMatrix, BiasMode, LinkConfig, PairFeatures};
pub use circle::{Bridge, CircleConfig};
pub use error::{Error, Result};
pub use eval::{EvalReport, ExperimentConfig, GraphSpec, ModelMode};
pub use graph::{
    build_graph, generate_synthetic, load_edge_list, load_edge_list_with, write_edge_list, Graph,
    NodePair, SyntheticKind,
};
pub use structural::{PathInfo, DEFAULT_PATH_COUNT_CAP};

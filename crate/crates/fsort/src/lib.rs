//! Sorting under the 1-∞ comparison-cost model.
//!
//! The input is a comparison graph whose edges are the vertex pairs that may
//! be compared at unit cost; the `q` missing pairs are forbidden. A probe
//! oracle answers allowed comparisons against a hidden total order while
//! counting distinct pairs asked. The sorting algorithms recover the maximal
//! partial order induced by the graph, i.e. the transitive closure of
//! orienting every allowed edge, while keeping the probe count near the
//! analytic bounds:
//!
//! - [`detsort::sort_deterministic`]: clique-cover pivots and U/L/B
//!   partitioning, O((q + n) log n) probes.
//! - [`detsort::peel_sort`]: peel-and-reinsert, effective when q is tiny.
//! - [`randsort::sort_randomized`]: two probing rounds over a random spanning
//!   subgraph, Õ(n²/√(q+n) + n√q) probes with high probability.
//! - [`randsort::sort_random_graph`]: the specialization for G(n, p) inputs,
//!   Õ(min(n^{3/2}, pn²)) probes.
//!
//! Every algorithm is Las Vegas: outputs always equal
//! [`reference::ground_truth`], which the [`mod@reference`] module verifies.

pub mod bits;
pub mod cli;
pub mod cliques;
pub mod detsort;
pub mod graph;
pub mod oracle;
pub mod poset;
pub mod randsort;
pub mod reference;

use thiserror::Error;

/// Failure of a sorting run. Oracle and poset errors can only arise from
/// algorithm bugs or inconsistent inputs; a clean run never produces them.
#[derive(Debug, Error)]
pub enum SortError {
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
    #[error(transparent)]
    Poset(#[from] poset::PosetError),
    #[error("graph on n={n} vertices with q={q} has no allowed pairs")]
    NoAllowedPairs { n: usize, q: usize },
    #[error("edge probability {0} outside (0, 1]")]
    InvalidEdgeProbability(f64),
    #[error("subset size l={l} exceeds vertex count n={n}")]
    SubsetTooLarge { l: usize, n: usize },
}

pub use graph::ComparisonGraph;
pub use oracle::{HiddenOrder, ProbeAnswer, ProbeOracle};
pub use poset::PartialOrder;
pub use reference::{ground_truth, verify_run, Algorithm, RunReport};

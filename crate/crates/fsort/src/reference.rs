//! Ground truth and verification: the brute-force relation every algorithm
//! is checked against, single-run verification, and exhaustive small-graph
//! sweeps.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::detsort::{peel_sort, sort_deterministic};
use crate::graph::{pairs_of, ComparisonGraph};
use crate::oracle::{HiddenOrder, ProbeOracle};
use crate::poset::PartialOrder;
use crate::randsort::{sort_random_graph, sort_randomized};
use crate::SortError;

/// The unique maximal recoverable relation: orient every allowed pair by the
/// hidden order and close. Needs no oracle.
pub fn ground_truth(g: &ComparisonGraph, order: &HiddenOrder) -> PartialOrder {
    let mut po = PartialOrder::new(g.n());
    for (u, v) in g.allowed_pairs() {
        let (lo, hi) = if order.rank(u) < order.rank(v) {
            (u, v)
        } else {
            (v, u)
        };
        po.orient(lo, hi).expect("orientations from one order are consistent");
    }
    po.close().expect("orientations from one order are acyclic");
    po
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Det,
    Peel,
    Rand,
    #[serde(rename = "randgraph")]
    RandGraph,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Det,
        Algorithm::Peel,
        Algorithm::Rand,
        Algorithm::RandGraph,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Det => "det",
            Algorithm::Peel => "peel",
            Algorithm::Rand => "rand",
            Algorithm::RandGraph => "randgraph",
        }
    }

    /// Analytic probe-bound comparand at `(n, q)`, with no hidden constants
    /// so measured ratios expose them. `p` only matters for `randgraph`.
    pub fn bound_value(self, n: usize, q: usize, p: f64) -> f64 {
        let nf = n as f64;
        let qf = q as f64;
        let log2n = nf.max(2.0).log2();
        match self {
            Algorithm::Det => (qf + nf) * log2n,
            Algorithm::Peel => nf * log2n + qf.max(1.0) * nf,
            Algorithm::Rand => nf * nf / (qf + nf).sqrt() + nf * qf.max(1.0).sqrt(),
            Algorithm::RandGraph => (nf.powf(1.5) * nf.ln().powi(2)).min(p * nf * nf / 2.0),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "det" => Ok(Algorithm::Det),
            "peel" => Ok(Algorithm::Peel),
            "rand" => Ok(Algorithm::Rand),
            "randgraph" => Ok(Algorithm::RandGraph),
            other => Err(format!(
                "unknown algorithm {other:?} (expected det, peel, rand or randgraph)"
            )),
        }
    }
}

/// One verified run: probe count against the matching analytic bound, plus
/// the correctness verdict.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub algo: Algorithm,
    pub n: usize,
    pub q: usize,
    pub seed: u64,
    pub probes: usize,
    pub bound: f64,
    pub ratio: f64,
    pub correct: bool,
    pub ms: f64,
}

/// Run `algo` against a fresh oracle and compare with [`ground_truth`]. Any
/// forbidden-pair probe surfaces as an error, so an `Ok` report certifies a
/// forbidden-probe-free run. For `randgraph` the known edge probability is
/// estimated from the instance's edge density.
pub fn verify_run(
    g: &ComparisonGraph,
    order: &HiddenOrder,
    algo: Algorithm,
    seed: u64,
) -> Result<RunReport, SortError> {
    let p_in = edge_density(g);
    verify_run_with_p(g, order, algo, seed, p_in)
}

pub fn edge_density(g: &ComparisonGraph) -> f64 {
    let total = pairs_of(g.n());
    if total == 0 || g.edge_count() == 0 {
        1.0
    } else {
        g.edge_count() as f64 / total as f64
    }
}

pub fn verify_run_with_p(
    g: &ComparisonGraph,
    order: &HiddenOrder,
    algo: Algorithm,
    seed: u64,
    p_in: f64,
) -> Result<RunReport, SortError> {
    let truth = ground_truth(g, order);
    let mut oracle = ProbeOracle::new(g, order.clone());
    let start = Instant::now();
    let result = match algo {
        Algorithm::Det => sort_deterministic(g, &mut oracle)?,
        Algorithm::Peel => peel_sort(g, &mut oracle)?,
        Algorithm::Rand => sort_randomized(g, &mut oracle, seed)?,
        Algorithm::RandGraph => sort_random_graph(g, &mut oracle, p_in, seed)?,
    };
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let probes = oracle.probe_count();
    let bound = algo.bound_value(g.n(), g.q(), p_in);
    Ok(RunReport {
        algo,
        n: g.n(),
        q: g.q(),
        seed,
        probes,
        bound,
        ratio: probes as f64 / bound.max(f64::MIN_POSITIVE),
        correct: result.equals(&truth),
        ms,
    })
}

/// Outcome of [`exhaustive_check`], JSON-printable.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExhaustiveSummary {
    pub instances: usize,
    pub failures: Vec<String>,
}

impl ExhaustiveSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub const EXHAUSTIVE_SEEDS: [u64; 3] = [1, 2, 3];

/// Every labeled graph on up to `n_max` vertices, under every hidden order,
/// sorted by every algorithm (randomized ones with three fixed seeds each)
/// and compared against ground truth. Refuses `n_max > 5`; beyond that the
/// enumeration stops being a desk-scale check.
pub fn exhaustive_check(n_max: usize) -> Result<ExhaustiveSummary, String> {
    if n_max > 5 {
        return Err(format!(
            "exhaustive_check is limited to n_max <= 5, got {n_max}; use a sampled sweep instead"
        ));
    }
    let mut instances = 0usize;
    let mut failures = Vec::new();

    for n in 1..=n_max {
        let all_pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        let m = all_pairs.len();
        for mask in 0u32..(1u32 << m) {
            let forbidden: Vec<(usize, usize)> = all_pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p)
                .collect();
            let g = ComparisonGraph::from_forbidden_list(n, &forbidden)
                .expect("enumerated pairs are valid");
            for perm in (0..n).permutations(n) {
                let order = HiddenOrder::from_ranks(perm).expect("permutation");
                instances += 1;
                for algo in Algorithm::ALL {
                    let seeds: &[u64] = match algo {
                        Algorithm::Det | Algorithm::Peel => &[0],
                        _ => &EXHAUSTIVE_SEEDS,
                    };
                    for &seed in seeds {
                        match verify_run(&g, &order, algo, seed) {
                            Ok(report) if report.correct => {}
                            Ok(_) => failures.push(format!(
                                "{algo} wrong on n={n} mask={mask} order={order:?} seed={seed}"
                            )),
                            Err(e) => failures.push(format!(
                                "{algo} errored on n={n} mask={mask} seed={seed}: {e}"
                            )),
                        }
                        if failures.len() >= 20 {
                            return Ok(ExhaustiveSummary {
                                instances,
                                failures,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(ExhaustiveSummary {
        instances,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_truth_of_complete_graph_is_a_chain() {
        let g = ComparisonGraph::from_forbidden_list(5, &[]).unwrap();
        let order = HiddenOrder::random(5, 3);
        let po = ground_truth(&g, &order);
        assert_eq!(po.incomparable_count(), 0);
    }

    #[test]
    fn ground_truth_of_empty_graph_is_empty() {
        let g = ComparisonGraph::gen_random_forbidden(4, 6, 0).unwrap();
        let po = ground_truth(&g, &HiddenOrder::identity(4));
        assert_eq!(po.incomparable_count(), 6);
    }

    #[test]
    fn ground_truth_of_path_closes_the_chain() {
        // Path 0-1-2 under the identity order: 0<1, 1<2 and the closure 0<2.
        let g = ComparisonGraph::from_forbidden_list(3, &[(0, 2)]).unwrap();
        let po = ground_truth(&g, &HiddenOrder::identity(3));
        assert!(po.lt(0, 1) && po.lt(1, 2) && po.lt(0, 2));
        assert_eq!(po.incomparable_count(), 0);
    }

    #[test]
    fn ground_truth_is_stable() {
        let g = ComparisonGraph::gen_random_forbidden(30, 120, 5).unwrap();
        let order = HiddenOrder::random(30, 6);
        let po = ground_truth(&g, &order);

        // Idempotent under re-closure.
        let mut again = po.clone();
        again.close().unwrap();
        assert!(po.equals(&again));

        // Independent of edge iteration order: orient the reversed list.
        let mut reversed = PartialOrder::new(g.n());
        let mut pairs: Vec<_> = g.allowed_pairs().collect();
        pairs.reverse();
        for (u, v) in pairs {
            if order.rank(u) < order.rank(v) {
                reversed.orient(u, v).unwrap();
            } else {
                reversed.orient(v, u).unwrap();
            }
        }
        reversed.close().unwrap();
        assert!(po.equals(&reversed));
    }

    #[test]
    fn every_algorithm_verifies_on_a_mid_size_instance() {
        let g = ComparisonGraph::gen_random_forbidden(64, 128, 21).unwrap();
        let order = HiddenOrder::random(64, 22);
        for algo in Algorithm::ALL {
            let report = verify_run(&g, &order, algo, 23).unwrap();
            assert!(report.correct, "{algo} failed");
        }
    }

    #[test]
    fn bound_formulas() {
        let b = Algorithm::Det.bound_value(1024, 4096, 1.0);
        assert!((b - 5120.0 * 10.0).abs() < 1e-9);
        let b = Algorithm::RandGraph.bound_value(512, 0, 0.01);
        let n = 512f64;
        assert!((b - (n.powf(1.5) * n.ln().powi(2)).min(0.01 * n * n / 2.0)).abs() < 1e-9);
        let b = Algorithm::Rand.bound_value(100, 0, 1.0);
        assert!((b - (10_000.0 / 10.0 + 100.0)).abs() < 1e-9);
    }

    #[test]
    fn verify_run_reports_correct() {
        let g = ComparisonGraph::from_forbidden_list(4, &[]).unwrap();
        let order = HiddenOrder::random(4, 8);
        let report = verify_run(&g, &order, Algorithm::Det, 0).unwrap();
        assert!(report.correct);
        assert!(report.probes <= 6);
        assert_eq!(report.n, 4);

        let empty = ComparisonGraph::gen_random_forbidden(4, 6, 0).unwrap();
        let report = verify_run(&empty, &order, Algorithm::Rand, 5).unwrap();
        assert!(report.correct);
        assert_eq!(report.probes, 0);
    }

    #[test]
    fn algorithm_ids_parse() {
        assert_eq!("det".parse::<Algorithm>().unwrap(), Algorithm::Det);
        assert_eq!(
            "randgraph".parse::<Algorithm>().unwrap(),
            Algorithm::RandGraph
        );
        assert!("quick".parse::<Algorithm>().is_err());
    }

    #[test]
    fn exhaustive_small() {
        let summary = exhaustive_check(3).unwrap();
        // 1 + 2*2 + 8*6 graph/order combinations.
        assert_eq!(summary.instances, 1 + 4 + 48);
        assert!(summary.passed(), "failures: {:?}", summary.failures);
    }

    #[test]
    fn exhaustive_refuses_large_n() {
        assert!(exhaustive_check(6).is_err());
    }
}

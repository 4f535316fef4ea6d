//! Randomized sorting in two rounds: probe a random spanning subgraph of the
//! allowed edges, close transitively, then probe whatever is still
//! incomparable. Output is always the ground truth; only the probe count is
//! random.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitSet;
use crate::graph::{pairs_of, ComparisonGraph};
use crate::oracle::{ProbeAnswer, ProbeOracle};
use crate::poset::PartialOrder;
use crate::SortError;

/// Sampling parameters for the first round.
#[derive(Clone, Copy, Debug)]
pub struct RandParams {
    /// Subset-size parameter behind the sampling guarantee.
    pub l: usize,
    /// Round-one retention probability for each allowed edge.
    pub p: f64,
    /// Value of `2 l ln(e n / l) - p (C(l,2) - q)`; at most `-ln n`
    /// whenever `p < 1`.
    pub exponent: f64,
}

/// Integer ceiling of the square root.
fn ceil_sqrt(x: usize) -> usize {
    if x == 0 {
        return 0;
    }
    let mut r = (x as f64).sqrt() as usize;
    while r * r < x {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= x {
        r -= 1;
    }
    r
}

fn subset_exponent(n: usize, q: usize, l: usize, p: f64) -> f64 {
    let nf = n as f64;
    let lf = l as f64;
    let edges_guaranteed = pairs_of(l) as f64 - q as f64;
    2.0 * lf * (std::f64::consts::E * nf / lf).ln() - p * edges_guaranteed
}

/// Choose `(l, p)` for the two-round scheme on an adversarial graph:
/// `l = max(2 ceil(sqrt(q)), ceil(sqrt(n)), 2)` guarantees
/// `C(l,2) - q >= l^2/4 - l`, and `p = min(1, 12 ln n / l)`. If the exponent
/// guard fails with `p < 1`, `p` doubles (capped at 1) until it holds.
pub fn choose_params(n: usize, q: usize) -> Result<RandParams, SortError> {
    assert!(n >= 2, "parameter choice needs at least two vertices");
    if q >= pairs_of(n) {
        return Err(SortError::NoAllowedPairs { n, q });
    }
    let l = (2 * ceil_sqrt(q)).max(ceil_sqrt(n)).max(2);
    debug_assert!(pairs_of(l) + l >= q + l * l / 4);
    let nf = n as f64;
    let mut p = (12.0 * nf.ln() / l as f64).min(1.0);
    let mut exponent = subset_exponent(n, q, l, p);
    while p < 1.0 && exponent > -nf.ln() {
        p = (2.0 * p).min(1.0);
        exponent = subset_exponent(n, q, l, p);
    }
    Ok(RandParams { l, p, exponent })
}

/// Per-round probe counts from a randomized run.
#[derive(Clone, Copy, Debug, Default)]
pub struct RoundStats {
    pub round1_probes: usize,
    pub round2_probes: usize,
    /// Round-one retention probability actually used.
    pub retention: f64,
}

fn empty_order(n: usize) -> Result<PartialOrder, SortError> {
    let mut po = PartialOrder::new(n);
    po.close()?;
    Ok(po)
}

/// Round one keeps each allowed pair independently with probability
/// `retention` (pairs visited in lexicographic order, one RNG draw each, so
/// runs are reproducible); round two probes every pair the closure left
/// incomparable.
fn two_round(
    g: &ComparisonGraph,
    o: &mut ProbeOracle,
    retention: f64,
    seed: u64,
) -> Result<(PartialOrder, RoundStats), SortError> {
    let mut po = PartialOrder::new(g.n());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let before = o.probe_count();
    for (u, v) in g.allowed_pairs() {
        if rng.random_bool(retention) {
            let ans = o.probe(u, v)?;
            match ans {
                ProbeAnswer::Less => po.orient(u, v)?,
                ProbeAnswer::Greater => po.orient(v, u)?,
            }
        }
    }
    let round1_probes = o.probe_count() - before;
    po.close()?;

    let mid = o.probe_count();
    for (u, v) in g.allowed_pairs() {
        if !po.comparable(u, v) {
            let ans = o.probe(u, v)?;
            match ans {
                ProbeAnswer::Less => po.orient(u, v)?,
                ProbeAnswer::Greater => po.orient(v, u)?,
            }
        }
    }
    let round2_probes = o.probe_count() - mid;
    po.close()?;
    Ok((
        po,
        RoundStats {
            round1_probes,
            round2_probes,
            retention,
        },
    ))
}

/// Two-round randomized sort with parameters from [`choose_params`].
pub fn sort_randomized(
    g: &ComparisonGraph,
    o: &mut ProbeOracle,
    seed: u64,
) -> Result<PartialOrder, SortError> {
    sort_randomized_detailed(g, o, seed).map(|(po, _)| po)
}

pub fn sort_randomized_detailed(
    g: &ComparisonGraph,
    o: &mut ProbeOracle,
    seed: u64,
) -> Result<(PartialOrder, RoundStats), SortError> {
    if g.edge_count() == 0 {
        return Ok((empty_order(g.n())?, RoundStats::default()));
    }
    let params = choose_params(g.n(), g.q())?;
    two_round(g, o, params.p, seed)
}

/// Critical sampling probability for random input graphs, where first-round
/// cost meets the residual probing cost.
pub fn critical_probability(n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    (3.0 * (n as f64).ln() / (n as f64).sqrt()).min(1.0)
}

/// Sort a graph drawn from G(n, p): probe everything when the graph is
/// already sparse (`p_in <= p_hat`), otherwise thin the edges down to an
/// effective G(n, p_hat) spanning subgraph and run the two-round scheme.
pub fn sort_random_graph(
    g: &ComparisonGraph,
    o: &mut ProbeOracle,
    p_in: f64,
    seed: u64,
) -> Result<PartialOrder, SortError> {
    sort_random_graph_detailed(g, o, p_in, seed).map(|(po, _)| po)
}

pub fn sort_random_graph_detailed(
    g: &ComparisonGraph,
    o: &mut ProbeOracle,
    p_in: f64,
    seed: u64,
) -> Result<(PartialOrder, RoundStats), SortError> {
    if !(p_in > 0.0 && p_in <= 1.0) {
        return Err(SortError::InvalidEdgeProbability(p_in));
    }
    let n = g.n();
    if n >= 100 {
        // With l = 3 ln n / p_hat the subset exponent is -3 ln^2(n) / p_hat,
        // well below -ln n.
        debug_assert!(-3.0 * (n as f64).ln().powi(2) / critical_probability(n) <= -(n as f64).ln());
    }
    if g.edge_count() == 0 {
        return Ok((empty_order(n)?, RoundStats::default()));
    }
    let p_hat = critical_probability(n);
    if p_in <= p_hat {
        let mut po = PartialOrder::new(n);
        let before = o.probe_count();
        for (u, v) in g.allowed_pairs() {
            let ans = o.probe(u, v)?;
            match ans {
                ProbeAnswer::Less => po.orient(u, v)?,
                ProbeAnswer::Greater => po.orient(v, u)?,
            }
        }
        po.close()?;
        let stats = RoundStats {
            round1_probes: o.probe_count() - before,
            round2_probes: 0,
            retention: 1.0,
        };
        Ok((po, stats))
    } else {
        two_round(g, o, p_hat / p_in, seed)
    }
}

/// Does every pair of size-`l` vertex subsets (not necessarily distinct,
/// edges within the overlap counting) of `h` have at least one connecting
/// edge? A subset pair with no distinct vertex pair across it (only the
/// singleton `A = B` case) is vacuously connected. Equivalently: no
/// `l`-subset A leaves `l` or more candidate vertices outside its
/// neighborhood. Exhaustive over subsets, so feasible only for small `n`.
pub fn check_q1(h: &ComparisonGraph, l: usize) -> Result<bool, SortError> {
    let n = h.n();
    if l > n {
        return Err(SortError::SubsetTooLarge { l, n });
    }
    if l == 0 {
        return Ok(true);
    }
    let mut subset: Vec<usize> = (0..l).collect();
    loop {
        let mut outside = BitSet::full(n);
        for &a in &subset {
            outside.subtract_words(h.adj_row(a));
        }
        if l == 1 {
            // B = A itself offers no vertex pair to connect.
            outside.remove(subset[0]);
        }
        if outside.len() >= l {
            // Some l-subset B fits entirely outside N(A): the pair (A, B)
            // has no edge between them.
            return Ok(false);
        }
        if !next_combination(&mut subset, n) {
            return Ok(true);
        }
    }
}

/// Advance `subset` to the next l-combination of `0..n` in lexicographic
/// order. Returns false when exhausted.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let l = subset.len();
    let mut i = l;
    while i > 0 {
        i -= 1;
        if subset[i] < n - l + i {
            subset[i] += 1;
            for j in i + 1..l {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

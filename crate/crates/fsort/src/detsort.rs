//! Deterministic sorting: clique-cover pivot selection, U/L/B partition with
//! recursion guarded by `n^2 >= 200q`, deferred B-set merging, plus the
//! peel-and-reinsert procedure for graphs with few forbidden pairs.

use serde::Serialize;

use crate::bits::BitSet;
use crate::cliques::build_clique_cover_in;
use crate::graph::ComparisonGraph;
use crate::oracle::{OracleError, ProbeAnswer, ProbeOracle};
use crate::poset::PartialOrder;
use crate::SortError;

/// Below this node size every allowed pair is probed outright; the cover
/// machinery's constants only pay off above it.
pub const N_MIN: usize = 32;

/// Per-node record of one divide-and-conquer run.
#[derive(Clone, Debug, Serialize)]
pub struct NodeTrace {
    pub depth: usize,
    pub n_p: usize,
    pub q_p: usize,
    /// Chosen pivot; `None` at leaf nodes.
    pub pivot: Option<usize>,
    pub upper: usize,
    pub lower: usize,
    pub b_size: usize,
    /// Probes charged at this node (children excluded).
    pub probes: usize,
}

/// Sort `items` in ascending hidden-order rank using only oracle probes.
/// Bottom-up merge sort; all compared pairs must be allowed.
fn oracle_merge_sort(items: &mut Vec<usize>, o: &mut ProbeOracle) -> Result<(), OracleError> {
    let n = items.len();
    let mut buf = items.clone();
    let mut width = 1;
    while width < n {
        let mut lo = 0;
        while lo < n {
            let mid = (lo + width).min(n);
            let hi = (lo + 2 * width).min(n);
            let (mut i, mut j, mut k) = (lo, mid, lo);
            while i < mid && j < hi {
                if o.probe(items[i], items[j])? == ProbeAnswer::Less {
                    buf[k] = items[i];
                    i += 1;
                } else {
                    buf[k] = items[j];
                    j += 1;
                }
                k += 1;
            }
            buf[k..k + (mid - i)].copy_from_slice(&items[i..mid]);
            let k = k + (mid - i);
            buf[k..k + (hi - j)].copy_from_slice(&items[j..hi]);
            lo = hi;
        }
        std::mem::swap(items, &mut buf);
        width *= 2;
    }
    Ok(())
}

fn orient_probe(
    po: &mut PartialOrder,
    u: usize,
    v: usize,
    answer: ProbeAnswer,
) -> Result<(), SortError> {
    match answer {
        ProbeAnswer::Less => po.orient(u, v)?,
        ProbeAnswer::Greater => po.orient(v, u)?,
    }
    Ok(())
}

/// Approximate median of the whole graph. See [`approx_median_in`].
pub fn approx_median(g: &ComparisonGraph, o: &mut ProbeOracle) -> Result<usize, SortError> {
    assert!(g.n() >= 1);
    let pool = BitSet::full(g.n());
    let q = g.q();
    approx_median_in(g, o, &pool, q)
}

/// Pick a pivot for `pool`: build the clique cover, sort each piece through
/// the oracle, take lower medians, rank each median by its probed lower-set
/// size over the cover, then choose the rank-median (three or more pieces)
/// or the higher-ranked median (one or two pieces). Ties fall to the lowest
/// vertex index.
pub fn approx_median_in(
    g: &ComparisonGraph,
    o: &mut ProbeOracle,
    pool: &BitSet,
    q_pool: usize,
) -> Result<usize, SortError> {
    let cover = build_clique_cover_in(g, pool, q_pool);
    let covered: Vec<usize> = cover.vertices().collect();

    let mut medians = Vec::with_capacity(cover.piece_count());
    for piece in cover.pieces() {
        let mut sorted = piece.clone();
        oracle_merge_sort(&mut sorted, o)?;
        medians.push(sorted[(sorted.len() - 1) / 2]);
    }

    let mut ranked = Vec::with_capacity(medians.len());
    for &m in &medians {
        let mut lower = 0usize;
        for &w in &covered {
            if w != m && g.allowed(m, w) && o.probe(m, w)? == ProbeAnswer::Greater {
                lower += 1;
            }
        }
        ranked.push((lower, m));
    }
    ranked.sort_unstable();

    // Lower median of the lower-set sizes for three or more pieces; the
    // larger lower set for one or two. Ties go to the lowest vertex index,
    // which is the first entry of the value group in sorted order.
    let target = if ranked.len() >= 3 {
        ranked[(ranked.len() - 1) / 2].0
    } else {
        ranked.last().unwrap().0
    };
    let pivot = ranked
        .iter()
        .find(|(lower, _)| *lower == target)
        .unwrap()
        .1;
    Ok(pivot)
}

/// Deterministic divide-and-conquer sort. Output always equals the ground
/// truth; the probe count stays within O((q+n) log n).
pub fn sort_deterministic(
    g: &ComparisonGraph,
    o: &mut ProbeOracle,
) -> Result<PartialOrder, SortError> {
    sort_deterministic_traced(g, o).map(|(po, _)| po)
}

/// As [`sort_deterministic`], additionally returning one [`NodeTrace`] per
/// recursion node.
pub fn sort_deterministic_traced(
    g: &ComparisonGraph,
    o: &mut ProbeOracle,
) -> Result<(PartialOrder, Vec<NodeTrace>), SortError> {
    let mut po = PartialOrder::new(g.n());
    let mut traces = Vec::new();
    if g.n() > 0 {
        let pool = BitSet::full(g.n());
        sort_node(g, o, &pool, 0, &mut po, &mut traces)?;
    }
    po.close()?;
    Ok((po, traces))
}

fn sort_node(
    g: &ComparisonGraph,
    o: &mut ProbeOracle,
    pool: &BitSet,
    depth: usize,
    po: &mut PartialOrder,
    traces: &mut Vec<NodeTrace>,
) -> Result<(), SortError> {
    let n_p = pool.len();
    if n_p == 0 {
        return Ok(());
    }
    let q_p = g.forbidden_within(pool);
    let before = o.probe_count();

    if n_p <= N_MIN || n_p * n_p < 200 * q_p {
        // Leaf: probe every allowed pair inside the pool.
        let members = pool.to_vec();
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i + 1..] {
                if g.allowed(u, v) {
                    let ans = o.probe(u, v)?;
                    orient_probe(po, u, v, ans)?;
                }
            }
        }
        traces.push(NodeTrace {
            depth,
            n_p,
            q_p,
            pivot: None,
            upper: 0,
            lower: 0,
            b_size: 0,
            probes: o.probe_count() - before,
        });
        return Ok(());
    }

    let pivot = approx_median_in(g, o, pool, q_p)?;
    let mut upper = BitSet::empty(g.n());
    let mut lower = BitSet::empty(g.n());
    let mut b_set = BitSet::empty(g.n());
    for w in pool.iter() {
        if w == pivot {
            continue;
        }
        if g.allowed(pivot, w) {
            match o.probe(pivot, w)? {
                ProbeAnswer::Less => {
                    po.orient(pivot, w)?;
                    upper.insert(w);
                }
                ProbeAnswer::Greater => {
                    po.orient(w, pivot)?;
                    lower.insert(w);
                }
            }
        } else {
            b_set.insert(w);
        }
    }
    let forward_probes = o.probe_count() - before;
    debug_assert_eq!(upper.len() + lower.len() + b_set.len() + 1, n_p);
    // The pivot comes from S, so its non-neighbor count obeys the split rule.
    debug_assert!(b_set.len() <= (4 * q_p).div_ceil(n_p));

    sort_node(g, o, &upper, depth + 1, po, traces)?;
    sort_node(g, o, &lower, depth + 1, po, traces)?;

    // Merge: probe B against everything already placed at this node, and
    // inside B itself.
    let merge_before = o.probe_count();
    let mut placed = upper.clone();
    placed.union_with(&lower);
    placed.insert(pivot);
    let b_members = b_set.to_vec();
    for &x in &b_members {
        for y in placed.iter() {
            if g.allowed(x, y) {
                let ans = o.probe(x, y)?;
                orient_probe(po, x, y, ans)?;
            }
        }
    }
    for (i, &x) in b_members.iter().enumerate() {
        for &y in &b_members[i + 1..] {
            if g.allowed(x, y) {
                let ans = o.probe(x, y)?;
                orient_probe(po, x, y, ans)?;
            }
        }
    }

    traces.push(NodeTrace {
        depth,
        n_p,
        q_p,
        pivot: Some(pivot),
        upper: upper.len(),
        lower: lower.len(),
        b_size: b_set.len(),
        probes: forward_probes + (o.probe_count() - merge_before),
    });
    Ok(())
}

/// Counters from a [`peel_sort`] run.
#[derive(Clone, Copy, Debug, Default)]
pub struct PeelStats {
    /// Vertices removed before the remainder became a clique.
    pub peels: usize,
}

/// Peel-and-reinsert sort, intended for graphs with very few forbidden
/// pairs: remove one endpoint of the lexicographically first non-adjacent
/// pair until a clique remains, sort the clique, then reinsert the removed
/// vertices in reverse order, probing each against its allowed partners
/// among the vertices already placed. Correct for every q.
pub fn peel_sort(g: &ComparisonGraph, o: &mut ProbeOracle) -> Result<PartialOrder, SortError> {
    peel_sort_detailed(g, o).map(|(po, _)| po)
}

pub fn peel_sort_detailed(
    g: &ComparisonGraph,
    o: &mut ProbeOracle,
) -> Result<(PartialOrder, PeelStats), SortError> {
    let n = g.n();
    let mut po = PartialOrder::new(n);
    let mut stats = PeelStats::default();
    let mut working = BitSet::full(n);

    let mut removed = Vec::new();
    while let Some((u, _)) = first_non_adjacent_pair(g, &working) {
        working.remove(u);
        removed.push(u);
        stats.peels += 1;
    }

    // The remainder is a clique: sort it and orient the resulting chain.
    let mut clique = working.to_vec();
    oracle_merge_sort(&mut clique, o)?;
    for pair in clique.windows(2) {
        po.orient(pair[0], pair[1])?;
    }

    let mut placed = working;
    for &v in removed.iter().rev() {
        for w in placed.iter() {
            if g.allowed(v, w) {
                let ans = o.probe(v, w)?;
                orient_probe(&mut po, v, w, ans)?;
            }
        }
        placed.insert(v);
    }

    po.close()?;
    Ok((po, stats))
}

/// Lexicographically first unordered pair inside `pool` with no edge.
fn first_non_adjacent_pair(g: &ComparisonGraph, pool: &BitSet) -> Option<(usize, usize)> {
    for u in pool.iter() {
        let mut non_neighbors = pool.clone();
        non_neighbors.subtract_words(g.adj_row(u));
        if let Some(w) = non_neighbors.iter().find(|&w| w > u) {
            return Some((u, w));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::pairs_of;
    use crate::oracle::HiddenOrder;
    use crate::reference::ground_truth;
    use proptest::prelude::*;

    #[test]
    fn empty_graph_sorts_to_empty_order() {
        let g = ComparisonGraph::gen_random_forbidden(5, 10, 0).unwrap();
        let mut o = ProbeOracle::new(&g, HiddenOrder::random(5, 1));
        let po = sort_deterministic(&g, &mut o).unwrap();
        assert_eq!(po.incomparable_count(), 10);
        assert_eq!(o.probe_count(), 0);
    }

    #[test]
    fn k4_recovers_the_hidden_chain() {
        // Hidden order 2 < 0 < 3 < 1.
        let g = ComparisonGraph::from_forbidden_list(4, &[]).unwrap();
        let order = HiddenOrder::from_ranks(vec![1, 3, 0, 2]).unwrap();
        let mut o = ProbeOracle::new(&g, order);
        let po = sort_deterministic(&g, &mut o).unwrap();
        assert!(o.probe_count() <= 6);
        for (lo, hi) in [(2, 0), (0, 3), (3, 1), (2, 3), (2, 1), (0, 1)] {
            assert!(po.lt(lo, hi), "{lo} < {hi} missing");
        }
        assert_eq!(po.incomparable_count(), 0);
    }

    #[test]
    fn single_vertex_median() {
        let g = ComparisonGraph::from_forbidden_list(1, &[]).unwrap();
        let mut o = ProbeOracle::new(&g, HiddenOrder::identity(1));
        assert_eq!(approx_median(&g, &mut o).unwrap(), 0);
    }

    #[test]
    fn k7_median_splits_both_ways() {
        let g = ComparisonGraph::from_forbidden_list(7, &[]).unwrap();
        let mut o = ProbeOracle::new(&g, HiddenOrder::identity(7));
        let m = approx_median(&g, &mut o).unwrap();
        let below = (0..7).filter(|&v| v < m).count();
        let above = 7 - 1 - below;
        assert!(below >= 1 && above >= 1, "pivot {m} left a side empty");
    }

    #[test]
    fn matches_ground_truth_on_random_instances() {
        for (n, qfrac, seed) in [
            (40usize, 0.0f64, 1u64),
            (40, 0.2, 2),
            (64, 0.5, 3),
            (64, 0.9, 4),
            (100, 0.1, 5),
            (100, 0.98, 6),
            (150, 0.3, 7),
        ] {
            let q = (pairs_of(n) as f64 * qfrac) as usize;
            let g = ComparisonGraph::gen_random_forbidden(n, q, seed).unwrap();
            let order = HiddenOrder::random(n, seed ^ 0x5eed);
            let truth = ground_truth(&g, &order);
            let mut o = ProbeOracle::new(&g, order);
            let po = sort_deterministic(&g, &mut o).unwrap();
            assert!(po.equals(&truth), "mismatch at n={n} q={q} seed={seed}");
        }
    }

    #[test]
    fn traces_satisfy_node_invariants() {
        let g = ComparisonGraph::gen_random_forbidden(400, 800, 11).unwrap();
        let order = HiddenOrder::random(400, 12);
        let mut o = ProbeOracle::new(&g, order);
        let (_, traces) = sort_deterministic_traced(&g, &mut o).unwrap();
        assert!(!traces.is_empty());
        let mut internal = 0;
        for t in &traces {
            if t.pivot.is_some() {
                internal += 1;
                assert_eq!(t.upper + t.lower + t.b_size + 1, t.n_p);
                assert!(t.b_size <= (4 * t.q_p).div_ceil(t.n_p));
            } else {
                // Leaf accounting: all allowed pairs, at most once each.
                assert!(t.probes <= pairs_of(t.n_p) - t.q_p);
                assert!(t.n_p <= N_MIN || t.n_p * t.n_p < 200 * t.q_p);
                if t.n_p > N_MIN {
                    assert!(pairs_of(t.n_p) - t.q_p <= 100 * t.q_p);
                }
            }
        }
        assert!(internal >= 1, "instance should recurse at least once");
    }

    #[test]
    fn peel_on_complete_graph_never_peels() {
        let n = 64;
        let g = ComparisonGraph::from_forbidden_list(n, &[]).unwrap();
        let order = HiddenOrder::random(n, 9);
        let truth = ground_truth(&g, &order);
        let mut o = ProbeOracle::new(&g, order);
        let (po, stats) = peel_sort_detailed(&g, &mut o).unwrap();
        assert_eq!(stats.peels, 0);
        assert!(po.equals(&truth));
        // Merge sort stays within n * ceil(log2 n).
        assert!(o.probe_count() <= n * 6);
    }

    #[test]
    fn peel_single_forbidden_pair() {
        let g = ComparisonGraph::from_forbidden_list(5, &[(1, 3)]).unwrap();
        let order = HiddenOrder::random(5, 77);
        let truth = ground_truth(&g, &order);
        let mut o = ProbeOracle::new(&g, order);
        let (po, stats) = peel_sort_detailed(&g, &mut o).unwrap();
        assert_eq!(stats.peels, 1);
        assert!(po.equals(&truth));
        // Clique sort of K4 plus at most 4 reinsertion probes.
        assert!(o.probe_count() <= 6 + 4);
    }

    #[test]
    fn peel_empty_graph() {
        let g = ComparisonGraph::gen_random_forbidden(6, 15, 0).unwrap();
        let mut o = ProbeOracle::new(&g, HiddenOrder::random(6, 1));
        let (po, stats) = peel_sort_detailed(&g, &mut o).unwrap();
        assert_eq!(stats.peels, 5);
        assert_eq!(o.probe_count(), 0);
        assert_eq!(po.incomparable_count(), 15);
    }

    proptest! {
        #[test]
        fn both_sorts_match_ground_truth(n in 1usize..48, qfrac in 0.0f64..1.0, seed in 0u64..200) {
            let q = (pairs_of(n) as f64 * qfrac) as usize;
            let g = ComparisonGraph::gen_random_forbidden(n, q, seed).unwrap();
            let order = HiddenOrder::random(n, seed.wrapping_mul(31) ^ 7);
            let truth = ground_truth(&g, &order);

            let mut o = ProbeOracle::new(&g, order.clone());
            let det = sort_deterministic(&g, &mut o).unwrap();
            prop_assert!(det.equals(&truth));

            let mut o = ProbeOracle::new(&g, order);
            let peel = peel_sort(&g, &mut o).unwrap();
            prop_assert!(peel.equals(&truth));
        }
    }
}

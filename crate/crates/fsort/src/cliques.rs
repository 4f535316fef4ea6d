//! Clique-cover preprocessing for pivot selection: split vertices by
//! non-degree, grow cliques greedily, truncate to equal sizes. Inspects only
//! the graph; never probes.

use crate::bits::BitSet;
use crate::graph::ComparisonGraph;

/// Ordered list of disjoint equal-size vertex sets, each inducing a complete
/// subgraph. Every piece is sorted ascending.
#[derive(Clone, Debug)]
pub struct CliqueCover {
    pieces: Vec<Vec<usize>>,
}

impl CliqueCover {
    pub fn pieces(&self) -> &[Vec<usize>] {
        &self.pieces
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    /// Common size of every piece.
    pub fn piece_size(&self) -> usize {
        self.pieces.first().map_or(0, Vec::len)
    }

    /// All covered vertices in piece order.
    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.pieces.iter().flatten().copied()
    }
}

/// Split the whole vertex set into the high-non-degree set R and its
/// complement S. See [`split_r_s_in`].
pub fn split_r_s(g: &ComparisonGraph) -> (Vec<usize>, Vec<usize>) {
    let pool = BitSet::full(g.n());
    let q = g.q();
    let (r, s) = split_r_s_in(g, &pool, q);
    (r.to_vec(), s.to_vec())
}

/// Pool-relative split: R holds the vertices whose in-pool non-degree
/// exceeds 4q/n (exact integer test `n(v) * n > 4q`). Since non-degrees sum
/// to 2q, S keeps at least half the pool.
pub fn split_r_s_in(g: &ComparisonGraph, pool: &BitSet, q_pool: usize) -> (BitSet, BitSet) {
    let n_pool = pool.len();
    let mut r = BitSet::empty(g.n());
    let mut s = BitSet::empty(g.n());
    for v in pool.iter() {
        if g.non_degree_in(v, pool) * n_pool > 4 * q_pool {
            r.insert(v);
        } else {
            s.insert(v);
        }
    }
    assert!(2 * s.len() >= n_pool, "low-non-degree set lost its majority");
    (r, s)
}

/// Grow a clique from `pool`: repeatedly take the lowest-index candidate and
/// restrict the candidates to its neighbors. Returns the clique ascending.
pub fn greedy_clique(g: &ComparisonGraph, pool: &BitSet) -> Vec<usize> {
    assert!(!pool.is_empty(), "greedy_clique needs a nonempty pool");
    greedy_clique_capped(g, pool, usize::MAX)
}

fn greedy_clique_capped(g: &ComparisonGraph, pool: &BitSet, cap: usize) -> Vec<usize> {
    let mut clique = Vec::new();
    let mut candidates = pool.clone();
    while let Some(u) = candidates.min() {
        clique.push(u);
        if clique.len() == cap {
            break;
        }
        candidates.remove(u);
        candidates.intersect_words(g.adj_row(u));
    }
    clique
}

/// Build the equal-size clique cover of the whole graph. See
/// [`build_clique_cover_in`].
pub fn build_clique_cover(g: &ComparisonGraph) -> CliqueCover {
    let pool = BitSet::full(g.n());
    let q = g.q();
    build_clique_cover_in(g, &pool, q)
}

/// Pool-relative cover construction. Sparse-forbidden pools (`q < n`) target
/// two cliques, the first capped at half of S so the second has material;
/// dense pools target `5q/n + 1` cliques grown greedily until the pool is
/// exhausted. All pieces are then truncated to the smallest piece size.
pub fn build_clique_cover_in(g: &ComparisonGraph, pool: &BitSet, q_pool: usize) -> CliqueCover {
    let n_pool = pool.len();
    assert!(n_pool >= 1, "cover needs at least one vertex");
    let (_, s) = split_r_s_in(g, pool, q_pool);

    let mut pieces: Vec<Vec<usize>> = Vec::new();
    let mut remaining = s;
    if q_pool < n_pool {
        let cap = remaining.len().div_ceil(2);
        let first = greedy_clique_capped(g, &remaining, cap);
        for &v in &first {
            remaining.remove(v);
        }
        pieces.push(first);
        if !remaining.is_empty() {
            pieces.push(greedy_clique_capped(g, &remaining, usize::MAX));
        }
    } else {
        let target = 5 * q_pool / n_pool + 1;
        while pieces.len() < target && !remaining.is_empty() {
            let piece = greedy_clique_capped(g, &remaining, usize::MAX);
            for &v in &piece {
                remaining.remove(v);
            }
            pieces.push(piece);
        }
    }

    let size = pieces.iter().map(Vec::len).min().expect("cover is nonempty");
    debug_assert!(size >= 1);
    for piece in &mut pieces {
        piece.truncate(size);
    }
    let cover = CliqueCover { pieces };
    debug_assert!(cover_is_valid(g, &cover));
    cover
}

#[allow(dead_code)]
fn cover_is_valid(g: &ComparisonGraph, cover: &CliqueCover) -> bool {
    let size = cover.piece_size();
    let mut seen = BitSet::empty(g.n());
    for piece in cover.pieces() {
        if piece.len() != size {
            return false;
        }
        for (i, &u) in piece.iter().enumerate() {
            if seen.contains(u) {
                return false;
            }
            seen.insert(u);
            for &v in &piece[i + 1..] {
                if !g.allowed(u, v) {
                    return false;
                }
            }
        }
    }
    true
}

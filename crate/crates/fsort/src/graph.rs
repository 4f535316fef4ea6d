//! The comparison graph: `n` vertices, a symmetric allowed-pair adjacency
//! matrix and the count `q` of forbidden pairs. Includes instance generators
//! and the `fsort` text file format.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bits::{BitMatrix, BitSet};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {v} out of range for n={n}")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("self-pair ({v}, {v}) is not a valid vertex pair")]
    SelfPair { v: usize },
    #[error("duplicate forbidden pair ({u}, {v})")]
    DuplicatePair { u: usize, v: usize },
    #[error("edge probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("q={q} exceeds the {max} unordered pairs of n={n} vertices")]
    TooManyForbidden { q: usize, max: usize, n: usize },
    #[error("bipartite side sizes must be >= 1, got ({a}, {b})")]
    EmptySide { a: usize, b: usize },
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("malformed pair line {line}: {reason}")]
    MalformedPair { line: usize, reason: String },
    #[error("header claims q={expected} forbidden pairs but file lists {found}")]
    PairCountMismatch { expected: usize, found: usize },
    #[error("pair lines must be ascending lexicographic; line {line} is out of order")]
    PairsOutOfOrder { line: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Undirected comparison graph. Edges are the pairs that may be probed at
/// unit cost; the `q` missing pairs are forbidden. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonGraph {
    n: usize,
    adj: BitMatrix,
    q: usize,
}

#[inline]
pub fn pairs_of(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl ComparisonGraph {
    fn from_forbidden_set(n: usize, forbidden: &BitMatrix, q: usize) -> Self {
        let mut adj = BitMatrix::new(n);
        for u in 0..n {
            for v in 0..n {
                if u != v && !forbidden.get(u, v) {
                    adj.set(u, v);
                }
            }
        }
        let g = Self { n, adj, q };
        g.debug_validate();
        g
    }

    fn debug_validate(&self) {
        #[cfg(debug_assertions)]
        {
            let mut above = 0;
            for u in 0..self.n {
                assert!(!self.adj.get(u, u), "diagonal must be false");
                for v in u + 1..self.n {
                    assert_eq!(self.adj.get(u, v), self.adj.get(v, u), "asymmetry");
                    if self.adj.get(u, v) {
                        above += 1;
                    }
                }
            }
            assert_eq!(self.q, pairs_of(self.n) - above, "q bookkeeping");
        }
    }

    /// Build a graph with exactly the given unordered pairs forbidden.
    /// Pairs must be in range, non-diagonal, and free of order-insensitive
    /// duplicates.
    pub fn from_forbidden_list(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut forbidden = BitMatrix::new(n);
        for &(u, v) in pairs {
            if u >= n {
                return Err(GraphError::VertexOutOfRange { v: u, n });
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange { v, n });
            }
            if u == v {
                return Err(GraphError::SelfPair { v });
            }
            if forbidden.get(u, v) {
                return Err(GraphError::DuplicatePair {
                    u: u.min(v),
                    v: u.max(v),
                });
            }
            forbidden.set(u, v);
            forbidden.set(v, u);
        }
        Ok(Self::from_forbidden_set(n, &forbidden, pairs.len()))
    }

    /// Erdos-Renyi instance: each unordered pair is allowed independently
    /// with probability `p`. Deterministic for a fixed seed.
    pub fn gen_gnp(n: usize, p: f64, seed: u64) -> Result<Self, GraphError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(GraphError::ProbabilityOutOfRange(p));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut forbidden = BitMatrix::new(n);
        let mut q = 0;
        for u in 0..n {
            for v in u + 1..n {
                if !rng.random_bool(p) {
                    forbidden.set(u, v);
                    forbidden.set(v, u);
                    q += 1;
                }
            }
        }
        Ok(Self::from_forbidden_set(n, &forbidden, q))
    }

    /// Exactly `q` distinct forbidden pairs drawn uniformly without
    /// replacement. Deterministic for a fixed seed.
    pub fn gen_random_forbidden(n: usize, q: usize, seed: u64) -> Result<Self, GraphError> {
        let max = pairs_of(n);
        if q > max {
            return Err(GraphError::TooManyForbidden { q, max, n });
        }
        // Partial Fisher-Yates over pair indices, materialized lazily.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut swapped: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
        let mut forbidden = BitMatrix::new(n);
        for i in 0..q {
            let j = rng.random_range(i..max);
            let pick = *swapped.get(&j).unwrap_or(&j);
            let at_i = *swapped.get(&i).unwrap_or(&i);
            swapped.insert(j, at_i);
            let (u, v) = unrank_pair(n, pick);
            forbidden.set(u, v);
            forbidden.set(v, u);
        }
        Ok(Self::from_forbidden_set(n, &forbidden, q))
    }

    /// Complete bipartite graph on sides of size `a` and `b` (the nuts-and-
    /// bolts family): only cross-side pairs are allowed.
    pub fn gen_complete_bipartite(a: usize, b: usize) -> Result<Self, GraphError> {
        if a == 0 || b == 0 {
            return Err(GraphError::EmptySide { a, b });
        }
        let n = a + b;
        let mut forbidden = BitMatrix::new(n);
        let mut q = 0;
        for u in 0..n {
            for v in u + 1..n {
                let same_side = (u < a) == (v < a);
                if same_side {
                    forbidden.set(u, v);
                    forbidden.set(v, u);
                    q += 1;
                }
            }
        }
        Ok(Self::from_forbidden_set(n, &forbidden, q))
    }

    #[inline(always)]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of forbidden unordered pairs.
    #[inline(always)]
    pub fn q(&self) -> usize {
        self.q
    }

    /// Number of allowed unordered pairs.
    pub fn edge_count(&self) -> usize {
        pairs_of(self.n) - self.q
    }

    #[inline(always)]
    pub fn allowed(&self, u: usize, v: usize) -> bool {
        self.adj.get(u, v)
    }

    /// Adjacency row of `v` as packed words (for set intersections).
    #[inline(always)]
    pub fn adj_row(&self, v: usize) -> &[u64] {
        self.adj.row(v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj.count_row(v)
    }

    /// Non-neighbor count `n(v) = n - 1 - d(v)`.
    pub fn non_degree(&self, v: usize) -> usize {
        self.n - 1 - self.degree(v)
    }

    /// Non-neighbors of `v` inside `pool`, excluding `v` itself.
    pub fn non_degree_in(&self, v: usize, pool: &BitSet) -> usize {
        let mut inside = pool.len() - pool.intersection_count(self.adj_row(v));
        if pool.contains(v) {
            inside -= 1;
        }
        inside
    }

    /// Forbidden pairs with both endpoints inside `pool`.
    pub fn forbidden_within(&self, pool: &BitSet) -> usize {
        let total: usize = pool.iter().map(|v| self.non_degree_in(v, pool)).sum();
        debug_assert_eq!(total % 2, 0);
        total / 2
    }

    /// Allowed unordered pairs in ascending lexicographic order.
    pub fn allowed_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.adj
                .iter_row(u)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Forbidden unordered pairs in ascending lexicographic order.
    pub fn forbidden_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n)
            .flat_map(move |u| (u + 1..self.n).map(move |v| (u, v)))
            .filter(|&(u, v)| !self.adj.get(u, v))
    }

    /// Write the graph in the `fsort` text format.
    pub fn save<W: Write>(&self, mut sink: W) -> io::Result<()> {
        writeln!(sink, "fsort {} {}", self.n, self.q)?;
        for (u, v) in self.forbidden_pairs() {
            writeln!(sink, "f {} {}", u, v)?;
        }
        Ok(())
    }

    pub fn save_to_path(&self, path: impl AsRef<Path>) -> io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.save(&mut w)?;
        w.flush()
    }

    /// Parse the `fsort` text format. Lines starting with `#` are ignored.
    pub fn load<R: BufRead>(source: R) -> Result<Self, GraphError> {
        let mut lines = source
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| match l {
                Ok(s) => !s.trim_start().starts_with('#') && !s.trim().is_empty(),
                Err(_) => true,
            });

        let (_, header) = lines
            .next()
            .ok_or_else(|| GraphError::MalformedHeader("empty file".into()))?;
        let header = header?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("fsort") {
            return Err(GraphError::MalformedHeader(format!(
                "expected `fsort <n> <q>`, got {header:?}"
            )));
        }
        let n: usize = fields
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| GraphError::MalformedHeader(format!("bad n in {header:?}")))?;
        let q: usize = fields
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| GraphError::MalformedHeader(format!("bad q in {header:?}")))?;
        if fields.next().is_some() {
            return Err(GraphError::MalformedHeader(format!(
                "trailing fields in {header:?}"
            )));
        }
        if q > pairs_of(n) {
            return Err(GraphError::TooManyForbidden {
                q,
                max: pairs_of(n),
                n,
            });
        }

        let mut pairs = Vec::with_capacity(q);
        let mut prev: Option<(usize, usize)> = None;
        for (lineno, line) in lines {
            let line = line?;
            let mut fields = line.split_whitespace();
            if fields.next() != Some("f") {
                return Err(GraphError::MalformedPair {
                    line: lineno,
                    reason: format!("expected `f <u> <v>`, got {line:?}"),
                });
            }
            let u: usize = fields.next().and_then(|s| s.parse().ok()).ok_or_else(|| {
                GraphError::MalformedPair {
                    line: lineno,
                    reason: "bad u".into(),
                }
            })?;
            let v: usize = fields.next().and_then(|s| s.parse().ok()).ok_or_else(|| {
                GraphError::MalformedPair {
                    line: lineno,
                    reason: "bad v".into(),
                }
            })?;
            if fields.next().is_some() {
                return Err(GraphError::MalformedPair {
                    line: lineno,
                    reason: "trailing fields".into(),
                });
            }
            if u >= v {
                return Err(GraphError::MalformedPair {
                    line: lineno,
                    reason: format!("require u < v, got ({u}, {v})"),
                });
            }
            if let Some(p) = prev {
                if (u, v) <= p {
                    return Err(GraphError::PairsOutOfOrder { line: lineno });
                }
            }
            prev = Some((u, v));
            pairs.push((u, v));
        }
        if pairs.len() != q {
            return Err(GraphError::PairCountMismatch {
                expected: q,
                found: pairs.len(),
            });
        }
        Self::from_forbidden_list(n, &pairs)
    }

    pub fn load_from_path(path: impl AsRef<Path>) -> Result<Self, GraphError> {
        Self::load(BufReader::new(File::open(path)?))
    }
}

/// Map a pair index in `0..C(n,2)` to the pair `(u, v)`, `u < v`, in
/// lexicographic order.
fn unrank_pair(n: usize, mut k: usize) -> (usize, usize) {
    debug_assert!(k < pairs_of(n));
    for u in 0..n {
        let row = n - 1 - u;
        if k < row {
            return (u, u + 1 + k);
        }
        k -= row;
    }
    unreachable!("pair index within range");
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_forbidden_list_is_complete() {
        let g = ComparisonGraph::from_forbidden_list(3, &[]).unwrap();
        assert_eq!(g.q(), 0);
        assert_eq!(g.edge_count(), 3);
        assert!(g.allowed(0, 1) && g.allowed(1, 2) && g.allowed(0, 2));
    }

    #[test]
    fn single_exclusion() {
        let g = ComparisonGraph::from_forbidden_list(3, &[(0, 1)]).unwrap();
        assert_eq!(g.q(), 1);
        assert!(!g.allowed(0, 1) && !g.allowed(1, 0));
        assert!(g.allowed(0, 2) && g.allowed(1, 2));
    }

    #[test]
    fn order_insensitive_duplicate_rejected() {
        let err = ComparisonGraph::from_forbidden_list(4, &[(0, 1), (1, 0)]).unwrap_err();
        assert!(matches!(err, GraphError::DuplicatePair { u: 0, v: 1 }));
    }

    #[test]
    fn out_of_range_and_self_pair_rejected() {
        assert!(matches!(
            ComparisonGraph::from_forbidden_list(3, &[(0, 3)]),
            Err(GraphError::VertexOutOfRange { v: 3, n: 3 })
        ));
        assert!(matches!(
            ComparisonGraph::from_forbidden_list(3, &[(2, 2)]),
            Err(GraphError::SelfPair { v: 2 })
        ));
    }

    #[test]
    fn gnp_extremes() {
        let g = ComparisonGraph::gen_gnp(5, 1.0, 9).unwrap();
        assert_eq!(g.q(), 0);
        let g = ComparisonGraph::gen_gnp(5, 0.0, 9).unwrap();
        assert_eq!(g.q(), 10);
        assert!(ComparisonGraph::gen_gnp(5, 1.5, 9).is_err());
    }

    #[test]
    fn gnp_edge_count_concentrates() {
        // Binomial over C(100,2) trials at p = 0.5: mean 2475, allow 4 sigma.
        let g = ComparisonGraph::gen_gnp(100, 0.5, 12345).unwrap();
        let mean = 2475.0;
        let window = 4.0 * (4950.0f64 * 0.25).sqrt();
        let edges = g.edge_count() as f64;
        assert!(
            (edges - mean).abs() <= window,
            "edges={edges} outside {mean}±{window}"
        );
    }

    #[test]
    fn random_forbidden_counts_and_determinism() {
        let g = ComparisonGraph::gen_random_forbidden(6, 0, 1).unwrap();
        assert_eq!(g.q(), 0);
        let g = ComparisonGraph::gen_random_forbidden(6, 15, 1).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert!(ComparisonGraph::gen_random_forbidden(6, 16, 1).is_err());

        let a = ComparisonGraph::gen_random_forbidden(50, 100, 777).unwrap();
        let b = ComparisonGraph::gen_random_forbidden(50, 100, 777).unwrap();
        assert_eq!(a.q(), 100);
        assert_eq!(a, b);
        let c = ComparisonGraph::gen_random_forbidden(50, 100, 778).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn bipartite_counts() {
        let g = ComparisonGraph::gen_complete_bipartite(1, 1).unwrap();
        assert_eq!((g.n(), g.q(), g.edge_count()), (2, 0, 1));
        let g = ComparisonGraph::gen_complete_bipartite(2, 2).unwrap();
        assert_eq!((g.q(), g.edge_count()), (2, 4));
        let g = ComparisonGraph::gen_complete_bipartite(3, 5).unwrap();
        assert_eq!(g.q(), 13); // C(3,2) + C(5,2)
        assert!(ComparisonGraph::gen_complete_bipartite(0, 4).is_err());
    }

    #[test]
    fn save_format_k3() {
        let g = ComparisonGraph::from_forbidden_list(3, &[]).unwrap();
        let mut buf = Vec::new();
        g.save(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "fsort 3 0\n");
    }

    #[test]
    fn load_rejects_header_body_mismatch() {
        let err = ComparisonGraph::load("fsort 4 2\nf 0 1\n".as_bytes()).unwrap_err();
        assert!(matches!(
            err,
            GraphError::PairCountMismatch {
                expected: 2,
                found: 1
            }
        ));
    }

    #[test]
    fn load_rejects_bad_lines() {
        assert!(matches!(
            ComparisonGraph::load("sort 3 0\n".as_bytes()),
            Err(GraphError::MalformedHeader(_))
        ));
        assert!(matches!(
            ComparisonGraph::load("fsort 3 1\nf 1 0\n".as_bytes()),
            Err(GraphError::MalformedPair { .. })
        ));
        assert!(matches!(
            ComparisonGraph::load("fsort 4 2\nf 1 2\nf 0 1\n".as_bytes()),
            Err(GraphError::PairsOutOfOrder { .. })
        ));
        assert!(matches!(
            ComparisonGraph::load("fsort 3 1\nf 0 9\n".as_bytes()),
            Err(GraphError::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn load_ignores_comments() {
        let g = ComparisonGraph::load("# a comment\nfsort 3 1\n# another\nf 0 2\n".as_bytes())
            .unwrap();
        assert!(!g.allowed(0, 2));
        assert_eq!(g.q(), 1);
    }

    #[test]
    fn unrank_pair_is_lexicographic() {
        let n = 7;
        let mut k = 0;
        for u in 0..n {
            for v in u + 1..n {
                assert_eq!(unrank_pair(n, k), (u, v));
                k += 1;
            }
        }
    }

    proptest! {
        #[test]
        fn save_load_roundtrip(n in 1usize..40, qfrac in 0.0f64..1.0, seed in 0u64..1000) {
            let q = ((pairs_of(n) as f64) * qfrac) as usize;
            let g = ComparisonGraph::gen_random_forbidden(n, q, seed).unwrap();
            let mut buf = Vec::new();
            g.save(&mut buf).unwrap();
            let back = ComparisonGraph::load(buf.as_slice()).unwrap();
            prop_assert_eq!(g, back);
        }

        #[test]
        fn generators_keep_invariants(n in 1usize..30, p in 0.0f64..=1.0, seed in 0u64..500) {
            let g = ComparisonGraph::gen_gnp(n, p, seed).unwrap();
            let above = g.allowed_pairs().count();
            prop_assert_eq!(g.q(), pairs_of(n) - above);
            for v in 0..n {
                prop_assert_eq!(g.degree(v) + g.non_degree(v), n - 1);
            }
        }
    }
}

//! Strict partial orders as an n×n reachability bit-matrix: accumulate
//! oriented relations, close transitively, query comparability and count
//! incomparable pairs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitMatrix;
use crate::graph::pairs_of;

#[derive(Debug, Error)]
pub enum PosetError {
    #[error("vertex {v} out of range for n={n}")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("cannot orient {u} < {v}: {v} < {u} already holds")]
    Contradiction { u: usize, v: usize },
    #[error("relations contain a cycle through vertex {v}")]
    CycleDetected { v: usize },
}

/// Strict order relation `lt[u][v] = "u < v established"`. Irreflexive and
/// antisymmetric at all times; transitive after [`PartialOrder::close`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialOrder {
    n: usize,
    lt: BitMatrix,
}

impl PartialOrder {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            lt: BitMatrix::new(n),
        }
    }

    #[inline(always)]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline(always)]
    pub fn lt(&self, u: usize, v: usize) -> bool {
        self.lt.get(u, v)
    }

    /// Record `u < v`. Idempotent; contradicting an existing `v < u` is an
    /// error.
    pub fn orient(&mut self, u: usize, v: usize) -> Result<(), PosetError> {
        if u >= self.n {
            return Err(PosetError::VertexOutOfRange { v: u, n: self.n });
        }
        if v >= self.n {
            return Err(PosetError::VertexOutOfRange { v, n: self.n });
        }
        if u == v || self.lt.get(v, u) {
            return Err(PosetError::Contradiction { u, v });
        }
        self.lt.set(u, v);
        Ok(())
    }

    /// Transitive closure in place. Topologically sorts the current relation
    /// (erroring on any cycle), then unions successor rows in reverse
    /// topological order, so each union source is already closed.
    pub fn close(&mut self) -> Result<(), PosetError> {
        let n = self.n;
        let mut indegree = vec![0usize; n];
        for u in 0..n {
            for v in self.lt.iter_row(u) {
                indegree[v] += 1;
            }
        }
        let mut queue: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            topo.push(u);
            for v in self.lt.iter_row(u) {
                indegree[v] -= 1;
                if indegree[v] == 0 {
                    queue.push(v);
                }
            }
        }
        if topo.len() != n {
            let v = (0..n).find(|&v| indegree[v] > 0).unwrap();
            return Err(PosetError::CycleDetected { v });
        }

        let mut succ = Vec::new();
        for &u in topo.iter().rev() {
            succ.clear();
            succ.extend(self.lt.iter_row(u));
            for &v in &succ {
                self.lt.or_row_into(u, v);
            }
        }
        debug_assert!((0..n).all(|v| !self.lt.get(v, v)), "closure broke irreflexivity");
        Ok(())
    }

    #[inline]
    pub fn comparable(&self, u: usize, v: usize) -> bool {
        self.lt.get(u, v) || self.lt.get(v, u)
    }

    /// Number of unordered pairs related in neither direction. Meaningful
    /// after [`close`](Self::close); antisymmetry makes each comparable pair
    /// contribute exactly one matrix bit.
    pub fn incomparable_count(&self) -> usize {
        pairs_of(self.n) - self.lt.count_ones()
    }

    /// Matrix equality of two orders over the same vertex count.
    pub fn equals(&self, other: &Self) -> bool {
        assert_eq!(self.n, other.n, "cannot compare orders of different size");
        self.lt == other.lt
    }

    /// All related pairs `(u, v)` with `u < v` in the order, ascending.
    pub fn relation_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in self.lt.iter_row(u) {
                out.push((u, v));
            }
        }
        out.sort_unstable();
        out
    }

    /// Covering pairs of the closed relation: `u < v` with no `w` strictly
    /// between.
    pub fn covering_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in self.lt.iter_row(u) {
                let has_mid = self.lt.iter_row(u).any(|w| w != v && self.lt.get(w, v));
                if !has_mid {
                    out.push((u, v));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn dump(&self, covers_only: bool) -> PosetDump {
        PosetDump {
            n: self.n,
            relations: if covers_only {
                self.covering_pairs()
            } else {
                self.relation_pairs()
            },
        }
    }
}

/// JSON-facing form of a relation: `{"n": n, "relations": [[u, v], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PosetDump {
    pub n: usize,
    pub relations: Vec<(usize, usize)>,
}

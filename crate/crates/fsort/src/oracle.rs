//! The probe oracle: answers comparisons on allowed pairs against a hidden
//! total order, memoizes answers, and charges exactly one probe per distinct
//! unordered pair.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bits::BitMatrix;
use crate::graph::ComparisonGraph;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("probe of forbidden pair ({u}, {v})")]
    ForbiddenPair { u: usize, v: usize },
    #[error("probe of a vertex against itself ({v})")]
    SelfProbe { v: usize },
    #[error("vertex {v} out of range for n={n}")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("invalid hidden order: {0}")]
    InvalidOrder(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Answer to a probe of `(u, v)`: is `u` below or above `v` in the hidden
/// order? Ranks are distinct, so there is no `Equal`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeAnswer {
    Less,
    Greater,
}

impl ProbeAnswer {
    pub fn flip(self) -> Self {
        match self {
            ProbeAnswer::Less => ProbeAnswer::Greater,
            ProbeAnswer::Greater => ProbeAnswer::Less,
        }
    }
}

/// The adversary's total order: `rank[v]` is the position of vertex `v`,
/// a bijection onto `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HiddenOrder {
    rank: Vec<usize>,
}

impl HiddenOrder {
    /// Vertex `v` gets rank `v`.
    pub fn identity(n: usize) -> Self {
        Self {
            rank: (0..n).collect(),
        }
    }

    pub fn from_ranks(rank: Vec<usize>) -> Result<Self, OracleError> {
        let n = rank.len();
        let mut seen = vec![false; n];
        for &r in &rank {
            if r >= n {
                return Err(OracleError::InvalidOrder(format!(
                    "rank {r} out of range for n={n}"
                )));
            }
            if seen[r] {
                return Err(OracleError::InvalidOrder(format!("rank {r} repeated")));
            }
            seen[r] = true;
        }
        Ok(Self { rank })
    }

    /// Uniformly random permutation, deterministic for a fixed seed.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rank: Vec<usize> = (0..n).collect();
        rank.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Self { rank }
    }

    #[inline(always)]
    pub fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    pub fn n(&self) -> usize {
        self.rank.len()
    }

    /// Single line of space-separated ranks.
    pub fn save<W: Write>(&self, mut sink: W) -> io::Result<()> {
        let line: Vec<String> = self.rank.iter().map(|r| r.to_string()).collect();
        writeln!(sink, "{}", line.join(" "))
    }

    pub fn save_to_path(&self, path: impl AsRef<Path>) -> io::Result<()> {
        self.save(File::create(path)?)
    }

    pub fn load<R: BufRead>(source: R) -> Result<Self, OracleError> {
        for line in source.lines() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let ranks: Result<Vec<usize>, _> =
                trimmed.split_whitespace().map(|s| s.parse()).collect();
            let ranks = ranks
                .map_err(|e| OracleError::InvalidOrder(format!("unparsable rank: {e}")))?;
            return Self::from_ranks(ranks);
        }
        Err(OracleError::InvalidOrder("empty order file".into()))
    }

    pub fn load_from_path(path: impl AsRef<Path>) -> Result<Self, OracleError> {
        Self::load(BufReader::new(File::open(path)?))
    }
}

/// Memoizing probe counter over a graph and a hidden order. A pair is charged
/// on its first probe only; re-probes in either orientation are free.
pub struct ProbeOracle<'g> {
    graph: &'g ComparisonGraph,
    order: HiddenOrder,
    asked: BitMatrix,
    probes: usize,
}

impl<'g> ProbeOracle<'g> {
    pub fn new(graph: &'g ComparisonGraph, order: HiddenOrder) -> Self {
        assert_eq!(
            graph.n(),
            order.n(),
            "order must rank exactly the graph's vertices"
        );
        Self {
            asked: BitMatrix::new(graph.n()),
            graph,
            order,
            probes: 0,
        }
    }

    pub fn graph(&self) -> &ComparisonGraph {
        self.graph
    }

    pub fn order(&self) -> &HiddenOrder {
        &self.order
    }

    /// Compare `u` with `v`. Forbidden pairs are a hard error: bounds require
    /// algorithms never to attempt them.
    pub fn probe(&mut self, u: usize, v: usize) -> Result<ProbeAnswer, OracleError> {
        let n = self.graph.n();
        if u >= n {
            return Err(OracleError::VertexOutOfRange { v: u, n });
        }
        if v >= n {
            return Err(OracleError::VertexOutOfRange { v, n });
        }
        if u == v {
            return Err(OracleError::SelfProbe { v });
        }
        if !self.graph.allowed(u, v) {
            return Err(OracleError::ForbiddenPair {
                u: u.min(v),
                v: u.max(v),
            });
        }
        if !self.asked.get(u, v) {
            self.asked.set(u, v);
            self.asked.set(v, u);
            self.probes += 1;
        }
        Ok(if self.order.rank(u) < self.order.rank(v) {
            ProbeAnswer::Less
        } else {
            ProbeAnswer::Greater
        })
    }

    /// Number of distinct unordered pairs probed so far.
    pub fn probe_count(&self) -> usize {
        self.probes
    }
}

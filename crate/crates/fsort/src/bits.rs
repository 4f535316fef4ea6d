//! Word-packed boolean matrices and vertex sets used by the graph and poset
//! representations.

const WORD_BITS: usize = 64;

#[inline(always)]
fn word_index(bit: usize) -> (usize, u64) {
    (bit / WORD_BITS, 1u64 << (bit % WORD_BITS))
}

#[inline(always)]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// Square boolean matrix packed row-major into `u64` words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let words_per_row = words_for(n);
        Self {
            n,
            words_per_row,
            data: vec![0; n * words_per_row],
        }
    }

    #[inline(always)]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline(always)]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.n && j < self.n);
        let (w, mask) = word_index(j);
        self.data[i * self.words_per_row + w] & mask != 0
    }

    #[inline(always)]
    pub fn set(&mut self, i: usize, j: usize) {
        debug_assert!(i < self.n && j < self.n);
        let (w, mask) = word_index(j);
        self.data[i * self.words_per_row + w] |= mask;
    }

    #[inline(always)]
    pub fn row(&self, i: usize) -> &[u64] {
        debug_assert!(i < self.n);
        &self.data[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    /// OR row `src` into row `dst` in place.
    pub fn or_row_into(&mut self, dst: usize, src: usize) {
        debug_assert!(dst < self.n && src < self.n);
        if dst == src {
            return;
        }
        let w = self.words_per_row;
        let (lo, hi) = (dst.min(src), dst.max(src));
        let (head, tail) = self.data.split_at_mut(hi * w);
        let lo_row = &mut head[lo * w..lo * w + w];
        let hi_row = &mut tail[..w];
        if dst < src {
            for (d, s) in lo_row.iter_mut().zip(hi_row.iter()) {
                *d |= *s;
            }
        } else {
            for (d, s) in hi_row.iter_mut().zip(lo_row.iter()) {
                *d |= *s;
            }
        }
    }

    /// Indices of set bits in row `i`, ascending.
    pub fn iter_row(&self, i: usize) -> BitIter<'_> {
        BitIter::new(self.row(i), self.n)
    }

    pub fn count_row(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Fixed-capacity set of vertices `0..n`, packed into `u64` words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitSet {
    nbits: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn empty(n: usize) -> Self {
        Self {
            nbits: n,
            words: vec![0; words_for(n)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for (i, w) in s.words.iter_mut().enumerate() {
            let lo = i * WORD_BITS;
            if lo + WORD_BITS <= n {
                *w = u64::MAX;
            } else if lo < n {
                *w = (1u64 << (n - lo)) - 1;
            }
        }
        s
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for i in indices {
            s.insert(i);
        }
        s
    }

    #[inline(always)]
    pub fn capacity(&self) -> usize {
        self.nbits
    }

    #[inline(always)]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.nbits);
        let (w, mask) = word_index(i);
        self.words[w] |= mask;
    }

    #[inline(always)]
    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.nbits);
        let (w, mask) = word_index(i);
        self.words[w] &= !mask;
    }

    #[inline(always)]
    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.nbits);
        let (w, mask) = word_index(i);
        self.words[w] & mask != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Smallest member, if any.
    pub fn min(&self) -> Option<usize> {
        for (i, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(i * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Keep only members that are also set in `other` (a word slice of the
    /// same capacity, e.g. an adjacency row).
    pub fn intersect_words(&mut self, other: &[u64]) {
        debug_assert_eq!(other.len(), self.words.len());
        for (w, o) in self.words.iter_mut().zip(other.iter()) {
            *w &= *o;
        }
    }

    pub fn union_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.nbits, other.nbits);
        self.union_words(&other.words);
    }

    pub fn union_words(&mut self, other: &[u64]) {
        debug_assert_eq!(other.len(), self.words.len());
        for (w, o) in self.words.iter_mut().zip(other.iter()) {
            *w |= *o;
        }
    }

    pub fn subtract(&mut self, other: &BitSet) {
        debug_assert_eq!(self.nbits, other.nbits);
        self.subtract_words(&other.words);
    }

    /// Remove members that are set in `other` (a word slice of the same
    /// capacity).
    pub fn subtract_words(&mut self, other: &[u64]) {
        debug_assert_eq!(other.len(), self.words.len());
        for (w, o) in self.words.iter_mut().zip(other.iter()) {
            *w &= !*o;
        }
    }

    /// Number of members that are also set in `other`.
    pub fn intersection_count(&self, other: &[u64]) -> usize {
        debug_assert_eq!(other.len(), self.words.len());
        self.words
            .iter()
            .zip(other.iter())
            .map(|(w, o)| (w & o).count_ones() as usize)
            .sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn iter(&self) -> BitIter<'_> {
        BitIter::new(&self.words, self.nbits)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

/// Ascending iterator over set bits of a word slice.
pub struct BitIter<'a> {
    words: &'a [u64],
    current: u64,
    word_idx: usize,
    nbits: usize,
}

impl<'a> BitIter<'a> {
    fn new(words: &'a [u64], nbits: usize) -> Self {
        Self {
            words,
            current: if words.is_empty() { 0 } else { words[0] },
            word_idx: 0,
            nbits,
        }
    }
}

impl Iterator for BitIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                let idx = self.word_idx * WORD_BITS + bit;
                return (idx < self.nbits).then_some(idx);
            }
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
    }
}

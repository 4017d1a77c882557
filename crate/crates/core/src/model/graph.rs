use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A labeled simple graph on `n` vertices.
///
/// Only the strict upper triangle of the adjacency matrix is stored, packed
/// row-major into 64-bit words: pair `(i, j)` with `i < j` lives at bit
/// `i * (2n - i - 1) / 2 + (j - i - 1)`. Bits past the last pair are always
/// zero, so popcounts over the words give the edge count.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: Vec<u64>,
}

/// Number of unordered vertex pairs, `n(n-1)/2`.
#[inline]
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl Graph {
    /// The empty graph on `n` vertices. Panics if `n < 2`.
    pub fn empty(n: usize) -> Self {
        assert!(n >= 2, "a graph needs at least two vertices");
        Graph { n, words: vec![0; pair_count(n).div_ceil(64)] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        let pairs = pair_count(n);
        for (w, word) in g.words.iter_mut().enumerate() {
            let live = (pairs - 64 * w).min(64);
            *word = if live == 64 { u64::MAX } else { (1u64 << live) - 1 };
        }
        g
    }

    /// Builds a graph from 0-based edge pairs. Duplicate pairs are idempotent.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Input(format!("graph needs n >= 2, got {n}")));
        }
        let mut g = Graph::empty(n);
        for (i, j) in edges {
            if i == j || i >= n || j >= n {
                return Err(Error::Input(format!("invalid edge ({i}, {j}) for n = {n}")));
            }
            g.set_edge(i, j, true);
        }
        Ok(g)
    }

    /// Graph whose pair bits are the low `n(n-1)/2` bits of `mask`.
    pub(crate) fn from_mask(n: usize, mask: u64) -> Self {
        let pairs = pair_count(n);
        debug_assert!(pairs <= 64);
        let mut g = Graph::empty(n);
        g.words[0] = if pairs == 64 { mask } else { mask & ((1u64 << pairs) - 1) };
        g
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn pair_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        debug_assert!(i != j && j < self.n);
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let k = self.pair_index(i, j);
        self.words[k / 64] >> (k % 64) & 1 == 1
    }

    #[inline]
    pub fn set_edge(&mut self, i: usize, j: usize, present: bool) {
        let k = self.pair_index(i, j);
        let bit = 1u64 << (k % 64);
        if present {
            self.words[k / 64] |= bit;
        } else {
            self.words[k / 64] &= !bit;
        }
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    /// E(x): the number of edges.
    pub fn edge_count(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn degrees(&self) -> Vec<u64> {
        let mut d = vec![0u64; self.n];
        for (i, j) in self.edges() {
            d[i] += 1;
            d[j] += 1;
        }
        d
    }

    /// T(x): the number of two-stars, `sum_i C(d_i, 2)`.
    pub fn two_star_count(&self) -> u64 {
        self.degrees().iter().map(|&d| d * d.saturating_sub(1) / 2).sum()
    }

    /// Edges as `(i, j)` with `i < j`, in storage order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| self.has_edge(i, j))
    }

    /// Writes the text format: the vertex count on the first line, then one
    /// `i j` line per edge (0-based, `i < j`).
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for (i, j) in self.edges() {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing vertex count".into() })?;
        let n: usize = first
            .trim()
            .parse()
            .map_err(|e| Error::Parse { line: 1, msg: format!("bad vertex count: {e}") })?;
        let mut edges = Vec::new();
        for (idx, line) in lines {
            let mut parts = line.split_whitespace();
            let mut field = || -> Result<usize> {
                parts
                    .next()
                    .ok_or(Error::Parse { line: idx + 1, msg: "expected two vertex labels".into() })?
                    .parse()
                    .map_err(|e| Error::Parse { line: idx + 1, msg: format!("bad vertex label: {e}") })
            };
            let (i, j) = (field()?, field()?);
            if parts.next().is_some() {
                return Err(Error::Parse { line: idx + 1, msg: "trailing fields".into() });
            }
            edges.push((i, j));
        }
        Graph::from_edges(n, edges)
    }
}

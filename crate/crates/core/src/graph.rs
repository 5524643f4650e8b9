//! Connection sets, dense digraphs, permutations and the Cayley construction.
//!
//! Digraphs are stored as bit-packed adjacency rows. Circulants are usually
//! dense, and every algorithm in this crate works on orders where an `n x n`
//! bit matrix is cheap.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A subset `S` of `Z_n \ {0}`, the generator of a circulant.
///
/// The `inverse_closed` flag records whether the set is meant to generate an
/// undirected circulant; it can only be set when `S = -S` actually holds.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConnectionSet {
    n: usize,
    elements: Vec<usize>,
    inverse_closed: bool,
}

impl ConnectionSet {
    /// Builds a directed connection set. Elements are reduced to a sorted,
    /// deduplicated list.
    pub fn new(n: usize, elements: impl IntoIterator<Item = usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConnectionSet(
                "group order must be positive".into(),
            ));
        }
        let mut elements: Vec<usize> = elements.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        for &s in &elements {
            if s == 0 || s >= n {
                return Err(Error::InvalidConnectionSet(format!(
                    "element {s} not in 1..{}",
                    n - 1
                )));
            }
        }
        Ok(Self {
            n,
            elements,
            inverse_closed: false,
        })
    }

    /// Builds an inverse-closed connection set; fails unless `S = -S`.
    pub fn undirected(n: usize, elements: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut set = Self::new(n, elements)?;
        if !set.is_symmetric() {
            return Err(Error::NotInverseClosed);
        }
        set.inverse_closed = true;
        Ok(set)
    }

    /// Builds a set from a membership bitmask over `1..n` (bit `j` is residue `j`).
    pub fn from_mask(n: usize, mask: u64, inverse_closed: bool) -> Result<Self> {
        let elements = (1..n.min(64)).filter(|&j| mask >> j & 1 == 1);
        if inverse_closed {
            Self::undirected(n, elements)
        } else {
            Self::new(n, elements)
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, s: usize) -> bool {
        self.elements.binary_search(&s).is_ok()
    }

    /// Whether the set is flagged as generating an undirected circulant.
    pub fn is_inverse_closed(&self) -> bool {
        self.inverse_closed
    }

    /// Whether `S = -S` holds, regardless of the flag.
    pub fn is_symmetric(&self) -> bool {
        self.elements.iter().all(|&s| self.contains(self.n - s))
    }

    /// Membership bitmask; only meaningful for `n <= 64`.
    pub fn mask(&self) -> u64 {
        self.elements.iter().fold(0u64, |m, &s| m | 1u64 << s)
    }

    /// `-S`. Keeps the inverse-closed flag.
    pub fn negated(&self) -> Self {
        self.scaled(self.n - 1)
    }

    /// `kS = {k s mod n}`. For `gcd(k, n) = 1` this is again a connection set of
    /// the same size.
    pub fn scaled(&self, k: usize) -> Self {
        let n = self.n;
        let mut elements: Vec<usize> = self
            .elements
            .iter()
            .map(|&s| (s * (k % n)) % n)
            .filter(|&s| s != 0)
            .collect();
        elements.sort_unstable();
        elements.dedup();
        Self {
            n,
            elements,
            inverse_closed: self.inverse_closed,
        }
    }

    /// Same elements with the inverse-closed flag cleared.
    pub fn as_directed(&self) -> Self {
        Self {
            inverse_closed: false,
            ..self.clone()
        }
    }

    /// Characteristic vector of `S` on `Z_n`.
    pub fn indicator(&self) -> Vec<bool> {
        let mut v = vec![false; self.n];
        for &s in &self.elements {
            v[s] = true;
        }
        v
    }
}

impl fmt::Display for ConnectionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.n)?;
        if !self.elements.is_empty() {
            write!(f, " ")?;
        }
        for (i, s) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for ConnectionSet {
    type Err = Error;

    /// Parses `"<n>: s1,s2,...,sk"`. The result is flagged inverse-closed
    /// exactly when the parsed set satisfies `S = -S`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, tail) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing ':' in {s:?}")))?;
        let n: usize = head
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad order {head:?}")))?;
        let mut elements = Vec::new();
        for tok in tail.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            elements.push(
                tok.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad element {tok:?}")))?,
            );
        }
        let set = Self::new(n, elements)?;
        if set.is_symmetric() && !set.is_empty() {
            Ok(Self {
                inverse_closed: true,
                ..set
            })
        } else {
            Ok(set)
        }
    }
}

/// A bijection of `{0..n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

/// A vertex labeling `λ`: vertex `v` receives label `λ(v)`.
pub type Labeling = Permutation;

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::NotBijection(n));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    /// `x -> x + a mod n`.
    pub fn rotation(n: usize, a: usize) -> Self {
        Self {
            images: (0..n).map(|x| (x + a) % n).collect(),
        }
    }

    /// `x -> k x mod n`; a bijection only when `gcd(k, n) = 1`.
    pub fn multiplier(n: usize, k: usize) -> Result<Self> {
        Self::new((0..n).map(|x| (x * k) % n).collect())
    }

    /// `x -> -x mod n`.
    pub fn reflection(n: usize) -> Self {
        Self {
            images: (0..n).map(|x| (n - x) % n).collect(),
        }
    }

    /// The cyclic permutation `(x_0 x_1 ... x_{n-1})` mapping each `x_i` to `x_{i+1}`.
    pub fn from_cycle(cycle: &[usize]) -> Result<Self> {
        let n = cycle.len();
        let mut images = vec![usize::MAX; n];
        for i in 0..n {
            let v = cycle[i];
            if v >= n || images[v] != usize::MAX {
                return Err(Error::NotBijection(n));
            }
            images[v] = cycle[(i + 1) % n];
        }
        Ok(Self { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y] = x;
        }
        Self { images: inv }
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Whether the permutation is a single cycle through all points.
    pub fn is_full_cycle(&self) -> bool {
        let n = self.images.len();
        if n == 0 {
            return false;
        }
        let mut x = 0;
        for step in 1..=n {
            x = self.images[x];
            if x == 0 {
                return step == n;
            }
        }
        false
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

const WORD: usize = 64;

/// A loopless digraph on `{0..n-1}` with bit-packed adjacency rows.
/// Row `u` is the out-neighborhood `N(u)`; a graph is a symmetric digraph.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Digraph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(WORD).max(1);
        Self {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    /// Builds a digraph from an arc list; loops and out-of-range endpoints are rejected.
    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(n);
        for (u, v) in arcs {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::InvalidInput(format!("loop at vertex {u}")));
            }
            g.set(u, v);
        }
        Ok(g)
    }

    /// Builds a graph from an edge list, adding both orientations of each edge.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::from_arcs(n, edges.into_iter().flat_map(|(u, v)| [(u, v), (v, u)]))
    }

    /// Builds a digraph from a boolean adjacency predicate. The diagonal is ignored.
    pub fn from_fn(n: usize, mut adj: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in 0..n {
                if u != v && adj(u, v) {
                    g.set(u, v);
                }
            }
        }
        g
    }

    fn set(&mut self, u: usize, v: usize) {
        self.bits[u * self.words + v / WORD] |= 1u64 << (v % WORD);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words + v / WORD] >> (v % WORD) & 1 == 1
    }

    /// Packed row `u`, least significant bit first.
    pub fn row(&self, u: usize) -> &[u64] {
        &self.bits[u * self.words..(u + 1) * self.words]
    }

    pub fn out_neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(u).iter().enumerate().flat_map(|(wi, &w)| BitIter {
            word: w,
            base: wi * WORD,
        })
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn arc_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// The digraph with every arc reversed.
    pub fn transpose(&self) -> Self {
        let mut t = Self::empty(self.n);
        for u in 0..self.n {
            for v in self.out_neighbors(u) {
                t.set(v, u);
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|u| self.out_neighbors(u).all(|v| self.has_arc(v, u)))
    }

    /// Arc list in row-major order.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| self.out_neighbors(u).map(move |v| (u, v)))
            .collect()
    }

    /// Lexicographic comparison of the row-major adjacency matrices.
    pub fn cmp_row_major(&self, other: &Self) -> Ordering {
        if self.n != other.n {
            return self.n.cmp(&other.n);
        }
        for (a, b) in self.bits.iter().zip(&other.bits) {
            let diff = a ^ b;
            if diff != 0 {
                // The first differing column holds a 0 in the smaller matrix.
                let bit = diff.trailing_zeros();
                return if a >> bit & 1 == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        Ordering::Equal
    }

    /// Row-major adjacency bits packed most significant bit first, zero padded
    /// at the end to a whole byte.
    pub fn row_major_bytes(&self) -> Vec<u8> {
        let total = self.n * self.n;
        let mut out = vec![0u8; total.div_ceil(8)];
        let mut k = 0;
        for u in 0..self.n {
            for v in 0..self.n {
                if self.has_arc(u, v) {
                    out[k / 8] |= 0x80 >> (k % 8);
                }
                k += 1;
            }
        }
        out
    }

    /// If every row is the cyclic shift of row 0 (a literal Cayley digraph of
    /// `Z_n`), returns the connection set `N(0)`.
    pub fn circulant_connection_set(&self) -> Option<ConnectionSet> {
        let n = self.n;
        if n == 0 {
            return None;
        }
        let s: Vec<usize> = self.out_neighbors(0).collect();
        for u in 1..n {
            if self.out_degree(u) != s.len() || s.iter().any(|&j| !self.has_arc(u, (u + j) % n)) {
                return None;
            }
        }
        let set = ConnectionSet::new(n, s).ok()?;
        if set.is_symmetric() && !set.is_empty() {
            ConnectionSet::undirected(n, set.elements().iter().copied()).ok()
        } else {
            Some(set)
        }
    }

    /// Renders the text format: `n <n> directed|undirected` followed by one
    /// `u v` line per arc (per edge with `u < v` when undirected).
    pub fn to_text(&self) -> String {
        let undirected = self.is_symmetric();
        let mut out = format!(
            "n {} {}\n",
            self.n,
            if undirected { "undirected" } else { "directed" }
        );
        for (u, v) in self.arcs() {
            if !undirected || u < v {
                out.push_str(&format!("{u} {v}\n"));
            }
        }
        out
    }

    /// Parses the text format written by [`Digraph::to_text`]. Blank lines and
    /// lines starting with `#` are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 3 || parts[0] != "n" {
            return Err(Error::Parse(format!("bad header {header:?}")));
        }
        let n: usize = parts[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad order {:?}", parts[1])))?;
        let undirected = match parts[2] {
            "directed" => false,
            "undirected" => true,
            other => return Err(Error::Parse(format!("bad kind {other:?}"))),
        };
        let mut arcs = Vec::new();
        for line in lines {
            let mut it = line.split_whitespace().map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad edge line {line:?}")))
            });
            let (Some(u), Some(v), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::Parse(format!("bad edge line {line:?}")));
            };
            arcs.push((u?, v?));
        }
        if undirected {
            Self::from_edges(n, arcs)
        } else {
            Self::from_arcs(n, arcs)
        }
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Digraph(n={})", self.n)?;
        for u in 0..self.n {
            let row: String = (0..self.n)
                .map(|v| if self.has_arc(u, v) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

struct BitIter {
    word: u64,
    base: usize,
}

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.word == 0 {
            return None;
        }
        let bit = self.word.trailing_zeros() as usize;
        self.word &= self.word - 1;
        Some(self.base + bit)
    }
}

/// `cay(Z_n, S)`: arc `(x, y)` iff `y - x mod n` lies in `S`.
pub fn cayley(s: &ConnectionSet) -> Digraph {
    let n = s.n();
    let mut g = Digraph::empty(n);
    for x in 0..n {
        for &j in s.elements() {
            g.set(x, (x + j) % n);
        }
    }
    g
}

/// The relabeled digraph `X^λ`: arc `(λ(u), λ(v))` iff `(u, v)` is an arc of `x`.
pub fn relabel(x: &Digraph, labeling: &Labeling) -> Result<Digraph> {
    if labeling.len() != x.n() {
        return Err(Error::SizeMismatch {
            expected: x.n(),
            actual: labeling.len(),
        });
    }
    let mut g = Digraph::empty(x.n());
    for u in 0..x.n() {
        let lu = labeling.apply(u);
        for v in x.out_neighbors(u) {
            g.set(lu, labeling.apply(v));
        }
    }
    Ok(g)
}

/// Whether `π` maps `x` onto `y` arc for arc.
pub fn is_isomorphism(x: &Digraph, y: &Digraph, pi: &Permutation) -> bool {
    if x.n() != y.n() || pi.len() != x.n() || x.arc_count() != y.arc_count() {
        return false;
    }
    (0..x.n()).all(|u| {
        let pu = pi.apply(u);
        x.out_degree(u) == y.out_degree(pu)
            && x.out_neighbors(u).all(|v| y.has_arc(pu, pi.apply(v)))
    })
}

/// Greatest common divisor on machine integers.
pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Euler's totient.
pub fn euler_phi(n: usize) -> usize {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// The multiplicative group `Z_n^×` in ascending order.
pub fn units(n: usize) -> Vec<usize> {
    if n == 1 {
        return vec![0];
    }
    (1..n).filter(|&k| gcd(k, n) == 1).collect()
}

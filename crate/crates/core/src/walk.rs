//! Walk matrices `W_T`: entry `(x, k)` counts the walks of length `k` from
//! `x` into the terminal set `T`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{cayley, ConnectionSet, Digraph};
use crate::oracle::first_occurrence_ids;
use crate::spectral::saturation_bound;

/// An `n × n` matrix of exact walk counts, stored row-major. Column `k` is
/// `A^k χ_T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkMatrix {
    n: usize,
    terminal: Vec<usize>,
    entries: Vec<BigInt>,
}

impl WalkMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terminal(&self) -> &[usize] {
        &self.terminal
    }

    pub fn entry(&self, x: usize, k: usize) -> &BigInt {
        &self.entries[x * self.n + k]
    }

    /// `W_T(x)`, the walk counts of lengths `0..n` starting at `x`.
    pub fn row(&self, x: usize) -> &[BigInt] {
        &self.entries[x * self.n..(x + 1) * self.n]
    }

    pub fn column(&self, k: usize) -> Vec<BigInt> {
        (0..self.n).map(|x| self.entry(x, k).clone()).collect()
    }

    /// `W_u` of a circulant from its `W_0`, via `W_u(x) = W_0(x - u)`. Only
    /// meaningful when the matrix is `W_0` of a circulant.
    pub fn shift(&self, u: usize) -> Self {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for x in 0..n {
            entries.extend_from_slice(self.row((x + n - u % n) % n));
        }
        let mut terminal: Vec<usize> = self.terminal.iter().map(|&t| (t + u) % n).collect();
        terminal.sort_unstable();
        Self {
            n,
            terminal,
            entries,
        }
    }

    /// Row class ids: equal rows share an id, ids ordered by first occurrence.
    pub fn row_classes(&self) -> Vec<u32> {
        let n = self.n;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.cmp_rows(a, b));
        let mut sorted_ids = vec![0u32; n];
        let mut id = 0u32;
        for i in 1..n {
            if self.cmp_rows(order[i - 1], order[i]) != Ordering::Equal {
                id += 1;
            }
            sorted_ids[order[i]] = id;
        }
        first_occurrence_ids(&sorted_ids)
    }

    pub fn distinct_row_count(&self) -> usize {
        self.row_classes()
            .iter()
            .map(|&c| c as usize + 1)
            .max()
            .unwrap_or(0)
    }

    fn cmp_rows(&self, a: usize, b: usize) -> Ordering {
        self.row(a).cmp(self.row(b))
    }
}

/// Builds `W_T` column by column: column `k + 1` is `A` times column `k`.
pub fn walk_matrix(g: &Digraph, terminal: &[usize]) -> Result<WalkMatrix> {
    let n = g.n();
    let mut chi = vec![BigInt::zero(); n];
    for &t in terminal {
        if t >= n {
            return Err(Error::VertexOutOfRange { vertex: t, n });
        }
        chi[t] = BigInt::one();
    }
    let neighbors: Vec<Vec<usize>> = (0..n).map(|x| g.out_neighbors(x).collect()).collect();
    let mut entries = vec![BigInt::zero(); n * n];
    let mut col = chi;
    for k in 0..n {
        for x in 0..n {
            entries[x * n + k] = col[x].clone();
        }
        if k + 1 < n {
            col = neighbors
                .iter()
                .map(|nx| nx.iter().fold(BigInt::zero(), |acc, &y| acc + &col[y]))
                .collect();
        }
    }
    let mut terminal = terminal.to_vec();
    terminal.sort_unstable();
    terminal.dedup();
    Ok(WalkMatrix {
        n,
        terminal,
        entries,
    })
}

/// Row classes of `W_T` without keeping the exact matrix around: rows are
/// first compared modulo a large prime, and only rows that agree there are
/// compared exactly. Different residues prove different rows, so the result
/// equals `walk_matrix(g, terminal)?.row_classes()`.
pub fn walk_row_classes(g: &Digraph, terminal: &[usize]) -> Result<Vec<u32>> {
    const P: u64 = (1 << 61) - 1;
    let n = g.n();
    let mut col = vec![0u64; n];
    for &t in terminal {
        if t >= n {
            return Err(Error::VertexOutOfRange { vertex: t, n });
        }
        col[t] = 1;
    }
    let neighbors: Vec<Vec<usize>> = (0..n).map(|x| g.out_neighbors(x).collect()).collect();
    let mut rows = vec![0u64; n * n];
    for k in 0..n {
        for x in 0..n {
            rows[x * n + k] = col[x];
        }
        if k + 1 < n {
            col = neighbors
                .iter()
                .map(|nx| nx.iter().fold(0u64, |acc, &y| (acc + col[y]) % P))
                .collect();
        }
    }
    let row = |x: usize| &rows[x * n..(x + 1) * n];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| row(a).cmp(row(b)));
    let mut ids = vec![0u32; n];
    let mut id = 0u32;
    let mut ambiguous = false;
    for i in 1..n {
        if row(order[i - 1]) != row(order[i]) {
            id += 1;
        } else {
            ambiguous = true;
        }
        ids[order[i]] = id;
    }
    if !ambiguous {
        return Ok(first_occurrence_ids(&ids));
    }
    let exact = walk_matrix(g, terminal)?;
    let refined: Vec<(u32, u32)> = ids.iter().copied().zip(exact.row_classes()).collect();
    Ok(first_occurrence_ids(&refined))
}

/// All rows of `W_t` pairwise distinct.
pub fn is_walk_discrete(g: &Digraph, t: usize) -> Result<bool> {
    let classes = walk_row_classes(g, &[t])?;
    Ok(classes.iter().map(|&c| c as usize + 1).max().unwrap_or(0) == g.n())
}

/// `W_0` of `cay(S)` has the maximal `⌈(n+1)/2⌉` distinct rows. Requires `S = -S`.
pub fn is_walk_saturated(s: &ConnectionSet) -> Result<bool> {
    if !s.is_symmetric() {
        return Err(Error::NotInverseClosed);
    }
    let classes = walk_row_classes(&cayley(s), &[0])?;
    let distinct = classes.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    Ok(distinct == saturation_bound(s.n()))
}

/// Rank over `Q` by fraction-free (Bareiss) elimination. Duplicate rows are
/// dropped first since they never change the rank.
pub fn walk_rank(w: &WalkMatrix) -> usize {
    let classes = w.row_classes();
    let mut seen = vec![false; classes.len()];
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for (x, &c) in classes.iter().enumerate() {
        if !std::mem::replace(&mut seen[c as usize], true) {
            rows.push(w.row(x).to_vec());
        }
    }
    bareiss_rank(rows)
}

/// Rank of an integer matrix given as rows. Columns without a pivot are
/// skipped; every division is exact.
pub fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let m = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == m {
            break;
        }
        let Some(p) = (rank..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let (top, rest) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pivot = &pivot_row[col];
        for row in rest.iter_mut() {
            let factor = std::mem::take(&mut row[col]);
            for j in col + 1..cols {
                let v = pivot * &row[j] - &factor * &pivot_row[j];
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = pivot.clone();
        rank += 1;
    }
    rank
}

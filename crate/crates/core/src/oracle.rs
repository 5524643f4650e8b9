//! Exhaustive and backtracking ground-truth oracles for small orders:
//! isomorphism search, automorphism groups and the lexicographically least
//! adjacency matrix.
//!
//! The searches branch over color-refined candidate classes. Pruning only
//! discards branches whose refined colorings already disagree, so the results
//! do not depend on it.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::graph::{is_isomorphism, Digraph, Permutation};
use crate::refinement::{color_refinement_with, CellEngine, Coloring};

/// Size limits for the exhaustive oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest order accepted by [`brute_canonical_form`].
    pub canon_bound: usize,
    /// Largest order accepted by the automorphism oracles.
    pub aut_bound: usize,
    /// Largest group that [`brute_automorphisms`] will list element by element.
    pub max_elements: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            canon_bound: 10,
            aut_bound: 12,
            max_elements: 1 << 22,
        }
    }
}

impl OracleConfig {
    /// Same limits with both order bounds set to `bound`.
    pub fn with_bound(bound: usize) -> Self {
        Self {
            canon_bound: bound,
            aut_bound: bound,
            ..Self::default()
        }
    }

    fn check_aut(&self, n: usize) -> Result<()> {
        if n > self.aut_bound {
            return Err(Error::OracleBound {
                n,
                bound: self.aut_bound,
            });
        }
        Ok(())
    }
}

fn refine(g: &Digraph, individualized: &[usize]) -> Coloring {
    color_refinement_with(&CellEngine, g, individualized)
        .expect("individualized vertices are valid")
}

/// Searches for an isomorphism `x -> y` mapping `xs[i]` to `ys[i]` for all `i`.
fn extend(
    x: &Digraph,
    y: &Digraph,
    xs: &mut Vec<usize>,
    ys: &mut Vec<usize>,
) -> Option<Permutation> {
    let cx = refine(x, xs);
    let cy = refine(y, ys);
    if cx.class_sizes() != cy.class_sizes() {
        return None;
    }
    if cx.is_discrete() {
        let mut by_color = vec![0; y.n()];
        for v in 0..y.n() {
            by_color[cy.color(v) as usize] = v;
        }
        let pi = Permutation::new((0..x.n()).map(|v| by_color[cx.color(v) as usize]).collect())
            .expect("discrete colorings give a bijection");
        return is_isomorphism(x, y, &pi).then_some(pi);
    }
    let sizes = cx.class_sizes();
    let target = sizes.iter().position(|&s| s > 1).unwrap() as u32;
    let v = (0..x.n()).find(|&v| cx.color(v) == target).unwrap();
    let candidates: Vec<usize> = (0..y.n()).filter(|&w| cy.color(w) == target).collect();
    for w in candidates {
        xs.push(v);
        ys.push(w);
        let found = extend(x, y, xs, ys);
        xs.pop();
        ys.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

/// An isomorphism `x -> y`, if one exists.
pub fn find_isomorphism(x: &Digraph, y: &Digraph) -> Option<Permutation> {
    if x.n() != y.n() || x.arc_count() != y.arc_count() {
        return None;
    }
    extend(x, y, &mut Vec::new(), &mut Vec::new())
}

/// The automorphism group given by a generating set and its order.
#[derive(Debug, Clone)]
pub struct AutomorphismGroup {
    pub n: usize,
    pub generators: Vec<Permutation>,
    pub order: BigUint,
}

impl AutomorphismGroup {
    /// Orbits of the group on vertices, each sorted, listed by least element.
    pub fn vertex_orbits(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.n);
        for g in &self.generators {
            for v in 0..self.n {
                uf.union(v, g.apply(v));
            }
        }
        uf.groups()
    }

    /// All group elements, in ascending order of their image arrays.
    pub fn elements(&self, max_elements: usize) -> Result<Vec<Permutation>> {
        if self.order > BigUint::from(max_elements) {
            return Err(Error::EnumerationBound(format!(
                "group of order {} exceeds {max_elements} elements",
                self.order
            )));
        }
        let id = Permutation::identity(self.n);
        let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(p) = queue.pop_front() {
            for g in &self.generators {
                let q = g.compose(&p);
                if seen.insert(q.clone()) {
                    queue.push_back(q);
                }
            }
        }
        let mut all: Vec<Permutation> = seen.into_iter().collect();
        all.sort();
        Ok(all)
    }
}

/// Computes `Aut(x)` along a stabilizer chain: at each level the orbit of the
/// first vertex of the least non-singleton cell is found by search, and the
/// group order is the product of the orbit lengths.
pub fn automorphism_group(x: &Digraph, config: &OracleConfig) -> Result<AutomorphismGroup> {
    config.check_aut(x.n())?;
    let mut generators = Vec::new();
    let order = stabilizer_order(x, &mut Vec::new(), &mut generators);
    Ok(AutomorphismGroup {
        n: x.n(),
        generators,
        order,
    })
}

fn stabilizer_order(x: &Digraph, fixed: &mut Vec<usize>, gens: &mut Vec<Permutation>) -> BigUint {
    let c = refine(x, fixed);
    if c.is_discrete() {
        return BigUint::one();
    }
    let target = c.class_sizes().iter().position(|&s| s > 1).unwrap() as u32;
    let cell: Vec<usize> = (0..x.n()).filter(|&v| c.color(v) == target).collect();
    let v = cell[0];

    fixed.push(v);
    let below = stabilizer_order(x, fixed, gens);
    fixed.pop();

    // Every generator collected so far fixes `fixed` pointwise.
    let mut uf = UnionFind::new(x.n());
    let absorb = |uf: &mut UnionFind, g: &Permutation| {
        for u in 0..x.n() {
            uf.union(u, g.apply(u));
        }
    };
    for g in gens.iter() {
        absorb(&mut uf, g);
    }
    for &w in &cell[1..] {
        if uf.find(w) == uf.find(v) {
            continue;
        }
        let mut xs = fixed.clone();
        let mut ys = fixed.clone();
        xs.push(v);
        ys.push(w);
        if let Some(g) = extend(x, x, &mut xs, &mut ys) {
            absorb(&mut uf, &g);
            gens.push(g);
        }
    }
    let root = uf.find(v);
    let orbit = (0..x.n()).filter(|&u| uf.find(u) == root).count();
    below * BigUint::from(orbit)
}

/// `|Aut(x)|`.
pub fn automorphism_count(x: &Digraph, config: &OracleConfig) -> Result<BigUint> {
    Ok(automorphism_group(x, config)?.order)
}

/// The full automorphism group, listed element by element.
pub fn brute_automorphisms(x: &Digraph, config: &OracleConfig) -> Result<Vec<Permutation>> {
    automorphism_group(x, config)?.elements(config.max_elements)
}

/// The isomorphic copy of `x` with the lexicographically least row-major
/// adjacency matrix, found by exhaustive search over vertex orders.
pub fn brute_canonical_form(x: &Digraph, config: &OracleConfig) -> Result<Digraph> {
    let n = x.n();
    if n > config.canon_bound {
        return Err(Error::OracleBound {
            n,
            bound: config.canon_bound,
        });
    }
    let mut search = LexSearch {
        x,
        placed: Vec::with_capacity(n),
        used: vec![false; n],
        best: None,
    };
    search.run();
    let order = search.best.expect("at least one vertex order exists");
    let mut labels = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        labels[v] = i;
    }
    crate::graph::relabel(x, &Permutation::new(labels)?)
}

struct LexSearch<'a> {
    x: &'a Digraph,
    /// `placed[i]` is the vertex that receives label `i`.
    placed: Vec<usize>,
    used: Vec<bool>,
    best: Option<Vec<usize>>,
}

impl LexSearch<'_> {
    fn entry(&self, order: &[usize], i: usize, j: usize) -> bool {
        i != j && self.x.has_arc(order[i], order[j])
    }

    /// Compares the known prefix of row 0 against the incumbent.
    fn prefix_cmp(&self) -> Ordering {
        let Some(best) = &self.best else {
            return Ordering::Less;
        };
        for j in 1..self.placed.len() {
            match self.entry(&self.placed, 0, j).cmp(&self.entry(best, 0, j)) {
                Ordering::Equal => {}
                other => return other,
            }
        }
        Ordering::Equal
    }

    fn full_cmp(&self) -> Ordering {
        let Some(best) = &self.best else {
            return Ordering::Less;
        };
        let n = self.placed.len();
        for i in 0..n {
            for j in 0..n {
                match self.entry(&self.placed, i, j).cmp(&self.entry(best, i, j)) {
                    Ordering::Equal => {}
                    other => return other,
                }
            }
        }
        Ordering::Equal
    }

    fn run(&mut self) {
        let n = self.x.n();
        if self.placed.len() == n {
            if self.full_cmp() == Ordering::Less {
                self.best = Some(self.placed.clone());
            }
            return;
        }
        for v in 0..n {
            if self.used[v] {
                continue;
            }
            self.placed.push(v);
            self.used[v] = true;
            if self.prefix_cmp() != Ordering::Greater {
                self.run();
            }
            self.used[v] = false;
            self.placed.pop();
        }
    }
}

/// Orbits of a set of permutations acting on ordered pairs, as a class id per
/// pair `(u, v)` at index `u * n + v`. Ids are numbered by first occurrence in
/// row-major order.
pub fn pair_orbits(n: usize, perms: &[Permutation]) -> Vec<u32> {
    let mut uf = UnionFind::new(n * n);
    for g in perms {
        for u in 0..n {
            for v in 0..n {
                uf.union(u * n + v, g.apply(u) * n + g.apply(v));
            }
        }
    }
    first_occurrence_ids(&(0..n * n).map(|p| uf.find(p)).collect::<Vec<_>>())
}

/// Renames arbitrary labels to `0, 1, 2, ...` in order of first occurrence.
pub fn first_occurrence_ids<T: Ord + Copy>(labels: &[T]) -> Vec<u32> {
    let mut seen = std::collections::BTreeMap::new();
    labels
        .iter()
        .map(|l| {
            let next = seen.len() as u32;
            *seen.entry(*l).or_insert(next)
        })
        .collect()
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    pub(crate) fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for v in 0..n {
            let r = self.find(v);
            by_root.entry(r).or_default().push(v);
        }
        by_root.into_values().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cayley, relabel, ConnectionSet};

    fn cay(n: usize, s: &[usize]) -> Digraph {
        cayley(&ConnectionSet::new(n, s.iter().copied()).unwrap())
    }

    #[test]
    fn automorphism_examples() {
        let cfg = OracleConfig::default();
        for n in 3..=9 {
            let auts = brute_automorphisms(&cay(n, &[1]), &cfg).unwrap();
            assert_eq!(auts.len(), n);
            assert!(auts
                .iter()
                .all(|p| is_isomorphism(&cay(n, &[1]), &cay(n, &[1]), p)));
        }
        assert_eq!(
            brute_automorphisms(&cay(5, &[1, 4]), &cfg).unwrap().len(),
            10
        );
        assert_eq!(
            brute_automorphisms(&cay(3, &[1, 2]), &cfg).unwrap().len(),
            6
        );
        assert_eq!(
            automorphism_count(&cay(12, &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11]), &cfg).unwrap(),
            BigUint::from(479_001_600u64)
        );
        assert!(matches!(
            brute_automorphisms(&cay(13, &[1]), &cfg),
            Err(Error::OracleBound { n: 13, bound: 12 })
        ));
        assert!(matches!(
            brute_automorphisms(&Digraph::empty(12), &cfg),
            Err(Error::EnumerationBound(_))
        ));
    }

    #[test]
    fn automorphisms_match_exhaustive_enumeration() {
        // Every permutation of up to 6 points, checked directly.
        fn all_perms(n: usize) -> Vec<Permutation> {
            fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
                if cur.len() == used.len() {
                    out.push(Permutation::new(cur.clone()).unwrap());
                    return;
                }
                for v in 0..used.len() {
                    if !used[v] {
                        used[v] = true;
                        cur.push(v);
                        rec(cur, used, out);
                        cur.pop();
                        used[v] = false;
                    }
                }
            }
            let mut out = Vec::new();
            rec(&mut Vec::new(), &mut vec![false; n], &mut out);
            out
        }
        let cfg = OracleConfig::default();
        for n in 1..=6usize {
            let perms = all_perms(n);
            for mask in 0u64..(1 << (n - 1)) {
                let x = cayley(&ConnectionSet::from_mask(n, mask << 1, false).unwrap());
                let expected: Vec<Permutation> = perms
                    .iter()
                    .filter(|p| is_isomorphism(&x, &x, p))
                    .cloned()
                    .collect();
                assert_eq!(
                    brute_automorphisms(&x, &cfg).unwrap(),
                    expected,
                    "n={n} mask={mask}"
                );
            }
        }
        // A non-vertex-transitive digraph.
        let g = Digraph::from_arcs(5, [(0, 1), (1, 2), (2, 0), (3, 4), (0, 3)]).unwrap();
        let expected: Vec<Permutation> = all_perms(5)
            .into_iter()
            .filter(|p| is_isomorphism(&g, &g, p))
            .collect();
        assert_eq!(brute_automorphisms(&g, &cfg).unwrap(), expected);
    }

    #[test]
    fn isomorphism_search() {
        let a = cay(5, &[1, 4]);
        let b = cay(5, &[2, 3]);
        let pi = find_isomorphism(&a, &b).unwrap();
        assert!(is_isomorphism(&a, &b, &pi));
        assert!(find_isomorphism(&cay(4, &[1]), &cay(4, &[1, 2])).is_none());
        assert!(find_isomorphism(&cay(6, &[1, 5]), &cay(6, &[2, 4])).is_none());
    }

    #[test]
    fn canonical_form_examples() {
        let cfg = OracleConfig::default();
        let c4 = cay(4, &[1]);
        let form = brute_canonical_form(&c4, &cfg).unwrap();
        let mut images: Vec<usize> = (0..4).collect();
        // All 24 labelings of the directed 4-cycle.
        for _ in 0..24 {
            let p = Permutation::new(images.clone()).unwrap();
            assert_eq!(
                brute_canonical_form(&relabel(&c4, &p).unwrap(), &cfg).unwrap(),
                form
            );
            next_permutation(&mut images);
        }
        assert_eq!(
            brute_canonical_form(&cay(5, &[1, 4]), &cfg).unwrap(),
            brute_canonical_form(&cay(5, &[2, 3]), &cfg).unwrap()
        );
        assert_ne!(
            brute_canonical_form(&cay(4, &[1]), &cfg).unwrap(),
            brute_canonical_form(&cay(4, &[1, 2]), &cfg).unwrap()
        );
        assert!(brute_canonical_form(&cay(11, &[1]), &cfg).is_err());
    }

    fn next_permutation(v: &mut [usize]) -> bool {
        let n = v.len();
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| v[i] < v[i + 1]) else {
            v.reverse();
            return false;
        };
        let j = (i + 1..n).rev().find(|&j| v[j] > v[i]).unwrap();
        v.swap(i, j);
        v[i + 1..].reverse();
        true
    }

    #[test]
    fn canonical_form_is_lexicographically_least() {
        let cfg = OracleConfig::default();
        let g = Digraph::from_arcs(5, [(0, 1), (1, 2), (3, 1), (4, 0), (2, 4)]).unwrap();
        let form = brute_canonical_form(&g, &cfg).unwrap();
        let mut images: Vec<usize> = (0..5).collect();
        loop {
            let other = relabel(&g, &Permutation::new(images.clone()).unwrap()).unwrap();
            assert_ne!(other.cmp_row_major(&form), Ordering::Less);
            if !next_permutation(&mut images) {
                break;
            }
        }
    }

    #[test]
    fn pair_orbit_ids() {
        let rot: Vec<Permutation> = (0..4).map(|a| Permutation::rotation(4, a)).collect();
        let ids = pair_orbits(4, &rot);
        assert_eq!(ids.iter().max(), Some(&3));
        assert_eq!(ids[0], ids[5]);
        assert_eq!(first_occurrence_ids(&[7, 3, 7, 1]), vec![0, 1, 0, 2]);
    }
}

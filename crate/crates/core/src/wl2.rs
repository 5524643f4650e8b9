//! 2-dimensional Weisfeiler-Leman refinement, orbital partitions, and the
//! canonical Cayley representation algorithm.

use crate::canon::{CanonResult, Canonizer, GiveUp};
use crate::error::{Error, Result};
use crate::graph::{is_isomorphism, relabel, Digraph, Permutation};
use crate::oracle::{automorphism_group, first_occurrence_ids, pair_orbits, OracleConfig};

/// A color for every ordered pair `(u, v)`, stored at `u * n + v`. Ids are
/// contiguous from 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairColoring {
    n: usize,
    colors: Vec<u32>,
    round: usize,
    stable: bool,
}

impl PairColoring {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color(&self, u: usize, v: usize) -> u32 {
        self.colors[u * self.n + v]
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn is_stable(&self) -> bool {
        self.stable
    }

    pub fn class_count(&self) -> usize {
        self.colors
            .iter()
            .map(|&c| c as usize + 1)
            .max()
            .unwrap_or(0)
    }

    /// Pairs of each class, indexed by color id.
    pub fn classes(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.class_count()];
        for (p, &c) in self.colors.iter().enumerate() {
            out[c as usize].push((p / self.n, p % self.n));
        }
        out
    }

    /// Class ids renamed by first occurrence, for comparing partitions.
    pub fn partition(&self) -> Vec<u32> {
        first_occurrence_ids(&self.colors)
    }
}

fn pair_type(x: &Digraph, u: usize, v: usize) -> u32 {
    if u == v {
        0
    } else if x.has_arc(u, v) {
        1
    } else {
        2
    }
}

/// `c⁰(uv) = (type(uv), type(vu))` with types loop < arc < nonarc, renamed in
/// sorted order.
pub fn wl2_initial(x: &Digraph) -> PairColoring {
    let n = x.n();
    let raw: Vec<u32> = (0..n * n)
        .map(|p| {
            let (u, v) = (p / n, p % n);
            pair_type(x, u, v) * 3 + pair_type(x, v, u)
        })
        .collect();
    let mut distinct = raw.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let colors = raw
        .iter()
        .map(|c| distinct.binary_search(c).unwrap() as u32)
        .collect();
    PairColoring {
        n,
        colors,
        round: 0,
        stable: false,
    }
}

/// One round: the new color of `uv` is `c(uv)` followed by the sorted
/// multiset of `(c(uw), c(wv))` over all `w`. Classes are renamed by sorting
/// on that key.
pub fn wl2_round(pc: &PairColoring) -> PairColoring {
    let n = pc.n;
    let c = &pc.colors;
    let mut flat = vec![0u64; n * n * n];
    for u in 0..n {
        for v in 0..n {
            let sig = &mut flat[(u * n + v) * n..(u * n + v + 1) * n];
            for (w, slot) in sig.iter_mut().enumerate() {
                *slot = (c[u * n + w] as u64) << 32 | c[w * n + v] as u64;
            }
            sig.sort_unstable();
        }
    }
    let sig = |p: usize| &flat[p * n..(p + 1) * n];
    let mut order: Vec<usize> = (0..n * n).collect();
    order.sort_unstable_by(|&a, &b| c[a].cmp(&c[b]).then_with(|| sig(a).cmp(sig(b))));
    let mut colors = vec![0u32; n * n];
    let mut id = 0u32;
    for i in 1..order.len() {
        let (a, b) = (order[i - 1], order[i]);
        if c[a] != c[b] || sig(a) != sig(b) {
            id += 1;
        }
        colors[b] = id;
    }
    let count = if n == 0 { 0 } else { id as usize + 1 };
    PairColoring {
        n,
        colors,
        round: pc.round + 1,
        stable: count == pc.class_count(),
    }
}

/// All colorings `c⁰, c¹, …` up to and including the first stable one.
pub fn wl2_rounds(x: &Digraph) -> Vec<PairColoring> {
    let mut current = wl2_initial(x);
    let mut out = Vec::new();
    loop {
        let next = wl2_round(&current);
        if next.stable {
            current.stable = true;
            out.push(current);
            return out;
        }
        out.push(current);
        current = next;
    }
}

/// The stable partition `WL(X)`.
pub fn wl2_stable(x: &Digraph) -> PairColoring {
    let mut current = wl2_initial(x);
    loop {
        let next = wl2_round(&current);
        if next.stable {
            current.stable = true;
            return current;
        }
        current = next;
    }
}

/// The partition of `V²` into orbitals of `Aut(X)`, ids by first occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitalPartition {
    pub n: usize,
    pub parts: Vec<u32>,
}

impl OrbitalPartition {
    pub fn count(&self) -> usize {
        self.parts
            .iter()
            .map(|&c| c as usize + 1)
            .max()
            .unwrap_or(0)
    }
}

pub fn orbital_partition(x: &Digraph, config: &OracleConfig) -> Result<OrbitalPartition> {
    let group = automorphism_group(x, config)?;
    Ok(OrbitalPartition {
        n: x.n(),
        parts: pair_orbits(x.n(), &group.generators),
    })
}

/// `WL(X)` equals the orbital partition.
pub fn is_schurian(x: &Digraph, config: &OracleConfig) -> Result<bool> {
    Ok(wl2_stable(x).partition() == orbital_partition(x, config)?.parts)
}

/// A color class that, viewed as a digraph, is a single `n`-cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleClass {
    pub color: u32,
    /// Directed cycle (`n` pairs) or undirected cycle (`2n` symmetric pairs).
    pub directed: bool,
    /// The vertices in cycle order starting at 0. For undirected classes the
    /// traversal leaves 0 towards its smaller neighbor.
    pub cycle: Vec<usize>,
    /// The cyclic permutation(s) `x_i -> x_{i+1}`; two mutually inverse ones
    /// for undirected classes.
    pub permutations: Vec<Permutation>,
}

/// Every class of `pc` that is a directed or undirected `n`-cycle, by color id.
pub fn cycle_classes(pc: &PairColoring) -> Vec<CycleClass> {
    let n = pc.n;
    let mut out = Vec::new();
    for (color, pairs) in pc.classes().into_iter().enumerate() {
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(u, v) in &pairs {
            succ[u].push(v);
        }
        let directed = pairs.len() == n && succ.iter().all(|s| s.len() == 1);
        let undirected = n >= 3
            && pairs.len() == 2 * n
            && succ.iter().all(|s| s.len() == 2)
            && pairs.iter().all(|&(u, v)| pc.color(v, u) == color as u32);
        if !directed && !undirected {
            continue;
        }
        let mut cycle = vec![0usize];
        let mut prev: Option<usize> = None;
        let mut cur = 0usize;
        let mut seen = vec![false; n];
        seen[0] = true;
        while cycle.len() < n {
            let next = if directed {
                succ[cur][0]
            } else {
                let (a, b) = (
                    succ[cur][0].min(succ[cur][1]),
                    succ[cur][0].max(succ[cur][1]),
                );
                if prev == Some(a) {
                    b
                } else {
                    a
                }
            };
            if seen[next] {
                break;
            }
            seen[next] = true;
            prev = Some(cur);
            cur = next;
            cycle.push(cur);
        }
        if cycle.len() != n || !succ[cur].contains(&0) {
            continue;
        }
        let forward = Permutation::from_cycle(&cycle).expect("cycle visits every vertex once");
        let mut permutations = vec![forward.clone()];
        if !directed {
            permutations.push(forward.inverse());
        }
        out.push(CycleClass {
            color: color as u32,
            directed,
            cycle,
            permutations,
        });
    }
    out
}

/// Canonical Cayley representation: take the least-colored cycle class of
/// `WL(X)` matching the input kind, walk it from vertex 0, check that the
/// cyclic shift along it is an automorphism, and label `x_i ↦ i`.
pub fn canonical_cayley_representation(x: &Digraph) -> CanonResult {
    let n = x.n();
    let pc = wl2_stable(x);
    // Graphs on two or fewer vertices have no undirected n-cycle classes;
    // their directed ones serve instead.
    let want_directed = !x.is_symmetric() || n <= 2;
    let Some(class) = cycle_classes(&pc)
        .into_iter()
        .find(|c| c.directed == want_directed)
    else {
        return CanonResult::GiveUp(GiveUp::NoCycleClass);
    };
    if !is_isomorphism(x, x, &class.permutations[0]) {
        return CanonResult::GiveUp(GiveUp::NotAutomorphism);
    }
    let mut images = vec![0; n];
    for (i, &v) in class.cycle.iter().enumerate() {
        images[v] = i;
    }
    let labeling = Permutation::new(images).expect("cycle is a bijection");
    let form = relabel(x, &labeling).expect("same order");
    debug_assert!(form.circulant_connection_set().is_some());
    CanonResult::Success { labeling, form }
}

/// Registry entry for [`canonical_cayley_representation`].
#[derive(Debug, Clone, Copy, Default)]
pub struct CayleyRepresentation;

impl Canonizer for CayleyRepresentation {
    fn name(&self) -> &'static str {
        "wl2-rep"
    }

    fn canonize(&self, x: &Digraph) -> Result<CanonResult> {
        Ok(canonical_cayley_representation(x))
    }
}

/// Whether `|Aut(x)|` is `n` (digraphs) or `2n` (graphs, `n ≥ 3`).
pub fn is_firm_digraph(x: &Digraph, config: &OracleConfig) -> Result<bool> {
    let order = automorphism_group(x, config)?.order;
    Ok(order == firm_order(x).into())
}

fn firm_order(x: &Digraph) -> usize {
    let n = x.n();
    if x.is_symmetric() && n >= 3 {
        2 * n
    } else {
        n
    }
}

/// Equivalence classes of Cayley representations of a firm circulant: the
/// automorphisms that are full `n`-cycles, with mutually inverse cycles merged
/// for graphs.
pub fn count_representation_classes(x: &Digraph, config: &OracleConfig) -> Result<usize> {
    let group = automorphism_group(x, config)?;
    if group.order != firm_order(x).into() {
        return Err(Error::NotFirm);
    }
    let cycles = group
        .elements(config.max_elements)?
        .iter()
        .filter(|p| p.is_full_cycle())
        .count();
    Ok(if x.is_symmetric() && x.n() >= 3 {
        cycles / 2
    } else {
        cycles
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonize_digraph;
    use crate::graph::{cayley, euler_phi, ConnectionSet};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cay(n: usize, s: &[usize]) -> Digraph {
        cayley(&ConnectionSet::new(n, s.iter().copied()).unwrap())
    }

    fn shuffled(x: &Digraph, rng: &mut ChaCha8Rng) -> Digraph {
        let mut images: Vec<usize> = (0..x.n()).collect();
        images.shuffle(rng);
        relabel(x, &Permutation::new(images).unwrap()).unwrap()
    }

    #[test]
    fn stable_partition_examples() {
        for n in 2..=12 {
            let pc = wl2_stable(&cay(n, &[1]));
            assert_eq!(pc.class_count(), n);
            for u in 0..n {
                for v in 0..n {
                    assert_eq!(pc.color(u, v), pc.color(0, (v + n - u) % n));
                }
            }
        }
        assert_eq!(wl2_stable(&cay(3, &[1, 2])).class_count(), 2);
        assert_eq!(wl2_stable(&Digraph::empty(4)).class_count(), 2);
        assert_eq!(wl2_stable(&Digraph::empty(1)).class_count(), 1);
        assert_eq!(wl2_stable(&Digraph::empty(0)).class_count(), 0);
    }

    #[test]
    fn orbitals_and_schurity() {
        let cfg = OracleConfig::default();
        assert_eq!(orbital_partition(&cay(5, &[1]), &cfg).unwrap().count(), 5);
        assert_eq!(
            orbital_partition(&cay(5, &[1, 4]), &cfg).unwrap().count(),
            3
        );
        assert_eq!(
            orbital_partition(&cay(3, &[1, 2]), &cfg).unwrap().count(),
            2
        );
        assert!(is_schurian(&cay(7, &[1]), &cfg).unwrap());
        assert!(is_schurian(&cay(4, &[1, 2, 3]), &cfg).unwrap());
        assert!(orbital_partition(&cay(13, &[1]), &cfg).is_err());
    }

    #[test]
    fn wl_is_refined_by_orbitals() {
        let cfg = OracleConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            use rand::Rng;
            let n = rng.gen_range(2..=8);
            let x = Digraph::from_fn(n, |u, v| u != v && rng.gen_bool(0.5));
            let wl = wl2_stable(&x).partition();
            let orb = orbital_partition(&x, &cfg).unwrap().parts;
            let mut rep = std::collections::HashMap::new();
            for (o, w) in orb.iter().zip(&wl) {
                assert_eq!(*rep.entry(o).or_insert(w), w);
            }
        }
    }

    #[test]
    fn cycle_class_examples() {
        let directed = cycle_classes(&wl2_stable(&cay(5, &[1])));
        assert_eq!(directed.len(), 4);
        assert!(directed
            .iter()
            .all(|c| c.directed && c.permutations.len() == 1));

        let undirected = cycle_classes(&wl2_stable(&cay(5, &[1, 4])));
        assert_eq!(undirected.len(), 2);
        for c in &undirected {
            assert!(!c.directed);
            assert_eq!(c.permutations[1], c.permutations[0].inverse());
        }
        // K3 has no directed 3-cycle class, but its arc class is the
        // undirected 3-cycle.
        let k3 = cycle_classes(&wl2_stable(&cay(3, &[1, 2])));
        assert!(k3.iter().all(|c| !c.directed));
        assert_eq!(k3.len(), 1);
        assert!(cycle_classes(&wl2_stable(&cay(4, &[1, 2, 3]))).is_empty());
    }

    #[test]
    fn cayley_representation_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c5 = shuffled(&cay(5, &[1, 4]), &mut rng);
        let r = canonical_cayley_representation(&c5);
        let s = r.form().unwrap().circulant_connection_set().unwrap();
        assert_eq!(s.elements(), &[1, 4]);
        assert_eq!(
            canonical_cayley_representation(&cay(5, &[1, 2, 3, 4])),
            CanonResult::GiveUp(GiveUp::NoCycleClass)
        );

        let cfg = OracleConfig::default();
        assert!(!is_firm_digraph(&cay(8, &[1, 2, 5]), &cfg).unwrap());
        let x = cay(8, &[1, 2, 4]);
        assert!(is_firm_digraph(&x, &cfg).unwrap());
        let base = canonical_cayley_representation(&x);
        assert!(base.is_success());
        for _ in 0..10 {
            let r = canonical_cayley_representation(&shuffled(&x, &mut rng));
            assert_eq!(r.form(), base.form());
        }
    }

    #[test]
    fn start_vertex_does_not_matter_on_firm_circulants() {
        let cfg = OracleConfig::default();
        for n in 3..=10usize {
            for mask in 0u64..(1 << (n - 1)) {
                let s = ConnectionSet::from_mask(n, mask << 1, false).unwrap();
                let x = cayley(&s);
                if !is_firm_digraph(&x, &cfg).unwrap() {
                    continue;
                }
                let base = canonical_cayley_representation(&x);
                assert!(base.is_success(), "{s}");
                for a in 1..n {
                    let y = relabel(&x, &Permutation::rotation(n, a)).unwrap();
                    assert_eq!(
                        canonical_cayley_representation(&y).form(),
                        base.form(),
                        "{s}"
                    );
                }
            }
        }
    }

    #[test]
    fn wl2_dominates_individualized_refinement() {
        for n in 1..=10usize {
            for mask in 0u64..(1 << (n - 1)) {
                let x = cayley(&ConnectionSet::from_mask(n, mask << 1, false).unwrap());
                if canonize_digraph(&x).is_success() {
                    assert!(canonical_cayley_representation(&x).is_success());
                }
            }
        }
    }

    #[test]
    fn representation_counts() {
        let cfg = OracleConfig::default();
        assert_eq!(
            count_representation_classes(&cay(5, &[1]), &cfg).unwrap(),
            4
        );
        assert_eq!(
            count_representation_classes(&cay(5, &[1, 4]), &cfg).unwrap(),
            2
        );
        assert_eq!(
            count_representation_classes(&cay(4, &[1, 2, 3]), &cfg),
            Err(Error::NotFirm)
        );
        let firm12 = cay(12, &[1, 2, 5]);
        assert!(is_firm_digraph(&firm12, &cfg).unwrap());
        assert_eq!(
            count_representation_classes(&firm12, &cfg).unwrap(),
            euler_phi(12)
        );
    }
}

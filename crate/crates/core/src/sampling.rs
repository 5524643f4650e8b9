//! Random circulants under the Cayley, unlabeled and labeled models, plus
//! multiplier stabilizers, firmness and exact isomorphism-class sizes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cyclotomic::CycloInt;
use crate::error::{Error, Result};
use crate::graph::{cayley, relabel, units, ConnectionSet, Digraph, Permutation};
use crate::oracle::{automorphism_count, find_isomorphism, OracleConfig, UnionFind};
use crate::spectral::spectrum;

/// Largest orders the exact class census accepts.
pub const EXACT_BOUND_DIRECTED: usize = 14;
pub const EXACT_BOUND_UNDIRECTED: usize = 18;

/// The generator for trial `trial` at order `n` under a run seed.
pub fn trial_rng(seed: u64, n: usize, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((n as u64) << 32 | trial);
    rng
}

/// One draw. `set` is the connection set that was accepted and `graph` the
/// (di)graph handed out: `cay(set)` itself, or a random relabeling of it for
/// the labeled model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Draw {
    pub set: ConnectionSet,
    pub graph: Digraph,
    /// Proposals drawn before acceptance, including the accepted one.
    pub proposals: u64,
}

/// A random circulant model.
pub trait Sampler: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn sample(&self, n: usize, directed: bool, rng: &mut dyn RngCore) -> Result<Draw>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CayleySampler;

#[derive(Debug, Clone, Copy, Default)]
pub struct UnlabeledSampler;

#[derive(Debug, Clone, Copy, Default)]
pub struct LabeledSampler;

static SAMPLERS: [&dyn Sampler; 3] = [&CayleySampler, &UnlabeledSampler, &LabeledSampler];

pub fn samplers() -> &'static [&'static dyn Sampler] {
    &SAMPLERS
}

pub fn sampler(name: &str) -> Option<&'static dyn Sampler> {
    SAMPLERS.iter().copied().find(|s| s.name() == name)
}

impl Sampler for CayleySampler {
    fn name(&self) -> &'static str {
        "cayley"
    }

    fn sample(&self, n: usize, directed: bool, rng: &mut dyn RngCore) -> Result<Draw> {
        let set = sample_cayley(n, directed, rng)?;
        Ok(Draw {
            graph: cayley(&set),
            set,
            proposals: 1,
        })
    }
}

impl Sampler for UnlabeledSampler {
    fn name(&self) -> &'static str {
        "unlabeled"
    }

    fn sample(&self, n: usize, directed: bool, rng: &mut dyn RngCore) -> Result<Draw> {
        let census = Census::get(n, directed)?;
        let mut proposals = 0;
        loop {
            proposals += 1;
            let set = sample_cayley(n, directed, rng)?;
            let size = census.class_size_of(&set) as u64;
            if rng.gen_range(0..size) == 0 {
                return Ok(Draw {
                    graph: cayley(&set),
                    set,
                    proposals,
                });
            }
        }
    }
}

impl Sampler for LabeledSampler {
    fn name(&self) -> &'static str {
        "labeled"
    }

    fn sample(&self, n: usize, directed: bool, rng: &mut dyn RngCore) -> Result<Draw> {
        let census = Census::get(n, directed)?;
        let min_aut = minimal_aut_order(n, !directed) as u128;
        let mut proposals = 0;
        loop {
            proposals += 1;
            let set = sample_cayley(n, directed, rng)?;
            let class = census.class_of(&set);
            let weight = census.aut_order(class) as u128 * census.class_size(class) as u128;
            if rng.gen_range(0..weight) < min_aut {
                let mut images: Vec<usize> = (0..n).collect();
                images.shuffle(rng);
                let pi = Permutation::new(images).expect("shuffle is a bijection");
                let graph = relabel(&cayley(&set), &pi).expect("same order");
                return Ok(Draw {
                    set,
                    graph,
                    proposals,
                });
            }
        }
    }
}

/// Digraphs: each `j ∈ 1..n` independently with probability 1/2. Graphs: each
/// pair `{j, n-j}` (a singleton when `2j = n`) independently with probability 1/2.
pub fn sample_cayley(n: usize, directed: bool, rng: &mut dyn RngCore) -> Result<ConnectionSet> {
    if directed {
        ConnectionSet::new(n, (1..n).filter(|_| rng.gen::<bool>()))
    } else {
        let mut elements = Vec::new();
        for j in 1..=n / 2 {
            if rng.gen::<bool>() {
                elements.push(j);
                elements.push(n - j);
            }
        }
        ConnectionSet::undirected(n, elements)
    }
}

/// `K(S) = {k ∈ Z_n^× : kS = S}`, ascending.
pub fn multiplier_stabilizer(s: &ConnectionSet) -> Vec<usize> {
    units(s.n())
        .into_iter()
        .filter(|&k| s.scaled(k).elements() == s.elements())
        .collect()
}

/// `K(S) = {1}` for directed sets, `K(S) = {±1}` for inverse-closed ones.
pub fn is_multiplier_free(s: &ConnectionSet) -> bool {
    let k = multiplier_stabilizer(s);
    let n = s.n();
    let mut trivial = vec![1 % n];
    if s.is_inverse_closed() {
        trivial.push((n - 1) % n);
    }
    trivial.sort_unstable();
    trivial.dedup();
    k == trivial
}

fn minimal_aut_order(n: usize, undirected: bool) -> usize {
    if undirected && n >= 3 {
        2 * n
    } else {
        n
    }
}

/// `|Aut(cay(S))|` is `n` for directed sets or `2n` for inverse-closed ones.
pub fn is_firm(s: &ConnectionSet, config: &OracleConfig) -> Result<bool> {
    let order = automorphism_count(&cayley(s), config)?;
    Ok(order == BigUint::from(minimal_aut_order(s.n(), s.is_inverse_closed())))
}

/// Number of connection sets of the same kind whose circulant is isomorphic
/// to `cay(S)`.
pub fn class_size(s: &ConnectionSet) -> Result<usize> {
    Ok(Census::get(s.n(), !s.is_inverse_closed())?.class_size_of(s))
}

/// All connection sets of one order and kind, grouped into isomorphism
/// classes. Multiplier images are merged first; the remaining orbits are
/// bucketed by their eigenvalue multiset and compared by isomorphism search.
#[derive(Debug)]
pub struct Census {
    n: usize,
    directed: bool,
    class_of: Vec<u32>,
    sizes: Vec<usize>,
    representatives: Vec<usize>,
    aut: Vec<OnceLock<u64>>,
}

impl Census {
    /// The memoized census for `(n, directed)`.
    pub fn get(n: usize, directed: bool) -> Result<Arc<Self>> {
        static MEMO: OnceLock<Mutex<HashMap<(usize, bool), Arc<Census>>>> = OnceLock::new();
        let memo = MEMO.get_or_init(Default::default);
        if let Some(c) = memo.lock().unwrap().get(&(n, directed)) {
            return Ok(c.clone());
        }
        let census = Arc::new(Self::build(n, directed)?);
        Ok(memo
            .lock()
            .unwrap()
            .entry((n, directed))
            .or_insert(census)
            .clone())
    }

    fn build(n: usize, directed: bool) -> Result<Self> {
        let bound = if directed {
            EXACT_BOUND_DIRECTED
        } else {
            EXACT_BOUND_UNDIRECTED
        };
        if n == 0 || n > bound {
            return Err(Error::EnumerationBound(format!(
                "exact class census needs 1 <= n <= {bound}, got {n}"
            )));
        }
        let count = if directed {
            1usize << (n - 1)
        } else {
            1usize << (n / 2)
        };
        let sets: Vec<ConnectionSet> = (0..count).map(|i| set_at(n, directed, i)).collect();
        let mut uf = UnionFind::new(count);
        let us = units(n);
        for (i, s) in sets.iter().enumerate() {
            for &k in &us {
                uf.union(i, index_of(&s.scaled(k), directed));
            }
        }

        let mut buckets: BTreeMap<(usize, Vec<CycloInt>), Vec<usize>> = BTreeMap::new();
        for i in 0..count {
            if uf.find(i) == i {
                let mut eig = spectrum(&sets[i]).eigenvalues;
                eig.sort_unstable();
                buckets.entry((sets[i].len(), eig)).or_default().push(i);
            }
        }
        for reps in buckets.values() {
            for (a, &i) in reps.iter().enumerate() {
                let gi = cayley(&sets[i]);
                for &j in &reps[a + 1..] {
                    if uf.find(i) != uf.find(j)
                        && find_isomorphism(&gi, &cayley(&sets[j])).is_some()
                    {
                        uf.union(i, j);
                    }
                }
            }
        }

        let roots: Vec<usize> = (0..count).map(|i| uf.find(i)).collect();
        let class_of = crate::oracle::first_occurrence_ids(&roots);
        let classes = class_of.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut sizes = vec![0; classes];
        let mut representatives = vec![usize::MAX; classes];
        for (i, &c) in class_of.iter().enumerate() {
            sizes[c as usize] += 1;
            representatives[c as usize] = representatives[c as usize].min(i);
        }
        let aut = (0..classes).map(|_| OnceLock::new()).collect();
        Ok(Self {
            n,
            directed,
            class_of,
            sizes,
            representatives,
            aut,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of connection sets of this kind.
    pub fn set_count(&self) -> usize {
        self.class_of.len()
    }

    /// Number of isomorphism classes.
    pub fn class_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn set(&self, index: usize) -> ConnectionSet {
        set_at(self.n, self.directed, index)
    }

    pub fn class_of(&self, s: &ConnectionSet) -> usize {
        self.class_of[index_of(s, self.directed)] as usize
    }

    pub fn class_size(&self, class: usize) -> usize {
        self.sizes[class]
    }

    pub fn class_size_of(&self, s: &ConnectionSet) -> usize {
        self.sizes[self.class_of(s)]
    }

    /// The connection set of least index in the class.
    pub fn representative(&self, class: usize) -> ConnectionSet {
        self.set(self.representatives[class])
    }

    /// `|Aut|` of the class's circulant, computed on first use.
    pub fn aut_order(&self, class: usize) -> u64 {
        *self.aut[class].get_or_init(|| {
            let cfg = OracleConfig::with_bound(self.n);
            automorphism_count(&cayley(&self.representative(class)), &cfg)
                .expect("order within the census bound")
                .to_u64()
                .expect("n! fits in u64 for census orders")
        })
    }

    /// Labeled copies of the class: `n! / |Aut|`.
    pub fn labeled_copies(&self, class: usize) -> u64 {
        let factorial: u64 = (1..=self.n as u64).product();
        factorial / self.aut_order(class)
    }
}

/// Directed sets are indexed by the bitmask of `1..n` shifted down one bit;
/// inverse-closed sets by the bitmask of the pairs `{j, n-j}`, `j = 1..=n/2`.
fn index_of(s: &ConnectionSet, directed: bool) -> usize {
    if directed {
        (s.mask() >> 1) as usize
    } else {
        s.elements()
            .iter()
            .filter(|&&j| 2 * j <= s.n())
            .fold(0, |acc, &j| acc | 1 << (j - 1))
    }
}

fn set_at(n: usize, directed: bool, index: usize) -> ConnectionSet {
    if directed {
        ConnectionSet::from_mask(n, (index as u64) << 1, false).expect("index in range")
    } else {
        let mut elements = Vec::new();
        for j in 1..=n / 2 {
            if index >> (j - 1) & 1 == 1 {
                elements.push(j);
                elements.push(n - j);
            }
        }
        ConnectionSet::undirected(n, elements).expect("pairs are inverse-closed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::euler_phi;

    fn set(n: usize, s: &[usize]) -> ConnectionSet {
        ConnectionSet::new(n, s.iter().copied()).unwrap()
    }

    fn uset(n: usize, s: &[usize]) -> ConnectionSet {
        ConnectionSet::undirected(n, s.iter().copied()).unwrap()
    }

    #[test]
    fn cayley_sampler_support() {
        let mut rng = trial_rng(1, 4, 0);
        let mut seen = std::collections::BTreeMap::new();
        for _ in 0..4000 {
            *seen
                .entry(sample_cayley(4, false, &mut rng).unwrap().to_string())
                .or_insert(0) += 1;
        }
        let keys: Vec<&String> = seen.keys().collect();
        assert_eq!(keys, ["4:", "4: 1,2,3", "4: 1,3", "4: 2"]);
        assert!(seen.values().all(|&c| (850..1150).contains(&c)));

        let mut directed = std::collections::BTreeSet::new();
        for _ in 0..400 {
            directed.insert(sample_cayley(4, true, &mut rng).unwrap().mask());
        }
        assert_eq!(directed.len(), 8);
        for _ in 0..100 {
            assert!(sample_cayley(5, false, &mut rng).unwrap().is_symmetric());
        }
    }

    #[test]
    fn multiplier_examples() {
        assert_eq!(multiplier_stabilizer(&set(5, &[1, 4])), vec![1, 4]);
        assert_eq!(multiplier_stabilizer(&set(5, &[1])), vec![1]);
        assert_eq!(
            multiplier_stabilizer(&set(8, &[1, 3, 5, 7])),
            vec![1, 3, 5, 7]
        );
        assert!(is_multiplier_free(&set(5, &[1])));
        assert!(is_multiplier_free(&uset(5, &[1, 4])));
        assert!(!is_multiplier_free(&uset(8, &[1, 3, 5, 7])));
        assert!(!is_multiplier_free(&set(5, &[1, 4])));
    }

    #[test]
    fn firm_examples() {
        let cfg = OracleConfig::default();
        assert!(is_firm(&set(7, &[1]), &cfg).unwrap());
        assert!(is_firm(&uset(5, &[1, 4]), &cfg).unwrap());
        assert!(!is_firm(&set(4, &[1, 2, 3]), &cfg).unwrap());
        assert!(!is_firm(&uset(4, &[1, 2, 3]), &cfg).unwrap());
        assert!(is_firm(&set(13, &[1]), &cfg).is_err());
    }

    #[test]
    fn class_size_examples() {
        assert_eq!(class_size(&set(4, &[1])).unwrap(), 2);
        assert_eq!(class_size(&set(4, &[1, 2, 3])).unwrap(), 1);
        assert_eq!(class_size(&uset(5, &[1, 4])).unwrap(), 2);
        assert!(class_size(&set(15, &[1])).is_err());
        assert_eq!(Census::get(3, true).unwrap().class_count(), 3);
    }

    #[test]
    fn class_sizes_match_brute_isomorphism() {
        for n in 1..=8usize {
            for directed in [true, false] {
                let census = Census::get(n, directed).unwrap();
                let graphs: Vec<Digraph> = (0..census.set_count())
                    .map(|i| cayley(&census.set(i)))
                    .collect();
                for i in 0..graphs.len() {
                    for j in 0..graphs.len() {
                        let same =
                            census.class_of(&census.set(i)) == census.class_of(&census.set(j));
                        assert_eq!(same, find_isomorphism(&graphs[i], &graphs[j]).is_some());
                    }
                    let s = census.class_size_of(&census.set(i));
                    assert!(s >= 1 && s <= euler_phi(n).max(1));
                }
            }
        }
    }

    #[test]
    fn non_multiplier_isomorphisms_are_found() {
        // Z_8 is not a CI-group, so some classes join sets that no multiplier
        // relates.
        let census = Census::get(8, true).unwrap();
        let mut witness = None;
        for i in 0..census.set_count() {
            for j in i + 1..census.set_count() {
                let (a, b) = (census.set(i), census.set(j));
                if census.class_of(&a) == census.class_of(&b)
                    && units(8).iter().all(|&k| a.scaled(k) != b)
                {
                    witness = Some((a, b));
                }
            }
        }
        let (a, b) = witness.expect("a non-multiplier isomorphism exists on Z_8");
        assert!(find_isomorphism(&cayley(&a), &cayley(&b)).is_some());
    }

    #[test]
    fn labeled_copy_counts() {
        let census = Census::get(4, true).unwrap();
        let complete = census.class_of(&set(4, &[1, 2, 3]));
        assert_eq!(census.aut_order(complete), 24);
        assert_eq!(census.labeled_copies(complete), 1);
        let cycle = census.class_of(&set(4, &[1]));
        assert_eq!(census.aut_order(cycle), 4);
        assert_eq!(census.labeled_copies(cycle), 6);
    }

    #[test]
    fn registry_and_determinism() {
        for s in samplers() {
            assert_eq!(sampler(s.name()).unwrap().name(), s.name());
            let a = s.sample(5, true, &mut trial_rng(9, 5, 3)).unwrap();
            let b = s.sample(5, true, &mut trial_rng(9, 5, 3)).unwrap();
            assert_eq!(a, b);
        }
        assert!(sampler("bogus").is_none());
        assert!(UnlabeledSampler
            .sample(20, true, &mut trial_rng(0, 20, 0))
            .is_err());
    }
}

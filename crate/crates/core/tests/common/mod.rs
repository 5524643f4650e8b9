#![allow(dead_code)]

use circulant_canon::graph::{ConnectionSet, Permutation};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform random connection set; inverse-closed ones pick each pair
/// `{s, n-s}` with probability 1/2.
pub fn random_set(n: usize, directed: bool, rng: &mut impl Rng) -> ConnectionSet {
    if directed {
        ConnectionSet::new(n, (1..n).filter(|_| rng.gen_bool(0.5))).unwrap()
    } else {
        let reps: Vec<usize> = (1..=n / 2).filter(|_| rng.gen_bool(0.5)).collect();
        symmetric(n, &reps)
    }
}

pub fn symmetric(n: usize, reps: &[usize]) -> ConnectionSet {
    ConnectionSet::undirected(n, reps.iter().flat_map(|&s| [s, n - s])).unwrap()
}

/// Every connection set of order `n`, directed or inverse-closed.
pub fn all_sets(n: usize, directed: bool) -> Vec<ConnectionSet> {
    if directed {
        let m = n.saturating_sub(1);
        (0..1u64 << m)
            .map(|mask| {
                ConnectionSet::new(n, (1..n).filter(|&s| mask >> (s - 1) & 1 == 1)).unwrap()
            })
            .collect()
    } else {
        let half = n / 2;
        (0..1u64 << half)
            .map(|mask| {
                let reps: Vec<usize> = (1..=half).filter(|&s| mask >> (s - 1) & 1 == 1).collect();
                symmetric(n, &reps)
            })
            .collect()
    }
}

pub fn random_perm(n: usize, rng: &mut impl Rng) -> Permutation {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    Permutation::new(v).unwrap()
}

//! Exact spectra of circulants and the simple/saturated spectrum predicates.
//!
//! The eigenvalues of `cay(Z_n, S)` are `λ_a = Σ_{j∈S} ζ_n^{aj}` for
//! `a = 0..n-1`, with `ζ_n = e^{-2πi/n}`. All verdicts are decided in
//! `Z[ζ_n]`; the floating-point DFT is only a cross-check.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::cyclotomic::{root_power_sum, CycloInt};
use crate::error::{Error, Result};
use crate::graph::ConnectionSet;

/// All `n` exact eigenvalues of a circulant, indexed by `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spectrum {
    pub n: usize,
    pub eigenvalues: Vec<CycloInt>,
    pub distinct_count: usize,
}

/// `λ_a = Σ_{j∈S} ζ_n^{aj}`.
pub fn eigenvalue(s: &ConnectionSet, a: usize) -> CycloInt {
    let n = s.n();
    root_power_sum(n, s.elements().iter().map(|&j| (a % n) * j % n))
}

/// The full exact spectrum. Distinct values are counted by sorting the
/// canonical coefficient vectors.
pub fn spectrum(s: &ConnectionSet) -> Spectrum {
    let eigenvalues: Vec<CycloInt> = (0..s.n()).map(|a| eigenvalue(s, a)).collect();
    let mut sorted: Vec<&CycloInt> = eigenvalues.iter().collect();
    sorted.sort_unstable();
    sorted.dedup();
    Spectrum {
        n: s.n(),
        distinct_count: sorted.len(),
        eigenvalues,
    }
}

/// Number of distinct eigenvalues, computed without building the whole exact
/// spectrum: eigenvalues are bucketed by their images under two ring
/// homomorphisms `Z[ζ_n] -> F_p`, and only eigenvalues sharing a bucket are
/// compared exactly. Different images prove inequality, so the count is exact.
pub fn distinct_eigenvalue_count(s: &ConnectionSet) -> usize {
    let n = s.n();
    let fp = Fingerprinter::get(n);
    let keys: Vec<(u64, u64)> = (0..n).map(|a| fp.eigenvalue(s.elements(), a)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by_key(|&a| keys[a]);

    let symmetric = s.is_symmetric();
    let mut distinct = 0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && keys[order[j]] == keys[order[i]] {
            j += 1;
        }
        // λ_a = λ_{-a} holds identically for S = -S.
        let mut reps: Vec<usize> = order[i..j]
            .iter()
            .map(|&a| if symmetric { a.min((n - a) % n) } else { a })
            .collect();
        reps.sort_unstable();
        reps.dedup();
        if reps.len() == 1 {
            distinct += 1;
        } else {
            let mut exact: Vec<CycloInt> = reps.iter().map(|&a| eigenvalue(s, a)).collect();
            exact.sort_unstable();
            exact.dedup();
            distinct += exact.len();
        }
        i = j;
    }
    distinct
}

/// All eigenvalues pairwise distinct.
pub fn has_simple_spectrum(s: &ConnectionSet) -> bool {
    distinct_eigenvalue_count(s) == s.n()
}

/// `⌈(n+1)/2⌉`, the most distinct eigenvalues (and walk-matrix rows) an
/// undirected circulant can have.
pub fn saturation_bound(n: usize) -> usize {
    (n + 2) / 2
}

/// Exactly `⌈(n+1)/2⌉` distinct eigenvalues. Requires `S = -S`.
pub fn has_saturated_spectrum(s: &ConnectionSet) -> Result<bool> {
    if !s.is_symmetric() {
        return Err(Error::NotInverseClosed);
    }
    Ok(distinct_eigenvalue_count(s) == saturation_bound(s.n()))
}

/// Eigenvalues from a floating-point DFT of the characteristic vector of `S`,
/// `F(χ_S)(a) = Σ_j ζ_n^{aj} χ_S(j)`.
pub fn numeric_eigenvalues(s: &ConnectionSet) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = s
        .indicator()
        .into_iter()
        .map(|b| Complex64::new(if b { 1.0 } else { 0.0 }, 0.0))
        .collect();
    // rustfft's forward transform uses e^{-2πi jk/n}, matching ζ_n.
    FftPlanner::new().plan_fft_forward(s.n()).process(&mut buf);
    buf
}

/// Whether the numeric DFT agrees entrywise with the exact spectrum evaluated
/// in double precision, within `tolerance`.
pub fn dft_cross_check(s: &ConnectionSet, tolerance: f64) -> bool {
    assert!(tolerance > 0.0, "tolerance must be positive");
    let numeric = numeric_eigenvalues(s);
    let exact = spectrum(s);
    numeric
        .iter()
        .zip(&exact.eigenvalues)
        .all(|(x, e)| (x - e.evaluate()).norm() <= tolerance)
}

/// Images of `ζ_n` in two prime fields `F_p` with `p ≡ 1 (mod n)`.
#[derive(Debug)]
struct Fingerprinter {
    n: usize,
    fields: [(u64, Vec<u64>); 2],
}

impl Fingerprinter {
    fn get(n: usize) -> Arc<Self> {
        static MEMO: OnceLock<Mutex<HashMap<usize, Arc<Fingerprinter>>>> = OnceLock::new();
        let memo = MEMO.get_or_init(Default::default);
        if let Some(f) = memo.lock().unwrap().get(&n) {
            return f.clone();
        }
        let f = Arc::new(Self::build(n));
        memo.lock().unwrap().entry(n).or_insert(f).clone()
    }

    fn build(n: usize) -> Self {
        let n64 = n as u64;
        let mut k = ((1u64 << 62) - 1) / n64;
        let mut fields = Vec::with_capacity(2);
        while fields.len() < 2 {
            let p = k * n64 + 1;
            k -= 1;
            if !is_prime(p) {
                continue;
            }
            let omega = primitive_root_of_unity(p, n64);
            let mut powers = Vec::with_capacity(n);
            let mut cur = 1u64;
            for _ in 0..n {
                powers.push(cur);
                cur = mul_mod(cur, omega, p);
            }
            fields.push((p, powers));
        }
        let [a, b]: [(u64, Vec<u64>); 2] = fields.try_into().unwrap();
        Self { n, fields: [a, b] }
    }

    fn eigenvalue(&self, elements: &[usize], a: usize) -> (u64, u64) {
        let n = self.n;
        let sum = |(p, powers): &(u64, Vec<u64>)| {
            elements.iter().fold(0u64, |acc, &j| {
                let t = acc + powers[a * j % n];
                if t >= *p {
                    t - p
                } else {
                    t
                }
            })
        };
        (sum(&self.fields[0]), sum(&self.fields[1]))
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit inputs.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// An element of exact multiplicative order `n` in `F_p`, `n | p - 1`.
fn primitive_root_of_unity(p: u64, n: u64) -> u64 {
    let factors = prime_factors(n);
    (2..p)
        .map(|g| pow_mod(g, (p - 1) / n, p))
        .find(|&w| factors.iter().all(|&q| pow_mod(w, n / q, p) != 1))
        .expect("F_p^× is cyclic of order divisible by n")
}

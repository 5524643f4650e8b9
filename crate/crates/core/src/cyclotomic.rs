//! Exact arithmetic in the ring of cyclotomic integers `Z[ζ_n]`.
//!
//! Elements are stored as their canonical residue modulo the cyclotomic
//! polynomial `Φ_n`, a coefficient vector of length `φ(n)`. Two elements are
//! equal iff their vectors are equal, so every spectral yes/no decision in the
//! crate reduces to vector comparison.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Subset-sum enumeration is capped at `2^MAX_SUBSET_BOUND` sums.
pub const MAX_SUBSET_BOUND: usize = 22;

/// `Φ_n`, coefficients in ascending degree. Memoized per `n`.
pub fn cyclotomic_polynomial(n: usize) -> Arc<Vec<BigInt>> {
    assert!(n >= 1, "cyclotomic polynomials are indexed from 1");
    static MEMO: OnceLock<Mutex<HashMap<usize, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    if let Some(p) = memo.lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 = ∏_{d | n} Φ_d
    let mut quotient = vec![BigInt::zero(); n + 1];
    quotient[0] = -BigInt::one();
    quotient[n] = BigInt::one();
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        quotient = exact_div_monic(&quotient, &cyclotomic_polynomial(d));
    }
    let p = Arc::new(quotient);
    memo.lock().unwrap().entry(n).or_insert(p).clone()
}

fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut q = vec![BigInt::zero(); num.len() - dn];
    for k in (0..q.len()).rev() {
        let c = rem[k + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (i, d) in den.iter().enumerate() {
            rem[k + i] -= &c * d;
        }
        q[k] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "division was not exact");
    q
}

/// Per-order data: `Φ_n`, `φ(n)` and the reduced powers `ζ^k`, `0 <= k < n`.
#[derive(Debug)]
pub struct CycloRing {
    n: usize,
    modulus: Arc<Vec<BigInt>>,
    powers: Vec<Vec<BigInt>>,
}

impl CycloRing {
    /// The shared ring for order `n`.
    pub fn get(n: usize) -> Arc<CycloRing> {
        static RINGS: OnceLock<Mutex<HashMap<usize, Arc<CycloRing>>>> = OnceLock::new();
        let rings = RINGS.get_or_init(Default::default);
        if let Some(r) = rings.lock().unwrap().get(&n) {
            return r.clone();
        }
        let ring = Arc::new(Self::build(n));
        rings.lock().unwrap().entry(n).or_insert(ring).clone()
    }

    fn build(n: usize) -> Self {
        let modulus = cyclotomic_polynomial(n);
        let deg = modulus.len() - 1;
        let mut powers = Vec::with_capacity(n);
        let mut cur = vec![BigInt::zero(); deg];
        if deg > 0 {
            cur[0] = BigInt::one();
        }
        for _ in 0..n {
            powers.push(cur.clone());
            // multiply by x, then reduce the overflowing top coefficient
            let top = cur.pop().unwrap_or_default();
            cur.insert(0, BigInt::zero());
            if !top.is_zero() {
                for (c, m) in cur.iter_mut().zip(modulus.iter()) {
                    *c -= &top * m;
                }
            }
            cur.truncate(deg);
        }
        Self { n, modulus, powers }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `φ(n)`, the dimension of `Z[ζ_n]` over `Z`.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.modulus
    }

    /// Reduced coefficient vector of `ζ^k`.
    pub fn power(&self, k: usize) -> &[BigInt] {
        &self.powers[k % self.n]
    }
}

/// A polynomial in `ζ_n` before reduction modulo `Φ_n`. Exponents are folded
/// modulo `n` on construction, so at most `n` coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycloPoly {
    n: usize,
    coeffs: Vec<BigInt>,
}

impl CycloPoly {
    pub fn new(n: usize, coeffs: impl IntoIterator<Item = BigInt>) -> Self {
        assert!(n >= 1);
        let mut folded = vec![BigInt::zero(); n];
        for (k, c) in coeffs.into_iter().enumerate() {
            folded[k % n] += c;
        }
        while folded.last().is_some_and(Zero::is_zero) {
            folded.pop();
        }
        Self { n, coeffs: folded }
    }

    /// `Σ_k counts[k] ζ^k`.
    pub fn from_counts(n: usize, counts: &[i64]) -> Self {
        Self::new(n, counts.iter().map(|&c| BigInt::from(c)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Evaluates at `ζ_n = e^{-2πi/n}` in double precision.
    pub fn evaluate(&self) -> Complex64 {
        evaluate(self.n, &self.coeffs)
    }
}

fn evaluate(n: usize, coeffs: &[BigInt]) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let angle = -2.0 * std::f64::consts::PI * (k % n) as f64 / n as f64;
            Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), angle)
        })
        .sum()
}

/// An element of `Z[ζ_n]` in canonical form: the remainder modulo `Φ_n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloInt {
    n: usize,
    coeffs: Vec<BigInt>,
}

/// Reduces a polynomial in `ζ_n` to its canonical residue modulo `Φ_n`.
pub fn reduce(p: &CycloPoly) -> CycloInt {
    let ring = CycloRing::get(p.n);
    let mut acc = vec![BigInt::zero(); ring.degree()];
    for (k, c) in p.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (a, b) in acc.iter_mut().zip(ring.power(k)) {
            if !b.is_zero() {
                *a += c * b;
            }
        }
    }
    CycloInt {
        n: p.n,
        coeffs: acc,
    }
}

/// Reduces by polynomial long division instead of the power table. Used to
/// cross-check [`reduce`].
pub fn reduce_by_division(p: &CycloPoly) -> CycloInt {
    let modulus = cyclotomic_polynomial(p.n);
    let deg = modulus.len() - 1;
    let mut rem = p.coeffs.clone();
    for top in (deg..rem.len()).rev() {
        let c = std::mem::take(&mut rem[top]);
        if c.is_zero() {
            continue;
        }
        for i in 0..deg {
            rem[top - deg + i] -= &c * &modulus[i];
        }
    }
    rem.resize(deg, BigInt::zero());
    CycloInt {
        n: p.n,
        coeffs: rem,
    }
}

/// `Σ_j ζ_n^{e_j}` over a multiset of exponents, reduced.
pub fn root_power_sum(n: usize, exponents: impl IntoIterator<Item = usize>) -> CycloInt {
    let ring = CycloRing::get(n);
    let mut acc = vec![BigInt::zero(); ring.degree()];
    for e in exponents {
        for (a, b) in acc.iter_mut().zip(ring.power(e)) {
            if !b.is_zero() {
                *a += b;
            }
        }
    }
    CycloInt { n, coeffs: acc }
}

impl CycloInt {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            coeffs: vec![BigInt::zero(); CycloRing::get(n).degree()],
        }
    }

    pub fn from_integer(n: usize, value: impl Into<BigInt>) -> Self {
        let mut z = Self::zero(n);
        z.coeffs[0] = value.into();
        z
    }

    pub fn one(n: usize) -> Self {
        Self::from_integer(n, 1)
    }

    /// `ζ_n^k`.
    pub fn zeta_power(n: usize, k: usize) -> Self {
        Self {
            n,
            coeffs: CycloRing::get(n).power(k).to_vec(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The element as a rational integer, if it is one.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.coeffs[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| self.coeffs[0].clone())
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }

    /// Evaluates at `ζ_n = e^{-2πi/n}` in double precision.
    pub fn evaluate(&self) -> Complex64 {
        evaluate(self.n, &self.coeffs)
    }

    fn check_same_ring(&self, other: &Self) {
        assert_eq!(self.n, other.n, "cyclotomic integers of different orders");
    }
}

impl fmt::Debug for CycloInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloInt({}; {})", self.n, self)
    }
}

impl fmt::Display for CycloInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let mag = c.abs();
            let coeff = if k > 0 && mag.is_one() {
                String::new()
            } else {
                mag.to_string()
            };
            let term = match k {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{k}"),
            };
            write!(f, "{sign}{coeff}{term}")?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl PartialOrd for CycloInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic order on canonical coefficient vectors. This is a total order
/// used for sorting and deduplication; it has no arithmetic meaning.
impl Ord for CycloInt {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl Add for &CycloInt {
    type Output = CycloInt;

    fn add(self, rhs: &CycloInt) -> CycloInt {
        self.check_same_ring(rhs);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        CycloInt { n: self.n, coeffs }
    }
}

impl Sub for &CycloInt {
    type Output = CycloInt;

    fn sub(self, rhs: &CycloInt) -> CycloInt {
        self.check_same_ring(rhs);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        CycloInt { n: self.n, coeffs }
    }
}

impl Neg for &CycloInt {
    type Output = CycloInt;

    fn neg(self) -> CycloInt {
        CycloInt {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &CycloInt {
    type Output = CycloInt;

    fn mul(self, rhs: &CycloInt) -> CycloInt {
        self.check_same_ring(rhs);
        let mut prod = vec![BigInt::zero(); (self.coeffs.len() + rhs.coeffs.len()).max(1)];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        reduce(&CycloPoly::new(self.n, prod))
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for CycloInt {
            type Output = CycloInt;
            fn $method(self, rhs: CycloInt) -> CycloInt {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for CycloInt {
    type Output = CycloInt;

    fn neg(self) -> CycloInt {
        -&self
    }
}

/// Whether the `2^bound` subset sums of `{ζ_n^1, ..., ζ_n^bound}` are
/// pairwise distinct.
pub fn subset_sum_distinctness(n: usize, bound: usize) -> Result<bool> {
    if bound > MAX_SUBSET_BOUND {
        return Err(Error::EnumerationBound(format!(
            "2^{bound} subset sums exceed the limit 2^{MAX_SUBSET_BOUND}"
        )));
    }
    let ring = CycloRing::get(n);
    let deg = ring.degree();
    // Coefficients stay tiny, so sums are accumulated in i64 and compared as
    // flat rows; the values are exact.
    let table: Vec<Vec<i64>> = (1..=bound)
        .map(|j| {
            ring.power(j)
                .iter()
                .map(|c| c.to_i64().expect("power coefficients fit in i64"))
                .collect()
        })
        .collect();
    let count = 1usize << bound;
    let mut sums = vec![0i64; count * deg];
    for mask in 1..count {
        let low = mask.trailing_zeros() as usize;
        let prev = mask & (mask - 1);
        for i in 0..deg {
            sums[mask * deg + i] = sums[prev * deg + i] + table[low][i];
        }
    }
    let mut rows: Vec<&[i64]> = sums.chunks(deg.max(1)).collect();
    if deg == 0 {
        return Ok(count <= 1);
    }
    rows.sort_unstable();
    Ok(rows.windows(2).all(|w| w[0] != w[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(*cyclotomic_polynomial(2), ints(&[1, 1]));
        assert_eq!(*cyclotomic_polynomial(4), ints(&[1, 0, 1]));
        assert_eq!(*cyclotomic_polynomial(6), ints(&[1, -1, 1]));
        assert_eq!(*cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
        // Φ_105 is the first with a coefficient of absolute value 2.
        let p105 = cyclotomic_polynomial(105);
        assert_eq!(p105.len() - 1, 48);
        assert!(p105.iter().any(|c| *c == BigInt::from(-2)));
    }

    #[test]
    fn degrees_match_totient() {
        for n in 1..=120 {
            let p = cyclotomic_polynomial(n);
            assert_eq!(p.len() - 1, crate::graph::euler_phi(n), "n={n}");
            assert!(p.last().unwrap().is_one());
        }
    }

    #[test]
    fn reduction_examples() {
        // ζ_4^0 + ζ_4^2 = 0
        assert!(reduce(&CycloPoly::new(4, ints(&[1, 0, 1]))).is_zero());
        // ζ_6^2 = ζ - 1
        let r = reduce(&CycloPoly::new(6, ints(&[0, 0, 1])));
        assert_eq!(r.coeffs(), &ints(&[-1, 1])[..]);
        assert!(reduce(&CycloPoly::new(3, ints(&[1, 1, 1]))).is_zero());
    }

    #[test]
    fn x_pow_n_minus_one_vanishes() {
        for n in 1..=200 {
            let mut c = vec![BigInt::zero(); n + 1];
            c[0] = BigInt::from(-1);
            c[n] = BigInt::one();
            // Folding turns x^n into 1, so also check the unfolded division route.
            assert!(reduce(&CycloPoly::new(n, c.clone())).is_zero());
            let unfolded = CycloPoly { n, coeffs: c };
            assert!(reduce_by_division(&unfolded).is_zero(), "n={n}");
        }
    }

    #[test]
    fn root_power_sum_examples() {
        assert!(root_power_sum(5, 0..5).is_zero());
        assert!(root_power_sum(4, [1, 3]).is_zero());
        assert_eq!(root_power_sum(6, [1, 5]), CycloInt::one(6));
        assert_eq!(root_power_sum(7, [7, 14]), CycloInt::from_integer(7, 2));
    }

    #[test]
    fn subset_sum_examples() {
        assert!(subset_sum_distinctness(12, 4).unwrap());
        assert!(subset_sum_distinctness(8, 3).unwrap());
        assert!(!subset_sum_distinctness(6, 4).unwrap());
        assert!(subset_sum_distinctness(5, 30).is_err());
    }

    #[test]
    fn subset_sums_distinct_below_n_over_ln_n() {
        let mut failures = Vec::new();
        for n in 3..=64usize {
            let bound = (n as f64 / (n as f64).ln()).floor() as usize;
            if !subset_sum_distinctness(n, bound).unwrap() {
                failures.push((n, bound, crate::graph::euler_phi(n)));
            }
        }
        // At n = 6 the range 1..=3 exceeds φ(6) = 2 and ζ^2 = ζ + ζ^3.
        assert_eq!(failures, vec![(6, 3, 2)]);
        let lhs = CycloInt::zeta_power(6, 2);
        let rhs = &CycloInt::zeta_power(6, 1) + &CycloInt::zeta_power(6, 3);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn display_and_integers() {
        let z = CycloInt::zeta_power(5, 1);
        assert_eq!(z.to_string(), "z");
        assert_eq!(CycloInt::zero(5).to_string(), "0");
        assert_eq!((&z + &z).as_integer(), None);
        assert_eq!(
            CycloInt::from_integer(5, 3).as_integer(),
            Some(BigInt::from(3))
        );
        // ζ^5 = 1 in Z[ζ_5]
        let mut p = CycloInt::one(5);
        for _ in 0..5 {
            p = &p * &z;
        }
        assert_eq!(p, CycloInt::one(5));
    }
}

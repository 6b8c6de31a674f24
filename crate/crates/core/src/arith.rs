//! Primes and the arithmetic functions Λ, μ, τ_k.

use crate::error::{Error, Result};
use crate::par;

/// Default segment length of the sieve.
pub const SEGMENT: u64 = 1 << 20;

/// Largest span a single [`PrimeRange`] may cover (one bit per odd number).
pub const DEFAULT_BUDGET: u64 = 1 << 34;

/// Primes below `limit` by the plain sieve of Eratosthenes.
pub fn small_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    if n < 3 {
        return Vec::new();
    }
    let mut comp = vec![false; n];
    let mut out = vec![2];
    let mut i = 3;
    while i < n {
        if !comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j < n {
                comp[j] = true;
                j += 2 * i;
            }
        }
        i += 2;
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Primality bitmap of `[lo, hi)`, odd numbers only.
#[derive(Clone, Debug)]
pub struct SieveSegment {
    pub lo: u64,
    pub hi: u64,
    // bit i <-> odd number base + 2i
    base: u64,
    bits: Vec<u64>,
}

impl SieveSegment {
    /// Sieve `[lo, hi)` using `base`, which must contain every prime up to sqrt(hi).
    pub fn new(lo: u64, hi: u64, base: &[u64]) -> Self {
        let start = if lo % 2 == 0 { lo + 1 } else { lo };
        let n_odd = if hi > start { (hi - start).div_ceil(2) } else { 0 };
        let mut bits = vec![!0u64; n_odd.div_ceil(64) as usize];
        for &p in base.iter().skip(1) {
            if p * p >= hi {
                break;
            }
            let mut m = (start.div_ceil(p) * p).max(p * p);
            if m % 2 == 0 {
                m += p;
            }
            while m < hi {
                let i = (m - start) / 2;
                bits[(i / 64) as usize] &= !(1u64 << (i % 64));
                m += 2 * p;
            }
        }
        if start == 1 && n_odd > 0 {
            bits[0] &= !1;
        }
        Self { lo, hi, base: start, bits }
    }

    pub fn is_prime(&self, n: u64) -> bool {
        debug_assert!(n >= self.lo && n < self.hi);
        if n == 2 {
            return true;
        }
        if n % 2 == 0 {
            return false;
        }
        let i = (n - self.base) / 2;
        self.bits[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        let two = (self.lo <= 2 && 2 < self.hi).then_some(2);
        let odd = self.bits.iter().enumerate().flat_map(move |(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as u64;
                rest &= rest - 1;
                Some(self.base + 2 * (w as u64 * 64 + b))
            })
        });
        two.into_iter().chain(odd.take_while(move |&n| n < self.hi))
    }

    pub fn count(&self) -> u64 {
        self.primes().count() as u64
    }
}

/// A contiguous `[lo, hi)` covered by fixed-size segments.
#[derive(Clone, Debug)]
pub struct PrimeRange {
    pub lo: u64,
    pub hi: u64,
    segments: Vec<SieveSegment>,
}

impl PrimeRange {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        Self::with_limits(lo, hi, SEGMENT, DEFAULT_BUDGET)
    }

    /// Sieve `[lo, hi)` in segments of `seg` numbers; refuses spans above `budget`.
    pub fn with_limits(lo: u64, hi: u64, seg: u64, budget: u64) -> Result<Self> {
        let hi = hi.max(lo);
        if hi - lo > budget {
            return Err(Error::Resource(format!(
                "span {} exceeds sieve budget {budget}; split the range",
                hi - lo
            )));
        }
        if hi > u64::MAX / 4 {
            return Err(Error::Resource(format!("upper bound {hi} beyond sieve range")));
        }
        let base = small_primes(isqrt(hi) + 2);
        let segments = par::map_ordered(par::chunks(lo..hi, seg), |r| SieveSegment::new(r.start, r.end, &base));
        Ok(Self { lo, hi, segments })
    }

    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n >= self.lo && n < self.hi, "{n} outside [{}, {})", self.lo, self.hi);
        let seg = self.segments[0].hi - self.segments[0].lo;
        self.segments[((n - self.lo) / seg) as usize].is_prime(n)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.segments.iter().flat_map(|s| s.primes())
    }

    pub fn count(&self) -> u64 {
        self.segments.iter().map(|s| s.count()).sum()
    }
}

/// The primes in `[lo, hi)`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Result<Vec<u64>> {
    Ok(PrimeRange::new(lo, hi)?.primes().collect())
}

/// pi(x) for x below the sieve budget, by segment accumulation.
pub fn prime_pi(x: u64) -> Result<u64> {
    Ok(PrimeRange::new(0, x + 1)?.count())
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic primality for any u64 (Miller-Rabin with the first twelve
/// prime bases, which has no pseudoprimes below 3.3e24).
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Prime factorisation as (p, exponent) pairs by trial division.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Λ(n): log p when n is a power of the prime p, zero otherwise.
pub fn mangoldt(n: u64) -> f64 {
    assert!(n >= 1);
    match factor(n).as_slice() {
        [(p, _)] => (*p as f64).ln(),
        _ => 0.0,
    }
}

pub fn moebius(n: u64) -> i8 {
    assert!(n >= 1);
    let f = factor(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

fn binom(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as u64
}

/// Number of ordered factorisations n = m_1 ... m_k.
pub fn tau_k(n: u64, k: u32) -> u64 {
    assert!(n >= 1 && k >= 1);
    factor(n)
        .into_iter()
        .map(|(_, e)| binom(e as u64 + k as u64 - 1, k as u64 - 1))
        .product()
}

/// Smallest-prime-factor table for `0..n`.
#[derive(Clone, Debug)]
pub struct SpfTable {
    spf: Vec<u32>,
}

impl SpfTable {
    pub fn new(n: usize) -> Self {
        let mut spf = vec![0u32; n.max(2)];
        for i in 2..spf.len() {
            if spf[i] == 0 {
                let mut j = i;
                while j < spf.len() {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Self { spf }
    }

    pub fn len(&self) -> usize {
        self.spf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spf.len() <= 2
    }

    pub fn factor(&self, mut n: u64) -> Vec<(u64, u32)> {
        if n as usize >= self.spf.len() {
            return factor(n);
        }
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            n /= p;
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    pub fn mangoldt(&self, n: u64) -> f64 {
        match self.factor(n).as_slice() {
            [(p, _)] => (*p as f64).ln(),
            _ => 0.0,
        }
    }

    pub fn moebius(&self, n: u64) -> i8 {
        let f = self.factor(n);
        if f.iter().any(|&(_, e)| e > 1) {
            0
        } else if f.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn tau_k(&self, n: u64, k: u32) -> u64 {
        self.factor(n)
            .into_iter()
            .map(|(_, e)| binom(e as u64 + k as u64 - 1, k as u64 - 1))
            .product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn small_ranges() {
        assert_eq!(primes_in(10, 20).unwrap(), vec![11, 13, 17, 19]);
        assert_eq!(primes_in(2, 3).unwrap(), vec![2]);
        assert_eq!(primes_in(0, 10).unwrap(), vec![2, 3, 5, 7]);
        assert!(primes_in(24, 29).unwrap().is_empty());
    }

    #[test]
    fn segment_boundaries_do_not_lose_primes() {
        let r = PrimeRange::with_limits(1000, 5000, 97, DEFAULT_BUDGET).unwrap();
        let want: Vec<u64> = (1000..5000).filter(|&n| trial(n)).collect();
        assert_eq!(r.primes().collect::<Vec<_>>(), want);
        for n in 1000..5000 {
            assert_eq!(r.is_prime(n), trial(n));
        }
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(PrimeRange::with_limits(0, 1 << 20, 1 << 10, 1 << 16), Err(Error::Resource(_))));
    }

    #[test]
    fn function_values() {
        assert_eq!(mangoldt(8), 2f64.ln());
        assert_eq!(mangoldt(6), 0.0);
        assert_eq!(mangoldt(7), 7f64.ln());
        assert_eq!(mangoldt(1), 0.0);
        assert_eq!(moebius(1), 1);
        assert_eq!(moebius(4), 0);
        assert_eq!(moebius(30), -1);
        assert_eq!(tau_k(1, 5), 1);
        assert_eq!(tau_k(4, 5), 15);
        assert_eq!(tau_k(101, 5), 5);
    }

    #[test]
    fn tau5_is_fivefold_convolution_of_one() {
        let n = 1000usize;
        let mut t = vec![1u64; n + 1];
        for _ in 1..5 {
            let mut next = vec![0u64; n + 1];
            for d in 1..=n {
                for m in (d..=n).step_by(d) {
                    next[m] += t[d];
                }
            }
            t = next;
        }
        let spf = SpfTable::new(n + 1);
        for m in 1..=n {
            assert_eq!(tau_k(m as u64, 5), t[m], "n = {m}");
            assert_eq!(spf.tau_k(m as u64, 5), t[m]);
        }
    }

    #[test]
    fn divisor_sums() {
        let spf = SpfTable::new(10_001);
        for n in 1..=10_000u64 {
            let divs: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
            let mu: i64 = divs.iter().map(|&d| spf.moebius(d) as i64).sum();
            assert_eq!(mu, (n == 1) as i64);
            let lam: f64 = divs.iter().map(|&d| spf.mangoldt(d)).sum();
            assert!((lam - (n as f64).ln()).abs() <= 1e-12 * (n as f64).ln().max(1.0));
        }
    }

    #[test]
    fn miller_rabin_agrees_with_trial_division() {
        for n in 0..20_000 {
            assert_eq!(is_prime(n), trial(n), "n = {n}");
        }
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751));
    }

    proptest! {
        #[test]
        fn tau_multiplicative(a in 1u64..1000, b in 1u64..1000, k in 1u32..7) {
            let g = (1..=a.min(b)).rev().find(|d| a % d == 0 && b % d == 0).unwrap();
            prop_assume!(g == 1);
            prop_assert_eq!(tau_k(a * b, k), tau_k(a, k) * tau_k(b, k));
        }

        #[test]
        fn sieve_samples_match_trial(lo in 2u64..2_000_000, w in 1u64..3000) {
            let r = PrimeRange::with_limits(lo, lo + w, 1024, DEFAULT_BUDGET).unwrap();
            for n in (lo..lo + w).step_by(7) {
                prop_assert_eq!(r.is_prime(n), trial(n));
            }
        }
    }
}

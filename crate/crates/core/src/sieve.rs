// SPDX-License-Identifier: Apache-2.0

//! Segmented sieve of Eratosthenes and the prime counting functions built on it.
//!
//! A [`PrimeTable`] stores every prime up to `x_max` together with the higher
//! prime powers `p^k ≤ x_max`, `k ≥ 2`, and compensated prefix sums of their
//! logarithms, so `π(x)` and `ψ(x)` are binary searches.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{ChebError, Result};
use crate::quad::{self, NeumaierAcc};

/// A higher prime power `value = prime^exponent` with `exponent ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PrimePower {
    pub value: u64,
    pub prime: u64,
    pub exponent: u32,
}

#[derive(Debug, Clone)]
pub struct PrimeTable {
    x_max: u64,
    primes: Vec<u64>,
    /// `log_prefix[i]` is `Σ_{j<i} log primes[j]`.
    log_prefix: Vec<f64>,
    higher: Vec<PrimePower>,
    higher_log_prefix: Vec<f64>,
}

/// Largest `m` with `m^k ≤ n`.
pub fn iroot(n: u64, k: u32) -> u64 {
    if k == 1 || n < 2 {
        return n;
    }
    let mut m = (n as f64).powf(1.0 / k as f64).round() as u64;
    let pow_le = |m: u64| -> bool {
        let mut acc: u128 = 1;
        for _ in 0..k {
            acc *= m as u128;
            if acc > n as u128 {
                return false;
            }
        }
        true
    };
    while m > 0 && !pow_le(m) {
        m -= 1;
    }
    while pow_le(m + 1) {
        m += 1;
    }
    m
}

fn small_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Odd primes in `[lo, hi)` for odd `lo`, using `base` (odd primes ≤ √hi).
fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    let len = (hi - lo).div_ceil(2);
    let mut composite = vec![false; len as usize];
    for &p in base {
        if p * p >= hi {
            break;
        }
        let mut start = (p * p).max(lo.div_ceil(p) * p);
        if start % 2 == 0 {
            start += p;
        }
        let mut j = (start - lo) / 2;
        while j < len {
            composite[j as usize] = true;
            j += p;
        }
    }
    composite
        .iter()
        .enumerate()
        .filter(|(_, &c)| !c)
        .map(|(i, _)| lo + 2 * i as u64)
        .filter(|&n| n > 1)
        .collect()
}

fn enumerate_primes(x_max: u64) -> Vec<u64> {
    let root = iroot(x_max, 2);
    let base: Vec<u64> = small_primes(root).into_iter().filter(|&p| p > 2).collect();
    let seg = (root * 8).max(1 << 16) & !1;
    let n_segments = (x_max + 1).div_ceil(seg);
    let chunks: Vec<Vec<u64>> = (0..n_segments)
        .into_par_iter()
        .map(|s| {
            let lo = (s * seg).max(1) | 1;
            let hi = ((s + 1) * seg).min(x_max + 1);
            if lo >= hi {
                Vec::new()
            } else {
                sieve_segment(lo, hi, &base)
            }
        })
        .collect();
    let mut primes = Vec::with_capacity(chunks.iter().map(Vec::len).sum::<usize>() + 1);
    primes.push(2);
    for chunk in chunks {
        primes.extend(chunk);
    }
    primes
}

fn prefix_logs(values: impl Iterator<Item = u64>, capacity: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(capacity + 1);
    let mut acc = NeumaierAcc::default();
    out.push(0.0);
    for v in values {
        acc.add((v as f64).ln());
        out.push(acc.value());
    }
    out
}

impl PrimeTable {
    /// Sieves all primes `≤ x_max`.
    pub fn build(x_max: u64) -> Result<Self> {
        if x_max < 2 {
            return Err(ChebError::invalid(format!("x_max must be at least 2, got {x_max}")));
        }
        Ok(Self::from_primes(x_max, enumerate_primes(x_max)))
    }

    fn from_primes(x_max: u64, primes: Vec<u64>) -> Self {
        let mut higher = Vec::new();
        for &p in &primes {
            if p > x_max / p {
                break;
            }
            let mut value = p * p;
            let mut exponent = 2;
            loop {
                higher.push(PrimePower { value, prime: p, exponent });
                match value.checked_mul(p) {
                    Some(v) if v <= x_max => {
                        value = v;
                        exponent += 1;
                    }
                    _ => break,
                }
            }
        }
        higher.sort_unstable();
        let log_prefix = prefix_logs(primes.iter().copied(), primes.len());
        let higher_log_prefix = prefix_logs(higher.iter().map(|h| h.prime), higher.len());
        PrimeTable { x_max, primes, log_prefix, higher, higher_log_prefix }
    }

    pub fn x_max(&self) -> u64 {
        self.x_max
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Prime powers `p^k` with `k ≥ 2`, ascending.
    pub fn higher_powers(&self) -> &[PrimePower] {
        &self.higher
    }

    /// All prime powers `(p^k, k)` up to `x_max`, ascending.
    pub fn prime_powers(&self) -> impl Iterator<Item = PrimePower> + '_ {
        let mut primes = self.primes.iter().peekable();
        let mut higher = self.higher.iter().peekable();
        std::iter::from_fn(move || match (primes.peek(), higher.peek()) {
            (Some(&&p), Some(&&h)) if p < h.value => {
                primes.next();
                Some(PrimePower { value: p, prime: p, exponent: 1 })
            }
            (_, Some(_)) => higher.next().copied(),
            (Some(&&p), None) => {
                primes.next();
                Some(PrimePower { value: p, prime: p, exponent: 1 })
            }
            (None, None) => None,
        })
    }

    /// Validates `x` against the sieved range and returns `⌊x⌋`.
    pub fn floor_checked(&self, x: f64) -> Result<u64> {
        if x.is_nan() || x < 0.0 || x > self.x_max as f64 {
            return Err(ChebError::OutOfRange { x, x_max: self.x_max });
        }
        Ok(x.floor() as u64)
    }

    /// `π(n)` for an integer `n`; values above `x_max` saturate.
    pub fn pi_int(&self, n: u64) -> u64 {
        self.primes.partition_point(|&p| p <= n) as u64
    }

    pub fn pi(&self, x: f64) -> Result<u64> {
        Ok(self.pi_int(self.floor_checked(x)?))
    }

    fn higher_count(&self, n: u64) -> usize {
        self.higher.partition_point(|h| h.value <= n)
    }

    /// Chebyshev `θ(x) = Σ_{p ≤ x} log p`.
    pub fn theta(&self, x: f64) -> Result<f64> {
        let n = self.floor_checked(x)?;
        Ok(self.log_prefix[self.pi_int(n) as usize])
    }

    /// Chebyshev `ψ(x) = Σ_{n ≤ x} Λ(n)`.
    pub fn psi(&self, x: f64) -> Result<f64> {
        let n = self.floor_checked(x)?;
        Ok(self.log_prefix[self.pi_int(n) as usize] + self.higher_log_prefix[self.higher_count(n)])
    }

    /// Riemann's prime-power count `Π(x) = Σ_{p^k ≤ x} 1/k`.
    pub fn big_pi(&self, x: f64) -> Result<f64> {
        let n = self.floor_checked(x)?;
        Ok(self.pi_int(n) as f64 + self.r_x1(x)?)
    }

    /// `R(x,1) = Σ_{k≥2} π(x^{1/k})/k`, the higher prime power part of `Π(x)`.
    pub fn r_x1(&self, x: f64) -> Result<f64> {
        let n = self.floor_checked(x)?;
        let mut acc = 0.0;
        let mut k = 2u32;
        loop {
            let root = iroot(n, k);
            if root < 2 {
                break;
            }
            acc += self.pi_int(root) as f64 / k as f64;
            k += 1;
        }
        Ok(acc)
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n <= self.x_max && self.primes.binary_search(&n).is_ok()
    }

    /// von Mangoldt `Λ(n)`; `n` must not exceed `x_max`.
    pub fn von_mangoldt(&self, n: u64) -> f64 {
        if self.is_prime(n) {
            return (n as f64).ln();
        }
        match self.higher.binary_search_by_key(&n, |h| h.value) {
            Ok(i) => (self.higher[i].prime as f64).ln(),
            Err(_) => 0.0,
        }
    }

    /// Writes the prime list as `CHEBPRIMES1`, little-endian `x_max`, then
    /// LEB128 varint gaps between consecutive primes (the first gap is from 0).
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&self.x_max.to_le_bytes())?;
        let mut prev = 0u64;
        let mut buf = [0u8; 10];
        for &p in &self.primes {
            let n = encode_varint(p - prev, &mut buf);
            w.write_all(&buf[..n])?;
            prev = p;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_cache(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
        if bytes.len() < CACHE_MAGIC.len() + 8 || &bytes[..CACHE_MAGIC.len()] != CACHE_MAGIC {
            return Err(ChebError::Format("missing CHEBPRIMES1 header".into()));
        }
        let mut pos = CACHE_MAGIC.len();
        let x_max = u64::from_le_bytes(bytes[pos..pos + 8].try_into().expect("8 bytes"));
        pos += 8;
        let mut primes = Vec::new();
        let mut prev = 0u64;
        while pos < bytes.len() {
            let (gap, used) = decode_varint(&bytes[pos..])
                .ok_or_else(|| ChebError::Format(format!("truncated varint at byte {pos}")))?;
            pos += used;
            if gap == 0 {
                return Err(ChebError::Format("zero gap between primes".into()));
            }
            prev += gap;
            if prev > x_max {
                return Err(ChebError::Format(format!("prime {prev} exceeds x_max {x_max}")));
            }
            primes.push(prev);
        }
        if x_max < 2 || primes.first() != Some(&2) {
            return Err(ChebError::Format("prime list must start at 2".into()));
        }
        Ok(Self::from_primes(x_max, primes))
    }
}

pub const CACHE_MAGIC: &[u8] = b"CHEBPRIMES1";

fn encode_varint(mut v: u64, buf: &mut [u8; 10]) -> usize {
    let mut i = 0;
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            buf[i] = byte;
            return i + 1;
        }
        buf[i] = byte | 0x80;
        i += 1;
    }
}

fn decode_varint(bytes: &[u8]) -> Option<(u64, usize)> {
    let mut v = 0u64;
    for (i, &b) in bytes.iter().enumerate().take(10) {
        v |= ((b & 0x7f) as u64) << (7 * i);
        if b & 0x80 == 0 {
            return Some((v, i + 1));
        }
    }
    None
}

/// Logarithmic integral `Li(x) = ∫_2^x dt / log t`, by adaptive quadrature in
/// the variable `u = log t`.
pub fn li(x: f64) -> Result<f64> {
    if x.is_nan() || x < 2.0 {
        return Err(ChebError::invalid(format!("Li(x) needs x >= 2, got {x}")));
    }
    Ok(li_between(2.0, x))
}

/// `∫_a^b dt / log t` for `2 ≤ a ≤ b`.
pub(crate) fn li_between(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    quad::integrate(|u: f64| u.exp() / u, a.ln(), b.ln(), 1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_primes(limit: u64) -> Vec<u64> {
        (2..=limit).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect()
    }

    #[test]
    fn build_small_tables() {
        assert_eq!(PrimeTable::build(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(PrimeTable::build(2).unwrap().primes(), &[2]);
        assert_eq!(PrimeTable::build(100).unwrap().primes().len(), 25);
        assert!(matches!(PrimeTable::build(1), Err(ChebError::InvalidArgument(_))));
    }

    #[test]
    fn segmented_sieve_matches_trial_division() {
        for x_max in [3u64, 4, 30, 31, 1000, 65_537, 200_003] {
            let table = PrimeTable::build(x_max).unwrap();
            if x_max <= 65_537 {
                assert_eq!(table.primes(), trial_primes(x_max).as_slice(), "x_max={x_max}");
            } else {
                assert_eq!(table.primes().len(), 17_985);
            }
        }
    }

    #[test]
    fn counting_examples() {
        let t = PrimeTable::build(100).unwrap();
        assert_eq!(t.pi(10.0).unwrap(), 4);
        assert_eq!(t.pi(1.0).unwrap(), 0);
        assert_eq!(t.pi(100.0).unwrap(), 25);
        assert_eq!(t.pi(10.99).unwrap(), 4);
        assert!(matches!(t.pi(100.5), Err(ChebError::OutOfRange { .. })));

        assert_eq!(t.psi(1.0).unwrap(), 0.0);
        let l2 = 2f64.ln();
        let l3 = 3f64.ln();
        assert!((t.psi(4.0).unwrap() - (2.0 * l2 + l3)).abs() < 1e-14);
        // 2,3,4,5,7,8,9
        let expect = 3.0 * l2 + 2.0 * l3 + 5f64.ln() + 7f64.ln();
        assert!((t.psi(10.0).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn r_x1_examples() {
        let t = PrimeTable::build(100).unwrap();
        assert_eq!(t.r_x1(3.0).unwrap(), 0.0);
        assert_eq!(t.r_x1(4.0).unwrap(), 0.5);
        let expect = 4.0 / 2.0 + 2.0 / 3.0 + 2.0 / 4.0 + 1.0 / 5.0 + 1.0 / 6.0;
        assert!((t.r_x1(100.0).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn prime_powers_merge_is_sorted_and_complete() {
        let t = PrimeTable::build(1000).unwrap();
        let all: Vec<PrimePower> = t.prime_powers().collect();
        assert!(all.windows(2).all(|w| w[0].value < w[1].value));
        let expect: Vec<u64> = (2..=1000u64).filter(|&n| crate::arith::prime_power(n).is_some()).collect();
        assert_eq!(all.iter().map(|p| p.value).collect::<Vec<_>>(), expect);
        for pp in &all {
            assert_eq!(pp.prime.pow(pp.exponent), pp.value);
        }
    }

    #[test]
    fn li_small_values() {
        assert_eq!(li(2.0).unwrap(), 0.0);
        assert!(li(1.5).is_err());
        // midpoint rule with 10^6 panels
        let n = 1_000_000;
        let h = 8.0 / n as f64;
        let mid: f64 = quad::neumaier_sum((0..n).map(|i| h / (2.0 + (i as f64 + 0.5) * h).ln()));
        assert!((li(10.0).unwrap() - mid).abs() < 1e-8);
    }

    #[test]
    fn iroot_exact() {
        assert_eq!(iroot(100, 3), 4);
        assert_eq!(iroot(64, 3), 4);
        assert_eq!(iroot(63, 3), 3);
        assert_eq!(iroot(u64::MAX, 2), 4_294_967_295);
        assert_eq!(iroot(1, 5), 1);
    }

    #[test]
    fn cache_round_trip_and_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("primes.bin");
        let t = PrimeTable::build(50_000).unwrap();
        t.write_cache(&path).unwrap();
        let back = PrimeTable::read_cache(&path).unwrap();
        assert_eq!(back.x_max(), 50_000);
        assert_eq!(back.primes(), t.primes());
        assert_eq!(back.psi(50_000.0).unwrap(), t.psi(50_000.0).unwrap());

        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..11], b"CHEBPRIMES1");
        assert_eq!(u64::from_le_bytes(bytes[11..19].try_into().unwrap()), 50_000);
        assert_eq!(bytes[19], 2);

        std::fs::write(&path, b"NOTPRIMES").unwrap();
        assert!(matches!(PrimeTable::read_cache(&path), Err(ChebError::Format(_))));
    }
}

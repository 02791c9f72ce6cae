//! Segmented sieve of Eratosthenes over odd numbers.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Default refusal threshold for [`PrimeSet::sieve`].
pub const DEFAULT_SIEVE_CAP: u64 = 1_000_000_000;

/// Words per segment: 4096 words hold 262144 odd numbers.
const SEGMENT_WORDS: usize = 4096;

/// Membership table of the primes in `[0, limit]`.
///
/// Only odd numbers are stored; `2` is handled explicitly. The table is
/// immutable after construction and can be shared across threads.
#[derive(Clone, Debug)]
pub struct PrimeSet {
    limit: u64,
    // bit i of the odd table <=> 2i+1 is prime
    odd_bits: Vec<u64>,
    count: usize,
}

impl PrimeSet {
    /// Sieves `[0, limit]` with the default cap.
    pub fn sieve(limit: u64) -> Result<Self> {
        Self::sieve_with_cap(limit, DEFAULT_SIEVE_CAP)
    }

    pub fn sieve_with_cap(limit: u64, cap: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::invalid("limit", "sieve limit must be at least 2"));
        }
        if limit > cap {
            return Err(Error::ResourceLimit {
                what: "sieve limit",
                requested: limit as u128,
                cap: cap as u128,
            });
        }
        let odd_len = (limit / 2 + 1) as usize; // indices 0..=limit/2
        let words = odd_len.div_ceil(64);
        let base = small_odd_primes(crate::arith::intmath::integer_root(limit, 2));

        let mut odd_bits = vec![0u64; words];
        odd_bits
            .par_chunks_mut(SEGMENT_WORDS)
            .enumerate()
            .for_each(|(seg, chunk)| sieve_segment(seg * SEGMENT_WORDS * 64, chunk, &base));

        // 1 is not prime; clear everything past `limit`.
        odd_bits[0] &= !1;
        let max_idx = ((limit - 1) / 2) as usize; // largest odd <= limit
        let tail = max_idx + 1;
        if tail % 64 != 0 {
            let w = tail / 64;
            odd_bits[w] &= (1u64 << (tail % 64)) - 1;
        }
        for w in odd_bits.iter_mut().skip(tail.div_ceil(64)) {
            *w = 0;
        }
        let count = 1 + odd_bits.iter().map(|w| w.count_ones() as usize).sum::<usize>();
        Ok(PrimeSet {
            limit,
            odd_bits,
            count,
        })
    }

    #[inline]
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Number of primes `<= limit`.
    #[inline]
    pub fn count(&self) -> usize {
        self.count
    }

    /// Whether `n` is prime. Panics if `n > limit`.
    #[inline]
    pub fn contains(&self, n: u64) -> bool {
        assert!(n <= self.limit, "{n} is beyond the sieve limit {}", self.limit);
        if n < 3 {
            return n == 2;
        }
        if n % 2 == 0 {
            return false;
        }
        let i = (n / 2) as usize;
        self.odd_bits[i / 64] >> (i % 64) & 1 == 1
    }

    /// Primes in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        std::iter::once(2).chain(self.odd_bits.iter().enumerate().flat_map(|(w, &word)| {
            BitIter(word).map(move |b| 2 * (w as u64 * 64 + b as u64) + 1)
        }))
    }

    pub fn iter_upto(&self, bound: u64) -> impl Iterator<Item = u64> + '_ {
        self.iter().take_while(move |&p| p <= bound)
    }

    /// Number of primes `<= x` (linear scan over words).
    pub fn pi(&self, x: u64) -> usize {
        let x = x.min(self.limit);
        if x < 2 {
            return 0;
        }
        if x < 3 {
            return 1;
        }
        let max_idx = ((x - 1) / 2) as usize;
        let full = (max_idx + 1) / 64;
        let mut c: usize = self.odd_bits[..full].iter().map(|w| w.count_ones() as usize).sum();
        let rem = (max_idx + 1) % 64;
        if rem > 0 {
            c += (self.odd_bits[full] & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        c + 1
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }
}

pub(crate) struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = u32;
    #[inline]
    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let t = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(t)
    }
}

fn small_odd_primes(bound: u64) -> Vec<u64> {
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            if i > 2 {
                out.push(i as u64);
            }
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Sieves the odd indices `[start_idx, start_idx + 64*chunk.len())`.
fn sieve_segment(start_idx: usize, chunk: &mut [u64], base: &[u64]) {
    chunk.fill(u64::MAX);
    let lo = 2 * start_idx as u64 + 1;
    let end_idx = start_idx + chunk.len() * 64;
    let hi = 2 * end_idx as u64 + 1; // exclusive
    for &p in base {
        let p2 = p * p;
        if p2 >= hi {
            break;
        }
        let mut m = if p2 >= lo { p2 } else { lo.div_ceil(p) * p };
        if m % 2 == 0 {
            m += p;
        }
        let mut idx = (m / 2) as usize - start_idx;
        let step = p as usize;
        let len = chunk.len() * 64;
        while idx < len {
            chunk[idx / 64] &= !(1u64 << (idx % 64));
            idx += step;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::intmath::is_prime_trial;

    #[test]
    fn small_limits() {
        assert_eq!(PrimeSet::sieve(10).unwrap().to_vec(), vec![2, 3, 5, 7]);
        assert_eq!(PrimeSet::sieve(2).unwrap().to_vec(), vec![2]);
        assert_eq!(PrimeSet::sieve(3).unwrap().to_vec(), vec![2, 3]);
        assert_eq!(PrimeSet::sieve(100).unwrap().count(), 25);
        assert!(PrimeSet::sieve(1).is_err());
    }

    #[test]
    fn agrees_with_trial_division() {
        let limit = 100_000;
        let ps = PrimeSet::sieve(limit).unwrap();
        for n in 0..=limit {
            assert_eq!(ps.contains(n), is_prime_trial(n), "n = {n}");
        }
        assert_eq!(ps.pi(limit), ps.count());
        assert_eq!(ps.pi(1000), 168);
    }

    #[test]
    fn segment_boundaries() {
        // limits straddling a segment of 2^19 integers
        for limit in [524_287u64, 524_288, 524_289, 1_048_577] {
            let ps = PrimeSet::sieve(limit).unwrap();
            let direct = (limit.saturating_sub(200)..=limit).filter(|&n| is_prime_trial(n)).count();
            let sieved = (limit.saturating_sub(200)..=limit).filter(|&n| ps.contains(n)).count();
            assert_eq!(direct, sieved);
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            PrimeSet::sieve_with_cap(1000, 999),
            Err(Error::ResourceLimit { .. })
        ));
    }
}

//! Counting ordered representations `n = p₁^k + ⋯ + p_s^k`.

use std::ops::RangeInclusive;

use num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::arith::intmath::integer_root;
use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::majorant::PrimeFilter;

/// Largest `n` accepted by the brute-force counter.
pub const BRUTE_MAX_N: u64 = 100_000;
/// Largest `s · n` accepted by the FFT counter.
pub const FFT_MAX_GRID: u64 = 1_000_000_000;
/// Counts at or above this cannot be recovered exactly from `f64`.
pub const FFT_EXACT_LIMIT: f64 = (1u64 << 52) as f64;
/// Largest distance from an integer tolerated in recovered FFT counts.
pub const FFT_ROUNDING_SLACK: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMethod {
    Brute,
    Fft,
    /// Reachability only: every count is `0` or `1`.
    Bitset,
}

impl std::str::FromStr for CountMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(CountMethod::Brute),
            "fft" => Ok(CountMethod::Fft),
            "bitset" => Ok(CountMethod::Bitset),
            _ => Err(Error::invalid("method", format!("{s:?} is not one of brute, fft, bitset"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentationCounts {
    pub k: u64,
    pub s: u64,
    pub lo: u64,
    pub hi: u64,
    pub method: CountMethod,
    /// `counts[i]` is the count at `lo + i`.
    pub counts: Vec<u64>,
}

impl RepresentationCounts {
    pub fn get(&self, n: u64) -> Option<u64> {
        n.checked_sub(self.lo).and_then(|i| self.counts.get(i as usize).copied())
    }
}

/// `{p^k <= hi : p admitted}`, sorted.
pub fn prime_powers(subset: &dyn PrimeFilter, k: u64, hi: u64) -> Result<Vec<u64>> {
    if k == 0 || k > 63 {
        return Err(Error::invalid("k", "must be in [1, 63]"));
    }
    let root = integer_root(hi, k as u32);
    if subset.limit() < root {
        return Err(Error::invalid(
            "subset",
            format!("generated to {} but primes up to {root} are needed", subset.limit()),
        ));
    }
    Ok((2..=root).filter(|&p| subset.admits(p)).map(|p| p.pow(k as u32)).collect())
}

/// Number of ordered `s`-tuples from `powers` with each sum, for every sum
/// up to `s · max(powers)`. The total is `|powers|^s`.
pub fn fft_distribution(powers: &[u64], s: u64) -> Result<Vec<u64>> {
    if s == 0 {
        return Err(Error::invalid("s", "must be positive"));
    }
    let top = powers.iter().copied().max().unwrap_or(0);
    let span = s.checked_mul(top).ok_or(Error::Overflow("s · max power"))?;
    if span > FFT_MAX_GRID {
        return Err(Error::ResourceLimit { what: "fft grid", requested: span as u128, cap: FFT_MAX_GRID as u128 });
    }
    let m = (span as usize + 1).next_power_of_two();
    let mut buf = vec![Complex::new(0.0f64, 0.0); m];
    for &x in powers {
        buf[x as usize].re += 1.0;
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut buf);
    let e = i32::try_from(s).map_err(|_| Error::Overflow("s"))?;
    for z in buf.iter_mut() {
        *z = z.powi(e);
    }
    planner.plan_fft_inverse(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    let mut out = Vec::with_capacity(span as usize + 1);
    for (n, z) in buf.iter().take(span as usize + 1).enumerate() {
        let x = z.re * scale;
        if x.abs() >= FFT_EXACT_LIMIT {
            return Err(Error::FftPrecision(format!(
                "count at n={n} is about {x:.3e}, beyond exact f64 integers; use the brute or bitset method"
            )));
        }
        let r = x.round();
        if (x - r).abs() > FFT_ROUNDING_SLACK || r < 0.0 {
            return Err(Error::FftPrecision(format!("value {x} at n={n} is not close to a count")));
        }
        out.push(r as u64);
    }
    Ok(out)
}

fn brute_counts(powers: &[u64], s: u64, hi: u64) -> Result<Vec<u64>> {
    let mut c = vec![0u64; hi as usize + 1];
    match s {
        1 => {
            for &x in powers {
                c[x as usize] += 1;
            }
        }
        2 => {
            for &x in powers {
                for &y in powers.iter().take_while(|&&y| x + y <= hi) {
                    c[(x + y) as usize] += 1;
                }
            }
        }
        3 => {
            for &x in powers {
                for &y in powers.iter().take_while(|&&y| x + y <= hi) {
                    for &z in powers.iter().take_while(|&&z| x + y + z <= hi) {
                        c[(x + y + z) as usize] += 1;
                    }
                }
            }
        }
        _ => return Err(Error::invalid("s", "brute force supports s <= 3")),
    }
    Ok(c)
}

/// Reachable sums `<= hi` of exactly `s` admitted `k`-th powers.
pub fn reachable(powers: &[u64], s: u64, hi: u64) -> Result<BitSet> {
    if s == 0 {
        return Err(Error::invalid("s", "must be positive"));
    }
    let len = usize::try_from(hi + 1).map_err(|_| Error::Overflow("hi"))?;
    let base = BitSet::from_indices(len, powers.iter().filter(|&&x| x <= hi).map(|&x| x as usize));
    Ok(base.multiple_linear(s))
}

pub fn count_representations(
    subset: &dyn PrimeFilter,
    k: u64,
    s: u64,
    range: RangeInclusive<u64>,
    method: CountMethod,
) -> Result<RepresentationCounts> {
    let (lo, hi) = (*range.start(), *range.end());
    if lo > hi {
        return Err(Error::invalid("range", "empty range"));
    }
    if s == 0 {
        return Err(Error::invalid("s", "must be positive"));
    }
    let powers = prime_powers(subset, k, hi)?;
    let slice = |full: &[u64]| (lo..=hi).map(|n| full.get(n as usize).copied().unwrap_or(0)).collect();
    let counts = match method {
        CountMethod::Brute => {
            if s > 3 || hi > BRUTE_MAX_N {
                return Err(Error::invalid("method", "brute force needs s <= 3 and n <= 100000"));
            }
            slice(&brute_counts(&powers, s, hi)?)
        }
        CountMethod::Fft => {
            if s.saturating_mul(hi) > FFT_MAX_GRID {
                return Err(Error::ResourceLimit {
                    what: "fft grid",
                    requested: s as u128 * hi as u128,
                    cap: FFT_MAX_GRID as u128,
                });
            }
            slice(&fft_distribution(&powers, s)?)
        }
        CountMethod::Bitset => {
            let reach = reachable(&powers, s, hi)?;
            (lo..=hi).map(|n| reach.contains(n as usize) as u64).collect()
        }
    };
    Ok(RepresentationCounts { k, s, lo, hi, method, counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PrimeSet;

    #[test]
    fn two_prime_squares() {
        let primes = PrimeSet::sieve(1000).unwrap();
        for method in [CountMethod::Brute, CountMethod::Fft] {
            let c = count_representations(&primes, 2, 2, 0..=20, method).unwrap();
            assert_eq!((c.get(8), c.get(13), c.get(7)), (Some(1), Some(2), Some(0)), "{method:?}");
        }
        let c = count_representations(&primes, 2, 2, 0..=20, CountMethod::Bitset).unwrap();
        assert_eq!((c.get(13), c.get(7)), (Some(1), Some(0)));
    }

    #[test]
    fn distribution_mass() {
        let d = fft_distribution(&[4, 9, 25], 3).unwrap();
        assert_eq!(d.iter().sum::<u64>(), 27);
        assert_eq!(d[12], 1);
        assert_eq!(d[17], 3);
    }
}

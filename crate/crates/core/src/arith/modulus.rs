use serde::{Deserialize, Serialize};

use super::intmath::gcd;
use crate::error::{Error, Result};

/// A positive integer stored together with its prime factorisation.
///
/// Factors are kept in increasing prime order with positive exponents, so
/// totients, gcds with other factored moduli and smooth/rough splits are
/// exact and never re-factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FactoredModulus {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredModulus {
    /// The modulus `1` (empty factorisation).
    pub fn one() -> Self {
        FactoredModulus {
            value: 1,
            factors: Vec::new(),
        }
    }

    /// Builds from `(prime, exponent)` pairs. Pairs may come in any order;
    /// repeated primes are merged. Primality of the bases is the caller's
    /// responsibility and is checked only in debug builds.
    pub fn from_factors(pairs: &[(u64, u32)]) -> Result<Self> {
        let mut factors: Vec<(u64, u32)> = Vec::with_capacity(pairs.len());
        let mut sorted: Vec<(u64, u32)> = pairs.iter().copied().filter(|&(_, e)| e > 0).collect();
        sorted.sort_unstable();
        for (p, e) in sorted {
            if p < 2 {
                return Err(Error::invalid("factors", format!("{p} is not a prime")));
            }
            debug_assert!(super::intmath::is_prime_trial(p));
            match factors.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => factors.push((p, e)),
            }
        }
        let mut value = 1u64;
        for &(p, e) in &factors {
            let pe = p.checked_pow(e).ok_or(Error::Overflow("modulus value"))?;
            value = value.checked_mul(pe).ok_or(Error::Overflow("modulus value"))?;
        }
        Ok(FactoredModulus { value, factors })
    }

    /// Factors `n` by trial division. Intended for moduli well below `2^40`.
    pub fn factorize(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("modulus", "must be positive"));
        }
        let mut rest = n;
        let mut factors = Vec::new();
        let mut p = 2u64;
        while p.saturating_mul(p) <= rest {
            if rest % p == 0 {
                let mut e = 0;
                while rest % p == 0 {
                    rest /= p;
                    e += 1;
                }
                factors.push((p, e));
            }
            p += if p == 2 { 1 } else { 2 };
        }
        if rest > 1 {
            factors.push((rest, 1));
        }
        Ok(FactoredModulus { value: n, factors })
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    pub fn divides(&self, other: &FactoredModulus) -> bool {
        self.factors
            .iter()
            .all(|&(p, e)| other.exponent_of(p) >= e)
    }

    pub fn gcd(&self, other: &FactoredModulus) -> FactoredModulus {
        let pairs: Vec<(u64, u32)> = self
            .factors
            .iter()
            .filter_map(|&(p, e)| {
                let f = e.min(other.exponent_of(p));
                (f > 0).then_some((p, f))
            })
            .collect();
        FactoredModulus::from_factors(&pairs).expect("gcd divides an existing modulus")
    }

    pub fn gcd_u64(&self, n: u64) -> u64 {
        gcd(self.value, n)
    }

    pub fn is_coprime_to(&self, n: u64) -> bool {
        self.factors.iter().all(|&(p, _)| n % p != 0)
    }

    /// Splits `self = u * v` where `u` collects the primes dividing `base`
    /// and `gcd(v, base) = 1`.
    pub fn split_by_support(&self, base: &FactoredModulus) -> (FactoredModulus, FactoredModulus) {
        let (smooth, rough): (Vec<_>, Vec<_>) = self
            .factors
            .iter()
            .partition(|&&(p, _)| base.exponent_of(p) > 0);
        (
            FactoredModulus::from_factors(&smooth).expect("part of a valid modulus"),
            FactoredModulus::from_factors(&rough).expect("part of a valid modulus"),
        )
    }

    pub fn mul(&self, other: &FactoredModulus) -> Result<FactoredModulus> {
        let mut pairs = self.factors.clone();
        pairs.extend_from_slice(&other.factors);
        FactoredModulus::from_factors(&pairs)
    }

    /// All positive divisors in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let current = divs.clone();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                divs.extend(current.iter().map(|d| d * pk));
            }
        }
        divs.sort_unstable();
        divs
    }
}

impl std::fmt::Display for FactoredModulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)?;
        if !self.factors.is_empty() {
            let parts: Vec<String> = self
                .factors
                .iter()
                .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
                .collect();
            write!(f, " = {}", parts.join("·"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_and_rebuild() {
        for n in 1..3000u64 {
            let m = FactoredModulus::factorize(n).unwrap();
            let back = FactoredModulus::from_factors(m.factors()).unwrap();
            assert_eq!(back.value(), n);
            assert!(m.factors().windows(2).all(|w| w[0].0 < w[1].0));
            assert_eq!(m.phi(), super::super::intmath::totient(n));
        }
    }

    #[test]
    fn smooth_rough_split() {
        let w = FactoredModulus::from_factors(&[(2, 4), (3, 4)]).unwrap();
        let q = FactoredModulus::factorize(2 * 2 * 5 * 7 * 9).unwrap();
        let (u, v) = q.split_by_support(&w);
        assert_eq!(u.value(), 36);
        assert_eq!(v.value(), 35);
        assert_eq!(q.gcd(&w).value(), 36);
    }

    #[test]
    fn divisors_of_240() {
        let m = FactoredModulus::factorize(240).unwrap();
        let d = m.divisors();
        assert_eq!(d.len(), 20);
        assert!(d.iter().all(|x| 240 % x == 0));
    }
}

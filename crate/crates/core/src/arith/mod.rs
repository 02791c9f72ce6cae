//! Exact arithmetic shared by every module: primes, factored moduli, the
//! local constants `τ`, `γ`, `R_k`, the W-trick modulus and rational
//! approximation.

pub mod intmath;
mod modulus;
pub mod rational;
mod sieve;
pub(crate) use sieve::BitIter;

pub use modulus::FactoredModulus;
pub use rational::{rational_approx, torus_distance, Convergents};
pub use sieve::{PrimeSet, DEFAULT_SIEVE_CAP};

use crate::error::{Error, Result};

/// Exponent of `p` in `k`: `p^τ ∥ k`.
pub fn tau(k: u64, p: u64) -> u32 {
    assert!(k >= 1 && p >= 2);
    let mut e = 0;
    let mut m = k;
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    e
}

/// `τ(k,p) + 2` when `p = 2` divides `k`, else `τ(k,p) + 1`.
pub fn gamma(k: u64, p: u64) -> u32 {
    let t = tau(k, p);
    if p == 2 && t > 0 {
        t + 2
    } else {
        t + 1
    }
}

/// Number of distinct prime factors.
pub fn omega(n: u64) -> usize {
    FactoredModulus::factorize(n).map_or(0, |m| m.omega())
}

/// The congruence modulus `R_k = ∏_{(p-1) | k} p^{γ(k,p)}`.
///
/// `(p - 1) | k` forces `p <= k + 1`, so scanning the primes up to `k + 1`
/// is complete.
pub fn compute_rk(k: u64) -> Result<FactoredModulus> {
    if k == 0 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    let pairs: Vec<(u64, u32)> = (2..=k + 1)
        .filter(|&p| intmath::is_prime_trial(p) && k % (p - 1) == 0)
        .map(|p| (p, gamma(k, p)))
        .collect();
    FactoredModulus::from_factors(&pairs)
}

/// The W-trick modulus `W = ∏_{p <= w} p^{2k}`.
pub fn compute_w(w: u64, k: u64) -> Result<FactoredModulus> {
    if w < 2 {
        return Err(Error::invalid("w", "must be at least 2"));
    }
    if k == 0 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    let e = u32::try_from(2 * k).map_err(|_| Error::Overflow("W exponent"))?;
    let pairs: Vec<(u64, u32)> = (2..=w)
        .filter(|&p| intmath::is_prime_trial(p))
        .map(|p| (p, e))
        .collect();
    FactoredModulus::from_factors(&pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_gamma_examples() {
        assert_eq!(tau(2, 2), 1);
        assert_eq!(tau(12, 2), 2);
        assert_eq!(tau(6, 5), 0);
        assert_eq!(gamma(2, 2), 3);
        assert_eq!(gamma(2, 3), 1);
        assert_eq!(gamma(4, 2), 4);
    }

    #[test]
    fn rk_values() {
        let got: Vec<u64> = (1..=6).map(|k| compute_rk(k).unwrap().value()).collect();
        assert_eq!(got, vec![2, 24, 2, 240, 2, 504]);
        assert!(compute_rk(0).is_err());
    }

    #[test]
    fn w_values() {
        assert_eq!(compute_w(2, 3).unwrap().value(), 64);
        assert_eq!(compute_w(3, 2).unwrap().value(), 1296);
        assert_eq!(compute_w(5, 2).unwrap().value(), 810_000);
        assert!(compute_w(1, 2).is_err());
        assert!(matches!(compute_w(50, 10), Err(Error::Overflow(_))));
    }

    #[test]
    fn rk_divides_w_when_supported() {
        for k in 1..=12u64 {
            let rk = compute_rk(k).unwrap();
            for w in 2..=13u64 {
                let Ok(wm) = compute_w(w, k) else { continue };
                let supported = rk
                    .factors()
                    .iter()
                    .all(|&(p, g)| p <= w && g as u64 <= 2 * k);
                if supported {
                    assert!(rk.divides(&wm), "k={k} w={w}");
                    assert_eq!(wm.value() % rk.value(), 0);
                }
            }
        }
    }
}

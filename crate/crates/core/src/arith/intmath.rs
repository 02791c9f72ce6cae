//! Small exact integer helpers. All modular products go through `u128`.

pub use num_integer::{gcd, Integer};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
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

/// Returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b)`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Inverse of `a` modulo `m`, when `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd(a as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u64)
}

/// `x^k` with overflow detection.
pub fn checked_pow(x: u64, k: u32) -> Option<u64> {
    x.checked_pow(k)
}

/// Largest `r` with `r^k <= n`.
pub fn integer_root(n: u64, k: u32) -> u64 {
    assert!(k >= 1);
    if k == 1 || n < 2 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u64;
    // float estimate is within a few units; settle exactly
    while r > 0 && r.checked_pow(k).map_or(true, |v| v > n) {
        r -= 1;
    }
    while (r + 1).checked_pow(k).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}

/// Binomial coefficient, exact in `u128`; `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Trial-division primality, for small arguments and oracles.
pub fn is_prime_trial(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Euler's totient by trial division.
pub fn totient(n: u64) -> u64 {
    let mut n_rem = n;
    let mut phi = n;
    let mut p = 2u64;
    while p * p <= n_rem {
        if n_rem % p == 0 {
            while n_rem % p == 0 {
                n_rem /= p;
            }
            phi -= phi / p;
        }
        p += 1;
    }
    if n_rem > 1 {
        phi -= phi / n_rem;
    }
    phi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_are_exact() {
        assert_eq!(integer_root(65537, 2), 256);
        assert_eq!(integer_root(65536, 2), 256);
        assert_eq!(integer_root(65535, 2), 255);
        assert_eq!(integer_root(27, 3), 3);
        assert_eq!(integer_root(26, 3), 2);
        assert_eq!(integer_root(u64::MAX, 2), 4294967295);
    }

    #[test]
    fn inverses() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(2, 4), None);
        for m in 2..60u64 {
            for a in 1..m {
                if gcd(a, m) == 1 {
                    assert_eq!(mul_mod(a, inv_mod(a, m).unwrap(), m), 1);
                }
            }
        }
    }

    #[test]
    fn totients() {
        assert_eq!(totient(1296), 432);
        assert_eq!(totient(16), 8);
        assert_eq!(totient(48), 16);
        assert_eq!(totient(1), 1);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(27, 14), Some(20058300));
        assert_eq!(binomial(5, 7), Some(0));
    }
}

//! Continued-fraction convergents and Dirichlet approximation.
//!
//! A binary float in `[0, 1)` is an exact dyadic rational, so the expansion
//! is run with integer Euclid on `(mantissa, 2^shift)` and never accumulates
//! floating-point error.

use crate::scalar::Real;

/// Convergents `h/k` of a dyadic rational, in order of increasing `k`.
#[derive(Clone, Debug)]
pub struct Convergents {
    x: u128,
    y: u128,
    h: (u128, u128),
    k: (u128, u128),
    done: bool,
}

impl Convergents {
    /// Expansion of `alpha`, which must lie in `[0, 1)`. Values below
    /// `2^-70` are treated as `0`: their first partial quotient already
    /// exceeds every `u64` denominator bound.
    pub fn new<T: Real>(alpha: T) -> Self {
        let a = alpha.to_f64_lossy();
        assert!((0.0..1.0).contains(&a), "alpha = {a} is outside [0, 1)");
        let (num, den) = dyadic(a).unwrap_or((0, 1));
        Convergents {
            x: num,
            y: den,
            h: (0, 1), // h_{-2}, h_{-1}
            k: (1, 0),
            done: false,
        }
    }
}

impl Iterator for Convergents {
    /// `(numerator, denominator)`.
    type Item = (u128, u128);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done || self.y == 0 {
            return None;
        }
        let q = self.x / self.y;
        let r = self.x % self.y;
        let h = q.checked_mul(self.h.1).and_then(|v| v.checked_add(self.h.0));
        let k = q.checked_mul(self.k.1).and_then(|v| v.checked_add(self.k.0));
        let (Some(h), Some(k)) = (h, k) else {
            self.done = true;
            return None;
        };
        self.h = (self.h.1, h);
        self.k = (self.k.1, k);
        self.x = self.y;
        self.y = r;
        Some((h, k))
    }
}

fn dyadic(a: f64) -> Option<(u128, u128)> {
    if a == 0.0 {
        return Some((0, 1));
    }
    if a < 2f64.powi(-70) {
        return None;
    }
    let bits = a.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut mant, mut e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    let tz = mant.trailing_zeros().min((-e) as u32);
    mant >>= tz;
    e += tz as i32;
    let shift = (-e) as u32;
    debug_assert!(shift <= 126);
    Some((mant as u128, 1u128 << shift))
}

/// Dirichlet approximation: `(a, q)` with `gcd(a, q) = 1`, `1 <= q <= bound`
/// and `|alpha - a/q| <= 1/(q * bound)`. This is the last convergent whose
/// denominator does not exceed `bound`.
pub fn rational_approx<T: Real>(alpha: T, bound: u64) -> (u64, u64) {
    assert!(bound >= 1, "denominator bound must be positive");
    let mut best = (0u64, 1u64);
    for (h, k) in Convergents::new(alpha) {
        if k > bound as u128 {
            break;
        }
        best = (h as u64, k as u64);
    }
    best
}

/// `||alpha - a/q||`, the distance on the circle `R/Z`.
pub fn torus_distance<T: Real>(alpha: T, a: u64, q: u64) -> T {
    let center = T::from_u64_lossy(a % q) / T::from_u64_lossy(q);
    let d = (alpha - center).abs();
    d.min(T::one() - d)
}

//! Complete exponential sums `S_q^*`, `S_q^⋄` and their factorisation.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::arith::intmath::{binomial, gcd, inv_mod, mul_mod, pow_mod};
use crate::arith::FactoredModulus;
use crate::error::{Error, Result};
use crate::scalar::Real;

use super::spectrum::e_frac;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpSumValue<T> {
    pub q: u64,
    pub a: u64,
    pub z: u64,
    pub w: u64,
    pub k: u64,
    pub b: u64,
    pub value: Complex<T>,
}

fn check_coprime(a: u64, q: u64) -> Result<()> {
    if q == 0 {
        return Err(Error::invalid("q", "must be positive"));
    }
    if gcd(a % q, q) != 1 {
        return Err(Error::invalid("a", format!("gcd({a}, {q}) != 1")));
    }
    Ok(())
}

fn wide_mod(w: u64, q: u64) -> Result<u64> {
    w.checked_mul(q).ok_or(Error::Overflow("W·q"))
}

/// `S_q^*(a,z) = Σ_{r<q, (z+Wr, Wq)=1} e_q(a((z+Wr)^k - b)/W)`.
///
/// `(z+Wr)^k` is reduced modulo `Wq`; the difference with `b` is then an
/// exact multiple of `W`.
pub fn exp_sum_sstar<T: Real>(q: u64, a: u64, w: u64, k: u64, b: u64, z: u64) -> Result<ExpSumValue<T>> {
    check_coprime(a, q)?;
    if w == 0 {
        return Err(Error::invalid("W", "must be positive"));
    }
    let z = z % w;
    if pow_mod(z, k, w) != b % w {
        return Err(Error::invalid("z", format!("{z}^{k} is not congruent to {b} mod {w}")));
    }
    let wq = wide_mod(w, q)?;
    let mut acc = Complex::new(0.0, 0.0);
    for r in 0..q {
        let x = (z as u128 + w as u128 * r as u128) as u64;
        if gcd(x, wq) != 1 {
            continue;
        }
        let diff = (pow_mod(x % wq, k, wq) + wq - b % wq) % wq;
        debug_assert_eq!(diff % w, 0);
        let t = mul_mod(a % q, diff / w, q);
        acc += e_frac(t as i128, q);
    }
    Ok(ExpSumValue { q, a, z, w, k, b, value: Complex::new(T::lit(acc.re), T::lit(acc.im)) })
}

/// `Σ_{ℓ=1}^{k} C(k,ℓ) W^{ℓ-1} z^{k-ℓ} r^ℓ  (mod q)`.
fn shifted_poly(w: u64, k: u64, z: u64, r: u64, q: u64) -> Result<u64> {
    let mut acc = 0u64;
    for l in 1..=k {
        let c = binomial(k, l).ok_or(Error::Overflow("binomial"))? % q as u128;
        let term = mul_mod(
            mul_mod(c as u64, pow_mod(w % q, l - 1, q), q),
            mul_mod(pow_mod(z % q, k - l, q), pow_mod(r % q, l, q), q),
            q,
        );
        acc = (acc + term) % q;
    }
    Ok(acc)
}

/// `S_q^⋄(a,z) = Σ_{r<q, (z+Wr, q)=1} e_q(a Σ_ℓ C(k,ℓ) W^{ℓ-1} z^{k-ℓ} r^ℓ)`.
pub fn exp_sum_sdiamond(q: u64, a: u64, w: u64, k: u64, z: u64) -> Result<Complex<f64>> {
    check_coprime(a, q)?;
    let mut acc = Complex::new(0.0, 0.0);
    for r in 0..q {
        let x = (z as u128 + w as u128 * r as u128) % q as u128;
        if gcd(x as u64, q) != 1 {
            continue;
        }
        let t = mul_mod(a % q, shifted_poly(w, k, z, r, q)?, q);
        acc += e_frac(t as i128, q);
    }
    Ok(acc)
}

/// The factorisation `S_q^⋄(a,z) = S_u^⋄(a₁,z) S_v^⋄(a₂,z)` with `u` the part
/// of `q` supported on primes dividing `W`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorReport {
    pub q: u64,
    pub a: u64,
    pub z: u64,
    pub u: u64,
    pub v: u64,
    pub a1: u64,
    pub a2: u64,
    /// `gcd(u, W)`.
    pub h: u64,
    pub direct: Complex<f64>,
    pub s_u: Complex<f64>,
    pub s_v: Complex<f64>,
    pub product: Complex<f64>,
    /// The closed form for `S_u^⋄`: `0` unless `h | k`, else
    /// `h Σ_{r < u/h} e_u(a₁ Σ_ℓ …)`.
    pub s_u_closed: Complex<f64>,
    pub h_divides_k: bool,
}

pub fn exp_sum_factor(q: u64, a: u64, w: &FactoredModulus, k: u64, z: u64) -> Result<FactorReport> {
    check_coprime(a, q)?;
    let wv = w.value();
    if !w.is_coprime_to(z) {
        return Err(Error::invalid("z", format!("gcd({z}, {wv}) != 1")));
    }
    let qf = FactoredModulus::factorize(q)?;
    let (uf, vf) = qf.split_by_support(w);
    let (u, v) = (uf.value(), vf.value());
    // u ū + v v̄ = 1
    let (u_bar, v_bar) = (inv_mod(u % v, v).unwrap_or(0), inv_mod(v % u, u).unwrap_or(0));
    let a1 = mul_mod(a % u, v_bar, u);
    let a2 = mul_mod(a % v, u_bar, v);
    let h = gcd(u, wv);
    let s_u = exp_sum_sdiamond(u, a1, wv, k, z)?;
    let s_v = exp_sum_sdiamond(v, a2, wv, k, z)?;
    let h_divides_k = k % h == 0;
    let s_u_closed = if h_divides_k {
        let mut acc = Complex::new(0.0, 0.0);
        for r in 0..u / h {
            acc += e_frac(mul_mod(a1, shifted_poly(wv, k, z, r, u)?, u) as i128, u);
        }
        acc * h as f64
    } else {
        Complex::new(0.0, 0.0)
    };
    Ok(FactorReport {
        q,
        a,
        z,
        u,
        v,
        a1,
        a2,
        h,
        direct: exp_sum_sdiamond(q, a, wv, k, z)?,
        s_u,
        s_v,
        product: s_u * s_v,
        s_u_closed,
        h_divides_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_modulus() {
        let s = exp_sum_sstar::<f64>(1, 0, 16, 2, 1, 1).unwrap();
        assert_eq!(s.value, Complex::new(1.0, 0.0));
    }

    #[test]
    fn q3_w16() {
        let s = exp_sum_sstar::<f64>(3, 1, 16, 2, 1, 1).unwrap();
        assert!((s.value - Complex::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(exp_sum_sstar::<f64>(4, 2, 16, 2, 1, 1).is_err());
        assert!(exp_sum_sstar::<f64>(3, 1, 16, 2, 1, 3).is_err());
    }

    #[test]
    fn twisted_relation() {
        // S* = e_{Wq}(a(z^k - b)) S⋄
        let (w, k, b) = (16u64, 2u64, 9u64);
        for q in [3u64, 5, 8, 12] {
            for z in (1..w).filter(|z| pow_mod(*z, k, w) == b) {
                let star = exp_sum_sstar::<f64>(q, 1, w, k, b, z).unwrap().value;
                let dia = exp_sum_sdiamond(q, 1, w, k, z).unwrap();
                let twist = e_frac((z * z) as i128 - b as i128, w * q);
                assert!((star - twist * dia).norm() < 1e-9, "q={q} z={z}");
            }
        }
    }

    #[test]
    fn vanishing_at_u8() {
        let w = crate::arith::compute_w(3, 2).unwrap();
        let r = exp_sum_factor(8, 1, &w, 2, 5).unwrap();
        assert_eq!((r.u, r.v, r.h), (8, 1, 8));
        assert!(!r.h_divides_k);
        assert!(r.s_u.norm() < 1e-9);
    }
}

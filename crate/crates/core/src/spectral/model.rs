//! The singular integral and the major-arc main term.

use num_complex::Complex;
use rayon::prelude::*;

use crate::arith::intmath::pow_mod;
use crate::arith::FactoredModulus;
use crate::error::{Error, Result};
use crate::majorant::WTrick;

use super::expsum::exp_sum_sstar;

/// `I(β) = ∫_0^N e(βt) dt = (e(βN) - 1) / (2πiβ)`, and `N` for `|β| < 1e-15`.
pub fn integral_i(beta: f64, n: u64) -> Complex<f64> {
    let nf = n as f64;
    if beta.abs() < 1e-15 {
        return Complex::new(nf, 0.0);
    }
    let x = beta * nf;
    // e(x) - 1 = -2 sin²(πx) + i sin(2πx)
    let s = (std::f64::consts::PI * x).sin();
    let num = Complex::new(-2.0 * s * s, (std::f64::consts::TAU * x).sin());
    num / Complex::new(0.0, std::f64::consts::TAU * beta)
}

/// `Σ_{z ∈ [W], z^k ≡ b} S_q^*(a, z)`.
pub fn sstar_sum(q: u64, a: u64, trick: &WTrick, b: u64) -> Result<Complex<f64>> {
    let (w, k) = (trick.w(), trick.k());
    trick.sigma(b)?;
    let zs: Vec<u64> = (1..w).filter(|&z| pow_mod(z, k, w) == b).collect();
    let terms: Vec<Complex<f64>> = zs
        .par_iter()
        .map(|&z| exp_sum_sstar::<f64>(q, a, w, k, b, z).map(|s| s.value))
        .collect::<Result<_>>()?;
    Ok(terms.iter().sum())
}

/// `(φ(W) / (φ(Wq) σ(b))) Σ_z S_q^*(a, z) I(β)`.
pub fn major_arc_model(q: u64, a: u64, beta: f64, trick: &WTrick, b: u64, n: u64) -> Result<Complex<f64>> {
    if q == 0 || n == 0 {
        return Err(Error::invalid("q", "q and N must be positive"));
    }
    let wq = trick.modulus().mul(&FactoredModulus::factorize(q)?)?;
    let coeff = trick.modulus().phi() as f64 / (wq.phi() as f64 * trick.sigma(b)? as f64);
    Ok(sstar_sum(q, a, trick, b)? * integral_i(beta, n) * coeff)
}

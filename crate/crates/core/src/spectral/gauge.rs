//! The pseudorandomness gauge and restriction norms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorant::WeightedSequence;
use crate::scalar::Real;

use super::arcs::{arc_decompose, Arc, ArcParams};
use super::spectrum::{dft_spectrum, grid_transform};

/// One JSON row of a spectral report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub quantity: String,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "M")]
    pub m: u64,
    pub w: u64,
    pub k: u64,
    pub b: u64,
    pub sigma: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeReport {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "M")]
    pub m: u64,
    /// `max_j |ν̂(j/M) - 1̂_[N](j/M)| / N`.
    pub d: f64,
    pub argmax_j: u64,
    pub argmax_alpha: f64,
    /// Exponent the arcs were built with: `σ`, or `σ₀` when `σ` leaves no
    /// room between `P` and `Q`; `None` when neither does.
    pub arc_exponent: Option<f64>,
    pub arc: Option<Arc>,
}

/// `D = max_j |ν̂(j/M) - 1̂_[N](j/M)| / N` over the grid, with the arc of the
/// maximiser classified for `(W, k)` taken from the sequence.
pub fn pseudorandom_gauge<T: Real>(nu: &WeightedSequence<T>, m: usize, sigma: f64, sigma0: f64) -> Result<GaugeReport> {
    let n = nu.len();
    let diff: Vec<T> = nu.values().iter().map(|&v| v - T::one()).collect();
    let spec = grid_transform(&diff, m)?;
    let mut best = (0usize, f64::NEG_INFINITY);
    for (j, z) in spec.iter().enumerate() {
        let a = z.norm().to_f64_lossy();
        if a > best.1 {
            best = (j, a);
        }
    }
    let alpha = best.0 as f64 / m as f64;
    let meta = nu.meta();
    let params = ArcParams::new(meta.w, meta.k, n as u64, sigma, sigma0)
        .or_else(|_| ArcParams::new(meta.w, meta.k, n as u64, sigma0, sigma0))
        .ok();
    Ok(GaugeReport {
        n: n as u64,
        m: m as u64,
        d: best.1 / n as f64,
        argmax_j: best.0 as u64,
        argmax_alpha: alpha,
        arc_exponent: params.map(|p| p.sigma),
        arc: params.map(|p| arc_decompose(&p, alpha)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestrictionReport {
    pub exponent: f64,
    #[serde(rename = "M")]
    pub m: u64,
    /// `((1/M) Σ_j |f̂(j/M)|^p)^{1/p}`.
    pub norm: f64,
    /// `norm / N^{1 - 1/p}`.
    pub constant: f64,
}

/// Grid `L^p` norm of `f̂` for any `p >= 1`, with no lower bound on `M`
/// beyond `M >= 2N`. At `p = 2` the value is exact by Parseval.
pub fn lp_norm<T: Real>(seq: &WeightedSequence<T>, exponent: f64, m: usize) -> Result<RestrictionReport> {
    if !(exponent >= 1.0) {
        return Err(Error::invalid("exponent", "must be at least 1"));
    }
    let norm = dft_spectrum(seq, m)?.power_mean(exponent).powf(1.0 / exponent);
    Ok(RestrictionReport {
        exponent,
        m: m as u64,
        norm,
        constant: norm / (seq.len() as f64).powf(1.0 - 1.0 / exponent),
    })
}

/// Restriction estimate `‖f̂‖_p` for `p > 2`; requires `M >= 4N`.
pub fn restriction_norm<T: Real>(seq: &WeightedSequence<T>, exponent: f64, m: usize) -> Result<RestrictionReport> {
    if !(exponent > 2.0) {
        return Err(Error::invalid("exponent", format!("{exponent} is not above 2")));
    }
    if m < 4 * seq.len() {
        return Err(Error::invalid("M", format!("grid size {m} is below 4N = {}", 4 * seq.len())));
    }
    lp_norm(seq, exponent, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_has_zero_gauge() {
        let one = WeightedSequence::<f64>::indicator(512).unwrap();
        let r = pseudorandom_gauge(&one, 4096, 4.0, 2.0).unwrap();
        assert!(r.d < 1e-12);
    }

    #[test]
    fn restriction_rejects_low_exponent() {
        let one = WeightedSequence::<f64>::indicator(64).unwrap();
        assert!(restriction_norm(&one, 2.0, 512).is_err());
        assert!(restriction_norm(&one, 6.5, 128).is_err());
        let r = lp_norm(&one, 2.0, 128).unwrap();
        assert!((r.constant - 1.0).abs() < 1e-12);
    }
}

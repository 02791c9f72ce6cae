//! `s`-fold convolutions on the transference window.

use num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::arith::intmath::binomial;
use crate::error::{Error, Result};
use crate::majorant::WeightedSequence;
use crate::scalar::Real;

pub const DEFAULT_EPSILON: f64 = 0.1;
/// Largest acceptable loss of significant digits before a warning.
pub const MAX_DIGITS_LOST: f64 = 6.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionProfile {
    pub s: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub epsilon: f64,
    /// `ε / 32`.
    pub kappa: f64,
    /// Integers strictly inside `((1-κ²)sN/2, (1+κ)sN/2)`.
    pub window_lo: u64,
    pub window_hi: u64,
    /// `f₁ ∗ ⋯ ∗ f_s(n) / N^{s-1}` for each `n` in the window.
    pub gauge: Vec<f64>,
    pub min_gauge: f64,
    pub argmin: u64,
    /// Absolute rounding floor on the gauge; values below it are
    /// indistinguishable from zero.
    pub noise_floor: f64,
    pub means: Vec<f64>,
    /// `𝔼 f_i > ε/2` for every `i`.
    pub each_mean_ok: bool,
    /// `Σ_i 𝔼 f_i > s(1+ε)/2`.
    pub total_mean_ok: bool,
    pub digits_lost: f64,
    pub warning: Option<String>,
}

impl ConvolutionProfile {
    pub fn hypotheses_hold(&self) -> bool {
        self.each_mean_ok && self.total_mean_ok
    }

    /// Every window value is above the rounding floor.
    pub fn positive(&self) -> bool {
        self.min_gauge > self.noise_floor
    }

    pub fn gauge_at(&self, n: u64) -> Option<f64> {
        n.checked_sub(self.window_lo).and_then(|i| self.gauge.get(i as usize).copied())
    }
}

/// `f₁ ∗ ⋯ ∗ f_s(n) / N^{s-1}` for `n ∈ [0, sN]`.
pub fn normalized_convolution<T: Real>(fs: &[WeightedSequence<T>]) -> Result<Vec<f64>> {
    let s = fs.len();
    if s < 2 {
        return Err(Error::invalid("s", "need at least two sequences"));
    }
    let n = fs[0].len();
    if fs.iter().any(|f| f.len() != n) {
        return Err(Error::invalid("f", "sequences differ in length"));
    }
    let span = s * n;
    let m = (span + 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(m);
    let inv_n = 1.0 / n as f64;
    let mut acc = vec![Complex::new(1.0, 0.0); m];
    for f in fs {
        let mut buf = vec![Complex::new(0.0, 0.0); m];
        for (i, v) in f.values().iter().enumerate() {
            buf[i + 1].re = v.to_f64_lossy() * inv_n;
        }
        forward.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a *= b;
        }
    }
    planner.plan_fft_inverse(m).process(&mut acc);
    // conv / N^s = acc / M; times N for the N^{s-1} normalisation
    let scale = n as f64 / m as f64;
    Ok(acc.iter().take(span + 1).map(|z| z.re * scale).collect())
}

pub fn transference_gauge<T: Real>(fs: &[WeightedSequence<T>], epsilon: f64) -> Result<ConvolutionProfile> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid("epsilon", "must lie in (0, 1)"));
    }
    let conv = normalized_convolution(fs)?;
    let (s, n) = (fs.len() as u64, fs[0].len() as u64);
    let kappa = epsilon / 32.0;
    let half = s as f64 * n as f64 / 2.0;
    let (a, b) = ((1.0 - kappa * kappa) * half, (1.0 + kappa) * half);
    let window_lo = a.floor() as u64 + 1;
    let window_hi = (b.ceil() as u64 - 1).min(s * n);
    if window_lo > window_hi {
        return Err(Error::invalid("N", "transference window contains no integer"));
    }
    let gauge: Vec<f64> = conv[window_lo as usize..=window_hi as usize].to_vec();
    let (mut argmin, mut min_gauge) = (window_lo, f64::INFINITY);
    for (i, &g) in gauge.iter().enumerate() {
        if g < min_gauge {
            (argmin, min_gauge) = (window_lo + i as u64, g);
        }
    }
    let means: Vec<f64> = fs.iter().map(|f| f.mean()).collect();
    let product: f64 = means.iter().product();
    let m = ((s * n + 1) as f64).log2().ceil();
    let noise_floor = 16.0 * f64::EPSILON * m * s as f64 * product.max(f64::MIN_POSITIVE) * n as f64;
    // peak intermediate is the zero frequency, ∏ means; window values are gauge / N
    let digits_lost = if min_gauge > 0.0 {
        (product * n as f64 / min_gauge).log10().max(0.0)
    } else {
        f64::INFINITY
    };
    let warning = (digits_lost > MAX_DIGITS_LOST).then(|| {
        format!("convolution loses {digits_lost:.1} significant digits on the window; small values are unreliable")
    });
    Ok(ConvolutionProfile {
        s,
        n,
        epsilon,
        kappa,
        window_lo,
        window_hi,
        each_mean_ok: means.iter().all(|&x| x > epsilon / 2.0),
        total_mean_ok: means.iter().sum::<f64>() > s as f64 * (1.0 + epsilon) / 2.0,
        means,
        gauge,
        min_gauge,
        argmin,
        noise_floor,
        digits_lost,
        warning,
    })
}

/// `1_[N]^{*s}(n) = Σ_j (-1)^j C(s,j) C(n - jN - 1, s - 1)`, exactly.
pub fn indicator_convolution(n: u64, big_n: u64, s: u64) -> Option<i128> {
    let mut total: i128 = 0;
    for j in 0..=s {
        let Some(m) = n.checked_sub(j * big_n + 1) else { break };
        if m < s - 1 {
            continue;
        }
        let term = binomial(s, j)?.checked_mul(binomial(m, s - 1)?)?;
        let term = i128::try_from(term).ok()?;
        total = if j % 2 == 0 { total.checked_add(term)? } else { total.checked_sub(term)? };
    }
    Some(total)
}

//! Fourier samples `f̂(j/M) = Σ_n f(n) e(nj/M)` on a uniform grid.

use std::io::{BufWriter, Write};
use std::path::Path;

use byteorder::{LittleEndian, WriteBytesExt};
use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::majorant::{SequenceMeta, WeightedSequence};
use crate::scalar::Real;

/// `e(x) = exp(2πix)` for `x = num/den`, with the reduction done in integers.
pub fn e_frac(num: i128, den: u64) -> Complex<f64> {
    let r = num.rem_euclid(den as i128) as f64 / den as f64;
    let t = std::f64::consts::TAU * r;
    Complex::new(t.cos(), t.sin())
}

/// `8 · next_power_of_two(N)`.
pub fn default_grid(n: usize) -> usize {
    8 * n.next_power_of_two()
}

#[derive(Clone, Debug)]
pub struct Spectrum<T> {
    values: Vec<Complex<T>>,
    n: usize,
    meta: SequenceMeta,
}

/// Unnormalised transform with the `+` sign: `out[j] = Σ_n x[n] e(nj/M)`,
/// where `x` holds `f(1), …, f(N)`.
pub(crate) fn grid_transform<T: Real>(values: &[T], m: usize) -> Result<Vec<Complex<T>>> {
    if m < 2 * values.len() {
        return Err(Error::invalid("M", format!("grid size {m} is below 2N = {}", 2 * values.len())));
    }
    let mut buf = vec![Complex::new(T::zero(), T::zero()); m];
    for (i, v) in values.iter().enumerate() {
        buf[(i + 1) % m] = Complex::new(*v, T::zero());
    }
    FftPlanner::<T>::new().plan_fft_inverse(m).process(&mut buf);
    Ok(buf)
}

/// Samples `f̂(j/M)` for `j ∈ [0, M)`; requires `M >= 2N`.
pub fn dft_spectrum<T: Real>(seq: &WeightedSequence<T>, m: usize) -> Result<Spectrum<T>> {
    Ok(Spectrum {
        values: grid_transform(seq.values(), m)?,
        n: seq.len(),
        meta: seq.meta().clone(),
    })
}

/// Direct evaluation of `f̂(a/q)` with exact reduction of `na mod q`.
pub fn evaluate_rational<T: Real>(seq: &WeightedSequence<T>, a: u64, q: u64) -> Complex<f64> {
    seq.support()
        .map(|(n, v)| e_frac(n as i128 * a as i128, q) * v.to_f64_lossy())
        .sum()
}

/// Direct evaluation of `f̂(α)` for a real `α`.
pub fn evaluate<T: Real>(seq: &WeightedSequence<T>, alpha: f64) -> Complex<f64> {
    seq.support()
        .map(|(n, v)| {
            let t = std::f64::consts::TAU * (n as f64 * alpha).fract();
            Complex::new(t.cos(), t.sin()) * v.to_f64_lossy()
        })
        .sum()
}

impl<T: Real> Spectrum<T> {
    /// Grid size `M`.
    pub fn grid(&self) -> usize {
        self.values.len()
    }

    /// Length `N` of the source sequence.
    pub fn source_len(&self) -> usize {
        self.n
    }

    pub fn meta(&self) -> &SequenceMeta {
        &self.meta
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn get(&self, j: usize) -> Complex<T> {
        self.values[j % self.values.len()]
    }

    /// `(1/M) Σ_j |f̂(j/M)|^p`, summed per fixed chunk so the result does not
    /// depend on scheduling.
    pub fn power_mean(&self, p: f64) -> f64 {
        let partial: Vec<f64> = self
            .values
            .par_chunks(4096)
            .map(|c| c.iter().map(|z| z.norm().to_f64_lossy().powf(p)).sum::<f64>())
            .collect();
        partial.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Largest `|f̂(j/M)|` and its index; ties go to the smallest `j`.
    pub fn max_abs(&self) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (j, z) in self.values.iter().enumerate() {
            let a = z.norm().to_f64_lossy();
            if a > best.1 {
                best = (j, a);
            }
        }
        best
    }

    /// `j,re,im` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = BufWriter::new(out);
        writeln!(out, "j,re,im")?;
        for (j, z) in self.values.iter().enumerate() {
            writeln!(out, "{j},{:.11e},{:.11e}", z.re.to_f64_lossy(), z.im.to_f64_lossy())?;
        }
        out.flush()?;
        Ok(())
    }

    /// Header `(kind, W, b, k, N, M)` as little-endian `u64`, then `(re, im)`
    /// pairs as `f64`.
    pub fn write_binary<W: Write>(&self, out: W) -> Result<()> {
        let mut out = BufWriter::new(out);
        let m = &self.meta;
        for word in [m.kind.code(), m.w, m.b, m.k, self.n as u64, self.values.len() as u64] {
            out.write_u64::<LittleEndian>(word)?;
        }
        for z in &self.values {
            out.write_f64::<LittleEndian>(z.re.to_f64_lossy())?;
            out.write_f64::<LittleEndian>(z.im.to_f64_lossy())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_binary(&self, path: &Path) -> Result<()> {
        self.write_binary(std::fs::File::create(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_closed_form() {
        let n = 100usize;
        let m = 256usize;
        let spec = dft_spectrum(&WeightedSequence::<f64>::indicator(n).unwrap(), m).unwrap();
        assert!((spec.get(0).re - n as f64).abs() < 1e-9);
        for j in [1usize, 7, 100, 255] {
            let e1 = e_frac(j as i128, m as u64);
            let en = e_frac((j * n) as i128, m as u64);
            let want = e1 * (en - 1.0) / (e1 - 1.0);
            assert!((spec.get(j) - want).norm() < 1e-9, "j={j}");
        }
    }

    #[test]
    fn rejects_small_grid() {
        let seq = WeightedSequence::<f64>::indicator(10).unwrap();
        assert!(dft_spectrum(&seq, 19).is_err());
        assert!(dft_spectrum(&seq, 20).is_ok());
    }
}

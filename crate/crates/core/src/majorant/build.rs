//! Builders for `ν_b`, `f_b`, `𝐟_b`, `μ` and `ψ`.

use crate::arith::intmath::{gcd, integer_root};
use crate::arith::{compute_w, FactoredModulus, PrimeSet};
use crate::error::{Error, Result};
use crate::local::PowerResidueTable;
use crate::scalar::Real;

use super::sequence::{SequenceKind, SequenceMeta, WeightedSequence};
use super::subset::PrimeFilter;

/// `⌊(WN + b)^{1/k}⌋`.
pub fn y_bound(w: u64, b: u64, k: u64, n: u64) -> Result<u64> {
    let top = w
        .checked_mul(n)
        .and_then(|v| v.checked_add(b))
        .ok_or(Error::Overflow("W·N + b"))?;
    let k = u32::try_from(k).map_err(|_| Error::Overflow("k"))?;
    Ok(integer_root(top, k))
}

/// `L = ln(WN + W) / k`.
pub fn log_scale(w: u64, k: u64, n: u64) -> f64 {
    ((w as f64) * (n as f64 + 1.0)).ln() / k as f64
}

/// The W-trick data for fixed `(W, k)`: the modulus, `Z(W)` and `σ`.
#[derive(Clone, Debug)]
pub struct WTrick {
    table: PowerResidueTable,
}

impl WTrick {
    pub fn new(w: &FactoredModulus, k: u64) -> Result<Self> {
        Ok(WTrick { table: PowerResidueTable::new(w, k)? })
    }

    /// `W = ∏_{p <= w} p^{2k}`.
    pub fn from_w_param(w: u64, k: u64) -> Result<Self> {
        Self::new(&compute_w(w, k)?, k)
    }

    pub fn modulus(&self) -> &FactoredModulus {
        self.table.modulus()
    }

    pub fn w(&self) -> u64 {
        self.table.modulus().value()
    }

    pub fn k(&self) -> u64 {
        self.table.k()
    }

    /// `Z(W)`.
    pub fn residues(&self) -> &[u64] {
        self.table.unit_residues()
    }

    pub fn table(&self) -> &PowerResidueTable {
        &self.table
    }

    pub fn sigma(&self, b: u64) -> Result<u64> {
        self.table.sigma(b)
    }

    fn meta(&self, kind: SequenceKind, b: u64, n: u64, subset: String) -> Result<SequenceMeta> {
        Ok(SequenceMeta {
            kind,
            w: self.w(),
            b,
            k: self.k(),
            subset,
            y: y_bound(self.w(), b, self.k(), n)?,
            l: log_scale(self.w(), self.k(), n),
        })
    }

    fn check_n(n: u64) -> Result<()> {
        if n == 0 {
            return Err(Error::invalid("N", "must be positive"));
        }
        Ok(())
    }

    /// `ν_b(n) = (φ(W)/(Wσ(b))) k p^{k-1} ln p` when `Wn + b = p^k`.
    pub fn nu<T: Real>(&self, b: u64, n: u64) -> Result<WeightedSequence<T>> {
        self.weighted(SequenceKind::Nu, b, n, |_| true, "all".into())
    }

    /// `f_b`: the weights of `ν_b` restricted to primes admitted by `subset`.
    pub fn f<T: Real>(&self, b: u64, n: u64, subset: &dyn PrimeFilter) -> Result<WeightedSequence<T>> {
        self.filtered(SequenceKind::F, b, n, subset)
    }

    /// `𝐟_b`: as [`WTrick::f`] for a prime set of asymptotic relative density.
    pub fn bold_f<T: Real>(&self, b: u64, n: u64, subset: &dyn PrimeFilter) -> Result<WeightedSequence<T>> {
        self.filtered(SequenceKind::BoldF, b, n, subset)
    }

    fn filtered<T: Real>(
        &self,
        kind: SequenceKind,
        b: u64,
        n: u64,
        subset: &dyn PrimeFilter,
    ) -> Result<WeightedSequence<T>> {
        Self::check_n(n)?;
        let y = y_bound(self.w(), b, self.k(), n)?;
        if subset.limit() < y {
            return Err(Error::invalid(
                "subset",
                format!("generated to {} but primes up to Y = {y} are needed", subset.limit()),
            ));
        }
        self.weighted(kind, b, n, |p| subset.admits(p), subset.label())
    }

    fn weighted<T: Real>(
        &self,
        kind: SequenceKind,
        b: u64,
        n: u64,
        admit: impl Fn(u64) -> bool,
        label: String,
    ) -> Result<WeightedSequence<T>> {
        Self::check_n(n)?;
        let sigma = self.sigma(b)?;
        let (w, k) = (self.w(), self.k());
        let meta = self.meta(kind, b, n, label)?;
        let coeff = self.modulus().phi() as f64 / (w as f64 * sigma as f64);
        let kf = k as f64;
        let mut seq = WeightedSequence::zeros(n as usize, meta);
        let primes = PrimeSet::sieve(seq.meta().y.max(2))?;
        for p in primes.iter_upto(seq.meta().y) {
            if gcd(p, w) != 1 || !admit(p) {
                continue;
            }
            let Some(idx) = self.index_of_power(p, b, n) else { continue };
            let pf = p as f64;
            let weight = coeff * kf * pf.powi(k as i32 - 1) * pf.ln();
            seq.set(idx, T::lit(weight));
        }
        Ok(seq)
    }

    /// `m` with `Wm + b = x^k` and `1 <= m <= N`, if any.
    fn index_of_power(&self, x: u64, b: u64, n: u64) -> Option<u64> {
        let w = self.w() as u128;
        let pk = (x as u128).checked_pow(self.k() as u32)?;
        if pk <= w || pk % w != b as u128 {
            return None;
        }
        let m = (pk - b as u128) / w;
        (m >= 1 && m <= n as u128).then_some(m as u64)
    }

    /// `μ(n) = k x^{k-1} / σ(b)` when `Wn + b = x^k`, for every integer `x`.
    pub fn mu<T: Real>(&self, b: u64, n: u64) -> Result<MuMajorant<T>> {
        Self::check_n(n)?;
        let sigma = self.sigma(b)? as f64;
        let meta = self.meta(SequenceKind::Mu, b, n, "all".into())?;
        let kf = self.k() as f64;
        let mut seq = WeightedSequence::zeros(n as usize, meta);
        for x in 1..=seq.meta().y {
            if let Some(idx) = self.index_of_power(x, b, n) {
                seq.set(idx, T::lit(kf * (x as f64).powi(self.k() as i32 - 1) / sigma));
            }
        }
        Ok(MuMajorant { mu: seq })
    }
}

/// `μ` together with the normalisation `ψ = φ / L`.
#[derive(Clone, Debug)]
pub struct MuMajorant<T> {
    mu: WeightedSequence<T>,
}

impl<T: Real> MuMajorant<T> {
    pub fn mu(&self) -> &WeightedSequence<T> {
        &self.mu
    }

    pub fn into_mu(self) -> WeightedSequence<T> {
        self.mu
    }

    pub fn log_scale(&self) -> f64 {
        self.mu.meta().l
    }

    /// `ψ = L^{-1} φ` for `φ` built on the same `(W, b, k, N)`. Fails with
    /// an invariant violation if `ψ <= μ` does not hold everywhere.
    pub fn psi_of(&self, phi: &WeightedSequence<T>) -> Result<WeightedSequence<T>> {
        let (a, m) = (phi.meta(), self.mu.meta());
        if (a.w, a.b, a.k) != (m.w, m.b, m.k) || phi.len() != self.mu.len() {
            return Err(Error::invalid(
                "phi",
                format!("built for (W,b,k,N)=({},{},{},{}), majorant is ({},{},{},{})",
                    a.w, a.b, a.k, phi.len(), m.w, m.b, m.k, self.mu.len()),
            ));
        }
        let inv_l = T::lit(1.0 / m.l);
        let psi = phi.map(SequenceKind::Psi, |v| v * inv_l);
        if let Some(n) = psi.first_excess_over(&self.mu) {
            return Err(Error::InvariantViolation(format!(
                "psi({n}) = {} exceeds mu({n}) = {}",
                psi.get(n),
                self.mu.get(n)
            )));
        }
        Ok(psi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nu_at_289() {
        let t = WTrick::from_w_param(2, 2).unwrap();
        assert_eq!(t.w(), 16);
        let nu = t.nu::<f64>(1, 4096).unwrap();
        let want = 8.0 / 64.0 * 2.0 * 17.0 * 17f64.ln();
        assert!((nu.get(18) - want).abs() < 1e-12);
        assert!((nu.get(18) - 12.04).abs() < 0.005);
        assert_eq!(nu.get(1), 0.0);
        assert_eq!(nu.get(5), 0.0);
    }

    #[test]
    fn mu_counts_composite_powers() {
        let t = WTrick::from_w_param(2, 2).unwrap();
        let mu = t.mu::<f64>(1, 4096).unwrap();
        assert_eq!(mu.mu().get(18), 8.5);
        assert_eq!(mu.mu().get(5), 4.5);
        let psi = mu.psi_of(&t.nu(1, 4096).unwrap()).unwrap();
        assert!((psi.get(18) - 2.17).abs() < 0.01);
    }

    #[test]
    fn rejects_non_residue() {
        let t = WTrick::from_w_param(2, 2).unwrap();
        assert!(t.nu::<f64>(3, 100).is_err());
        assert!(t.nu::<f64>(1, 0).is_err());
    }
}

//! Weighted local decomposition: choose `b_1..b_s` in the support of
//! `f : Z(W) → [0, 1)` with `Σ b_i ≡ n (mod W)` maximising `Σ f(b_i)`.

use std::ops::Add;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::residues::PowerResidueTable;
use crate::arith::FactoredModulus;
use crate::error::{Error, Result};

/// Default cap on `s * W` table cells.
pub const DEFAULT_DP_CAP: u64 = 200_000_000;

/// Weight type usable by the dynamic program: floats or exact rationals.
pub trait Weight: Copy + PartialOrd + Zero + One + Add<Output = Self> + Send + Sync + std::fmt::Debug {}

impl<T> Weight for T where T: Copy + PartialOrd + Zero + One + Add<Output = T> + Send + Sync + std::fmt::Debug {}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalDecomposition<T> {
    pub modulus: u64,
    /// Target residue `n mod W`.
    pub target: u64,
    pub parts: Vec<u64>,
    pub values: Vec<T>,
    pub total: T,
}

impl<T: Weight> LocalDecomposition<T> {
    /// Re-checks the decomposition without the DP: parts sum to the target,
    /// every value is positive and agrees with `f`, and the total is their sum.
    pub fn verify(&self, f: impl Fn(u64) -> T) -> bool {
        let m = self.modulus as u128;
        let sum = self.parts.iter().map(|&b| b as u128).sum::<u128>() % m;
        let total = self.values.iter().fold(T::zero(), |a, &v| a + v);
        sum == self.target as u128
            && self.parts.len() == self.values.len()
            && self.values.iter().all(|&v| v > T::zero())
            && self.parts.iter().zip(&self.values).all(|(&b, &v)| f(b) == v)
            && total == self.total
    }

    /// Whether `Σ f(b_i) > s/2`.
    pub fn exceeds_half(&self) -> bool {
        let two = T::one() + T::one();
        self.total + self.total > count::<T>(self.parts.len() as u64) && two > T::zero()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum DecomposeOutcome<T> {
    Found(LocalDecomposition<T>),
    /// No decomposition with total above `s/2`; `optimum` is `None` when the
    /// residue is not reachable at all.
    Failed { target: u64, optimum: Option<T> },
}

impl<T> DecomposeOutcome<T> {
    pub fn decomposition(&self) -> Option<&LocalDecomposition<T>> {
        match self {
            DecomposeOutcome::Found(d) => Some(d),
            DecomposeOutcome::Failed { .. } => None,
        }
    }
}

/// `s` as an element of `T` by double-and-add.
fn count<T: Weight>(s: u64) -> T {
    let mut acc = T::zero();
    let mut p = T::one();
    let mut e = s;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc + p;
        }
        p = p + p;
        e >>= 1;
    }
    acc
}

/// Table of optimal `i`-part totals for every residue, `0 <= i <= s`.
#[derive(Clone, Debug)]
pub struct LocalDp<T> {
    modulus: u64,
    s: usize,
    support: Vec<(u64, T)>,
    best: Vec<Option<T>>,
    /// `choice[(i-1)*W + r]` = support index of the i-th part.
    choice: Vec<u32>,
}

impl<T: Weight> LocalDp<T> {
    /// `support` lists residues with positive weight, any order.
    pub fn new(modulus: u64, s: usize, mut support: Vec<(u64, T)>) -> Result<Self> {
        Self::with_cap(modulus, s, std::mem::take(&mut support), DEFAULT_DP_CAP)
    }

    pub fn with_cap(modulus: u64, s: usize, mut support: Vec<(u64, T)>, cap: u64) -> Result<Self> {
        if modulus == 0 || s == 0 {
            return Err(Error::invalid("s", "modulus and s must be positive"));
        }
        let cells = (s as u64).saturating_mul(modulus);
        if cells > cap {
            return Err(Error::ResourceLimit {
                what: "local DP table",
                requested: cells as u128,
                cap: cap as u128,
            });
        }
        support.retain(|&(_, v)| v > T::zero());
        support.sort_by_key(|&(b, _)| b);
        support.dedup_by_key(|e| e.0);
        let w = modulus as usize;
        let mut prev: Vec<Option<T>> = vec![None; w];
        prev[0] = Some(T::zero());
        let mut choice = vec![u32::MAX; s * w];
        for round in 0..s {
            let row = &mut choice[round * w..(round + 1) * w];
            let next: Vec<Option<T>> = row
                .par_iter_mut()
                .enumerate()
                .map(|(r, slot)| {
                    let mut best: Option<T> = None;
                    // ascending b with strict improvement keeps the smallest b on ties
                    for (j, &(b, fb)) in support.iter().enumerate() {
                        let from = (r + w - (b % modulus) as usize) % w;
                        if let Some(v) = prev[from] {
                            let cand = v + fb;
                            if best.is_none_or(|cur| cand > cur) {
                                best = Some(cand);
                                *slot = j as u32;
                            }
                        }
                    }
                    best
                })
                .collect();
            prev = next;
        }
        Ok(LocalDp {
            modulus,
            s,
            support,
            best: prev,
            choice,
        })
    }

    pub fn optimum(&self, n: u64) -> Option<T> {
        self.best[(n % self.modulus) as usize]
    }

    /// Decomposition of `n` if the optimum exceeds `s/2`.
    pub fn decompose(&self, n: u64) -> DecomposeOutcome<T> {
        let target = n % self.modulus;
        let optimum = self.optimum(target);
        let half_exceeded = optimum.is_some_and(|v| v + v > count::<T>(self.s as u64));
        if !half_exceeded {
            return DecomposeOutcome::Failed { target, optimum };
        }
        let w = self.modulus as usize;
        let mut r = target as usize;
        let mut parts: Vec<u64> = Vec::with_capacity(self.s);
        let mut values: Vec<T> = Vec::with_capacity(self.s);
        for round in (0..self.s).rev() {
            let j = self.choice[round * w + r] as usize;
            let (b, fb) = self.support[j];
            parts.push(b);
            values.push(fb);
            r = (r + w - (b % self.modulus) as usize) % w;
        }
        debug_assert_eq!(r, 0);
        // report as a sorted multiset
        let mut pairs: Vec<(u64, T)> = parts.into_iter().zip(values).collect();
        pairs.sort_by_key(|&(b, _)| b);
        let (parts, values): (Vec<u64>, Vec<T>) = pairs.into_iter().unzip();
        let total = values.iter().fold(T::zero(), |a, &v| a + v);
        DecomposeOutcome::Found(LocalDecomposition {
            modulus: self.modulus,
            target,
            parts,
            values,
            total,
        })
    }
}

/// Runs the DP for `f` on `Z(W)`; `f` must take values in `[0, 1)`.
pub fn local_decompose<T: Weight>(
    w: &FactoredModulus,
    k: u64,
    s: usize,
    n: u64,
    f: impl Fn(u64) -> T,
) -> Result<DecomposeOutcome<T>> {
    let table = PowerResidueTable::new(w, k)?;
    let dp = LocalDp::new(w.value(), s, weights_on_z(&table, f)?)?;
    Ok(dp.decompose(n))
}

/// Evaluates `f` on `Z(W)`, checking the `[0, 1)` range.
pub fn weights_on_z<T: Weight>(table: &PowerResidueTable, f: impl Fn(u64) -> T) -> Result<Vec<(u64, T)>> {
    table
        .unit_residues()
        .iter()
        .map(|&b| {
            let v = f(b);
            if v < T::zero() || v >= T::one() {
                Err(Error::invalid("f", format!("f({b}) = {v:?} is outside [0, 1)")))
            } else {
                Ok((b, v))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn w16() -> FactoredModulus {
        FactoredModulus::factorize(16).unwrap()
    }

    #[test]
    fn constant_weights() {
        let ok = local_decompose(&w16(), 2, 16, 0, |_| 0.6f64).unwrap();
        let d = ok.decomposition().expect("0.6 * 16 > 8");
        assert!((d.total - 9.6).abs() < 1e-12);
        assert!(d.verify(|_| 0.6));

        match local_decompose(&w16(), 2, 16, 0, |_| 0.4f64).unwrap() {
            DecomposeOutcome::Failed { optimum, .. } => assert!((optimum.unwrap() - 6.4).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_support() {
        let f = |b: u64| if b == 1 { 0.9f64 } else { 0.0 };
        let out = local_decompose(&w16(), 2, 16, 0, f).unwrap();
        let d = out.decomposition().unwrap();
        assert_eq!(d.parts, vec![1; 16]);
        assert!((d.total - 14.4).abs() < 1e-9);
        // 15 ones sum to 15, and 9 alone cannot be used
        assert!(matches!(
            local_decompose(&w16(), 2, 16, 15, f).unwrap(),
            DecomposeOutcome::Failed { optimum: None, .. }
        ));
    }

    #[test]
    fn exact_rational_weights() {
        let three_fifths = Ratio::new(3i64, 5);
        let out = local_decompose(&w16(), 2, 16, 8, |_| three_fifths).unwrap();
        let d = out.decomposition().unwrap();
        assert_eq!(d.total, Ratio::new(48, 5));
        assert!(d.exceeds_half());
    }

    #[test]
    fn tie_break_prefers_small_residue() {
        // both residues weigh the same; 2 parts reaching 10 mod 16 must use 1 + 9
        let out = local_decompose(&w16(), 2, 2, 10, |_| 0.75f64).unwrap();
        assert_eq!(out.decomposition().unwrap().parts, vec![1, 9]);
    }

    #[test]
    fn rejects_out_of_range_weights() {
        assert!(local_decompose(&w16(), 2, 4, 4, |_| 1.0f64).is_err());
        assert!(local_decompose(&w16(), 2, 4, 4, |_| -0.1f64).is_err());
    }
}

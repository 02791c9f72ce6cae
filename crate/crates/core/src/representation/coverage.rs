//! Congruence admissibility and coverage of windows by `s`-fold sums.

use std::io::{BufWriter, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::compute_rk;
use crate::error::{Error, Result};
use crate::majorant::PrimeFilter;

use super::count::{prime_powers, reachable};

/// `n ≡ s (mod R_k)`.
pub fn admissible_filter(n: u64, s: u64, k: u64) -> Result<bool> {
    let rk = compute_rk(k)?.value();
    Ok(n % rk == s % rk)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub k: u64,
    pub s: u64,
    pub subset: String,
    pub lo: u64,
    pub hi: u64,
    /// `R_k`.
    pub modulus: u64,
    /// Whether only `n ≡ s (mod R_k)` were considered.
    pub filtered: bool,
    pub admissible: u64,
    pub represented: u64,
    pub exceptions: Vec<u64>,
}

impl CoverageReport {
    pub fn is_admissible(&self, n: u64) -> bool {
        !self.filtered || n % self.modulus == self.s % self.modulus
    }

    /// `n,admissible,represented` for every `n` in the window.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = BufWriter::new(out);
        writeln!(out, "n,admissible,represented")?;
        let mut ex = self.exceptions.iter().peekable();
        for n in self.lo..=self.hi {
            let adm = self.is_admissible(n);
            let missed = ex.peek() == Some(&&n);
            if missed {
                ex.next();
            }
            writeln!(out, "{n},{},{}", adm as u8, (adm && !missed) as u8)?;
        }
        out.flush()?;
        Ok(())
    }

    /// One exception per line.
    pub fn write_exceptions<W: Write>(&self, out: W) -> Result<()> {
        let mut out = BufWriter::new(out);
        for n in &self.exceptions {
            writeln!(out, "{n}")?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Marks every `n <= hi` that is a sum of `s` admitted `k`-th powers, then
/// lists the admissible `n ∈ [lo, hi]` that are missed.
pub fn coverage_probe(
    subset: &dyn PrimeFilter,
    k: u64,
    s: u64,
    lo: u64,
    hi: u64,
    filter: bool,
) -> Result<CoverageReport> {
    if lo > hi {
        return Err(Error::invalid("window", format!("[{lo}, {hi}] is empty")));
    }
    let modulus = compute_rk(k)?.value();
    let reach = reachable(&prime_powers(subset, k, hi)?, s, hi)?;
    let admissible = |n: u64| !filter || n % modulus == s % modulus;
    let exceptions: Vec<u64> = (lo..=hi)
        .into_par_iter()
        .filter(|&n| admissible(n) && !reach.contains(n as usize))
        .collect();
    let admissible_count = (lo..=hi).filter(|&n| admissible(n)).count() as u64;
    Ok(CoverageReport {
        k,
        s,
        subset: subset.label(),
        lo,
        hi,
        modulus,
        filtered: filter,
        admissible: admissible_count,
        represented: admissible_count - exceptions.len() as u64,
        exceptions,
    })
}

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arith::omega;
use crate::error::{Error, Result};

/// Exact parameter thresholds for a given `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    pub k: u64,
    /// `ω(k)`.
    pub omega: u64,
    /// Smallest `s` with `s > max(16kω(k) + 4k + 3, k² + k)`.
    pub s_min_theorem: u64,
    /// `8kω(k) + 2k + 2`, the local decomposition bound.
    pub s_min_local: u64,
    /// `16kω(k) + 4k + 4`.
    pub s_min_mean: u64,
    /// `1 - 1/(2k)`.
    pub delta_threshold: Ratio<i64>,
    /// `1/2`, the density threshold for prime sets of asymptotic density.
    pub delta_threshold_asymptotic: Ratio<i64>,
}

pub fn theorem_thresholds(k: u64) -> Result<Thresholds> {
    if !(2..=1 << 20).contains(&k) {
        return Err(Error::invalid("k", "must be in [2, 2^20]"));
    }
    let w = omega(k) as u64;
    let bound = (16 * k * w + 4 * k + 3).max(k * k + k);
    Ok(Thresholds {
        k,
        omega: w,
        s_min_theorem: bound + 1,
        s_min_local: 8 * k * w + 2 * k + 2,
        s_min_mean: 16 * k * w + 4 * k + 4,
        delta_threshold: Ratio::new(2 * k as i64 - 1, 2 * k as i64),
        delta_threshold_asymptotic: Ratio::new(1, 2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_k() {
        let t = theorem_thresholds(2).unwrap();
        assert_eq!((t.s_min_theorem, t.delta_threshold), (44, Ratio::new(3, 4)));
        let t = theorem_thresholds(3).unwrap();
        assert_eq!((t.s_min_theorem, t.delta_threshold), (64, Ratio::new(5, 6)));
        let t = theorem_thresholds(4).unwrap();
        assert_eq!((t.s_min_theorem, t.delta_threshold), (84, Ratio::new(7, 8)));
        assert!(theorem_thresholds(1).is_err());
    }
}

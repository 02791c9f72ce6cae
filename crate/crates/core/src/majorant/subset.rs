//! Deterministic subsets of the primes with a known or measured relative
//! density.

use serde::{Deserialize, Serialize};

use crate::arith::intmath::gcd;
use crate::arith::PrimeSet;
use crate::bits::BitSet;
use crate::error::{Error, Result};

/// Smallest prefix used for the prefix-density minimum.
const PREFIX_FLOOR: u64 = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SubsetSpec {
    All,
    /// Each prime kept independently with probability `delta`, decided by a
    /// counter-based hash of `(seed, p)`.
    Bernoulli { delta: f64, seed: u64 },
    /// Primes whose residue modulo `modulus` is in `allowed`.
    ResidueClasses { modulus: u64, allowed: Vec<u64> },
    /// Primes `> x0`.
    PrefixDrop { x0: u64 },
    /// Primes outside every closed interval.
    WindowDrop { intervals: Vec<(u64, u64)> },
}

impl SubsetSpec {
    /// Every residue class modulo `m` except `dropped`.
    pub fn drop_classes(m: u64, dropped: &[u64]) -> Self {
        SubsetSpec::ResidueClasses {
            modulus: m,
            allowed: (0..m).filter(|r| !dropped.contains(r)).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SubsetSpec::Bernoulli { delta, .. } if !(0.0..=1.0).contains(delta) => {
                Err(Error::invalid("subset", format!("bernoulli delta {delta} outside [0, 1]")))
            }
            SubsetSpec::ResidueClasses { modulus: 0, .. } => {
                Err(Error::invalid("subset", "residue-class modulus must be positive"))
            }
            SubsetSpec::WindowDrop { intervals } if intervals.iter().any(|&(a, b)| a > b) => {
                Err(Error::invalid("subset", "window-drop interval with start > end"))
            }
            _ => Ok(()),
        }
    }

    /// Membership of a prime `p`.
    pub fn admits(&self, p: u64) -> bool {
        match self {
            SubsetSpec::All => true,
            SubsetSpec::Bernoulli { delta, seed } => unit_hash(*seed, p) < *delta,
            SubsetSpec::ResidueClasses { modulus, allowed } => allowed.contains(&(p % modulus)),
            SubsetSpec::PrefixDrop { x0 } => p > *x0,
            SubsetSpec::WindowDrop { intervals } => !intervals.iter().any(|&(a, b)| (a..=b).contains(&p)),
        }
    }

    /// Relative density predicted analytically, when there is one.
    pub fn intended_density(&self) -> Option<f64> {
        match self {
            SubsetSpec::All | SubsetSpec::PrefixDrop { .. } => Some(1.0),
            SubsetSpec::Bernoulli { delta, .. } => Some(*delta),
            SubsetSpec::ResidueClasses { modulus, allowed } => {
                let m = *modulus;
                let units = (0..m).filter(|&r| gcd(r, m) == 1).count();
                let kept = (0..m).filter(|&r| gcd(r, m) == 1 && allowed.contains(&r)).count();
                Some(kept as f64 / units as f64)
            }
            SubsetSpec::WindowDrop { .. } => None,
        }
    }

    /// Short text form, parseable by [`SubsetSpec::parse`].
    pub fn label(&self) -> String {
        match self {
            SubsetSpec::All => "all".into(),
            SubsetSpec::Bernoulli { delta, seed } => format!("bernoulli:{delta}:{seed}"),
            SubsetSpec::ResidueClasses { modulus, allowed } => {
                let dropped: Vec<String> = (0..*modulus)
                    .filter(|r| !allowed.contains(r))
                    .map(|r| r.to_string())
                    .collect();
                if dropped.len() <= allowed.len() {
                    format!("drop-classes:{modulus}:{}", dropped.join(","))
                } else {
                    let kept: Vec<String> = allowed.iter().map(|r| r.to_string()).collect();
                    format!("classes:{modulus}:{}", kept.join(","))
                }
            }
            SubsetSpec::PrefixDrop { x0 } => format!("prefix-drop:{x0}"),
            SubsetSpec::WindowDrop { intervals } => {
                let parts: Vec<String> = intervals.iter().map(|(a, b)| format!("{a}-{b}")).collect();
                format!("window-drop:{}", parts.join(","))
            }
        }
    }

    /// Parses `all`, `bernoulli:<delta>:<seed>`, `classes:<m>:<r,r,..>`,
    /// `drop-classes:<m>:<r,r,..>`, `prefix-drop:<x0>`,
    /// `window-drop:<a>-<b>,<a>-<b>,..`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |why: &str| Error::invalid("subset", format!("{text:?}: {why}"));
        let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad("expected an integer"));
        let list = |s: &str| -> Result<Vec<u64>> {
            s.split(',').filter(|x| !x.trim().is_empty()).map(num).collect()
        };
        let mut it = text.trim().splitn(3, ':');
        let spec = match (it.next(), it.next(), it.next()) {
            (Some("all"), None, None) => SubsetSpec::All,
            (Some("bernoulli"), Some(d), Some(seed)) => SubsetSpec::Bernoulli {
                delta: d.trim().parse().map_err(|_| bad("expected a density"))?,
                seed: num(seed)?,
            },
            (Some("classes"), Some(m), rest) => SubsetSpec::ResidueClasses {
                modulus: num(m)?,
                allowed: list(rest.unwrap_or(""))?,
            },
            (Some("drop-classes"), Some(m), rest) => SubsetSpec::drop_classes(num(m)?, &list(rest.unwrap_or(""))?),
            (Some("prefix-drop"), Some(x), None) => SubsetSpec::PrefixDrop { x0: num(x)? },
            (Some("window-drop"), Some(w), None) => SubsetSpec::WindowDrop {
                intervals: w
                    .split(',')
                    .map(|iv| {
                        let (a, b) = iv.split_once('-').ok_or_else(|| bad("interval needs a-b"))?;
                        Ok((num(a)?, num(b)?))
                    })
                    .collect::<Result<_>>()?,
            },
            _ => return Err(bad("unknown subset kind")),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform value in `[0, 1)` determined by `(seed, p)` alone.
fn unit_hash(seed: u64, p: u64) -> f64 {
    let h = splitmix64(seed ^ splitmix64(p));
    (h >> 11) as f64 / (1u64 << 53) as f64
}

/// Something that decides membership of primes up to a limit.
pub trait PrimeFilter: Sync {
    fn limit(&self) -> u64;
    /// Whether `n <= limit` is a prime in the set.
    fn admits(&self, n: u64) -> bool;
    fn label(&self) -> String;
}

impl PrimeFilter for PrimeSet {
    fn limit(&self) -> u64 {
        PrimeSet::limit(self)
    }
    fn admits(&self, n: u64) -> bool {
        self.contains(n)
    }
    fn label(&self) -> String {
        "all".into()
    }
}

/// A generated subset `A ⊆ P ∩ [limit]` with its measured density.
#[derive(Clone, Debug)]
pub struct PrimeSubset {
    spec: SubsetSpec,
    limit: u64,
    members: BitSet,
    size: usize,
    prime_count: usize,
    min_prefix_density: f64,
}

impl PrimeSubset {
    pub fn generate(spec: &SubsetSpec, limit: u64) -> Result<Self> {
        if limit < PREFIX_FLOOR {
            return Err(Error::invalid("limit", "subset limit must be at least 100"));
        }
        Self::from_primes(spec, &PrimeSet::sieve(limit)?)
    }

    pub fn from_primes(spec: &SubsetSpec, primes: &PrimeSet) -> Result<Self> {
        spec.validate()?;
        let limit = primes.limit();
        let mut members = BitSet::new(limit as usize + 1);
        let (mut size, mut total) = (0usize, 0usize);
        let mut min_prefix = f64::INFINITY;
        for p in primes.iter() {
            total += 1;
            if spec.admits(p) {
                members.insert(p as usize);
                size += 1;
            }
            if p >= PREFIX_FLOOR {
                min_prefix = min_prefix.min(size as f64 / total as f64);
            }
        }
        if !min_prefix.is_finite() {
            min_prefix = size as f64 / total.max(1) as f64;
        }
        Ok(PrimeSubset {
            spec: spec.clone(),
            limit,
            members,
            size,
            prime_count: total,
            min_prefix_density: min_prefix,
        })
    }

    pub fn spec(&self) -> &SubsetSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn prime_count(&self) -> usize {
        self.prime_count
    }

    /// `|A ∩ [limit]| / |P ∩ [limit]|`.
    pub fn measured_density(&self) -> f64 {
        self.size as f64 / self.prime_count as f64
    }

    /// Minimum of the relative density over prefixes `[x]`, `100 <= x <= limit`;
    /// the observable stand-in for a lower density.
    pub fn min_prefix_density(&self) -> f64 {
        self.min_prefix_density
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter().map(|p| p as u64)
    }

    pub fn contains(&self, p: u64) -> bool {
        self.members.contains(p as usize)
    }
}

impl PrimeFilter for PrimeSubset {
    fn limit(&self) -> u64 {
        self.limit
    }
    fn admits(&self, n: u64) -> bool {
        self.contains(n)
    }
    fn label(&self) -> String {
        self.spec.label()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_has_density_one() {
        let a = PrimeSubset::generate(&SubsetSpec::All, 10_000).unwrap();
        assert_eq!(a.len(), 1229);
        assert_eq!(a.measured_density(), 1.0);
    }

    #[test]
    fn bernoulli_half() {
        let spec = SubsetSpec::Bernoulli { delta: 0.5, seed: 42 };
        let a = PrimeSubset::generate(&spec, 10_000).unwrap();
        let d = a.measured_density();
        assert!((0.45..=0.55).contains(&d), "{d}");
        let again = PrimeSubset::generate(&spec, 10_000).unwrap();
        assert_eq!(a.iter().collect::<Vec<_>>(), again.iter().collect::<Vec<_>>());
    }

    #[test]
    fn drop_one_class_mod_40() {
        let spec = SubsetSpec::drop_classes(40, &[3]);
        assert_eq!(spec.intended_density(), Some(15.0 / 16.0));
        let a = PrimeSubset::generate(&spec, 100_000).unwrap();
        assert!((a.measured_density() - 15.0 / 16.0).abs() < 0.01);
        assert!(a.iter().all(|p| p % 40 != 3));
    }

    #[test]
    fn window_drop_prefix_minimum() {
        let spec = SubsetSpec::WindowDrop { intervals: vec![(1000, 3000)] };
        let a = PrimeSubset::generate(&spec, 20_000).unwrap();
        assert!(a.min_prefix_density() < a.measured_density());
        assert!(!a.contains(1009));
        assert_eq!(spec.intended_density(), None);
    }

    #[test]
    fn parse_round_trip() {
        for text in ["all", "bernoulli:0.8:7", "drop-classes:40:3", "prefix-drop:1000", "window-drop:10-20,30-40"] {
            let spec = SubsetSpec::parse(text).unwrap();
            assert_eq!(SubsetSpec::parse(&spec.label()).unwrap(), spec, "{text}");
        }
        assert!(SubsetSpec::parse("bernoulli:1.5:1").is_err());
        assert!(SubsetSpec::parse("nonsense").is_err());
    }
}

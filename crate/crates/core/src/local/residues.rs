use crate::arith::intmath::{gcd, pow_mod};
use crate::arith::{tau, FactoredModulus};
use crate::error::{Error, Result};

/// Default cap on the modulus size that may be enumerated.
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

/// The `k`-th power residues modulo `m`, obtained by enumerating `t^k`
/// for every `t ∈ Z_m`.
///
/// `all_kth_residues` includes `0^k`; `unit_residues` is `Z(m)`, the
/// subset coprime to `m`.
#[derive(Clone, Debug)]
pub struct PowerResidueTable {
    modulus: FactoredModulus,
    k: u64,
    multiplicity: Vec<u32>,
    all: Vec<u64>,
    units: Vec<u64>,
}

impl PowerResidueTable {
    pub fn new(m: &FactoredModulus, k: u64) -> Result<Self> {
        Self::with_cap(m, k, DEFAULT_ENUM_CAP)
    }

    pub fn with_cap(m: &FactoredModulus, k: u64, cap: u64) -> Result<Self> {
        let mv = m.value();
        if mv < 2 {
            return Err(Error::invalid("modulus", "must be at least 2"));
        }
        if k == 0 {
            return Err(Error::invalid("k", "must be at least 1"));
        }
        if mv > cap {
            return Err(Error::ResourceLimit {
                what: "residue enumeration",
                requested: mv as u128,
                cap: cap as u128,
            });
        }
        let mut multiplicity = vec![0u32; mv as usize];
        for t in 0..mv {
            multiplicity[pow_mod(t, k, mv) as usize] += 1;
        }
        let all: Vec<u64> = (0..mv).filter(|&r| multiplicity[r as usize] > 0).collect();
        let units: Vec<u64> = all.iter().copied().filter(|&r| m.is_coprime_to(r)).collect();
        Ok(PowerResidueTable {
            modulus: m.clone(),
            k,
            multiplicity,
            all,
            units,
        })
    }

    pub fn modulus(&self) -> &FactoredModulus {
        &self.modulus
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// `Z_m^{(k)}`, sorted.
    pub fn all_kth_residues(&self) -> &[u64] {
        &self.all
    }

    /// `Z(m)`, sorted.
    pub fn unit_residues(&self) -> &[u64] {
        &self.units
    }

    pub fn is_unit_residue(&self, r: u64) -> bool {
        r < self.modulus.value()
            && self.multiplicity[r as usize] > 0
            && gcd(r, self.modulus.value()) == 1
    }

    /// `#{z ∈ Z_m : z^k ≡ r}`.
    pub fn multiplicity(&self, r: u64) -> u32 {
        self.multiplicity
            .get(r as usize)
            .copied()
            .unwrap_or(0)
    }

    /// `σ(b)` for `b ∈ Z(m)`, cross-checked against `φ(m) / |Z(m)|`.
    pub fn sigma(&self, b: u64) -> Result<u64> {
        if !self.is_unit_residue(b) {
            return Err(Error::invalid(
                "b",
                format!("{b} is not a unit k-th power residue mod {}", self.modulus.value()),
            ));
        }
        let counted = self.multiplicity(b) as u64;
        let phi = self.modulus.phi();
        let z = self.units.len() as u64;
        if phi % z != 0 || phi / z != counted {
            return Err(Error::InvariantViolation(format!(
                "sigma({b}) = {counted} but phi/|Z| = {phi}/{z}"
            )));
        }
        Ok(counted)
    }

    /// `Σ_{b ∈ Z(m)} σ(b)`; equals `φ(m)`.
    pub fn total_unit_multiplicity(&self) -> u64 {
        self.units.iter().map(|&b| self.multiplicity(b) as u64).sum()
    }
}

/// `σ(b) = #{z ∈ [W] : z^k ≡ b (mod W)}`.
pub fn sigma_b(w: &FactoredModulus, k: u64, b: u64) -> Result<u64> {
    PowerResidueTable::new(w, k)?.sigma(b)
}

/// Counts `k`-th power residues modulo `p^{2k}` lying over `a ∈ Z(p)` and
/// checks the count against `p^{2k-1-τ(k,p)}`.
pub fn lemma43_count(p: u64, k: u64, a: u64) -> Result<u64> {
    lemma43_count_with_cap(p, k, a, DEFAULT_ENUM_CAP)
}

pub fn lemma43_count_with_cap(p: u64, k: u64, a: u64, cap: u64) -> Result<u64> {
    if p <= 2 || !crate::arith::intmath::is_prime_trial(p) {
        return Err(Error::invalid("p", "must be an odd prime"));
    }
    let pm = FactoredModulus::from_factors(&[(p, 1)])?;
    let small = PowerResidueTable::new(&pm, k)?;
    if !small.is_unit_residue(a % p) || a >= p {
        return Err(Error::invalid("a", format!("{a} is not in Z({p})")));
    }
    let e = u32::try_from(2 * k).map_err(|_| Error::Overflow("p^{2k}"))?;
    let big = FactoredModulus::from_factors(&[(p, e)])?;
    let table = PowerResidueTable::with_cap(&big, k, cap)?;
    let count = table
        .all_kth_residues()
        .iter()
        .filter(|&&b| b % p == a)
        .count() as u64;
    let closed = p.pow(e - 1 - tau(k, p));
    if count != closed {
        return Err(Error::InvariantViolation(format!(
            "residues over {a} mod {p}^{e}: counted {count}, closed form {closed}"
        )));
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::compute_w;

    fn fm(n: u64) -> FactoredModulus {
        FactoredModulus::factorize(n).unwrap()
    }

    #[test]
    fn squares_mod_16() {
        let t = PowerResidueTable::new(&fm(16), 2).unwrap();
        assert_eq!(t.all_kth_residues(), &[0, 1, 4, 9]);
        assert_eq!(t.unit_residues(), &[1, 9]);
        assert_eq!(t.sigma(1).unwrap(), 4);
        assert_eq!(t.sigma(9).unwrap(), 4);
        assert!(t.sigma(4).is_err());
    }

    #[test]
    fn z3_and_z1296() {
        let t3 = PowerResidueTable::new(&fm(3), 2).unwrap();
        assert_eq!(t3.unit_residues(), &[1]);
        let w = compute_w(3, 2).unwrap();
        let t = PowerResidueTable::new(&w, 2).unwrap();
        assert_eq!(t.unit_residues().len(), 54);
        assert_eq!(sigma_b(&w, 2, 1).unwrap(), 8);
        // CRT: Z(16) has 2 elements, Z(81) has 27
        let z81 = PowerResidueTable::new(&fm(81), 2).unwrap();
        assert_eq!(z81.unit_residues().len(), 27);
    }

    #[test]
    fn lemma43_examples() {
        assert_eq!(lemma43_count(3, 2, 1).unwrap(), 27);
        assert_eq!(lemma43_count(5, 2, 4).unwrap(), 125);
        assert_eq!(lemma43_count(3, 3, 2).unwrap(), 81);
        assert!(lemma43_count(3, 2, 2).is_err());
        assert!(lemma43_count(2, 2, 1).is_err());
        assert!(matches!(
            lemma43_count_with_cap(7, 3, 1, 1000),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn cap_refusal() {
        assert!(matches!(
            PowerResidueTable::with_cap(&fm(1_000_003), 2, 1_000_000),
            Err(Error::ResourceLimit { .. })
        ));
    }
}

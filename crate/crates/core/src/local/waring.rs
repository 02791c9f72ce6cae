//! Sumset coverage modulo `q` and the Waring-pair property.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::residues::PowerResidueTable;
use crate::arith::intmath::{binomial, mul_mod, pow_mod};
use crate::arith::{compute_rk, FactoredModulus};
use crate::bits::BitSet;
use crate::error::{Error, Result};

/// Default cap on the number of subsets an exhaustive scan may visit.
pub const DEFAULT_EXHAUSTIVE_BUDGET: u128 = 1 << 25;

const CHUNK: u128 = 1 << 14;

/// Outcome of comparing `sB` with the admissible class `{a ≡ s (mod gcd(R_k, q))}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverCheck {
    pub covered: bool,
    /// `gcd(R_k, q)`.
    pub class_modulus: u64,
    /// Target residues missing from `sB`.
    pub uncovered: Vec<u64>,
    /// Residues of `sB` outside the target class (always empty for `B ⊆ Z(q)`).
    pub extraneous: Vec<u64>,
}

/// Shared state for repeated coverage checks at fixed `(q, k, s)`.
#[derive(Clone, Debug)]
pub struct CoverContext {
    table: PowerResidueTable,
    s: u64,
    class_modulus: u64,
    /// `class_masks[j]` = residues `≡ j (mod class_modulus)`.
    class_masks: Vec<BitSet>,
    small: Option<SmallClasses>,
}

#[derive(Clone, Debug)]
struct SmallClasses {
    q: u32,
    masks: Vec<u128>,
    units: Vec<u128>,
}

impl CoverContext {
    pub fn new(q: &FactoredModulus, k: u64, s: u64) -> Result<Self> {
        Self::from_table(PowerResidueTable::new(q, k)?, s)
    }

    pub fn from_table(table: PowerResidueTable, s: u64) -> Result<Self> {
        if s == 0 {
            return Err(Error::invalid("s", "must be at least 1"));
        }
        let q = table.modulus().value();
        let g = compute_rk(table.k())?.gcd_u64(q);
        let class_masks: Vec<BitSet> = (0..g)
            .map(|j| BitSet::from_indices(q as usize, (j..q).step_by(g as usize).map(|r| r as usize)))
            .collect();
        let small = (q <= 128).then(|| SmallClasses {
            q: q as u32,
            masks: (0..g)
                .map(|j| (j..q).step_by(g as usize).fold(0u128, |m, r| m | 1u128 << r))
                .collect(),
            units: table.unit_residues().iter().map(|&r| 1u128 << r).collect(),
        });
        Ok(CoverContext {
            table,
            s,
            class_modulus: g,
            class_masks,
            small,
        })
    }

    pub fn table(&self) -> &PowerResidueTable {
        &self.table
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    /// Size of the smallest subset exceeding half of `Z(q)`.
    pub fn minimal_size(&self) -> usize {
        self.table.unit_residues().len() / 2 + 1
    }

    fn validate(&self, subset: &[u64]) -> Result<()> {
        if subset.is_empty() {
            return Err(Error::invalid("B", "subset must be nonempty"));
        }
        if let Some(&b) = subset.iter().find(|&&b| !self.table.is_unit_residue(b)) {
            return Err(Error::invalid("B", format!("{b} is not in Z(q)")));
        }
        Ok(())
    }

    /// Full comparison with the lists of missing and extra residues.
    pub fn check(&self, subset: &[u64]) -> Result<CoverCheck> {
        self.validate(subset)?;
        let q = self.table.modulus().value() as usize;
        let b = BitSet::from_indices(q, subset.iter().map(|&x| x as usize));
        let sum = b.multiple_cyclic(self.s);
        let target = &self.class_masks[(self.s % self.class_modulus) as usize];
        let uncovered: Vec<u64> = target.iter().filter(|&r| !sum.contains(r)).map(|r| r as u64).collect();
        let extraneous: Vec<u64> = sum.iter().filter(|&r| !target.contains(r)).map(|r| r as u64).collect();
        Ok(CoverCheck {
            covered: uncovered.is_empty() && extraneous.is_empty(),
            class_modulus: self.class_modulus,
            uncovered,
            extraneous,
        })
    }

    /// Fast yes/no test on indices into `Z(q)`.
    ///
    /// Stops as soon as some multiple `jB` with `j <= s` fills its class:
    /// every unit k-th power is `≡ 1 (mod gcd(R_k, q))`, so translating a full
    /// class by an element of `B` gives the next full class.
    pub fn covers_indices(&self, idx: &[usize]) -> bool {
        if let Some(small) = &self.small {
            return self.covers_small(small, idx);
        }
        let q = self.table.modulus().value() as usize;
        let units = self.table.unit_residues();
        let base = BitSet::from_indices(q, idx.iter().map(|&i| units[i] as usize));
        self.covers_with(base, |a, b| a.sumset_cyclic(b), |set, j| {
            set == &self.class_masks[(j % self.class_modulus) as usize]
        })
    }

    fn covers_small(&self, small: &SmallClasses, idx: &[usize]) -> bool {
        let q = small.q;
        let mask = if q == 128 { u128::MAX } else { (1u128 << q) - 1 };
        let rot = |v: u128, x: u32| -> u128 {
            if x == 0 {
                v
            } else {
                ((v << x) | (v >> (q - x))) & mask
            }
        };
        let sum = |a: &u128, b: &u128| -> u128 {
            let (mut small_side, large) = if a.count_ones() <= b.count_ones() { (*a, *b) } else { (*b, *a) };
            let mut out = 0u128;
            while small_side != 0 {
                let x = small_side.trailing_zeros();
                small_side &= small_side - 1;
                out |= rot(large, x);
            }
            out
        };
        let base = idx.iter().fold(0u128, |m, &i| m | small.units[i]);
        self.covers_with(base, sum, |set, j| *set == small.masks[(j % self.class_modulus) as usize])
    }

    fn covers_with<S: Clone>(
        &self,
        base: S,
        sum: impl Fn(&S, &S) -> S,
        full: impl Fn(&S, u64) -> bool,
    ) -> bool {
        // binary expansion of s: acc holds acc_mult * B, sq holds sq_mult * B
        let mut acc: Option<(S, u64)> = None;
        let mut sq = (base, 1u64);
        let mut e = self.s;
        loop {
            if full(&sq.0, sq.1) {
                return true;
            }
            if e & 1 == 1 {
                let next = match acc {
                    None => sq.clone(),
                    Some((a, m)) => (sum(&a, &sq.0), m + sq.1),
                };
                if full(&next.0, next.1) {
                    return true;
                }
                acc = Some(next);
            }
            e >>= 1;
            if e == 0 {
                return false;
            }
            sq = (sum(&sq.0, &sq.0), sq.1 * 2);
        }
    }
}

/// Checks whether the `s`-fold sumset of `B ⊆ Z(q)` is the full admissible
/// class modulo `q`.
pub fn sumset_cover_check(q: &FactoredModulus, k: u64, s: u64, subset: &[u64]) -> Result<CoverCheck> {
    CoverContext::new(q, k, s)?.check(subset)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Every subset of the minimal majority size.
    Exhaustive,
    /// Uniformly random subsets of the minimal majority size.
    Sampled { trials: u64, seed: u64 },
    /// Adversarial families built from the group structure of `Z(q)`.
    Structured,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Exhaustive => "exhaustive",
            Strategy::Sampled { .. } => "sampled",
            Strategy::Structured => "structured",
        }
    }
}

impl Serialize for Strategy {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pair,
    NotPair,
    NoViolationFound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// The failing subset, sorted.
    pub subset: Vec<u64>,
    /// Admissible residues missing from its `s`-fold sumset.
    pub uncovered: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WaringPairReport {
    pub q: FactoredModulus,
    pub k: u64,
    pub s: u64,
    pub strategy: Strategy,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    /// Subsets examined.
    pub trials: u64,
}

impl WaringPairReport {
    /// Re-derives a `not-pair` verdict from the witness alone.
    pub fn reverify(&self) -> Result<bool> {
        match (&self.verdict, &self.witness) {
            (Verdict::NotPair, Some(w)) => {
                let ctx = CoverContext::new(&self.q, self.k, self.s)?;
                let majority = 2 * w.subset.len() > ctx.table().unit_residues().len();
                let check = ctx.check(&w.subset)?;
                Ok(majority && !check.covered && check.uncovered == w.uncovered)
            }
            (Verdict::NotPair, None) => Ok(false),
            (Verdict::Pair, None) => Ok(self.strategy == Strategy::Exhaustive),
            (Verdict::NoViolationFound, None) => Ok(true),
            (_, Some(_)) => Ok(false),
        }
    }
}

/// Tests the Waring-pair property of `(q, s)` for exponent `k`.
///
/// By monotonicity of sumsets in `B` it suffices to look at subsets of size
/// `⌊|Z(q)|/2⌋ + 1`. Only the exhaustive strategy can return
/// [`Verdict::Pair`].
pub fn waring_pair_check(
    q: &FactoredModulus,
    k: u64,
    s: u64,
    strategy: Strategy,
) -> Result<WaringPairReport> {
    waring_pair_check_with_budget(q, k, s, strategy, DEFAULT_EXHAUSTIVE_BUDGET)
}

pub fn waring_pair_check_with_budget(
    q: &FactoredModulus,
    k: u64,
    s: u64,
    strategy: Strategy,
    budget: u128,
) -> Result<WaringPairReport> {
    let ctx = CoverContext::new(q, k, s)?;
    let n = ctx.table().unit_residues().len();
    let m = ctx.minimal_size();
    let (failure, trials): (Option<Vec<usize>>, u64) = match strategy {
        Strategy::Exhaustive => {
            let total = binomial(n as u64, m as u64).ok_or(Error::Overflow("subset count"))?;
            if total > budget {
                return Err(Error::ResourceLimit {
                    what: "exhaustive Waring-pair scan",
                    requested: total,
                    cap: budget,
                });
            }
            exhaustive_scan(&ctx, n, m, total)
        }
        Strategy::Sampled { trials, seed } => sampled_scan(&ctx, n, m, trials, seed),
        Strategy::Structured => {
            let families = structured_families(ctx.table(), m);
            let found = families
                .par_iter()
                .enumerate()
                .find_map_first(|(i, idx)| (!ctx.covers_indices(idx)).then(|| (i, idx.clone())));
            match found {
                Some((i, idx)) => (Some(idx), i as u64 + 1),
                None => (None, families.len() as u64),
            }
        }
    };
    let units = ctx.table().unit_residues();
    let witness = match failure {
        Some(idx) => {
            let mut subset: Vec<u64> = idx.iter().map(|&i| units[i]).collect();
            subset.sort_unstable();
            let check = ctx.check(&subset)?;
            Some(Witness {
                subset,
                uncovered: check.uncovered,
            })
        }
        None => None,
    };
    let verdict = match (&witness, strategy) {
        (Some(_), _) => Verdict::NotPair,
        (None, Strategy::Exhaustive) => Verdict::Pair,
        (None, _) => Verdict::NoViolationFound,
    };
    Ok(WaringPairReport {
        q: q.clone(),
        k,
        s,
        strategy,
        verdict,
        witness,
        trials,
    })
}

fn exhaustive_scan(ctx: &CoverContext, n: usize, m: usize, total: u128) -> (Option<Vec<usize>>, u64) {
    let chunks = total.div_ceil(CHUNK) as u64;
    let found = (0..chunks).into_par_iter().find_map_first(|c| {
        let start = c as u128 * CHUNK;
        let end = (start + CHUNK).min(total);
        let mut comb = unrank_combination(n, m, start);
        let mut rank = start;
        while rank < end {
            if !ctx.covers_indices(&comb) {
                return Some((rank, comb));
            }
            next_combination(&mut comb, n);
            rank += 1;
        }
        None
    });
    match found {
        Some((rank, comb)) => (Some(comb), rank as u64 + 1),
        None => (None, total as u64),
    }
}

fn sampled_scan(ctx: &CoverContext, n: usize, m: usize, trials: u64, seed: u64) -> (Option<Vec<usize>>, u64) {
    let found = (0..trials).into_par_iter().find_map_first(|t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        let mut idx = rand::seq::index::sample(&mut rng, n, m).into_vec();
        idx.sort_unstable();
        (!ctx.covers_indices(&idx)).then_some((t, idx))
    });
    match found {
        Some((t, idx)) => (Some(idx), t + 1),
        None => (None, trials),
    }
}

/// Lexicographic combination of rank `rank` among `m`-subsets of `0..n`.
fn unrank_combination(n: usize, m: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(m);
    let mut x = 0usize;
    for i in 0..m {
        loop {
            let c = binomial((n - x - 1) as u64, (m - i - 1) as u64).expect("fits u128");
            if rank < c {
                break;
            }
            rank -= c;
            x += 1;
        }
        out.push(x);
        x += 1;
    }
    out
}

fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let m = comb.len();
    let mut i = m;
    while i > 0 {
        i -= 1;
        if comb[i] < n - m + i {
            comb[i] += 1;
            for j in i + 1..m {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

const MAX_STRUCTURED: usize = 50_000;

/// Adversarial majority subsets of `Z(q)`, as sorted index lists.
///
/// Families: cyclic windows of consecutive residues; unions of cosets of
/// subgroups of `Z(q)` (cyclic subgroups, congruence kernels
/// `{x ≡ 1 (mod d)}`, and `j`-th power subgroups), padded from one further
/// coset up to the minimal majority size.
pub fn structured_families(table: &PowerResidueTable, m: usize) -> Vec<Vec<usize>> {
    let units = table.unit_residues();
    let n = units.len();
    let q = table.modulus().value();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |mut v: Vec<usize>, out: &mut Vec<Vec<usize>>| {
        v.sort_unstable();
        v.dedup();
        if 2 * v.len() > n && out.len() < MAX_STRUCTURED && seen.insert(v.clone()) {
            out.push(v);
        }
    };

    for start in 0..n {
        push((0..m).map(|i| (start + i) % n).collect(), &mut out);
    }

    let index_of = |r: u64| units.binary_search(&r).expect("closed under multiplication");
    for h in subgroups(table) {
        if 2 * h.len() > n {
            continue;
        }
        // cosets ordered by their least element
        let mut covered = vec![false; n];
        let mut cosets: Vec<Vec<usize>> = Vec::new();
        for (i, &x) in units.iter().enumerate() {
            if covered[i] {
                continue;
            }
            let coset: Vec<usize> = h.iter().map(|&g| index_of(mul_mod(x, g, q))).collect();
            for &c in &coset {
                covered[c] = true;
            }
            cosets.push(coset);
        }
        let r = cosets.len();
        let t = m / h.len();
        let choices: Vec<Vec<usize>> = if r <= 10 {
            combinations(r, t)
        } else {
            (0..r).map(|s| (0..t).map(|i| (s + i) % r).collect()).collect()
        };
        for chosen in choices {
            let base: Vec<usize> = chosen.iter().flat_map(|&c| cosets[c].iter().copied()).collect();
            let need = m.saturating_sub(base.len());
            if need == 0 {
                push(base, &mut out);
                continue;
            }
            for (ci, coset) in cosets.iter().enumerate() {
                if chosen.contains(&ci) {
                    continue;
                }
                let mut sorted = coset.clone();
                sorted.sort_unstable();
                let mut v = base.clone();
                v.extend(sorted.iter().take(need));
                push(v, &mut out);
            }
        }
    }
    out
}

fn combinations(r: usize, t: usize) -> Vec<Vec<usize>> {
    if t > r {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut comb: Vec<usize> = (0..t).collect();
    loop {
        out.push(comb.clone());
        if t == 0 || !next_combination(&mut comb, r) {
            break;
        }
    }
    out
}

/// Distinct proper subgroups of the group `Z(q)`, each as a sorted residue list.
fn subgroups(table: &PowerResidueTable) -> Vec<Vec<u64>> {
    let units = table.unit_residues();
    let q = table.modulus().value();
    let n = units.len() as u64;
    let mut found: BTreeSet<Vec<u64>> = BTreeSet::new();
    for &g in units {
        let mut h = vec![1u64];
        let mut x = g;
        while x != 1 {
            h.push(x);
            x = mul_mod(x, g, q);
        }
        h.sort_unstable();
        found.insert(h);
    }
    for d in table.modulus().divisors() {
        if d > 1 && d < q {
            found.insert(units.iter().copied().filter(|&x| x % d == 1).collect());
        }
    }
    for j in 2..=n {
        if n % j == 0 {
            let mut h: Vec<u64> = units.iter().map(|&x| pow_mod(x, j, q)).collect();
            h.sort_unstable();
            h.dedup();
            found.insert(h);
        }
    }
    found.into_iter().filter(|h| (h.len() as u64) < n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fm(n: u64) -> FactoredModulus {
        FactoredModulus::factorize(n).unwrap()
    }

    #[test]
    fn cover_examples() {
        let c = sumset_cover_check(&fm(16), 2, 16, &[1, 9]).unwrap();
        assert!(c.covered);
        assert_eq!(c.class_modulus, 8);
        let c = sumset_cover_check(&fm(3), 2, 2, &[1]).unwrap();
        assert!(c.covered);
        let c = sumset_cover_check(&fm(5), 2, 2, &[1, 4]).unwrap();
        assert!(!c.covered);
        assert_eq!(c.uncovered, vec![1, 4]);
        assert!(c.extraneous.is_empty());
    }

    #[test]
    fn rejects_non_members() {
        assert!(sumset_cover_check(&fm(16), 2, 4, &[3]).is_err());
        assert!(sumset_cover_check(&fm(16), 2, 4, &[]).is_err());
    }

    #[test]
    fn unrank_matches_iteration() {
        let (n, m) = (7, 3);
        let mut comb: Vec<usize> = (0..m).collect();
        let mut rank = 0u128;
        loop {
            assert_eq!(unrank_combination(n, m, rank), comb);
            rank += 1;
            if !next_combination(&mut comb, n) {
                break;
            }
        }
        assert_eq!(rank, 35);
    }

    #[test]
    fn fast_path_agrees_with_full_check() {
        // q <= 128 goes through the u128 path, 1296 through bit sets
        for (q, k, s) in [(16u64, 2u64, 16u64), (5, 2, 2), (81, 2, 3), (81, 2, 16), (1296, 2, 8), (200, 2, 5)] {
            let ctx = CoverContext::new(&fm(q), k, s).unwrap();
            let units = ctx.table().unit_residues().to_vec();
            let m = ctx.minimal_size();
            for start in 0..units.len().min(6) {
                let idx: Vec<usize> = (0..m).map(|i| (start + i) % units.len()).collect();
                let subset: Vec<u64> = idx.iter().map(|&i| units[i]).collect();
                assert_eq!(ctx.covers_indices(&idx), ctx.check(&subset).unwrap().covered, "q={q} s={s}");
            }
        }
    }

    #[test]
    fn pair_examples() {
        let r = waring_pair_check(&fm(16), 2, 16, Strategy::Exhaustive).unwrap();
        assert_eq!(r.verdict, Verdict::Pair);
        assert_eq!(r.trials, 1);
        let r = waring_pair_check(&fm(5), 2, 2, Strategy::Exhaustive).unwrap();
        assert_eq!(r.verdict, Verdict::NotPair);
        assert_eq!(r.witness.as_ref().unwrap().subset, vec![1, 4]);
        assert!(r.reverify().unwrap());
    }

    #[test]
    fn exhaustive_budget() {
        let r = waring_pair_check_with_budget(&fm(81), 2, 16, Strategy::Exhaustive, 1000);
        assert!(matches!(r, Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn sampled_is_deterministic() {
        let s = Strategy::Sampled { trials: 200, seed: 9 };
        let a = waring_pair_check(&fm(81), 2, 3, s).unwrap();
        let b = waring_pair_check(&fm(81), 2, 3, s).unwrap();
        assert_eq!(a.witness, b.witness);
        assert_eq!(a.trials, b.trials);
    }

    #[test]
    fn report_json_shape() {
        let r = waring_pair_check(&fm(5), 2, 2, Strategy::Exhaustive).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["strategy"], "exhaustive");
        assert_eq!(v["verdict"], "not-pair");
        assert_eq!(v["witness"]["subset"], serde_json::json!([1, 4]));
        assert_eq!(v["q"]["value"], 5);
    }
}

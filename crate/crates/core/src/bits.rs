//! Fixed-length bit sets with word-parallel sumset operations.
//!
//! Two sumsets are provided: on the integer line truncated to the set
//! length, and cyclic modulo the set length. Both iterate over the smaller
//! operand and OR shifted copies of the larger one word by word.

use rayon::prelude::*;

use crate::arith::intmath::Integer;

const PAR_WORDS: usize = 512;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut s = BitSet::new(len);
        for i in idx {
            s.insert(i);
        }
        s
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            crate::arith::BitIter(word).map(move |b| w * 64 + b as usize)
        })
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.len == other.len
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    /// `{a + b : a ∈ self, b ∈ other, a + b < len}`.
    pub fn sumset_linear(&self, other: &BitSet) -> BitSet {
        assert_eq!(self.len, other.len);
        let (small, large) = order_by_count(self, other);
        let shifts: Vec<i64> = small.iter().map(|x| -(x as i64)).collect();
        let mut out = BitSet::new(self.len);
        or_offsets(&mut out.words, &large.words, &shifts);
        out.mask_tail();
        out
    }

    /// `{(a + b) mod len : a ∈ self, b ∈ other}`.
    pub fn sumset_cyclic(&self, other: &BitSet) -> BitSet {
        assert_eq!(self.len, other.len);
        let q = self.len;
        let (small, large) = order_by_count(self, other);
        // bit r of (x + B) is bit (r - x) mod q of B = bit (r + q - x) of B‖B
        let doubled = large.concat_self();
        let shifts: Vec<i64> = small.iter().map(|x| (q - x) as i64).collect();
        let mut out = BitSet::new(q);
        or_offsets(&mut out.words, &doubled.words, &shifts);
        out.mask_tail();
        out
    }

    /// `s`-fold sumset modulo `len` by repeated doubling; `s >= 1`.
    pub fn multiple_cyclic(&self, s: u64) -> BitSet {
        power(self, s, |a, b| a.sumset_cyclic(b))
    }

    /// `s`-fold sumset on `[0, len)`; `s >= 1`.
    ///
    /// Sparse bases are added one copy at a time, dense ones by doubling,
    /// whichever needs fewer shifted word passes.
    pub fn multiple_linear(&self, s: u64) -> BitSet {
        assert!(s >= 1);
        let base = self.count() as u64;
        let doubling_cost = (self.len as u64).saturating_mul(64 - s.leading_zeros() as u64 + 1);
        let sequential_cost = base.saturating_mul(s - 1);
        if sequential_cost <= doubling_cost {
            let mut acc = self.clone();
            for _ in 1..s {
                acc = self.sumset_linear(&acc);
            }
            acc
        } else {
            power(self, s, |a, b| a.sumset_linear(b))
        }
    }

    fn concat_self(&self) -> BitSet {
        let mut out = BitSet::new(2 * self.len);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        let shifts = [-(self.len as i64)];
        let mut upper = vec![0u64; out.words.len()];
        or_offsets(&mut upper, &self.words, &shifts);
        for (o, u) in out.words.iter_mut().zip(upper) {
            *o |= u;
        }
        out
    }

    fn mask_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }
}

fn order_by_count<'a>(a: &'a BitSet, b: &'a BitSet) -> (&'a BitSet, &'a BitSet) {
    if a.count() <= b.count() {
        (a, b)
    } else {
        (b, a)
    }
}

fn power(base: &BitSet, s: u64, op: impl Fn(&BitSet, &BitSet) -> BitSet) -> BitSet {
    assert!(s >= 1, "sumset multiple must be positive");
    let mut acc: Option<BitSet> = None;
    let mut sq = base.clone();
    let mut e = s;
    loop {
        if e.is_odd() {
            acc = Some(match acc {
                None => sq.clone(),
                Some(a) => op(&a, &sq),
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        sq = op(&sq, &sq);
    }
    acc.expect("s >= 1")
}

/// 64 bits of `src` starting at bit `pos`; out-of-range bits read as 0.
#[inline]
fn read_word(src: &[u64], pos: i64) -> u64 {
    let nbits = src.len() as i64 * 64;
    if pos <= -64 || pos >= nbits {
        return 0;
    }
    let w = pos.div_euclid(64);
    let sh = pos.rem_euclid(64) as u32;
    let lo = if w >= 0 { src[w as usize] } else { 0 };
    if sh == 0 {
        return lo;
    }
    let hi_idx = w + 1;
    let hi = if hi_idx >= 0 && (hi_idx as usize) < src.len() {
        src[hi_idx as usize]
    } else {
        0
    };
    (lo >> sh) | (hi << (64 - sh))
}

/// `dst[bit r] |= src[bit r + off]` for every offset.
fn or_offsets(dst: &mut [u64], src: &[u64], offsets: &[i64]) {
    let run = |base: usize, chunk: &mut [u64]| {
        for &off in offsets {
            for (i, d) in chunk.iter_mut().enumerate() {
                *d |= read_word(src, ((base + i) * 64) as i64 + off);
            }
        }
    };
    if dst.len() >= PAR_WORDS && offsets.len() > 1 {
        dst.par_chunks_mut(PAR_WORDS)
            .enumerate()
            .for_each(|(c, chunk)| run(c * PAR_WORDS, chunk));
    } else {
        run(0, dst);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn naive_cyclic(a: &BTreeSet<usize>, b: &BTreeSet<usize>, q: usize) -> BTreeSet<usize> {
        a.iter().flat_map(|x| b.iter().map(move |y| (x + y) % q)).collect()
    }

    #[test]
    fn cyclic_matches_naive() {
        for q in [1usize, 5, 16, 63, 64, 65, 81, 130, 1296] {
            let a: BTreeSet<usize> = (0..q).filter(|i| (i * 7 + 3) % 5 == 0).collect();
            let b: BTreeSet<usize> = (0..q).filter(|i| (i * i) % 11 < 3).collect();
            let sa = BitSet::from_indices(q, a.iter().copied());
            let sb = BitSet::from_indices(q, b.iter().copied());
            let got: BTreeSet<usize> = sa.sumset_cyclic(&sb).iter().collect();
            assert_eq!(got, naive_cyclic(&a, &b, q), "q = {q}");
        }
    }

    #[test]
    fn linear_matches_naive() {
        let len = 3000;
        let a: Vec<usize> = (0..60).map(|i| i * i).filter(|&v| v < len).collect();
        let sa = BitSet::from_indices(len, a.iter().copied());
        let got: BTreeSet<usize> = sa.sumset_linear(&sa).iter().collect();
        let want: BTreeSet<usize> = a
            .iter()
            .flat_map(|x| a.iter().map(move |y| x + y))
            .filter(|&v| v < len)
            .collect();
        assert_eq!(got, want);
        let triple: BTreeSet<usize> = sa.multiple_linear(3).iter().collect();
        let want3: BTreeSet<usize> = want
            .iter()
            .flat_map(|x| a.iter().map(move |y| x + y))
            .filter(|&v| v < len)
            .collect();
        assert_eq!(triple, want3);
    }

    #[test]
    fn multiples_agree_between_strategies() {
        let len = 5000;
        let sa = BitSet::from_indices(len, [4usize, 9, 25, 49, 121]);
        let seq = (1..7).fold(sa.clone(), |acc, _| sa.sumset_linear(&acc));
        assert_eq!(power(&sa, 7, |a, b| a.sumset_linear(b)), seq);
        assert_eq!(sa.multiple_linear(7), seq);
    }

    #[test]
    fn cyclic_multiple() {
        let b = BitSet::from_indices(16, [1usize, 9]);
        let got: Vec<usize> = b.multiple_cyclic(16).iter().collect();
        assert_eq!(got, vec![0, 8]);
    }
}

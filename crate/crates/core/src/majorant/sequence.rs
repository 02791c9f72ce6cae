//! Weighted sequences on `[N]` and their on-disk forms.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceKind {
    Nu,
    F,
    BoldF,
    Mu,
    Psi,
    /// `1_[N]` or any other sequence not produced by a builder.
    Plain,
}

impl SequenceKind {
    pub fn code(self) -> u64 {
        match self {
            SequenceKind::Nu => 0,
            SequenceKind::F => 1,
            SequenceKind::BoldF => 2,
            SequenceKind::Mu => 3,
            SequenceKind::Psi => 4,
            SequenceKind::Plain => 5,
        }
    }

    pub fn from_code(c: u64) -> Result<Self> {
        Ok(match c {
            0 => SequenceKind::Nu,
            1 => SequenceKind::F,
            2 => SequenceKind::BoldF,
            3 => SequenceKind::Mu,
            4 => SequenceKind::Psi,
            5 => SequenceKind::Plain,
            _ => return Err(Error::invalid("kind", format!("unknown sequence kind code {c}"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            SequenceKind::Nu => "nu",
            SequenceKind::F => "f",
            SequenceKind::BoldF => "bold-f",
            SequenceKind::Mu => "mu",
            SequenceKind::Psi => "psi",
            SequenceKind::Plain => "plain",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceMeta {
    pub kind: SequenceKind,
    pub w: u64,
    pub b: u64,
    pub k: u64,
    pub subset: String,
    /// `⌊(WN+b)^{1/k}⌋`.
    pub y: u64,
    /// `ln(WN+W)/k`.
    pub l: f64,
}

impl SequenceMeta {
    pub fn plain() -> Self {
        SequenceMeta { kind: SequenceKind::Plain, w: 1, b: 0, k: 1, subset: String::new(), y: 0, l: 1.0 }
    }
}

/// Nonnegative weights `f(1), …, f(N)`; stored zero-based.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSequence<T> {
    values: Vec<T>,
    meta: SequenceMeta,
}

impl<T: Real> WeightedSequence<T> {
    pub fn from_values(values: Vec<T>, meta: SequenceMeta) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("N", "sequence length must be positive"));
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= T::zero())) {
            return Err(Error::invalid("values", format!("entry at n={} is negative or not finite", i + 1)));
        }
        Ok(WeightedSequence { values, meta })
    }

    /// `1_[N]`.
    pub fn indicator(n: usize) -> Result<Self> {
        Self::from_values(vec![T::one(); n], SequenceMeta::plain())
    }

    pub(crate) fn zeros(n: usize, meta: SequenceMeta) -> Self {
        WeightedSequence { values: vec![T::zero(); n], meta }
    }

    pub(crate) fn set(&mut self, n: u64, v: T) {
        self.values[(n - 1) as usize] = v;
    }

    /// `N`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn meta(&self) -> &SequenceMeta {
        &self.meta
    }

    pub fn kind(&self) -> SequenceKind {
        self.meta.kind
    }

    /// Value at `n ∈ [1, N]`; zero outside.
    pub fn get(&self, n: u64) -> T {
        if n == 0 || n as usize > self.values.len() {
            T::zero()
        } else {
            self.values[(n - 1) as usize]
        }
    }

    /// Zero-based slice: `values()[i] = f(i + 1)`.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `(n, f(n))` for every `n` with `f(n) != 0`.
    pub fn support(&self) -> impl Iterator<Item = (u64, T)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != T::zero())
            .map(|(i, v)| (i as u64 + 1, *v))
    }

    /// Sum accumulated in `f64`.
    pub fn sum(&self) -> f64 {
        self.values.iter().map(|v| v.to_f64_lossy()).sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.values.len() as f64
    }

    /// First `n` with `self(n) > other(n)`, if any.
    pub fn first_excess_over(&self, other: &Self) -> Option<u64> {
        let n = self.len().max(other.len()) as u64;
        (1..=n).find(|&i| self.get(i) > other.get(i))
    }

    pub fn map(&self, kind: SequenceKind, f: impl Fn(T) -> T) -> Self {
        WeightedSequence {
            values: self.values.iter().map(|v| f(*v)).collect(),
            meta: SequenceMeta { kind, ..self.meta.clone() },
        }
    }

    pub fn write_binary<W: Write>(&self, out: W) -> Result<()> {
        let mut out = BufWriter::new(out);
        for word in [self.meta.kind.code(), self.meta.w, self.meta.b, self.meta.k, self.len() as u64] {
            out.write_u64::<LittleEndian>(word)?;
        }
        for v in &self.values {
            out.write_f64::<LittleEndian>(v.to_f64_lossy())?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads the binary form. Subset label, `Y` and `L` are not stored; `Y`
    /// and `L` are recomputed from the header.
    pub fn read_binary<R: Read>(input: R) -> Result<Self> {
        let mut input = BufReader::new(input);
        let mut head = [0u64; 5];
        for h in head.iter_mut() {
            *h = input.read_u64::<LittleEndian>()?;
        }
        let [kind, w, b, k, n] = head;
        let kind = SequenceKind::from_code(kind)?;
        let mut values = Vec::with_capacity(n as usize);
        for _ in 0..n {
            values.push(T::lit(input.read_f64::<LittleEndian>()?));
        }
        let mut extra = [0u8; 1];
        if input.read(&mut extra)? != 0 {
            return Err(Error::invalid("binary", "trailing bytes after the value array"));
        }
        let (y, l) = if kind == SequenceKind::Plain || w == 0 || k == 0 {
            (0, 1.0)
        } else {
            (super::y_bound(w, b, k, n)?, super::log_scale(w, k, n))
        };
        let meta = SequenceMeta { kind, w, b, k, subset: String::new(), y, l };
        Self::from_values(values, meta)
    }

    pub fn save_binary(&self, path: &Path) -> Result<()> {
        self.write_binary(std::fs::File::create(path)?)
    }

    pub fn load_binary(path: &Path) -> Result<Self> {
        Self::read_binary(std::fs::File::open(path)?)
    }

    /// `n,value` rows with a header line.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = BufWriter::new(out);
        writeln!(out, "n,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(out, "{},{:.11e}", i + 1, v.to_f64_lossy())?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads `n,value` rows; `n` must run through `1..=N` in order.
    pub fn read_csv<R: Read>(input: R, meta: SequenceMeta) -> Result<Self> {
        let mut values = Vec::new();
        for (line_no, line) in BufReader::new(input).lines().enumerate() {
            let line = line?;
            if line_no == 0 || line.trim().is_empty() {
                continue;
            }
            let bad = || Error::invalid("csv", format!("line {}: {line:?}", line_no + 1));
            let (n, v) = line.split_once(',').ok_or_else(bad)?;
            let n: usize = n.trim().parse().map_err(|_| bad())?;
            if n != values.len() + 1 {
                return Err(bad());
            }
            values.push(T::lit(v.trim().parse::<f64>().map_err(|_| bad())?));
        }
        Self::from_values(values, meta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let meta = SequenceMeta { kind: SequenceKind::Nu, w: 16, b: 1, k: 2, subset: "all".into(), y: 0, l: 0.0 };
        let seq = WeightedSequence::<f64>::from_values(vec![0.0, 1.5, 0.0, 2.25], meta).unwrap();
        let mut buf = Vec::new();
        seq.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 5 * 8 + 4 * 8);
        assert_eq!(&buf[..8], &0u64.to_le_bytes());
        let back = WeightedSequence::<f64>::read_binary(buf.as_slice()).unwrap();
        assert_eq!(back.values(), seq.values());
        assert_eq!(back.meta().y, 8);
        buf.push(0);
        assert!(WeightedSequence::<f64>::read_binary(buf.as_slice()).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let seq = WeightedSequence::<f64>::from_values(vec![0.0, 1.0 / 3.0, 7.0], SequenceMeta::plain()).unwrap();
        let mut buf = Vec::new();
        seq.write_csv(&mut buf).unwrap();
        let back = WeightedSequence::<f64>::read_csv(buf.as_slice(), SequenceMeta::plain()).unwrap();
        for (a, b) in seq.values().iter().zip(back.values()) {
            assert!((a - b).abs() <= 1e-11 * a.abs());
        }
    }

    #[test]
    fn rejects_negative_values() {
        assert!(WeightedSequence::<f32>::from_values(vec![1.0, -0.5], SequenceMeta::plain()).is_err());
        assert!(WeightedSequence::<f32>::from_values(vec![], SequenceMeta::plain()).is_err());
    }
}

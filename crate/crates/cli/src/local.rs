//! `wglab local ...`: local constants, printed to stdout.

use std::collections::BTreeMap;

use serde::Serialize;
use wglab_core::arith::intmath::is_prime_trial;
use wglab_core::arith::{compute_rk, compute_w, gamma, tau};
use wglab_core::local::{lemma43_count, local_decompose, DecomposeOutcome, PowerResidueTable};
use wglab_core::majorant::{mean_g, y_bound, PrimeSubset, SubsetSpec, WTrick};
use wglab_core::representation::DEFAULT_EPSILON;
use wglab_core::FactoredModulus;

use crate::config::{in_range, usage, Settings};
use crate::jobs::{subset_spec, Job, Status};
use crate::output::{report_json, OutDir};

const MAX_K: u64 = 1 << 20;

fn k_of(s: &Settings) -> anyhow::Result<u64> {
    in_range("k", s.require("k")?, 1, MAX_K)
}

fn prime_of(s: &Settings) -> anyhow::Result<u64> {
    let p: u64 = s.require("p")?;
    if !is_prime_trial(p) {
        return Err(usage(format!("`p` = {p} is not a prime")));
    }
    Ok(p)
}

#[derive(Serialize)]
pub struct Rk {
    k: u64,
}

impl Job for Rk {
    const NAME: &'static str = "local rk";
    fn from_settings(s: &Settings) -> anyhow::Result<Self> {
        Ok(Rk { k: k_of(s)? })
    }
    fn plan(&self) -> Vec<String> {
        vec![format!("R_k for k = {}", self.k)]
    }
    fn run(&self, _: &OutDir) -> anyhow::Result<Status> {
        println!("{}", compute_rk(self.k)?.value());
        Ok(Status::Passed)
    }
}

#[derive(Serialize)]
pub struct Tau {
    k: u64,
    p: u64,
    gamma: bool,
}

impl Tau {
    pub fn from_settings_as(s: &Settings, gamma: bool) -> anyhow::Result<Self> {
        Ok(Tau {
            k: k_of(s)?,
            p: prime_of(s)?,
            gamma,
        })
    }
}

impl Job for Tau {
    const NAME: &'static str = "local tau";
    fn from_settings(s: &Settings) -> anyhow::Result<Self> {
        Tau::from_settings_as(s, false)
    }
    fn plan(&self) -> Vec<String> {
        let what = if self.gamma { "gamma" } else { "tau" };
        vec![format!("{what}(k = {}, p = {})", self.k, self.p)]
    }
    fn run(&self, _: &OutDir) -> anyhow::Result<Status> {
        let v = if self.gamma { gamma(self.k, self.p) } else { tau(self.k, self.p) };
        println!("{v}");
        Ok(Status::Passed)
    }
}

#[derive(Serialize)]
pub struct WModulus {
    w: u64,
    k: u64,
}

impl Job for WModulus {
    const NAME: &'static str = "local w";
    fn from_settings(s: &Settings) -> anyhow::Result<Self> {
        Ok(WModulus {
            w: in_range("w", s.or("w", 3)?, 2, 1000)?,
            k: k_of(s)?,
        })
    }
    fn plan(&self) -> Vec<String> {
        vec![format!("W for w = {}, k = {}", self.w, self.k)]
    }
    fn run(&self, _: &OutDir) -> anyhow::Result<Status> {
        println!("{}", compute_w(self.w, self.k)?.value());
        Ok(Status::Passed)
    }
}

/// The modulus is `q` when given, else `W(w, k)`.
fn modulus_of(s: &Settings, k: u64) -> anyhow::Result<FactoredModulus> {
    match s.get::<u64>("q")? {
        Some(q) => Ok(FactoredModulus::factorize(in_range("q", q, 2, u32::MAX as u64)?)?),
        None => Ok(compute_w(in_range("w", s.or("w", 3)?, 2, 1000)?, k)?),
    }
}

#[derive(Serialize)]
pub struct Residues {
    modulus: u64,
    k: u64,
    #[serde(skip)]
    m: FactoredModulus,
    with_sigma: bool,
    b: Option<u64>,
}

impl Residues {
    pub fn from_settings_as(s: &Settings, with_sigma: bool) -> anyhow::Result<Self> {
        let k = k_of(s)?;
        let m = modulus_of(s, k)?;
        let b = if with_sigma { s.get("b")? } else { None };
        Ok(Residues {
            modulus: m.value(),
            k,
            m,
            with_sigma,
            b,
        })
    }
}

#[derive(Serialize)]
struct ResidueList {
    modulus: u64,
    k: u64,
    size: usize,
    residues: Vec<u64>,
}

#[derive(Serialize)]
struct SigmaTable {
    modulus: u64,
    k: u64,
    phi: u64,
    sigma: BTreeMap<u64, u64>,
}

impl Job for Residues {
    const NAME: &'static str = "local residues";
    fn from_settings(s: &Settings) -> anyhow::Result<Self> {
        Residues::from_settings_as(s, false)
    }
    fn plan(&self) -> Vec<String> {
        vec![format!("enumerate t^{} mod {}", self.k, self.modulus)]
    }
    fn run(&self, _: &OutDir) -> anyhow::Result<Status> {
        let table = PowerResidueTable::new(&self.m, self.k)?;
        let text = if self.with_sigma {
            let bs: Vec<u64> = match self.b {
                Some(b) if !table.is_unit_residue(b % self.modulus) => {
                    return Err(usage(format!("`b` = {b} is not in Z({})", self.modulus)))
                }
                Some(b) => vec![b % self.modulus],
                None => table.unit_residues().to_vec(),
            };
            let sigma = bs.iter().map(|&b| Ok((b, table.sigma(b)?))).collect::<anyhow::Result<_>>()?;
            serde_json::to_string(&SigmaTable {
                modulus: self.modulus,
                k: self.k,
                phi: self.m.phi(),
                sigma,
            })?
        } else {
            serde_json::to_string(&ResidueList {
                modulus: self.modulus,
                k: self.k,
                size: table.unit_residues().len(),
                residues: table.unit_residues().to_vec(),
            })?
        };
        println!("{text}");
        Ok(Status::Passed)
    }
}

#[derive(Serialize)]
pub struct Lemma43 {
    p: u64,
    k: u64,
    a: Vec<u64>,
}

#[derive(Serialize)]
struct Lemma43Row {
    a: u64,
    count: u64,
    expected: u64,
}

impl Job for Lemma43 {
    const NAME: &'static str = "local lemma43";
    fn from_settings(s: &Settings) -> anyhow::Result<Self> {
        let p = prime_of(s)?;
        if p == 2 {
            return Err(usage("`p` must be an odd prime"));
        }
        let k = in_range("k", s.require("k")?, 1, 64)?;
        let z = PowerResidueTable::new(&FactoredModulus::from_factors(&[(p, 1)])?, k)?;
        let a = match s.list::<u64>("a")? {
            Some(a) => a,
            None => z.unit_residues().to_vec(),
        };
        if let Some(bad) = a.iter().find(|&&x| x >= p || !z.is_unit_residue(x)) {
            return Err(usage(format!("`a` entry {bad} is not in Z({p})")));
        }
        Ok(Lemma43 { p, k, a })
    }
    fn plan(&self) -> Vec<String> {
        vec![format!("count residues mod {}^{} over {} classes", self.p, 2 * self.k, self.a.len())]
    }
    fn run(&self, _: &OutDir) -> anyhow::Result<Status> {
        let e = 2 * self.k - 1 - tau(self.k, self.p) as u64;
        let expected = self.p.checked_pow(e as u32).ok_or_else(|| usage("p^(2k-1-tau) overflows"))?;
        let mut rows = Vec::new();
        for &a in &self.a {
            match lemma43_count(self.p, self.k, a) {
                Ok(count) => rows.push(Lemma43Row { a, count, expected }),
                Err(wglab_core::Error::InvariantViolation(msg)) => {
                    println!("{}", serde_json::to_string(&rows)?);
                    return Ok(Status::Failed(msg));
                }
                Err(e) => return Err(e.into()),
            }
        }
        println!("{}", serde_json::to_string(&rows)?);
        Ok(Status::Passed)
    }
}

#[derive(Serialize)]
#[serde(rename_all = "kebab-case")]
enum WeightSource {
    Constant(f64),
    /// Thinned mean weights at this `N`.
    Thinned { n: u64, subset: SubsetSpec, epsilon: f64 },
}

#[derive(Serialize)]
pub struct Decompose {
    w: u64,
    k: u64,
    s: usize,
    target: u64,
    weights: WeightSource,
}

#[derive(Serialize)]
struct DecomposeResult {
    weights: BTreeMap<u64, f64>,
    outcome: DecomposeOutcome<f64>,
}

impl Job for Decompose {
    const NAME: &'static str = "local decompose";
    fn from_settings(s: &Settings) -> anyhow::Result<Self> {
        let w = in_range("w", s.or("w", 3)?, 2, 1000)?;
        let k = k_of(s)?;
        let parts = in_range("s", s.require("s")?, 1, 10_000)?;
        let target = s.require("n")?;
        let weights = match (s.get::<f64>("f")?, s.get::<u64>("thinned-n")?) {
            (Some(c), None) => WeightSource::Constant(in_range("f", c, 0.0, 1.0 - f64::EPSILON)?),
            (None, Some(n)) => WeightSource::Thinned {
                n: in_range("thinned-n", n, 1, 1 << 26)?,
                subset: subset_spec(s)?,
                epsilon: in_range("epsilon", s.or("epsilon", DEFAULT_EPSILON)?, 1e-9, 1.0)?,
            },
            _ => return Err(usage("give exactly one of `f` and `thinned-n`")),
        };
        Ok(Decompose {
            w,
            k,
            s: parts,
            target,
            weights,
        })
    }
    fn plan(&self) -> Vec<String> {
        vec![format!("optimal {}-part decomposition of {} mod W(w = {}, k = {})", self.s, self.target, self.w, self.k)]
    }
    fn run(&self, _: &OutDir) -> anyhow::Result<Status> {
        let trick = WTrick::from_w_param(self.w, self.k)?;
        let weights: BTreeMap<u64, f64> = match &self.weights {
            WeightSource::Constant(c) => trick.residues().iter().map(|&b| (b, *c)).collect(),
            WeightSource::Thinned { n, subset, epsilon } => {
                let y = trick
                    .residues()
                    .iter()
                    .map(|&b| y_bound(trick.w(), b, self.k, *n))
                    .collect::<wglab_core::Result<Vec<_>>>()?;
                let limit = y.into_iter().max().unwrap_or(0).max(100);
                let subset = PrimeSubset::generate(subset, limit)?;
                mean_g(&trick, *n, &subset, *epsilon)?.thinned_weights()
            }
        };
        let outcome = local_decompose(trick.modulus(), self.k, self.s, self.target, |b| weights[&b])?;
        print!("{}", report_json(Self::NAME, self, &DecomposeResult { weights, outcome })?);
        Ok(Status::Passed)
    }
}

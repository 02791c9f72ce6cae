//! Experiment subcommands. Each job is resolved and validated from
//! [`Settings`] before anything is computed.

use std::collections::BTreeMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wglab_core::arith::intmath::integer_root;
use wglab_core::arith::{compute_rk, FactoredModulus};
use wglab_core::local::{
    local_decompose, waring_pair_check_with_budget, DecomposeOutcome, Strategy, Verdict, DEFAULT_EXHAUSTIVE_BUDGET,
};
use wglab_core::majorant::{log_scale, mean_g, y_bound, MeanReport, PrimeSubset, SubsetSpec, WTrick, WeightedSequence};
use wglab_core::representation::{
    count_representations, coverage_probe, theorem_thresholds, transference_gauge, CountMethod, Thresholds,
    DEFAULT_EPSILON,
};
use wglab_core::spectral::{
    arc_decompose, dft_spectrum, pseudorandom_gauge, restriction_norm, Arc, ArcClass, ArcParams, GaugeReport,
    ReportRow, RestrictionReport, DEFAULT_SIGMA, DEFAULT_SIGMA0,
};

use crate::config::{in_range, usage, Settings};
use crate::output::OutDir;

pub enum Status {
    Passed,
    /// A verification inside the run did not hold.
    Failed(String),
}

pub trait Job: Serialize + Sized {
    const NAME: &'static str;
    fn from_settings(s: &Settings) -> anyhow::Result<Self>;
    /// One line per unit of planned work, for `--dry-run`.
    fn plan(&self) -> Vec<String>;
    fn run(&self, out: &OutDir) -> anyhow::Result<Status>;
}

const MAX_N: u64 = 1 << 24;

fn sci(x: f64) -> String {
    format!("{x:.11e}")
}

/// `subset`, defaulting to all primes. A Bernoulli subset without its own
/// seed takes the run seed.
pub fn subset_spec(s: &Settings) -> anyhow::Result<SubsetSpec> {
    let mut text: String = s.or("subset", "all".to_string())?;
    if text.starts_with("bernoulli:") && text.matches(':').count() == 1 {
        text = format!("{text}:{}", s.or::<u64>("seed", 0)?);
    }
    SubsetSpec::parse(&text).map_err(|e| usage(e.to_string()))
}

fn k_of(s: &Settings) -> anyhow::Result<u64> {
    in_range("k", s.require("k")?, 1, 64)
}

fn w_of(s: &Settings) -> anyhow::Result<u64> {
    in_range("w", s.or("w", 3)?, 2, 13)
}

fn n_list(s: &Settings) -> anyhow::Result<Vec<u64>> {
    let ns: Vec<u64> = s.list("n")?.ok_or_else(|| usage("missing required setting `n`"))?;
    for &n in &ns {
        in_range("n", n, 16, MAX_N)?;
    }
    Ok(ns)
}

/// `b` as a list of residues in `Z(W)`, or every residue when absent or `all`.
fn b_list(s: &Settings, trick: &WTrick) -> anyhow::Result<Vec<u64>> {
    let text: String = s.or("b", "all".to_string())?;
    if text.trim() == "all" {
        return Ok(trick.residues().to_vec());
    }
    let mut bs = Vec::new();
    for item in text.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let b: u64 = item.parse().map_err(|e| usage(format!("invalid entry {item:?} in `b`: {e}")))?;
        if !trick.table().is_unit_residue(b) {
            return Err(usage(format!("`b` = {b} is not in Z({})", trick.w())));
        }
        bs.push(b);
    }
    if bs.is_empty() {
        return Err(usage("`b` is an empty list"));
    }
    Ok(bs)
}

fn trick_of(w: u64, k: u64) -> anyhow::Result<WTrick> {
    WTrick::from_w_param(w, k).map_err(|e| usage(format!("W-trick modulus for w = {w}, k = {k}: {e}")))
}

/// A prime subset reaching every `Y` needed for `bs` and `ns`.
fn subset_for(spec: &SubsetSpec, trick: &WTrick, bs: &[u64], ns: &[u64]) -> anyhow::Result<PrimeSubset> {
    let mut limit = 100;
    for &n in ns {
        for &b in bs {
            limit = limit.max(y_bound(trick.w(), b, trick.k(), n)?);
        }
    }
    Ok(PrimeSubset::generate(spec, limit)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeqChoice {
    Nu,
    F,
    Mu,
}

impl std::str::FromStr for SeqChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "nu" => Ok(SeqChoice::Nu),
            "f" => Ok(SeqChoice::F),
            "mu" => Ok(SeqChoice::Mu),
            _ => Err("expected nu, f or mu".into()),
        }
    }
}

fn build_seq(choice: SeqChoice, trick: &WTrick, b: u64, n: u64, subset: &PrimeSubset) -> anyhow::Result<WeightedSequence<f64>> {
    Ok(match choice {
        SeqChoice::Nu => trick.nu(b, n)?,
        SeqChoice::F => trick.f(b, n, subset)?,
        SeqChoice::Mu => trick.mu(b, n)?.into_mu(),
    })
}

#[derive(Serialize)]
pub struct WaringPair {
    q: u64,
    k: u64,
    s: u64,
    strategy: String,
    trials: Option<u64>,
    seed: u64,
    budget: u128,
}

impl WaringPair {
    fn strategy(&self) -> Strategy {
        match self.strategy.as_str() {
            "exhaustive" => Strategy::Exhaustive,
            "structured" => Strategy::Structured,
            _ => Strategy::Sampled {
                trials: self.trials.unwrap_or(100_000),
                seed: self.seed,
            },
        }
    }
}

impl Job for WaringPair {
    const NAME: &'static str = "waring-pair";
    fn from_settings(s: &Settings) -> anyhow::Result<Self> {
        let strategy: String = s.or("strategy", "sampled".to_string())?;
        if !["exhaustive", "sampled", "structured"].contains(&strategy.as_str()) {
            return Err(usage(format!("`strategy` = {strategy:?} is not one of exhaustive, sampled, structured")));
        }
        let trials = s.get::<u64>("trials")?;
        if let Some(t) = trials {
            if strategy != "sampled" {
                return Err(usage("`trials` only applies to the sampled strategy"));
            }
            in_range("trials", t, 1, 1 << 32)?;
        }
        Ok(WaringPair {
            q: in_range("q", s.require("q")?, 2, 10_000_000)?,
            k: k_of(s)?,
            s: in_range("s", s.require("s")?, 1, 1 << 20)?,
            strategy,
            trials,
            seed: s.or("seed", 0)?,
            budget: s.or("budget", DEFAULT_EXHAUSTIVE_BUDGET)?,
        })
    }
    fn plan(&self) -> Vec<String> {
        vec![format!("{} check of (q = {}, s = {}) for k = {}", self.strategy, self.q, self.s, self.k)]
    }
    fn run(&self, out: &OutDir) -> anyhow::Result<Status> {
        let q = FactoredModulus::factorize(self.q)?;
        let report = waring_pair_check_with_budget(&q, self.k, self.s, self.strategy(), self.budget)?;
        out.json("waring_pair.json", Self::NAME, self, &report)?;
        let verdict = match report.verdict {
            Verdict::Pair => "pair",
            Verdict::NotPair => "not-pair",
            Verdict::NoViolationFound => "no-violation-found",
        };
        println!("verdict: {verdict} ({} subsets examined)", report.trials);
        if !report.reverify()? {
            return Ok(Status::Failed("verdict does not re-verify".into()));
        }
        Ok(Status::Passed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Emit {
    None,
    Csv,
    Binary,
    Both,
}

impl std::str::FromStr for Emit {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(Emit::None),
            "csv" => Ok(Emit::Csv),
            "binary" => Ok(Emit::Binary),
            "both" => Ok(Emit::Both),
            _ => Err("expected none, csv, binary or both".into()),
        }
    }
}

#[derive(Serialize)]
pub struct Majorant {
    w: u64,
    k: u64,
    n: Vec<u64>,
    b: Vec<u64>,
    subset: SubsetSpec,
    epsilon: f64,
    emit: Emit,
}

#[derive(Serialize)]
struct MajorantRow {
    b: u64,
    #[serde(rename = "N")]
    n: u64,
    y: u64,
    l: f64,
    nu_mean: f64,
    f_mean: f64,
    mu_mean: f64,
    f_le_nu: bool,
    psi_le_mu: bool,
}

#[derive(Serialize)]
struct MajorantResult {
    rows: Vec<MajorantRow>,
    means: Vec<MeanReport>,
}

impl Job for Majorant {
    const NAME: &'static str = "majorant";
    fn from_settings(s: &Settings) -> anyhow::Result<Self> {
        let (w, k) = (w_of(s)?, k_of(s)?);
        let trick = trick_of(w, k)?;
        Ok(Majorant {
            w,
            k,
            n: n_list(s)?,
            b: b_list(s, &trick)?,
            subset: subset_spec(s)?,
            epsilon: in_range("epsilon", s.or("epsilon", DEFAULT_EPSILON)?, 1e-9, 1.0)?,
            emit: s.or("emit", Emit::None)?,
        })
    }
    fn plan(&self) -> Vec<String> {
        self.n
            .iter()
            .map(|n| format!("nu, f, mu for {} residues at N = {n}, mean over Z(W)", self.b.len()))
            .collect()
    }
    fn run(&self, out: &OutDir) -> anyhow::Result<Status> {
        let trick = trick_of(self.w, self.k)?;
        let all_b = trick.residues().to_vec();
        let subset = subset_for(&self.subset, &trick, &all_b, &self.n)?;
        let mut rows = Vec::new();
        let mut means = Vec::new();
        for &n in &self.n {
            means.push(mean_g(&trick, n, &subset, self.epsilon)?);
            for &b in &self.b {
                let nu = trick.nu::<f64>(b, n)?;
                let f = trick.f::<f64>(b, n, &subset)?;
                let mu = trick.mu::<f64>(b, n)?;
                let psi_le_mu = match mu.psi_of(&f) {
                    Ok(_) => true,
                    Err(wglab_core::Error::InvariantViolation(_)) => false,
                    Err(e) => return Err(e.into()),
                };
                rows.push(MajorantRow {
                    b,
                    n,
                    y: nu.meta().y,
                    l: nu.meta().l,
                    nu_mean: nu.mean(),
                    f_mean: f.mean(),
                    mu_mean: mu.mu().mean(),
                    f_le_nu: f.first_excess_over(&nu).is_none(),
                    psi_le_mu,
                });
                for (tag, seq) in [("nu", &nu), ("f", &f)] {
                    let stem = format!("{tag}_b{b}_N{n}");
                    if matches!(self.emit, Emit::Csv | Emit::Both) {
                        out.with_file(&format!("{stem}.csv"), |w| Ok(seq.write_csv(w)?))?;
                    }
                    if matches!(self.emit, Emit::Binary | Emit::Both) {
                        out.with_file(&format!("{stem}.bin"), |w| Ok(seq.write_binary(w)?))?;
                    }
                }
            }
        }
        out.with_file("majorant.csv", |w| {
            writeln!(w, "b,N,Y,L,nu_mean,f_mean,mu_mean,f_le_nu,psi_le_mu")?;
            for r in &rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{}",
                    r.b,
                    r.n,
                    r.y,
                    sci(r.l),
                    sci(r.nu_mean),
                    sci(r.f_mean),
                    sci(r.mu_mean),
                    r.f_le_nu as u8,
                    r.psi_le_mu as u8
                )?;
            }
            Ok(())
        })?;
        for m in &means {
            println!("N = {}: mean of g over Z(W) = {:.6}", m.n, m.aggregate);
        }
        let bad = rows
            .iter()
            .find(|r| !(r.f_le_nu && r.psi_le_mu))
            .map(|r| format!("pointwise bound fails for b = {} at N = {}", r.b, r.n));
        out.json("majorant.json", Self::NAME, self, &MajorantResult { rows, means })?;
        Ok(bad.map_or(Status::Passed, Status::Failed))
    }
}

/// Arc exponents, falling back to `sigma0` when `sigma` leaves no room.
fn arc_params(w: u64, k: u64, n: u64, sigma: f64, sigma0: f64) -> anyhow::Result<ArcParams> {
    ArcParams::new(w, k, n, sigma, sigma0)
        .or_else(|_| ArcParams::new(w, k, n, sigma0, sigma0))
        .map_err(|e| usage(e.to_string()))
}

fn sigmas(s: &Settings) -> anyhow::Result<(f64, f64)> {
    let sigma = in_range("sigma", s.or("sigma", DEFAULT_SIGMA)?, 1e-3, 64.0)?;
    let sigma0 = in_range("sigma0", s.or("sigma0", DEFAULT_SIGMA0)?, 1e-3, 64.0)?;
    Ok((sigma, sigma0))
}

#[derive(Serialize)]
pub struct SpectrumJob {
    w: u64,
    k: u64,
    n: Vec<u64>,
    b: Vec<u64>,
    sequence: SeqChoice,
    subset: SubsetSpec,
    grid_factor: u64,
    sigma: f64,
    sigma0: f64,
    emit: Emit,
}

#[derive(Serialize)]
struct GaugeEntry {
    b: u64,
    gauge: GaugeReport,
}

#[derive(Serialize)]
struct SpectrumResult {
    gauges: Vec<GaugeEntry>,
    rows: Vec<ReportRow>,
}

impl Job for SpectrumJob {
    const NAME: &'static str = "spectrum";
    fn from_settings(s: &Settings) -> anyhow::Result<Self> {
        let (w, k) = (w_of(s)?, k_of(s)?);
        let trick = trick_of(w, k)?;
        let (sigma, sigma0) = sigmas(s)?;
        let emit: Emit = s.or("emit", Emit::None)?;
        if emit == Emit::Binary || emit == Emit::Both {
            return Err(usage("`emit` for spectra is none or csv"));
        }
        Ok(SpectrumJob {
            w,
            k,
            n: n_list(s)?,
            b: b_list(s, &trick)?,
            sequence: s.or("sequence", SeqChoice::Nu)?,
            subset: subset_spec(s)?,
            grid_factor: in_range("grid-factor", s.or("grid-factor", 8)?, 2, 64)?,
            sigma,
            sigma0,
            emit,
        })
    }
    fn plan(&self) -> Vec<String> {
        self.n
            .iter()
            .map(|n| format!("{} transforms of length {} at N = {n}", self.b.len(), n * self.grid_factor))
            .collect()
    }
    fn run(&self, out: &OutDir) -> anyhow::Result<Status> {
        let trick = trick_of(self.w, self.k)?;
        let subset = subset_for(&self.subset, &trick, &self.b, &self.n)?;
        let mut gauges = Vec::new();
        let mut rows = Vec::new();
        for &n in &self.n {
            let m = (n * self.grid_factor) as usize;
            for &b in &self.b {
                let seq = build_seq(self.sequence, &trick, b, n, &subset)?;
                let gauge = pseudorandom_gauge(&seq, m, self.sigma, self.sigma0)?;
                rows.push(ReportRow {
                    quantity: "D".into(),
                    n,
                    m: m as u64,
                    w: trick.w(),
                    k: self.k,
                    b,
                    sigma: gauge.arc_exponent.unwrap_or(f64::NAN),
                    value: gauge.d,
                });
                if self.emit == Emit::Csv {
                    let spec = dft_spectrum(&seq, m)?;
                    out.with_file(&format!("spectrum_b{b}_N{n}.csv"), |w| Ok(spec.write_csv(w)?))?;
                }
                println!("b = {b}, N = {n}: D = {:.6} at alpha = {:.6}", gauge.d, gauge.argmax_alpha);
                gauges.push(GaugeEntry { b, gauge });
            }
        }
        out.with_file("spectrum.csv", |w| {
            writeln!(w, "b,N,M,D,alpha,arc_q,arc_a,arc_class")?;
            for e in &gauges {
                let g = &e.gauge;
                let (q, a, class) = match g.arc {
                    Some(arc) => (arc.q.to_string(), arc.a.to_string(), class_name(arc.class)),
                    None => (String::new(), String::new(), ""),
                };
                writeln!(w, "{},{},{},{},{},{q},{a},{class}", e.b, g.n, g.m, sci(g.d), sci(g.argmax_alpha))?;
            }
            Ok(())
        })?;
        out.json("spectrum.json", Self::NAME, self, &SpectrumResult { gauges, rows })?;
        Ok(Status::Passed)
    }
}

fn class_name(c: ArcClass) -> &'static str {
    match c {
        ArcClass::Major => "major",
        ArcClass::Minor => "minor",
    }
}

#[derive(Serialize)]
pub struct Arcs {
    w: u64,
    k: u64,
    n: u64,
    sigma: f64,
    sigma0: f64,
    alpha: Option<Vec<f64>>,
    samples: u64,
    seed: u64,
}

#[derive(Serialize)]
struct ArcsResult {
    params: ArcParams,
    arcs: Vec<(f64, Arc)>,
}

impl Job for Arcs {
    const NAME: &'static str = "arcs";
    fn from_settings(s: &Settings) -> anyhow::Result<Self> {
        let (w, k) = (w_of(s)?, k_of(s)?);
        let n = in_range("n", s.require("n")?, 16, 1 << 40)?;
        let (sigma, sigma0) = sigmas(s)?;
        let alpha: Option<Vec<f64>> = s.list("alpha")?;
        for &a in alpha.iter().flatten() {
            if !a.is_finite() {
                return Err(usage(format!("`alpha` entry {a} is not finite")));
            }
        }
        let w_value = trick_of(w, k)?.w();
        arc_params(w_value, k, n, sigma, sigma0)?;
        Ok(Arcs {
            w,
            k,
            n,
            sigma,
            sigma0,
            samples: in_range("samples", s.or("samples", 1000)?, 1, 10_000_000)?,
            alpha,
            seed: s.or("seed", 0)?,
        })
    }
    fn plan(&self) -> Vec<String> {
        let count = self.alpha.as_ref().map_or(self.samples, |a| a.len() as u64);
        vec![format!("classify {count} frequencies at N = {}", self.n)]
    }
    fn run(&self, out: &OutDir) -> anyhow::Result<Status> {
        let w_value = trick_of(self.w, self.k)?.w();
        let params = arc_params(w_value, self.k, self.n, self.sigma, self.sigma0)?;
        let alphas: Vec<f64> = match &self.alpha {
            Some(a) => a.clone(),
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                (0..self.samples).map(|_| rng.gen::<f64>()).collect()
            }
        };
        let arcs: Vec<(f64, Arc)> = alphas.iter().map(|&a| (a, arc_decompose(&params, a))).collect();
        out.with_file("arcs.csv", |w| {
            writeln!(w, "alpha,q,a,center,halfwidth,distance,class")?;
            for (alpha, arc) in &arcs {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    sci(*alpha),
                    arc.q,
                    arc.a,
                    sci(arc.center),
                    sci(arc.halfwidth),
                    sci(arc.distance),
                    class_name(arc.class)
                )?;
            }
            Ok(())
        })?;
        let major = arcs.iter().filter(|(_, a)| a.class == ArcClass::Major).count();
        println!("P = {:.4}, Q = {:.4}: {major} major, {} minor", params.p, params.q, arcs.len() - major);
        let bad = arcs
            .iter()
            .find(|(_, a)| a.class == ArcClass::Major && (a.distance > a.halfwidth || a.q as f64 > params.p));
        out.json("arcs.json", Self::NAME, self, &ArcsResult { params, arcs: arcs.clone() })?;
        Ok(match bad {
            Some((alpha, a)) => Status::Failed(format!("alpha = {alpha}: major witness {}/{} out of bounds", a.a, a.q)),
            None => Status::Passed,
        })
    }
}

#[derive(Serialize)]
pub struct Restrict {
    w: u64,
    k: u64,
    n: Vec<u64>,
    b: Vec<u64>,
    sequence: SeqChoice,
    subset: SubsetSpec,
    exponent: f64,
    grid_factor: u64,
}

#[derive(Serialize)]
struct RestrictRow {
    b: u64,
    #[serde(rename = "N")]
    n: u64,
    report: RestrictionReport,
}

#[derive(Serialize)]
struct RestrictResult {
    rows: Vec<RestrictRow>,
    /// Largest over smallest constant, per `b`.
    spread: BTreeMap<u64, f64>,
}

impl Job for Restrict {
    const NAME: &'static str = "restrict";
    fn from_settings(s: &Settings) -> anyhow::Result<Self> {
        let (w, k) = (w_of(s)?, k_of(s)?);
        let trick = trick_of(w, k)?;
        let exponent: f64 = s.or("exponent", 6.5)?;
        if !(exponent > 2.0 && exponent < 64.0) {
            return Err(usage(format!("`exponent` = {exponent} is outside (2, 64)")));
        }
        Ok(Restrict {
            w,
            k,
            n: n_list(s)?,
            b: b_list(s, &trick)?,
            sequence: s.or("sequence", SeqChoice::F)?,
            subset: subset_spec(s)?,
            exponent,
            grid_factor: in_range("grid-factor", s.or("grid-factor", 8)?, 4, 64)?,
        })
    }
    fn plan(&self) -> Vec<String> {
        self.n
            .iter()
            .map(|n| format!("{} norms of exponent {} at N = {n}", self.b.len(), self.exponent))
            .collect()
    }
    fn run(&self, out: &OutDir) -> anyhow::Result<Status> {
        let trick = trick_of(self.w, self.k)?;
        let subset = subset_for(&self.subset, &trick, &self.b, &self.n)?;
        let mut rows = Vec::new();
        for &n in &self.n {
            for &b in &self.b {
                let seq = build_seq(self.sequence, &trick, b, n, &subset)?;
                let report = restriction_norm(&seq, self.exponent, (n * self.grid_factor) as usize)?;
                println!("b = {b}, N = {n}: K = {:.6}", report.constant);
                rows.push(RestrictRow { b, n, report });
            }
        }
        let mut spread = BTreeMap::new();
        for &b in &self.b {
            let ks: Vec<f64> = rows.iter().filter(|r| r.b == b).map(|r| r.report.constant).collect();
            let hi = ks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = ks.iter().copied().fold(f64::INFINITY, f64::min);
            spread.insert(b, hi / lo);
        }
        out.with_file("restrict.csv", |w| {
            writeln!(w, "b,N,M,norm,constant")?;
            for r in &rows {
                writeln!(w, "{},{},{},{},{}", r.b, r.n, r.report.m, sci(r.report.norm), sci(r.report.constant))?;
            }
            Ok(())
        })?;
        out.json("restrict.json", Self::NAME, self, &RestrictResult { rows, spread })?;
        Ok(Status::Passed)
    }
}

fn window(s: &Settings) -> anyhow::Result<(u64, u64)> {
    let lo: u64 = s.require("lo")?;
    let hi: u64 = in_range("hi", s.require("hi")?, 1, 1 << 32)?;
    if lo > hi {
        return Err(usage(format!("`lo` = {lo} exceeds `hi` = {hi}")));
    }
    Ok((lo, hi))
}

/// Primes up to `hi^{1/k}`, at least up to 100.
fn subset_upto(spec: &SubsetSpec, k: u64, hi: u64) -> anyhow::Result<PrimeSubset> {
    Ok(PrimeSubset::generate(spec, (integer_root(hi, k as u32) + 1).max(100))?)
}

#[derive(Serialize)]
pub struct Count {
    k: u64,
    s: u64,
    lo: u64,
    hi: u64,
    method: CountMethod,
    subset: SubsetSpec,
}

#[derive(Serialize)]
struct CountSummary {
    total: u128,
    zeros: u64,
    max: u64,
}

impl Job for Count {
    const NAME: &'static str = "count";
    fn from_settings(s: &Settings) -> anyhow::Result<Self> {
        let (lo, hi) = window(s)?;
        Ok(Count {
            k: k_of(s)?,
            s: in_range("s", s.require("s")?, 1, 64)?,
            lo,
            hi,
            method: s.or("method", CountMethod::Fft)?,
            subset: subset_spec(s)?,
        })
    }
    fn plan(&self) -> Vec<String> {
        vec![format!("{:?} counts of {}-fold sums of {}-th powers on [{}, {}]", self.method, self.s, self.k, self.lo, self.hi)]
    }
    fn run(&self, out: &OutDir) -> anyhow::Result<Status> {
        let subset = subset_upto(&self.subset, self.k, self.hi)?;
        let counts = count_representations(&subset, self.k, self.s, self.lo..=self.hi, self.method)?;
        let summary = CountSummary {
            total: counts.counts.iter().map(|&c| c as u128).sum(),
            zeros: counts.counts.iter().filter(|&&c| c == 0).count() as u64,
            max: counts.counts.iter().copied().max().unwrap_or(0),
        };
        out.with_file("counts.csv", |w| {
            writeln!(w, "n,count")?;
            for (i, c) in counts.counts.iter().enumerate() {
                writeln!(w, "{},{c}", self.lo + i as u64)?;
            }
            Ok(())
        })?;
        println!("{} values, {} zero, max {}", counts.counts.len(), summary.zeros, summary.max);
        out.json("counts.json", Self::NAME, self, &summary)?;
        Ok(Status::Passed)
    }
}

#[derive(Serialize)]
pub struct Coverage {
    k: u64,
    s: u64,
    lo: u64,
    hi: u64,
    filter: bool,
    subset: SubsetSpec,
}

impl Job for Coverage {
    const NAME: &'static str = "coverage";
    fn from_settings(s: &Settings) -> anyhow::Result<Self> {
        let (lo, hi) = window(s)?;
        Ok(Coverage {
            k: k_of(s)?,
            s: in_range("s", s.require("s")?, 1, 1 << 12)?,
            lo,
            hi,
            filter: s.or("filter", true)?,
            subset: subset_spec(s)?,
        })
    }
    fn plan(&self) -> Vec<String> {
        vec![format!("{}-fold sumset of {}-th powers, exceptions in [{}, {}]", self.s, self.k, self.lo, self.hi)]
    }
    fn run(&self, out: &OutDir) -> anyhow::Result<Status> {
        let subset = subset_upto(&self.subset, self.k, self.hi)?;
        let report = coverage_probe(&subset, self.k, self.s, self.lo, self.hi, self.filter)?;
        out.with_file("coverage.csv", |w| Ok(report.write_csv(w)?))?;
        out.with_file("exceptions.txt", |w| Ok(report.write_exceptions(w)?))?;
        println!("{} exceptions among {} admissible n", report.exceptions.len(), report.admissible);
        out.json("coverage.json", Self::NAME, self, &report)?;
        Ok(Status::Passed)
    }
}

#[derive(Serialize)]
pub struct Transfer {
    w: u64,
    k: u64,
    s: usize,
    n: u64,
    target: u64,
    epsilon: f64,
    subset: SubsetSpec,
}

#[derive(Serialize)]
struct TransferResult {
    mean: MeanReport,
    parts: Option<Vec<u64>>,
    decomposition_optimum: Option<f64>,
    profile: Option<wglab_core::representation::ConvolutionProfile>,
}

impl Job for Transfer {
    const NAME: &'static str = "transfer";
    fn from_settings(s: &Settings) -> anyhow::Result<Self> {
        let (w, k) = (w_of(s)?, k_of(s)?);
        let parts: usize = in_range("s", s.require("s")?, 2, 256)?;
        let trick = trick_of(w, k)?;
        let target = s.or("target", parts as u64)? % trick.w();
        Ok(Transfer {
            w,
            k,
            s: parts,
            n: in_range("n", s.require("n")?, 16, 1 << 20)?,
            target,
            epsilon: in_range("epsilon", s.or("epsilon", DEFAULT_EPSILON)?, 1e-9, 0.999)?,
            subset: subset_spec(s)?,
        })
    }
    fn plan(&self) -> Vec<String> {
        vec![
            format!("mean weights at N = {} and a {}-part decomposition of {} mod W", self.n, self.s, self.target),
            format!("{}-fold convolution on [0, {}]", self.s, self.s as u64 * self.n),
        ]
    }
    fn run(&self, out: &OutDir) -> anyhow::Result<Status> {
        let trick = trick_of(self.w, self.k)?;
        let all_b = trick.residues().to_vec();
        let subset = subset_for(&self.subset, &trick, &all_b, &[self.n])?;
        let mean = mean_g(&trick, self.n, &subset, self.epsilon)?;
        let weights = mean.thinned_weights();
        let outcome = local_decompose(trick.modulus(), self.k, self.s, self.target, |b| weights[&b])?;
        let (parts, optimum) = match &outcome {
            DecomposeOutcome::Found(d) => (Some(d.parts.clone()), Some(d.total)),
            DecomposeOutcome::Failed { optimum, .. } => (None, *optimum),
        };
        let Some(parts) = parts else {
            println!("no local decomposition of {} with total above s/2", self.target);
            let result = TransferResult { mean, parts: None, decomposition_optimum: optimum, profile: None };
            out.json("transfer.json", Self::NAME, self, &result)?;
            return Ok(Status::Passed);
        };
        let fs = parts
            .iter()
            .map(|&b| trick.f::<f64>(b, self.n, &subset))
            .collect::<wglab_core::Result<Vec<_>>>()?;
        let profile = transference_gauge(&fs, self.epsilon)?;
        out.with_file("transfer.csv", |w| {
            writeln!(w, "n,gauge")?;
            for (i, g) in profile.gauge.iter().enumerate() {
                writeln!(w, "{},{}", profile.window_lo + i as u64, sci(*g))?;
            }
            Ok(())
        })?;
        println!(
            "window [{}, {}]: min gauge {:.3e} at {} (floor {:.1e}); hypotheses {}",
            profile.window_lo,
            profile.window_hi,
            profile.min_gauge,
            profile.argmin,
            profile.noise_floor,
            if profile.hypotheses_hold() { "hold" } else { "fail" }
        );
        let status = if profile.hypotheses_hold() && !profile.positive() {
            Status::Failed(format!("gauge not positive at {} although the mean hypotheses hold", profile.argmin))
        } else {
            Status::Passed
        };
        let result = TransferResult {
            mean,
            parts: Some(parts),
            decomposition_optimum: optimum,
            profile: Some(profile),
        };
        out.json("transfer.json", Self::NAME, self, &result)?;
        Ok(status)
    }
}

#[derive(Serialize)]
pub struct Report {
    w: u64,
    k: u64,
    n: Vec<u64>,
    sigma: f64,
    sigma0: f64,
}

#[derive(Serialize)]
struct ScaleRow {
    #[serde(rename = "N")]
    n: u64,
    l: f64,
    w_over_log_n: f64,
    y_max: u64,
    arcs: Option<ArcParams>,
}

#[derive(Serialize)]
struct ReportResult {
    rk: u64,
    modulus: u64,
    phi: u64,
    residues: usize,
    sigma_values: Vec<u64>,
    thresholds: Option<Thresholds>,
    scales: Vec<ScaleRow>,
}

impl Job for Report {
    const NAME: &'static str = "report";
    fn from_settings(s: &Settings) -> anyhow::Result<Self> {
        let (w, k) = (w_of(s)?, k_of(s)?);
        trick_of(w, k)?;
        let (sigma, sigma0) = sigmas(s)?;
        Ok(Report {
            w,
            k,
            n: n_list(s)?,
            sigma,
            sigma0,
        })
    }
    fn plan(&self) -> Vec<String> {
        vec![format!("constants for w = {}, k = {} at {} scales", self.w, self.k, self.n.len())]
    }
    fn run(&self, out: &OutDir) -> anyhow::Result<Status> {
        let trick = trick_of(self.w, self.k)?;
        let wv = trick.w();
        let mut sigma_values: Vec<u64> = trick.residues().iter().map(|&b| trick.sigma(b)).collect::<Result<_, _>>()?;
        sigma_values.sort_unstable();
        sigma_values.dedup();
        let mut scales = Vec::new();
        for &n in &self.n {
            let y_max = trick
                .residues()
                .iter()
                .map(|&b| y_bound(wv, b, self.k, n))
                .collect::<wglab_core::Result<Vec<_>>>()?
                .into_iter()
                .max()
                .unwrap_or(0);
            scales.push(ScaleRow {
                n,
                l: log_scale(wv, self.k, n),
                w_over_log_n: wv as f64 / (n as f64).ln(),
                y_max,
                arcs: ArcParams::new(wv, self.k, n, self.sigma, self.sigma0)
                    .or_else(|_| ArcParams::new(wv, self.k, n, self.sigma0, self.sigma0))
                    .ok(),
            });
        }
        let result = ReportResult {
            rk: compute_rk(self.k)?.value(),
            modulus: wv,
            phi: trick.modulus().phi(),
            residues: trick.residues().len(),
            sigma_values,
            thresholds: theorem_thresholds(self.k).ok(),
            scales,
        };
        println!("W = {wv}, |Z(W)| = {}, R_k = {}", result.residues, result.rk);
        for r in &result.scales {
            println!("N = {}: W/log N = {:.3}", r.n, r.w_over_log_n);
        }
        out.json("report.json", Self::NAME, self, &result)?;
        Ok(Status::Passed)
    }
}

/// Shown for `--dry-run`.
#[derive(Serialize)]
pub struct Plan<'a> {
    pub out: &'a str,
    pub threads: usize,
    pub work: Vec<String>,
}


//! `wglab`: batch runner for the wglab-core experiments.
//!
//! Exit codes: 0 success, 1 a failed check or runtime error, 2 usage or
//! configuration error.

mod config;
mod jobs;
mod local;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{in_range, Settings, Usage};
use jobs::{Job, Plan, Status};
use output::{report_json, OutDir};

#[derive(Parser)]
#[command(name = "wglab", version, about = "Desk-scale experiments on Waring-Goldbach with dense prime subsets")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Flat key=value file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Validate and print the planned work without computing.
    #[arg(long, global = true)]
    dry_run: bool,
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Report directory [default: wglab-out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Local constants and decompositions, printed to stdout.
    #[command(subcommand)]
    Local(LocalCommand),
    /// Whether every majority subset of Z(q) covers the admissible class.
    WaringPair(WaringArgs),
    /// Weighted sequences, their means and pointwise bounds.
    Majorant(MajorantArgs),
    /// Fourier gauge of the W-tricked sequences.
    Spectrum(SpectrumArgs),
    /// Major/minor arc classification of frequencies.
    Arcs(ArcsArgs),
    /// Restriction norms of the Fourier transform.
    Restrict(RestrictArgs),
    /// Exact representation counts.
    Count(CountArgs),
    /// Exceptions to representability in a window.
    Coverage(CoverageArgs),
    /// Convolution gauge of thinned weights.
    Transfer(TransferArgs),
    /// Constants and scales for a (w, k) regime.
    Report(ReportArgs),
}

#[derive(Subcommand)]
enum LocalCommand {
    Rk(KArgs),
    Tau(KpArgs),
    Gamma(KpArgs),
    W(WkArgs),
    Residues(ResidueArgs),
    Sigma(SigmaArgs),
    Lemma43(Lemma43Args),
    Decompose(DecomposeArgs),
}

#[derive(Args, Serialize)]
struct KArgs {
    #[arg(long)]
    k: Option<u64>,
}

#[derive(Args, Serialize)]
struct KpArgs {
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    p: Option<u64>,
}

#[derive(Args, Serialize)]
struct WkArgs {
    #[arg(long)]
    w: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
}

#[derive(Args, Serialize)]
struct ResidueArgs {
    #[arg(long)]
    w: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    /// Use this modulus instead of W.
    #[arg(long)]
    q: Option<u64>,
}

#[derive(Args, Serialize)]
struct SigmaArgs {
    #[arg(long)]
    w: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    b: Option<u64>,
}

#[derive(Args, Serialize)]
struct Lemma43Args {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    /// Comma-separated residues, default all of 1..p-1.
    #[arg(long)]
    a: Option<String>,
}

#[derive(Args, Serialize)]
struct DecomposeArgs {
    #[arg(long)]
    w: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    s: Option<u64>,
    /// Target; reduced mod W.
    #[arg(long)]
    n: Option<u64>,
    /// Constant weight on Z(W).
    #[arg(long)]
    f: Option<f64>,
    /// Use thinned mean weights at this N instead.
    #[arg(long)]
    thinned_n: Option<u64>,
    #[arg(long)]
    subset: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args, Serialize)]
struct WaringArgs {
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    s: Option<u64>,
    /// exhaustive, sampled or structured.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    /// Cap on exhaustive subset count.
    #[arg(long)]
    budget: Option<u128>,
}

#[derive(Args, Serialize)]
struct MajorantArgs {
    #[arg(long)]
    w: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    /// Comma-separated N values.
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated residues or `all`.
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    subset: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// none, csv, binary or both.
    #[arg(long)]
    emit: Option<String>,
}

#[derive(Args, Serialize)]
struct SpectrumArgs {
    #[arg(long)]
    w: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    b: Option<String>,
    /// nu, f or mu.
    #[arg(long)]
    sequence: Option<String>,
    #[arg(long)]
    subset: Option<String>,
    /// Grid size M as a multiple of N.
    #[arg(long)]
    grid_factor: Option<u64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    sigma0: Option<f64>,
    /// none or csv.
    #[arg(long)]
    emit: Option<String>,
}

#[derive(Args, Serialize)]
struct ArcsArgs {
    #[arg(long)]
    w: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    sigma0: Option<f64>,
    /// Comma-separated frequencies; random ones from the seed otherwise.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    samples: Option<u64>,
}

#[derive(Args, Serialize)]
struct RestrictArgs {
    #[arg(long)]
    w: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    sequence: Option<String>,
    #[arg(long)]
    subset: Option<String>,
    #[arg(long)]
    exponent: Option<f64>,
    #[arg(long)]
    grid_factor: Option<u64>,
}

#[derive(Args, Serialize)]
struct CountArgs {
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    s: Option<u64>,
    #[arg(long)]
    lo: Option<u64>,
    #[arg(long)]
    hi: Option<u64>,
    /// brute, fft or bitset.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    subset: Option<String>,
}

#[derive(Args, Serialize)]
struct CoverageArgs {
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    s: Option<u64>,
    #[arg(long)]
    lo: Option<u64>,
    #[arg(long)]
    hi: Option<u64>,
    /// Restrict to n ≡ s (mod R_k).
    #[arg(long)]
    filter: Option<bool>,
    #[arg(long)]
    subset: Option<String>,
}

#[derive(Args, Serialize)]
struct TransferArgs {
    #[arg(long)]
    w: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    s: Option<u64>,
    #[arg(long)]
    n: Option<u64>,
    /// Residue decomposed mod W, default s.
    #[arg(long)]
    target: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    subset: Option<String>,
}

#[derive(Args, Serialize)]
struct ReportArgs {
    #[arg(long)]
    w: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    sigma0: Option<f64>,
}

/// Copies every flag that was given into `settings`.
fn push_flags(settings: &mut Settings, args: &impl Serialize) -> anyhow::Result<()> {
    let serde_json::Value::Object(map) = serde_json::to_value(args)? else {
        unreachable!("argument structs serialize to objects")
    };
    for (key, value) in map {
        match value {
            serde_json::Value::Null => {}
            serde_json::Value::String(s) => settings.flag(&key, Some(s)),
            other => settings.flag(&key, Some(other)),
        }
    }
    Ok(())
}

fn execute<J: Job>(global: &Global, args: &impl Serialize, prepare: impl FnOnce(&Settings) -> anyhow::Result<J>) -> anyhow::Result<Status> {
    let mut settings = Settings::load(global.config.as_deref())?;
    push_flags(&mut settings, args)?;
    settings.flag("seed", global.seed);
    settings.flag("threads", global.threads);
    settings.flag("out", global.out.as_ref().map(|p| p.display()));
    settings.get::<u64>("seed")?;
    let threads = in_range("threads", settings.or("threads", 0usize)?, 0, 4096)?;
    let out: String = settings.or("out", "wglab-out".to_string())?;
    let job = prepare(&settings)?;
    settings.reject_unknown()?;
    if global.dry_run {
        let plan = Plan {
            out: &out,
            threads,
            work: job.plan(),
        };
        print!("{}", report_json(J::NAME, &job, &plan)?);
        return Ok(Status::Passed);
    }
    if threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    job.run(&OutDir::new(PathBuf::from(out)))
}

fn dispatch(cli: Cli) -> anyhow::Result<Status> {
    let g = &cli.global;
    match &cli.command {
        Command::Local(cmd) => match cmd {
            LocalCommand::Rk(a) => execute(g, a, local::Rk::from_settings),
            LocalCommand::Tau(a) => execute(g, a, |s| local::Tau::from_settings_as(s, false)),
            LocalCommand::Gamma(a) => execute(g, a, |s| local::Tau::from_settings_as(s, true)),
            LocalCommand::W(a) => execute(g, a, local::WModulus::from_settings),
            LocalCommand::Residues(a) => execute(g, a, |s| local::Residues::from_settings_as(s, false)),
            LocalCommand::Sigma(a) => execute(g, a, |s| local::Residues::from_settings_as(s, true)),
            LocalCommand::Lemma43(a) => execute(g, a, local::Lemma43::from_settings),
            LocalCommand::Decompose(a) => execute(g, a, local::Decompose::from_settings),
        },
        Command::WaringPair(a) => execute(g, a, jobs::WaringPair::from_settings),
        Command::Majorant(a) => execute(g, a, jobs::Majorant::from_settings),
        Command::Spectrum(a) => execute(g, a, jobs::SpectrumJob::from_settings),
        Command::Arcs(a) => execute(g, a, jobs::Arcs::from_settings),
        Command::Restrict(a) => execute(g, a, jobs::Restrict::from_settings),
        Command::Count(a) => execute(g, a, jobs::Count::from_settings),
        Command::Coverage(a) => execute(g, a, jobs::Coverage::from_settings),
        Command::Transfer(a) => execute(g, a, jobs::Transfer::from_settings),
        Command::Report(a) => execute(g, a, jobs::Report::from_settings),
    }
}

fn is_usage(e: &anyhow::Error) -> bool {
    e.downcast_ref::<Usage>().is_some()
        || matches!(
            e.downcast_ref::<wglab_core::Error>(),
            Some(
                wglab_core::Error::InvalidInput { .. }
                    | wglab_core::Error::ResourceLimit { .. }
                    | wglab_core::Error::Overflow(_)
            )
        )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(Status::Passed) => ExitCode::SUCCESS,
        Ok(Status::Failed(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_usage(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}


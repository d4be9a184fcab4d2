//! `dcsort`: sort integers, run verification campaigns, print traces and
//! benchmark the sorts.
//!
//! Exit status is 0 on success, 1 when a contract is violated and 2 for usage,
//! parse or I/O errors.

mod input;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use dcsort::verify::{run_campaign, seeded_array, CampaignConfig};
use dcsort::{Algorithm, CheckMode, Checker, Fault, TraceDocument};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "dcsort", version, about = "Contract-checked divide-and-conquer sorting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sort whitespace-separated integers, one per line on output.
    Sort {
        #[arg(long, default_value_t = Algorithm::Rec)]
        algo: Algorithm,
        #[arg(long, value_enum, default_value_t = Mode::Contracts)]
        mode: Mode,
        /// Input file, or `-` for standard input.
        #[arg(long, default_value = "-")]
        input: PathBuf,
        /// Output file, or `-` for standard output.
        #[arg(long, default_value = "-")]
        output: PathBuf,
    },
    /// Run a seeded random campaign in full checking mode and write a JSON
    /// report.
    Verify {
        /// Comma-separated algorithms.
        #[arg(long, value_delimiter = ',', default_values_t = Algorithm::ALL)]
        algo: Vec<Algorithm>,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        cases: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        max_len: usize,
        #[arg(long, default_value = "-")]
        output: PathBuf,
        #[arg(long, hide = true)]
        inject: Vec<Fault>,
    },
    /// Print the event trace of one run as JSON.
    Trace {
        #[arg(long, default_value_t = Algorithm::Rec)]
        algo: Algorithm,
        #[arg(long, value_enum, default_value_t = Mode::Contracts)]
        mode: Mode,
        #[arg(long, default_value = "-")]
        input: PathBuf,
        #[arg(long, default_value = "-")]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = TraceFormat::Json)]
        format: TraceFormat,
    },
    /// Time the sorts on seeded random data with checking off.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = Algorithm::ALL)]
        algo: Vec<Algorithm>,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
        repeats: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = BenchFormat::Text)]
        format: BenchFormat,
        #[arg(long, default_value = "-")]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Unchecked,
    Contracts,
    Full,
}

impl From<Mode> for CheckMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Unchecked => CheckMode::Unchecked,
            Mode::Contracts => CheckMode::Contracts,
            Mode::Full => CheckMode::Full,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TraceFormat {
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchFormat {
    Text,
    Json,
}

enum Failure {
    /// A contract was violated; the message goes to stderr.
    Violation(String),
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &PathBuf) -> anyhow::Result<Vec<i64>> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading standard input")?;
        s
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    Ok(input::parse_ints(&text)?)
}

fn open_output(path: &PathBuf) -> anyhow::Result<Box<dyn Write>> {
    Ok(if path.as_os_str() == "-" {
        Box::new(io::stdout().lock())
    } else {
        Box::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?)
    })
}

fn write_json(path: &PathBuf, value: &impl Serialize) -> anyhow::Result<()> {
    let mut out = open_output(path)?;
    serde_json::to_writer(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Sort { algo, mode, input, output } => {
            let mut a = read_input(&input)?;
            algo.sort(&mut a, &Checker::new(mode.into()))
                .map_err(|v| Failure::Violation(format!("contract violation: {v}")))?;
            let mut out = open_output(&output)?;
            input::write_ints(&mut out, &a).context("writing output")?;
        }
        Command::Verify { algo, cases, seed, max_len, output, inject } => {
            let report = run_campaign(&CampaignConfig {
                algos: algo,
                cases,
                seed,
                max_len,
                faults: inject,
                ..Default::default()
            });
            write_json(&output, &report)?;
            if let Some(first) = report.violations.first() {
                return Err(Failure::Violation(format!(
                    "{} violation(s) in {} runs; first in {} case {}: {}",
                    report.violations.len(),
                    report.cases_run,
                    first.algo,
                    first.case,
                    first.violation
                )));
            }
            eprintln!("{} runs, no violations ({:.2?})", report.cases_run, report.elapsed);
        }
        Command::Trace { algo, mode, input, output, format: TraceFormat::Json } => {
            let mut a = read_input(&input)?;
            let ctx = Checker::new(mode.into()).with_trace(algo.name());
            algo.sort(&mut a, &ctx)
                .map_err(|v| Failure::Violation(format!("contract violation: {v}")))?;
            let doc = TraceDocument {
                algo: algo.name().to_string(),
                n: a.len(),
                events: ctx.take_trace(),
            };
            write_json(&output, &doc)?;
        }
        Command::Bench { algo, sizes, repeats, seed, format, output } => {
            if sizes.is_empty() {
                return Err(anyhow::anyhow!("--sizes must list at least one size").into());
            }
            let rows = bench(&algo, &sizes, repeats, seed)?;
            match format {
                BenchFormat::Json => write_json(&output, &rows)?,
                BenchFormat::Text => {
                    let mut out = open_output(&output)?;
                    write_table(&mut out, &rows).context("writing output")?;
                }
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct BenchRow {
    algo: Algorithm,
    n: usize,
    repeats: u32,
    median_ns: u128,
    comparisons: u64,
}

fn bench(algos: &[Algorithm], sizes: &[usize], repeats: u32, seed: u64) -> anyhow::Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &algo in algos {
        for &n in sizes {
            let data = seeded_array(seed, n as u64, n, &(-1_000_000..=1_000_000));
            let mut times = Vec::with_capacity(repeats as usize);
            let mut comparisons = 0;
            for _ in 0..repeats {
                let mut a = data.clone();
                let ctx = Checker::new(CheckMode::Unchecked);
                let start = Instant::now();
                if let Err(v) = algo.sort(&mut a, &ctx) {
                    bail!("{algo} failed on n={n}: {v}");
                }
                times.push(start.elapsed());
                comparisons = ctx.comparisons();
            }
            times.sort();
            rows.push(BenchRow {
                algo,
                n,
                repeats,
                median_ns: median(&times).as_nanos(),
                comparisons,
            });
        }
    }
    Ok(rows)
}

fn median(sorted: &[Duration]) -> Duration {
    let k = sorted.len();
    if k % 2 == 1 {
        sorted[k / 2]
    } else {
        (sorted[k / 2 - 1] + sorted[k / 2]) / 2
    }
}

fn write_table(out: &mut impl Write, rows: &[BenchRow]) -> io::Result<()> {
    writeln!(out, "{:<6} {:>10} {:>14} {:>14}", "algo", "n", "median_us", "comparisons")?;
    for r in rows {
        writeln!(
            out,
            "{:<6} {:>10} {:>14.1} {:>14}",
            r.algo.name(),
            r.n,
            r.median_ns as f64 / 1000.0,
            r.comparisons
        )?;
    }
    out.flush()
}

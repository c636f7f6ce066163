use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use netsense::bench::{self, BenchResult, GenerateParams, RunConfig, DEFAULT_WINDOW, RESULTS_FILE};
use netsense::DatasetReport;

#[derive(Parser)]
#[command(name = "netsense", version, about = "Traffic-matrix analytics benchmark driver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate, anonymize and window synthetic packets into matrix files.
    Generate(GenerateArgs),
    /// Analyze a matrix directory once and report measures and timings.
    Analyze(AnalyzeArgs),
    /// Sweep resource and batch counts, keeping the best of N runs per cell.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long = "packets", short = 'n', default_value_t = 1 << 20)]
    packets: usize,
    #[arg(long, default_value_t = 1 << 16)]
    address_space: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Packets per traffic-matrix window.
    #[arg(long, short = 'W', default_value_t = DEFAULT_WINDOW)]
    window: usize,
    /// Anonymization key; defaults to the seed.
    #[arg(long)]
    key: Option<u64>,
    #[arg(long, default_value_t = 0.0)]
    invalid_fraction: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Dataset directory written by `generate`.
    input: PathBuf,
    #[arg(long, short = 'R', default_value_t = 1)]
    resources: usize,
    /// Threads per resource [default: host threads / resources].
    #[arg(long)]
    workers_per_resource: Option<usize>,
    #[arg(long, short = 'b', default_value_t = 1)]
    batches: usize,
    /// Run every task on the calling thread instead of a resource group.
    #[arg(long, conflicts_with_all = ["resources", "workers_per_resource"])]
    inline: bool,
    /// Print the report as JSON instead of a table.
    #[arg(long)]
    json: bool,
    /// Directory to write `report.json` into.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    input: PathBuf,
    #[arg(long, short = 'R', value_delimiter = ',', default_values_t = [1, 2, 4, 8])]
    resources: Vec<usize>,
    #[arg(long)]
    workers_per_resource: Option<usize>,
    #[arg(long, short = 'b', value_delimiter = ',', default_values_t = [1, 5, 10])]
    batches: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    /// Directory to write `results.jsonl` into.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let started = Instant::now();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(args) => generate(args),
        Command::Analyze(args) => analyze(args, started),
        Command::Bench(args) => bench_sweep(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", error_chain(&err));
            ExitCode::FAILURE
        }
    }
}

/// Joins the cause chain, skipping causes already quoted by their parent.
fn error_chain(err: &anyhow::Error) -> String {
    let mut out = String::new();
    let mut previous = String::new();
    for cause in err.chain() {
        let text = cause.to_string();
        if previous.contains(&text) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&text);
        previous = text;
    }
    out
}

fn generate(args: GenerateArgs) -> Result<()> {
    let params = GenerateParams {
        packets: args.packets,
        address_space: args.address_space,
        seed: args.seed,
        window_size: args.window,
        anonymization_key: args.key,
        invalid_fraction: args.invalid_fraction,
    };
    let manifest = bench::generate_dataset(&params, &args.out)
        .with_context(|| format!("generating dataset into {}", args.out.display()))?;
    println!(
        "wrote {} windows ({} packets, {} valid, W={}) to {}",
        manifest.windows,
        manifest.packets,
        manifest.valid_packets,
        manifest.window_size,
        args.out.display()
    );
    Ok(())
}

fn analyze(args: AnalyzeArgs, started: Instant) -> Result<()> {
    if !args.inline && args.resources == 0 {
        bail!("--resources must be at least 1 (use --inline for the inline scheduler)");
    }
    let run = if args.inline {
        RunConfig::inline(args.batches)
    } else {
        RunConfig::group(args.resources, args.workers_per_resource, args.batches)
    };
    let outcome = bench::analyze_dir(&args.input, &run, started)
        .with_context(|| format!("analyzing {}", args.input.display()))?;

    let document = serde_json::json!({ "report": outcome.report, "bench": outcome.result });
    if let Some(dir) = &args.out {
        write_file(&dir.join("report.json"), &serde_json::to_string_pretty(&document)?)?;
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&document)?)?;
    } else {
        print_report(&mut out, &outcome.report)?;
        writeln!(out)?;
        print_bench_table(&mut out, std::slice::from_ref(&outcome.result))?;
    }
    Ok(())
}

fn bench_sweep(args: BenchArgs) -> Result<()> {
    if args.resources.contains(&0) {
        bail!("resource counts must be at least 1");
    }
    let rows = bench::bench_dir(
        &args.input,
        &args.resources,
        &args.batches,
        args.workers_per_resource,
        args.repeats,
    )
    .with_context(|| format!("benchmarking {}", args.input.display()))?;
    if let Some(dir) = &args.out {
        let mut lines = String::new();
        for row in &rows {
            lines.push_str(&serde_json::to_string(row)?);
            lines.push('\n');
        }
        write_file(&dir.join(RESULTS_FILE), &lines)?;
    }
    print_bench_table(&mut io::stdout().lock(), &rows)?;
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn print_report(out: &mut impl Write, report: &DatasetReport) -> io::Result<()> {
    let names = netsense::AggregateReport::FIELD_NAMES;
    write!(out, "{:>8}", "window")?;
    for name in names {
        write!(out, " {name:>19}")?;
    }
    writeln!(out)?;
    let rows = report
        .matrices
        .iter()
        .enumerate()
        .map(|(t, r)| (t.to_string(), r))
        .chain(std::iter::once(("total".to_string(), &report.totals)));
    for (label, r) in rows {
        write!(out, "{label:>8}")?;
        for (_, value) in r.fields() {
            write!(out, " {value:>19}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn print_bench_table(out: &mut impl Write, rows: &[BenchResult]) -> io::Result<()> {
    writeln!(
        out,
        "{:>9} {:>8} {:>8} {:>14} {:>14} {:>12} {:>16}",
        "resources", "workers", "batches", "analysis_s", "end_to_end_s", "packets", "packets_per_s"
    )?;
    for r in rows {
        let resources = match r.config.resources {
            0 => "inline".to_string(),
            n => n.to_string(),
        };
        writeln!(
            out,
            "{:>9} {:>8} {:>8} {:>14.6} {:>14.6} {:>12} {:>16.0}",
            resources,
            r.config.workers_per_resource,
            r.config.batches,
            r.analysis_time,
            r.end_to_end_time,
            r.packet_count,
            r.packet_rate
        )?;
    }
    Ok(())
}

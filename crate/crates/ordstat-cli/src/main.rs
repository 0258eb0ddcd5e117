//! Command-line front end: selection runs, oracle verification, scaling
//! benchmarks, and the small-group growth probe. All logic lives in the
//! library; this binary only parses arguments, wires files, and formats
//! output.
//!
//! Exit codes: 0 success, 1 verification or runtime failure, 2 usage error.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use ordstat::algorithms::{run, AlgorithmId, SelectionRequest};
use ordstat::experiments::{
    growth_fit, probe_algorithms, rows_to_csv, run_experiment, ExperimentSpec, GrowthFit,
    ScalingRow, TargetRule,
};
use ordstat::generators::{generate, GeneratorKind, GeneratorSpec};
use ordstat::numeric::parse_sequence;
use ordstat::verify::{
    default_algorithms, exhaustive_equivalence, randomized_equivalence, VerifySummary,
};
use ordstat::{Error, Sequence};
use serde::Serialize;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ordstat", version, about = "Deterministic selection algorithms, instrumented")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select the i-th smallest element of an input.
    Select(SelectArgs),
    /// Check every algorithm against the sorting oracle, exhaustively on
    /// small permutations and randomized at larger sizes, validating all
    /// trace invariants along the way.
    Verify(VerifyArgs),
    /// Run a scaling experiment and write its CSV (and optional fit JSON).
    Bench(BenchArgs),
    /// Measure comparison growth of classic SELECT with groups of 3 and 4
    /// against linear controls. Reports fitted slopes and residuals only;
    /// it does not (and cannot) settle the asymptotic question.
    Probe(ProbeArgs),
}

#[derive(Args)]
struct SelectArgs {
    /// Algorithm: classic3/classic4/classic5 (suffix -lower/-upper),
    /// repeated3, repeated4, shifting4, hybrid4, oracle, random.
    #[arg(long)]
    algo: String,
    /// Target rank, 1-indexed.
    #[arg(long)]
    i: usize,
    /// Inline comma-separated numbers.
    #[arg(long, group = "input", required = true)]
    data: Option<String>,
    /// File with one number per line.
    #[arg(long, group = "input")]
    file: Option<PathBuf>,
    /// Generator spec such as uniform:n=1000:seed=7.
    #[arg(long, group = "input")]
    gen: Option<String>,
    /// Seed for the randomized baseline.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the full run report as JSON.
    #[arg(long)]
    trace: bool,
    /// Write the run report JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the trace as CSV rows here.
    #[arg(long)]
    trace_csv: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Exhaustive permutation sizes 1..=N (at most 9).
    #[arg(long, default_value_t = 8)]
    max_exhaustive: usize,
    /// Randomized trials per algorithm and size.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Sizes for the randomized trials.
    #[arg(long, num_args = 1.., value_delimiter = ',', default_values_t = [1_000usize, 10_000, 100_000])]
    sizes: Vec<usize>,
    /// Algorithms to verify (default: all variants).
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    algos: Option<Vec<String>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Experiment spec as JSON (see README for the schema). Overrides the
    /// inline flags below.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    algos: Option<Vec<String>>,
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// middle | extreme-low | extreme-high | nine-quantiles | fixed:<i>
    #[arg(long, default_value = "middle")]
    target: String,
    /// Generator kind: uniform | sorted | reversed | organpipe |
    /// fewdistinct | mediankiller.
    #[arg(long, default_value = "uniform")]
    gen: String,
    /// Distinct keys for fewdistinct.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Growth-fit JSON output path; fits are computed when given.
    #[arg(long)]
    fit_out: Option<PathBuf>,
}

#[derive(Args)]
struct ProbeArgs {
    /// Input sizes; must hold >= 4 distinct values spanning two orders of
    /// magnitude for the fits.
    #[arg(long, num_args = 1.., value_delimiter = ',', default_values_t = [729usize, 2_187, 6_561, 19_683, 59_049, 177_147])]
    sizes: Vec<usize>,
    #[arg(long, default_value = "uniform")]
    gen: String,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fit JSON output path (stdout when omitted).
    #[arg(long)]
    fit_out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Select(args) => cmd_select(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Probe(args) => cmd_probe(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_usage_error(&err) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn is_usage_error(err: &anyhow::Error) -> bool {
    matches!(
        err.downcast_ref::<Error>(),
        Some(
            Error::Parse(_)
                | Error::InvalidSpec(_)
                | Error::RankOutOfBounds { .. }
                | Error::EmptyInput
                | Error::ExhaustiveDomainTooLarge(_)
                | Error::GroupTooLarge(_)
        )
    )
}

fn parse_algorithm(name: &str, seed: u64) -> Result<AlgorithmId, Error> {
    let alg: AlgorithmId = name.parse()?;
    Ok(alg.with_seed(seed))
}

fn cmd_select(args: SelectArgs) -> anyhow::Result<ExitCode> {
    let alg = parse_algorithm(&args.algo, args.seed)?;
    if let Some(text) = &args.data {
        let sequence = parse_sequence(text)?;
        select_and_print(&alg, sequence, &args)
    } else if let Some(path) = &args.file {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let sequence = parse_sequence(&text)?;
        select_and_print(&alg, sequence, &args)
    } else if let Some(spec) = &args.gen {
        let spec: GeneratorSpec = spec.parse()?;
        select_and_print(&alg, generate(&spec)?, &args)
    } else {
        Err(anyhow!(Error::InvalidSpec(
            "one of --data, --file, --gen is required".into()
        )))
    }
}

fn select_and_print<K: Ord + Clone + Display + Serialize>(
    alg: &AlgorithmId,
    sequence: Sequence<K>,
    args: &SelectArgs,
) -> anyhow::Result<ExitCode> {
    let report = run(alg, SelectionRequest::new(sequence, args.i)?)?;
    println!("{}", report.result_key);
    if args.trace || args.out.is_some() {
        let json = report.to_json()?;
        match &args.out {
            Some(path) => write_file(path, &json)?,
            None => println!("{json}"),
        }
    }
    if let Some(path) = &args.trace_csv {
        write_file(path, &report.trace_csv())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn resolve_algorithms(names: &Option<Vec<String>>, seed: u64) -> anyhow::Result<Vec<AlgorithmId>> {
    match names {
        None => Ok(default_algorithms()),
        Some(names) => names
            .iter()
            .map(|n| parse_algorithm(n, seed).map_err(Into::into))
            .collect(),
    }
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let algorithms = resolve_algorithms(&args.algos, args.seed)?;
    let mut summary = VerifySummary::default();

    let exhaustive = exhaustive_equivalence(&algorithms, args.max_exhaustive)?;
    println!(
        "exhaustive: {} equivalence checks (all permutations of sizes 1..={}, all ranks, {} algorithms)",
        exhaustive.equivalence_checks,
        args.max_exhaustive,
        algorithms.len()
    );
    summary.merge(exhaustive);

    if args.trials > 0 && !args.sizes.is_empty() {
        let randomized =
            randomized_equivalence(&algorithms, &args.sizes, args.trials, args.seed)?;
        println!(
            "randomized: {} equivalence checks ({} trials at sizes {:?})",
            randomized.equivalence_checks, args.trials, args.sizes
        );
        summary.merge(randomized);
    }

    println!("trace events checked: {}", summary.events_checked);
    if summary.passed() {
        println!("PASS");
        Ok(ExitCode::SUCCESS)
    } else {
        println!(
            "FAIL: {} mismatches, {} trace violations",
            summary.mismatches_total, summary.trace_failures_total
        );
        for m in &summary.mismatches {
            println!("counterexample: {m}");
        }
        for t in &summary.trace_failures {
            println!("trace violation: {t}");
        }
        Ok(ExitCode::from(1))
    }
}

fn parse_target(text: &str) -> Result<TargetRule, Error> {
    match text {
        "middle" => Ok(TargetRule::Middle),
        "extreme-low" => Ok(TargetRule::ExtremeLow),
        "extreme-high" => Ok(TargetRule::ExtremeHigh),
        "nine-quantiles" => Ok(TargetRule::NineQuantiles),
        other => match other.strip_prefix("fixed:") {
            Some(i) => Ok(TargetRule::Fixed(i.parse().map_err(|_| {
                Error::Parse(format!("bad fixed target {other:?}"))
            })?)),
            None => Err(Error::Parse(format!("unknown target rule {other:?}"))),
        },
    }
}

fn parse_generator_kind(text: &str) -> Result<GeneratorKind, Error> {
    // Reuse the spec grammar with a placeholder size.
    let spec: GeneratorSpec = format!("{text}:n=1").parse()?;
    Ok(spec.kind)
}

fn cmd_bench(args: BenchArgs) -> anyhow::Result<ExitCode> {
    let spec = if let Some(path) = &args.spec {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str::<ExperimentSpec>(&text)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
    } else {
        ExperimentSpec {
            algorithms: resolve_algorithms(&args.algos, args.seed)?,
            sizes: args
                .sizes
                .clone()
                .ok_or_else(|| Error::InvalidSpec("--sizes or --spec required".into()))?,
            target: parse_target(&args.target)?,
            generator: parse_generator_kind(&args.gen)?,
            k: args.k,
            seed: args.seed,
            repetitions: args.reps,
        }
    };
    spec.validate()?;
    let rows = run_experiment(&spec)?;
    emit_csv(&rows, args.out.as_deref())?;
    if let Some(path) = &args.fit_out {
        let fits = fits_per_algorithm(&spec, &rows)?;
        write_file(path, &serde_json::to_string_pretty(&fits)?)?;
        eprintln!("wrote fits for {} algorithms to {}", fits.len(), path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_probe(args: ProbeArgs) -> anyhow::Result<ExitCode> {
    let spec = ExperimentSpec {
        algorithms: probe_algorithms(),
        sizes: args.sizes.clone(),
        target: TargetRule::Middle,
        generator: parse_generator_kind(&args.gen)?,
        k: args.k,
        seed: args.seed,
        repetitions: args.reps,
    };
    spec.validate()?;
    // Fail before hours of runs if the sizes cannot support the fits.
    check_fittable(&spec.sizes)?;
    let rows = run_experiment(&spec)?;
    emit_csv(&rows, args.out.as_deref())?;
    let fits = fits_per_algorithm(&spec, &rows)?;
    let json = serde_json::to_string_pretty(&fits)?;
    match &args.fit_out {
        Some(path) => {
            write_file(path, &json)?;
            eprintln!("wrote fits for {} algorithms to {}", fits.len(), path.display());
        }
        None => println!("{json}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn check_fittable(sizes: &[usize]) -> Result<(), Error> {
    if sizes.len() < 4 || *sizes.last().unwrap() < 100 * sizes[0] {
        return Err(Error::InvalidSpec(
            "probe needs >= 4 sizes spanning two orders of magnitude".into(),
        ));
    }
    Ok(())
}

fn fits_per_algorithm(
    spec: &ExperimentSpec,
    rows: &[ScalingRow],
) -> anyhow::Result<Vec<GrowthFit>> {
    let mut fits = Vec::new();
    for alg in &spec.algorithms {
        let name = alg.name();
        let own: Vec<ScalingRow> = rows.iter().filter(|r| r.algo == name).cloned().collect();
        fits.push(growth_fit(&own)?);
    }
    Ok(fits)
}

fn emit_csv(rows: &[ScalingRow], out: Option<&Path>) -> anyhow::Result<()> {
    let csv = rows_to_csv(rows);
    match out {
        Some(path) => {
            write_file(path, &csv)?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

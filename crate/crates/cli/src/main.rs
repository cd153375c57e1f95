//! `biphoton`: generate qutrit states, run the five-configuration
//! coincidence plan on them, reconstruct states from measured plans, and
//! drive round-trip and noise-sweep studies. JSON in and out, CSV for
//! sweeps; every command is reproducible byte for byte from its arguments
//! and input files.
//!
//! Exit codes: 0 success, 1 invalid input data, 2 contract errors (missing
//! configuration, bad usage).

mod wire;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use biphoton_core::bootstrap::BootstrapError;
use biphoton_core::measure::derive_seed;
use biphoton_core::{
    bootstrap, outcome_probabilities, reconstruct, run_plan, sample_plan, wrap_angle, ConfigId,
    Constraint, CountTable, MeasureError, OutcomeProbabilities, ProtocolInput, QutritState,
    ReconstructError, ReconstructionReport, StateError, DEFAULT_RESAMPLES,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wire::{fmt17, BootstrapJson, PlanEntryJson, ReportJson, RoundtripJson, StateJson, F17};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: {message}")]
    Plan { path: PathBuf, message: String },
    #[error("invalid state: {0}")]
    State(#[from] StateError),
    #[error("invalid measurement data: {0}")]
    Measure(#[from] MeasureError),
    #[error("reconstruction failed: {0}")]
    Reconstruct(#[from] ReconstructError),
    #[error("bootstrap failed: {0}")]
    Bootstrap(#[from] BootstrapError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Reconstruct(ReconstructError::MissingConfig(_))
            | CliError::Bootstrap(BootstrapError::Reconstruct(ReconstructError::MissingConfig(
                _,
            ))) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "biphoton",
    version,
    about = "Simulate and invert coincidence measurements on biphoton polarization qutrits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random canonical state and emit it as JSON.
    Gen(GenArgs),
    /// Run the five-configuration plan on a state file; emit the plan JSON.
    Simulate(SimulateArgs),
    /// Recover a state from a plan file; emit a reconstruction report.
    Reconstruct(ReconstructArgs),
    /// Generate, measure, and reconstruct repeatedly; emit fidelity stats.
    Roundtrip(RoundtripArgs),
    /// Tabulate round-trip error versus counts per configuration, as CSV.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstraintArg {
    /// Unconstrained.
    Any,
    /// The degenerate family c3 = -c1.
    Special,
    /// Middle amplitude fixed to zero.
    Noc2,
}

impl From<ConstraintArg> for Constraint {
    fn from(arg: ConstraintArg) -> Self {
        match arg {
            ConstraintArg::Any => Constraint::Any,
            ConstraintArg::Special => Constraint::SpecialC1MinusC3,
            ConstraintArg::Noc2 => Constraint::NoC2,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Family to draw from.
    #[arg(long, value_enum, default_value_t = ConstraintArg::Any)]
    constraint: ConstraintArg,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// State JSON file to measure.
    #[arg(long)]
    state: PathBuf,
    /// RNG seed for shot-noise sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Coincidences per configuration; 0 emits exact probabilities.
    #[arg(long, default_value_t = 0)]
    n_per_config: u64,
    /// Emit exact probabilities (same as --n-per-config 0).
    #[arg(long, conflicts_with = "n_per_config")]
    ideal: bool,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Plan JSON file (counts or probs entries).
    #[arg(long)]
    plan: PathBuf,
    /// Known true state; adds fidelity_vs_truth to the report.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// RNG seed for the bootstrap resamples (counts plans only).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RoundtripArgs {
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of round trips.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
    trials: u32,
    /// Coincidences per configuration; 0 runs on exact probabilities.
    #[arg(long, default_value_t = 0)]
    n_per_config: u64,
    /// Run on exact probabilities (same as --n-per-config 0).
    #[arg(long, conflicts_with = "n_per_config")]
    ideal: bool,
    /// Family to draw the truths from.
    #[arg(long, value_enum, default_value_t = ConstraintArg::Any)]
    constraint: ConstraintArg,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trials per ladder rung.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(1..))]
    trials: u32,
    /// Family to draw the truths from.
    #[arg(long, value_enum, default_value_t = ConstraintArg::Any)]
    constraint: ConstraintArg,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Gen(args) => cmd_gen(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Reconstruct(args) => cmd_reconstruct(&args),
        Command::Roundtrip(args) => cmd_roundtrip(&args),
        Command::Sweep(args) => cmd_sweep(&args),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.into(),
        source,
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.into(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("wire types serialize");
    text.push('\n');
    text
}

fn load_state(path: &Path) -> Result<QutritState, CliError> {
    let json: StateJson = read_json(path)?;
    Ok(json.to_state()?)
}

fn effective_n(n_per_config: u64, ideal: bool) -> Option<u64> {
    if ideal || n_per_config == 0 {
        None
    } else {
        Some(n_per_config)
    }
}

fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let state = QutritState::random(args.seed, args.constraint.into());
    emit(
        args.out.as_deref(),
        &to_json(&StateJson::from_state(&state)),
    )
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let state = load_state(&args.state)?;
    let entries: Vec<PlanEntryJson> = match effective_n(args.n_per_config, args.ideal) {
        None => ConfigId::ALL
            .into_iter()
            .map(|id| {
                PlanEntryJson::from_probs(id.as_str(), &outcome_probabilities(&state, id.config()))
            })
            .collect(),
        Some(n) => {
            let tables = sample_plan(&state, n, args.seed)?;
            ConfigId::ALL
                .into_iter()
                .map(|id| PlanEntryJson::from_counts(id.as_str(), &tables[&id]))
                .collect()
        }
    };
    emit(args.out.as_deref(), &to_json(&entries))
}

enum PlanData {
    Probs(BTreeMap<ConfigId, OutcomeProbabilities>),
    Counts(BTreeMap<ConfigId, CountTable>),
}

fn load_plan(path: &Path) -> Result<PlanData, CliError> {
    let entries: Vec<PlanEntryJson> = read_json(path)?;
    let bad = |message: String| CliError::Plan {
        path: path.into(),
        message,
    };
    let mut probs = BTreeMap::new();
    let mut counts = BTreeMap::new();
    for entry in &entries {
        let id = ConfigId::from_str(&entry.config)?;
        let duplicate = match (&entry.counts, &entry.probs) {
            (Some(c), None) => counts
                .insert(
                    id,
                    CountTable {
                        n_uu: c[0],
                        n_ul: c[1],
                        n_lu: c[2],
                        n_ll: c[3],
                    },
                )
                .is_some(),
            (None, Some(p)) => probs
                .insert(id, OutcomeProbabilities::new(p[0].0, p[1].0, p[2].0)?)
                .is_some(),
            (Some(_), Some(_)) => {
                return Err(bad(format!("config {id} carries both counts and probs")))
            }
            (None, None) => {
                return Err(bad(format!("config {id} carries neither counts nor probs")))
            }
        };
        if duplicate {
            return Err(bad(format!("config {id} appears more than once")));
        }
    }
    match (probs.is_empty(), counts.is_empty()) {
        (false, false) => Err(bad("plan mixes counts and probs entries".into())),
        (true, true) => Err(bad("plan is empty".into())),
        (false, true) => Ok(PlanData::Probs(probs)),
        (true, false) => Ok(PlanData::Counts(counts)),
    }
}

fn cmd_reconstruct(args: &ReconstructArgs) -> Result<(), CliError> {
    let truth = args.truth.as_deref().map(load_state).transpose()?;
    let (report, summary): (ReconstructionReport, Option<BootstrapJson>) =
        match load_plan(&args.plan)? {
            PlanData::Probs(map) => (reconstruct(&ProtocolInput::ideal(map))?, None),
            PlanData::Counts(map) => {
                let (report, summary) = bootstrap(&map, DEFAULT_RESAMPLES, args.seed)?;
                (report, Some(BootstrapJson::from_summary(&summary)))
            }
        };
    let mut json = ReportJson::from_report(&report);
    json.bootstrap = summary;
    json.fidelity_vs_truth = truth.map(|t| F17(report.state.fidelity(&t)));
    emit(args.out.as_deref(), &to_json(&json))
}

fn cmd_roundtrip(args: &RoundtripArgs) -> Result<(), CliError> {
    let constraint = args.constraint.into();
    let n_opt = effective_n(args.n_per_config, args.ideal);
    let mut fidelities = Vec::new();
    let mut failures = 0u32;
    let mut branches = BTreeMap::<String, u32>::new();
    for trial in 0..args.trials {
        let truth = QutritState::random(derive_seed(args.seed, 2 * u64::from(trial)), constraint);
        let probs = run_plan(
            &truth,
            n_opt,
            derive_seed(args.seed, 2 * u64::from(trial) + 1),
        )?;
        let input = match n_opt {
            None => ProtocolInput::ideal(probs),
            Some(n) => ProtocolInput::sampled(probs, n),
        };
        match reconstruct(&input) {
            Ok(report) => {
                fidelities.push(report.state.fidelity(&truth));
                *branches
                    .entry(report.branch.as_str().to_owned())
                    .or_default() += 1;
            }
            Err(_) => failures += 1,
        }
    }
    let mean = if fidelities.is_empty() {
        0.0
    } else {
        fidelities.iter().sum::<f64>() / fidelities.len() as f64
    };
    let summary = RoundtripJson {
        trials: args.trials,
        n_per_config: n_opt.unwrap_or(0),
        failures,
        min_fidelity: F17(fidelities
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
            .min(1.0)),
        median_fidelity: F17(percentile(&mut fidelities, 50.0)),
        mean_fidelity: F17(mean),
        branches,
    };
    emit(args.out.as_deref(), &to_json(&summary))
}

/// Counts-per-configuration ladder used by `sweep`.
const LADDER: [u64; 4] = [1_000, 10_000, 100_000, 1_000_000];

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let constraint: Constraint = args.constraint.into();
    let mut csv = String::from(
        "n_per_config,trials,failures,median_infidelity,p10_infidelity,p90_infidelity,\
         median_abs_delta_error,median_abs_phi1_error,median_abs_phi3_error\n",
    );
    for (rung, &n) in LADDER.iter().enumerate() {
        let mut infidelities = Vec::new();
        let mut delta_errs = Vec::new();
        let mut phi1_errs = Vec::new();
        let mut phi3_errs = Vec::new();
        let mut failures = 0u32;
        for trial in 0..args.trials {
            // Same truth population on every rung; fresh counts per rung.
            let truth = QutritState::random(
                derive_seed(args.seed, 1_000_000 + u64::from(trial)),
                constraint,
            );
            let sample_seed =
                derive_seed(args.seed, (rung as u64 + 1) * 7_000_003 + u64::from(trial));
            let probs = run_plan(&truth, Some(n), sample_seed)?;
            match reconstruct(&ProtocolInput::sampled(probs, n)) {
                Ok(report) => {
                    let ph = truth.phases();
                    let rec = report.state.phases();
                    infidelities.push(1.0 - report.state.fidelity(&truth));
                    delta_errs.push(wrap_angle(report.delta - ph.delta).abs());
                    phi1_errs.push(wrap_angle(rec.phi1 - ph.phi1).abs());
                    phi3_errs.push(wrap_angle(rec.phi3 - ph.phi3).abs());
                }
                Err(_) => {
                    failures += 1;
                    infidelities.push(1.0);
                    delta_errs.push(std::f64::consts::PI);
                    phi1_errs.push(std::f64::consts::PI);
                    phi3_errs.push(std::f64::consts::PI);
                }
            }
        }
        csv.push_str(&format!(
            "{n},{},{failures},{},{},{},{},{},{}\n",
            args.trials,
            fmt17(percentile(&mut infidelities, 50.0)),
            fmt17(percentile(&mut infidelities, 10.0)),
            fmt17(percentile(&mut infidelities, 90.0)),
            fmt17(percentile(&mut delta_errs, 50.0)),
            fmt17(percentile(&mut phi1_errs, 50.0)),
            fmt17(percentile(&mut phi3_errs, 50.0)),
        ));
    }
    emit(args.out.as_deref(), &csv)
}

/// Linear-interpolation percentile; sorts in place. 0 on empty input.
fn percentile(values: &mut [f64], q: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
    let pos = q / 100.0 * (values.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    values[lo] + (values[hi] - values[lo]) * (pos - lo as f64)
}

//! Command line front end: strength sweeps, bound curves, raw counts and
//! the built-in invariant suite, emitted as CSV or one-line check results.
//!
//! Exit codes: 0 on success, 2 for configuration problems (bad flags or
//! TOML), 3 when the numbers themselves are inconsistent (failed invariant
//! checks, estimator breakdown such as a negative radicand).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use edr_core::circuit::Basis;
use edr_core::counts::NormMode;
use edr_core::edr::{BoundKind, Method};
use edr_core::sweep::{
    bounds_csv, emit_bounds_curve, parse_config, run_sweep, sample_sweep_counts, sweep_csv,
    ApparatusKind, SignalSpec, StatMode, SweepConfig, SweepError,
};
use edr_core::validate::run_validation;
use edr_core::CountsRecord;

/// Weak-probe error-disturbance simulator for a single polarization qubit.
#[derive(Parser)]
#[command(name = "edr", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the main-apparatus strength; one CSV row per (strength,
    /// method) with error, disturbance and the relation left-hand sides.
    Sweep(SweepArgs),
    /// Tabulate minimum-disturbance bound curves eta_min(eps) as CSV.
    Bounds(BoundsArgs),
    /// Emit the raw eight-way counts a Monte Carlo sweep consumes, one CSV
    /// row per (strength, repetition).
    Counts(CountsArgs),
    /// Run the built-in invariant suite and print one line per check.
    Validate,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML config file; the flags below override its fields.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Comma-separated main-apparatus strengths in [0, 1].
    #[arg(long, value_name = "S0,S1,...", value_delimiter = ',', num_args = 1..)]
    grid: Option<Vec<f64>>,
    /// Weak-probe strength in (0, 1].
    #[arg(long, value_name = "G")]
    wp_strength: Option<f64>,
    /// Signal state: y+, y-, x+, x-, z+, z-, or Bloch angles "theta,phi".
    #[arg(long, value_name = "STATE")]
    signal: Option<String>,
    /// Probe-station splitter extinction ratios; implies spec optics.
    #[arg(long, value_name = "E_R,E_T")]
    pbs_wp: Option<String>,
    /// Main-apparatus splitter extinction ratios; implies spec optics.
    #[arg(long, value_name = "E_R,E_T")]
    pbs_ma: Option<String>,
    /// Readout splitter extinction ratios; implies spec optics.
    #[arg(long, value_name = "E_R,E_T")]
    pbs_post: Option<String>,
    /// Statistics mode: exact probabilities, or mc for seeded counting.
    #[arg(long, value_name = "exact|mc")]
    mode: Option<String>,
    /// Events per repetition in mc mode.
    #[arg(long, value_name = "N")]
    total: Option<u64>,
    /// Repetitions per grid point in mc mode.
    #[arg(long, value_name = "R")]
    reps: Option<u32>,
    /// Root seed for the counting streams.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// Count normalization: grand_total, or paper for the per-column
    /// conditional convention.
    #[arg(long, value_name = "NORM")]
    norm: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Methods to include: direct, three_state, weak_probe.
    #[arg(long, value_name = "M0,M1,...", value_delimiter = ',', num_args = 1..)]
    methods: Option<Vec<String>>,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Relation: heisenberg, ozawa, branciard, branciard_tight, or all.
    #[arg(long, value_name = "KIND", default_value = "all")]
    kind: String,
    /// Commutator bound C in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Comma-separated error values; defaults to 50 points per curve.
    #[arg(long, value_name = "E0,E1,...", value_delimiter = ',', num_args = 1..)]
    grid: Option<Vec<f64>>,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CountsArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Probe basis of the sampled chain: z feeds the error estimate, x the
    /// disturbance estimate.
    #[arg(long, value_name = "z|x", default_value = "z")]
    probe_basis: String,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        if e.is_config() {
            Self::config(e.to_string())
        } else {
            Self::numeric(e.to_string())
        }
    }
}

fn parse_ratio_pair(flag: &str, value: Option<&str>) -> Result<Option<(f64, f64)>, Failure> {
    let Some(text) = value else {
        return Ok(None);
    };
    let bad = || Failure::config(format!("{flag}: expected `E_R,E_T`, got `{text}`"));
    let (left, right) = text.split_once(',').ok_or_else(bad)?;
    let e_r: f64 = left.trim().parse().map_err(|_| bad())?;
    let e_t: f64 = right.trim().parse().map_err(|_| bad())?;
    Ok(Some((e_r, e_t)))
}

fn build_config(args: &ConfigArgs) -> Result<SweepConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Failure::config(format!("cannot read config {}: {e}", path.display()))
            })?;
            parse_config(&text)?
        }
        None => SweepConfig::default(),
    };

    if let Some(grid) = &args.grid {
        cfg.grid = grid.clone();
    }
    if let Some(g) = args.wp_strength {
        cfg.wp_strength = g;
    }
    if let Some(signal) = &args.signal {
        cfg.signal = signal
            .parse::<SignalSpec>()
            .map_err(|e| Failure::config(format!("--signal: {e}")))?;
    }

    let wp = parse_ratio_pair("--pbs-wp", args.pbs_wp.as_deref())?;
    let ma = parse_ratio_pair("--pbs-ma", args.pbs_ma.as_deref())?;
    let post = parse_ratio_pair("--pbs-post", args.pbs_post.as_deref())?;
    if wp.is_some() || ma.is_some() || post.is_some() {
        cfg.apparatus.kind = ApparatusKind::Spec;
    }
    if wp.is_some() {
        cfg.apparatus.wp = wp;
    }
    if ma.is_some() {
        cfg.apparatus.ma = ma;
    }
    if post.is_some() {
        cfg.apparatus.post = post;
    }

    if let Some(mode) = &args.mode {
        cfg.statistics.mode = match mode.as_str() {
            "exact" => StatMode::Exact,
            "mc" | "monte_carlo" => StatMode::MonteCarlo,
            other => {
                return Err(Failure::config(format!(
                    "--mode: unknown mode `{other}` (expected exact or mc)"
                )))
            }
        };
    }
    if let Some(total) = args.total {
        cfg.statistics.total = total;
    }
    if let Some(reps) = args.reps {
        cfg.statistics.reps = reps;
    }
    if let Some(seed) = args.seed {
        cfg.statistics.seed = seed;
    }
    if let Some(norm) = &args.norm {
        cfg.statistics.norm = norm
            .parse::<NormMode>()
            .map_err(|e| Failure::config(format!("--norm: {e}")))?;
    }

    cfg.validate()?;
    Ok(cfg)
}

fn write_output(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let mut cfg = build_config(&args.config)?;
    if let Some(raw) = &args.methods {
        cfg.methods = raw
            .iter()
            .map(|m| {
                m.trim()
                    .parse::<Method>()
                    .map_err(|e| Failure::config(format!("--methods: {e}")))
            })
            .collect::<Result<_, _>>()?;
    }
    let rows = run_sweep(&cfg)?;
    write_output(&sweep_csv(&rows), args.out.as_deref())
}

/// 50 evenly spaced points across the span where the inverted bound stays
/// single-valued; the unit-variance tight curve folds back past sqrt(2).
fn default_bounds_grid(kind: BoundKind) -> Vec<f64> {
    let hi = match kind {
        BoundKind::BranciardTight => std::f64::consts::SQRT_2,
        _ => 2.0,
    };
    (0..50).map(|i| hi * f64::from(i) / 49.0).collect()
}

fn cmd_bounds(args: &BoundsArgs) -> Result<(), Failure> {
    let kinds: Vec<BoundKind> = match args.kind.as_str() {
        "all" => BoundKind::ALL.to_vec(),
        other => vec![other
            .parse()
            .map_err(|e| Failure::config(format!("--kind: {e}")))?],
    };
    let mut rows = Vec::new();
    for kind in kinds {
        let grid = match &args.grid {
            Some(g) => g.clone(),
            None => default_bounds_grid(kind),
        };
        rows.extend(emit_bounds_curve(kind, args.c, &grid)?);
    }
    write_output(&bounds_csv(&rows), args.out.as_deref())
}

fn cmd_counts(args: &CountsArgs) -> Result<(), Failure> {
    let cfg = build_config(&args.config)?;
    let basis = match args.probe_basis.as_str() {
        "z" => Basis::Z,
        "x" => Basis::X,
        other => {
            return Err(Failure::config(format!(
                "--probe-basis: unknown basis `{other}` (expected z or x)"
            )))
        }
    };
    let records = sample_sweep_counts(&cfg, basis)?;
    let mut csv = String::with_capacity((records.len() + 1) * 64);
    csv.push_str(CountsRecord::CSV_HEADER);
    csv.push('\n');
    for rec in &records {
        csv.push_str(&rec.csv_row());
        csv.push('\n');
    }
    write_output(&csv, args.out.as_deref())
}

fn cmd_validate() -> Result<(), Failure> {
    let outcomes = run_validation();
    let mut failed = 0usize;
    for o in &outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}: {}", o.name, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(Failure::numeric(format!(
            "{failed} of {} checks failed",
            outcomes.len()
        )));
    }
    println!("all {} checks passed", outcomes.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Counts(args) => cmd_counts(args),
        Command::Validate => cmd_validate(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

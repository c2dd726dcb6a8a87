//! Command-line front end: reproducible `simulate`, `analyze`, `calibrate`,
//! and `limits` runs emitting plot-ready CSV/JSON.
//!
//! Every command is a pure function of its flags, input files, and seed:
//! identical invocations produce byte-identical outputs. Writing to a file
//! also writes `FILE.manifest.json` recording the fully resolved
//! configuration, so any output can be reproduced from its manifest alone.
//!
//! Option precedence is flags over the optional `--config` JSON file over
//! built-in defaults; the seed additionally falls back to the
//! `LABORSIM_SEED` environment variable (overridden by `--seed`).
//!
//! Exit codes: 0 success, 2 usage errors, 3 validation/parse errors,
//! 4 infeasible or non-monotone calibration, 1 I/O failure.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytics::{
    asymptotic_limits, stagewise_from_cumulative, uv_trajectory, LimitValue, MarketRegime,
    StagewiseSeries, TrajectoryMode,
};
use crate::calibration::{calibrate_gamma, CalibrationSearch};
use crate::config::{
    MarketConfig, MismatchNormalization, DEFAULT_COMPANIES, DEFAULT_LETTERS, DEFAULT_STUDENTS,
};
use crate::data::{self, fmt_sig};
use crate::error::Result;
use crate::stages::{run_stages, StageRecord};

// ── argument surface ──────────────────────────────────────────────────────

#[derive(Debug, Parser)]
#[command(
    name = "laborsim",
    version,
    about = "Probabilistic multi-stage labor-market simulator and analyzer",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the staged matching simulation and emit per-stage records
    Simulate(SimulateArgs),
    /// Transform empirical cumulative-employment series
    Analyze(AnalyzeArgs),
    /// Fit the ranking preference to a target unemployment rate
    Calibrate(CalibrateArgs),
    /// Print the infinite-stage classification for a job-offer ratio
    Limits(LimitsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Cohort size N [default: 2000]
    #[arg(long)]
    students: Option<usize>,
    /// Company count K [default: 100]
    #[arg(long)]
    companies: Option<usize>,
    /// Job-offer ratio: total seats per student [default: 1]
    #[arg(long)]
    alpha: Option<f64>,
    /// Ranking preference weight [default: 1]
    #[arg(long)]
    gamma: Option<f64>,
    /// Market-history weight [default: 1]
    #[arg(long)]
    beta: Option<f64>,
    /// Applications each student posts per stage [default: 10]
    #[arg(long)]
    letters: Option<usize>,
    /// Maximum number of selection stages [default: 20]
    #[arg(long)]
    stages: Option<usize>,
    /// RNG seed [default: 0]
    #[arg(long, env = "LABORSIM_SEED")]
    seed: Option<u64>,
    /// Identical per-company quota, overriding the split derived from alpha
    #[arg(long)]
    quota: Option<usize>,
    /// Normalize the application-gap mismatch by total vacancy
    #[arg(long)]
    normalize_mismatch: bool,
    /// Output file; omits the summary table and prints records to stdout
    /// when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// JSON config file supplying defaults for any omitted flag
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum AnalyzeMode {
    /// Per-year stage-wise decomposition with an identity-check column
    Stagewise,
    /// Cross-year (shortage, unemployment) points at one stage
    Trajectory,
    /// Per-year residual employment against the regime's ceiling
    LearningCurve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum PointsKind {
    /// Trajectory points from cumulative rates
    Cumulative,
    /// Trajectory points from the stage-wise decomposition
    Stagewise,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Input employment CSV (`year,alpha0,cum_emp_0,...`)
    #[arg(long)]
    input: PathBuf,
    /// Which transform to emit
    #[arg(long, value_enum, default_value_t = AnalyzeMode::Stagewise)]
    mode: AnalyzeMode,
    /// Stage index for trajectory mode
    #[arg(long, default_value_t = 0)]
    stage: usize,
    /// Coordinate convention for trajectory mode
    #[arg(long, value_enum, default_value_t = PointsKind::Cumulative)]
    points: PointsKind,
    /// Output format
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Output file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    /// Target steady-state unemployment rate, strictly between 0 and 1
    #[arg(long)]
    target_u: f64,
    /// Job-offer ratio [default: 1]
    #[arg(long)]
    alpha: Option<f64>,
    /// Monte Carlo replicates per estimate [default: 16]
    #[arg(long)]
    replicates: Option<usize>,
    /// Bracket width at which the search stops [default: 0.05]
    #[arg(long)]
    tolerance: Option<f64>,
    /// RNG seed [default: 0]
    #[arg(long, env = "LABORSIM_SEED")]
    seed: Option<u64>,
    /// Upper end of the search bracket [default: 20]
    #[arg(long)]
    gamma_max: Option<f64>,
    /// Simulated years per replicate [default: 60]
    #[arg(long)]
    horizon: Option<usize>,
    /// Hard cap on bisection iterations [default: 40]
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Cohort size N [default: 2000]
    #[arg(long)]
    students: Option<usize>,
    /// Company count K [default: 100]
    #[arg(long)]
    companies: Option<usize>,
    /// Applications each student posts per stage [default: 10]
    #[arg(long)]
    letters: Option<usize>,
    /// Market-history weight, held fixed during the fit [default: 1]
    #[arg(long)]
    beta: Option<f64>,
    /// Output file for the result JSON (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file supplying defaults for any omitted flag
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LimitsArgs {
    /// Job-offer ratio; must be positive
    #[arg(long, value_parser = parse_positive)]
    alpha: f64,
}

fn parse_positive(text: &str) -> std::result::Result<f64, String> {
    let value: f64 = text
        .parse()
        .map_err(|_| format!("`{text}` is not a number"))?;
    if !value.is_finite() || value <= 0.0 {
        return Err(format!(
            "the job-offer ratio must be positive and finite, got {text}"
        ));
    }
    Ok(value)
}

// ── optional config file ──────────────────────────────────────────────────

/// Values an on-disk JSON config may supply; any present key acts as the
/// default for the matching flag. Unknown keys are rejected to catch typos.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    students: Option<usize>,
    companies: Option<usize>,
    alpha: Option<f64>,
    gamma: Option<f64>,
    beta: Option<f64>,
    letters: Option<usize>,
    stages: Option<usize>,
    seed: Option<u64>,
    quota: Option<usize>,
    normalize_mismatch: Option<bool>,
    replicates: Option<usize>,
    tolerance: Option<f64>,
    gamma_max: Option<f64>,
    horizon: Option<usize>,
    max_iterations: Option<usize>,
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(path) => {
            let text = fs::read_to_string(path)?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

// ── manifests ─────────────────────────────────────────────────────────────

/// Reproducibility record written next to every output file: replaying the
/// recorded command with the recorded configuration regenerates the listed
/// outputs byte-identically.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// Fully resolved configuration after flag/config-file/default merging.
    pub config: serde_json::Value,
    /// RNG seed, absent for the deterministic input-transform commands.
    pub seed: Option<u64>,
    pub artifact_version: String,
    pub outputs: Vec<String>,
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn write_with_manifest(
    out: &Path,
    rendered: &str,
    command: &str,
    config: serde_json::Value,
    seed: Option<u64>,
) -> Result<PathBuf> {
    fs::write(out, rendered)?;
    let manifest = RunManifest {
        command: command.to_string(),
        config,
        seed,
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        outputs: vec![out.display().to_string()],
    };
    let path = manifest_path(out);
    fs::write(&path, data::to_rounded_json_pretty(&manifest)?)?;
    Ok(path)
}

// ── simulate ──────────────────────────────────────────────────────────────

fn resolve_simulate(args: &SimulateArgs) -> Result<(MarketConfig, usize, OutputFormat)> {
    let file = load_file_config(args.config.as_deref())?;
    let config = MarketConfig {
        n_students: args.students.or(file.students).unwrap_or(DEFAULT_STUDENTS),
        n_companies: args
            .companies
            .or(file.companies)
            .unwrap_or(DEFAULT_COMPANIES),
        job_offer_ratio: args.alpha.or(file.alpha).unwrap_or(1.0),
        quota_per_company: args.quota.or(file.quota),
        gamma: args.gamma.or(file.gamma).unwrap_or(1.0),
        beta: args.beta.or(file.beta).unwrap_or(1.0),
        letters_per_student: args.letters.or(file.letters).unwrap_or(DEFAULT_LETTERS),
        mismatch_normalization: if args.normalize_mismatch
            || file.normalize_mismatch.unwrap_or(false)
        {
            MismatchNormalization::ByTotalVacancy
        } else {
            MismatchNormalization::Raw
        },
        seed: args.seed.or(file.seed).unwrap_or(0),
        ..MarketConfig::default()
    };
    config.validate()?;
    let stages = args.stages.or(file.stages).unwrap_or(20);
    Ok((config, stages, args.format))
}

fn print_stage_summary(records: &[StageRecord]) {
    println!(
        "{:>5}  {:>13}  {:>13}  {:>13}  {:>14}  {:>13}  {:>9}  {:>9}",
        "stage",
        "alpha_stage",
        "u_stage",
        "omega_stage",
        "cum_employment",
        "error",
        "students",
        "vacancies"
    );
    for record in records {
        println!(
            "{:>5}  {:>13}  {:>13}  {:>13}  {:>14}  {:>13}  {:>9}  {:>9}",
            record.stage,
            fmt_sig(record.alpha_stage),
            fmt_sig(record.u_stage),
            fmt_sig(record.omega_stage),
            fmt_sig(record.cum_employment),
            fmt_sig(record.error),
            record.remaining_students,
            record.remaining_vacancies
        );
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let (config, stages, format) = resolve_simulate(&args)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let records = run_stages(&config, stages, &mut rng)?;
    let rendered = match format {
        OutputFormat::Csv => data::write_stage_records_csv(&records)?,
        OutputFormat::Json => data::write_stage_records_json(&records)?,
    };
    match &args.out {
        None => print!("{rendered}"),
        Some(out) => {
            let manifest = write_with_manifest(
                out,
                &rendered,
                "simulate",
                serde_json::json!({
                    "market": config,
                    "stages": stages,
                    "format": format,
                }),
                Some(config.seed),
            )?;
            print_stage_summary(&records);
            println!();
            println!(
                "wrote {} stage records to {} (manifest {})",
                records.len(),
                out.display(),
                manifest.display()
            );
        }
    }
    Ok(())
}

// ── analyze ───────────────────────────────────────────────────────────────

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let file = fs::File::open(&args.input)?;
    let dataset = data::parse_employment_csv(file)?;
    let rendered = match args.mode {
        AnalyzeMode::Stagewise => {
            let stagewise: Vec<StagewiseSeries> = dataset
                .records
                .iter()
                .map(stagewise_from_cumulative)
                .collect();
            match args.format {
                OutputFormat::Csv => data::write_stagewise_csv(&stagewise)?,
                OutputFormat::Json => data::write_stagewise_json(&stagewise)?,
            }
        }
        AnalyzeMode::Trajectory => {
            let mode = match args.points {
                PointsKind::Cumulative => TrajectoryMode::Cumulative,
                PointsKind::Stagewise => TrajectoryMode::Stagewise,
            };
            let trajectory = uv_trajectory(&dataset.records, args.stage, mode);
            match args.format {
                OutputFormat::Csv => data::write_trajectory_csv(&trajectory)?,
                OutputFormat::Json => data::write_trajectory_json(&trajectory)?,
            }
        }
        AnalyzeMode::LearningCurve => match args.format {
            OutputFormat::Csv => data::write_learning_curves_csv(&dataset.records)?,
            OutputFormat::Json => data::write_learning_curves_json(&dataset.records)?,
        },
    };
    match &args.out {
        None => print!("{rendered}"),
        Some(out) => {
            let manifest = write_with_manifest(
                out,
                &rendered,
                "analyze",
                serde_json::json!({
                    "input": args.input.display().to_string(),
                    "mode": args.mode,
                    "stage": args.stage,
                    "points": args.points,
                    "format": args.format,
                }),
                None,
            )?;
            println!(
                "analyzed {} year series from {} into {} (manifest {})",
                dataset.records.len(),
                args.input.display(),
                out.display(),
                manifest.display()
            );
        }
    }
    Ok(())
}

// ── calibrate ─────────────────────────────────────────────────────────────

fn cmd_calibrate(args: CalibrateArgs) -> Result<()> {
    let file = load_file_config(args.config.as_deref())?;
    let config = MarketConfig {
        n_students: args.students.or(file.students).unwrap_or(DEFAULT_STUDENTS),
        n_companies: args
            .companies
            .or(file.companies)
            .unwrap_or(DEFAULT_COMPANIES),
        job_offer_ratio: args.alpha.or(file.alpha).unwrap_or(1.0),
        beta: args.beta.or(file.beta).unwrap_or(1.0),
        letters_per_student: args.letters.or(file.letters).unwrap_or(DEFAULT_LETTERS),
        seed: args.seed.or(file.seed).unwrap_or(0),
        ..MarketConfig::default()
    };
    let defaults = CalibrationSearch::default();
    let search = CalibrationSearch {
        gamma_max: args.gamma_max.or(file.gamma_max).unwrap_or(defaults.gamma_max),
        tolerance: args.tolerance.or(file.tolerance).unwrap_or(defaults.tolerance),
        max_iterations: args
            .max_iterations
            .or(file.max_iterations)
            .unwrap_or(defaults.max_iterations),
        replicates: args
            .replicates
            .or(file.replicates)
            .unwrap_or(defaults.replicates),
        horizon: args.horizon.or(file.horizon).unwrap_or(defaults.horizon),
    };
    let result = calibrate_gamma(args.target_u, &config, &search)?;
    let rendered = data::write_calibration_json(&result)?;
    match &args.out {
        None => print!("{rendered}"),
        Some(out) => {
            let manifest = write_with_manifest(
                out,
                &rendered,
                "calibrate",
                serde_json::json!({
                    "market": config,
                    "target_u": args.target_u,
                    "search": search,
                }),
                Some(config.seed),
            )?;
            println!(
                "gamma_hat = {} in bracket [{}, {}] after {} iterations; \
                 achieved U = {} +/- {} against target {}",
                fmt_sig(result.gamma_hat),
                fmt_sig(result.bracket.0),
                fmt_sig(result.bracket.1),
                result.iterations,
                fmt_sig(result.achieved_u),
                fmt_sig(result.achieved_standard_error),
                fmt_sig(result.target_u)
            );
            println!(
                "wrote calibration result to {} (manifest {})",
                out.display(),
                manifest.display()
            );
        }
    }
    Ok(())
}

// ── limits ────────────────────────────────────────────────────────────────

fn limit_text(value: LimitValue) -> String {
    match value {
        LimitValue::Value(v) => fmt_sig(v),
        LimitValue::Diverges => "diverges".to_string(),
        LimitValue::Marginal => "marginal".to_string(),
    }
}

fn cmd_limits(args: LimitsArgs) -> Result<()> {
    let limits = asymptotic_limits(args.alpha)?;
    println!("alpha = {}: {}", fmt_sig(args.alpha), limits.regime);
    println!("  stage job-offer ratio  -> {}", limit_text(limits.alpha_stage));
    println!("  stage unemployment     -> {}", limit_text(limits.u_stage));
    println!("  stage vacancy ratio    -> {}", limit_text(limits.omega_stage));
    println!(
        "  cumulative labor shortage -> {}",
        fmt_sig(limits.cumulative_shortage)
    );
    match limits.regime {
        MarketRegime::BuyersMarket => println!(
            "  every seat is eventually taken; the surviving students face an \
             emptying market"
        ),
        MarketRegime::SellersMarket => println!(
            "  every student is eventually hired; a fraction {} of seats can \
             never be filled",
            fmt_sig(limits.cumulative_shortage)
        ),
        MarketRegime::Marginal => println!(
            "  marginal case: unemployment and vacancy stay equal at every \
             stage and their common limit depends on the dynamics, not on \
             alpha alone"
        ),
    }
    Ok(())
}

// ── entry point ───────────────────────────────────────────────────────────

/// Parses arguments, dispatches, and returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap routes help/version to stdout (exit 0) and usage errors
            // to stderr (exit 2)
            let _ = err.print();
            return err.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Calibrate(args) => cmd_calibrate(args),
        Command::Limits(args) => cmd_limits(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

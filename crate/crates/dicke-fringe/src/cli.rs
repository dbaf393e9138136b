//! Command-line front end: flag parsing, optional `key=value` config files,
//! CSV/JSON emission, figure-data presets, click-record export, and the
//! acceptance-suite runner.
//!
//! Conventions (repeated in every `--help`): times in units of 1/γ, drive
//! strength Ω in units of γ (γ ≡ 1), all angles in radians. Output carries a
//! `# dicke-fringe v<semver>` header followed by `# key = value` metadata;
//! no timestamps, so every command is byte-deterministic given its flags.
//!
//! Exit codes: 0 success, 1 usage error, 2 numeric/domain error,
//! 3 acceptance failure.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::correlations::{g1_intensity, g2_analytic, g2_numeric_grid};
use crate::dynamics::{assemble_liouvillian, steady_state_closed_form, steady_state_numeric};
use crate::error::Error;
use crate::qcore::SystemParams;
use crate::suite::{all_acceptable, run_suite, Outcome, SuiteConfig};
use crate::trajectories::{
    estimate_g2_with, simulate_trajectory, write_click_record, McConfig, TauBins,
};

const UNITS: &str = "Units: times in 1/\u{3b3}; \u{3a9} in units of \u{3b3} (\u{3b3} = 1); angles in radians.";
const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Parse `std::env::args`, run the requested command, and return the
/// process exit code (0 success, 1 usage, 2 numeric/domain, 3 acceptance
/// failure).
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(RunError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            1
        }
        // A downstream pager/`head` closing the pipe is not an error.
        Err(RunError::Lib(Error::Io(e))) if e.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(RunError::Lib(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[derive(Parser)]
#[command(
    name = "dicke-fringe",
    version,
    about = "Fluorescence of two coherently driven two-level atoms: steady states, interference fringes, photon correlations, and the nonclassicality check",
    after_help = UNITS
)]
struct Cli {
    /// Optional key=value defaults file; command-line flags override it
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Steady-state populations vs drive strength
    SteadyState(SteadyStateArgs),
    /// First- or second-order fringe table vs detection phase δ
    Fringes(FringesArgs),
    /// Intensity–intensity correlation g²(δ₁, δ₂, τ) vs delay
    G2(G2Args),
    /// Export one quantum-jump trajectory as a tab-separated click record
    Simulate(SimulateArgs),
    /// Emit the exact data grid behind a numbered figure
    Fig(FigArgs),
    /// Run the acceptance suite and report pass/fail per criterion
    Check(CheckArgs),
}

#[derive(Args)]
#[command(after_help = UNITS)]
struct SteadyStateArgs {
    /// Drive strength(s) Ω in units of γ (one or more values)
    #[arg(long, num_args = 1.., value_name = "OMEGA")]
    omega: Vec<f64>,
    /// Also solve the master-equation kernel numerically and append the
    /// numeric populations plus the max absolute deviation per row
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
#[command(after_help = UNITS)]
struct FringesArgs {
    /// Quantity to tabulate over the δ grid
    #[arg(value_enum)]
    mode: FringeMode,
    /// Drive strength Ω in units of γ
    #[arg(long)]
    omega: Option<f64>,
    /// Detection-phase grid δ in radians (one or more values)
    #[arg(long, num_args = 1.., value_name = "DELTA")]
    delta: Vec<f64>,
    /// Fixed first-detector phase δ₁ in radians (g2-pair mode only)
    #[arg(long)]
    delta1: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FringeMode {
    /// First-order fringe G¹(δ) of the steady state
    G1,
    /// Zero-delay g²(δ, δ, 0): both detectors at the same phase
    G2Single,
    /// Zero-delay g²(δ₁, δ, 0): second-detector sweep at fixed δ₁
    G2Pair,
}

impl FringeMode {
    fn label(self) -> &'static str {
        match self {
            FringeMode::G1 => "g1",
            FringeMode::G2Single => "g2-single",
            FringeMode::G2Pair => "g2-pair",
        }
    }
}

#[derive(Args)]
#[command(after_help = UNITS)]
struct G2Args {
    /// Drive strength Ω in units of γ
    #[arg(long)]
    omega: Option<f64>,
    /// First-detector phase δ₁ in radians (default 0)
    #[arg(long)]
    delta1: Option<f64>,
    /// Second-detector phase δ₂ in radians (default 0)
    #[arg(long)]
    delta2: Option<f64>,
    /// Delay grid τ ≥ 0 in units of 1/γ (one or more values)
    #[arg(long, num_args = 1.., value_name = "TAU")]
    tau: Vec<f64>,
    /// Computation method(s) to tabulate
    #[arg(long, value_enum)]
    method: Option<MethodSel>,
    /// Monte Carlo budget: total simulated time in units of 1/γ
    /// (required by --method mc; enables the MC columns of --method all)
    #[arg(long)]
    budget: Option<f64>,
    /// Monte Carlo master seed (default 7)
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo delay-bin width in units of 1/γ (default 0.05)
    #[arg(long)]
    mc_bin_width: Option<f64>,
    /// Monte Carlo detector-window half-width in radians (default 0.1)
    #[arg(long)]
    mc_window: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodSel {
    /// Closed-form expression
    Analytic,
    /// Regression-theorem propagation of the conditioned state
    Numeric,
    /// Quantum-jump Monte Carlo coincidence estimate
    Mc,
    /// Analytic + numeric columns (+ MC when --budget is given)
    All,
}

impl MethodSel {
    fn label(self) -> &'static str {
        match self {
            MethodSel::Analytic => "analytic",
            MethodSel::Numeric => "numeric",
            MethodSel::Mc => "mc",
            MethodSel::All => "all",
        }
    }
}

impl FromStr for MethodSel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Args)]
#[command(after_help = UNITS)]
struct SimulateArgs {
    /// Drive strength Ω in units of γ
    #[arg(long)]
    omega: Option<f64>,
    /// Interatomic light-path phase φ in radians (default 0)
    #[arg(long)]
    phi: Option<f64>,
    /// Simulated time in units of 1/γ (default 1000)
    #[arg(long)]
    duration: Option<f64>,
    /// Trajectory seed (default 7)
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (default: stdout)
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args)]
#[command(after_help = UNITS)]
struct FigArgs {
    /// Figure number: 3 steady-state populations vs Ω; 4 single-detector
    /// zero-delay fringe; 5 pair scan at δ₁ = 0; 6 pair scan at δ₁ = π
    #[arg(long, value_parser = clap::value_parser!(u8).range(3..=6))]
    name: Option<u8>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
#[command(after_help = UNITS)]
struct CheckArgs {
    /// Skip the Monte Carlo criterion (everything else runs in seconds)
    #[arg(long)]
    fast: bool,
    /// Monte Carlo budget in units of 1/γ (default 1e7)
    #[arg(long)]
    budget: Option<f64>,
    /// Monte Carlo master seed (default 7)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file (default: stdout)
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Output format (default csv)
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// Comma-separated values with #-prefixed metadata header
    Csv,
    /// One object: {params, columns, rows, provenance}
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug)]
enum RunError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Lib(e)
    }
}

impl From<io::Error> for RunError {
    fn from(e: io::Error) -> Self {
        RunError::Lib(Error::Io(e))
    }
}

type CliResult<T> = Result<T, RunError>;

fn usage(msg: impl Into<String>) -> RunError {
    RunError::Usage(msg.into())
}

/// Defaults loaded from a `--config` file: `key = value` lines, `#`
/// comments; keys are the long flag names. Flags always win over the file.
struct FileConfig(HashMap<String, String>);

impl FileConfig {
    fn load(path: Option<&Path>) -> CliResult<Self> {
        let mut map = HashMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read config file {}: {e}", path.display())))?;
            for (n, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    return Err(usage(format!(
                        "config file {} line {}: expected `key = value`",
                        path.display(),
                        n + 1
                    )));
                };
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Self(map))
    }

    fn take<T: FromStr>(&self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: Display,
    {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| usage(format!("config key `{key}` = `{raw}`: {e}"))),
        }
    }

    fn take_list<T: FromStr>(&self, key: &str) -> CliResult<Option<Vec<T>>>
    where
        T::Err: Display,
    {
        let Some(raw) = self.0.get(key) else { return Ok(None) };
        raw.split([',', ' '])
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|e| usage(format!("config key `{key}` = `{raw}`: {e}"))))
            .collect::<CliResult<Vec<T>>>()
            .map(Some)
    }

    fn flag(&self, set_on_cli: bool, key: &str) -> CliResult<bool> {
        Ok(set_on_cli || self.take::<bool>(key)?.unwrap_or(false))
    }
}

/// Command-line value if present, else the config-file value.
fn pick<T: FromStr>(cli: Option<T>, file: &FileConfig, key: &str) -> CliResult<Option<T>>
where
    T::Err: Display,
{
    match cli {
        Some(v) => Ok(Some(v)),
        None => file.take(key),
    }
}

fn pick_list<T: FromStr>(cli: Vec<T>, file: &FileConfig, key: &str) -> CliResult<Option<Vec<T>>>
where
    T::Err: Display,
{
    if cli.is_empty() {
        file.take_list(key)
    } else {
        Ok(Some(cli))
    }
}

fn resolve_output(args: OutputArgs, file: &FileConfig) -> CliResult<(Option<PathBuf>, OutputFormat)> {
    let output = pick(args.output, file, "output")?;
    let format = pick(args.format, file, "format")?.unwrap_or(OutputFormat::Csv);
    Ok((output, format))
}

fn require_drive(omega: Option<f64>) -> CliResult<f64> {
    let omega = omega.ok_or_else(|| usage("--omega is required"))?;
    if !omega.is_finite() || omega <= 0.0 {
        return Err(usage(format!("correlation commands need a finite drive Ω > 0, got {omega}")));
    }
    Ok(omega)
}

fn require_finite_grid(values: &[f64], what: &str) -> CliResult<()> {
    if values.is_empty() {
        return Err(usage(format!("{what} grid must be non-empty")));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(usage(format!("{what} grid contains a non-finite value {bad}")));
    }
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::SteadyState(args) => cmd_steady_state(args, &file),
        Command::Fringes(args) => cmd_fringes(args, &file),
        Command::G2(args) => cmd_g2(args, &file),
        Command::Simulate(args) => cmd_simulate(args, &file),
        Command::Fig(args) => cmd_fig(args, &file),
        Command::Check(args) => cmd_check(args, &file),
    }
}

/// One output table: ordered metadata, column names, numeric rows.
struct Table {
    params: Vec<(&'static str, String)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    fn emit(&self, format: OutputFormat, output: Option<&Path>) -> CliResult<()> {
        let mut sink: Box<dyn Write> = match output {
            Some(path) => Box::new(io::BufWriter::new(fs::File::create(path)?)),
            None => Box::new(io::stdout().lock()),
        };
        match format {
            OutputFormat::Csv => self.write_csv(&mut sink)?,
            OutputFormat::Json => self.write_json(&mut sink)?,
        }
        sink.flush()?;
        Ok(())
    }

    fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "# dicke-fringe v{VERSION}")?;
        for (key, value) in &self.params {
            writeln!(out, "# {key} = {value}")?;
        }
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.11e}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    fn write_json(&self, out: &mut dyn Write) -> io::Result<()> {
        let params: serde_json::Map<String, serde_json::Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.clone())))
            .collect();
        let doc = serde_json::json!({
            "params": params,
            "columns": self.columns,
            "rows": self.rows,
            "provenance": { "tool": "dicke-fringe", "version": VERSION },
        });
        serde_json::to_writer_pretty(&mut *out, &doc).map_err(io::Error::other)?;
        writeln!(out)
    }
}

fn steady_state_rows(omegas: &[f64], verify: bool) -> CliResult<Vec<Vec<f64>>> {
    let mut rows = Vec::with_capacity(omegas.len());
    for &omega in omegas {
        let p = SystemParams::with_phi(omega, 0.0)?;
        let pops = steady_state_closed_form(&p)?;
        let closed = [pops.rho_gg, pops.rho_ss, pops.rho_aa, pops.rho_ee];
        let mut row = vec![omega];
        row.extend(closed);
        if verify {
            let state = steady_state_numeric(&assemble_liouvillian(&p))?;
            // Column order gg, ss, aa, ee; the state indexes (e, s, a, g).
            let numeric =
                [state.population(3), state.population(1), state.population(2), state.population(0)];
            let dev = closed
                .iter()
                .zip(numeric)
                .map(|(c, n)| (c - n).abs())
                .fold(0.0, f64::max);
            row.extend(numeric);
            row.push(dev);
        }
        rows.push(row);
    }
    Ok(rows)
}

fn cmd_steady_state(args: SteadyStateArgs, file: &FileConfig) -> CliResult<i32> {
    let omegas = pick_list(args.omega, file, "omega")?
        .ok_or_else(|| usage("steady-state needs at least one --omega value"))?;
    require_finite_grid(&omegas, "Ω")?;
    let verify = file.flag(args.verify, "verify")?;
    let (output, format) = resolve_output(args.out, file)?;

    let mut columns = vec!["omega", "rho_gg", "rho_ss", "rho_aa", "rho_ee"];
    if verify {
        columns.extend([
            "rho_gg_numeric",
            "rho_ss_numeric",
            "rho_aa_numeric",
            "rho_ee_numeric",
            "max_abs_dev",
        ]);
    }
    let table = Table {
        params: vec![
            ("command", "steady-state".into()),
            ("gamma", "1".into()),
            ("method", if verify { "closed-form+kernel" } else { "closed-form" }.into()),
        ],
        columns,
        rows: steady_state_rows(&omegas, verify)?,
    };
    table.emit(format, output.as_deref())?;
    Ok(0)
}

fn cmd_fringes(args: FringesArgs, file: &FileConfig) -> CliResult<i32> {
    let omega = require_drive(pick(args.omega, file, "omega")?)?;
    let deltas = pick_list(args.delta, file, "delta")?
        .ok_or_else(|| usage("--delta grid is required (one or more phases, radians)"))?;
    require_finite_grid(&deltas, "δ")?;
    let delta1 = pick(args.delta1, file, "delta1")?;
    if args.mode != FringeMode::G2Pair && delta1.is_some() {
        return Err(usage("--delta1 only applies to g2-pair mode"));
    }
    let (output, format) = resolve_output(args.out, file)?;

    let p = SystemParams::with_phi(omega, 0.0)?;
    let mut params = vec![
        ("command", "fringes".into()),
        ("mode", args.mode.label().into()),
        ("omega", omega.to_string()),
        ("gamma", "1".into()),
        ("method", "analytic".into()),
    ];
    let mut rows = Vec::with_capacity(deltas.len());
    match args.mode {
        FringeMode::G1 => {
            let steady = steady_state_numeric(&assemble_liouvillian(&p))?;
            for &d in &deltas {
                rows.push(vec![d, g1_intensity(&steady, d)?]);
            }
        }
        FringeMode::G2Single => {
            for &d in &deltas {
                rows.push(vec![d, g2_analytic(&p, d, d, 0.0)?]);
            }
        }
        FringeMode::G2Pair => {
            let d1 = delta1.ok_or_else(|| usage("g2-pair mode requires --delta1"))?;
            if !d1.is_finite() {
                return Err(usage(format!("--delta1 must be finite, got {d1}")));
            }
            params.push(("delta1", d1.to_string()));
            for &d in &deltas {
                rows.push(vec![d, g2_analytic(&p, d1, d, 0.0)?]);
            }
        }
    }
    let table = Table { params, columns: vec!["delta", "value"], rows };
    table.emit(format, output.as_deref())?;
    Ok(0)
}

fn cmd_g2(args: G2Args, file: &FileConfig) -> CliResult<i32> {
    let omega = require_drive(pick(args.omega, file, "omega")?)?;
    let delta1 = pick(args.delta1, file, "delta1")?.unwrap_or(0.0);
    let delta2 = pick(args.delta2, file, "delta2")?.unwrap_or(0.0);
    let taus = pick_list(args.tau, file, "tau")?
        .ok_or_else(|| usage("--tau grid is required (one or more delays, units of 1/γ)"))?;
    require_finite_grid(&taus, "τ")?;
    require_finite_grid(&[delta1, delta2], "δ")?;
    if let Some(bad) = taus.iter().find(|t| **t < 0.0) {
        return Err(usage(format!("delays must be ≥ 0, got {bad}")));
    }
    let method = pick(args.method, file, "method")?.unwrap_or(MethodSel::Analytic);
    let budget = pick(args.budget, file, "budget")?;
    let seed = pick(args.seed, file, "seed")?.unwrap_or(7);
    let mc_bin_width = pick(args.mc_bin_width, file, "mc-bin-width")?.unwrap_or(0.05);
    let mc_window = pick(args.mc_window, file, "mc-window")?.unwrap_or(0.1);
    let (output, format) = resolve_output(args.out, file)?;

    let p = SystemParams::with_phi(omega, 0.0)?;
    let mut params = vec![
        ("command", "g2".into()),
        ("omega", omega.to_string()),
        ("gamma", "1".into()),
        ("delta1", delta1.to_string()),
        ("delta2", delta2.to_string()),
        ("method", method.label().into()),
    ];

    let mut columns = vec!["tau", "g2"];
    let base: Vec<f64> = match method {
        // The base g2 column is the regression-theorem value for --method
        // numeric and the closed form otherwise.
        MethodSel::Numeric => {
            let grid = g2_numeric_grid(&p, &[delta1], &[delta2], &taus)?;
            (0..taus.len()).map(|k| grid.value(0, 0, k)).collect()
        }
        _ => taus
            .iter()
            .map(|&t| g2_analytic(&p, delta1, delta2, t))
            .collect::<crate::error::Result<_>>()?,
    };
    let mut extra: Vec<Vec<f64>> = Vec::new();

    if method == MethodSel::All {
        let grid = g2_numeric_grid(&p, &[delta1], &[delta2], &taus)?;
        let numeric: Vec<f64> = (0..taus.len()).map(|k| grid.value(0, 0, k)).collect();
        let diff: Vec<f64> = base.iter().zip(&numeric).map(|(a, n)| (a - n).abs()).collect();
        columns.extend(["g2_numeric", "abs_diff"]);
        extra.push(numeric);
        extra.push(diff);
    }

    let wants_mc = method == MethodSel::Mc || (method == MethodSel::All && budget.is_some());
    if wants_mc {
        let budget = match (method, budget) {
            (MethodSel::Mc, None) => {
                return Err(usage("--method mc needs --budget (total simulated time, 1/γ)"))
            }
            (_, b) => b.expect("mc path implies a budget"),
        };
        let tau_max = taus.iter().fold(0.0f64, |a, &b| a.max(b));
        let count = ((tau_max / mc_bin_width).floor() as usize + 1).max(1);
        let bins = TauBins::new(mc_bin_width, count)?;
        let cfg = McConfig {
            window_half_width: mc_window,
            trajectory_length: 1000.0f64.max(5.0 * bins.tau_max()),
        };
        let est = estimate_g2_with(&p, &[delta1], &[delta2], &bins, budget, seed, cfg)?;
        let mut mc_vals = Vec::with_capacity(taus.len());
        let mut mc_errs = Vec::with_capacity(taus.len());
        for &t in &taus {
            let k = ((t / mc_bin_width) as usize).min(count - 1);
            let (v, e) = est.bin(0, 0, k).map_or((f64::NAN, f64::NAN), |b| (b.value, b.stderr));
            mc_vals.push(v);
            mc_errs.push(e);
        }
        columns.extend(["g2_mc", "stderr"]);
        extra.push(mc_vals);
        extra.push(mc_errs);
        params.extend([
            ("budget", budget.to_string()),
            ("seed", seed.to_string()),
            ("mc_bin_width", mc_bin_width.to_string()),
            ("mc_window_half_width", mc_window.to_string()),
            ("trajectory_length", cfg.trajectory_length.to_string()),
            ("trajectories", est.trajectories.to_string()),
        ]);
    }

    let rows: Vec<Vec<f64>> = taus
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let mut row = vec![t, base[k]];
            row.extend(extra.iter().map(|col| col[k]));
            row
        })
        .collect();
    let table = Table { params, columns, rows };
    table.emit(format, output.as_deref())?;
    Ok(0)
}

fn cmd_simulate(args: SimulateArgs, file: &FileConfig) -> CliResult<i32> {
    let omega = pick(args.omega, file, "omega")?.ok_or_else(|| usage("--omega is required"))?;
    if !omega.is_finite() || omega < 0.0 {
        return Err(usage(format!("--omega must be finite and ≥ 0, got {omega}")));
    }
    let phi = pick(args.phi, file, "phi")?.unwrap_or(0.0);
    let duration = pick(args.duration, file, "duration")?.unwrap_or(1000.0);
    let seed = pick(args.seed, file, "seed")?.unwrap_or(7);
    let output = pick(args.output, file, "output")?;

    let p = SystemParams::with_phi(omega, phi)?;
    let record = simulate_trajectory(&p, duration, seed)?;
    let mut sink: Box<dyn Write> = match &output {
        Some(path) => Box::new(io::BufWriter::new(fs::File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    write_click_record(&record, &p, &mut sink)?;
    sink.flush()?;
    Ok(0)
}

/// The uniform 201-point detection-phase grid `[0, 2π]` used by the fringe
/// figures; index 100 is exactly π.
fn figure_delta_grid() -> Vec<f64> {
    (0..=200).map(|k| TAU * k as f64 / 200.0).collect()
}

fn cmd_fig(args: FigArgs, file: &FileConfig) -> CliResult<i32> {
    let name =
        pick(args.name, file, "name")?.ok_or_else(|| usage("--name 3|4|5|6 is required"))?;
    if !(3..=6).contains(&name) {
        return Err(usage(format!("--name must be 3, 4, 5 or 6, got {name}")));
    }
    let (output, format) = resolve_output(args.out, file)?;

    let table = if name == 3 {
        let omegas: Vec<f64> = (1..=100).map(|k| 0.05 * k as f64).collect();
        Table {
            params: vec![
                ("command", "fig".into()),
                ("name", "3".into()),
                ("gamma", "1".into()),
                ("omega_grid", "0.05..5 step 0.05".into()),
                ("method", "closed-form".into()),
            ],
            columns: vec!["omega", "rho_gg", "rho_ss", "rho_aa", "rho_ee"],
            rows: steady_state_rows(&omegas, false)?,
        }
    } else {
        let p = SystemParams::with_phi(0.8, 0.0)?;
        let deltas = figure_delta_grid();
        // `None` sweeps both detectors together; `Some(δ₁)` fixes the first.
        let (desc, delta1): (&str, Option<f64>) = match name {
            4 => ("g2(delta,delta,0)", None),
            5 => ("g2(0,delta,0)", Some(0.0)),
            _ => ("g2(pi,delta,0)", Some(PI)),
        };
        let rows = deltas
            .iter()
            .map(|&d| Ok(vec![d, g2_analytic(&p, delta1.unwrap_or(d), d, 0.0)?]))
            .collect::<crate::error::Result<Vec<_>>>()?;
        Table {
            params: vec![
                ("command", "fig".into()),
                ("name", name.to_string()),
                ("omega", "0.8".into()),
                ("gamma", "1".into()),
                ("quantity", desc.into()),
                ("delta_grid", "0..2pi, 201 points".into()),
                ("method", "analytic".into()),
            ],
            columns: vec!["delta", "value"],
            rows,
        }
    };
    table.emit(format, output.as_deref())?;
    Ok(0)
}

fn cmd_check(args: CheckArgs, file: &FileConfig) -> CliResult<i32> {
    let fast = file.flag(args.fast, "fast")?;
    let budget = pick(args.budget, file, "budget")?.unwrap_or(1e7);
    let seed = pick(args.seed, file, "seed")?.unwrap_or(7);

    let results = run_suite(&SuiteConfig { fast, mc_budget: budget, mc_seed: seed });
    println!("dicke-fringe v{VERSION} acceptance suite");
    for r in &results {
        println!("{:>2} {:<4} {} — {}", r.id, r.outcome.to_string(), r.name, r.details);
    }
    let count = |o: Outcome| results.iter().filter(|r| r.outcome == o).count();
    println!(
        "result: {} passed, {} failed, {} skipped",
        count(Outcome::Pass),
        count(Outcome::Fail),
        count(Outcome::Skip)
    );
    Ok(if all_acceptable(&results) { 0 } else { 3 })
}

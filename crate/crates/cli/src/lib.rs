//! `qdc`: command-line front end for the delayed-choice simulator.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 degenerate
//! physics (zero-probability branch, degenerate α), 1 I/O failure.

pub mod manifest;
pub mod records;
pub mod settings;

use std::f64::consts::FRAC_PI_2;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use delayed_choice::experiment::{
    diagonal_postselect, exact_distribution, joint_distribution, phi_grid, postselect, sweep, Sign,
};
use delayed_choice::hv::{
    enumerate_branches, grid_search, unexplained, verdict, Setting, ANALYTIC_TOL, DEFAULT_CELL_TOL,
};
use delayed_choice::sampler::{empirical_distribution, goodness_of_fit, sample_clicks, sampled_sweep};
use delayed_choice::{Basis, ControlMode, Error, ExperimentConfig};

use manifest::{sidecar_path, RunManifest};
use records::*;

pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qdc", version, about = "Quantum delayed-choice experiment: sweeps, sampling and hidden-variable analysis")]
pub struct Cli {
    /// Read angle flags and settings files in degrees instead of radians.
    #[arg(long, global = true)]
    pub degrees: bool,
    /// Output file (default: standard output). A `<out>.manifest.json`
    /// sidecar records the command, configuration, version and time.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format: csv, structured (one JSON document) or text (verdict only).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Structured,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// D₀ interference pattern I₀(φ) for one or more α.
    Sweep(SweepArgs),
    /// Sample photon/ancilla clicks and test them against the exact statistics.
    Sample(SampleArgs),
    /// Hidden-variable analysis.
    #[command(subcommand)]
    Hv(HvCommand),
    /// Photon statistics conditioned on the ancilla outcome.
    Postselect(PostselectArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Ancilla angle α in [0, π/2]; repeat for several patterns.
    #[arg(long = "alpha", required = true, allow_negative_numbers = true)]
    pub alpha: Vec<f64>,
    /// Number of φ points over [0, 2π).
    #[arg(long, default_value_t = 256)]
    pub phi_steps: usize,
    /// Closed-form intensities (the default).
    #[arg(long, conflicts_with = "shots")]
    pub exact: bool,
    /// Estimate intensities from this many shots per φ point.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Base seed for sampled sweeps.
    #[arg(long, env = "QDC_SEED", default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Quantum,
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Computational,
    Diagonal,
}

impl From<BasisArg> for Basis {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Computational => Basis::Computational,
            BasisArg::Diagonal => Basis::Diagonal,
        }
    }
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub phi: f64,
    #[arg(long)]
    pub shots: u64,
    /// Seed of the click stream.
    #[arg(long, env = "QDC_SEED", default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Quantum)]
    pub mode: ModeArg,
    /// Ancilla measurement basis (quantum mode only for diagonal).
    #[arg(long, value_enum, default_value_t = BasisArg::Computational)]
    pub basis: BasisArg,
}

#[derive(Debug, Subcommand)]
pub enum HvCommand {
    /// List the analytic solution families at one setting.
    Enumerate(HvSettingArgs),
    /// Grid search over [0,1]^5 with each surviving cell classified.
    Search(HvSearchArgs),
    /// Multi-setting verdict from a file of `alpha,phi` lines.
    Verdict(HvVerdictArgs),
}

#[derive(Debug, Args)]
pub struct HvSettingArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub phi: f64,
    #[arg(long, default_value_t = ANALYTIC_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct HvSearchArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub phi: f64,
    /// Grid spacing: 0.05, 0.02 or 0.01.
    #[arg(long)]
    pub resolution: f64,
    /// Slack on the cell enclosures of the constraint equations.
    #[arg(long, default_value_t = DEFAULT_CELL_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct HvVerdictArgs {
    #[arg(long)]
    pub settings: PathBuf,
    #[arg(long, default_value_t = ANALYTIC_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct PostselectArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub phi: f64,
    #[arg(long, value_enum, default_value_t = BasisArg::Computational)]
    pub basis: BasisArg,
    /// 0 or 1 (computational), plus or minus (diagonal).
    #[arg(long)]
    pub outcome: String,
}

#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Degenerate(String),
    Io(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => EXIT_USAGE,
            AppError::Degenerate(_) => EXIT_DEGENERATE,
            AppError::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Usage(m) | AppError::Degenerate(m) | AppError::Io(m) => m,
        }
    }
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        match e {
            Error::Degenerate(_) => AppError::Degenerate(e.to_string()),
            Error::Config(_) | Error::Domain(_) => AppError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e.to_string())
    }
}

impl From<csv::Error> for AppError {
    fn from(e: csv::Error) -> Self {
        AppError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for AppError {
    fn from(e: serde_json::Error) -> Self {
        AppError::Io(e.to_string())
    }
}

type AppResult<T> = Result<T, AppError>;

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> AppResult<()> {
    let angle = |v: f64| if cli.degrees { v.to_radians() } else { v };
    match &cli.command {
        Command::Sweep(a) => cmd_sweep(cli, a, &angle),
        Command::Sample(a) => cmd_sample(cli, a, &angle),
        Command::Hv(HvCommand::Enumerate(a)) => cmd_enumerate(cli, a, &angle),
        Command::Hv(HvCommand::Search(a)) => cmd_search(cli, a, &angle),
        Command::Hv(HvCommand::Verdict(a)) => cmd_verdict(cli, a),
        Command::Postselect(a) => cmd_postselect(cli, a, &angle),
    }
}

/// Slack for α typed with a few decimals, e.g. 1.5708 for π/2.
pub const ALPHA_INPUT_SLACK: f64 = 1e-4;

fn check_alpha(alpha: f64) -> AppResult<()> {
    if !alpha.is_finite() || !(-ALPHA_INPUT_SLACK..=FRAC_PI_2 + ALPHA_INPUT_SLACK).contains(&alpha) {
        return Err(AppError::Usage(format!("alpha = {alpha} outside [0, pi/2]")));
    }
    Ok(())
}

fn cmd_sweep(cli: &Cli, a: &SweepArgs, angle: &dyn Fn(f64) -> f64) -> AppResult<()> {
    if a.phi_steps < 2 {
        return Err(AppError::Usage(format!("--phi-steps must be at least 2, got {}", a.phi_steps)));
    }
    let alphas: Vec<f64> = a.alpha.iter().map(|&x| angle(x)).collect();
    for &alpha in &alphas {
        check_alpha(alpha)?;
    }
    let grid = phi_grid(a.phi_steps);
    let mut rows = Vec::new();
    for &alpha in &alphas {
        let pattern = match a.shots {
            Some(shots) => sampled_sweep(alpha, &grid, shots, a.seed)?,
            None => sweep(alpha, &grid)?,
        };
        rows.extend(pattern_records(&pattern));
    }
    let config = json!({
        "alpha": alphas,
        "phi_steps": a.phi_steps,
        "shots": a.shots,
        "exact": a.shots.is_none(),
    });
    let seed = a.shots.map(|_| a.seed);
    emit_rows(cli, RunManifest::new("sweep", config, seed), &rows)
}

fn cmd_sample(cli: &Cli, a: &SampleArgs, angle: &dyn Fn(f64) -> f64) -> AppResult<()> {
    let (alpha, phi) = (angle(a.alpha), angle(a.phi));
    let mode = match a.mode {
        ModeArg::Quantum => ControlMode::QuantumControl,
        ModeArg::Classical => ControlMode::ClassicalControl,
    };
    let cfg = ExperimentConfig::new(alpha, phi, mode, a.shots, a.seed)?.with_ancilla_basis(a.basis.into())?;
    let counts = sample_clicks(&cfg)?;
    let empirical = empirical_distribution(&counts)?;
    let expected = match cfg.ancilla_basis {
        Basis::Computational => joint_distribution(alpha, phi),
        Basis::Diagonal => exact_distribution(&cfg)?,
    };
    let fit = goodness_of_fit(&counts, &expected);
    let rows = sample_records(&counts, &empirical, &expected, &fit);
    let config = serde_json::to_value(cfg)?;
    emit_rows(cli, RunManifest::new("sample", config, Some(a.seed)), &rows)
}

fn cmd_enumerate(cli: &Cli, a: &HvSettingArgs, angle: &dyn Fn(f64) -> f64) -> AppResult<()> {
    let setting = Setting::new(angle(a.alpha), angle(a.phi))?;
    if setting.has_degenerate_alpha(a.tol) {
        return Err(AppError::Degenerate(format!(
            "DegenerateAlpha: cos^2(alpha) = {} is 0 or 1, so one of v=0, f=0 or f=1, z=1 trivially solves the system; \
             such settings are excluded from the analysis",
            setting.ancilla_zero()
        )));
    }
    let rows: Vec<FamilyRecord> = enumerate_branches(&setting, a.tol)?.iter().map(family_record).collect();
    let config = json!({ "alpha": setting.alpha, "phi": setting.phi, "tol": a.tol });
    emit_rows(cli, RunManifest::new("hv enumerate", config, None), &rows)
}

fn cmd_search(cli: &Cli, a: &HvSearchArgs, angle: &dyn Fn(f64) -> f64) -> AppResult<()> {
    let setting = Setting::new(angle(a.alpha), angle(a.phi))?;
    let solutions = grid_search(&setting, a.resolution, a.tol)?;
    eprintln!("{} feasible cells, {} unexplained", solutions.len(), unexplained(&solutions));
    let rows: Vec<SolutionRecord> = solutions.iter().map(solution_record).collect();
    let config = json!({ "alpha": setting.alpha, "phi": setting.phi, "resolution": a.resolution, "tol": a.tol });
    emit_rows(cli, RunManifest::new("hv search", config, None), &rows)
}

fn cmd_verdict(cli: &Cli, a: &HvVerdictArgs) -> AppResult<()> {
    let text = fs::read_to_string(&a.settings)
        .map_err(|e| AppError::Usage(format!("cannot read {}: {e}", a.settings.display())))?;
    let settings = settings::parse_settings(&text, cli.degrees).map_err(AppError::Usage)?;
    let report = verdict(&settings, a.tol)?;
    let config = json!({ "settings": settings, "tol": a.tol });
    let manifest = RunManifest::new("hv verdict", config, None);
    let body = match cli.format.unwrap_or(Format::Text) {
        Format::Text => report.to_key_value(),
        Format::Structured => structured(&manifest, &report)?,
        Format::Csv => return Err(AppError::Usage("hv verdict writes text or structured output".into())),
    };
    write_output(cli, &manifest, body.as_bytes())
}

fn cmd_postselect(cli: &Cli, a: &PostselectArgs, angle: &dyn Fn(f64) -> f64) -> AppResult<()> {
    let (alpha, phi) = (angle(a.alpha), angle(a.phi));
    check_alpha(alpha)?;
    let record = match (a.basis, a.outcome.as_str()) {
        (BasisArg::Computational, o @ ("0" | "1")) => {
            let sel = postselect(alpha, phi, if o == "0" { 0 } else { 1 })?;
            PostselectRecord {
                alpha,
                phi,
                basis: "computational".into(),
                outcome: o.into(),
                probability: sel.probability,
                p0: sel.photon[0],
                p1: sel.photon[1],
                state: String::new(),
            }
        }
        (BasisArg::Diagonal, o @ ("plus" | "minus")) => {
            let sign = if o == "plus" { Sign::Plus } else { Sign::Minus };
            let (state, probability) = diagonal_postselect(alpha, phi, sign)?;
            let p = state.probabilities();
            let amps: Vec<String> = state.amplitudes().iter().map(|c| format!("{}{:+}i", c.re, c.im)).collect();
            PostselectRecord {
                alpha,
                phi,
                basis: "diagonal".into(),
                outcome: o.into(),
                probability,
                p0: p[0],
                p1: p[1],
                state: amps.join(";"),
            }
        }
        (basis, o) => {
            return Err(AppError::Usage(format!("outcome `{o}` does not belong to the {basis:?} basis")));
        }
    };
    let config = json!({ "alpha": alpha, "phi": phi, "basis": record.basis, "outcome": record.outcome });
    emit_rows(cli, RunManifest::new("postselect", config, None), &[record])
}

fn structured<T: Serialize>(manifest: &RunManifest, records: &T) -> AppResult<String> {
    let doc: Value = json!({ "manifest": manifest, "records": records });
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

fn emit_rows<T: Serialize>(cli: &Cli, manifest: RunManifest, rows: &[T]) -> AppResult<()> {
    let body = match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&mut buf, rows)?;
            buf
        }
        Format::Structured => structured(&manifest, &rows)?.into_bytes(),
        Format::Text => return Err(AppError::Usage("text output is only available for hv verdict".into())),
    };
    write_output(cli, &manifest, &body)
}

fn write_output(cli: &Cli, manifest: &RunManifest, body: &[u8]) -> AppResult<()> {
    match &cli.out {
        Some(path) => {
            fs::write(path, body)?;
            let mut sidecar = serde_json::to_string_pretty(&manifest.stamped())?;
            sidecar.push('\n');
            fs::write(sidecar_path(path), sidecar)?;
        }
        None => std::io::stdout().lock().write_all(body)?,
    }
    Ok(())
}

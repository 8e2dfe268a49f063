//! `spectra-lab`: batch front end for the spectra-lab library.
//!
//! Exit status: 0 success, 1 failed check or I/O error, 2 invalid input,
//! 3 numerical failure. Errors are reported on stderr as one JSON object.

mod commands;
mod output;
mod reproduce;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use spectra_lab::shape_opt::ConstraintKind;
use spectra_lab::{BcFamily, SpectraError};

use output::{out_dir, sha256_hex, write_bundle, RunManifest};

#[derive(Debug)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    pub code: u8,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError { kind: "invalid_input".into(), message: message.into(), code: 2 }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError { kind: "io".into(), message: message.into(), code: 1 }
    }
}

impl From<SpectraError> for CliError {
    fn from(e: SpectraError) -> Self {
        let code = if e.is_validation() { 2 } else { 3 };
        CliError { kind: e.kind().into(), message: e.to_string(), code }
    }
}

#[derive(Parser, Debug)]
#[command(name = "spectra-lab", version, about = "Laplace eigenvalues of cuboids and convex domains")]
struct Cli {
    /// Output directory (SPECTRA_LAB_OUT takes precedence).
    #[arg(long, global = true, default_value = "spectra-lab-out")]
    out: PathBuf,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for independent runs.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// JSON object of flag values for the subcommand; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// First k eigenvalues of a cuboid with per-axis D/N/Z conditions.
    #[command(args_override_self = true)]
    CuboidSpectrum(CuboidSpectrumArgs),
    /// Minimize the k-th eigenvalue over cuboids of a given signature.
    #[command(args_override_self = true)]
    CuboidOptimize(CuboidOptimizeArgs),
    /// Counting and eigenvalue bounds for a shape given as JSON.
    #[command(args_override_self = true)]
    BoundsCheck(BoundsCheckArgs),
    /// Threshold of 56 sqrt(2k) + 8 pi < k with the scan table.
    #[command(args_override_self = true)]
    N2Certificate(N2Args),
    /// P1 finite element eigenvalues of a planar domain.
    #[command(args_override_self = true)]
    FemSolve(FemSolveArgs),
    /// Eigenvalue minimization over cuboids, polygons or profile domains.
    #[command(args_override_self = true)]
    Optimize(OptimizeArgs),
    /// Largest area at unit perimeter among symmetric profiles with slopes bounded by L.
    #[command(args_override_self = true)]
    Isoperimetric(IsoperimetricArgs),
    /// Weyl ratios along a family of domains.
    #[command(args_override_self = true)]
    Weyl(WeylArgs),
    /// Rerun the checks behind one group of results.
    #[command(args_override_self = true)]
    Reproduce(ReproduceArgs),
}

#[derive(clap::Args, Debug, Serialize)]
pub struct CuboidSpectrumArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub sides: Vec<f64>,
    /// One code per axis (D, N or Z), or a single code for all axes.
    #[arg(long, value_delimiter = ',', default_value = "D")]
    pub bc: Vec<String>,
    #[arg(long)]
    pub k: usize,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct CuboidOptimizeArgs {
    /// Counts a,b,c of Dirichlet, Neumann and mixed axes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub signature: Vec<usize>,
    #[arg(long, required_unless_present = "ks")]
    pub k: Option<usize>,
    /// Increasing k values; writes a trajectory table.
    #[arg(long, value_delimiter = ',')]
    pub ks: Vec<usize>,
    #[arg(long, value_enum, default_value = "volume")]
    pub constraint: ConstraintArg,
    #[arg(long, default_value_t = 1.0)]
    pub value: f64,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct BoundsCheckArgs {
    #[arg(long)]
    pub shape: PathBuf,
    /// Threshold for the counting bounds.
    #[arg(long, required_unless_present = "k")]
    pub alpha: Option<f64>,
    /// Index for the eigenvalue bounds.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct N2Args {
    #[arg(long, default_value_t = 6000)]
    pub from: u64,
    #[arg(long, default_value_t = 6500)]
    pub to: u64,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct FemSolveArgs {
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long, value_enum, default_value = "dirichlet")]
    pub bc: BcArg,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub h: f64,
    /// Also solve at h/2 and h/4 and extrapolate.
    #[arg(long)]
    pub ladder: bool,
    #[arg(long)]
    pub export_mesh: bool,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct OptimizeArgs {
    #[arg(long, value_enum)]
    pub class: ClassArg,
    #[arg(long, value_delimiter = ',')]
    pub signature: Vec<usize>,
    #[arg(long)]
    pub k: usize,
    /// Defaults to volume for cuboids and perimeter otherwise.
    #[arg(long, value_enum)]
    pub constraint: Option<ConstraintArg>,
    #[arg(long, default_value_t = 1.0)]
    pub value: f64,
    /// Polygon vertex count.
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    /// Polygon boundary condition.
    #[arg(long, value_enum, default_value = "dirichlet")]
    pub bc: BcArg,
    /// Slope bound for profile domains.
    #[arg(long, default_value_t = 1.0)]
    pub lipschitz: f64,
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct IsoperimetricArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,4")]
    pub lipschitz: Vec<f64>,
    /// Profile nodes per side.
    #[arg(long, default_value_t = 128)]
    pub m: usize,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct WeylArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, value_delimiter = ',')]
    pub ks: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "dirichlet,neumann")]
    pub bc: Vec<BcArg>,
    /// Tube width for radiators.
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Component count for equal squares.
    #[arg(long, default_value_t = 4)]
    pub count: usize,
    /// Base shape for shrinking-to (JSON); defaults to the unit square.
    #[arg(long)]
    pub shape: Option<PathBuf>,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub section: Section,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintArg {
    Volume,
    Perimeter,
    Diameter,
}

impl From<ConstraintArg> for ConstraintKind {
    fn from(c: ConstraintArg) -> Self {
        match c {
            ConstraintArg::Volume => ConstraintKind::Volume,
            ConstraintArg::Perimeter => ConstraintKind::Perimeter,
            ConstraintArg::Diameter => ConstraintKind::Diameter,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BcArg {
    Dirichlet,
    Neumann,
    Zaremba,
}

impl From<BcArg> for BcFamily {
    fn from(b: BcArg) -> Self {
        match b {
            BcArg::Dirichlet => BcFamily::Dirichlet,
            BcArg::Neumann => BcFamily::Neumann,
            BcArg::Zaremba => BcFamily::Zaremba,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassArg {
    Cuboid,
    Polygon,
    Profile,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    DegenerateCuboids,
    DisjointBalls,
    ShrinkingSquares,
    Radiator,
    LogBalls,
    EqualSquares,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub enum Section {
    #[value(name = "2.3")]
    #[serde(rename = "2.3")]
    CuboidMixed,
    #[value(name = "4.1")]
    #[serde(rename = "4.1")]
    DisjointBalls,
    #[value(name = "4.2")]
    #[serde(rename = "4.2")]
    DegenerateCuboids,
    #[value(name = "5")]
    #[serde(rename = "5")]
    Threshold,
    #[value(name = "6-fig5")]
    #[serde(rename = "6-fig5")]
    Isoperimetric,
}

/// Settings shared by every command.
pub struct Ctx {
    pub seed: u64,
    pub jobs: usize,
    /// Contents of input files, folded into the config hash.
    pub inputs: Vec<u8>,
}

impl Ctx {
    pub fn read_input(&mut self, path: &std::path::Path) -> Result<String, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
        self.inputs.extend_from_slice(text.as_bytes());
        Ok(text)
    }
}

fn report(e: &CliError) -> ExitCode {
    let body = serde_json::json!({ "error": { "kind": e.kind, "message": e.message, "exit_code": e.code } });
    eprintln!("{body}");
    ExitCode::from(e.code)
}

const SUBCOMMANDS: [&str; 9] = [
    "cuboid-spectrum",
    "cuboid-optimize",
    "bounds-check",
    "n2-certificate",
    "fem-solve",
    "optimize",
    "isoperimetric",
    "weyl",
    "reproduce",
];

/// Splices the flags of a `--config` JSON object in right after the
/// subcommand name, so that explicit flags given later override them.
fn expand_config(raw: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut path = None;
    for (i, a) in raw.iter().enumerate() {
        if a == "--config" {
            path = raw.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(raw) };
    let Some(pos) = raw.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else { return Ok(raw) };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::validation(format!("config {path}: {e}")))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::validation(format!("config {path}: {e}")))?;
    let obj = value.as_object().ok_or_else(|| CliError::validation("config must be a JSON object"))?;
    let mut flags = Vec::new();
    for (key, v) in obj {
        let flag = format!("--{}", key.replace('_', "-"));
        let scalar = |v: &serde_json::Value| match v {
            serde_json::Value::String(s) => Ok(s.clone()),
            serde_json::Value::Number(n) => Ok(n.to_string()),
            _ => Err(CliError::validation(format!("config key {key}: unsupported value {v}"))),
        };
        match v {
            serde_json::Value::Bool(true) => flags.push(flag),
            serde_json::Value::Bool(false) | serde_json::Value::Null => {}
            serde_json::Value::Array(items) => {
                let parts = items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?;
                flags.push(flag);
                flags.push(parts.join(","));
            }
            other => {
                flags.push(flag);
                flags.push(scalar(other)?);
            }
        }
    }
    let mut out = raw[..=pos].to_vec();
    out.extend(flags);
    out.extend_from_slice(&raw[pos + 1..]);
    Ok(out)
}

fn parse(raw: Vec<String>) -> Result<Cli, ExitCode> {
    let argv = expand_config(raw).map_err(|e| report(&e))?;
    let matches = Cli::command().args_override_self(true).try_get_matches_from(argv);
    let result = matches.and_then(|m| Cli::from_arg_matches(&m));
    match result {
        Ok(cli) => Ok(cli),
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return Err(ExitCode::SUCCESS);
            }
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            Err(report(&CliError { kind: "usage".into(), message: first, code: 2 }))
        }
    }
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let cli = match parse(raw.clone()) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if cli.jobs == 0 {
        return report(&CliError::validation("--jobs must be at least 1"));
    }
    let start = Instant::now();
    let mut ctx = Ctx { seed: cli.seed, jobs: cli.jobs, inputs: Vec::new() };
    let bundle = match commands::run(&cli.command, &mut ctx) {
        Ok(b) => b,
        Err(e) => return report(&e),
    };
    let mut hashed = serde_json::to_vec(&cli.command).expect("command serializes");
    hashed.extend_from_slice(format!("seed={}", cli.seed).as_bytes());
    hashed.extend_from_slice(&ctx.inputs);
    let manifest = RunManifest {
        command_line: raw,
        config_hash: sha256_hex(&hashed),
        seed: cli.seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
        outputs: Vec::new(),
    };
    let dir = out_dir(&cli.out);
    let path = match write_bundle(&dir, &bundle, manifest) {
        Ok(p) => p,
        Err(e) => return report(&e),
    };
    print!("{}", bundle.summary);
    println!("manifest: {}", path.display());
    if bundle.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        for f in &bundle.failures {
            eprintln!("{}", serde_json::json!({ "failed": f }));
        }
        ExitCode::from(1)
    }
}

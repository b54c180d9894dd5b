//! `qrg` command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage errors (bad flags or an invalid
//! sweep specification), 3 for numeric or I/O failures.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qrg_coherence::analysis::{run_sweep, scaling_analysis, system_size, Grid, Model, Subsystem, SweepSpec};
use qrg_coherence::ising::{fixed_point, FIXED_POINT_TOL};
use qrg_coherence::Error;

pub mod output;
pub mod validate;

use output::{fmt_sig, rows_to_csv, write_output};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qrg", version, about = "QRG coherence sweeps, scaling fits and fixed points")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coherence of the XY block ground state versus bare anisotropy.
    XySweep(SweepArgs),
    /// Coherence of the Ising cluster ground state versus bare field.
    IsingSweep(SweepArgs),
    /// Per-step derivative peaks and the log-log fit against system size.
    Scaling(ScalingArgs),
    /// Non-trivial fixed point of the Ising field recursion and its exponent.
    FixedPoint(FixedPointArgs),
    /// Closed-form versus numeric consistency checks.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Xy,
    Ising,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Xy => Model::Xy,
            ModelArg::Ising => Model::Ising,
        }
    }
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Worker threads, 0 picks the number of cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Comma-separated RG steps.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    pub steps: Vec<usize>,
    /// `MIN:MAX:POINTS`; defaults to the model grid.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub grid: Option<Grid>,
    /// `all` or comma-separated 1-based sites (center = 1); repeatable.
    #[arg(long = "subsystem", value_parser = parse_subsystem)]
    pub subsystems: Vec<Subsystem>,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Comma-separated RG steps; defaults to 1-4 for xy and 1-5 for ising.
    #[arg(long, value_delimiter = ',')]
    pub steps: Vec<usize>,
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub grid: Option<Grid>,
    #[arg(long, value_parser = parse_subsystem, default_value = "all")]
    pub subsystem: Subsystem,
}

#[derive(Debug, Args)]
pub struct FixedPointArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Bisection bracket `LO:HI`.
    #[arg(long, value_parser = parse_bracket, default_value = "1:3", allow_hyphen_values = true)]
    pub bracket: (f64, f64),
    /// Largest accepted |g'(g_c) - g_c|.
    #[arg(long, value_parser = parse_tol, default_value_t = FIXED_POINT_TOL, allow_hyphen_values = true)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of anisotropy values in [1e-3, 1].
    #[arg(long, default_value_t = 50)]
    pub gamma_grid: usize,
    #[arg(long, value_parser = parse_tol, default_value_t = 1e-8, allow_hyphen_values = true)]
    pub tol: f64,
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [min, max, points] = parts.as_slice() else {
        return Err(format!("expected MIN:MAX:POINTS, got `{s}`"));
    };
    let min: f64 = min.trim().parse().map_err(|_| format!("bad grid minimum `{min}`"))?;
    let max: f64 = max.trim().parse().map_err(|_| format!("bad grid maximum `{max}`"))?;
    let points: usize = points.trim().parse().map_err(|_| format!("bad point count `{points}`"))?;
    Grid::new(min, max, points).map_err(|e| e.to_string())
}

fn parse_subsystem(s: &str) -> Result<Subsystem, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_bracket(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got `{s}`"))?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad bracket bound `{lo}`"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad bracket bound `{hi}`"))?;
    if !(lo.is_finite() && hi.is_finite()) || lo == hi {
        return Err(format!("degenerate bracket `{s}`"));
    }
    Ok((lo, hi))
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let t: f64 = s.trim().parse().map_err(|_| format!("bad tolerance `{s}`"))?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(format!("tolerance must be positive, got {s}"));
    }
    Ok(t)
}

/// Failure of a subcommand, already mapped to its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidSpec(_) | Error::InvalidSite { .. } => EXIT_USAGE,
            _ => EXIT_NUMERIC,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: EXIT_NUMERIC, message: format!("i/o error: {e}") }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure { code: EXIT_NUMERIC, message: format!("serialization error: {e}") }
    }
}

/// Parses `args` (program name first) and runs the selected command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn execute(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::XySweep(a) => cmd_sweep(Model::Xy, a),
        Command::IsingSweep(a) => cmd_sweep(Model::Ising, a),
        Command::Scaling(a) => cmd_scaling(a),
        Command::FixedPoint(a) => cmd_fixed_point(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure { code: EXIT_NUMERIC, message: format!("thread pool: {e}") })?;
    Ok(pool.install(f))
}

fn cmd_sweep(model: Model, a: SweepArgs) -> Result<i32, Failure> {
    let subsystems = if a.subsystems.is_empty() { vec![Subsystem::All] } else { a.subsystems };
    let spec = SweepSpec::new(model, a.grid.unwrap_or(model.default_grid()), a.steps, subsystems);
    spec.validate()?;
    let rows = in_pool(a.common.threads, || run_sweep(&spec))??;
    let text = match a.format {
        Format::Csv => rows_to_csv(&rows),
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
    };
    write_output(a.common.output.as_deref(), &text)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct StepPeak {
    n: usize,
    #[serde(rename = "N")]
    size: u64,
    x_max: f64,
    f_max: f64,
}

#[derive(Debug, Serialize)]
struct ScalingReport {
    model: Model,
    subsystem: Subsystem,
    steps: Vec<StepPeak>,
    theta: f64,
    intercept: f64,
    r_squared: f64,
    nu_from_theta: f64,
}

fn cmd_scaling(a: ScalingArgs) -> Result<i32, Failure> {
    let model = Model::from(a.model);
    let steps = if a.steps.is_empty() {
        match model {
            Model::Xy => vec![1, 2, 3, 4],
            Model::Ising => vec![1, 2, 3, 4, 5],
        }
    } else {
        a.steps
    };
    if steps.len() < 3 {
        return Err(Failure {
            code: EXIT_USAGE,
            message: format!("scaling needs at least 3 steps, got {}", steps.len()),
        });
    }
    let grid = a.grid.unwrap_or(model.default_grid());
    SweepSpec::new(model, grid, steps.clone(), vec![a.subsystem.clone()]).validate()?;
    let (peaks, fit) = in_pool(a.common.threads, || scaling_analysis(model, grid, &steps, &a.subsystem))??;
    let report = ScalingReport {
        model,
        subsystem: a.subsystem,
        steps: peaks
            .iter()
            .map(|p| StepPeak { n: p.rg_step, size: system_size(model, p.rg_step), x_max: p.x_max, f_max: p.f_max })
            .collect(),
        theta: fit.theta,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        nu_from_theta: fit.nu_from_theta,
    };
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Csv => {
            let mut s = String::from("n,N,x_max,f_max\n");
            for p in &report.steps {
                s += &format!("{},{},{},{}\n", p.n, p.size, fmt_sig(p.x_max), fmt_sig(p.f_max));
            }
            s
        }
    };
    write_output(a.common.output.as_deref(), &text)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct FixedPointReport {
    g_c: f64,
    residual: f64,
    nu: f64,
}

fn cmd_fixed_point(a: FixedPointArgs) -> Result<i32, Failure> {
    let (lo, hi) = a.bracket;
    let fp = fixed_point(lo, hi)?;
    if fp.residual > a.tol {
        return Err(Failure {
            code: EXIT_NUMERIC,
            message: format!("residual {:.3e} at g = {} exceeds tolerance {:.1e}", fp.residual, fp.g_c, a.tol),
        });
    }
    let report = FixedPointReport { g_c: fp.g_c, residual: fp.residual, nu: fp.nu };
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Csv => format!("g_c,residual,nu\n{},{},{}\n", fmt_sig(fp.g_c), fmt_sig(fp.residual), fmt_sig(fp.nu)),
    };
    write_output(a.common.output.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn cmd_validate(a: ValidateArgs) -> Result<i32, Failure> {
    if a.gamma_grid == 0 {
        return Err(Failure { code: EXIT_USAGE, message: "--gamma-grid must be at least 1".into() });
    }
    let checks = in_pool(a.common.threads, || validate::run_checks(a.gamma_grid, a.tol))??;
    let mut text = String::new();
    for c in &checks {
        text += &format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    text += &format!("{} of {} checks passed\n", checks.len() - failed, checks.len());
    write_output(a.common.output.as_deref(), &text)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_NUMERIC })
}

//! Command-line front end behind the `scanstat` binary.
//!
//! Exit codes: 0 on success, 2 for malformed flags (the message names the
//! flag), 3 for numeric-domain failures (the message carries the error name).

use crate::error::Error;
use crate::expfamily::FamilySpec;
use crate::fixed_window::{
    lambda_bernoulli_reduced, lambda_corollary_max_support, lambda_dembo_karlin, lambda_fixed,
    ApproxMethod, ApproxResult, ScanConfig,
};
use crate::simulate::{self, SimConfig, SimResult, SimTarget};
use crate::varying_window::{
    lambda_closed_form_max_up_one, lambda_closed_form_min_down_one, lambda_cusum, CusumConfig,
    LatticeWalkSpec,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::time::Instant;

#[derive(Debug, Parser)]
#[command(
    name = "scanstat",
    version,
    about = "Tail approximations for scan statistics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Poisson-approximation λ and p = 1 - e^{-λ}.
    #[command(subcommand)]
    Approx(ApproxCommand),
    /// Seeded Monte Carlo estimate.
    #[command(subcommand)]
    Simulate(SimCommand),
    /// Regenerate one of the reference tables as CSV.
    Reproduce(ReproduceArgs),
    /// Approximation and simulation side by side.
    #[command(subcommand)]
    Compare(SimCommand),
}

#[derive(Debug, Subcommand)]
pub enum ApproxCommand {
    /// Fixed-window scan statistic M_{n;t}.
    Fixed(FixedArgs),
    /// Varying-window (cusum-type) statistic.
    Cusum(CusumArgs),
}

#[derive(Debug, Subcommand)]
pub enum SimCommand {
    Fixed {
        #[command(flatten)]
        stat: FixedArgs,
        #[command(flatten)]
        sim: SimArgs,
    },
    Cusum {
        #[command(flatten)]
        stat: CusumArgs,
        #[command(flatten)]
        sim: SimArgs,
    },
}

#[derive(Debug, Args)]
pub struct FixedArgs {
    /// normal:mu=<f> | bernoulli:mu=<f> | poisson:mu=<f> | walk:p=<f> | pmf:<csv>
    #[arg(long, value_parser = parse_family)]
    pub family: FamilySpec,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub t: u64,
    /// Threshold per step; accepts rationals such as 11/30.
    #[arg(long, value_parser = parse_rational)]
    pub a: f64,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CusumArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: FamilySpec,
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_parser = parse_rational)]
    pub b: f64,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(long, default_value_t = 10_000)]
    pub reps: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Defaults to the machine's available parallelism.
    #[arg(long, env = "SCANSTAT_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub table: TableId,
    #[arg(long, default_value_t = 10_000)]
    pub reps: u64,
    /// Row i is simulated with seed + i.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, env = "SCANSTAT_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Series,
    Integral,
    Closed,
    DemboKarlin,
    Corollary,
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableId {
    Table1,
    Table2,
}

/// One line of command output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: Vec<String>,
    pub config: SimTarget,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approximation: Option<ApproxResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimResult>,
    pub wall_time_ms: f64,
}

#[derive(Debug)]
pub enum CliError {
    Usage { flag: String, message: String },
    Numeric(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    fn usage(flag: &str, message: impl Into<String>) -> Self {
        CliError::Usage {
            flag: flag.to_string(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage { flag, message } => write!(f, "invalid --{flag}: {message}"),
            CliError::Numeric(e) => write!(f, "{}: {e}", e.name()),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match &e {
            Error::InvalidParameter { name, reason } => CliError::usage(name, reason.clone()),
            Error::DegenerateWindow { .. } => CliError::usage("t", e.to_string()),
            _ => CliError::Numeric(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run_from_args<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let echo: Vec<String> = args
        .iter()
        .skip(1)
        .map(|s| s.to_string_lossy().into_owned())
        .collect();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 2;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    match execute(cli.command, echo, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command, echo: Vec<String>, out: &mut impl Write) -> Result<(), CliError> {
    match command {
        Command::Approx(ApproxCommand::Fixed(args)) => {
            let start = Instant::now();
            let config = fixed_config(&args)?;
            let approx = approx_fixed(&config, args.method)?;
            let record = finish(
                echo,
                SimTarget::FixedScan(config),
                Some(approx),
                None,
                start,
            );
            emit(out, &record, args.format)
        }
        Command::Approx(ApproxCommand::Cusum(args)) => {
            let start = Instant::now();
            let config = cusum_config(&args)?;
            let approx = approx_cusum(&config, args.method)?;
            let record = finish(echo, SimTarget::Cusum(config), Some(approx), None, start);
            emit(out, &record, args.format)
        }
        Command::Simulate(sub) => run_sim(sub, echo, out, false),
        Command::Compare(sub) => run_sim(sub, echo, out, true),
        Command::Reproduce(args) => reproduce(&args, out),
    }
}

fn run_sim(
    sub: SimCommand,
    echo: Vec<String>,
    out: &mut impl Write,
    with_approx: bool,
) -> Result<(), CliError> {
    let start = Instant::now();
    let (target, method, sim, format) = match sub {
        SimCommand::Fixed { stat, sim } => (
            SimTarget::FixedScan(fixed_config(&stat)?),
            stat.method,
            sim,
            stat.format,
        ),
        SimCommand::Cusum { stat, sim } => (
            SimTarget::Cusum(cusum_config(&stat)?),
            stat.method,
            sim,
            stat.format,
        ),
    };
    let approx = if with_approx {
        Some(match &target {
            SimTarget::FixedScan(c) => approx_fixed(c, method)?,
            SimTarget::Cusum(c) => approx_cusum(c, method)?,
        })
    } else {
        None
    };
    let config = SimConfig {
        target,
        reps: sim.reps,
        seed: sim.seed,
        workers: resolve_workers(sim.workers)?,
    };
    let result = simulate::run(&config)?;
    let record = finish(echo, config.target, approx, Some(result), start);
    emit(out, &record, format)
}

fn finish(
    command: Vec<String>,
    config: SimTarget,
    approximation: Option<ApproxResult>,
    simulation: Option<SimResult>,
    start: Instant,
) -> OutputRecord {
    OutputRecord {
        command,
        config,
        approximation,
        simulation,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn fixed_config(args: &FixedArgs) -> Result<ScanConfig, CliError> {
    Ok(ScanConfig::new(
        args.family.clone(),
        args.n,
        args.t,
        args.a,
    )?)
}

fn cusum_config(args: &CusumArgs) -> Result<CusumConfig, CliError> {
    Ok(CusumConfig::new(args.family.clone(), args.n, args.b)?)
}

fn resolve_workers(requested: Option<usize>) -> Result<usize, CliError> {
    match requested {
        Some(0) => Err(CliError::usage("workers", "must be at least 1")),
        Some(w) => Ok(w),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn approx_fixed(
    config: &ScanConfig,
    method: Option<MethodArg>,
) -> Result<ApproxResult, CliError> {
    let spitzer_method = |m| Ok(lambda_fixed(config, m)?);
    match method {
        None => spitzer_method(ApproxMethod::default_for(&config.family)),
        Some(MethodArg::Series) => spitzer_method(ApproxMethod::Series),
        Some(MethodArg::Integral) => spitzer_method(ApproxMethod::Integral),
        Some(MethodArg::Closed) => {
            if !matches!(config.family, FamilySpec::Normal { .. }) {
                return Err(CliError::usage(
                    "method",
                    "closed applies to normal families only for the fixed window",
                ));
            }
            spitzer_method(ApproxMethod::ClosedForm)
        }
        Some(MethodArg::DemboKarlin) => Ok(lambda_dembo_karlin(config)?),
        Some(MethodArg::Corollary) => {
            if config.tilt.is_some() {
                return Err(CliError::usage(
                    "a",
                    "corollary needs a equal to the largest support point",
                ));
            }
            Ok(lambda_corollary_max_support(
                &config.family,
                config.n,
                config.t,
            )?)
        }
        Some(MethodArg::Reduced) => {
            if !matches!(config.family, FamilySpec::Bernoulli { .. }) {
                return Err(CliError::usage(
                    "method",
                    "reduced applies to bernoulli only",
                ));
            }
            Ok(lambda_bernoulli_reduced(config)?)
        }
    }
}

pub fn approx_cusum(
    config: &CusumConfig,
    method: Option<MethodArg>,
) -> Result<ApproxResult, CliError> {
    match method {
        None | Some(MethodArg::Series) => Ok(lambda_cusum(config, ApproxMethod::Series)?),
        Some(MethodArg::Integral) => Ok(lambda_cusum(config, ApproxMethod::Integral)?),
        Some(MethodArg::Closed) => {
            if let FamilySpec::Normal { .. } = config.family {
                return Ok(lambda_cusum(config, ApproxMethod::ClosedForm)?);
            }
            let walk = LatticeWalkSpec::from_family(&config.family)?;
            let b = config.b as i64;
            if walk.max_up() == 1 {
                Ok(lambda_closed_form_max_up_one(&walk, config.n, b)?)
            } else if walk.max_down() == 1 {
                Ok(lambda_closed_form_min_down_one(&walk, config.n, b)?)
            } else {
                Err(CliError::Numeric(Error::WrongSupportShape(
                    "closed forms need up-steps or down-steps of at most 1",
                )))
            }
        }
        Some(other) => Err(CliError::usage(
            "method",
            format!("{other:?} is not defined for the varying window"),
        )),
    }
}

fn emit(out: &mut impl Write, record: &OutputRecord, format: Format) -> Result<(), CliError> {
    match format {
        Format::Json => {
            let line = serde_json::to_string(record).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(out, "{line}")?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.serialize(FlatRecord::from(record))?;
            w.flush()?;
        }
    }
    Ok(())
}

/// Flat projection of [`OutputRecord`] for `--format csv`.
#[derive(Debug, Serialize)]
struct FlatRecord {
    statistic: &'static str,
    family: String,
    n: u64,
    t: Option<u64>,
    a: Option<f64>,
    b: Option<f64>,
    lambda: Option<f64>,
    p: Option<f64>,
    method: Option<String>,
    rate_term: Option<f64>,
    spitzer_method: Option<String>,
    spitzer_value: Option<f64>,
    estimate: Option<f64>,
    ci_lo: Option<f64>,
    ci_hi: Option<f64>,
    reps: Option<u64>,
    seed: Option<u64>,
    wall_time_ms: f64,
}

impl From<&OutputRecord> for FlatRecord {
    fn from(r: &OutputRecord) -> Self {
        let (statistic, family, n, t, a, b) = match &r.config {
            SimTarget::FixedScan(c) => ("fixed", &c.family, c.n, Some(c.t), Some(c.a), None),
            SimTarget::Cusum(c) => ("cusum", &c.family, c.n, None, None, Some(c.b)),
        };
        let ap = r.approximation.as_ref();
        let sp = ap.and_then(|x| x.spitzer.as_ref());
        let sim = r.simulation.as_ref();
        FlatRecord {
            statistic,
            family: family_label(family),
            n,
            t,
            a,
            b,
            lambda: ap.map(|x| x.lambda),
            p: ap.map(|x| x.p),
            method: ap.map(|x| x.method.clone()),
            rate_term: ap.and_then(|x| x.rate_term),
            spitzer_method: sp.map(|s| {
                serde_json::to_value(s.method)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default()
            }),
            spitzer_value: sp.map(|s| s.value),
            estimate: sim.map(|s| s.estimate),
            ci_lo: sim.map(|s| s.ci95.0),
            ci_hi: sim.map(|s| s.ci95.1),
            reps: sim.map(|s| s.reps),
            seed: sim.map(|s| s.seed),
            wall_time_ms: r.wall_time_ms,
        }
    }
}

/// Renders a family in the `--family` grammar (tables inline as `k=p;...`).
pub fn family_label(family: &FamilySpec) -> String {
    match family {
        FamilySpec::Normal { mean } => format!("normal:mu={mean}"),
        FamilySpec::Bernoulli { mean } => format!("bernoulli:mu={mean}"),
        FamilySpec::Poisson { mean } => format!("poisson:mu={mean}"),
        FamilySpec::SimpleWalk { p } => format!("walk:p={p}"),
        FamilySpec::Table { pmf } => {
            let atoms: Vec<String> = pmf.atoms().map(|(k, p)| format!("{k}={p}")).collect();
            format!("pmf:{}", atoms.join(";"))
        }
    }
}

/// Parses a decimal or a ratio `p/q`.
pub fn parse_rational(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator in {s:?}"))?;
            let den: f64 = den
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in {s:?}"))?;
            if den == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            num / den
        }
        None => s.parse().map_err(|_| format!("not a number: {s:?}"))?,
    };
    if !value.is_finite() {
        return Err(format!("not finite: {s:?}"));
    }
    Ok(value)
}

/// Parses the `--family` grammar.
pub fn parse_family(s: &str) -> Result<FamilySpec, String> {
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| format!("expected <kind>:<params>, got {s:?}"))?;
    let param = |key: &str| -> Result<f64, String> {
        let (k, v) = rest
            .split_once('=')
            .ok_or_else(|| format!("expected {key}=<value> in {s:?}"))?;
        if k.trim() != key {
            return Err(format!("expected parameter {key}, got {k:?}"));
        }
        parse_rational(v)
    };
    let family = match kind.trim() {
        "normal" => FamilySpec::normal(param("mu")?),
        "bernoulli" => FamilySpec::bernoulli(param("mu")?),
        "poisson" => FamilySpec::poisson(param("mu")?),
        "walk" => FamilySpec::simple_walk(param("p")?),
        "pmf" => FamilySpec::table(&read_pmf_csv(rest)?),
        other => return Err(format!("unknown family kind {other:?}")),
    };
    family.map_err(|e| e.to_string())
}

/// Reads `(integer support, probability)` rows; a non-numeric first row is
/// treated as a header.
pub fn read_pmf_csv(path: &str) -> Result<Vec<(i64, f64)>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| format!("{path}: {e}"))?;
    let mut pairs = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| format!("{path}: {e}"))?;
        if row.len() != 2 {
            return Err(format!("{path}: row {} has {} columns", i + 1, row.len()));
        }
        let k = row[0].parse::<i64>();
        if i == 0 && k.is_err() {
            continue;
        }
        let k = k.map_err(|_| format!("{path}: row {}: bad support value", i + 1))?;
        let p = parse_rational(&row[1]).map_err(|e| format!("{path}: row {}: {e}", i + 1))?;
        pairs.push((k, p));
    }
    Ok(pairs)
}

/// One row of a reproduced table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: u64,
    pub t: u64,
    pub mu0: f64,
    pub a: f64,
    pub p1: f64,
    pub p2: f64,
    pub seed: u64,
}

/// `(n, t, μ₀, a)` rows of the two reference tables.
pub fn table_configs(table: TableId) -> Vec<(u64, u64, f64, f64)> {
    match table {
        TableId::Table1 => vec![
            (1000, 50, 0.0, 0.2),
            (1000, 50, 0.0, 0.4),
            (1000, 50, 0.0, 0.5),
            (2000, 50, 0.0, 0.5),
        ],
        TableId::Table2 => vec![
            (7680, 30, 0.1, 11.0 / 30.0),
            (7680, 30, 0.1, 0.4),
            (15360, 30, 0.1, 0.4),
        ],
    }
}

pub fn table_scan_config(table: TableId, row: (u64, u64, f64, f64)) -> crate::Result<ScanConfig> {
    let (n, t, mu0, a) = row;
    let family = match table {
        TableId::Table1 => FamilySpec::normal(mu0)?,
        TableId::Table2 => FamilySpec::bernoulli(mu0)?,
    };
    ScanConfig::new(family, n, t, a)
}

/// Computes every row: p₁ from the approximation (closed-form ν for the
/// Normal table, exact series for the Bernoulli one) and p₂ from a fresh
/// simulation seeded with `seed + row`.
pub fn reproduce_table(
    table: TableId,
    reps: u64,
    seed: u64,
    workers: usize,
) -> crate::Result<Vec<TableRow>> {
    let method = match table {
        TableId::Table1 => ApproxMethod::ClosedForm,
        TableId::Table2 => ApproxMethod::Series,
    };
    table_configs(table)
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let config = table_scan_config(table, row)?;
            let p1 = lambda_fixed(&config, method)?.p;
            let row_seed = seed + i as u64;
            let sim = simulate::run(&SimConfig {
                target: SimTarget::FixedScan(config),
                reps,
                seed: row_seed,
                workers,
            })?;
            Ok(TableRow {
                n: row.0,
                t: row.1,
                mu0: row.2,
                a: row.3,
                p1,
                p2: sim.estimate,
                seed: row_seed,
            })
        })
        .collect()
}

fn reproduce(args: &ReproduceArgs, out: &mut impl Write) -> Result<(), CliError> {
    if args.reps == 0 {
        return Err(CliError::usage("reps", "must be at least 1"));
    }
    let rows = reproduce_table(
        args.table,
        args.reps,
        args.seed,
        resolve_workers(args.workers)?,
    )?;
    let mut w = csv::Writer::from_writer(out);
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

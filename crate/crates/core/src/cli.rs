//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on validation failure or I/O error, 2 on
//! argument errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{Map, Value};

use crate::edgeworth::{curve, EdgeworthModel};
use crate::error::Error;
use crate::levy::{compensated_unit_jump, gamma_subordinator, poisson_subordinator, ProcessSpec};
use crate::moments::{cumulants_from_stirling, sweep};
use crate::oracle::{suite, uniform_fn_exact, McConfig, ValidationReport};
use crate::randomvars::{
    centered, hat_transform, moments_of, standardized, tilde_transform, DistSpec, MomentSeq,
};
use crate::scalar::{parse_rational, ratio_to_f64, Cq, Mode};
use crate::stirling::psn_egf;

#[derive(Parser, Debug)]
#[command(name = "pstirling", version, about = "Probabilistic Stirling numbers, sum moments, cumulants and Edgeworth expansions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Table of S_Y(j,m), 0 <= m <= j <= jmax
    Stirling {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long)]
        jmax: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// E S_n^j for the given n and j = 0..=jmax
    Moments {
        #[command(flatten)]
        dist: DistArgs,
        /// single value, a:b range or comma list
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        jmax: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Cumulants k_1..k_jmax
    Cumulants {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long)]
        jmax: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// g_j(t) for centered Levy processes, h_j(t) for centered subordinators
    Levy {
        /// poisson | gamma | compensated (or give a process in --config)
        #[arg(long)]
        process: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// rational or comma list of rationals
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        #[arg(long)]
        jmax: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Edgeworth approximation of P(S_n/sqrt(n) <= y) on a grid
    Edgeworth {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long)]
        n: Option<String>,
        #[arg(long = "K")]
        k_max: Option<usize>,
        /// start:stop:step
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run validation checks; exit 0 iff all pass
    Validate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// stirling | moments | cumulants | levy | edgeworth | mc | all
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug, Default)]
struct DistArgs {
    /// point_mass | rademacher | bernoulli | uniform_std | poisson | exponential | gamma | normal | custom
    #[arg(long)]
    dist: Option<String>,
    /// JSON file with a distribution and/or option values
    #[arg(long)]
    config: Option<PathBuf>,
    /// point mass location (default 1)
    #[arg(long)]
    c: Option<String>,
    /// Bernoulli success probability (default 1/2)
    #[arg(long)]
    p: Option<String>,
    /// Poisson rate (default 1)
    #[arg(long)]
    lambda: Option<String>,
    /// gamma shape (default 1)
    #[arg(long)]
    shape: Option<String>,
    /// normal variance (default 1)
    #[arg(long)]
    variance: Option<String>,
    /// comma list of moments mu_0,mu_1,... for custom
    #[arg(long)]
    moments: Option<String>,
    #[arg(long, value_enum)]
    transform: Option<Transform>,
}

#[derive(Args, Debug, Default)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Transform {
    Hat,
    Tilde,
    Centered,
    Standardized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Validation(usize, usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Runs with the process arguments and standard streams.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with_io<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Validation(failed, total)) => {
            let _ = writeln!(err, "validation failed: {failed} of {total} checks");
            1
        }
    }
}

/// Values read from a `--config` file.
#[derive(Default)]
struct FileConfig {
    dist: Option<DistSpec>,
    process: Option<ProcessSpec>,
    transform: Option<Transform>,
    jmax: Option<usize>,
    n: Option<String>,
    k_max: Option<usize>,
    t: Option<String>,
    grid: Option<String>,
    mode: Option<ModeArg>,
    format: Option<Format>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    samples: Option<usize>,
    suite: Option<String>,
}

const DIST_KEYS: [&str; 7] = ["dist", "c", "p", "lambda", "shape", "variance", "moments"];
const PROCESS_KEYS: [&str; 5] = ["sigma2", "kappa2", "u_moments", "tau2", "tstar_moments"];
const OPTION_KEYS: [&str; 12] = [
    "transform", "jmax", "n", "K", "t", "grid", "mode", "format", "out", "seed", "samples", "suite",
];

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn load_config(path: Option<&PathBuf>) -> CliResult<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))?;
    let Value::Object(map) = value else {
        return Err(usage("config must be a JSON object"));
    };
    for key in map.keys() {
        let known = DIST_KEYS.contains(&key.as_str())
            || PROCESS_KEYS.contains(&key.as_str())
            || OPTION_KEYS.contains(&key.as_str());
        if !known {
            return Err(usage(format!("unknown config key '{key}'")));
        }
    }
    let pick = |keys: &[&str]| -> Map<String, Value> {
        map.iter()
            .filter(|(k, _)| keys.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    };
    let mut cfg = FileConfig::default();
    let dist_part = pick(&DIST_KEYS);
    if !dist_part.is_empty() {
        let spec: DistSpec = serde_json::from_value(Value::Object(dist_part))
            .map_err(|e| usage(format!("config distribution: {e}")))?;
        spec.validate()?;
        cfg.dist = Some(spec);
    }
    let process_part = pick(&PROCESS_KEYS);
    if !process_part.is_empty() {
        cfg.process = Some(ProcessSpec::from_value(Value::Object(process_part))?);
    }
    let text_of = |key: &str| -> CliResult<Option<String>> {
        match map.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(Value::Number(n)) => Ok(Some(n.to_string())),
            Some(Value::Array(items)) => {
                let parts: Vec<String> = items
                    .iter()
                    .map(|v| match v {
                        Value::String(s) => Ok(s.clone()),
                        Value::Number(n) => Ok(n.to_string()),
                        _ => Err(usage(format!("config key '{key}' has an invalid list item"))),
                    })
                    .collect::<CliResult<_>>()?;
                Ok(Some(parts.join(",")))
            }
            Some(_) => Err(usage(format!("config key '{key}' has an invalid value"))),
        }
    };
    let int_of = |key: &str| -> CliResult<Option<u64>> {
        match map.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_u64()
                .map(Some)
                .ok_or_else(|| usage(format!("config key '{key}' must be a non-negative integer"))),
        }
    };
    let enum_of = |key: &str| -> CliResult<Option<String>> { text_of(key) };
    cfg.jmax = int_of("jmax")?.map(|v| v as usize);
    cfg.k_max = int_of("K")?.map(|v| v as usize);
    cfg.seed = int_of("seed")?;
    cfg.samples = int_of("samples")?.map(|v| v as usize);
    cfg.n = text_of("n")?;
    cfg.t = text_of("t")?;
    cfg.grid = text_of("grid")?;
    cfg.suite = text_of("suite")?;
    cfg.out = text_of("out")?.map(PathBuf::from);
    cfg.transform = enum_of("transform")?.map(|s| parse_value_enum::<Transform>(&s, "transform")).transpose()?;
    cfg.mode = enum_of("mode")?.map(|s| parse_value_enum::<ModeArg>(&s, "mode")).transpose()?;
    cfg.format = enum_of("format")?.map(|s| parse_value_enum::<Format>(&s, "format")).transpose()?;
    Ok(cfg)
}

fn parse_value_enum<T: ValueEnum>(s: &str, key: &str) -> CliResult<T> {
    T::from_str(s, true).map_err(|_| usage(format!("invalid value '{s}' for config key '{key}'")))
}

fn rational_flag(value: &Option<String>, default: i64, name: &str) -> CliResult<BigRational> {
    match value {
        None => Ok(BigRational::from_integer(default.into())),
        Some(s) => parse_rational(s).map_err(|e| usage(format!("--{name}: {e}"))),
    }
}

fn dist_from_flags(args: &DistArgs, name: &str) -> CliResult<DistSpec> {
    let spec = match name.to_ascii_lowercase().replace('-', "_").as_str() {
        "point_mass" | "pointmass" => DistSpec::point_mass(rational_flag(&args.c, 1, "c")?),
        "rademacher" => DistSpec::Rademacher,
        "bernoulli" => DistSpec::bernoulli(match &args.p {
            None => BigRational::new(1.into(), 2.into()),
            Some(s) => parse_rational(s).map_err(|e| usage(format!("--p: {e}")))?,
        }),
        "uniform_std" | "uniform" => DistSpec::UniformStd,
        "poisson" => DistSpec::poisson(rational_flag(&args.lambda, 1, "lambda")?),
        "exponential" => DistSpec::Exponential,
        "gamma" => DistSpec::gamma(rational_flag(&args.shape, 1, "shape")?),
        "normal" => DistSpec::normal(rational_flag(&args.variance, 1, "variance")?),
        "custom" => {
            let list = args.moments.as_ref().ok_or_else(|| usage("--dist custom needs --moments"))?;
            let moments = list
                .split(',')
                .map(|s| parse_rational(s.trim()).map(Cq::real))
                .collect::<crate::Result<Vec<_>>>()?;
            DistSpec::Custom { moments }
        }
        other => return Err(usage(format!("unknown distribution '{other}'"))),
    };
    spec.validate()?;
    Ok(spec)
}

/// The distribution and transform, with flags taking precedence.
fn resolve_dist(args: &DistArgs, file: &FileConfig) -> CliResult<(DistSpec, Option<Transform>)> {
    let spec = match (&args.dist, &file.dist) {
        (Some(_), Some(_)) => return Err(usage("distribution given both by --dist and in --config")),
        (Some(name), None) => dist_from_flags(args, name)?,
        (None, Some(spec)) => spec.clone(),
        (None, None) => return Err(usage("a distribution is required (--dist or --config)")),
    };
    Ok((spec, args.transform.or(file.transform)))
}

/// Moments through `order` after the transform.
fn load_moments(spec: &DistSpec, transform: Option<Transform>, order: usize) -> CliResult<MomentSeq> {
    let raw_order = if transform == Some(Transform::Tilde) { order + 2 } else { order };
    let m = moments_of(spec, raw_order)?;
    Ok(match transform {
        None => m,
        Some(Transform::Hat) => hat_transform(&m),
        Some(Transform::Tilde) => tilde_transform(&m)?,
        Some(Transform::Centered) => centered(&m),
        Some(Transform::Standardized) => standardized(&m)?,
    })
}

#[derive(Clone, Debug)]
enum Cell {
    Int(u64),
    Text(String),
    Float(f64),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Float(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map(Value::Number).unwrap_or(Value::Null),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
        }
    }
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut text = self.header.join(",");
                text.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    text.push_str(&cells.join(","));
                    text.push('\n');
                }
                text
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        Value::Object(
                            self.header
                                .iter()
                                .zip(row)
                                .map(|(h, c)| (h.to_string(), c.json()))
                                .collect(),
                        )
                    })
                    .collect();
                let mut text = serde_json::to_string_pretty(&Value::Array(rows)).expect("serializable");
                text.push('\n');
                text
            }
        }
    }
}

fn rational_cell(q: &BigRational, mode: Mode) -> Cell {
    match mode {
        Mode::Exact => Cell::Text(q.to_string()),
        Mode::Float => Cell::Float(ratio_to_f64(q)),
    }
}

fn scalar_cell(z: &Cq, mode: Mode) -> Cell {
    match mode {
        Mode::Exact => Cell::Text(z.to_string()),
        Mode::Float if z.is_real() => Cell::Float(ratio_to_f64(&z.re)),
        Mode::Float => {
            let f = z.to_complex64();
            Cell::Text(format!("{}{:+}i", f.re, f.im))
        }
    }
}

struct Output {
    format: Format,
    mode: Mode,
    path: Option<PathBuf>,
}

fn resolve_output(args: &OutputArgs, file: &FileConfig, default_format: Format) -> Output {
    let mode = match args.mode.or(file.mode) {
        Some(ModeArg::Float) => Mode::Float,
        _ => Mode::Exact,
    };
    Output {
        format: args.format.or(file.format).unwrap_or(default_format),
        mode,
        path: args.out.clone().or_else(|| file.out.clone()),
    }
}

fn emit(output: &Output, text: &str, out: &mut dyn Write) -> CliResult<()> {
    match &output.path {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn parse_usize_list(text: &str, flag: &str) -> CliResult<Vec<usize>> {
    let bad = || usage(format!("--{flag}: expected an integer, a:b range or comma list, got '{text}'"));
    if let Some((a, b)) = text.split_once(':') {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

fn parse_single_usize(text: &str, flag: &str) -> CliResult<usize> {
    text.trim()
        .parse()
        .map_err(|_| usage(format!("--{flag}: expected a non-negative integer, got '{text}'")))
}

fn parse_rational_list(text: &str, flag: &str) -> CliResult<Vec<BigRational>> {
    text.split(',')
        .map(|s| parse_rational(s.trim()).map_err(|e| usage(format!("--{flag}: {e}"))))
        .collect()
}

/// `start:stop:step` with `step > 0`; points are rounded to 12 decimals.
fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let bad = |why: &str| usage(format!("--grid: {why} (expected start:stop:step, got '{text}')"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("three fields needed"));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad("not a number")))
        .collect::<CliResult<_>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || !step.is_finite() {
        return Err(bad("step must be positive and all fields finite"));
    }
    if stop < start {
        return Err(bad("stop is below start"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(bad("too many grid points"));
    }
    Ok((0..count)
        .map(|i| {
            let y = ((start + i as f64 * step) * 1e12).round() / 1e12;
            if y == 0.0 {
                0.0
            } else {
                y
            }
        })
        .collect())
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Stirling { dist, jmax, output } => {
            let file = load_config(dist.config.as_ref())?;
            let (spec, transform) = resolve_dist(&dist, &file)?;
            let output = resolve_output(&output, &file, Format::Csv);
            let jmax = jmax.or(file.jmax).unwrap_or(6);
            let table = psn_egf(&load_moments(&spec, transform, jmax)?);
            let rows = table
                .triangle()
                .map(|(j, m, s)| {
                    vec![
                        Cell::Int(j as u64),
                        Cell::Int(m as u64),
                        rational_cell(&s.re, output.mode),
                        rational_cell(&s.im, output.mode),
                    ]
                })
                .collect();
            let t = Table { header: vec!["j", "m", "re", "im"], rows };
            emit(&output, &t.render(output.format), out)
        }
        Command::Moments { dist, n, jmax, output } => {
            let file = load_config(dist.config.as_ref())?;
            let (spec, transform) = resolve_dist(&dist, &file)?;
            let output = resolve_output(&output, &file, Format::Csv);
            let jmax = jmax.or(file.jmax).unwrap_or(6);
            let ns = parse_usize_list(&n.or(file.n.clone()).unwrap_or_else(|| "1:5".into()), "n")?;
            let reports = sweep(&load_moments(&spec, transform, jmax)?, &ns, jmax)?;
            let rows = reports
                .iter()
                .map(|r| vec![Cell::Int(r.n as u64), Cell::Int(r.j as u64), scalar_cell(&r.value, output.mode)])
                .collect();
            let t = Table { header: vec!["n", "j", "value"], rows };
            emit(&output, &t.render(output.format), out)
        }
        Command::Cumulants { dist, jmax, output } => {
            let file = load_config(dist.config.as_ref())?;
            let (spec, transform) = resolve_dist(&dist, &file)?;
            let output = resolve_output(&output, &file, Format::Csv);
            let jmax = jmax.or(file.jmax).unwrap_or(8);
            let kappa = cumulants_from_stirling(&load_moments(&spec, transform, jmax)?);
            let rows = (1..=kappa.order())
                .map(|j| {
                    let k = kappa.get(j);
                    vec![Cell::Int(j as u64), rational_cell(&k.re, output.mode), rational_cell(&k.im, output.mode)]
                })
                .collect();
            let t = Table { header: vec!["j", "re", "im"], rows };
            emit(&output, &t.render(output.format), out)
        }
        Command::Levy { process, config, t, jmax, output } => {
            let file = load_config(config.as_ref())?;
            let output = resolve_output(&output, &file, Format::Csv);
            let jmax = jmax.or(file.jmax).unwrap_or(8);
            let spec = match (&process, &file.process) {
                (Some(_), Some(_)) => return Err(usage("process given both by --process and in --config")),
                (Some(name), None) => match name.to_ascii_lowercase().as_str() {
                    "poisson" => ProcessSpec::Subordinator(poisson_subordinator(jmax)),
                    "gamma" => ProcessSpec::Subordinator(gamma_subordinator(jmax)),
                    "compensated" | "compensated_unit_jump" => ProcessSpec::Levy(compensated_unit_jump(jmax)),
                    other => return Err(usage(format!("unknown process '{other}'"))),
                },
                (None, Some(spec)) => spec.clone(),
                (None, None) => return Err(usage("a process is required (--process or --config)")),
            };
            let ts = parse_rational_list(&t.or(file.t.clone()).unwrap_or_else(|| "1".into()), "t")?;
            let mut rows = Vec::new();
            for t in &ts {
                for j in 0..=jmax {
                    let value = spec.moment_fn(j, t)?;
                    rows.push(vec![rational_cell(t, output.mode), Cell::Int(j as u64), rational_cell(&value, output.mode)]);
                }
            }
            let table = Table { header: vec!["t", "j", "value"], rows };
            emit(&output, &table.render(output.format), out)
        }
        Command::Edgeworth { dist, n, k_max, grid, output } => {
            let file = load_config(dist.config.as_ref())?;
            let (spec, transform) = resolve_dist(&dist, &file)?;
            let output = resolve_output(&output, &file, Format::Csv);
            let n = parse_single_usize(&n.or(file.n.clone()).unwrap_or_else(|| "10".into()), "n")?;
            let k_max = k_max.or(file.k_max).unwrap_or(2);
            let ys = parse_grid(&grid.or(file.grid.clone()).unwrap_or_else(|| "-3:3:0.5".into()))?;
            let moments = load_moments(&spec, transform, 3 * k_max + 2)?;
            let model = EdgeworthModel::new(&moments, k_max, spec.is_lattice())?;
            if model.is_lattice() {
                let _ = writeln!(
                    err,
                    "warning: '{}' is a lattice distribution; the Edgeworth expansion assumes an integrable characteristic function",
                    spec.name()
                );
            }
            let exact_uniform = |y: f64| uniform_fn_exact(n, y);
            let oracle: Option<&(dyn Fn(f64) -> f64 + Sync)> =
                if spec == DistSpec::UniformStd && transform.is_none() { Some(&exact_uniform) } else { None };
            let rows = curve(&model, n, &ys, oracle)?
                .into_iter()
                .map(|row| {
                    let opt = |v: Option<f64>| v.map(Cell::Float).unwrap_or(Cell::Empty);
                    vec![
                        Cell::Float(row.y),
                        Cell::Float(row.normal),
                        opt(row.exact),
                        Cell::Float(row.edgeworth),
                        opt(row.abs_err()),
                    ]
                })
                .collect();
            let t = Table { header: vec!["y", "G", "F_exact", "edgeworth", "abs_err"], rows };
            emit(&output, &t.render(output.format), out)
        }
        Command::Validate { config, suite: name, seed, samples, output } => {
            let file = load_config(config.as_ref())?;
            let output = resolve_output(&output, &file, Format::Json);
            let mut cfg = McConfig::with_seed(seed.or(file.seed).unwrap_or(0));
            if let Some(samples) = samples.or(file.samples) {
                cfg.samples = samples;
            }
            let name = name.or(file.suite.clone()).unwrap_or_else(|| "all".into());
            let reports = suite::run(&name, &cfg)?;
            emit(&output, &render_reports(&reports, output.format), out)?;
            let failed = reports.iter().filter(|r| !r.pass).count();
            let _ = writeln!(err, "{} of {} checks passed", reports.len() - failed, reports.len());
            if failed > 0 {
                for r in reports.iter().filter(|r| !r.pass) {
                    let _ = writeln!(err, "FAIL {}: computed {} reference {}", r.quantity, r.computed, r.reference);
                }
                return Err(Failure::Validation(failed, reports.len()));
            }
            Ok(())
        }
    }
}

fn render_reports(reports: &[ValidationReport], format: Format) -> String {
    match format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(reports).expect("serializable");
            text.push('\n');
            text
        }
        Format::Csv => {
            let rows = reports
                .iter()
                .map(|r| {
                    vec![
                        Cell::Text(r.quantity.clone()),
                        Cell::Text(r.reference.clone()),
                        Cell::Text(r.computed.clone()),
                        Cell::Float(r.abs_dev),
                        Cell::Float(r.rel_dev),
                        Cell::Float(r.tolerance),
                        Cell::Bool(r.pass),
                    ]
                })
                .collect();
            Table {
                header: vec!["quantity", "reference", "computed", "abs_dev", "rel_dev", "tolerance", "pass"],
                rows,
            }
            .render(Format::Csv)
        }
    }
}

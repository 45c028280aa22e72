//! The `gue-minors` command line.
//!
//! Every command resolves its settings in three layers: built-in defaults
//! (or `GUE_MINORS_WORKERS` for the worker count), then an optional JSON file
//! given by `--config` whose keys are the flag names in snake_case, then the
//! flags actually typed. The resolved settings are echoed with every run.
//!
//! Primary data goes to `--out` or standard output. A run record (command,
//! resolved config, summary, provenance) goes to standard output when
//! `--out` is set and to standard error otherwise.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use gue_minors::experiments::{self, canonical_json, format_float, ExperimentKind, Format, Provenance, SweepConfig};
use gue_minors::fredholm::{
    correlation_f, decorrelation_e, joint_cdf, joint_cdf_decorrelated, single_line_cdf,
    tracy_widom_cdf, tracy_widom_survival, GridParams,
};
use gue_minors::kernel::{kernel_contour_oracle, kernel_raw};
use gue_minors::par::WORKERS_ENV;
use gue_minors::sim::io::{save_checkpoint, write_paths_csv};
use gue_minors::sim::{
    largest_eigenvalues_at, running_extremes, sample_array, sample_paths, subsequence_events, EigenPath, PathEngine,
    Tail,
};
use gue_minors::special::LogScaledValue;
use gue_minors::{Error, Parallelism};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

const DEFAULT_SEED: u64 = experiments::config::DEFAULT_SEED;

#[derive(Parser, Debug)]
#[command(name = "gue-minors", version, about = "GUE minor-process kernels, Fredholm determinants and eigenvalue-path simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate largest-eigenvalue paths along the minors of Gaussian arrays.
    Simulate(SimulateArgs),
    /// Single-line CDF Pr[λ^(n) ≤ t] by Fredholm determinant.
    Cdf(CdfArgs),
    /// Two-line joint CDF and the derived decorrelation quantities.
    Joint(JointArgs),
    /// Tracy–Widom CDF and survival function.
    Tw(TwArgs),
    /// Evaluate the minor kernel by Hermite sum, contour integral, or both.
    Kernel(KernelArgs),
    /// Decorrelation sweep E(u2 + Δ, t1; u2, t2) over separations Δ.
    Decorrelate(DecorrelateArgs),
    /// Correlation sweep F(u, t1; u + Δu, t2) with its bound shape.
    Correlate(CorrelateArgs),
    /// Tail exponent fits: Tracy–Widom or a finite line.
    Tails(TailsArgs),
    /// Run a configured experiment and emit its report.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct Common {
    /// Seed of every random stream.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Gauss–Legendre nodes per line.
    #[arg(long, default_value_t = 64)]
    order: usize,
    /// Order of the refinement check; 0 means twice --order, 1 disables it.
    #[arg(long, default_value_t = 0)]
    fine_order: usize,
    /// Worker threads; 0 means one per core.
    #[arg(long, env = WORKERS_ENV, default_value_t = 0)]
    workers: usize,
    /// Output file [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format [default: csv for a .csv --out, else json]
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// JSON file of settings keyed by flag name; typed flags take precedence [default: none]
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

impl Common {
    fn parallelism(&self) -> Parallelism {
        match self.workers {
            0 => Parallelism::Auto,
            n => Parallelism::from_workers(n),
        }
    }

    fn grid(&self) -> Result<GridParams, Error> {
        if self.order == 0 {
            return Err(Error::Config("--order must be positive".into()));
        }
        let mut p = GridParams::with_order(self.order);
        p.parallelism = self.parallelism();
        match self.fine_order {
            0 => {}
            1 => p.refine = false,
            f if f > self.order => p.fine_order = Some(f),
            f => {
                return Err(Error::Config(format!(
                    "--fine-order {f} must exceed --order {}",
                    self.order
                )))
            }
        }
        Ok(p)
    }

    fn orders(&self) -> Vec<usize> {
        match self.fine_order {
            0 => vec![self.order, 2 * self.order],
            1 => vec![self.order],
            f => vec![self.order, f],
        }
    }

    fn format(&self) -> Format {
        if let Some(f) = self.format {
            return f.into();
        }
        match self.out.as_deref().and_then(Path::extension).and_then(|e| e.to_str()) {
            Some("csv") => Format::Csv,
            _ => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum EngineArg {
    Chain,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum TailArg {
    Upper,
    Lower,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct SimulateArgs {
    /// Largest minor size N_max.
    #[arg(long, default_value_t = 512)]
    nmax: usize,
    /// Number of paths.
    #[arg(long, default_value_t = 100)]
    paths: usize,
    /// Stream id of the first path; path k uses stream first_stream + k.
    #[arg(long, default_value_t = 0)]
    first_stream: u64,
    /// chain: secular-equation recursion, O(N_max³); dense: per-minor eigensolve, O(N_max⁴).
    #[arg(long, value_enum, default_value_t = EngineArg::Chain)]
    engine: EngineArg,
    /// Only these N (list a,b,c or range start:stop:step), each by a dense eigensolve of its minor; empty means all N.
    #[arg(long, default_value = "")]
    at: String,
    /// Also write a binary checkpoint of the paths here [default: none]
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Exponent α of the event subsequence N_k = ⌈k^α⌉.
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Event constant c.
    #[arg(long, default_value_t = 0.3)]
    c: f64,
    /// Event side: upper (λ ≥ c(log N)^{2/3}) or lower (λ ≤ −c(log N)^{1/3}).
    #[arg(long, value_enum, default_value_t = TailArg::Upper)]
    tail: TailArg,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct CdfArgs {
    /// Line index (minor size).
    #[arg(long, default_value_t = 50)]
    n: u32,
    /// Scaled thresholds: a number, a list a,b,c, or start:stop:step.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    t: String,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum CouplingArg {
    Coupled,
    Decorrelated,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct JointArgs {
    /// First line index.
    #[arg(long, default_value_t = 20)]
    u1: u32,
    /// Scaled threshold on the first line.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t1: f64,
    /// Second line index.
    #[arg(long, default_value_t = 24)]
    u2: u32,
    /// Scaled threshold on the second line.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t2: f64,
    /// coupled: the minor-process kernel; decorrelated: independent lines.
    #[arg(long, value_enum, default_value_t = CouplingArg::Coupled)]
    coupling: CouplingArg,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct TwArgs {
    /// Arguments: a number, a list a,b,c, or start:stop:step.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    s: String,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum MethodArg {
    Hermite,
    Contour,
    Both,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct KernelArgs {
    /// Line index of the first argument.
    #[arg(long, default_value_t = 8)]
    u1: u32,
    /// Unscaled position on line u1.
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    y1: f64,
    /// Line index of the second argument.
    #[arg(long, default_value_t = 5)]
    u2: u32,
    /// Unscaled position on line u2.
    #[arg(long, default_value_t = -0.2, allow_hyphen_values = true)]
    y2: f64,
    /// Evaluation route; the contour route needs u1 ≥ u2 and u1 ≤ 512.
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    method: MethodArg,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct DecorrelateArgs {
    /// Lower line index.
    #[arg(long, default_value_t = 60)]
    u2: u32,
    /// Separations u1 − u2: a list or start:stop:step.
    #[arg(long, default_value = "40,140,456,964,1988,4036")]
    sep: String,
    /// Scaled threshold on the upper line u2 + Δ.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t1: f64,
    /// Scaled threshold on the lower line u2.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t2: f64,
    /// Largest accepted increase of E between in-regime separations.
    #[arg(long, default_value_t = 1e-9)]
    monotone_tolerance: f64,
    /// E at the largest in-regime separation must fall below this.
    #[arg(long, default_value_t = 1e-2)]
    smallness: f64,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct CorrelateArgs {
    /// Lower line index.
    #[arg(long, default_value_t = 40)]
    u: u32,
    /// Line offsets Δu: a list or start:stop:step.
    #[arg(long, default_value = "4:12:1")]
    du: String,
    /// Lower threshold on line u.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    t1: f64,
    /// Upper threshold on line u + Δu.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    t2: f64,
    /// Threshold gap Δt in [0, 1] with t2 + Δt ≤ t1.
    #[arg(long, default_value_t = 0.0)]
    dt: f64,
    /// Exponent β of the drift term Δu/u^{2/3−β}.
    #[arg(long, default_value_t = 0.04)]
    beta: f64,
    /// Regime exponent δ: u^{1/3+δ} ≤ Δu ≤ u^{2/3−δ}.
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Paths for a Monte-Carlo check of F; 0 skips it.
    #[arg(long, default_value_t = 0)]
    mc_paths: usize,
    /// Largest accepted |z| of the Monte-Carlo check.
    #[arg(long, default_value_t = 3.0)]
    z_max: f64,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum TailTarget {
    Tw,
    Line,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SideArg {
    Right,
    Left,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct TailsArgs {
    /// tw: fit the Tracy–Widom tails; line: scan the tails of one finite line.
    #[arg(long, value_enum, default_value_t = TailTarget::Tw)]
    target: TailTarget,
    /// Tracy–Widom side to fit.
    #[arg(long, value_enum, default_value_t = SideArg::Right)]
    side: SideArg,
    /// Tracy–Widom fit points; auto is 3:7:0.25 (right) or 3:5.5:0.25 (left).
    #[arg(long, default_value = "auto")]
    s: String,
    /// Accepted relative slope error; auto is 0.05 (right) or 0.1 (left).
    #[arg(long, default_value = "auto")]
    tolerance: String,
    /// Line index for --target line.
    #[arg(long, default_value_t = 256)]
    u: u32,
    /// Thresholds for --target line.
    #[arg(long, default_value = "0:5:0.25")]
    t: String,
    /// Accepted relative error of the line's right-tail coefficient.
    #[arg(long, default_value_t = 0.15)]
    right_tolerance: f64,
    /// Slack of the trace sandwich.
    #[arg(long, default_value_t = 1e-8)]
    trace_slack: f64,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct ExperimentArgs {
    /// Experiment to run; required unless the config file names one [default: none]
    #[arg(long, value_parser = ["tail_fit", "tail_bound_scan", "decorrelation_sweep", "correlation_sweep", "mc_vs_fredholm"])]
    name: Option<String>,
    /// Experiment parameter key=value, repeatable; values are JSON or plain strings [default: none]
    #[arg(long = "param", value_name = "KEY=VALUE")]
    param: Vec<String>,
    /// Seed of every random stream.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Gauss–Legendre orders: order or order,fine_order.
    #[arg(long, default_value = "48,96")]
    orders: String,
    /// Worker threads; 0 means one per core.
    #[arg(long, env = WORKERS_ENV, default_value_t = 0)]
    workers: usize,
    /// Output file [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format [default: csv for a .csv --out, else json]
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Experiment config JSON ({experiment, parameters, seed, orders}); typed flags take precedence [default: none]
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Everything a command produces before it is written out.
struct RunOutput {
    command: &'static str,
    config: Value,
    seed: u64,
    /// Primary data, already rendered.
    data: String,
    summary: Value,
}

/// Runs the command line `argv` (program name first), writing to the given
/// streams, and returns the exit code.
pub fn run_with_io(argv: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let matches = match Cli::command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&matches) {
        Ok(out) => match deliver(out, stdout, stderr) {
            Ok(()) => EXIT_OK,
            Err(e) => report_error(&e, stderr),
        },
        Err(e) => report_error(&e, stderr),
    }
}

/// [`run_with_io`] on the process streams.
pub fn parse_and_run(argv: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(argv, &mut stdout.lock(), &mut stderr.lock())
}

fn report_error(e: &Error, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(stderr, "error: {e}");
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

fn dispatch(matches: &ArgMatches) -> Result<(RunOutput, Option<PathBuf>), Error> {
    let (name, sub) = matches
        .subcommand()
        .ok_or_else(|| Error::Config("missing command".into()))?;
    let cli = Cli::from_arg_matches(matches).map_err(|e| Error::Config(e.to_string()))?;
    match cli.command {
        Command::Simulate(a) => {
            let a = resolve(a, sub, |a| a.common.config.clone())?;
            let out = a.common.out.clone();
            Ok((simulate(a)?, out))
        }
        Command::Cdf(a) => {
            let a = resolve(a, sub, |a| a.common.config.clone())?;
            let out = a.common.out.clone();
            Ok((cdf(a)?, out))
        }
        Command::Joint(a) => {
            let a = resolve(a, sub, |a| a.common.config.clone())?;
            let out = a.common.out.clone();
            Ok((joint(a)?, out))
        }
        Command::Tw(a) => {
            let a = resolve(a, sub, |a| a.common.config.clone())?;
            let out = a.common.out.clone();
            Ok((tw(a)?, out))
        }
        Command::Kernel(a) => {
            let a = resolve(a, sub, |a| a.common.config.clone())?;
            let out = a.common.out.clone();
            Ok((kernel(a)?, out))
        }
        Command::Decorrelate(a) => {
            let a = resolve(a, sub, |a| a.common.config.clone())?;
            let out = a.common.out.clone();
            Ok((decorrelate(a)?, out))
        }
        Command::Correlate(a) => {
            let a = resolve(a, sub, |a| a.common.config.clone())?;
            let out = a.common.out.clone();
            Ok((correlate(a)?, out))
        }
        Command::Tails(a) => {
            let a = resolve(a, sub, |a| a.common.config.clone())?;
            let out = a.common.out.clone();
            Ok((tails(a)?, out))
        }
        Command::Experiment(a) => {
            let out = a.out.clone();
            Ok((experiment(a, sub)?, out))
        }
    }
    .map(|(o, p)| {
        debug_assert_eq!(o.command, name);
        (o, p)
    })
}

fn read_json_object(path: &Path) -> Result<Map<String, Value>, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(Error::Config(format!("{}: expected a JSON object", path.display()))),
        Err(e) => Err(Error::Config(format!("{}: {e}", path.display()))),
    }
}

fn typed_on_command_line(matches: &ArgMatches, id: &str) -> bool {
    matches
        .try_get_raw(id)
        .ok()
        .flatten()
        .is_some()
        && matches.value_source(id) == Some(ValueSource::CommandLine)
}

/// Layers the config file under the typed flags.
fn resolve<T: Serialize + DeserializeOwned>(
    parsed: T,
    matches: &ArgMatches,
    config_path: impl Fn(&T) -> Option<PathBuf>,
) -> Result<T, Error> {
    let Some(path) = config_path(&parsed) else {
        return Ok(parsed);
    };
    let file = read_json_object(&path)?;
    let mut current = match serde_json::to_value(&parsed) {
        Ok(Value::Object(m)) => m,
        _ => return Err(Error::Config("settings are not an object".into())),
    };
    for (key, value) in file {
        if !current.contains_key(&key) {
            return Err(Error::Config(format!(
                "{}: unknown setting {key:?}",
                path.display()
            )));
        }
        if !typed_on_command_line(matches, &key) {
            current.insert(key, value);
        }
    }
    let mut resolved: T = serde_json::from_value(Value::Object(current))
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    // The config path itself is not a setting; keep the one that was used.
    let _ = &mut resolved;
    Ok(resolved)
}

/// A number, a comma-separated list, or `start:stop:step`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, Error> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if s.contains(':') {
        return Ok(experiments::parse_range(s)?.points());
    }
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{x:?} is not a number in {s:?}")))
        })
        .collect()
}

fn parse_integers(s: &str) -> Result<Vec<u32>, Error> {
    parse_grid(s)?
        .into_iter()
        .map(|x| {
            if x.fract() == 0.0 && (1.0..=f64::from(u32::MAX)).contains(&x) {
                Ok(x as u32)
            } else {
                Err(Error::Config(format!("expected a positive integer, got {x}")))
            }
        })
        .collect()
}

fn to_config<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).unwrap_or(Value::Null)
}

fn table_json(names: &[&str], columns: &[Vec<f64>]) -> Value {
    let mut m = Map::new();
    for (n, c) in names.iter().zip(columns) {
        m.insert((*n).to_owned(), json!(c));
    }
    Value::Object(m)
}

fn table_csv(names: &[&str], columns: &[Vec<f64>]) -> String {
    let mut out = names.join(",");
    out.push('\n');
    let rows = columns.iter().map(Vec::len).max().unwrap_or(0);
    for r in 0..rows {
        let cells: Vec<String> = columns
            .iter()
            .map(|c| c.get(r).map(|&v| format_float(v)).unwrap_or_default())
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Renders a table as CSV or as a JSON document carrying the config.
fn render_table(
    command: &'static str,
    common: &Common,
    config: &Value,
    names: &[&str],
    columns: &[Vec<f64>],
) -> Result<String, Error> {
    match common.format() {
        Format::Csv => Ok(table_csv(names, columns)),
        Format::Json => canonical_json(&json!({
            "command": command,
            "config": config,
            "results": table_json(names, columns),
            "provenance": Provenance::now(common.seed),
        })),
    }
}

fn deliver((out, path): (RunOutput, Option<PathBuf>), stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Error> {
    let record = canonical_json(&json!({
        "command": out.command,
        "config": out.config,
        "summary": out.summary,
        "provenance": Provenance::now(out.seed),
    }))?;
    fn io(p: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
        move |e| Error::Io {
            path: p.to_owned(),
            source: e,
        }
    }
    match path {
        Some(p) => {
            std::fs::write(&p, out.data).map_err(io(&p))?;
            stdout.write_all(record.as_bytes()).map_err(io(Path::new("<stdout>")))?;
        }
        None => {
            stdout.write_all(out.data.as_bytes()).map_err(io(Path::new("<stdout>")))?;
            stderr.write_all(record.as_bytes()).map_err(io(Path::new("<stderr>")))?;
        }
    }
    Ok(())
}

fn simulate(a: SimulateArgs) -> Result<RunOutput, Error> {
    if a.nmax == 0 || a.paths == 0 {
        return Err(Error::Config("--nmax and --paths must be positive".into()));
    }
    let par = a.common.parallelism();
    let config = to_config(&a);
    let at = parse_integers(&a.at)?;
    let ids: Vec<u64> = (0..a.paths as u64).map(|k| a.first_stream + k).collect();
    let mut summary = Map::new();
    let data = if at.is_empty() {
        let engine = match a.engine {
            EngineArg::Chain => PathEngine::SpectralChain,
            EngineArg::Dense => PathEngine::Dense,
        };
        let paths = sample_paths(a.common.seed, a.first_stream, a.paths, a.nmax, engine, par)?;
        let tagged: Vec<(u64, EigenPath)> = ids.iter().copied().zip(paths.iter().cloned()).collect();
        if let Some(cp) = &a.checkpoint {
            save_checkpoint(cp, &tagged)?;
        }
        let tail = match a.tail {
            TailArg::Upper => Tail::Upper,
            TailArg::Lower => Tail::Lower,
        };
        let events = subsequence_events(&paths, a.alpha, a.c, tail)?;
        summary.insert("events".into(), serde_json::to_value(&events).unwrap_or(Value::Null));
        if a.nmax >= 3 {
            let stats = paths
                .iter()
                .map(|p| running_extremes(&p.lambda_scaled))
                .collect::<Result<Vec<_>, _>>()?;
            let mean = |f: &dyn Fn(&gue_minors::sim::PathStatistics) -> f64| {
                stats.iter().map(f).sum::<f64>() / stats.len() as f64
            };
            summary.insert(
                "mean_final_running_max_frac23".into(),
                json!(mean(&|s| *s.running_max_frac23.last().unwrap_or(&f64::NAN))),
            );
            summary.insert(
                "mean_final_running_min_frac13".into(),
                json!(mean(&|s| *s.running_min_frac13.last().unwrap_or(&f64::NAN))),
            );
        }
        match a.common.format() {
            Format::Csv => {
                let mut buf = Vec::new();
                write_paths_csv(&mut buf, &tagged).map_err(|e| Error::Io {
                    path: PathBuf::from("<buffer>"),
                    source: e,
                })?;
                String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))?
            }
            Format::Json => canonical_json(&json!({
                "command": "simulate",
                "config": config,
                "paths": tagged.iter().map(|(id, p)| json!({
                    "path_id": id,
                    "lambda_raw": p.lambda_raw,
                    "lambda_scaled": p.lambda_scaled,
                })).collect::<Vec<_>>(),
                "provenance": Provenance::now(a.common.seed),
            }))?,
        }
    } else {
        if a.checkpoint.is_some() {
            return Err(Error::Config("--checkpoint stores whole paths and cannot be combined with --at".into()));
        }
        let ns: Vec<usize> = at.iter().map(|&n| n as usize).collect();
        let size = ns.iter().copied().max().unwrap_or(1).max(a.nmax);
        let rows = par
            .map(&ids, |&id| {
                let arr = sample_array(a.common.seed, id, size);
                largest_eigenvalues_at(&arr, &ns)
            })
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        let mut csv = String::from("path_id,N,lambda_raw,lambda_scaled\n");
        let mut records = Vec::new();
        for (id, vals) in ids.iter().zip(&rows) {
            for (&n, &raw) in ns.iter().zip(vals) {
                let scaled = gue_minors::kernel::scale_y(n as u32, raw);
                csv.push_str(&format!("{id},{n},{},{}\n", format_float(raw), format_float(scaled)));
                records.push(json!({"path_id": id, "N": n, "lambda_raw": raw, "lambda_scaled": scaled}));
            }
        }
        match a.common.format() {
            Format::Csv => csv,
            Format::Json => canonical_json(&json!({
                "command": "simulate",
                "config": config,
                "rows": records,
                "provenance": Provenance::now(a.common.seed),
            }))?,
        }
    };
    Ok(RunOutput {
        command: "simulate",
        config,
        seed: a.common.seed,
        data,
        summary: Value::Object(summary),
    })
}

fn cdf(a: CdfArgs) -> Result<RunOutput, Error> {
    let grid = a.common.grid()?;
    let t = parse_grid(&a.t)?;
    let values = t
        .iter()
        .map(|&x| single_line_cdf(a.n, x, &grid))
        .collect::<Result<Vec<_>, _>>()?;
    let config = to_config(&a);
    let data = render_table("cdf", &a.common, &config, &["t", "cdf"], &[t, values.clone()])?;
    Ok(RunOutput {
        command: "cdf",
        config,
        seed: a.common.seed,
        data,
        summary: json!({ "cdf": values }),
    })
}

fn joint(a: JointArgs) -> Result<RunOutput, Error> {
    let grid = a.common.grid()?;
    let j = match a.coupling {
        CouplingArg::Coupled => joint_cdf(a.u1, a.t1, a.u2, a.t2, &grid)?,
        CouplingArg::Decorrelated => joint_cdf_decorrelated(a.u1, a.t1, a.u2, a.t2, &grid)?,
    };
    let m1 = single_line_cdf(a.u1, a.t1, &grid)?;
    let m2 = single_line_cdf(a.u2, a.t2, &grid)?;
    let mut names = vec!["joint", "marginal1", "marginal2"];
    let mut cols = vec![vec![j], vec![m1], vec![m2]];
    if a.coupling == CouplingArg::Coupled && a.u1 != a.u2 {
        names.push("e");
        cols.push(vec![decorrelation_e(a.u1, a.t1, a.u2, a.t2, &grid)?]);
        if a.u1 < a.u2 {
            names.push("f");
            cols.push(vec![correlation_f(a.u1, a.t1, a.u2, a.t2, &grid)?]);
        }
    }
    let config = to_config(&a);
    let data = render_table("joint", &a.common, &config, &names, &cols)?;
    Ok(RunOutput {
        command: "joint",
        config,
        seed: a.common.seed,
        data,
        summary: table_json(&names, &cols),
    })
}

fn tw(a: TwArgs) -> Result<RunOutput, Error> {
    let grid = a.common.grid()?;
    let s = parse_grid(&a.s)?;
    let cdf = s
        .iter()
        .map(|&x| tracy_widom_cdf(x, &grid))
        .collect::<Result<Vec<_>, _>>()?;
    let survival = s
        .iter()
        .map(|&x| tracy_widom_survival(x, &grid))
        .collect::<Result<Vec<_>, _>>()?;
    let config = to_config(&a);
    let data = render_table("tw", &a.common, &config, &["s", "cdf", "survival"], &[s, cdf.clone(), survival])?;
    Ok(RunOutput {
        command: "tw",
        config,
        seed: a.common.seed,
        data,
        summary: json!({ "cdf": cdf }),
    })
}

fn kernel(a: KernelArgs) -> Result<RunOutput, Error> {
    if a.u1 == 0 || a.u2 == 0 {
        return Err(Error::Config("line indices must be positive".into()));
    }
    let hermite = matches!(a.method, MethodArg::Hermite | MethodArg::Both).then(|| kernel_raw(a.u1, a.y1, a.u2, a.y2));
    let contour = match a.method {
        MethodArg::Contour | MethodArg::Both => Some(kernel_contour_oracle(a.u1, a.y1, a.u2, a.y2)?),
        MethodArg::Hermite => None,
    };
    let describe = |v: LogScaledValue| {
        json!({ "value": v.to_f64(), "sign": v.sign(), "log_magnitude": v.log_magnitude() })
    };
    let mut names = Vec::new();
    let mut cols = Vec::new();
    let mut summary = Map::new();
    if let Some(h) = hermite {
        names.push("hermite");
        cols.push(vec![h.to_f64()]);
        summary.insert("hermite".into(), describe(h));
    }
    if let Some(c) = contour {
        names.push("contour");
        cols.push(vec![c.to_f64()]);
        summary.insert("contour".into(), describe(c));
    }
    if let (Some(h), Some(c)) = (hermite, contour) {
        let rel = if h.is_zero() && c.is_zero() {
            0.0
        } else {
            (h.sub(c).abs() / h.abs()).to_f64()
        };
        names.push("relative_difference");
        cols.push(vec![rel]);
        summary.insert("relative_difference".into(), json!(rel));
    }
    let config = to_config(&a);
    let data = render_table("kernel", &a.common, &config, &names, &cols)?;
    Ok(RunOutput {
        command: "kernel",
        config,
        seed: a.common.seed,
        data,
        summary: Value::Object(summary),
    })
}

fn report_output(command: &'static str, common: &Common, config: Value, sweep: SweepConfig) -> Result<RunOutput, Error> {
    let report = experiments::run(&sweep, common.parallelism())?;
    let data = report.render(common.format())?;
    Ok(RunOutput {
        command,
        config,
        seed: common.seed,
        data,
        summary: serde_json::to_value(&report.verdicts).unwrap_or(Value::Null),
    })
}

fn sweep_config(kind: ExperimentKind, common: &Common) -> SweepConfig {
    SweepConfig {
        seed: common.seed,
        orders: common.orders(),
        ..SweepConfig::new(kind)
    }
}

fn decorrelate(a: DecorrelateArgs) -> Result<RunOutput, Error> {
    let seps: Vec<f64> = parse_integers(&a.sep)?.into_iter().map(f64::from).collect();
    let sweep = sweep_config(ExperimentKind::DecorrelationSweep, &a.common)
        .with("u2", a.u2)
        .with("separations", seps)
        .with("t1", a.t1)
        .with("t2", a.t2)
        .with("monotone_tolerance", a.monotone_tolerance)
        .with("smallness", a.smallness);
    report_output("decorrelate", &a.common, to_config(&a), sweep)
}

fn correlate(a: CorrelateArgs) -> Result<RunOutput, Error> {
    let du: Vec<f64> = parse_integers(&a.du)?.into_iter().map(f64::from).collect();
    let sweep = sweep_config(ExperimentKind::CorrelationSweep, &a.common)
        .with("u", a.u)
        .with("delta_u", du)
        .with("t1", a.t1)
        .with("t2", a.t2)
        .with("delta_t", a.dt)
        .with("beta", a.beta)
        .with("delta", a.delta)
        .with("mc_paths", a.mc_paths)
        .with("z_max", a.z_max);
    report_output("correlate", &a.common, to_config(&a), sweep)
}

fn tails(a: TailsArgs) -> Result<RunOutput, Error> {
    let sweep = match a.target {
        TailTarget::Tw => {
            let mut c = sweep_config(ExperimentKind::TailFit, &a.common).with(
                "side",
                match a.side {
                    SideArg::Right => "right",
                    SideArg::Left => "left",
                },
            );
            if a.s != "auto" {
                c = c.with("s", parse_grid(&a.s)?);
            }
            if a.tolerance != "auto" {
                let tol: f64 = a
                    .tolerance
                    .parse()
                    .map_err(|_| Error::Config(format!("--tolerance {:?} is not a number", a.tolerance)))?;
                c = c.with("tolerance", tol);
            }
            c
        }
        TailTarget::Line => sweep_config(ExperimentKind::TailBoundScan, &a.common)
            .with("u", a.u)
            .with("t", parse_grid(&a.t)?)
            .with("right_tolerance", a.right_tolerance)
            .with("trace_slack", a.trace_slack),
    };
    report_output("tails", &a.common, to_config(&a), sweep)
}

fn experiment(a: ExperimentArgs, matches: &ArgMatches) -> Result<RunOutput, Error> {
    let typed = |id: &str| typed_on_command_line(matches, id);
    let mut sweep = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io {
                path: p.clone(),
                source: e,
            })?;
            Some(SweepConfig::from_json(&text)?)
        }
        None => None,
    };
    let kind = match (&a.name, &sweep) {
        (Some(n), _) => n.parse::<ExperimentKind>()?,
        (None, Some(s)) => s.experiment,
        (None, None) => return Err(Error::Config("experiment needs --name or --config".into())),
    };
    let base = sweep.take().unwrap_or_else(|| SweepConfig::new(kind));
    let mut params: BTreeMap<String, Value> = base.parameters.clone();
    for kv in &a.param {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--param {kv:?} is not key=value")))?;
        let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_owned()));
        params.insert(k.trim().to_owned(), value);
    }
    let orders: Vec<usize> = if typed("orders") || a.config.is_none() {
        a.orders
            .split(',')
            .map(|x| {
                x.trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("--orders {:?} is not a list of integers", a.orders)))
            })
            .collect::<Result<_, _>>()?
    } else {
        base.orders.clone()
    };
    let seed = if typed("seed") || a.config.is_none() { a.seed } else { base.seed };
    let sweep = SweepConfig {
        experiment: kind,
        parameters: params,
        seed,
        orders,
    };
    let format = match (a.format, a.out.as_deref().and_then(Path::extension).and_then(|e| e.to_str())) {
        (Some(f), _) => f.into(),
        (None, Some("csv")) => Format::Csv,
        _ => Format::Json,
    };
    let par = match a.workers {
        0 => Parallelism::Auto,
        n => Parallelism::from_workers(n),
    };
    let report = experiments::run(&sweep, par)?;
    let data = report.render(format)?;
    let mut config = to_config(&a);
    if let Value::Object(m) = &mut config {
        m.insert("resolved".into(), serde_json::to_value(&report.config).unwrap_or(Value::Null));
    }
    Ok(RunOutput {
        command: "experiment",
        config,
        seed,
        data,
        summary: serde_json::to_value(&report.verdicts).unwrap_or(Value::Null),
    })
}

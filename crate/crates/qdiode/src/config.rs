//! Run configuration: command-line flags, optionally layered over a flat
//! `key=value` file.

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};

use qdiode_core::{Mode, ModelParams, Pump};

use crate::sweep::{Column, ScanAxis};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {reason}")]
    TypeError { key: String, reason: String },
    #[error("missing required key `{0}`")]
    MissingRequired(String),
    #[error("cannot read config file {path}: {reason}")]
    File { path: PathBuf, reason: String },
    /// Help or version text was requested; not a failure.
    #[error("{0}")]
    Help(String),
}

impl ConfigError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ConfigError::Help(_) => 0,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CommandName {
    Steady,
    G2tau,
    Sweep,
    Rect,
    Features,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PumpArg {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScanArg {
    DeltaA,
    DeltaB,
    X,
}

#[derive(Parser, Debug, Default)]
#[command(
    name = "qdiode",
    version,
    about = "Steady states, correlations and rectification of a two-cavity optical diode",
    allow_negative_numbers = true
)]
struct RawArgs {
    #[arg(value_enum)]
    command: Option<CommandName>,
    /// Mode-a detuning, in units of κ.
    #[arg(long)]
    delta_a: Option<f64>,
    /// Mode-b detuning, in units of κ.
    #[arg(long)]
    delta_b: Option<f64>,
    /// χ² coupling Ω, in units of κ.
    #[arg(long)]
    omega: Option<f64>,
    /// Drive amplitude F, in units of κ.
    #[arg(long = "f")]
    f: Option<f64>,
    /// Mode-a loss rate, in units of κ.
    #[arg(long)]
    kappa_a: Option<f64>,
    #[arg(long, value_enum)]
    pump: Option<PumpArg>,
    #[arg(long)]
    nmax_a: Option<usize>,
    #[arg(long)]
    nmax_b: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Flat key=value file; flags take precedence over its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    scan: Option<ScanArg>,
    #[arg(long)]
    lo: Option<f64>,
    #[arg(long)]
    hi: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    n: Option<usize>,
    /// Δ = Δ_b − 2Δ_a held fixed while scanning x.
    #[arg(long)]
    delta_fixed: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    tau_n: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<PumpArg>,
    /// Sweep column searched by `features`.
    #[arg(long)]
    column: Option<Column>,
}

/// Long flag names accepted as config-file keys.
const FILE_KEYS: [&str; 19] = [
    "delta-a",
    "delta-b",
    "omega",
    "f",
    "kappa-a",
    "pump",
    "nmax-a",
    "nmax-b",
    "out",
    "format",
    "scan",
    "lo",
    "hi",
    "n",
    "delta-fixed",
    "tau-max",
    "tau-n",
    "mode",
    "column",
];

const DEFAULT_POINTS: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub scan: ScanAxis,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub delta_fixed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauSpec {
    pub tau_max: f64,
    pub tau_n: usize,
    pub mode: Mode,
}

impl Default for TauSpec {
    fn default() -> Self {
        Self {
            tau_max: 5.0,
            tau_n: 400,
            mode: Mode::A,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Steady,
    G2Tau(TauSpec),
    Sweep(SweepSpec),
    Rect(SweepSpec),
    Features { sweep: SweepSpec, column: Column },
    Validate,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Steady => "steady",
            Command::G2Tau(_) => "g2tau",
            Command::Sweep(_) => "sweep",
            Command::Rect(_) => "rect",
            Command::Features { .. } => "features",
            Command::Validate => "validate",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Steady => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: ModelParams,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn type_error(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::TypeError {
        key: key.into(),
        reason: reason.into(),
    }
}

fn from_clap(err: clap::Error) -> ConfigError {
    use clap::error::{ContextKind, ContextValue};
    let context = |kind| match err.get(kind) {
        Some(ContextValue::String(s)) => s.clone(),
        Some(ContextValue::Strings(v)) => v.join(", "),
        _ => String::new(),
    };
    match err.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ConfigError::Help(err.render().to_string()),
        ErrorKind::UnknownArgument => ConfigError::UnknownKey(context(ContextKind::InvalidArg)),
        ErrorKind::MissingRequiredArgument | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            ConfigError::MissingRequired(context(ContextKind::InvalidArg))
        }
        ErrorKind::InvalidValue | ErrorKind::ValueValidation => {
            let key = context(ContextKind::InvalidArg);
            let value = context(ContextKind::InvalidValue);
            type_error(&key, format!("cannot parse `{value}`"))
        }
        _ => type_error("argv", err.kind().to_string()),
    }
}

/// Translate the body of a config file into flag form.
fn file_to_argv(text: &str) -> Result<Vec<String>, ConfigError> {
    let mut argv = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| type_error(line, "expected key=value"))?;
        let key = key.trim().replace('_', "-");
        if !FILE_KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey(key));
        }
        argv.push(format!("--{key}"));
        argv.push(value.trim().to_string());
    }
    Ok(argv)
}

fn parse_raw<I, S>(argv: I) -> Result<RawArgs, ConfigError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    RawArgs::try_parse_from(argv).map_err(from_clap)
}

macro_rules! merge {
    ($flags:ident, $file:ident; $($field:ident),*) => {
        $( if $flags.$field.is_none() { $flags.$field = $file.$field.take(); } )*
    };
}

/// Parse `argv` (without the program name) over an optional config-file body.
/// A `--config` flag is read from disk when `file` is `None`.
pub fn parse_config(argv: &[String], file: Option<&str>) -> Result<RunConfig, ConfigError> {
    let mut flags = parse_raw(std::iter::once("qdiode".to_string()).chain(argv.iter().cloned()))?;
    let loaded;
    let body = match (file, &flags.config) {
        (Some(text), _) => Some(text),
        (None, Some(path)) => {
            loaded = std::fs::read_to_string(path).map_err(|e| ConfigError::File {
                path: path.clone(),
                reason: e.to_string(),
            })?;
            Some(loaded.as_str())
        }
        (None, None) => None,
    };
    if let Some(text) = body {
        let extra = file_to_argv(text)?;
        let mut from_file = parse_raw(["qdiode".to_string()].into_iter().chain(extra))?;
        merge!(flags, from_file; delta_a, delta_b, omega, f, kappa_a, pump, nmax_a, nmax_b, out,
            format, scan, lo, hi, n, delta_fixed, tau_max, tau_n, mode, column);
    }
    resolve(flags)
}

fn non_negative(key: &str, v: Option<f64>) -> Result<Option<f64>, ConfigError> {
    match v {
        Some(x) if !(x.is_finite() && x >= 0.0) => Err(type_error(key, "must be a finite non-negative number")),
        _ => Ok(v),
    }
}

fn finite(key: &str, v: Option<f64>) -> Result<Option<f64>, ConfigError> {
    match v {
        Some(x) if !x.is_finite() => Err(type_error(key, "must be finite")),
        _ => Ok(v),
    }
}

fn resolve(raw: RawArgs) -> Result<RunConfig, ConfigError> {
    let command = raw.command.ok_or_else(|| ConfigError::MissingRequired("command".into()))?;
    let defaults = ModelParams::default();
    let pump = match raw.pump {
        Some(PumpArg::B) => Pump::RightB,
        _ => Pump::LeftA,
    };
    let kappa_a = non_negative("kappa-a", raw.kappa_a)?.unwrap_or(defaults.kappa_a);
    if kappa_a == 0.0 {
        return Err(type_error("kappa-a", "must be positive"));
    }
    let params = ModelParams {
        delta_a: finite("delta-a", raw.delta_a)?.unwrap_or(defaults.delta_a),
        delta_b: finite("delta-b", raw.delta_b)?.unwrap_or(defaults.delta_b),
        omega_nl: non_negative("omega", raw.omega)?.unwrap_or(defaults.omega_nl),
        drive_f: non_negative("f", raw.f)?.unwrap_or(defaults.drive_f),
        kappa_a,
        pump,
        n_max_a: raw.nmax_a.unwrap_or(defaults.n_max_a),
        n_max_b: raw.nmax_b.unwrap_or(defaults.n_max_b),
        ..defaults
    };
    if params.n_max_a < 2 {
        return Err(type_error("nmax-a", "must be at least 2"));
    }
    if params.n_max_b < 1 {
        return Err(type_error("nmax-b", "must be at least 1"));
    }

    let sweep = |default_scan: Option<ScanAxis>| -> Result<SweepSpec, ConfigError> {
        let scan = match raw.scan {
            Some(ScanArg::DeltaA) => ScanAxis::DeltaA,
            Some(ScanArg::DeltaB) => ScanAxis::DeltaB,
            Some(ScanArg::X) => ScanAxis::X,
            None => default_scan.ok_or_else(|| ConfigError::MissingRequired("scan".into()))?,
        };
        let lo = finite("lo", raw.lo)?.ok_or_else(|| ConfigError::MissingRequired("lo".into()))?;
        let hi = finite("hi", raw.hi)?.ok_or_else(|| ConfigError::MissingRequired("hi".into()))?;
        if lo >= hi {
            return Err(type_error("hi", "must exceed lo"));
        }
        let n = raw.n.unwrap_or(DEFAULT_POINTS);
        if n < 3 {
            return Err(type_error("n", "at least 3 grid points are required"));
        }
        Ok(SweepSpec {
            scan,
            lo,
            hi,
            n,
            delta_fixed: finite("delta-fixed", raw.delta_fixed)?.unwrap_or(0.0),
        })
    };

    let command = match command {
        CommandName::Steady => Command::Steady,
        CommandName::Validate => Command::Validate,
        CommandName::G2tau => {
            let d = TauSpec::default();
            let tau_max = non_negative("tau-max", raw.tau_max)?.unwrap_or(d.tau_max);
            let tau_n = raw.tau_n.unwrap_or(d.tau_n);
            if tau_n < 2 || tau_max == 0.0 {
                return Err(type_error("tau-n", "need at least 2 delays over a positive range"));
            }
            let mode = match raw.mode {
                Some(PumpArg::B) => Mode::B,
                _ => Mode::A,
            };
            Command::G2Tau(TauSpec { tau_max, tau_n, mode })
        }
        CommandName::Sweep => Command::Sweep(sweep(None)?),
        CommandName::Rect => Command::Rect(sweep(Some(ScanAxis::X))?),
        CommandName::Features => {
            let column = raw.column.ok_or_else(|| ConfigError::MissingRequired("column".into()))?;
            Command::Features {
                sweep: sweep(None)?,
                column,
            }
        }
    };
    let format = raw.format.unwrap_or(command.default_format());
    Ok(RunConfig {
        command,
        params,
        out: raw.out,
        format,
    })
}

impl RunConfig {
    /// Flag rendering that [`parse_config`] maps back to `self`.
    pub fn to_args(&self) -> Vec<String> {
        let p = &self.params;
        let mut a: Vec<String> = vec![self.command.name().into()];
        let mut push = |k: &str, v: String| {
            a.push(format!("--{k}"));
            a.push(v);
        };
        push("delta-a", p.delta_a.to_string());
        push("delta-b", p.delta_b.to_string());
        push("omega", p.omega_nl.to_string());
        push("f", p.drive_f.to_string());
        push("kappa-a", p.kappa_a.to_string());
        push("pump", if p.pump == Pump::LeftA { "a" } else { "b" }.into());
        push("nmax-a", p.n_max_a.to_string());
        push("nmax-b", p.n_max_b.to_string());
        if let Some(out) = &self.out {
            push("out", out.display().to_string());
        }
        push("format", if self.format == Format::Csv { "csv" } else { "json" }.into());
        let sweep = |s: &SweepSpec, push: &mut dyn FnMut(&str, String)| {
            let scan = match s.scan {
                ScanAxis::DeltaA => "delta-a",
                ScanAxis::DeltaB => "delta-b",
                ScanAxis::X => "x",
            };
            push("scan", scan.into());
            push("lo", s.lo.to_string());
            push("hi", s.hi.to_string());
            push("n", s.n.to_string());
            push("delta-fixed", s.delta_fixed.to_string());
        };
        match &self.command {
            Command::Steady | Command::Validate => {}
            Command::G2Tau(t) => {
                push("tau-max", t.tau_max.to_string());
                push("tau-n", t.tau_n.to_string());
                push("mode", if t.mode == Mode::A { "a" } else { "b" }.into());
            }
            Command::Sweep(s) | Command::Rect(s) => sweep(s, &mut push),
            Command::Features { sweep: s, column } => {
                sweep(s, &mut push);
                push("column", column.name().into());
            }
        }
        a
    }
}

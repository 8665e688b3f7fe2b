//! Command-line front end, sweeps and acceptance suite for the two-cavity
//! optical diode model in `qdiode-core`.
//!
//! Commands and their outputs:
//!
//! | command    | default format | columns |
//! |------------|----------------|---------|
//! | `steady`   | JSON           | n_a, n_b, g2_a, g2_b, flags, diagnostics |
//! | `g2tau`    | CSV            | tau, g2_numeric, g2_analytic |
//! | `sweep`    | CSV            | scan coordinate, then [`output::SWEEP_COLUMNS`] |
//! | `rect`     | CSV            | scan coordinate, R_numeric, R_analytic, N_k, N_minus_k |
//! | `features` | CSV            | coordinate, value, kind |
//! | `validate` | text           | one PASS/FAIL line per acceptance criterion |

pub mod acceptance;
pub mod config;
pub mod output;
pub mod sweep;

use serde::Serialize;

use qdiode_core::analytic::analytic_g2_delayed;
use qdiode_core::dynamics::steady_state;
use qdiode_core::observables::{g2_delayed_from, g2_zero, mean_photon};
use qdiode_core::state::StateDiagnostics;
use qdiode_core::{Mode, ModelParams, Pump};

use config::{Command, ConfigError, Format, RunConfig, SweepSpec};
use sweep::{find_features, run_sweep, Outputs, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] qdiode_core::Error),
    #[error(transparent)]
    Sweep(#[from] sweep::SweepError),
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
    #[error("encoding CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("encoding JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{failed} acceptance criteria failed")]
    Acceptance { failed: usize },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(e) => e.exit_code(),
            RunError::Sweep(sweep::SweepError::InvalidConfig(_)) => EXIT_CONFIG,
            RunError::Model(qdiode_core::Error::InvalidParams { .. }) => EXIT_CONFIG,
            RunError::Sweep(sweep::SweepError::Model(qdiode_core::Error::InvalidParams { .. })) => EXIT_CONFIG,
            _ => EXIT_NUMERIC,
        }
    }
}

#[derive(Serialize)]
struct SteadyReport {
    delta_a: f64,
    delta_b: f64,
    omega: f64,
    f: f64,
    kappa_a: f64,
    pump: &'static str,
    n_a: f64,
    n_b: f64,
    g2_a: Option<f64>,
    g2_b: Option<f64>,
    flags: Vec<String>,
    trace_error: f64,
    hermiticity: f64,
    min_eigenvalue: f64,
}

fn pump_name(p: Pump) -> &'static str {
    match p {
        Pump::LeftA => "a",
        Pump::RightB => "b",
    }
}

fn steady_report(p: &ModelParams) -> Result<SteadyReport, RunError> {
    p.validate()?;
    let rho = steady_state(p, &p.basis()?)?;
    let mut flags = Vec::new();
    let mut g2 = |mode: Mode, name: &str| match g2_zero(&rho, mode) {
        Ok(g) => Some(g),
        Err(_) => {
            flags.push(format!("{name}_undefined"));
            None
        }
    };
    let g2_a = g2(Mode::A, "g2_a");
    let g2_b = g2(Mode::B, "g2_b");
    let StateDiagnostics {
        hermiticity,
        trace_error,
        min_eigenvalue,
    } = rho.diagnostics();
    Ok(SteadyReport {
        delta_a: p.delta_a,
        delta_b: p.delta_b,
        omega: p.omega_nl,
        f: p.drive_f,
        kappa_a: p.kappa_a,
        pump: pump_name(p.pump),
        n_a: mean_photon(&rho, Mode::A),
        n_b: mean_photon(&rho, Mode::B),
        g2_a,
        g2_b,
        flags,
        trace_error,
        hermiticity,
        min_eigenvalue,
    })
}

fn steady_csv(r: &SteadyReport) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n_a", "n_b", "g2_a", "g2_b", "flags"])?;
    w.write_record([
        output::number(r.n_a),
        output::number(r.n_b),
        output::cell(r.g2_a),
        output::cell(r.g2_b),
        r.flags.join(";"),
    ])?;
    w.into_inner()
        .map_err(|e| csv::Error::from(std::io::Error::other(e.to_string())))
}

#[derive(Serialize)]
struct TauRow {
    tau: f64,
    g2_numeric: f64,
    g2_analytic: Option<f64>,
}

fn sweep_config(spec: &SweepSpec, params: &ModelParams, outputs: Outputs) -> SweepConfig {
    let mut cfg = SweepConfig::new(spec.scan, spec.lo, spec.hi, spec.n, *params);
    cfg.delta_fixed = spec.delta_fixed;
    cfg.outputs = outputs;
    cfg
}

fn encode<T: Serialize + ?Sized>(
    format: Format,
    value: &T,
    csv: impl FnOnce() -> Result<Vec<u8>, csv::Error>,
) -> Result<Vec<u8>, RunError> {
    Ok(match format {
        Format::Csv => csv()?,
        Format::Json => output::json(value)?,
    })
}

/// Run a parsed configuration and return the process exit status. Errors are
/// reported on stderr.
pub fn execute(cfg: &RunConfig) -> i32 {
    match run(cfg) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("qdiode: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<(), RunError> {
    let p = &cfg.params;
    let out = cfg.out.as_deref();
    let bytes = match &cfg.command {
        Command::Steady => {
            let r = steady_report(p)?;
            encode(cfg.format, &r, || steady_csv(&r))?
        }
        Command::G2Tau(t) => {
            p.validate()?;
            let taus: Vec<f64> = (0..t.tau_n)
                .map(|i| t.tau_max * i as f64 / (t.tau_n - 1) as f64)
                .collect();
            let rho = steady_state(p, &p.basis()?)?;
            let numeric = g2_delayed_from(p, &rho, t.mode, &taus, p.stable_dt())?;
            // Only defined for a drive on `a`; left empty otherwise.
            let analytic = analytic_g2_delayed(p, t.mode, &taus).ok().map(|s| s.values);
            let rows: Vec<TauRow> = taus
                .iter()
                .enumerate()
                .map(|(i, &tau)| TauRow {
                    tau,
                    g2_numeric: numeric.values[i],
                    g2_analytic: analytic.as_ref().map(|a| a[i]),
                })
                .collect();
            encode(cfg.format, &rows, || {
                output::g2tau_csv(&taus, &numeric.values, analytic.as_deref())
            })?
        }
        Command::Sweep(s) => {
            let table = run_sweep(&sweep_config(s, p, Outputs::NUMERIC_AND_ANALYTIC))?;
            encode(cfg.format, &table.rows, || output::sweep_csv(table.axis, &table.rows))?
        }
        Command::Rect(s) => {
            let table = run_sweep(&sweep_config(s, p, Outputs::RECTIFICATION))?;
            encode(cfg.format, &table.rows, || output::rect_csv(table.axis, &table.rows))?
        }
        Command::Features { sweep: s, column } => {
            let table = run_sweep(&sweep_config(s, p, Outputs::ALL))?;
            let features = find_features(&table, *column);
            encode(cfg.format, &features, || output::features_csv(&features))?
        }
        Command::Validate => {
            let reports = acceptance::run_all(|r| println!("{r}"));
            let failed = reports.iter().filter(|r| !r.passed).count();
            if let Some(path) = out {
                let text: String = reports.iter().map(|r| format!("{r}\n")).collect();
                output::emit(Some(path), text.as_bytes())?;
            }
            return if failed == 0 {
                Ok(())
            } else {
                Err(RunError::Acceptance { failed })
            };
        }
    };
    output::emit(out, &bytes)?;
    Ok(())
}

/// Parse `argv` (without the program name) and execute it.
pub fn main_with_args(argv: &[String]) -> i32 {
    match config::parse_config(argv, None) {
        Ok(cfg) => execute(&cfg),
        Err(ConfigError::Help(text)) => {
            print!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("qdiode: {e}");
            e.exit_code()
        }
    }
}


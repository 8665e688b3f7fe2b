//! One-dimensional detuning sweeps and extremum location.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use qdiode_core::analytic::{analytic_observables, analytic_rectification, detunings_from_x};
use qdiode_core::dynamics::steady_state;
use qdiode_core::observables::{g2_zero, mean_photon, rectification_from_states};
use qdiode_core::state::StateDiagnostics;
use qdiode_core::{DensityMatrix, Mode, ModelParams, Pump};

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Model(#[from] qdiode_core::Error),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Swept detuning coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScanAxis {
    /// Δ_a, with Δ_b = 2Δ_a.
    DeltaA,
    /// Δ_b, with Δ_a = Δ_b/2.
    DeltaB,
    /// x = Δ_b + 2Δ_a at fixed Δ = Δ_b − 2Δ_a.
    X,
}

impl ScanAxis {
    pub fn name(self) -> &'static str {
        match self {
            ScanAxis::DeltaA => "delta_a",
            ScanAxis::DeltaB => "delta_b",
            ScanAxis::X => "x",
        }
    }
}

/// Column groups a sweep computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Outputs {
    pub numeric: bool,
    pub analytic: bool,
    pub rectification: bool,
    pub currents: bool,
}

impl Outputs {
    pub const ALL: Outputs = Outputs {
        numeric: true,
        analytic: true,
        rectification: true,
        currents: true,
    };
    pub const NUMERIC_AND_ANALYTIC: Outputs = Outputs {
        numeric: true,
        analytic: true,
        rectification: false,
        currents: false,
    };
    pub const RECTIFICATION: Outputs = Outputs {
        numeric: false,
        analytic: false,
        rectification: true,
        currents: true,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub scan: ScanAxis,
    pub lo: f64,
    pub hi: f64,
    pub n_points: usize,
    /// Parameters shared by every grid point; its detunings are overwritten.
    pub template: ModelParams,
    /// Δ used when scanning x.
    pub delta_fixed: f64,
    pub outputs: Outputs,
    /// Worker threads; 0 picks the number of available cores.
    pub threads: usize,
}

impl SweepConfig {
    pub fn new(scan: ScanAxis, lo: f64, hi: f64, n_points: usize, template: ModelParams) -> Self {
        Self {
            scan,
            lo,
            hi,
            n_points,
            template,
            delta_fixed: 0.0,
            outputs: Outputs::NUMERIC_AND_ANALYTIC,
            threads: 0,
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if self.n_points < 3 {
            return Err(SweepError::InvalidConfig("at least 3 grid points are required"));
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(SweepError::InvalidConfig("range must be finite with lo < hi"));
        }
        if !self.delta_fixed.is_finite() {
            return Err(SweepError::InvalidConfig("delta_fixed must be finite"));
        }
        self.template.validate()?;
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n_points - 1) as f64
    }

    pub fn coordinates(&self) -> Vec<f64> {
        let span = self.hi - self.lo;
        let last = (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| if i + 1 == self.n_points { self.hi } else { self.lo + span * i as f64 / last })
            .collect()
    }

    pub fn params_at(&self, coordinate: f64) -> ModelParams {
        let (da, db) = match self.scan {
            ScanAxis::DeltaA => (coordinate, 2.0 * coordinate),
            ScanAxis::DeltaB => (coordinate / 2.0, coordinate),
            ScanAxis::X => detunings_from_x(coordinate, self.delta_fixed),
        };
        self.template.with_detunings(da, db)
    }
}

/// Why a cell of a row is empty.
#[derive(Debug, Clone, PartialEq)]
pub enum RowFlag {
    G2Undefined { mode: Mode, analytic: bool },
    NumericFailed(String),
    AnalyticFailed(String),
    RectificationFailed(String),
}

impl fmt::Display for RowFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowFlag::G2Undefined { mode, analytic } => {
                let m = if *mode == Mode::A { "a" } else { "b" };
                let kind = if *analytic { "_analytic" } else { "" };
                write!(f, "g2_{m}{kind}_undefined")
            }
            RowFlag::NumericFailed(e) => write!(f, "numeric_failed({e})"),
            RowFlag::AnalyticFailed(e) => write!(f, "analytic_failed({e})"),
            RowFlag::RectificationFailed(e) => write!(f, "rectification_failed({e})"),
        }
    }
}

impl Serialize for RowFlag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub coordinate: f64,
    pub delta_a: f64,
    pub delta_b: f64,
    pub n_a: Option<f64>,
    pub n_b: Option<f64>,
    pub g2_a: Option<f64>,
    pub g2_b: Option<f64>,
    pub n_a_analytic: Option<f64>,
    pub n_b_analytic: Option<f64>,
    pub g2_a_analytic: Option<f64>,
    pub g2_b_analytic: Option<f64>,
    pub n_total_k: Option<f64>,
    pub n_total_minus_k: Option<f64>,
    pub r_numeric: Option<f64>,
    pub r_analytic: Option<f64>,
    /// Worst diagnostics over the steady states solved for this row.
    #[serde(skip)]
    pub diagnostics: Option<StateDiagnostics>,
    pub flags: Vec<RowFlag>,
}

impl SweepRow {
    fn empty(coordinate: f64, p: &ModelParams) -> Self {
        Self {
            coordinate,
            delta_a: p.delta_a,
            delta_b: p.delta_b,
            n_a: None,
            n_b: None,
            g2_a: None,
            g2_b: None,
            n_a_analytic: None,
            n_b_analytic: None,
            g2_a_analytic: None,
            g2_b_analytic: None,
            n_total_k: None,
            n_total_minus_k: None,
            r_numeric: None,
            r_analytic: None,
            diagnostics: None,
            flags: Vec::new(),
        }
    }

    pub fn is_flagged(&self) -> bool {
        !self.flags.is_empty()
    }

    pub fn flags_text(&self) -> String {
        self.flags.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(";")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis: ScanAxis,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn column(&self, column: Column) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| column.value(r)).collect()
    }
}

/// Value columns of a [`SweepTable`], named as in the CSV header.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Column {
    NA,
    NB,
    G2A,
    G2B,
    NAAnalytic,
    NBAnalytic,
    G2AAnalytic,
    G2BAnalytic,
    NTotalK,
    NTotalMinusK,
    RNumeric,
    RAnalytic,
}

impl Column {
    pub const ALL: [Column; 12] = [
        Column::NA,
        Column::NB,
        Column::G2A,
        Column::G2B,
        Column::NAAnalytic,
        Column::NBAnalytic,
        Column::G2AAnalytic,
        Column::G2BAnalytic,
        Column::NTotalK,
        Column::NTotalMinusK,
        Column::RNumeric,
        Column::RAnalytic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Column::NA => "n_a",
            Column::NB => "n_b",
            Column::G2A => "g2_a",
            Column::G2B => "g2_b",
            Column::NAAnalytic => "n_a_analytic",
            Column::NBAnalytic => "n_b_analytic",
            Column::G2AAnalytic => "g2_a_analytic",
            Column::G2BAnalytic => "g2_b_analytic",
            Column::NTotalK => "N_total_k",
            Column::NTotalMinusK => "N_total_minus_k",
            Column::RNumeric => "R_numeric",
            Column::RAnalytic => "R_analytic",
        }
    }

    pub fn value(self, row: &SweepRow) -> Option<f64> {
        match self {
            Column::NA => row.n_a,
            Column::NB => row.n_b,
            Column::G2A => row.g2_a,
            Column::G2B => row.g2_b,
            Column::NAAnalytic => row.n_a_analytic,
            Column::NBAnalytic => row.n_b_analytic,
            Column::G2AAnalytic => row.g2_a_analytic,
            Column::G2BAnalytic => row.g2_b_analytic,
            Column::NTotalK => row.n_total_k,
            Column::NTotalMinusK => row.n_total_minus_k,
            Column::RNumeric => row.r_numeric,
            Column::RAnalytic => row.r_analytic,
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Column {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Column::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown column `{s}`"))
    }
}

fn worst(a: Option<StateDiagnostics>, b: StateDiagnostics) -> StateDiagnostics {
    match a {
        None => b,
        Some(a) => StateDiagnostics {
            hermiticity: a.hermiticity.max(b.hermiticity),
            trace_error: a.trace_error.max(b.trace_error),
            min_eigenvalue: a.min_eigenvalue.min(b.min_eigenvalue),
        },
    }
}

fn finite_or_flag(v: f64, mode: Mode, flags: &mut Vec<RowFlag>) -> Option<f64> {
    if v.is_finite() {
        Some(v)
    } else {
        flags.push(RowFlag::G2Undefined { mode, analytic: true });
        None
    }
}

/// Evaluate one grid point. Solver failures become flags.
pub fn compute_row(cfg: &SweepConfig, coordinate: f64) -> SweepRow {
    let p = cfg.params_at(coordinate);
    let mut row = SweepRow::empty(coordinate, &p);
    let out = cfg.outputs;
    let pair = out.rectification || out.currents;
    let need = |pump: Pump| pair || (out.numeric && p.pump == pump);

    let solve = |pump: Pump, row: &mut SweepRow| -> Option<DensityMatrix> {
        if !need(pump) {
            return None;
        }
        let q = p.with_pump(pump);
        match q.basis().and_then(|b| steady_state(&q, &b)) {
            Ok(rho) => {
                row.diagnostics = Some(worst(row.diagnostics, rho.diagnostics()));
                Some(rho)
            }
            Err(e) => {
                row.flags.push(RowFlag::NumericFailed(e.to_string()));
                None
            }
        }
    };
    let fwd = solve(Pump::LeftA, &mut row);
    let bwd = solve(Pump::RightB, &mut row);

    if out.numeric {
        let own = match p.pump {
            Pump::LeftA => fwd.as_ref(),
            Pump::RightB => bwd.as_ref(),
        };
        if let Some(rho) = own {
            row.n_a = Some(mean_photon(rho, Mode::A));
            row.n_b = Some(mean_photon(rho, Mode::B));
            for mode in [Mode::A, Mode::B] {
                let g = match g2_zero(rho, mode) {
                    Ok(g) => Some(g),
                    Err(_) => {
                        row.flags.push(RowFlag::G2Undefined { mode, analytic: false });
                        None
                    }
                };
                match mode {
                    Mode::A => row.g2_a = g,
                    Mode::B => row.g2_b = g,
                }
            }
        }
    }

    if out.analytic {
        match analytic_observables(&p) {
            Ok(o) => {
                row.n_a_analytic = Some(o.n_a);
                row.n_b_analytic = Some(o.n_b);
                row.g2_a_analytic = finite_or_flag(o.g2_a, Mode::A, &mut row.flags);
                row.g2_b_analytic = finite_or_flag(o.g2_b, Mode::B, &mut row.flags);
            }
            Err(e) => row.flags.push(RowFlag::AnalyticFailed(e.to_string())),
        }
    }

    if pair {
        if let (Some(f), Some(b)) = (fwd.as_ref(), bwd.as_ref()) {
            match rectification_from_states(&p, f, b) {
                Ok(r) => {
                    if out.rectification {
                        row.r_numeric = Some(r.r);
                    }
                    if out.currents {
                        row.n_total_k = Some(r.total_forward);
                        row.n_total_minus_k = Some(r.total_backward);
                    }
                }
                Err(e) => {
                    if out.currents {
                        row.n_total_k = Some(0.0);
                        row.n_total_minus_k = Some(0.0);
                    }
                    if out.rectification {
                        row.flags.push(RowFlag::RectificationFailed(e.to_string()));
                    }
                }
            }
        }
        if out.rectification {
            let r = analytic_rectification(&p);
            if r.is_finite() {
                row.r_analytic = Some(r);
            }
        }
    }
    row
}

/// Evaluate every grid point on a bounded worker pool. Rows come back in
/// grid order regardless of scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepTable, SweepError> {
    cfg.validate()?;
    let coords = cfg.coordinates();
    let threads = if cfg.threads == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        cfg.threads
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| SweepError::Pool(e.to_string()))?;
    let rows = pool.install(|| coords.par_iter().map(|&c| compute_row(cfg, c)).collect());
    Ok(SweepTable { axis: cfg.scan, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Feature {
    pub coordinate: f64,
    pub value: f64,
    pub kind: FeatureKind,
}

/// Vertex of the parabola through three points; `None` if they are collinear.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> Option<(f64, f64)> {
    let denom = (x[0] - x[1]) * (x[0] - x[2]) * (x[1] - x[2]);
    let a = (x[2] * (y[1] - y[0]) + x[1] * (y[0] - y[2]) + x[0] * (y[2] - y[1])) / denom;
    let b = (x[2] * x[2] * (y[0] - y[1]) + x[1] * x[1] * (y[2] - y[0]) + x[0] * x[0] * (y[1] - y[2])) / denom;
    let c = (x[1] * x[2] * (x[1] - x[2]) * y[0] + x[2] * x[0] * (x[2] - x[0]) * y[1] + x[0] * x[1] * (x[0] - x[1]) * y[2])
        / denom;
    if a == 0.0 || !a.is_finite() {
        return None;
    }
    let xv = (-b / (2.0 * a)).clamp(x[0].min(x[2]), x[0].max(x[2]));
    Some((xv, a * xv * xv + b * xv + c))
}

/// Strict interior local extrema of `column`, refined by parabolic
/// interpolation. Rows with an empty cell never count as a neighbour.
pub fn find_features(table: &SweepTable, column: Column) -> Vec<Feature> {
    if table.rows.len() < 5 {
        return Vec::new();
    }
    let xs: Vec<f64> = table.rows.iter().map(|r| r.coordinate).collect();
    let ys = table.column(column);
    let mut out = Vec::new();
    for i in 1..xs.len() - 1 {
        let (Some(y0), Some(y1), Some(y2)) = (ys[i - 1], ys[i], ys[i + 1]) else {
            continue;
        };
        let kind = if y1 < y0 && y1 < y2 {
            FeatureKind::Min
        } else if y1 > y0 && y1 > y2 {
            FeatureKind::Max
        } else {
            continue;
        };
        let (coordinate, value) =
            parabola_vertex([xs[i - 1], xs[i], xs[i + 1]], [y0, y1, y2]).unwrap_or((xs[i], y1));
        out.push(Feature { coordinate, value, kind });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(values: &[f64]) -> SweepTable {
        let p = ModelParams::default();
        SweepTable {
            axis: ScanAxis::DeltaA,
            rows: values
                .iter()
                .enumerate()
                .map(|(i, &v)| SweepRow {
                    g2_a: Some(v),
                    ..SweepRow::empty(i as f64, &p)
                })
                .collect(),
        }
    }

    #[test]
    fn monotone_column_has_no_features() {
        let t = synthetic(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert!(find_features(&t, Column::G2A).is_empty());
    }

    #[test]
    fn short_tables_have_no_features() {
        let t = synthetic(&[1.0, 0.0, 1.0, 0.0]);
        assert!(find_features(&t, Column::G2A).is_empty());
    }

    #[test]
    fn parabolic_refinement_recovers_vertex() {
        let vals: Vec<f64> = (0..7).map(|i| (i as f64 - 2.3).powi(2) + 1.0).collect();
        let f = find_features(&synthetic(&vals), Column::G2A);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].kind, FeatureKind::Min);
        assert!((f[0].coordinate - 2.3).abs() < 1e-12);
        assert!((f[0].value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plateaus_are_not_strict_extrema() {
        let t = synthetic(&[0.0, 1.0, 1.0, 0.0, 2.0, 3.0]);
        let f = find_features(&t, Column::G2A);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].kind, FeatureKind::Min);
    }

    #[test]
    fn coordinate_maps() {
        let p = ModelParams::default();
        let mut cfg = SweepConfig::new(ScanAxis::X, -60.0, 60.0, 241, p);
        cfg.delta_fixed = 30.0;
        let q = cfg.params_at(30.0);
        assert_eq!((q.delta_a, q.delta_b), (0.0, 30.0));
        assert!((q.delta_b + 2.0 * q.delta_a - 30.0).abs() < 1e-12);
        cfg.scan = ScanAxis::DeltaA;
        let q = cfg.params_at(1.5);
        assert_eq!((q.delta_a, q.delta_b), (1.5, 3.0));
        cfg.scan = ScanAxis::DeltaB;
        let q = cfg.params_at(1.5);
        assert_eq!((q.delta_a, q.delta_b), (0.75, 1.5));
        let xs = cfg.coordinates();
        assert_eq!(xs.len(), 241);
        assert_eq!(xs[120], 0.0);
        assert_eq!(*xs.last().unwrap(), 60.0);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let p = ModelParams::default();
        assert!(SweepConfig::new(ScanAxis::X, 0.0, 1.0, 2, p).validate().is_err());
        assert!(SweepConfig::new(ScanAxis::X, 1.0, 0.0, 5, p).validate().is_err());
        assert!(SweepConfig::new(ScanAxis::X, 0.0, 1.0, 5, p).validate().is_ok());
    }

    #[test]
    fn undriven_sweep_flags_undefined_correlations() {
        let p = ModelParams::default().with_drive(0.0);
        let cfg = SweepConfig::new(ScanAxis::DeltaA, -1.0, 1.0, 3, p);
        let t = run_sweep(&cfg).unwrap();
        assert_eq!(t.rows.len(), 3);
        for r in &t.rows {
            assert_eq!(r.n_a, Some(0.0));
            assert_eq!(r.g2_a, None);
            assert_eq!(r.g2_b, None);
            assert!(r.flags.contains(&RowFlag::G2Undefined { mode: Mode::A, analytic: false }));
            assert!(r.flags.contains(&RowFlag::G2Undefined { mode: Mode::B, analytic: false }));
        }
    }

    #[test]
    fn sweeps_are_deterministic() {
        let p = ModelParams::default();
        let mut cfg = SweepConfig::new(ScanAxis::DeltaA, -2.0, 2.0, 9, p);
        cfg.outputs = Outputs::ALL;
        let a = run_sweep(&cfg).unwrap();
        cfg.threads = 3;
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.rows.windows(2).all(|w| w[0].coordinate < w[1].coordinate));
    }
}

use std::process::{Command as Process, Output};

use proptest::prelude::*;

use qdiode::config::{parse_config, Command, ConfigError, Format, RunConfig, SweepSpec, TauSpec};
use qdiode::sweep::{Column, ScanAxis};
use qdiode_core::{Mode, ModelParams, Pump};

fn args(s: &[&str]) -> Vec<String> {
    s.iter().map(|x| x.to_string()).collect()
}

fn qdiode(argv: &[&str]) -> Output {
    Process::new(env!("CARGO_BIN_EXE_qdiode"))
        .args(argv)
        .output()
        .expect("binary runs")
}

#[test]
fn blockade_sweep_configuration() {
    let cfg = parse_config(
        &args(&[
            "sweep", "--scan", "delta-a", "--lo", "-8", "--hi", "8", "--n", "400", "--omega", "4", "--f", "0.2",
            "--kappa-a", "1", "--pump", "a",
        ]),
        None,
    )
    .unwrap();
    assert_eq!(
        cfg.command,
        Command::Sweep(SweepSpec {
            scan: ScanAxis::DeltaA,
            lo: -8.0,
            hi: 8.0,
            n: 400,
            delta_fixed: 0.0,
        })
    );
    assert_eq!(cfg.params, ModelParams::new(0.0, 0.0, 4.0, 0.2, 1.0, Pump::LeftA));
    assert_eq!(cfg.format, Format::Csv);
}

#[test]
fn undriven_steady_state_reports_vacuum() {
    let out = qdiode(&["steady", "--f", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n_a"], 0.0);
    assert_eq!(v["n_b"], 0.0);
    assert!(v["g2_a"].is_null() && v["g2_b"].is_null());
    let flags: Vec<&str> = v["flags"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    assert_eq!(flags, ["g2_a_undefined", "g2_b_undefined"]);
}

#[test]
fn unknown_flag_exits_with_config_error() {
    let out = qdiode(&["sweep", "--scan", "x", "--bogus", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
    let err = parse_config(&args(&["sweep", "--scan", "x", "--bogus", "1"]), None).unwrap_err();
    assert!(matches!(err, ConfigError::UnknownKey(k) if k.contains("bogus")));
}

#[test]
fn missing_command_is_a_config_error() {
    assert_eq!(qdiode(&["--omega", "4"]).status.code(), Some(2));
}

#[test]
fn rect_table_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rect.csv");
    let p = path.to_str().unwrap();
    let argv = [
        "rect", "--omega", "10", "--f", "0.1", "--kappa-a", "0.1", "--delta-fixed", "30", "--lo", "25", "--hi", "35",
        "--n", "5", "--out", p,
    ];
    assert_eq!(qdiode(&argv).status.code(), Some(0));
    let first = std::fs::read_to_string(&path).unwrap();
    let mut lines = first.lines();
    assert_eq!(lines.next(), Some("x,R_numeric,R_analytic,N_k,N_minus_k"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    for r in &rows {
        assert!((-1.0..=1.0).contains(&r[1]) && (-1.0..=1.0).contains(&r[2]));
        assert!(r[3] > 0.0 && r[4] > 0.0);
    }
    // Re-running replaces the file in place.
    assert_eq!(qdiode(&argv).status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), first);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn delayed_correlation_table_columns() {
    let out = qdiode(&[
        "g2tau", "--delta-a", "1.2", "--delta-b", "1", "--omega", "25", "--f", "1.8", "--kappa-a", "4", "--tau-max",
        "0.5", "--tau-n", "6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("tau,g2_numeric,g2_analytic"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[5][0], 0.5);
    assert!(rows.iter().all(|r| r[1] >= 0.0 && r[2] >= 0.0));
}

#[test]
fn undriven_sweep_rows_are_flagged() {
    let out = qdiode(&["sweep", "--scan", "delta-a", "--lo", "-1", "--hi", "1", "--n", "3", "--f", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert!(r.contains("g2_a_undefined") && r.contains("g2_b_undefined"), "{r}");
    }
}

#[test]
fn features_of_the_blockade_dip() {
    let out = qdiode(&[
        "features", "--scan", "delta-a", "--lo", "-1", "--hi", "1", "--n", "21", "--column", "g2_a", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let dips: Vec<f64> = v
        .as_array()
        .unwrap()
        .iter()
        .filter(|f| f["kind"] == "min")
        .map(|f| f["coordinate"].as_f64().unwrap())
        .collect();
    assert_eq!(dips.len(), 1);
    assert!(dips[0].abs() < 0.1, "{dips:?}");
}

#[test]
fn config_file_is_read_and_overridden() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.conf");
    std::fs::write(&file, "# blockade\nomega=4\nf=0.3\npump=b\n").unwrap();
    let cfg = parse_config(&args(&["steady", "--config", file.to_str().unwrap(), "--f", "0.1"]), None).unwrap();
    assert_eq!(cfg.params.omega_nl, 4.0);
    assert_eq!(cfg.params.drive_f, 0.1);
    assert_eq!(cfg.params.pump, Pump::RightB);
    std::fs::write(&file, "gamma=1\n").unwrap();
    let out = qdiode(&["steady", "--config", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

fn sweep_spec() -> impl Strategy<Value = SweepSpec> {
    (
        prop_oneof![Just(ScanAxis::DeltaA), Just(ScanAxis::DeltaB), Just(ScanAxis::X)],
        -100.0..0.0f64,
        0.001..100.0f64,
        3usize..2000,
        -60.0..60.0f64,
    )
        .prop_map(|(scan, lo, hi, n, delta_fixed)| SweepSpec {
            scan,
            lo,
            hi,
            n,
            delta_fixed,
        })
}

fn command() -> impl Strategy<Value = Command> {
    let column = prop::sample::select(Column::ALL.to_vec());
    prop_oneof![
        Just(Command::Steady),
        Just(Command::Validate),
        (0.01..50.0f64, 2usize..5000, prop::bool::ANY).prop_map(|(tau_max, tau_n, a)| Command::G2Tau(TauSpec {
            tau_max,
            tau_n,
            mode: if a { Mode::A } else { Mode::B },
        })),
        sweep_spec().prop_map(Command::Sweep),
        sweep_spec().prop_map(Command::Rect),
        (sweep_spec(), column).prop_map(|(sweep, column)| Command::Features { sweep, column }),
    ]
}

fn run_config() -> impl Strategy<Value = RunConfig> {
    (
        command(),
        (-50.0..50.0f64, -50.0..50.0f64, 0.0..30.0f64, 0.0..5.0f64, 0.01..10.0f64),
        (prop::bool::ANY, 2usize..9, 1usize..7),
        prop::option::of("[a-z]{1,8}\\.(csv|json)"),
        prop::bool::ANY,
    )
        .prop_map(|(command, (da, db, om, f, ka), (pa, na, nb), out, csv)| {
            let pump = if pa { Pump::LeftA } else { Pump::RightB };
            RunConfig {
                command,
                params: ModelParams::new(da, db, om, f, ka, pump).with_truncation(na, nb),
                out: out.map(Into::into),
                format: if csv { Format::Csv } else { Format::Json },
            }
        })
}

proptest! {
    #[test]
    fn flag_rendering_round_trips(cfg in run_config()) {
        let parsed = parse_config(&cfg.to_args(), None).unwrap();
        prop_assert_eq!(parsed, cfg);
    }
}

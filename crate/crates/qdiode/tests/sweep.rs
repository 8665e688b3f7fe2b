use qdiode::sweep::{compute_row, find_features, run_sweep, Column, FeatureKind, Outputs, ScanAxis, SweepConfig};
use qdiode_core::analytic::analytic_rectification;
use qdiode_core::dynamics::steady_state;
use qdiode_core::observables::{g2_zero, mean_photon, rectification_report};
use qdiode_core::{Mode, ModelParams, Pump};

#[test]
fn rows_match_direct_solves() {
    let p = ModelParams::new(0.0, 0.0, 10.0, 0.1, 0.1, Pump::RightB);
    let mut cfg = SweepConfig::new(ScanAxis::X, -40.0, 40.0, 5, p);
    cfg.delta_fixed = 30.0;
    cfg.outputs = Outputs::ALL;
    let t = run_sweep(&cfg).unwrap();
    for row in &t.rows {
        let q = cfg.params_at(row.coordinate);
        assert!((q.delta_b + 2.0 * q.delta_a - row.coordinate).abs() < 1e-12);
        assert!((q.delta_b - 2.0 * q.delta_a - 30.0).abs() < 1e-12);
        let rho = steady_state(&q, &q.basis().unwrap()).unwrap();
        assert_eq!(row.n_a, Some(mean_photon(&rho, Mode::A)));
        assert_eq!(row.g2_b, Some(g2_zero(&rho, Mode::B).unwrap()));
        let r = rectification_report(&q).unwrap();
        assert_eq!(row.r_numeric, Some(r.r));
        assert_eq!(row.n_total_k, Some(r.total_forward));
        assert_eq!(row.r_analytic, Some(analytic_rectification(&q)));
        assert!(row.diagnostics.unwrap().is_physical());
        assert!(row.flags.is_empty());
    }
    assert_eq!(t.rows[2], compute_row(&cfg, 0.0));
}

#[test]
fn blockade_dip_is_found_at_resonance() {
    let p = ModelParams::new(0.0, 0.0, 4.0, 0.2, 1.0, Pump::LeftA);
    let t = run_sweep(&SweepConfig::new(ScanAxis::DeltaA, -1.0, 1.0, 41, p)).unwrap();
    let minima: Vec<_> = find_features(&t, Column::G2A)
        .into_iter()
        .filter(|f| f.kind == FeatureKind::Min)
        .collect();
    assert_eq!(minima.len(), 1);
    assert!(minima[0].coordinate.abs() < 0.05);
    assert!(minima[0].value < 1e-3);
}

#[test]
fn analytic_columns_follow_the_template_pump() {
    let p = ModelParams::new(0.0, 0.0, 4.0, 0.05, 1.0, Pump::RightB);
    let t = run_sweep(&SweepConfig::new(ScanAxis::DeltaB, 2.0, 4.0, 3, p)).unwrap();
    for row in &t.rows {
        let num = row.n_b.unwrap();
        let an = row.n_b_analytic.unwrap();
        assert!((an - num).abs() / num < 0.05, "{an} vs {num}");
        assert_eq!(row.r_numeric, None);
    }
}

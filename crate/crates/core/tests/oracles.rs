//! Reference values computed beforehand with an independent dense
//! master-equation solver (numpy/scipy, row-major vectorized Liouvillian),
//! frozen here as regression anchors.

use qdiode_core::analytic::{analytic_observables, two_photon_rabi};
use qdiode_core::dynamics::{evolve, steady_state, undriven_eigensystem};
use qdiode_core::observables::{g2_zero, mean_photon};
use qdiode_core::{DensityMatrix, Mode, ModelParams, Pump};

fn fig2(pump: Pump) -> ModelParams {
    ModelParams::new(0.0, 0.0, 4.0, 0.2, 1.0, pump)
}

fn close(x: f64, reference: f64, rel: f64) -> bool {
    (x - reference).abs() <= rel * reference.abs()
}

#[test]
fn left_drive_blockade_dip() {
    let p = fig2(Pump::LeftA);
    let rho = steady_state(&p, &p.basis().unwrap()).unwrap();
    let n_a = mean_photon(&rho, Mode::A);
    let g_a = g2_zero(&rho, Mode::A).unwrap();
    let n_b = mean_photon(&rho, Mode::B);
    let g_b = g2_zero(&rho, Mode::B).unwrap();
    assert!(close(n_a, 0.121_155_879_974_838_12, 1e-8), "{n_a}");
    assert!(close(g_a, 4.761_140_571_048_512_6e-4, 1e-7), "{g_a}");
    assert!(close(n_b, 2.953_933_360_224_752e-4, 1e-8), "{n_b}");
    assert!(close(g_b, 0.045_508_617_019_278_95, 1e-7), "{g_b}");
}

#[test]
fn right_drive_dark_state_bunching() {
    let p = fig2(Pump::RightB);
    let rho = steady_state(&p, &p.basis().unwrap()).unwrap();
    assert!(close(mean_photon(&rho, Mode::A), 4.828_485_397_173_786e-3, 1e-8));
    assert!(close(mean_photon(&rho, Mode::B), 3.926_141_771_525_555e-5, 1e-8));
    assert!(close(g2_zero(&rho, Mode::A).unwrap(), 104.126_293_752_747_39, 1e-7));
    let g_b = g2_zero(&rho, Mode::B).unwrap();
    assert!(close(g_b, 642.231_133_748_474, 1e-7), "{g_b}");
}

#[test]
fn long_time_evolution_reaches_the_steady_state() {
    for pump in [Pump::LeftA, Pump::RightB] {
        let p = fig2(pump);
        let basis = p.basis().unwrap();
        let ss = steady_state(&p, &basis).unwrap();
        let late = evolve(&DensityMatrix::vacuum(&basis), &p, 50.0, p.stable_dt()).unwrap();
        let d = late.trace_distance(&ss).unwrap();
        assert!(d < 1e-6, "{pump:?}: {d}");
        assert!((late.trace().re - 1.0).abs() < 1e-8);
    }
}

#[test]
fn steady_state_agrees_with_t200_integration() {
    let p = fig2(Pump::LeftA).with_detunings(0.3, 0.6);
    let basis = p.basis().unwrap();
    let ss = steady_state(&p, &basis).unwrap();
    let late = evolve(&DensityMatrix::vacuum(&basis), &p, 200.0, 1e-3).unwrap();
    assert!(late.trace_distance(&ss).unwrap() < 1e-6);
}

#[test]
fn analytic_blockade_dip_converges_with_weaker_drive() {
    // At F = 0.2 the dip is so deep that O(F²) corrections halve it
    // (0.000238 analytic vs 0.000476 numeric); the gap closes as F shrinks.
    let mut errors = Vec::new();
    for f in [0.2, 0.1, 0.05] {
        let p = fig2(Pump::LeftA).with_drive(f);
        let rho = steady_state(&p, &p.basis().unwrap()).unwrap();
        let an = analytic_observables(&p).unwrap();
        let g = g2_zero(&rho, Mode::A).unwrap();
        assert!(an.g2_a < 0.1 && g < 0.1);
        errors.push((an.g2_a - g).abs() / g);
    }
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    assert!(errors[2] < 0.1, "{errors:?}");
}

#[test]
fn eigenvectors_are_normalized_symmetric_pairs() {
    let p = fig2(Pump::LeftA).with_drive(0.0);
    let basis = p.basis().unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for e in undriven_eigensystem(&p, &basis).iter().filter(|e| e.excitations == 2) {
        let c01 = e.vector[basis.index(0, 1)];
        let c20 = e.vector[basis.index(2, 0)];
        // (|01⟩ ± |20⟩)/√2, not |01⟩/√2 ± |20⟩.
        assert!((c01.norm() - s).abs() < 1e-12 && (c20.norm() - s).abs() < 1e-12);
    }
}

#[test]
fn rabi_sum_at_generic_detuning() {
    // Term-by-term sum with |2±⟩ = (|01⟩ ± |20⟩)/√2, evaluated by hand:
    // F²/√2 · [1/(1 + 4√2) + 1/(1 − 4√2)].
    let p = ModelParams::new(0.0, 1.0, 4.0, 0.2, 1.0, Pump::RightB);
    let w = two_photon_rabi(&p).unwrap();
    let r = 4.0 * 2f64.sqrt();
    let expected = 0.04 / 2f64.sqrt() * (1.0 / (1.0 + r) + 1.0 / (1.0 - r));
    assert!((w.re - expected).abs() < 1e-15);
    assert!((w.re + 1.824_791_693_384_638_4e-3).abs() < 1e-15);
}

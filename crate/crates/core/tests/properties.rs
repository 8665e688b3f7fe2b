use proptest::prelude::*;

use qdiode_core::analytic::{
    amplitude_derivative, amplitude_fixed_point_solve, analytic_rectification, resonance_locus,
    steady_amplitudes, two_photon_rabi,
};
use qdiode_core::dynamics::{build_hamiltonian, lindblad_derivative};
use qdiode_core::fock::{build_basis, lowering_operator, Operator};
use qdiode_core::{DensityMatrix, Mode, ModelParams, Pump, C64};

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn operator(dim: usize) -> impl Strategy<Value = Operator> {
    prop::collection::vec(complex(), dim * dim)
        .prop_map(move |data| Operator::from_row_major(dim, data).unwrap())
}

fn pump() -> impl Strategy<Value = Pump> {
    prop_oneof![Just(Pump::LeftA), Just(Pump::RightB)]
}

fn weak_drive_params() -> impl Strategy<Value = ModelParams> {
    (
        -10.0..10.0f64,
        -10.0..10.0f64,
        0.0..10.0f64,
        0.01..0.3f64,
        0.1..5.0f64,
        pump(),
    )
        .prop_map(|(da, db, om, f, ka, pump)| ModelParams::new(da, db, om, f, ka, pump))
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

proptest! {
    #[test]
    fn adjoint_is_an_involution(x in operator(5)) {
        prop_assert_eq!(x.adjoint().adjoint(), x);
    }

    #[test]
    fn compose_is_associative(x in operator(4), y in operator(4), z in operator(4)) {
        let left = x.compose(&y).unwrap().compose(&z).unwrap();
        let right = x.compose(&y.compose(&z).unwrap()).unwrap();
        prop_assert!((&left - &right).max_abs() < 1e-12);
    }

    #[test]
    fn flat_index_is_a_bijection(na in 2usize..9, nb in 1usize..7) {
        let basis = build_basis(na, nb).unwrap();
        prop_assert_eq!(basis.dim(), (na + 1) * (nb + 1));
        let mut seen = vec![false; basis.dim()];
        for m in 0..=na {
            for n in 0..=nb {
                let i = basis.index(m, n);
                prop_assert!(!seen[i]);
                seen[i] = true;
                prop_assert_eq!(basis.occupation(i), (m, n));
            }
        }
    }

    #[test]
    fn canonical_commutator_below_cutoff(
        na in 2usize..7,
        nb in 1usize..5,
        seed in prop::collection::vec(complex(), 64),
    ) {
        let basis = build_basis(na, nb).unwrap();
        let mut psi = vec![C64::new(0.0, 0.0); basis.dim()];
        for i in 0..basis.dim() {
            if basis.occupation(i).0 < na {
                psi[i] = seed[i % seed.len()];
            }
        }
        let norm = vec_norm(&psi);
        prop_assume!(norm > 1e-3);
        for z in psi.iter_mut() {
            *z /= norm;
        }
        let a = lowering_operator(&basis, Mode::A);
        let comm = a.commutator(&a.adjoint()).unwrap();
        let image = comm.apply(&psi).unwrap();
        let value: C64 = psi.iter().zip(&image).map(|(p, q)| p.conj() * q).sum();
        prop_assert!((value - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn lindblad_derivative_is_traceless(
        params in weak_drive_params(),
        ket in prop::collection::vec(complex(), 12),
        weights in prop::collection::vec(0.0..1.0f64, 3),
    ) {
        let p = params.with_truncation(3, 2);
        let basis = p.basis().unwrap();
        // Random mixture of three pure states.
        let mut rho = Operator::zeros(basis.dim());
        for (k, w) in weights.iter().enumerate() {
            let v: Vec<C64> = (0..basis.dim()).map(|i| ket[(i + 5 * k) % ket.len()] + C64::new(0.1 * k as f64, 0.0)).collect();
            let n = vec_norm(&v).powi(2);
            rho = &rho + &Operator::outer(&v, &v).unwrap().scaled(C64::new(w / n, 0.0));
        }
        let tr = rho.trace();
        prop_assume!(tr.re > 1e-3);
        let rho = DensityMatrix::from_operator(&basis, rho.scaled(tr.inv())).unwrap();
        let d = lindblad_derivative(&rho, &build_hamiltonian(&p, &basis), &p).unwrap();
        prop_assert!(d.trace().norm() < 1e-12);
    }

    #[test]
    fn steady_amplitudes_are_a_fixed_point(p in weak_drive_params()) {
        let c = steady_amplitudes(&p).unwrap();
        prop_assert!(amplitude_derivative(&c, &p).max_abs() < 1e-10);
        let oracle = amplitude_fixed_point_solve(&p).to_array();
        let diff: Vec<C64> = c.to_array().iter().zip(&oracle).map(|(x, y)| x - y).collect();
        prop_assert!(vec_norm(&diff) <= 1e-10 * vec_norm(&oracle));
        if p.pump == Pump::RightB {
            prop_assert_eq!(c.c10, C64::new(0.0, 0.0));
            prop_assert_eq!(c.c11, C64::new(0.0, 0.0));
            prop_assert_eq!(c.c30, C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn rabi_frequency_is_odd(db in -30.0..30.0f64, om in 0.1..10.0f64, f in 0.0..1.0f64) {
        prop_assume!((db.abs() - 2f64.sqrt() * om).abs() > 1e-6);
        let p = ModelParams::new(0.0, db, om, f, 1.0, Pump::RightB);
        let q = p.with_detunings(0.0, -db);
        prop_assert_eq!(two_photon_rabi(&p).unwrap(), -two_photon_rabi(&q).unwrap());
    }

    #[test]
    fn analytic_rectification_is_bounded(p in weak_drive_params()) {
        let r = analytic_rectification(&p);
        prop_assert!((-1.0..=1.0).contains(&r));
    }

    #[test]
    fn locus_points_lie_on_the_ellipse(om in 0.0..20.0f64, excess in 0.0..60.0f64, sign in prop::bool::ANY) {
        let x = (8.0 * om * om).sqrt() + excess;
        let x = if sign { x } else { -x };
        for d in resonance_locus(om, x).unwrap() {
            prop_assert!((d * d + 8.0 * om * om - x * x).abs() <= 1e-9 * x * x);
        }
    }
}

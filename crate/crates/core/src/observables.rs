//! Photon numbers, output currents, second-order correlations and the
//! rectification factor.

use alloc::vec::Vec;

use crate::dynamics::{steady_state, Integrator, ModelParams, Pump};
use crate::error::{Error, Result};
use crate::fock::{lowering_operator, FockBasis, Mode};
use crate::state::DensityMatrix;

/// Populations below this make g² undefined.
pub const MIN_POPULATION: f64 = 1e-14;

fn diagonal_moment(rho: &DensityMatrix, mode: Mode, weight: impl Fn(f64) -> f64) -> f64 {
    let basis = rho.basis();
    (0..basis.dim())
        .map(|i| {
            let (m, n) = basis.occupation(i);
            let k = match mode {
                Mode::A => m,
                Mode::B => n,
            } as f64;
            weight(k) * rho.get(i, i).re
        })
        .sum()
}

/// ⟨ĥ†ĥ⟩
pub fn mean_photon(rho: &DensityMatrix, mode: Mode) -> f64 {
    diagonal_moment(rho, mode, |k| k)
}

/// N_j = κ_j ⟨ĥ_j†ĥ_j⟩
pub fn output_current(rho: &DensityMatrix, mode: Mode, p: &ModelParams) -> f64 {
    p.kappa(mode) * mean_photon(rho, mode)
}

/// ⟨ĥ†²ĥ²⟩ / ⟨ĥ†ĥ⟩²
pub fn g2_zero(rho: &DensityMatrix, mode: Mode) -> Result<f64> {
    let n = mean_photon(rho, mode);
    if !(n > MIN_POPULATION) {
        return Err(Error::VanishingPopulation { mode, population: n });
    }
    Ok(diagonal_moment(rho, mode, |k| k * (k - 1.0)) / (n * n))
}

/// g²(τ) samples with the equal-time reference used for the classical bound
/// g²(τ) ≤ g²(0).
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSeries {
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
    /// Equal-time value the series is compared against.
    pub g2_zero: f64,
}

impl CorrelationSeries {
    /// Per-sample flag: g²(τ) exceeds g²(0) by more than `tol`.
    pub fn schwarz_violations(&self, tol: f64) -> Vec<bool> {
        self.values.iter().map(|&v| v > self.g2_zero + tol).collect()
    }

    pub fn violates_schwarz(&self, tol: f64) -> bool {
        self.schwarz_violations(tol).into_iter().any(|f| f)
    }

    /// (τ, value) of the largest sample.
    pub fn maximum(&self) -> Option<(f64, f64)> {
        self.taus
            .iter()
            .zip(&self.values)
            .fold(None, |best: Option<(f64, f64)>, (&t, &v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((t, v)),
            })
    }

    pub fn is_finite_nonnegative(&self) -> bool {
        self.values.iter().all(|v| v.is_finite() && *v >= 0.0)
    }
}

/// Regression-theorem g²(τ) for `mode` at steady state. Negative delays use
/// g²(−τ) = g²(τ).
pub fn g2_delayed(p: &ModelParams, mode: Mode, taus: &[f64]) -> Result<CorrelationSeries> {
    let basis = p.basis()?;
    let rho = steady_state(p, &basis)?;
    g2_delayed_from(p, &rho, mode, taus, p.stable_dt())
}

/// As [`g2_delayed`], from a known steady state and with an explicit RK4 step.
pub fn g2_delayed_from(
    p: &ModelParams,
    rho_ss: &DensityMatrix,
    mode: Mode,
    taus: &[f64],
    dt: f64,
) -> Result<CorrelationSeries> {
    let basis: FockBasis = *rho_ss.basis();
    let n = mean_photon(rho_ss, mode);
    let g0 = g2_zero(rho_ss, mode)?;
    if taus.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParams {
            name: "taus",
            reason: "delays must be finite",
        });
    }

    let h = lowering_operator(&basis, mode);
    let collapsed = h.compose(&rho_ss.to_operator())?.compose(&h.adjoint())?;
    let mut state = DensityMatrix::from_operator(&basis, collapsed)?;

    let mut order: Vec<usize> = (0..taus.len()).collect();
    order.sort_by(|&i, &j| taus[i].abs().total_cmp(&taus[j].abs()));
    let mut values = alloc::vec![0.0; taus.len()];
    let mut integ = Integrator::new(p, &basis);
    let mut t = 0.0;
    for idx in order {
        let target = taus[idx].abs();
        integ.advance(&mut state, target - t, dt)?;
        t = target;
        values[idx] = mean_photon(&state, mode) / (n * n);
    }
    Ok(CorrelationSeries {
        taus: taus.to_vec(),
        values,
        g2_zero: g0,
    })
}

/// Steady-state currents for both drive directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectificationReport {
    /// 2N_b(k) − N_a(−k) over 2N_b(k) + N_a(−k).
    pub r: f64,
    /// Mode-b current with the drive on mode a.
    pub n_b_forward: f64,
    /// Mode-a current with the drive on mode b.
    pub n_a_backward: f64,
    /// N_a(k) + N_b(k)
    pub total_forward: f64,
    /// N_a(−k) + N_b(−k)
    pub total_backward: f64,
}

pub fn rectification_report(p: &ModelParams) -> Result<RectificationReport> {
    let basis = p.basis()?;
    let fwd = steady_state(&p.with_pump(Pump::LeftA), &basis)?;
    let bwd = steady_state(&p.with_pump(Pump::RightB), &basis)?;
    rectification_from_states(p, &fwd, &bwd)
}

/// Rectification from the steady states for a drive on `a` (`fwd`) and on
/// `b` (`bwd`).
pub fn rectification_from_states(
    p: &ModelParams,
    fwd: &DensityMatrix,
    bwd: &DensityMatrix,
) -> Result<RectificationReport> {
    let n_b_forward = output_current(fwd, Mode::B, p);
    let n_a_backward = output_current(bwd, Mode::A, p);
    let num = 2.0 * n_b_forward - n_a_backward;
    let den = 2.0 * n_b_forward + n_a_backward;
    if !(den.abs() >= MIN_POPULATION) {
        return Err(Error::BothCurrentsZero);
    }
    Ok(RectificationReport {
        r: num / den,
        n_b_forward,
        n_a_backward,
        total_forward: output_current(fwd, Mode::A, p) + n_b_forward,
        total_backward: n_a_backward + output_current(bwd, Mode::B, p),
    })
}

/// Numeric rectification factor; the pump field of `p` is ignored.
pub fn rectification_numeric(p: &ModelParams) -> Result<f64> {
    rectification_report(p).map(|r| r.r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_basis;

    #[test]
    fn fock_state_moments() {
        let basis = build_basis(6, 4).unwrap();
        let vac = DensityMatrix::vacuum(&basis);
        assert_eq!(mean_photon(&vac, Mode::A), 0.0);
        assert_eq!(mean_photon(&vac, Mode::B), 0.0);
        let rho = DensityMatrix::fock(&basis, 2, 1);
        assert_eq!(mean_photon(&rho, Mode::A), 2.0);
        assert_eq!(mean_photon(&rho, Mode::B), 1.0);
        let one = DensityMatrix::fock(&basis, 1, 0);
        assert_eq!(g2_zero(&one, Mode::A).unwrap(), 0.0);
        assert!(matches!(
            g2_zero(&vac, Mode::B),
            Err(Error::VanishingPopulation { mode: Mode::B, .. })
        ));
    }

    #[test]
    fn output_current_scales_with_loss() {
        let p = ModelParams::new(0.0, 0.0, 10.0, 0.1, 0.1, Pump::LeftA);
        let basis = p.basis().unwrap();
        let one = DensityMatrix::fock(&basis, 1, 0);
        assert!((output_current(&one, Mode::A, &p) - 0.1).abs() < 1e-15);
        assert_eq!(output_current(&DensityMatrix::vacuum(&basis), Mode::B, &p), 0.0);
    }

    #[test]
    fn coherent_light_is_poissonian() {
        let p = ModelParams::new(0.3, 0.0, 0.0, 0.1, 1.0, Pump::LeftA);
        let rho = steady_state(&p, &p.basis().unwrap()).unwrap();
        let g = g2_zero(&rho, Mode::A).unwrap();
        assert!((g - 1.0).abs() < 1e-6, "{g}");
    }

    #[test]
    fn weak_conversion_rectifies_backwards() {
        // Without coupling neither direction converts, so R is undefined; as
        // Ω → 0 both currents vanish like Ω² and R → −1 + O(F²).
        let p = ModelParams::new(0.0, 0.0, 0.0, 0.2, 1.0, Pump::LeftA);
        assert!(matches!(rectification_numeric(&p), Err(Error::BothCurrentsZero)));
        let p = ModelParams::new(0.0, 0.0, 1e-3, 0.01, 1.0, Pump::LeftA);
        assert!((rectification_numeric(&p).unwrap() + 1.0).abs() < 1e-3);
    }

    #[test]
    fn delayed_correlation_starts_at_equal_time_value() {
        let p = ModelParams::new(0.5, 1.0, 4.0, 0.4, 1.0, Pump::LeftA);
        let s = g2_delayed(&p, Mode::A, &[0.0, 0.5, -0.5, 30.0]).unwrap();
        assert!((s.values[0] - s.g2_zero).abs() / s.g2_zero < 1e-9);
        assert_eq!(s.values[1], s.values[2]);
        assert!((s.values[3] - 1.0).abs() < 1e-3);
        assert!(s.is_finite_nonnegative());
    }
}

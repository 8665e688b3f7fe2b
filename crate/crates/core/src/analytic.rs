//! Eight-level weak-drive model.
//!
//! The state is truncated to |00⟩, |10⟩, |01⟩, |20⟩, |11⟩, |30⟩, |21⟩, |02⟩ and
//! evolved under the non-Hermitian effective Hamiltonian with C₀₀ pinned to 1.
//! Steady amplitudes, equal-time observables, closed forms in terms of the
//! S-function, the analytic rectification factor and delayed correlators all
//! follow from it.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::dynamics::{ModelParams, Pump};
use crate::error::{Error, Result};
use crate::fock::{FockBasis, Mode};
use crate::linalg;
use crate::observables::CorrelationSeries;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Amplitudes C_mn of the truncated state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeState {
    pub c00: C64,
    pub c10: C64,
    pub c01: C64,
    pub c20: C64,
    pub c11: C64,
    pub c30: C64,
    pub c21: C64,
    pub c02: C64,
}

impl AmplitudeState {
    /// Occupations (m, n) in the order of [`AmplitudeState::to_array`].
    pub const KETS: [(usize, usize); 8] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (3, 0), (2, 1), (0, 2)];

    pub fn zero() -> Self {
        Self::from_array([ZERO; 8])
    }

    /// C₀₀ = 1, everything else empty.
    pub fn ground() -> Self {
        Self { c00: ONE, ..Self::zero() }
    }

    pub fn to_array(&self) -> [C64; 8] {
        [self.c00, self.c10, self.c01, self.c20, self.c11, self.c30, self.c21, self.c02]
    }

    pub fn from_array(c: [C64; 8]) -> Self {
        Self {
            c00: c[0],
            c10: c[1],
            c01: c[2],
            c20: c[3],
            c11: c[4],
            c30: c[5],
            c21: c[6],
            c02: c[7],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Unnormalized ket in a full Fock basis.
    pub fn embed(&self, basis: &FockBasis) -> Vec<C64> {
        let mut v = vec![ZERO; basis.dim()];
        for ((m, n), c) in Self::KETS.iter().zip(self.to_array()) {
            v[basis.index(*m, *n)] = c;
        }
        v
    }

    /// Project a full-basis ket onto the eight levels.
    pub fn restrict(basis: &FockBasis, ket: &[C64]) -> Self {
        let mut c = [ZERO; 8];
        for (slot, (m, n)) in c.iter_mut().zip(Self::KETS) {
            *slot = ket[basis.index(m, n)];
        }
        Self::from_array(c)
    }

    fn axpy(&self, h: f64, k: &Self) -> Self {
        let a = self.to_array();
        let b = k.to_array();
        Self::from_array(core::array::from_fn(|i| a[i] + b[i] * h))
    }
}

/// Complex scales of the perturbative expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationScales {
    /// δ_a = κ_a/2 + iΔ_a
    pub delta_a_c: C64,
    /// δ_b = κ_b/2 + iΔ_b
    pub delta_b_c: C64,
    /// α_j = −iF/δ_j
    pub alpha_a: C64,
    pub alpha_b: C64,
    /// x_j = −iΩ/δ_j
    pub x_a: C64,
    pub x_b: C64,
    /// δ_b/δ_a
    pub y: C64,
    /// (F/κ)²
    pub n0: f64,
}

impl PerturbationScales {
    pub fn new(p: &ModelParams) -> Self {
        let da = C64::new(0.5 * p.kappa_a, p.delta_a);
        let db = C64::new(0.5 * p.kappa_b, p.delta_b);
        Self {
            delta_a_c: da,
            delta_b_c: db,
            alpha_a: -I * p.drive_f / da,
            alpha_b: -I * p.drive_f / db,
            x_a: -I * p.omega_nl / da,
            x_b: -I * p.omega_nl / db,
            y: db / da,
            n0: p.drive_f * p.drive_f,
        }
    }

    /// max(|α_a|², |α_b|², |α_a α_b|), which must be small for the expansion.
    pub fn weak_drive_magnitude(&self) -> f64 {
        self.alpha_a
            .norm_sqr()
            .max(self.alpha_b.norm_sqr())
            .max((self.alpha_a * self.alpha_b).norm())
    }
}

/// S(a,b,c,d,e) = (aκ_a + bΔ_a + cΩ²)² + (dκ_a + eΔ_a)².
pub fn s_function(a: f64, b: f64, c: f64, d: f64, e: f64, p: &ModelParams) -> f64 {
    let first = a * p.kappa_a + b * p.delta_a + c * p.omega_nl * p.omega_nl;
    let second = d * p.kappa_a + e * p.delta_a;
    first * first + second * second
}

/// Right-hand side of the amplitude equations for the pump side of `p`.
pub fn amplitude_derivative(s: &AmplitudeState, p: &ModelParams) -> AmplitudeState {
    let da = C64::new(0.5 * p.kappa_a, p.delta_a);
    let db = C64::new(0.5 * p.kappa_b, p.delta_b);
    let f = p.drive_f;
    let om = p.omega_nl;
    let (r2, r3, r6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
    let ii = -I;
    match p.pump {
        Pump::RightB => AmplitudeState {
            c00: ZERO,
            c10: ii * f * s.c11 - da * s.c10,
            c20: ii * (r2 * om) * s.c01 - da * 2.0 * s.c20,
            c01: ii * (r2 * om) * s.c20 + ii * f * s.c00 - db * s.c01,
            c11: ii * (r6 * om) * s.c30 + ii * f * s.c10 - (da + db) * s.c11,
            c30: ii * (r6 * om) * s.c11 - da * 3.0 * s.c30,
            c21: ii * (2.0 * om) * s.c02 + ii * f * s.c20 - (da * 2.0 + db) * s.c21,
            c02: ii * (2.0 * om) * s.c21 + ii * (r2 * f) * s.c01 - db * 2.0 * s.c02,
        },
        Pump::LeftA => AmplitudeState {
            c00: ZERO,
            c10: ii * f * s.c00 + ii * (r2 * f) * s.c20 - da * s.c10,
            c20: ii * (r2 * om) * s.c01 - da * 2.0 * s.c20 + ii * (r2 * f) * s.c10,
            c01: ii * (r2 * om) * s.c20 - db * s.c01,
            c11: ii * (r6 * om) * s.c30 + ii * f * s.c01 + ii * (r2 * f) * s.c21 - (da + db) * s.c11,
            c30: ii * (r6 * om) * s.c11 - da * 3.0 * s.c30 + ii * (r3 * f) * s.c20,
            c21: ii * (2.0 * om) * s.c02 + ii * (r2 * f) * s.c11 - (da * 2.0 + db) * s.c21,
            c02: ii * (2.0 * om) * s.c21 - db * 2.0 * s.c02,
        },
    }
}

const DEGENERATE: f64 = 1e-12;

fn checked(value: C64, which: &'static str) -> Result<C64> {
    if value.norm() < DEGENERATE || !value.is_finite() {
        return Err(Error::DegenerateDenominator { which });
    }
    Ok(value)
}

/// Exact fixed point of [`amplitude_derivative`] with C₀₀ = 1.
///
/// Drive on `b`: the odd-m amplitudes vanish and the rest follow by
/// back-substitution. Drive on `a`: the system is eliminated block by block
/// from the top of the ladder.
pub fn steady_amplitudes(p: &ModelParams) -> Result<AmplitudeState> {
    p.validate()?;
    let s = PerturbationScales::new(p);
    let (aa, ab, xa, xb, y) = (s.alpha_a, s.alpha_b, s.x_a, s.x_b, s.y);
    let r2 = 2f64.sqrt();
    let d = checked(ONE - xa * xb, "1 - x_a x_b")?;
    let e = checked(2.0 + y - 2.0 * xa * xb, "2 + y - 2 x_a x_b")?;
    let mut c = AmplitudeState::ground();
    match p.pump {
        Pump::RightB => {
            c.c01 = ab / d;
            c.c20 = xa * c.c01 / r2;
            c.c21 = (r2 * xa * ab * c.c01 + aa * c.c20) / e;
            c.c02 = xb * c.c21 + ab * c.c01 / r2;
        }
        Pump::LeftA => {
            c.c10 = aa * d / checked(d - aa * aa, "1 - x_a x_b - alpha_a^2")?;
            c.c20 = aa * c.c10 / (r2 * d);
            c.c01 = r2 * xb * c.c20;
            let lam = checked(1.0 + y - 2.0 * xa * xa - 2.0 * aa * aa / e, "lambda")?;
            c.c11 = (r2 * xa * aa * c.c20 + aa * c.c01) / lam;
            c.c21 = r2 * aa * c.c11 / e;
            c.c02 = xb * c.c21;
            c.c30 = (6f64.sqrt() * xa * c.c11 + 3f64.sqrt() * aa * c.c20) / 3.0;
        }
    }
    Ok(c)
}

/// Fixed point of [`amplitude_derivative`] by a dense linear solve of the
/// seven equations with C₀₀ = 1, independent of the closed forms.
pub fn amplitude_fixed_point_solve(p: &ModelParams) -> AmplitudeState {
    let source = amplitude_derivative(&AmplitudeState::ground(), p).to_array();
    let mut m = vec![ZERO; 49];
    for col in 0..7 {
        let mut unit = [ZERO; 8];
        unit[col + 1] = ONE;
        let image = amplitude_derivative(&AmplitudeState::from_array(unit), p).to_array();
        for row in 0..7 {
            m[row * 7 + col] = image[row + 1];
        }
    }
    let rhs: Vec<C64> = source[1..].iter().map(|z| -z).collect();
    let x = linalg::solve_complex(7, &m, &rhs);
    let mut c = [ONE; 8];
    c[1..].copy_from_slice(&x);
    AmplitudeState::from_array(c)
}

/// Equal-time photon numbers and correlations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticObservables {
    pub n_a: f64,
    pub n_b: f64,
    pub g2_a: f64,
    pub g2_b: f64,
}

impl AnalyticObservables {
    pub fn get(&self, mode: Mode) -> (f64, f64) {
        match mode {
            Mode::A => (self.n_a, self.g2_a),
            Mode::B => (self.n_b, self.g2_b),
        }
    }
}

/// Observables read off the steady amplitudes as pure-state moments:
/// n̄_a = 2|C₂₀|², g_a = 1/(2|C₂₀|²) for a drive on `b`, and
/// n̄_a = |C₁₀|², g_a = 2|C₂₀|²/|C₁₀|⁴ for a drive on `a`;
/// n̄_b = |C₀₁|², g_b = 2|C₀₂|²/|C₀₁|⁴ in both cases.
pub fn pure_state_observables(p: &ModelParams) -> Result<AnalyticObservables> {
    let c = steady_amplitudes(p)?;
    let n_b = c.c01.norm_sqr();
    let g2_b = 2.0 * c.c02.norm_sqr() / (n_b * n_b);
    Ok(match p.pump {
        Pump::RightB => AnalyticObservables {
            n_a: 2.0 * c.c20.norm_sqr(),
            n_b,
            g2_a: 1.0 / (2.0 * c.c20.norm_sqr()),
            g2_b,
        },
        Pump::LeftA => {
            let n_a = c.c10.norm_sqr();
            AnalyticObservables {
                n_a,
                n_b,
                g2_a: 2.0 * c.c20.norm_sqr() / (n_a * n_a),
                g2_b,
            }
        }
    })
}

/// Analytic observables from the steady amplitudes.
///
/// With the drive on `b`, every photon pair in `a` decays through |10⟩, which
/// the pure-state amplitudes do not hold: at leading order the mixed-state
/// populations are ρ₁₀ = 2ρ₂₀ = 2|C₂₀|². This gives n̄_a = 4|C₂₀|² and
/// g_a = 1/(8|C₂₀|²). Everything else equals [`pure_state_observables`].
pub fn analytic_observables(p: &ModelParams) -> Result<AnalyticObservables> {
    let pure = pure_state_observables(p)?;
    Ok(match p.pump {
        Pump::LeftA => pure,
        Pump::RightB => {
            let c = steady_amplitudes(p)?;
            let p20 = c.c20.norm_sqr();
            AnalyticObservables {
                n_a: 4.0 * p20,
                g2_a: 1.0 / (8.0 * p20),
                ..pure
            }
        }
    })
}

/// Closed forms in terms of the S-function, evaluated literally. Entries can
/// be non-finite where a closed form is singular (for instance Δ_a = 0 in the
/// g_b expressions).
pub fn closed_form_observables(p: &ModelParams) -> AnalyticObservables {
    let s = |a: f64, b: f64, c: f64, d: f64, e: f64| s_function(a, b, c, d, e, p);
    let (ka, da, db, om, f) = (p.kappa_a, p.delta_a, p.delta_b, p.omega_nl, p.drive_f);
    let n0 = f * f;
    match p.pump {
        Pump::RightB => {
            let a0 = ka + 0.5;
            let s_half = s(0.25, -db, 1.0, db / 2.0, 0.5);
            let s_lin = s(1.0, 0.0, 0.0, 0.0, 2.0);
            let s_four = s(1.0, -4.0 * db, 4.0, 2.0 * db, 2.0);
            let g2_b = s(-0.5 * a0, 2.0 * da + db, 1.0, 2.0 * da + 0.5 * db, 0.5)
                / s(-0.5, 2.0 * db, -2.0 + (-1.0 + 4.0 * db * db) / (4.0 * om * om), db, 1.0 + db / da)
                * s_four
                / (s_lin * s_lin);
            AnalyticObservables {
                n_a: n0 * 2.0 * om * om / s_half,
                n_b: n0 * 4.0 * s_lin / s_four,
                g2_a: s_half / (4.0 * f * f * om * om),
                g2_b,
            }
        }
        Pump::LeftA => {
            let s_lin = s(1.0, 0.0, 0.0, 0.0, 2.0);
            let s_half = s(0.25, -db, 1.0, db / 2.0, 0.5);
            let f1 = 0.75 + 3.0 * ka + 1.5 * ka * ka - 2.0 * da * da + 6.0 * om * om;
            let g1 = -3.0 / 8.0 - 0.75 * ka - 0.25 * ka * ka + 3.0 * da * da + 3.0 * da * db;
            let h1 = -3.0 - 2.0 * db / da - 2.0 * ka;
            let a1 = -1.0 / 16.0 - 3.0 * ka / 16.0 - ka * ka / 8.0 + 0.75 * db * db + 0.75 * ka * db * db;
            let b1 = 0.75 * da + 1.5 * ka * da - 3.0 * da * db * db - db * db * db + db * f1;
            let c1 = -0.5 - 1.5 * ka - 0.5 * ka * ka + 2.0 * da * da + 2.0 * db * db - 4.0 * om * om;
            let d1 = -0.75 * da - 3.0 * db * om * om - 0.75 * ka * da + db * db * db / 2.0 + db * g1;
            let e1 = -1.0 / 8.0 + da * da + 3.0 * da * db + 1.5 * db * db + om * om * h1;
            AnalyticObservables {
                n_a: n0 * 4.0 / s_lin,
                n_b: n0 * (f * om) * (f * om) / (s(0.5, 0.0, 0.0, 0.0, 1.0) * s_half),
                g2_a: s_lin * s(1.0 / ka, 0.0, 0.0, 2.0 * db / ka, 0.0) / s(1.0, -4.0 * db, 4.0, 2.0 * db, 2.0),
                g2_b: s_lin * s_half
                    / (s(a1, b1, c1, d1, e1) / s(db / ka, 1.0, 0.0, 0.5, 1.0 / (2.0 * da))),
            }
        }
    }
}

/// Both analytic paths and their relative differences
/// |closed − amplitude| / |amplitude| (NaN where the closed form is singular).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathComparison {
    pub amplitude: AnalyticObservables,
    pub closed_form: AnalyticObservables,
    pub relative: AnalyticObservables,
}

pub fn compare_paths(p: &ModelParams) -> Result<PathComparison> {
    let amplitude = analytic_observables(p)?;
    let closed_form = closed_form_observables(p);
    let rel = |a: f64, c: f64| if c.is_finite() { (c - a).abs() / a.abs() } else { f64::nan() };
    Ok(PathComparison {
        amplitude,
        closed_form,
        relative: AnalyticObservables {
            n_a: rel(amplitude.n_a, closed_form.n_a),
            n_b: rel(amplitude.n_b, closed_form.n_b),
            g2_a: rel(amplitude.g2_a, closed_form.g2_a),
            g2_b: rel(amplitude.g2_b, closed_form.g2_b),
        },
    })
}

/// R = (κF² − κ_a S(½,0,0,0,1)) / (κF² + κ_a S(½,0,0,0,1)).
pub fn analytic_rectification(p: &ModelParams) -> f64 {
    let loss = p.kappa_a * s_function(0.5, 0.0, 0.0, 0.0, 1.0, p);
    let gain = p.kappa_b * p.drive_f * p.drive_f;
    (gain - loss) / (gain + loss)
}

/// Second-order amplitude for |00⟩ → |02⟩ through the dressed pair
/// |2±⟩ = (|01⟩ ± |20⟩)/√2 at energies Δ_b ± √2Ω, with the drive F(b̂ + b̂†).
pub fn two_photon_rabi(p: &ModelParams) -> Result<C64> {
    let split = 2f64.sqrt() * p.omega_nl;
    let f = p.drive_f;
    let s = 1.0 / 2f64.sqrt();
    let mut total = ZERO;
    for sign in [1.0, -1.0] {
        let omega_m = p.delta_b + sign * split;
        if omega_m.abs() < DEGENERATE * (1.0 + split) {
            return Err(Error::ResonantDenominator);
        }
        // ⟨2±|F b̂†|00⟩ = F/√2 and ⟨02|F b̂†|2±⟩ = √2 F/√2.
        let up = C64::new(f * s, 0.0);
        let down = C64::new(2f64.sqrt() * f * s, 0.0);
        total += down * up / omega_m;
    }
    Ok(total)
}

/// Amplitudes after annihilating one photon from `mode`, keeping only the
/// eight-level terms.
pub fn conditional_initial_state(s: &AmplitudeState, mode: Mode) -> AmplitudeState {
    let r2 = 2f64.sqrt();
    match mode {
        Mode::A => AmplitudeState {
            c00: s.c10,
            c10: r2 * s.c20,
            ..AmplitudeState::zero()
        },
        Mode::B => AmplitudeState {
            c00: s.c01,
            c10: s.c11,
            c20: s.c21,
            c01: r2 * s.c02,
            ..AmplitudeState::zero()
        },
    }
}

/// Delayed correlation of the eight-level model for a drive on `a`:
/// g_a(τ) = |C₁₀(τ)|²/|C̄₁₀|⁴ and g_b(τ) = |C₀₁(τ)|²/|C̄₀₁|⁴, with the
/// conditional state evolved by RK4 under the amplitude equations.
pub fn analytic_g2_delayed(p: &ModelParams, mode: Mode, taus: &[f64]) -> Result<CorrelationSeries> {
    if p.pump != Pump::LeftA {
        return Err(Error::InvalidParams {
            name: "pump",
            reason: "analytic delayed correlations exist only for a drive on mode a",
        });
    }
    if taus.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParams {
            name: "taus",
            reason: "delays must be finite",
        });
    }
    let steady = steady_amplitudes(p)?;
    let reference = match mode {
        Mode::A => steady.c10,
        Mode::B => steady.c01,
    };
    if reference.norm() < 1e-12 {
        return Err(Error::VanishingPopulation {
            mode,
            population: reference.norm_sqr(),
        });
    }
    let norm = reference.norm_sqr() * reference.norm_sqr();
    let read = |s: &AmplitudeState| match mode {
        Mode::A => s.c10.norm_sqr() / norm,
        Mode::B => s.c01.norm_sqr() / norm,
    };

    let mut state = conditional_initial_state(&steady, mode);
    let g2_zero = read(&state);
    let dt = p.stable_dt();
    let mut order: Vec<usize> = (0..taus.len()).collect();
    order.sort_by(|&i, &j| taus[i].abs().total_cmp(&taus[j].abs()));
    let mut values = vec![0.0; taus.len()];
    let mut t = 0.0;
    for idx in order {
        let target = taus[idx].abs();
        let span = target - t;
        if span > 0.0 {
            let steps = (span / dt).ceil() as usize;
            let h = span / steps as f64;
            for _ in 0..steps {
                state = rk4_step(&state, p, h);
            }
        }
        t = target;
        values[idx] = read(&state);
    }
    Ok(CorrelationSeries {
        taus: taus.to_vec(),
        values,
        g2_zero,
    })
}

fn rk4_step(s: &AmplitudeState, p: &ModelParams, h: f64) -> AmplitudeState {
    let k1 = amplitude_derivative(s, p);
    let k2 = amplitude_derivative(&s.axpy(0.5 * h, &k1), p);
    let k3 = amplitude_derivative(&s.axpy(0.5 * h, &k2), p);
    let k4 = amplitude_derivative(&s.axpy(h, &k3), p);
    s.axpy(h / 6.0, &k1)
        .axpy(h / 3.0, &k2)
        .axpy(h / 3.0, &k3)
        .axpy(h / 6.0, &k4)
}

/// Δ solving Δ² + 8Ω² = x²: both signs, or one value at the vertex.
pub fn resonance_locus(omega_nl: f64, x: f64) -> Result<Vec<f64>> {
    let disc = x * x - 8.0 * omega_nl * omega_nl;
    if disc.abs() <= 1e-12 * x * x {
        return Ok(vec![0.0]);
    }
    if disc < 0.0 {
        return Err(Error::NoRealSolution { omega: omega_nl, x });
    }
    let d = disc.sqrt();
    Ok(vec![-d, d])
}

/// x solving Δ² + 8Ω² = x² for given Δ, negative root first.
pub fn resonance_x(omega_nl: f64, delta: f64) -> [f64; 2] {
    let x = (delta * delta + 8.0 * omega_nl * omega_nl).sqrt();
    [-x, x]
}

/// (Δ_a, Δ_b) from x = Δ_b + 2Δ_a and Δ = Δ_b − 2Δ_a.
pub fn detunings_from_x(x: f64, delta: f64) -> (f64, f64) {
    ((x - delta) / 4.0, (x + delta) / 2.0)
}

/// Weak-drive validity of the delayed correlators, Ω² ≫ κ_a κ F, read as
/// Ω² ≥ 10 κ_a κ F.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongCoupling {
    pub omega_sq: f64,
    pub loss_drive: f64,
    pub satisfied: bool,
}

pub fn strong_coupling_condition(p: &ModelParams) -> StrongCoupling {
    let omega_sq = p.omega_nl * p.omega_nl;
    let loss_drive = p.kappa_a * p.kappa_b * p.drive_f;
    StrongCoupling {
        omega_sq,
        loss_drive,
        satisfied: omega_sq >= 10.0 * loss_drive,
    }
}

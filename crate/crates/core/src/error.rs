use thiserror::Error;

use crate::fock::Mode;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("truncation ({n_max_a}, {n_max_b}) cannot hold the eight-level ladder; need n_max_a >= 2 and n_max_b >= 1")]
    TruncationTooSmall { n_max_a: usize, n_max_b: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParams { name: &'static str, reason: &'static str },

    #[error("integration step too large: trace drifted by {drift:e}")]
    StepTooLarge { drift: f64 },

    #[error("steady state did not converge (Lindblad residual {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("mode {mode:?} population {population:e} too small for a normalized correlation")]
    VanishingPopulation { mode: Mode, population: f64 },

    #[error("both output currents vanish; rectification undefined")]
    BothCurrentsZero,

    #[error("degenerate denominator `{which}` in the steady amplitudes")]
    DegenerateDenominator { which: &'static str },

    #[error("two-photon Rabi frequency diverges at Δ_b = ±√2 Ω")]
    ResonantDenominator,

    #[error("no real detuning solves Δ² + 8Ω² = x² for x = {x}, Ω = {omega}")]
    NoRealSolution { omega: f64, x: f64 },
}

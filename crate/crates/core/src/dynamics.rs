//! Rotating-frame Hamiltonian, Lindblad generator, RK4 evolution and the
//! Liouvillian steady state.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::{lowering_operator, number_operator, FockBasis, Mode, Operator};
use crate::linalg;
use crate::state::DensityMatrix;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Which cavity the coherent drive enters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pump {
    /// Drive on mode `a` (forward direction, k).
    LeftA,
    /// Drive on mode `b` (backward direction, −k).
    RightB,
}

impl Pump {
    pub fn driven_mode(self) -> Mode {
        match self {
            Pump::LeftA => Mode::A,
            Pump::RightB => Mode::B,
        }
    }

    pub fn reversed(self) -> Pump {
        match self {
            Pump::LeftA => Pump::RightB,
            Pump::RightB => Pump::LeftA,
        }
    }
}

/// Model parameters. Rates and detunings are in units of the mode-`b` loss
/// rate, so `kappa_b` is always 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub delta_a: f64,
    pub delta_b: f64,
    pub omega_nl: f64,
    pub drive_f: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub pump: Pump,
    pub n_max_a: usize,
    pub n_max_b: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            delta_a: 0.0,
            delta_b: 0.0,
            omega_nl: 4.0,
            drive_f: 0.2,
            kappa_a: 1.0,
            kappa_b: 1.0,
            pump: Pump::LeftA,
            n_max_a: 6,
            n_max_b: 4,
        }
    }
}

impl ModelParams {
    pub fn new(delta_a: f64, delta_b: f64, omega_nl: f64, drive_f: f64, kappa_a: f64, pump: Pump) -> Self {
        Self {
            delta_a,
            delta_b,
            omega_nl,
            drive_f,
            kappa_a,
            pump,
            ..Self::default()
        }
    }

    /// Convert physical rates (any common unit) to internal units of `kappa`.
    pub fn from_physical(
        kappa: f64,
        delta_a: f64,
        delta_b: f64,
        omega_nl: f64,
        drive_f: f64,
        kappa_a: f64,
        pump: Pump,
    ) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidParams {
                name: "kappa",
                reason: "must be positive and finite",
            });
        }
        let p = Self::new(
            delta_a / kappa,
            delta_b / kappa,
            omega_nl / kappa,
            drive_f / kappa,
            kappa_a / kappa,
            pump,
        );
        p.validate()?;
        Ok(p)
    }

    pub fn with_pump(self, pump: Pump) -> Self {
        Self { pump, ..self }
    }

    pub fn with_drive(self, drive_f: f64) -> Self {
        Self { drive_f, ..self }
    }

    pub fn with_detunings(self, delta_a: f64, delta_b: f64) -> Self {
        Self {
            delta_a,
            delta_b,
            ..self
        }
    }

    pub fn with_truncation(self, n_max_a: usize, n_max_b: usize) -> Self {
        Self {
            n_max_a,
            n_max_b,
            ..self
        }
    }

    pub fn basis(&self) -> Result<FockBasis> {
        FockBasis::new(self.n_max_a, self.n_max_b)
    }

    pub fn kappa(&self, mode: Mode) -> f64 {
        match mode {
            Mode::A => self.kappa_a,
            Mode::B => self.kappa_b,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("delta_a", self.delta_a),
            ("delta_b", self.delta_b),
            ("omega_nl", self.omega_nl),
            ("drive_f", self.drive_f),
            ("kappa_a", self.kappa_a),
            ("kappa_b", self.kappa_b),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidParams {
                    name,
                    reason: "must be finite",
                });
            }
        }
        if self.omega_nl < 0.0 {
            return Err(Error::InvalidParams {
                name: "omega_nl",
                reason: "must be non-negative",
            });
        }
        if self.drive_f < 0.0 {
            return Err(Error::InvalidParams {
                name: "drive_f",
                reason: "must be non-negative",
            });
        }
        if !(self.kappa_a > 0.0) {
            return Err(Error::InvalidParams {
                name: "kappa_a",
                reason: "must be positive",
            });
        }
        if self.kappa_b != 1.0 {
            return Err(Error::InvalidParams {
                name: "kappa_b",
                reason: "rates are expressed in units of kappa_b, which must equal 1",
            });
        }
        self.basis().map(|_| ())
    }

    /// Default RK4 step: 0.01 over the fastest rate in the problem.
    pub fn stable_dt(&self) -> f64 {
        0.01 / self.fastest_rate(true)
    }

    fn fastest_rate(&self, with_detunings: bool) -> f64 {
        let mut m = 1.0f64
            .max(self.omega_nl)
            .max(self.drive_f)
            .max(self.kappa_a);
        if with_detunings {
            m = m.max(self.delta_a.abs()).max(self.delta_b.abs());
        }
        m
    }
}

/// H = Δ_a â†â + Δ_b b̂†b̂ + Ω(b̂†â² + â†²b̂) + F(ĥ + ĥ†), ĥ the driven mode.
pub fn build_hamiltonian(p: &ModelParams, basis: &FockBasis) -> Operator {
    let a = lowering_operator(basis, Mode::A);
    let b = lowering_operator(basis, Mode::B);
    let ad = a.adjoint();
    let bd = b.adjoint();
    let a2 = a.compose(&a).expect("same basis");
    let conv = bd.compose(&a2).expect("same basis");
    let mut h = &number_operator(basis, Mode::A).scaled(C64::new(p.delta_a, 0.0))
        + &number_operator(basis, Mode::B).scaled(C64::new(p.delta_b, 0.0));
    h = &h + &(&conv + &conv.adjoint()).scaled(C64::new(p.omega_nl, 0.0));
    let (lo, hi) = match p.pump {
        Pump::LeftA => (&a, &ad),
        Pump::RightB => (&b, &bd),
    };
    &h + &(lo + hi).scaled(C64::new(p.drive_f, 0.0))
}

/// An eigenstate of the undriven Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub energy: f64,
    /// Conserved excitation number m + 2n of the block the state lives in.
    pub excitations: usize,
    pub vector: Vec<C64>,
}

/// Eigenstates of H with F = 0 and Δ_b = 2Δ_a (p.delta_b and p.drive_f are
/// ignored). H then conserves m + 2n, so each excitation block is diagonalized
/// separately and every eigenvector lives in a single block. Vectors are
/// phased so their largest component is real and positive. Sorted by energy,
/// then by excitation number.
pub fn undriven_eigensystem(p: &ModelParams, basis: &FockBasis) -> Vec<Eigenpair> {
    let q = ModelParams {
        drive_f: 0.0,
        delta_b: 2.0 * p.delta_a,
        ..*p
    };
    let h = build_hamiltonian(&q, basis);
    let max_exc = basis.n_max_a() + 2 * basis.n_max_b();
    let mut out = Vec::with_capacity(basis.dim());
    for exc in 0..=max_exc {
        let members: Vec<usize> = (0..basis.dim())
            .filter(|&i| {
                let (m, n) = basis.occupation(i);
                m + 2 * n == exc
            })
            .collect();
        if members.is_empty() {
            continue;
        }
        let k = members.len();
        let block: Vec<C64> = (0..k * k)
            .map(|idx| h.get(members[idx / k], members[idx % k]))
            .collect();
        let pairs = linalg::hermitian_eigen(k, &block).expect("small Hermitian block");
        for (energy, v) in pairs {
            let pivot = v
                .iter()
                .copied()
                .fold(ZERO, |best, z| if z.norm() > best.norm() { z } else { best });
            let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { C64::new(1.0, 0.0) };
            let mut vector = vec![ZERO; basis.dim()];
            for (slot, z) in members.iter().zip(&v) {
                vector[*slot] = z * phase;
            }
            out.push(Eigenpair {
                energy,
                excitations: exc,
                vector,
            });
        }
    }
    out.sort_by(|x, y| {
        x.energy
            .partial_cmp(&y.energy)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(x.excitations.cmp(&y.excitations))
    });
    out
}

/// −i[H,ρ] + κ_a D(â)ρ + κ_b D(b̂)ρ for an arbitrary (not necessarily
/// Hermitian) ρ.
pub fn lindblad_derivative(rho: &DensityMatrix, h: &Operator, p: &ModelParams) -> Result<Operator> {
    h.check_dim(rho.dim())?;
    let basis = rho.basis();
    let r = rho.to_operator();
    let mut out = h.compose(&r)?.scaled(-I) + r.compose(h)?.scaled(I);
    for (mode, rate) in [(Mode::A, p.kappa_a), (Mode::B, p.kappa_b)] {
        let c = lowering_operator(basis, mode);
        let cd = c.adjoint();
        let cdc = cd.compose(&c)?;
        let jump = c.compose(&r)?.compose(&cd)?;
        let anti = &cdc.compose(&r)? + &r.compose(&cdc)?;
        out = &out + &(&jump - &anti.scaled(C64::new(0.5, 0.0))).scaled(C64::new(rate, 0.0));
    }
    Ok(out)
}

/// Row-wise nonzeros of a sparse operator.
type SparseRows = Vec<Vec<(usize, C64)>>;

/// Sparse form of the Lindblad generator for Hermitian arguments, written as
/// dρ = −i H_eff ρ + h.c. + Σ κ_j ĉ_j ρ ĉ_j† with H_eff = H − (i/2) Σ κ_j ĉ_j†ĉ_j.
#[derive(Debug, Clone)]
pub(crate) struct Generator {
    dim: usize,
    heff: SparseRows,
    jumps: Vec<(f64, SparseRows)>,
}

impl Generator {
    pub(crate) fn new(p: &ModelParams, basis: &FockBasis) -> Self {
        let h = build_hamiltonian(p, basis);
        let loss = &number_operator(basis, Mode::A).scaled(C64::new(p.kappa_a, 0.0))
            + &number_operator(basis, Mode::B).scaled(C64::new(p.kappa_b, 0.0));
        let heff = &h - &loss.scaled(C64::new(0.0, 0.5));
        let jumps = [(Mode::A, p.kappa_a), (Mode::B, p.kappa_b)]
            .into_iter()
            .map(|(mode, rate)| (rate, lowering_operator(basis, mode).row_entries()))
            .collect();
        Self {
            dim: basis.dim(),
            heff: heff.row_entries(),
            jumps,
        }
    }

    /// `out = L(rho)`; `scratch` holds H_eff ρ. `rho` must be Hermitian.
    pub(crate) fn apply(&self, rho: &[C64], out: &mut [C64], scratch: &mut [C64]) {
        let n = self.dim;
        scratch.fill(ZERO);
        for (i, row) in self.heff.iter().enumerate() {
            let dst = &mut scratch[i * n..(i + 1) * n];
            for &(k, hv) in row {
                for (d, r) in dst.iter_mut().zip(&rho[k * n..(k + 1) * n]) {
                    *d += hv * r;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let m_ij = scratch[i * n + j];
                let m_ji = scratch[j * n + i];
                out[i * n + j] = C64::new(m_ij.im + m_ji.im, -m_ij.re + m_ji.re);
            }
        }
        for (rate, rows) in &self.jumps {
            for (i, ri) in rows.iter().enumerate() {
                for &(k, ak) in ri {
                    let ak = ak * rate;
                    for (j, rj) in rows.iter().enumerate() {
                        for &(l, al) in rj {
                            out[i * n + j] += ak * al.conj() * rho[k * n + l];
                        }
                    }
                }
            }
        }
    }

    /// Largest entry of L(ρ).
    pub(crate) fn residual(&self, rho: &[C64]) -> f64 {
        let mut out = vec![ZERO; rho.len()];
        let mut scratch = vec![ZERO; rho.len()];
        self.apply(rho, &mut out, &mut scratch);
        out.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// L(E_ij) as a sparse entry list.
    fn image_of_unit(&self, i: usize, j: usize, buf: &mut Vec<(usize, usize, C64)>) {
        buf.clear();
        // −i H_eff E_ij: column i of H_eff lands in column j.
        for (k, row) in self.heff.iter().enumerate() {
            for &(c, hv) in row {
                if c == i {
                    buf.push((k, j, -I * hv));
                }
            }
        }
        // i E_ij H_eff†: row i gets conj of column j of H_eff.
        for (l, row) in self.heff.iter().enumerate() {
            for &(c, hv) in row {
                if c == j {
                    buf.push((i, l, I * hv.conj()));
                }
            }
        }
        for (rate, rows) in &self.jumps {
            for (k, rk) in rows.iter().enumerate() {
                for &(c, ak) in rk {
                    if c != i {
                        continue;
                    }
                    for (l, rl) in rows.iter().enumerate() {
                        for &(c2, al) in rl {
                            if c2 == j {
                                buf.push((k, l, ak * al.conj() * rate));
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Integrates dρ/dt = L(ρ) with classical RK4, re-symmetrizing every step.
pub(crate) struct Integrator {
    generator: Generator,
    k: [Vec<C64>; 4],
    tmp: Vec<C64>,
    scratch: Vec<C64>,
}

impl Integrator {
    pub(crate) fn new(p: &ModelParams, basis: &FockBasis) -> Self {
        let len = basis.dim() * basis.dim();
        Self {
            generator: Generator::new(p, basis),
            k: [vec![ZERO; len], vec![ZERO; len], vec![ZERO; len], vec![ZERO; len]],
            tmp: vec![ZERO; len],
            scratch: vec![ZERO; len],
        }
    }

    pub(crate) fn generator(&self) -> &Generator {
        &self.generator
    }

    fn step(&mut self, rho: &mut DensityMatrix, h: f64) {
        let y = rho.as_mut_slice();
        let [k1, k2, k3, k4] = &mut self.k;
        self.generator.apply(y, k1, &mut self.scratch);
        for ((t, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(k1.iter()) {
            *t = y + k * (0.5 * h);
        }
        self.generator.apply(&self.tmp, k2, &mut self.scratch);
        for ((t, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(k2.iter()) {
            *t = y + k * (0.5 * h);
        }
        self.generator.apply(&self.tmp, k3, &mut self.scratch);
        for ((t, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(k3.iter()) {
            *t = y + k * h;
        }
        self.generator.apply(&self.tmp, k4, &mut self.scratch);
        let w = h / 6.0;
        for (idx, y) in y.iter_mut().enumerate() {
            *y += (k1[idx] + (k2[idx] + k3[idx]) * 2.0 + k4[idx]) * w;
        }
        rho.symmetrize();
    }

    /// Advance `rho` by `duration` using equal steps no longer than `dt`.
    pub(crate) fn advance(&mut self, rho: &mut DensityMatrix, duration: f64, dt: f64) -> Result<()> {
        if duration <= 0.0 {
            return Ok(());
        }
        let start = rho.trace();
        let steps = (duration / dt).ceil().max(1.0) as usize;
        let h = duration / steps as f64;
        for s in 0..steps {
            self.step(rho, h);
            if s % 256 == 255 || s + 1 == steps {
                let drift = (rho.trace() - start).norm();
                if !drift.is_finite() || drift > 1e-6 * start.norm().max(1.0) {
                    return Err(Error::StepTooLarge {
                        drift: if drift.is_finite() { drift } else { f64::infinity() },
                    });
                }
            }
        }
        Ok(())
    }
}

/// Evolve ρ0 under the master equation to `t_final` with fixed-step RK4.
pub fn evolve(rho0: &DensityMatrix, p: &ModelParams, t_final: f64, dt: f64) -> Result<DensityMatrix> {
    p.validate()?;
    if rho0.basis().n_max_a() != p.n_max_a || rho0.basis().n_max_b() != p.n_max_b {
        return Err(Error::DimMismatch {
            expected: (p.n_max_a + 1) * (p.n_max_b + 1),
            found: rho0.dim(),
        });
    }
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::InvalidParams {
            name: "t_final",
            reason: "must be finite and non-negative",
        });
    }
    if !(dt > 0.0) || dt > 0.01 / p.fastest_rate(false) * (1.0 + 1e-12) {
        return Err(Error::InvalidParams {
            name: "dt",
            reason: "must be positive and at most 0.01/max(1, omega, F, kappa_a)",
        });
    }
    let mut rho = rho0.clone();
    if t_final == 0.0 {
        return Ok(rho);
    }
    let mut integ = Integrator::new(p, rho0.basis());
    integ.advance(&mut rho, t_final, dt)?;
    Ok(rho)
}

/// Threshold on the largest entry of L(ρ_ss).
pub const STEADY_STATE_RESIDUAL: f64 = 1e-10;

/// Steady state of the master equation.
///
/// Solves L(ρ) = 0 in the real coordinates of Hermitian matrices (diagonal
/// entries plus real and imaginary parts of the upper triangle), with the
/// ρ_00 equation replaced by Tr ρ = 1. A drive on mode `b` conserves the
/// parity of m, so only same-parity coherences are kept in that case. If the
/// solution misses the residual threshold, long-time RK4 takes over.
pub fn steady_state(p: &ModelParams, basis: &FockBasis) -> Result<DensityMatrix> {
    p.validate()?;
    if basis.n_max_a() != p.n_max_a || basis.n_max_b() != p.n_max_b {
        return Err(Error::DimMismatch {
            expected: (p.n_max_a + 1) * (p.n_max_b + 1),
            found: basis.dim(),
        });
    }
    let generator = Generator::new(p, basis);
    let direct = solve_liouvillian(&generator, p, basis);
    let direct_residual = direct
        .as_ref()
        .map(|r| generator.residual(r.as_slice()))
        .unwrap_or(f64::infinity());
    if direct_residual < STEADY_STATE_RESIDUAL {
        return Ok(direct.expect("finite residual implies a solution"));
    }
    relax(p, basis, direct, direct_residual)
}

fn relax(
    p: &ModelParams,
    basis: &FockBasis,
    start: Option<DensityMatrix>,
    start_residual: f64,
) -> Result<DensityMatrix> {
    let mut rho = match start {
        Some(mut r) if start_residual.is_finite() && r.trace().re.is_finite() => {
            let tr = r.trace();
            for z in r.as_mut_slice() {
                *z /= tr;
            }
            r
        }
        _ => DensityMatrix::vacuum(basis),
    };
    let mut integ = Integrator::new(p, basis);
    let dt = p.stable_dt();
    let chunk = 50.0;
    let t_max = 4000.0 / p.kappa_a.min(p.kappa_b);
    let mut residual = start_residual;
    let mut t = 0.0;
    while t < t_max {
        integ.advance(&mut rho, chunk, dt)?;
        t += chunk;
        residual = integ.generator().residual(rho.as_slice());
        if residual < STEADY_STATE_RESIDUAL {
            return Ok(rho);
        }
    }
    Err(Error::NoConvergence { residual })
}

fn solve_liouvillian(g: &Generator, p: &ModelParams, basis: &FockBasis) -> Option<DensityMatrix> {
    let dim = basis.dim();
    let parity = p.pump == Pump::RightB;
    let coupled = |i: usize, j: usize| !parity || (basis.occupation(i).0 + basis.occupation(j).0).is_multiple_of(2);

    // coord[i*dim+j] for i <= j: first real coordinate of that entry.
    let mut coord = vec![usize::MAX; dim * dim];
    let mut unknowns: Vec<(usize, usize)> = Vec::new();
    let mut n = 0;
    for i in 0..dim {
        for j in i..dim {
            if coupled(i, j) {
                coord[i * dim + j] = n;
                unknowns.push((i, j));
                n += if i == j { 1 } else { 2 };
            }
        }
    }

    // Columns of the real system, trace row excluded; the trace condition
    // replaces the ρ_00 equation.
    let trace_row = coord[0];
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut push_column = |col: &[f64], c: usize| {
        for (r, &v) in col.iter().enumerate() {
            if v != 0.0 && r != trace_row {
                entries.push((r, c, v));
            }
        }
    };
    let mut buf = Vec::new();
    let mut col_re = vec![0.0f64; n];
    let mut col_im = vec![0.0f64; n];
    for &(i, j) in &unknowns {
        g.image_of_unit(i, j, &mut buf);
        let u = coord[i * dim + j];
        if i == j {
            col_re.fill(0.0);
            for &(k, l, v) in &buf {
                if k <= l {
                    accumulate(&mut col_re, &coord, dim, k, l, if k == l { C64::new(v.re, 0.0) } else { v });
                }
            }
            push_column(&col_re, u);
        } else {
            col_re.fill(0.0);
            col_im.fill(0.0);
            for &(k, l, v) in &buf {
                for (col, w) in [(&mut col_re, v), (&mut col_im, I * v)] {
                    if k < l {
                        accumulate(col, &coord, dim, k, l, w);
                    } else if k > l {
                        accumulate(col, &coord, dim, l, k, w.conj());
                    } else {
                        accumulate(col, &coord, dim, k, k, C64::new(2.0 * w.re, 0.0));
                    }
                }
            }
            push_column(&col_re, u);
            push_column(&col_im, u + 1);
        }
    }
    for i in 0..dim {
        entries.push((trace_row, coord[i * dim + i], 1.0));
    }
    let mut rhs = vec![0.0; n];
    rhs[trace_row] = 1.0;

    let x = linalg::solve_sparse_real(n, &entries, &rhs).unwrap_or_else(|| {
        let mut a = vec![0.0f64; n * n];
        for &(r, c, v) in &entries {
            a[c * n + r] += v;
        }
        linalg::solve_real(n, &a, &rhs)
    });
    if x.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut data = vec![ZERO; dim * dim];
    for &(i, j) in &unknowns {
        let u = coord[i * dim + j];
        if i == j {
            data[i * dim + i] = C64::new(x[u], 0.0);
        } else {
            let z = C64::new(x[u], x[u + 1]);
            data[i * dim + j] = z;
            data[j * dim + i] = z.conj();
        }
    }
    Some(DensityMatrix::from_raw(*basis, data))
}

fn accumulate(col: &mut [f64], coord: &[usize], dim: usize, k: usize, l: usize, w: C64) {
    let c = coord[k * dim + l];
    if c == usize::MAX {
        // Outside the conserved block; the generator never produces these.
        debug_assert!(w.norm() < 1e-300, "coupling outside parity block");
        return;
    }
    col[c] += w.re;
    if k != l {
        col[c + 1] += w.im;
    }
}

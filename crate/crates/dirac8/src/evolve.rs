//! Exact pseudo-spectral time evolution and observable tracking.
//!
//! Both models are diagonal per momentum mode: DIRAC8 advances each
//! H(k)-eigencoefficient by exp(−i·ε·E(k)·t) and SQRT_E advances every
//! coefficient by exp(−i·E(k)·t).  The evolver caches the sector eigenbasis
//! at every mode once (`ModeTable`), converts the state to eigencoefficients,
//! and computes each recorded step's phases fresh from the absolute time
//! n·dt — no phase accumulation, so runs are reversible and halving dt is
//! bit-exact.

use rayon::prelude::*;

use crate::classify::{classify_modes, RepLabel, SECTOR_ORDER};
use crate::clifford::GammaSet;
use crate::error::{Dirac8Error, Result};
use crate::field::SpinorField;
use crate::grid::Grid;
use crate::matrix::{Matrix8, Vector8};
use crate::poincare::energy;
use crate::projector::{ProjectorKernel, ProjectorSpec};
use crate::sampling;
use crate::scalar::{c0, cr, fd, r, Real, C};

/// The two propagation models.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvolutionModel {
    /// Eight-component first-order equation: generator H(k).
    Dirac8,
    /// Square-root equation: generator E(k)·I (positive scalar).
    SqrtE,
}

impl EvolutionModel {
    pub fn name(self) -> &'static str {
        match self {
            EvolutionModel::Dirac8 => "DIRAC8",
            EvolutionModel::SqrtE => "SQRT_E",
        }
    }
}

impl std::str::FromStr for EvolutionModel {
    type Err = Dirac8Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "DIRAC8" => Ok(EvolutionModel::Dirac8),
            "SQRT_E" => Ok(EvolutionModel::SqrtE),
            other => Err(Dirac8Error::InvalidParameter(format!(
                "unknown evolution model {other:?} (expected DIRAC8 or SQRT_E)"
            ))),
        }
    }
}

impl std::fmt::Display for EvolutionModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Sector occupation columns in reporting order.
pub const LABEL_ORDER: [RepLabel; 4] = [
    RepLabel::DPlusS0,
    RepLabel::DMinusS0,
    RepLabel::DPlus0S,
    RepLabel::DMinus0S,
];

/// Eigenvalue sign of ε̂ for each eigenbasis column (columns follow
/// `SECTOR_ORDER`, two per sector).
fn column_epsilon(col: usize) -> i8 {
    SECTOR_ORDER[col / 2].0
}

/// Reporting-order occupation slot of each eigenbasis column.
fn column_slot(col: usize) -> usize {
    let (eps, sig) = SECTOR_ORDER[col / 2];
    let label = crate::classify::rep_label(eps, sig);
    LABEL_ORDER.iter().position(|l| *l == label).unwrap()
}

/// Per-mode sector eigenbases for a grid: U(k) columns span the four
/// (ε, σ) sectors in `SECTOR_ORDER`, and E(k) fixes the phase rates.
pub struct ModeTable<T: Real> {
    pub grid: Grid<T>,
    pub m: T,
    /// Unitary eigenbasis per flat dual index.
    pub u: Vec<Matrix8<T>>,
    /// E(k) per flat dual index.
    pub e: Vec<T>,
}

impl<T: Real> ModeTable<T> {
    pub fn new(grid: Grid<T>, gs: &GammaSet<T>, m: T) -> Result<Self> {
        if m <= T::ZERO {
            return Err(Dirac8Error::NonPositiveMass(fd(m)));
        }
        let points = grid.points();
        let mut u = vec![Matrix8::zeros(); points];
        let mut e = vec![T::ZERO; points];
        let entries: Vec<(Matrix8<T>, T)> = (0..points)
            .into_par_iter()
            .map(|i| {
                let k = grid.k_at(i);
                let modes = classify_modes(gs, &k, m).expect("validated gamma set");
                let mut mat = Matrix8::zeros();
                for (s, mode) in modes.iter().enumerate() {
                    for (b, v) in mode.basis.iter().enumerate() {
                        mat.set_column(s * 2 + b, v);
                    }
                }
                (mat, energy(&k, m))
            })
            .collect();
        for (i, (mat, ei)) in entries.into_iter().enumerate() {
            u[i] = mat;
            e[i] = ei;
        }
        Ok(ModeTable { grid, m, u, e })
    }

    /// Phase rate of a column under a model: dθ/dt = −rate.
    fn rate(&self, model: EvolutionModel, flat: usize, col: usize) -> T {
        match model {
            EvolutionModel::Dirac8 => r::<T>(column_epsilon(col) as f64) * self.e[flat],
            EvolutionModel::SqrtE => self.e[flat],
        }
    }
}

/// One observable record: norm, ⟨H⟩, charge ⟨ε̂⟩, and the four sector
/// occupations (fractions of norm², `LABEL_ORDER`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservableRecord<T: Real> {
    pub norm: T,
    pub energy: T,
    pub charge: T,
    pub occupations: [T; 4],
}

/// Time series of observables, one entry per recorded time (initial state
/// included).
#[derive(Clone, Debug, Default)]
pub struct ObservableSeries<T: Real> {
    pub times: Vec<T>,
    pub norm: Vec<T>,
    pub energy: Vec<T>,
    pub charge: Vec<T>,
    pub sector_occupations: [Vec<T>; 4],
}

impl<T: Real> ObservableSeries<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn push(&mut self, t: T, rec: &ObservableRecord<T>) {
        self.times.push(t);
        self.norm.push(rec.norm);
        self.energy.push(rec.energy);
        self.charge.push(rec.charge);
        for (slot, occ) in rec.occupations.iter().enumerate() {
            self.sector_occupations[slot].push(*occ);
        }
    }

    /// Max |xₙ − x₀| over a series column.
    pub fn drift(col: &[T]) -> T {
        let first = col[0];
        col.iter()
            .map(|x| (*x - first).abs())
            .fold(T::ZERO, |a, b| a.max(b))
    }
}

/// Fixed seed for the sector-free packet polarization, so golden
/// observables are reproducible.
const PACKET_SPINOR_SEED: u64 = 0xD1AC8;

/// Normalized Gaussian packet, optionally projected into one sector.
///
/// Preconditions: 4·Δx ≤ width ≤ L/8 (resolved and localized).  With a
/// `sector`, the amplitude at every momentum is projected onto that
/// sector's 2-dimensional eigenspace, making the packet an exact sector
/// state; without one, a fixed seeded pseudo-random polarization is used.
pub fn gaussian_packet<T: Real>(
    grid: Grid<T>,
    center: &[T; 3],
    width: T,
    p0: &[T; 3],
    sector: Option<RepLabel>,
    gs: &GammaSet<T>,
    m: T,
) -> Result<SpinorField<T>> {
    let four_dx = grid.dx() * r(4.0);
    let l_over_8 = grid.l / r(8.0);
    if width < four_dx || width > l_over_8 {
        return Err(Dirac8Error::ResolutionPrecondition(format!(
            "gaussian_packet width must satisfy 4·Δx ≤ w ≤ L/8 \
             (got w = {}, 4·Δx = {}, L/8 = {})",
            fd(width),
            fd(four_dx),
            fd(l_over_8)
        )));
    }
    let spinor = sampling::spinor(&mut sampling::rng(PACKET_SPINOR_SEED));
    let mut f = SpinorField::zero(grid, m)?;
    for i in 0..grid.points() {
        let x = grid.x_at(i);
        let mut d2 = T::ZERO;
        let mut phase = T::ZERO;
        for a in 0..grid.dims {
            let dx = x[a] - center[a];
            d2 = d2 + dx * dx;
            phase = phase + p0[a] * x[a];
        }
        let env = (-d2 / (r::<T>(2.0) * width * width)).exp();
        let amp = C::new(env * phase.cos(), env * phase.sin());
        for comp in 0..8 {
            f.values[i * 8 + comp] = amp * spinor[comp];
        }
    }
    if let Some(label) = sector {
        let (eps, sig) = crate::classify::label_signs(label);
        let pe = ProjectorKernel::new(ProjectorSpec::new(3, eps)?, gs, m);
        let ps = ProjectorKernel::new(ProjectorSpec::new(1, sig)?, gs, m);
        f = f.map_momentum_matrix(|k| pe.at(k) * ps.at(k));
    }
    let n = f.norm();
    if fd(n) < 1e-14 {
        return Err(Dirac8Error::InvalidParameter(
            "sector projection annihilated the packet".into(),
        ));
    }
    f.scale_mut(cr(T::ONE / n));
    Ok(f)
}

/// Eigencoefficient state: b(k) = U(k)† â(k), plus the mode weight
/// w = Δx^d / N^d making Σ w |b|² the L² norm².
struct CoefficientState<T: Real> {
    coeff: Vec<C<T>>,
    weight: T,
}

impl<T: Real> CoefficientState<T> {
    fn from_field(f: &SpinorField<T>, table: &ModeTable<T>) -> Self {
        let hat = f.to_momentum();
        let mut coeff = vec![c0::<T>(); hat.len()];
        coeff
            .par_chunks_mut(8)
            .zip(hat.par_chunks(8))
            .enumerate()
            .for_each(|(i, (b, a))| {
                let u = &table.u[i];
                for col in 0..8 {
                    let mut acc = c0::<T>();
                    for row in 0..8 {
                        acc += u[(row, col)].conj() * a[row];
                    }
                    b[col] = acc;
                }
            });
        CoefficientState {
            coeff,
            weight: f.grid.volume_element() / r(f.grid.points() as f64),
        }
    }

    /// Rebuild the position-space field with phases at absolute time
    /// t − t₀ = elapsed.
    fn to_field(
        &self,
        table: &ModeTable<T>,
        model: EvolutionModel,
        elapsed: T,
        time: T,
    ) -> SpinorField<T> {
        let mut hat = vec![c0::<T>(); self.coeff.len()];
        hat.par_chunks_mut(8)
            .zip(self.coeff.par_chunks(8))
            .enumerate()
            .for_each(|(i, (a, b))| {
                let u = &table.u[i];
                let mut phased = [c0::<T>(); 8];
                for col in 0..8 {
                    let theta = -table.rate(model, i, col) * elapsed;
                    phased[col] = b[col] * C::new(theta.cos(), theta.sin());
                }
                for row in 0..8 {
                    let mut acc = c0::<T>();
                    for col in 0..8 {
                        acc += u[(row, col)] * phased[col];
                    }
                    a[row] = acc;
                }
            });
        SpinorField::from_momentum(table.grid, table.m, time, hat)
    }

    /// Observables at elapsed time t: sums over phased coefficients.
    /// Sequential over modes for bitwise determinism.
    fn observe(&self, table: &ModeTable<T>, model: EvolutionModel, elapsed: T) -> ObservableRecord<T> {
        let mut norm2 = T::ZERO;
        let mut h = T::ZERO;
        let mut q = T::ZERO;
        let mut occ = [T::ZERO; 4];
        for i in 0..table.u.len() {
            for col in 0..8 {
                let theta = -table.rate(model, i, col) * elapsed;
                let z = self.coeff[i * 8 + col] * C::new(theta.cos(), theta.sin());
                let w = z.norm_sqr() * self.weight;
                let eps = r::<T>(column_epsilon(col) as f64);
                norm2 = norm2 + w;
                h = h + w * eps * table.e[i];
                q = q + w * eps;
                occ[column_slot(col)] = occ[column_slot(col)] + w;
            }
        }
        let norm = norm2.sqrt();
        let inv = if norm2 > T::ZERO { T::ONE / norm2 } else { T::ZERO };
        ObservableRecord {
            norm,
            energy: h * inv,
            charge: q * inv,
            occupations: [
                occ[0] * inv,
                occ[1] * inv,
                occ[2] * inv,
                occ[3] * inv,
            ],
        }
    }

    /// Norm fraction carried by the columns a projector's complement keeps:
    /// the leakage out of the constrained subspace.
    fn leakage(&self, table: &ModeTable<T>, model: EvolutionModel, elapsed: T, violating: ProjectorSpec) -> T {
        let mut viol = T::ZERO;
        let mut total = T::ZERO;
        for i in 0..table.u.len() {
            for col in 0..8 {
                let theta = -table.rate(model, i, col) * elapsed;
                let z = self.coeff[i * 8 + col] * C::new(theta.cos(), theta.sin());
                let w = z.norm_sqr() * self.weight;
                total = total + w;
                let (eps, sig) = SECTOR_ORDER[col / 2];
                let kept_by_violating = match violating.kind {
                    1 => sig == violating.sign,
                    2 => eps * sig == violating.sign,
                    _ => eps == violating.sign,
                };
                if kept_by_violating {
                    viol = viol + w;
                }
            }
        }
        if total > T::ZERO {
            (viol / total).sqrt()
        } else {
            T::ZERO
        }
    }
}

/// Evolve a field for `steps` steps of size `dt` (dt may be negative:
/// evolving by −dt exactly reverses a +dt run).  With a `precondition`, the
/// initial field is first projected by that projector and renormalized.
/// Observables are recorded at the initial time and after every step.
pub fn evolve<T: Real>(
    f: &SpinorField<T>,
    gs: &GammaSet<T>,
    model: EvolutionModel,
    dt: T,
    steps: usize,
    precondition: Option<ProjectorSpec>,
) -> Result<(SpinorField<T>, ObservableSeries<T>)> {
    let table = ModeTable::new(f.grid, gs, f.m)?;
    evolve_with_table(f, &table, model, dt, steps, precondition)
}

/// `evolve` against a prebuilt `ModeTable` (reuse across runs on one grid).
pub fn evolve_with_table<T: Real>(
    f: &SpinorField<T>,
    table: &ModeTable<T>,
    model: EvolutionModel,
    dt: T,
    steps: usize,
    precondition: Option<ProjectorSpec>,
) -> Result<(SpinorField<T>, ObservableSeries<T>)> {
    if f.grid != table.grid {
        return Err(Dirac8Error::GridMismatch {
            expected: table.grid.describe(),
            found: f.grid.describe(),
        });
    }
    let mut state = f.clone();
    if let Some(spec) = precondition {
        state = project_in_eigenbasis(table, spec, &state);
        let n = state.norm();
        if fd(n) < 1e-14 {
            return Err(Dirac8Error::InvalidParameter(format!(
                "precondition {} annihilated the field",
                spec.name()
            )));
        }
        state.scale_mut(cr(T::ONE / n));
    }
    let coeffs = CoefficientState::from_field(&state, table);
    let mut series = ObservableSeries::default();
    series.push(state.time, &coeffs.observe(table, model, T::ZERO));
    for n in 1..=steps {
        let elapsed = r::<T>(n as f64) * dt;
        series.push(state.time + elapsed, &coeffs.observe(table, model, elapsed));
    }
    let total = r::<T>(steps as f64) * dt;
    let final_field = coeffs.to_field(table, model, total, state.time + total);
    Ok((final_field, series))
}

/// Apply a projector using the table's eigenbasis (diagonal column mask),
/// avoiding a second per-mode matrix build.
fn project_in_eigenbasis<T: Real>(
    table: &ModeTable<T>,
    spec: ProjectorSpec,
    f: &SpinorField<T>,
) -> SpinorField<T> {
    let coeffs = CoefficientState::from_field(f, table);
    let mut masked = coeffs.coeff.clone();
    for chunk in masked.chunks_mut(8) {
        for (col, z) in chunk.iter_mut().enumerate() {
            let (eps, sig) = SECTOR_ORDER[col / 2];
            let kept = match spec.kind {
                1 => sig == spec.sign,
                2 => eps * sig == spec.sign,
                _ => eps == spec.sign,
            };
            if !kept {
                *z = c0();
            }
        }
    }
    let state = CoefficientState {
        coeff: masked,
        weight: coeffs.weight,
    };
    state.to_field(table, EvolutionModel::Dirac8, T::ZERO, f.time)
}

/// Single observable record for a field.
pub fn observables<T: Real>(
    f: &SpinorField<T>,
    gs: &GammaSet<T>,
    m: T,
) -> Result<ObservableRecord<T>> {
    let table = ModeTable::new(f.grid, gs, m)?;
    let coeffs = CoefficientState::from_field(f, &table);
    Ok(coeffs.observe(&table, EvolutionModel::Dirac8, T::ZERO))
}

/// Max over recorded steps of ‖P_violating f(t)‖ / ‖f(t)‖, where the
/// violating projector is the complement of `spec`: the leakage out of the
/// constrained subspace during evolution.
pub fn constraint_drift<T: Real>(
    f0: &SpinorField<T>,
    spec: ProjectorSpec,
    gs: &GammaSet<T>,
    model: EvolutionModel,
    dt: T,
    steps: usize,
) -> Result<T> {
    let table = ModeTable::new(f0.grid, gs, f0.m)?;
    let coeffs = CoefficientState::from_field(f0, &table);
    let violating = spec.complement();
    let mut worst = T::ZERO;
    for n in 0..=steps {
        let elapsed = r::<T>(n as f64) * dt;
        worst = worst.max(coeffs.leakage(&table, model, elapsed, violating));
    }
    Ok(worst)
}

/// Classical 4th-order Runge–Kutta integration of the same per-mode linear
/// systems; included solely as a cross-check of the exact propagator
/// (global error O(dt⁴)).
pub fn evolve_rk4<T: Real>(
    f: &SpinorField<T>,
    gs: &GammaSet<T>,
    model: EvolutionModel,
    dt: T,
    steps: usize,
) -> Result<SpinorField<T>> {
    let kernel = crate::poincare::HamiltonianKernel::new(gs, f.m);
    let mut hat = f.to_momentum();
    let grid = f.grid;
    hat.par_chunks_mut(8).enumerate().for_each(|(i, chunk)| {
        let k = grid.k_at(i);
        let gen: Matrix8<T> = match model {
            EvolutionModel::Dirac8 => kernel.at(&k),
            EvolutionModel::SqrtE => crate::matrix::scaled_identity(energy(&k, kernel.m)),
        };
        let mut v = Vector8::from_fn(|row, _| chunk[row]);
        let minus_i = C::new(T::ZERO, -T::ONE);
        for _ in 0..steps {
            let k1 = gen * v * minus_i;
            let k2 = gen * (v + k1 * cr(dt / r(2.0))) * minus_i;
            let k3 = gen * (v + k2 * cr(dt / r(2.0))) * minus_i;
            let k4 = gen * (v + k3 * cr(dt)) * minus_i;
            v += (k1 + k2 * cr(r::<T>(2.0)) + k3 * cr(r::<T>(2.0)) + k4) * cr(dt / r(6.0));
        }
        for row in 0..8 {
            chunk[row] = v[row];
        }
    });
    Ok(SpinorField::from_momentum(
        grid,
        f.m,
        f.time + r::<T>(steps as f64) * dt,
        hat,
    ))
}

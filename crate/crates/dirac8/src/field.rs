//! Eight-component spinor fields on periodic grids.
//!
//! Values are stored point-major: the complex amplitude of component `c` at
//! flat point `i` lives at `values[i * 8 + c]`.  Public fields are always in
//! position space; momentum-space manipulation happens through the
//! `map_momentum_*` combinators, which wrap a forward transform, a per-mode
//! action, and an inverse transform.

use rayon::prelude::*;

use crate::error::{Dirac8Error, Result};
use crate::fft;
use crate::grid::Grid;
use crate::matrix::{Matrix8, Vector8};
use crate::scalar::{c0, cr, fd, r, Real, C};

#[derive(Clone, Debug)]
pub struct SpinorField<T: Real> {
    pub grid: Grid<T>,
    /// Mass parameter carried by the field (m > 0).
    pub m: T,
    /// Evolution time attached to this snapshot.
    pub time: T,
    /// Point-major component values, length `grid.points() * 8`.
    pub values: Vec<C<T>>,
}

impl<T: Real> SpinorField<T> {
    pub fn zero(grid: Grid<T>, m: T) -> Result<Self> {
        if m <= T::ZERO {
            return Err(Dirac8Error::NonPositiveMass(fd(m)));
        }
        Ok(SpinorField {
            grid,
            m,
            time: T::ZERO,
            values: vec![c0(); grid.points() * 8],
        })
    }

    pub fn spinor_at(&self, flat: usize) -> Vector8<T> {
        Vector8::from_fn(|i, _| self.values[flat * 8 + i])
    }

    pub fn set_spinor(&mut self, flat: usize, v: &Vector8<T>) {
        for i in 0..8 {
            self.values[flat * 8 + i] = v[i];
        }
    }

    /// L² norm squared, Σ|f|²·Δx^d.  Sequential summation keeps the result
    /// bitwise reproducible.
    pub fn norm_sq(&self) -> T {
        let mut acc = T::ZERO;
        for z in &self.values {
            acc = acc + z.norm_sqr();
        }
        acc * self.grid.volume_element()
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    /// Hermitian inner product ⟨self, other⟩ = Σ conj(self)·other · Δx^d.
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        self.check_same_grid(other)?;
        let mut acc = c0::<T>();
        for (a, b) in self.values.iter().zip(&other.values) {
            acc += a.conj() * *b;
        }
        Ok(acc * cr(self.grid.volume_element()))
    }

    pub fn scale_mut(&mut self, s: C<T>) {
        for z in &mut self.values {
            *z *= s;
        }
    }

    /// self += s · other.
    pub fn add_scaled(&mut self, s: C<T>, other: &Self) -> Result<()> {
        self.check_same_grid(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += s * *b;
        }
        Ok(())
    }

    /// max over points of the Euclidean spinor magnitude.
    pub fn max_pointwise_norm(&self) -> T {
        let mut best = T::ZERO;
        for i in 0..self.grid.points() {
            let mut s = T::ZERO;
            for comp in 0..8 {
                s = s + self.values[i * 8 + comp].norm_sqr();
            }
            if s > best {
                best = s;
            }
        }
        best.sqrt()
    }

    /// Ratio of the largest spinor magnitude within the edge band (the
    /// outermost 10% of each half-axis, |x_a| ≥ 0.45·L) to the overall
    /// largest magnitude.  Small values certify periodic-wrap effects are
    /// negligible for operators built from coordinates.
    pub fn edge_localization_ratio(&self) -> T {
        let cut = self.grid.l * r(0.45);
        let mut edge = T::ZERO;
        let mut all = T::ZERO;
        for i in 0..self.grid.points() {
            let x = self.grid.x_at(i);
            let mut s = T::ZERO;
            for comp in 0..8 {
                s = s + self.values[i * 8 + comp].norm_sqr();
            }
            let on_edge = (0..self.grid.dims).any(|a| x[a].abs() >= cut);
            if on_edge && s > edge {
                edge = s;
            }
            if s > all {
                all = s;
            }
        }
        if all == T::ZERO {
            T::ZERO
        } else {
            (edge / all).sqrt()
        }
    }

    /// Multiply pointwise by the coordinate x_axis.
    pub fn multiplied_by_coord(&self, axis: usize) -> Result<Self> {
        if axis >= self.grid.dims {
            return Err(Dirac8Error::GridMismatch {
                expected: format!("axis < {}", self.grid.dims),
                found: format!("axis {axis}"),
            });
        }
        let mut out = self.clone();
        for i in 0..self.grid.points() {
            let x = cr(self.grid.coord(self.grid.axis_index(i, axis)));
            for comp in 0..8 {
                out.values[i * 8 + comp] *= x;
            }
        }
        Ok(out)
    }

    /// Multiply pointwise by a constant 8×8 matrix.
    pub fn multiplied_by_matrix(&self, m: &Matrix8<T>) -> Self {
        let mut out = self.clone();
        out.values
            .par_chunks_mut(8)
            .for_each(|chunk| apply_matrix_chunk(m, chunk));
        out
    }

    /// Forward transform of the value buffer (position → momentum).
    pub fn to_momentum(&self) -> Vec<C<T>> {
        let mut v = self.values.clone();
        fft::transform(&mut v, &self.grid, false);
        v
    }

    /// Rebuild a position-space field from momentum-space values.
    pub fn from_momentum(grid: Grid<T>, m: T, time: T, mut values: Vec<C<T>>) -> Self {
        fft::transform(&mut values, &grid, true);
        SpinorField {
            grid,
            m,
            time,
            values,
        }
    }

    /// Apply a scalar momentum-space multiplier g(k): f ↦ F⁻¹[g(k)·F f].
    pub fn map_momentum_scalar(&self, g: impl Fn(&[T; 3]) -> C<T> + Sync) -> Self {
        let mut v = self.to_momentum();
        let grid = self.grid;
        v.par_chunks_mut(8).enumerate().for_each(|(i, chunk)| {
            let s = g(&grid.k_at(i));
            for z in chunk {
                *z *= s;
            }
        });
        fft::transform(&mut v, &self.grid, true);
        SpinorField {
            grid: self.grid,
            m: self.m,
            time: self.time,
            values: v,
        }
    }

    /// Apply a scalar multiplier diagonal in one wavenumber:
    /// f ↦ F⁻¹ₐ[g(kₐ)·Fₐ f], transforming along `axis` only.
    ///
    /// Agrees with `map_momentum_scalar` whenever g depends on a single
    /// wavenumber, at a third of the transform cost on 3D grids.
    pub fn map_axis_scalar(&self, axis: usize, g: impl Fn(T) -> C<T> + Sync) -> Self {
        let mut v = self.values.clone();
        fft::transform_axis(&mut v, &self.grid, axis, false);
        let grid = self.grid;
        v.par_chunks_mut(8).enumerate().for_each(|(i, chunk)| {
            let s = g(grid.wavenumber(grid.axis_index(i, axis)));
            for z in chunk {
                *z *= s;
            }
        });
        fft::transform_axis(&mut v, &self.grid, axis, true);
        SpinorField {
            grid: self.grid,
            m: self.m,
            time: self.time,
            values: v,
        }
    }

    /// Apply a matrix momentum-space multiplier M(k): f ↦ F⁻¹[M(k)·F f].
    pub fn map_momentum_matrix(&self, g: impl Fn(&[T; 3]) -> Matrix8<T> + Sync) -> Self {
        let mut v = self.to_momentum();
        let grid = self.grid;
        v.par_chunks_mut(8).enumerate().for_each(|(i, chunk)| {
            let m = g(&grid.k_at(i));
            apply_matrix_chunk(&m, chunk);
        });
        fft::transform(&mut v, &self.grid, true);
        SpinorField {
            grid: self.grid,
            m: self.m,
            time: self.time,
            values: v,
        }
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Dirac8Error::GridMismatch {
                expected: self.grid.describe(),
                found: other.grid.describe(),
            });
        }
        Ok(())
    }
}

/// y ← M·y for one point-major spinor chunk (length 8).
pub fn apply_matrix_chunk<T: Real>(m: &Matrix8<T>, chunk: &mut [C<T>]) {
    let mut out = [c0::<T>(); 8];
    for (row, o) in out.iter_mut().enumerate() {
        let mut acc = c0::<T>();
        for col in 0..8 {
            acc += m[(row, col)] * chunk[col];
        }
        *o = acc;
    }
    chunk.copy_from_slice(&out);
}

/// Normalized Gaussian wave packet with constant spinor polarization:
/// f(x) = exp(−|x−c|²/(2w²)) · exp(i p₀·x) · v, scaled to unit L² norm.
///
/// Construction precondition: the packet tail must stay below 1e-12
/// (relative to the peak) inside the edge band, so coordinate-multiplication
/// operators see an effectively compactly supported function.
pub fn localized_packet<T: Real>(
    grid: Grid<T>,
    m: T,
    center: &[T; 3],
    width: T,
    p0: &[T; 3],
    spinor: &Vector8<T>,
) -> Result<SpinorField<T>> {
    if width <= T::ZERO {
        return Err(Dirac8Error::InvalidParameter(format!(
            "packet width must be positive (got {})",
            fd(width)
        )));
    }
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
    let edge = f.edge_localization_ratio();
    if fd(edge) > 1e-12 {
        return Err(Dirac8Error::ResolutionPrecondition(format!(
            "packet tail {:.3e} at the edge band exceeds 1e-12; widen the box \
             or narrow the packet (grid {}, width {}, center ({}, {}, {}))",
            fd(edge),
            grid.describe(),
            fd(width),
            fd(center[0]),
            fd(center[1]),
            fd(center[2]),
        )));
    }
    let n = f.norm();
    if n == T::ZERO {
        return Err(Dirac8Error::InvalidParameter(
            "packet spinor polarization must be nonzero".into(),
        ));
    }
    f.scale_mut(cr(T::ONE / n));
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use approx::assert_relative_eq;

    fn test_grid() -> Grid<f64> {
        Grid::new(1, 128, 40.0).unwrap()
    }

    #[test]
    fn packet_is_normalized_and_localized() {
        let g = test_grid();
        let v = sampling::spinor(&mut sampling::rng(3));
        let f = localized_packet(g, 1.0, &[1.0, 0.0, 0.0], 2.0, &[0.7, 0.0, 0.0], &v).unwrap();
        assert_relative_eq!(f.norm(), 1.0, max_relative = 1e-12);
        assert!(fd(f.edge_localization_ratio()) <= 1e-12);
    }

    #[test]
    fn packet_edge_precondition_rejects_wide_packets() {
        let g = test_grid();
        let v = sampling::spinor(&mut sampling::rng(3));
        let err = localized_packet(g, 1.0, &[0.0; 3], 8.0, &[0.0; 3], &v).unwrap_err();
        assert!(matches!(err, Dirac8Error::ResolutionPrecondition(_)));
    }

    #[test]
    fn inner_product_matches_norm() {
        let g = test_grid();
        let v = sampling::spinor(&mut sampling::rng(5));
        let f = localized_packet(g, 1.0, &[0.0; 3], 1.5, &[1.0, 0.0, 0.0], &v).unwrap();
        let ip = f.inner(&f).unwrap();
        assert_relative_eq!(ip.re, f.norm_sq(), max_relative = 1e-12);
        assert!(ip.im.abs() < 1e-14);
    }

    #[test]
    fn momentum_scalar_map_shifts_packet_momentum() {
        // Multiplying by exp(i k a) in momentum space translates by −a…
        // instead check the simplest exact identity: the map with g ≡ 1 is
        // the identity, and g(k) = k₁ annihilates the zero mode of a
        // constant field.
        let g = Grid::<f64>::new(1, 32, 10.0).unwrap();
        let mut f = SpinorField::zero(g, 1.0).unwrap();
        for i in 0..g.points() {
            f.values[i * 8] = crate::scalar::c(1.0, 0.0);
        }
        let id = f.map_momentum_scalar(|_| cr(1.0));
        let killed = f.map_momentum_scalar(|k| cr(k[0]));
        let mut dev: f64 = 0.0;
        let mut gone: f64 = 0.0;
        for i in 0..f.values.len() {
            dev = dev.max((id.values[i] - f.values[i]).norm());
            gone = gone.max(killed.values[i].norm());
        }
        assert!(dev < 1e-13);
        assert!(gone < 1e-13);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = SpinorField::zero(Grid::<f64>::new(1, 32, 10.0).unwrap(), 1.0).unwrap();
        let b = SpinorField::zero(Grid::<f64>::new(1, 64, 10.0).unwrap(), 1.0).unwrap();
        assert!(matches!(
            a.inner(&b),
            Err(Dirac8Error::GridMismatch { .. })
        ));
    }
}

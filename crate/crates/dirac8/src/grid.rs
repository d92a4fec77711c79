//! Periodic uniform grids in 1–3 dimensions.
//!
//! Row-major layout: for d dimensions the flat point index is
//! `((i₁·n + i₂)·n + …)`, axis 0 slowest.  Coordinates are centered
//! (x ∈ [−L/2, L/2)), and the dual grid carries the standard signed FFT
//! wavenumbers k = 2π·j/L with j ∈ {−N/2, …, N/2−1}.

use crate::error::{Dirac8Error, Result};
use crate::scalar::{fd, r, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid<T: Real> {
    /// Spatial dimensions, 1..=3.
    pub dims: usize,
    /// Points per axis; a power of two.
    pub n: usize,
    /// Box length per axis.
    pub l: T,
}

impl<T: Real> Grid<T> {
    pub fn new(dims: usize, n: usize, l: T) -> Result<Self> {
        if !(1..=3).contains(&dims) {
            return Err(Dirac8Error::InvalidParameter(format!(
                "grid dims must be 1, 2, or 3 (got {dims})"
            )));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(Dirac8Error::InvalidParameter(format!(
                "grid points per axis must be a power of two ≥ 2 (got {n})"
            )));
        }
        if l <= T::ZERO {
            return Err(Dirac8Error::InvalidParameter(format!(
                "box length must be positive (got {})",
                fd(l)
            )));
        }
        Ok(Grid { dims, n, l })
    }

    /// Total number of grid points N^d.
    pub fn points(&self) -> usize {
        self.n.pow(self.dims as u32)
    }

    /// Grid spacing Δx = L / N.
    pub fn dx(&self) -> T {
        self.l / r(self.n as f64)
    }

    /// Volume element Δx^d.
    pub fn volume_element(&self) -> T {
        let mut v = T::ONE;
        for _ in 0..self.dims {
            v = v * self.dx();
        }
        v
    }

    /// Flat-index stride of `axis` in points (axis 0 slowest).
    pub fn axis_stride(&self, axis: usize) -> usize {
        self.n.pow((self.dims - 1 - axis) as u32)
    }

    /// Centered coordinate of index i along any axis: −L/2 + i·Δx.
    pub fn coord(&self, i: usize) -> T {
        -self.l / r(2.0) + self.dx() * r(i as f64)
    }

    /// Signed wavenumber of dual index j: 2π·ĵ/L, ĵ ∈ {−N/2, …, N/2−1}.
    pub fn wavenumber(&self, j: usize) -> T {
        let signed = if j < self.n / 2 {
            j as f64
        } else {
            j as f64 - self.n as f64
        };
        r::<T>(2.0 * std::f64::consts::PI * signed) / self.l
    }

    /// Per-axis index of a flat point index along `axis`.
    pub fn axis_index(&self, flat: usize, axis: usize) -> usize {
        (flat / self.axis_stride(axis)) % self.n
    }

    /// Position 3-vector of a flat index (unused axes are 0).
    pub fn x_at(&self, flat: usize) -> [T; 3] {
        let mut x = [T::ZERO; 3];
        for a in 0..self.dims {
            x[a] = self.coord(self.axis_index(flat, a));
        }
        x
    }

    /// Momentum 3-vector of a flat dual index (unused axes are 0).
    pub fn k_at(&self, flat: usize) -> [T; 3] {
        let mut k = [T::ZERO; 3];
        for a in 0..self.dims {
            k[a] = self.wavenumber(self.axis_index(flat, a));
        }
        k
    }

    /// Largest resolvable |k| per axis (π/Δx).
    pub fn k_max(&self) -> T {
        r::<T>(std::f64::consts::PI) / self.dx()
    }

    pub fn describe(&self) -> String {
        format!("{}D, N={}, L={}", self.dims, self.n, fd(self.l))
    }
}

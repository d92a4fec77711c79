//! Multidimensional FFT over 8-component spinor fields.
//!
//! Fields are stored point-major (flat point index × 8 components), so a
//! d-dimensional transform is d axis passes, each pass running independent
//! one-dimensional FFTs along every (line, component) pair.  Lines are
//! disjoint index sets, which lets the passes parallelize over lines with
//! per-thread scratch buffers.
//!
//! Convention: `forward` is the unnormalized DFT (position → momentum);
//! `inverse` divides by N per axis, so a round trip is the identity.

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::grid::Grid;
use crate::scalar::{cr, Real, C};

/// Raw pointer wrapper for the disjoint-line parallel passes.
struct SendPtr<T>(*mut T);
unsafe impl<T> Send for SendPtr<T> {}
unsafe impl<T> Sync for SendPtr<T> {}

/// In-place multidimensional FFT of a point-major spinor buffer.
///
/// `values.len()` must equal `grid.points() * 8`.
pub fn transform<T: Real>(values: &mut [C<T>], grid: &Grid<T>, inverse: bool) {
    for axis in 0..grid.dims {
        transform_axis(values, grid, axis, inverse);
    }
}

/// In-place FFT along a single grid axis.
///
/// A full transform is `dims` such passes; operators diagonal in one
/// wavenumber only (a single spectral derivative, say) need just the pass
/// for their axis, which is what makes them cheap on 3D grids.
pub fn transform_axis<T: Real>(values: &mut [C<T>], grid: &Grid<T>, axis: usize, inverse: bool) {
    assert_eq!(
        values.len(),
        grid.points() * 8,
        "field buffer does not match grid"
    );
    assert!(axis < grid.dims, "axis {axis} out of range for {}D grid", grid.dims);
    let n = grid.n;
    let mut planner = FftPlanner::<T>::new();
    let fft: Arc<dyn Fft<T>> = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let inv_scale = cr(T::ONE / crate::scalar::r(n as f64));

    let stride_pts = grid.axis_stride(axis);
    let lines = grid.points() / n;
    let scratch_len = fft.get_inplace_scratch_len();
    let ptr = SendPtr(values.as_mut_ptr());
    let ptr = &ptr;
    (0..lines).into_par_iter().for_each_init(
        || (vec![C::<T>::default(); n * 8], vec![C::<T>::default(); scratch_len]),
        |(buf, scratch), line| {
            // Every point lies on exactly one line per axis: the line is
            // identified by (block, offset) with the axis index varying.
            // All 8 components of the line's points are gathered together
            // — contiguous per point — into component-major series, so one
            // batched FFT call transforms them all while the field buffer
            // is walked only once.
            let block = line / stride_pts;
            let offset = line % stride_pts;
            let base_pt = block * n * stride_pts + offset;
            // SAFETY: distinct line tasks address disjoint point sets
            // {base_pt + k·stride_pts}: every point index decomposes
            // uniquely as block·(n·stride_pts) + k·stride_pts + offset with
            // offset < stride_pts, so no two tasks alias.
            let p = ptr.0;
            unsafe {
                for k in 0..n {
                    let src = p.add((base_pt + k * stride_pts) * 8);
                    for comp in 0..8 {
                        buf[comp * n + k] = *src.add(comp);
                    }
                }
            }
            // rustfft processes a buffer of 8·n values as 8 stacked
            // n-point transforms.
            fft.process_with_scratch(buf, scratch);
            if inverse {
                for z in buf.iter_mut() {
                    *z = *z * inv_scale;
                }
            }
            unsafe {
                for k in 0..n {
                    let dst = p.add((base_pt + k * stride_pts) * 8);
                    for comp in 0..8 {
                        *dst.add(comp) = buf[comp * n + k];
                    }
                }
            }
        },
    );
}

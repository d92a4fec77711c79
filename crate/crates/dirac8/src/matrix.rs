//! Dense 8×8 complex matrices and small helpers shared across modules.

use nalgebra::{SMatrix, SVector};

use crate::scalar::{c0, cr, fd, Real, C};

/// 8×8 complex matrix — the natural home of the Γ-system.
pub type Matrix8<T> = SMatrix<C<T>, 8, 8>;

/// 8-component complex column vector.
pub type Vector8<T> = SVector<C<T>, 8>;

/// 4×4 complex matrix (induced blocks of the 8×8 system).
pub type Matrix4<T> = SMatrix<C<T>, 4, 4>;

/// 2×2 complex matrix (tensor factors).
pub type Matrix2<T> = SMatrix<C<T>, 2, 2>;

/// Kronecker product of a 2×2 and a 4×4 block, laid out so that the 2×2
/// factor indexes the coarse 4×4-block structure.
pub fn kron2x4<T: Real>(a: &Matrix2<T>, b: &Matrix4<T>) -> Matrix8<T> {
    let mut out = Matrix8::<T>::zeros();
    for bi in 0..2 {
        for bj in 0..2 {
            let f = a[(bi, bj)];
            for i in 0..4 {
                for j in 0..4 {
                    out[(4 * bi + i, 4 * bj + j)] = f * b[(i, j)];
                }
            }
        }
    }
    out
}

/// Max-abs (entrywise) norm; the residual measure used throughout.
pub fn max_abs<T: Real, const R: usize, const N: usize>(m: &SMatrix<C<T>, R, N>) -> T {
    let mut best = T::ZERO;
    for v in m.iter() {
        let a = v.norm_sqr();
        if a > best {
            best = a;
        }
    }
    best.sqrt()
}

/// ‖AB − BA‖_max.
pub fn commutator_norm<T: Real>(a: &Matrix8<T>, b: &Matrix8<T>) -> T {
    max_abs(&(a * b - b * a))
}

/// ‖AB + BA‖_max.
pub fn anticommutator_norm<T: Real>(a: &Matrix8<T>, b: &Matrix8<T>) -> T {
    max_abs(&(a * b + b * a))
}

/// ‖M − M†‖_max.
pub fn hermiticity_residual<T: Real>(m: &Matrix8<T>) -> T {
    max_abs(&(m - m.adjoint()))
}

/// ‖M†M − 1‖_max.
pub fn unitarity_residual<T: Real>(m: &Matrix8<T>) -> T {
    max_abs(&(m.adjoint() * m - Matrix8::<T>::identity()))
}

/// ‖M² − 1‖_max.
pub fn involution_residual<T: Real>(m: &Matrix8<T>) -> T {
    max_abs(&(m * m - Matrix8::<T>::identity()))
}

/// ‖M² − M‖_max (projector idempotency).
pub fn idempotency_residual<T: Real>(m: &Matrix8<T>) -> T {
    max_abs(&(m * m - m))
}

/// Identity matrix scaled by a real constant.
pub fn scaled_identity<T: Real>(x: T) -> Matrix8<T> {
    Matrix8::<T>::identity() * cr(x)
}

/// Gram–Schmidt orthonormalization of the given columns, in index order.
/// Columns whose residual after projection falls below `tol` are dropped.
pub fn orthonormalize_columns<T: Real>(cols: &[Vector8<T>], tol: T) -> Vec<Vector8<T>> {
    let mut basis: Vec<Vector8<T>> = Vec::new();
    for col in cols {
        let mut v = *col;
        for b in &basis {
            let overlap = b.dotc(&v);
            v -= b * overlap;
        }
        let n = v.norm();
        if n > tol {
            basis.push(v / cr(n));
        }
    }
    basis
}

/// Matrix with the given columns (padded with zero columns to 8).
pub fn from_columns<T: Real>(cols: &[Vector8<T>]) -> Matrix8<T> {
    let mut m = Matrix8::<T>::zeros();
    for (j, c) in cols.iter().enumerate().take(8) {
        m.set_column(j, c);
    }
    m
}

/// Flatten to row-major `[re, im]` pairs (stable dump format).
pub fn to_reim_rows<T: Real>(m: &Matrix8<T>) -> Vec<Vec<[f64; 2]>> {
    (0..8)
        .map(|i| {
            (0..8)
                .map(|j| {
                    let z = m[(i, j)];
                    [fd(z.re), fd(z.im)]
                })
                .collect()
        })
        .collect()
}

/// Zero matrix with a single entry set (builder convenience for tests).
pub fn unit_entry<T: Real>(i: usize, j: usize, v: C<T>) -> Matrix8<T> {
    let mut m = Matrix8::<T>::zeros();
    m[(i, j)] = v;
    m
}

/// True when every entry of `m` lies within `tol` of the corresponding
/// entry of `n` in max-abs norm.
pub fn approx_eq<T: Real>(m: &Matrix8<T>, n: &Matrix8<T>, tol: T) -> bool {
    max_abs(&(m - n)) <= tol
}

/// Trace as a complex number.
pub fn trace<T: Real>(m: &Matrix8<T>) -> C<T> {
    let mut t = c0::<T>();
    for i in 0..8 {
        t += m[(i, i)];
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    type M8 = Matrix8<f64>;

    #[test]
    fn kron_block_layout() {
        // s3 ⊗ B puts +B in the upper-left 4×4 block and −B in the lower-right.
        let mut s3 = Matrix2::<f64>::zeros();
        s3[(0, 0)] = crate::scalar::c(1.0, 0.0);
        s3[(1, 1)] = crate::scalar::c(-1.0, 0.0);
        let mut b = Matrix4::<f64>::zeros();
        b[(1, 2)] = crate::scalar::c(0.0, 3.0);
        let k = kron2x4(&s3, &b);
        assert_eq!(k[(1, 2)], crate::scalar::c(0.0, 3.0));
        assert_eq!(k[(5, 6)], crate::scalar::c(0.0, -3.0));
        assert_eq!(max_abs(&k), 3.0);
    }

    #[test]
    fn residual_helpers() {
        let id = M8::identity();
        assert_eq!(hermiticity_residual(&id), 0.0);
        assert_eq!(unitarity_residual(&id), 0.0);
        assert_eq!(involution_residual(&id), 0.0);
        assert_eq!(idempotency_residual(&id), 0.0);
        let half = scaled_identity(0.5);
        assert!(idempotency_residual(&half) > 0.2);
    }

    #[test]
    fn gram_schmidt_drops_dependent_columns() {
        let mut e0 = Vector8::<f64>::zeros();
        e0[0] = crate::scalar::c(2.0, 0.0);
        let mut e01 = Vector8::<f64>::zeros();
        e01[0] = crate::scalar::c(1.0, 0.0);
        e01[1] = crate::scalar::c(1.0, 0.0);
        let basis = orthonormalize_columns(&[e0, e0, e01], 1e-12);
        assert_eq!(basis.len(), 2);
        assert!((basis[0].norm() - 1.0).abs() < 1e-15);
        assert!(basis[0].dotc(&basis[1]).norm() < 1e-15);
    }
}

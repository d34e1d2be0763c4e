//! Small dense least-squares kernels (Householder QR) used by the
//! coefficient solver.

use alloc::vec;
use alloc::vec::Vec;


use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix with owned storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Dense {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }
}

/// Householder reflector `I - tau v v^H` with `v[0] = 1`; returns
/// `(v, tau, beta)` such that the reflector maps `x` to `beta e_1`.
fn householder<T: Scalar>(x: &[T]) -> (Vec<T>, T, T) {
    let norm = x.iter().map(|v| v.modulus_sqr()).sum::<f64>().sqrt();
    let mut v: Vec<T> = x.to_vec();
    if norm == 0.0 {
        return (v, T::zero(), T::zero());
    }
    let x0 = x[0];
    let abs0 = x0.modulus();
    // beta = -phase(x0) * norm
    let phase = if abs0 == 0.0 {
        T::one()
    } else {
        x0.scale(1.0 / abs0)
    };
    let beta = -(phase.scale(norm));
    let v0 = x0 - beta;
    for vi in v.iter_mut().skip(1) {
        *vi = *vi / v0;
    }
    v[0] = T::one();
    let tau = (beta - x0) / beta;
    (v, tau.conj(), beta)
}

/// Solves `min ||a z - b||^2 + damping ||z||^2` for `a` of shape `m x n`.
/// Requires `m + (n if damping > 0) >= n`.
pub fn solve_damped<T: Scalar>(a: &Dense<T>, b: &[T], damping: f64) -> Result<Vec<T>> {
    let (m, n) = (a.rows, a.cols);
    let extra = if damping > 0.0 { n } else { 0 };
    let rows = m + extra;
    if rows < n || b.len() != m {
        return Err(Error::InvalidArgument("least-squares dimensions"));
    }
    let mut r = Dense::zeros(rows, n);
    r.data[..m * n].copy_from_slice(&a.data);
    let mut rhs: Vec<T> = b.to_vec();
    rhs.resize(rows, T::zero());
    if damping > 0.0 {
        let s = T::from_real(damping.sqrt());
        for j in 0..n {
            r.set(m + j, j, s);
        }
    }
    let scale = a.data.iter().fold(0.0f64, |acc, v| acc.max(v.modulus()));
    for k in 0..n {
        let col: Vec<T> = (k..rows).map(|i| r.get(i, k)).collect();
        let (v, tau, beta) = householder(&col);
        if tau == T::zero() {
            continue;
        }
        // apply (I - tau v v^H) from the left to columns k.. and rhs;
        // the reflector is Hermitian up to tau conj, use H^H = I - conj(tau) v v^H
        let tau_h = tau.conj();
        for j in k..n {
            let mut dot = T::zero();
            for (i, vi) in v.iter().enumerate() {
                dot += vi.conj() * r.get(k + i, j);
            }
            let f = tau_h * dot;
            for (i, vi) in v.iter().enumerate() {
                let cur = r.get(k + i, j);
                r.set(k + i, j, cur - f * *vi);
            }
        }
        let mut dot = T::zero();
        for (i, vi) in v.iter().enumerate() {
            dot += vi.conj() * rhs[k + i];
        }
        let f = tau_h * dot;
        for (i, vi) in v.iter().enumerate() {
            rhs[k + i] -= f * *vi;
        }
        let _ = beta;
    }
    // back substitution on the leading n x n block
    let tiny = f64::EPSILON * scale.max(damping.sqrt()).max(f64::MIN_POSITIVE) * (rows as f64);
    let mut z = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..n {
            s -= r.get(i, j) * z[j];
        }
        let d = r.get(i, i);
        if d.modulus() <= tiny {
            return Err(Error::Singular);
        }
        z[i] = s / d;
    }
    Ok(z)
}

/// Minimum-norm solution of the underdetermined system `a z = b`
/// (`a` is `m x n` with `m <= n` and full row rank).
pub fn solve_min_norm<T: Scalar>(a: &Dense<T>, b: &[T]) -> Result<Vec<T>> {
    let (m, n) = (a.rows, a.cols);
    if m > n || b.len() != m {
        return Err(Error::InvalidArgument("minimum-norm dimensions"));
    }
    // normal equations of the second kind: (a a^H) y = b, z = a^H y
    let mut aah = Dense::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let mut s = T::zero();
            for k in 0..n {
                s += a.get(i, k) * a.get(j, k).conj();
            }
            aah.set(i, j, s);
        }
    }
    let y = match solve_damped(&aah, b, 0.0) {
        Ok(y) => y,
        // rank deficient: regularised least squares tends to the minimum-norm
        // solution; callers check the residual
        Err(Error::Singular) => {
            let scale = a.data.iter().fold(0.0f64, |acc, v| acc.max(v.modulus()));
            return solve_damped(a, b, (1e-9 * scale.max(f64::MIN_POSITIVE)).powi(2));
        }
        Err(e) => return Err(e),
    };
    let mut z = vec![T::zero(); n];
    for (k, zk) in z.iter_mut().enumerate() {
        for (i, yi) in y.iter().enumerate() {
            *zk += a.get(i, k).conj() * *yi;
        }
    }
    Ok(z)
}

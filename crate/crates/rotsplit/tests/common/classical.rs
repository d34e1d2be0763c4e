//! Independent oracles for the 4x4 classical propagators.

use num_complex::Complex64;
use rotsplit_core::{Matrix4, QuadraticHamiltonian};

pub type M4 = [[f64; 4]; 4];

fn mul(a: &M4, b: &M4) -> M4 {
    let mut o = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                o[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    o
}

fn axpy(y: &M4, k: &M4, s: f64) -> M4 {
    let mut o = *y;
    for i in 0..4 {
        for j in 0..4 {
            o[i][j] += s * k[i][j];
        }
    }
    o
}

fn dist(a: &M4, b: &M4) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn identity() -> M4 {
    let mut y = [[0.0; 4]; 4];
    for (i, row) in y.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    y
}

pub fn frobenius_diff(a: &M4, b: &Matrix4<f64>) -> f64 {
    dist(a, &b.entries)
}

/// Fundamental matrix of `u' = M(t) u` on `[t0, t0 + h]`: RK4 with
/// step doubling and local extrapolation, error per step below `tol`.
pub fn adaptive_fundamental(h_a: &QuadraticHamiltonian, t0: f64, h: f64, tol: f64) -> M4 {
    let m = |t: f64| h_a.frozen(t).classical_matrix().entries;
    let rk4 = |t: f64, y: &M4, dt: f64| {
        let k1 = mul(&m(t), y);
        let k2 = mul(&m(t + dt / 2.0), &axpy(y, &k1, dt / 2.0));
        let k3 = mul(&m(t + dt / 2.0), &axpy(y, &k2, dt / 2.0));
        let k4 = mul(&m(t + dt), &axpy(y, &k3, dt));
        let mut o = *y;
        for i in 0..4 {
            for j in 0..4 {
                o[i][j] += dt / 6.0 * (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]);
            }
        }
        o
    };
    let (mut t, mut y) = (t0, identity());
    let end = t0 + h;
    let mut dt = h / 8.0;
    while t < end {
        dt = dt.min(end - t);
        let full = rk4(t, &y, dt);
        let half = rk4(t + dt / 2.0, &rk4(t, &y, dt / 2.0), dt / 2.0);
        let err = dist(&full, &half) / 15.0;
        if err <= tol || dt < 1e-12 {
            t += dt;
            y = axpy(&half, &axpy(&half, &full, -1.0), 1.0 / 15.0);
        }
        let grow = if err > 0.0 { 0.9 * (tol / err).powf(0.2) } else { 4.0 };
        dt *= grow.clamp(0.2, 4.0);
    }
    y
}

/// `exp(t m)` by a 60-term Taylor series with scaling and squaring.
pub fn taylor_exp(m: &Matrix4<f64>, t: f64) -> M4 {
    let mut a = m.entries.map(|r| r.map(|v| v * t));
    let mut s = 0;
    while a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt() > 0.25 {
        a = a.map(|r| r.map(|v| v * 0.5));
        s += 1;
    }
    let mut term = identity();
    let mut sum = identity();
    for k in 1..=60 {
        term = mul(&term, &a).map(|r| r.map(|v| v / k as f64));
        sum = axpy(&sum, &term, 1.0);
    }
    for _ in 0..s {
        sum = mul(&sum, &sum);
    }
    sum
}

/// `||a - b||_F` for a complex matrix against a real one.
pub fn complex_diff(a: &Matrix4<Complex64>, b: &M4) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            s += (a[(i, j)] - b[i][j]).norm_sqr();
        }
    }
    s.sqrt()
}

#![allow(dead_code)]

use num_complex::Complex64;
use rotsplit_core::{AveragedHamiltonian, Matrix4, QuadraticHamiltonian};

pub type C4 = [[Complex64; 4]; 4];

pub fn to_c4(m: &Matrix4<f64>) -> C4 {
    m.entries.map(|r| r.map(Complex64::from))
}

pub fn mat_mul(a: &C4, b: &C4) -> C4 {
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn diff_norm(a: &C4, b: &C4) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            s += (a[i][j] - b[i][j]).norm_sqr();
        }
    }
    s.sqrt()
}

pub fn norm(a: &C4) -> f64 {
    diff_norm(a, &[[Complex64::new(0.0, 0.0); 4]; 4])
}

/// exp(t m) by 64-term Taylor series with scaling and squaring.
pub fn taylor_exp(m: &C4, t: Complex64) -> C4 {
    let mut a = m.map(|r| r.map(|v| v * t));
    let mut s = 0;
    while norm(&a) > 0.25 {
        a = a.map(|r| r.map(|v| v * 0.5));
        s += 1;
    }
    let mut id = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        id[i][i] = Complex64::new(1.0, 0.0);
    }
    let mut term = id;
    let mut sum = id;
    for k in 1..=64 {
        term = mat_mul(&term, &a).map(|r| r.map(|v| v / k as f64));
        for i in 0..4 {
            for j in 0..4 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        sum = mat_mul(&sum, &sum);
    }
    sum
}

/// Fundamental matrix of `u' = M(t) u` over `[t0, t0 + h]` by classical RK4
/// with `n` substeps.
pub fn rk4_fundamental(h_a: &QuadraticHamiltonian, t0: f64, h: f64, n: usize) -> [[f64; 4]; 4] {
    let m = |t: f64| h_a.frozen(t).classical_matrix().entries;
    let mul = |a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]| {
        let mut o = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    o[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        o
    };
    let axpy = |y: &[[f64; 4]; 4], k: &[[f64; 4]; 4], s: f64| {
        let mut o = *y;
        for i in 0..4 {
            for j in 0..4 {
                o[i][j] += s * k[i][j];
            }
        }
        o
    };
    let mut y = [[0.0; 4]; 4];
    for (i, row) in y.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let dt = h / n as f64;
    for s in 0..n {
        let t = t0 + s as f64 * dt;
        let k1 = mul(&m(t), &y);
        let k2 = mul(&m(t + dt / 2.0), &axpy(&y, &k1, dt / 2.0));
        let k3 = mul(&m(t + dt / 2.0), &axpy(&y, &k2, dt / 2.0));
        let k4 = mul(&m(t + dt), &axpy(&y, &k3, dt));
        for i in 0..4 {
            for j in 0..4 {
                y[i][j] += dt / 6.0 * (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]);
            }
        }
    }
    y
}

/// The modulated trap of the numerical experiments.
pub fn experiment_hamiltonian() -> QuadraticHamiltonian {
    QuadraticHamiltonian::modulated_trap(4.0, 0.1)
}

pub fn slope(hs: &[f64], errs: &[f64]) -> f64 {
    // least-squares fit of log err against log h
    let n = hs.len() as f64;
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

pub fn real_diff(a: &[[f64; 4]; 4], b: &Matrix4<f64>) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            s += (a[i][j] - b[(i, j)]).powi(2);
        }
    }
    s.sqrt()
}

pub fn avg_array(h: &AveragedHamiltonian<f64>) -> [f64; 10] {
    h.to_array()
}

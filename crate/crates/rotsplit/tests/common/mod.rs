#![allow(dead_code)]

pub mod classical;

use std::sync::Arc;

use num_complex::Complex64;
use rotsplit::{Grid, GridSpec, WaveFunction};
use rotsplit_core::QuadraticHamiltonian;

pub fn vortex(grid: &Arc<Grid>) -> WaveFunction {
    let mut psi = WaveFunction::from_fn(grid.clone(), |x, y| {
        Complex64::new(x, y) * (-(x * x + y * y) / 2.0).exp()
    });
    psi.normalize().unwrap();
    psi
}

pub fn square_grid(l: f64, n: usize) -> Arc<Grid> {
    Grid::new(GridSpec::square(l, n).unwrap()).unwrap()
}

/// Least-squares slope of `ln err` against `ln h`.
pub fn slope(hs: &[f64], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

/// Dense discretization of `H_A(t)` on the grid: the kinetic and rotation
/// part as an explicit matrix built from DFT sums, the trap as a diagonal.
/// Layout matches `WaveFunction` (x index major).
pub struct DenseHamiltonian {
    pub n: usize,
    /// `(K_x^2 + K_y^2)/2 + Omega (X K_y - Y K_x)`, row-major.
    pub kinetic: Vec<Complex64>,
    x2: Vec<f64>,
    y2: Vec<f64>,
}

/// `F^{-1} diag(f(k)) F` for the unitary DFT on `n` points.
fn spectral_matrix(k: &[f64], f: impl Fn(f64) -> f64) -> Vec<Complex64> {
    let n = k.len();
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for l in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for (q, &kq) in k.iter().enumerate() {
                let arg = 2.0 * std::f64::consts::PI * (q * (j + n - l) % (n * n)) as f64 / n as f64;
                s += f(kq) * Complex64::from_polar(1.0, arg);
            }
            m[j * n + l] = s / n as f64;
        }
    }
    m
}

impl DenseHamiltonian {
    pub fn new(grid: &Grid, rotation: f64) -> Self {
        let (nx, ny) = (grid.spec.nx, grid.spec.ny);
        let n = nx * ny;
        let dxx = spectral_matrix(&grid.kx, |k| k * k);
        let dx = spectral_matrix(&grid.kx, |k| k);
        let dyy = spectral_matrix(&grid.ky, |k| k * k);
        let dy = spectral_matrix(&grid.ky, |k| k);
        let mut kinetic = vec![Complex64::new(0.0, 0.0); n * n];
        for ix in 0..nx {
            for iy in 0..ny {
                let row = ix * ny + iy;
                // K_x acts on the x index at fixed y
                for jx in 0..nx {
                    let col = jx * ny + iy;
                    kinetic[row * n + col] += 0.5 * dxx[ix * nx + jx] - rotation * grid.y[iy] * dx[ix * nx + jx];
                }
                for jy in 0..ny {
                    let col = ix * ny + jy;
                    kinetic[row * n + col] += 0.5 * dyy[iy * ny + jy] + rotation * grid.x[ix] * dy[iy * ny + jy];
                }
            }
        }
        let x2 = (0..n).map(|i| grid.x[i / ny].powi(2)).collect();
        let y2 = (0..n).map(|i| grid.y[i % ny].powi(2)).collect();
        DenseHamiltonian { n, kinetic, x2, y2 }
    }

    /// `H(t) v` with trap frequencies `(w_x, w_y)` squared.
    pub fn apply(&self, w: (f64, f64), v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.kinetic[i * n..(i + 1) * n];
            let mut s = Complex64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(v) {
                s += a * b;
            }
            *o = s + 0.5 * (w.0 * self.x2[i] + w.1 * self.y2[i]) * v[i];
        }
        out
    }

    /// `exp(op) v` by Taylor series, `op` given as a closure with norm at
    /// most about one.
    fn taylor(op: impl Fn(&[Complex64]) -> Vec<Complex64>, v: &[Complex64]) -> Vec<Complex64> {
        let mut sum = v.to_vec();
        let mut term = v.to_vec();
        for j in 1..40 {
            term = op(&term);
            let inv = 1.0 / j as f64;
            let mut size = 0.0;
            for (s, t) in sum.iter_mut().zip(term.iter_mut()) {
                *t *= inv;
                *s += *t;
                size += t.norm_sqr();
            }
            if size.sqrt() < 1e-18 {
                break;
            }
        }
        sum
    }

    /// `exp(-i h H) v` for a frozen trap, split into `substeps` Taylor
    /// exponentials.
    pub fn exp_frozen(&self, w: (f64, f64), h: f64, substeps: usize, v: &[Complex64]) -> Vec<Complex64> {
        let tau = h / substeps as f64;
        let mut u = v.to_vec();
        for _ in 0..substeps {
            u = Self::taylor(|z| self.apply(w, z).into_iter().map(|c| Complex64::new(0.0, -tau) * c).collect(), &u);
        }
        u
    }

    /// Fourth-order Magnus on `substeps` pieces of `[t, t + h]` for the
    /// time-dependent trap of `h_a`; each piece exponentiated by Taylor.
    pub fn exp_magnus(&self, h_a: &QuadraticHamiltonian, t: f64, h: f64, substeps: usize, v: &[Complex64]) -> Vec<Complex64> {
        let d = h / substeps as f64;
        let c = 3f64.sqrt() / 6.0;
        let mut u = v.to_vec();
        for j in 0..substeps {
            let t0 = t + j as f64 * d;
            let (t1, t2) = (t0 + (0.5 - c) * d, t0 + (0.5 + c) * d);
            let w1 = ((h_a.omega_x_sq)(t1), (h_a.omega_y_sq)(t1));
            let w2 = ((h_a.omega_x_sq)(t2), (h_a.omega_y_sq)(t2));
            // Omega = d/2 (A1 + A2) + sqrt3/12 d^2 [A2, A1], A = -i H
            let op = |z: &[Complex64]| {
                let a1 = self.apply(w1, z);
                let a2 = self.apply(w2, z);
                let a2a1 = self.apply(w2, &a1);
                let a1a2 = self.apply(w1, &a2);
                let k = 3f64.sqrt() / 12.0 * d * d;
                (0..z.len())
                    .map(|i| Complex64::new(0.0, -d / 2.0) * (a1[i] + a2[i]) - k * (a2a1[i] - a1a2[i]))
                    .collect::<Vec<_>>()
            };
            u = Self::taylor(op, &u);
        }
        u
    }
}

/// Discrete L2 distance with the grid measure.
pub fn l2(grid: &Grid, a: &[Complex64], b: &[Complex64]) -> f64 {
    let s: f64 = a.iter().zip(b).map(|(p, q)| (p - q).norm_sqr()).sum();
    (s * grid.spec.dx() * grid.spec.dy()).sqrt()
}

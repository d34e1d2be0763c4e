//! Uniform periodic grid on `[-L, L)^2` with planned FFTs.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, RotError};

/// Domain half-width and points per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub l: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(l: f64, nx: usize, ny: usize) -> Result<Self> {
        let spec = GridSpec { l, nx, ny };
        spec.validate()?;
        Ok(spec)
    }

    pub fn square(l: f64, n: usize) -> Result<Self> {
        Self::new(l, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l.is_finite() && self.l > 0.0) {
            return Err(RotError::Invalid(format!("half-width L must be positive, got {}", self.l)));
        }
        for (axis, n) in [("N_x", self.nx), ("N_y", self.ny)] {
            if n < 4 || n % 2 != 0 {
                return Err(RotError::Invalid(format!("{axis} must be even and at least 4, got {n}")));
            }
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.l / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.l / self.ny as f64
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Node coordinates `-L + j * 2L/N`.
pub fn coordinates(l: f64, n: usize) -> Vec<f64> {
    let d = 2.0 * l / n as f64;
    (0..n).map(|j| -l + j as f64 * d).collect()
}

/// Wavenumbers `pi m / L` in FFT ordering `0, 1, ..., N/2-1, -N/2, ..., -1`.
pub fn wavenumbers(l: f64, n: usize) -> Vec<f64> {
    let half = n as i64 / 2;
    (0..n as i64)
        .map(|j| {
            let m = if j < half { j } else { j - n as i64 };
            std::f64::consts::PI * m as f64 / l
        })
        .collect()
}

/// Grid with coordinate and wavenumber tables and FFT plans; shared by all
/// wave functions on it.
pub struct Grid {
    pub spec: GridSpec,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub kx: Vec<f64>,
    pub ky: Vec<f64>,
    pub(crate) fwd_x: Arc<dyn Fft<f64>>,
    pub(crate) inv_x: Arc<dyn Fft<f64>>,
    pub(crate) fwd_y: Arc<dyn Fft<f64>>,
    pub(crate) inv_y: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("spec", &self.spec).finish()
    }
}

impl Grid {
    pub fn new(spec: GridSpec) -> Result<Arc<Self>> {
        spec.validate()?;
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Grid {
            x: coordinates(spec.l, spec.nx),
            y: coordinates(spec.l, spec.ny),
            kx: wavenumbers(spec.l, spec.nx),
            ky: wavenumbers(spec.l, spec.ny),
            fwd_x: planner.plan_fft_forward(spec.nx),
            inv_x: planner.plan_fft_inverse(spec.nx),
            fwd_y: planner.plan_fft_forward(spec.ny),
            inv_y: planner.plan_fft_inverse(spec.ny),
            spec,
        }))
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        ix * self.spec.ny + iy
    }

    /// Samples `f(x, y)` in row-major (x-index major) order.
    pub fn sample(&self, f: impl Fn(f64, f64) -> Complex64) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.spec.len());
        for &x in &self.x {
            for &y in &self.y {
                out.push(f(x, y));
            }
        }
        out
    }
}

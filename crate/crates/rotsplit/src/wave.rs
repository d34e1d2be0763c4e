//! Complex field on the grid, tagged with its current representation.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Result, RotError};
use crate::grid::Grid;

/// Which axes are in wavenumber space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    /// `(x, y)`
    Xy,
    /// `(k_x, y)`
    KxY,
    /// `(x, k_y)`
    XKy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Diagonal variables for [`WaveFunction::apply_quadratic_phase`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseVariable {
    X2,
    Y2,
    Kx2,
    Ky2,
    YKx,
    XKy,
    X,
    Y,
    Kx,
    Ky,
}

impl PhaseVariable {
    fn allowed(self, space: Space) -> bool {
        use PhaseVariable::*;
        match self {
            X2 | X => matches!(space, Space::Xy | Space::XKy),
            Y2 | Y => matches!(space, Space::Xy | Space::KxY),
            Kx2 | Kx | YKx => space == Space::KxY,
            Ky2 | Ky | XKy => space == Space::XKy,
        }
    }
}

/// Recurrence length between exact evaluations of the cross phase.
const ANCHOR: usize = 16;

/// `aa a^2 + bb b^2 + ab a b + a a + b b` in the diagonal variables `(a, b)`
/// of the current space.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QuadraticExponent {
    pub aa: Complex64,
    pub bb: Complex64,
    pub ab: Complex64,
    pub a: Complex64,
    pub b: Complex64,
}

/// Arithmetic run `start_value + j * step` at indices `start..start + len`.
struct Run {
    start: usize,
    len: usize,
    start_value: f64,
    step: f64,
}

fn coordinate_runs(l: f64, n: usize) -> Vec<Run> {
    vec![Run { start: 0, len: n, start_value: -l, step: 2.0 * l / n as f64 }]
}

fn wavenumber_runs(l: f64, n: usize) -> Vec<Run> {
    let dk = std::f64::consts::PI / l;
    vec![
        Run { start: 0, len: n / 2, start_value: 0.0, step: dk },
        Run { start: n / 2, len: n / 2, start_value: -((n / 2) as f64) * dk, step: dk },
    ]
}

#[derive(Clone)]
pub struct WaveFunction {
    pub values: Vec<Complex64>,
    pub grid: Arc<Grid>,
    space: Space,
    fft_count: u64,
    scratch: Vec<Complex64>,
}

impl std::fmt::Debug for WaveFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WaveFunction")
            .field("grid", &self.grid.spec)
            .field("space", &self.space)
            .field("fft_count", &self.fft_count)
            .finish()
    }
}

impl WaveFunction {
    /// Coordinate-space samples of `f`.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let values = grid.sample(f);
        Self::from_values(grid, values).expect("sampled length matches grid")
    }

    pub fn from_values(grid: Arc<Grid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.spec.len() {
            return Err(RotError::Invalid(format!(
                "expected {} values, got {}",
                grid.spec.len(),
                values.len()
            )));
        }
        Ok(WaveFunction {
            values,
            grid,
            space: Space::Xy,
            fft_count: 0,
            scratch: Vec::new(),
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    /// Number of batched 1D transforms applied so far.
    pub fn fft_count(&self) -> u64 {
        self.fft_count
    }

    pub fn reset_fft_count(&mut self) {
        self.fft_count = 0;
    }

    pub(crate) fn require(&self, space: Space, what: &'static str) -> Result<()> {
        if self.space != space {
            return Err(RotError::Space {
                expected: what,
                found: self.space,
            });
        }
        Ok(())
    }

    /// Discrete `sum |psi|^2 dx dy`.
    pub fn norm_sqr(&self) -> f64 {
        // unitary transforms keep sum |psi|^2, so this holds in every space
        let spec = &self.grid.spec;
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * spec.dx() * spec.dy()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(RotError::Invalid(format!("cannot normalize a state of norm {n}")));
        }
        let s = 1.0 / n;
        self.values.iter_mut().for_each(|v| *v *= s);
        Ok(())
    }

    /// Discrete L2 distance to `other` (both in coordinate space).
    pub fn distance(&self, other: &WaveFunction) -> Result<f64> {
        self.require(Space::Xy, "coordinate space")?;
        other.require(Space::Xy, "coordinate space")?;
        if self.grid.spec != other.grid.spec {
            return Err(RotError::Invalid("grids differ".into()));
        }
        let spec = &self.grid.spec;
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((s * spec.dx() * spec.dy()).sqrt())
    }

    /// Mass in the outermost two cells along every edge.
    pub fn boundary_mass(&self) -> Result<f64> {
        self.require(Space::Xy, "coordinate space")?;
        let spec = &self.grid.spec;
        let (nx, ny) = (spec.nx, spec.ny);
        let mut s = 0.0;
        for ix in 0..nx {
            for iy in 0..ny {
                if ix < 2 || ix >= nx - 2 || iy < 2 || iy >= ny - 2 {
                    s += self.values[ix * ny + iy].norm_sqr();
                }
            }
        }
        Ok(s * spec.dx() * spec.dy())
    }

    /// Batched unitary transform along x for every y.
    pub fn transform_x(&mut self, direction: Direction) -> Result<()> {
        let (from, to) = match direction {
            Direction::Forward => (Space::Xy, Space::KxY),
            Direction::Inverse => (Space::KxY, Space::Xy),
        };
        self.require(from, "x in the representation being transformed from")?;
        let grid = self.grid.clone();
        let (nx, ny) = (grid.spec.nx, grid.spec.ny);
        let fft = match direction {
            Direction::Forward => &grid.fwd_x,
            Direction::Inverse => &grid.inv_x,
        };
        // gather columns so that x is contiguous
        self.scratch.resize(nx * ny, Complex64::new(0.0, 0.0));
        for ix in 0..nx {
            for iy in 0..ny {
                self.scratch[iy * nx + ix] = self.values[ix * ny + iy];
            }
        }
        fft.process(&mut self.scratch);
        let s = 1.0 / (nx as f64).sqrt();
        for ix in 0..nx {
            for iy in 0..ny {
                self.values[ix * ny + iy] = self.scratch[iy * nx + ix] * s;
            }
        }
        self.space = to;
        self.fft_count += 1;
        Ok(())
    }

    /// Batched unitary transform along y for every x.
    pub fn transform_y(&mut self, direction: Direction) -> Result<()> {
        let (from, to) = match direction {
            Direction::Forward => (Space::Xy, Space::XKy),
            Direction::Inverse => (Space::XKy, Space::Xy),
        };
        self.require(from, "y in the representation being transformed from")?;
        let grid = self.grid.clone();
        let fft = match direction {
            Direction::Forward => &grid.fwd_y,
            Direction::Inverse => &grid.inv_y,
        };
        fft.process(&mut self.values);
        let s = 1.0 / (grid.spec.ny as f64).sqrt();
        self.values.iter_mut().for_each(|v| *v *= s);
        self.space = to;
        self.fft_count += 1;
        Ok(())
    }

    /// Multiplies by `exp(f(a, b))` where `(a, b)` are the diagonal variables
    /// of the current space: `(x, y)`, `(k_x, y)` or `(x, k_y)`.
    pub fn multiply_exp(&mut self, f: impl Fn(f64, f64) -> Complex64) {
        let grid = self.grid.clone();
        let (a, b) = match self.space {
            Space::Xy => (&grid.x, &grid.y),
            Space::KxY => (&grid.kx, &grid.y),
            Space::XKy => (&grid.x, &grid.ky),
        };
        let ny = grid.spec.ny;
        for (i, &av) in a.iter().enumerate() {
            let row = &mut self.values[i * ny..(i + 1) * ny];
            for (v, &bv) in row.iter_mut().zip(b) {
                *v *= f(av, bv).exp();
            }
        }
    }

    /// Multiplies by `exp(q(a, b))` for a quadratic exponent in the diagonal
    /// variables. Same result as [`Self::multiply_exp`] up to a few ulps, at a
    /// fraction of the cost: the cross term runs as a geometric recurrence
    /// along each row, re-anchored every [`ANCHOR`] entries.
    pub fn multiply_quadratic_exp(&mut self, q: &QuadraticExponent) {
        let grid = self.grid.clone();
        let spec = grid.spec;
        let (a, b, b_runs) = match self.space {
            Space::Xy => (&grid.x, &grid.y, coordinate_runs(spec.l, spec.ny)),
            Space::KxY => (&grid.kx, &grid.y, coordinate_runs(spec.l, spec.ny)),
            Space::XKy => (&grid.x, &grid.ky, wavenumber_runs(spec.l, spec.ny)),
        };
        let ny = spec.ny;
        let eb: Vec<Complex64> = b.iter().map(|&v| (q.bb * (v * v) + q.b * v).exp()).collect();
        for (i, &av) in a.iter().enumerate() {
            let ea = (q.aa * (av * av) + q.a * av).exp();
            let row = &mut self.values[i * ny..(i + 1) * ny];
            if q.ab == Complex64::new(0.0, 0.0) {
                for (v, e) in row.iter_mut().zip(&eb) {
                    *v *= ea * e;
                }
                continue;
            }
            let c = q.ab * av;
            for run in &b_runs {
                let w = (c * run.step).exp();
                let mut cross = Complex64::new(1.0, 0.0);
                for j in 0..run.len {
                    if j % ANCHOR == 0 {
                        cross = (c * (run.start_value + j as f64 * run.step)).exp();
                    }
                    let k = run.start + j;
                    row[k] *= ea * eb[k] * cross;
                    cross *= w;
                }
            }
        }
    }

    /// Multiplies by `exp(c * variable)`; the variable must be diagonal in the
    /// current space.
    pub fn apply_quadratic_phase(&mut self, c: Complex64, variable: PhaseVariable) -> Result<()> {
        if !variable.allowed(self.space) {
            return Err(RotError::Space {
                expected: "a representation where the variable is diagonal",
                found: self.space,
            });
        }
        use PhaseVariable::*;
        // a is x or k_x, b is y or k_y depending on the space
        self.multiply_exp(|a, b| {
            let v = match variable {
                X2 | Kx2 => a * a,
                Y2 | Ky2 => b * b,
                YKx | XKy => a * b,
                X | Kx => a,
                Y | Ky => b,
            };
            c * v
        });
        Ok(())
    }
}

//! Fourier application of the decomposition (six batched 1D transforms per
//! step) and the flows of the standard kinetic/potential split.

use num_complex::Complex64;
use rotsplit_core::{AffineDecompCoefficients, DecompCoefficients, QuadraticHamiltonian};

use crate::error::Result;
use crate::wave::{Direction, QuadraticExponent, Space, WaveFunction};

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

fn x_shear(f: Complex64, g: Complex64, e: Complex64, k: Complex64) -> QuadraticExponent {
    // exp(-i (f y^2 + g k_x^2 - e y k_x + k k_x)) with a = k_x, b = y
    QuadraticExponent { aa: MINUS_I * g, bb: MINUS_I * f, ab: -MINUS_I * e, a: MINUS_I * k, ..Default::default() }
}

fn y_shear(f: Complex64, g: Complex64, e: Complex64, k: Complex64) -> QuadraticExponent {
    // exp(-i (f x^2 + g k_y^2 + e x k_y + k k_y)) with a = x, b = k_y
    QuadraticExponent { aa: MINUS_I * f, bb: MINUS_I * g, ab: MINUS_I * e, b: MINUS_I * k, ..Default::default() }
}

fn outer(n: Complex64, m: Complex64) -> QuadraticExponent {
    QuadraticExponent { aa: MINUS_I * n, a: MINUS_I * m, ..Default::default() }
}

/// Applies `exp(-i f0 x^2/2) exp(-i (f1 y^2/2 + g1 k_x^2/2 - e1 y k_x))
/// exp(-i (f2 x^2/2 + g2 k_y^2/2 + e2 x k_y)) exp(-i (f3 y^2/2 + g3 k_x^2/2 - e3 y k_x))`,
/// rightmost factor first.
pub fn rot_step(psi: &mut WaveFunction, c: &DecompCoefficients<Complex64>) -> Result<()> {
    psi.require(Space::Xy, "coordinate space")?;
    let zero = Complex64::new(0.0, 0.0);
    psi.transform_x(Direction::Forward)?;
    psi.multiply_quadratic_exp(&x_shear(c.f3 * 0.5, c.g3 * 0.5, c.e3, zero));
    psi.transform_x(Direction::Inverse)?;
    psi.transform_y(Direction::Forward)?;
    psi.multiply_quadratic_exp(&y_shear(c.f2 * 0.5, c.g2 * 0.5, c.e2, zero));
    psi.transform_y(Direction::Inverse)?;
    psi.transform_x(Direction::Forward)?;
    psi.multiply_quadratic_exp(&x_shear(c.f1 * 0.5, c.g1 * 0.5, c.e1, zero));
    psi.transform_x(Direction::Inverse)?;
    psi.multiply_quadratic_exp(&outer(c.f0 * 0.5, zero));
    Ok(())
}

/// Five-factor affine variant; the quadratic exponents carry no `1/2`.
pub fn rot_step_affine(psi: &mut WaveFunction, c: &AffineDecompCoefficients<Complex64>) -> Result<()> {
    psi.require(Space::Xy, "coordinate space")?;
    psi.multiply_quadratic_exp(&outer(c.n2, c.m2));
    psi.transform_x(Direction::Forward)?;
    psi.multiply_quadratic_exp(&x_shear(c.f3, c.g3, c.e3, c.k3));
    psi.transform_x(Direction::Inverse)?;
    psi.transform_y(Direction::Forward)?;
    psi.multiply_quadratic_exp(&y_shear(c.f2, c.g2, c.e2, c.k2));
    psi.transform_y(Direction::Inverse)?;
    psi.transform_x(Direction::Forward)?;
    psi.multiply_quadratic_exp(&x_shear(c.f1, c.g1, c.e1, c.k1));
    psi.transform_x(Direction::Inverse)?;
    psi.multiply_quadratic_exp(&outer(c.n1, c.m1));
    Ok(())
}

/// `exp(-i step (m_x k_x^2/2 - Omega y k_x))`: two transforms.
pub fn apply_tx(psi: &mut WaveFunction, step: Complex64, mass: f64, rotation: f64) -> Result<()> {
    psi.require(Space::Xy, "coordinate space")?;
    psi.transform_x(Direction::Forward)?;
    let zero = Complex64::new(0.0, 0.0);
    psi.multiply_quadratic_exp(&x_shear(zero, step * (0.5 * mass), step * rotation, zero));
    psi.transform_x(Direction::Inverse)
}

/// `exp(-i step (m_y k_y^2/2 + Omega x k_y))`: two transforms.
pub fn apply_ty(psi: &mut WaveFunction, step: Complex64, mass: f64, rotation: f64) -> Result<()> {
    psi.require(Space::Xy, "coordinate space")?;
    psi.transform_y(Direction::Forward)?;
    let zero = Complex64::new(0.0, 0.0);
    psi.multiply_quadratic_exp(&y_shear(zero, step * (0.5 * mass), step * rotation, zero));
    psi.transform_y(Direction::Inverse)
}

/// External trap energy `(w_x x^2 + w_y y^2)/2 + xi_x x + xi_y y` of `h_a` at `t`.
pub fn trap_potential(h_a: &QuadraticHamiltonian, t: f64) -> impl Fn(f64, f64) -> f64 {
    let wx = (h_a.omega_x_sq)(t);
    let wy = (h_a.omega_y_sq)(t);
    let xi_x = h_a.xi_x.as_ref().map_or(0.0, |f| f(t));
    let xi_y = h_a.xi_y.as_ref().map_or(0.0, |f| f(t));
    move |x, y| 0.5 * (wx * x * x + wy * y * y) + xi_x * x + xi_y * y
}

/// `exp(-i step W(t))` for the trap part `W` of `h_a` frozen at `t`.
pub fn apply_w(psi: &mut WaveFunction, h_a: &QuadraticHamiltonian, t: f64, step: Complex64) -> Result<()> {
    psi.require(Space::Xy, "coordinate space")?;
    let s = MINUS_I * step;
    psi.multiply_quadratic_exp(&QuadraticExponent {
        aa: s * (0.5 * (h_a.omega_x_sq)(t)),
        bb: s * (0.5 * (h_a.omega_y_sq)(t)),
        a: s * h_a.xi_x.as_ref().map_or(0.0, |f| f(t)),
        b: s * h_a.xi_y.as_ref().map_or(0.0, |f| f(t)),
        ..Default::default()
    });
    Ok(())
}

//! Time-dependent quadratic Hamiltonians and their Magnus averages over one
//! time step.

use alloc::sync::Arc;
use core::fmt;

use num_complex::Complex64;

use crate::algebra::{affine_bracket, bracket_in_basis, AffineHamiltonian, AveragedHamiltonian};
use crate::error::{Error, Result};

/// Scalar coefficient function of time.
pub type CoefficientFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `H_A(t) = (m_x p_x^2 + m_y p_y^2)/2 + (w_x(t) x^2 + w_y(t) y^2)/2 + Omega L_z
///           + xi_x(t) x + xi_y(t) y`
/// with `L_z = x p_y - y p_x`, evolved by `(i - lambda) psi_t = H_A psi`.
#[derive(Clone)]
pub struct QuadraticHamiltonian {
    pub omega_x_sq: CoefficientFn,
    pub omega_y_sq: CoefficientFn,
    pub rotation: f64,
    pub xi_x: Option<CoefficientFn>,
    pub xi_y: Option<CoefficientFn>,
    /// Inverse-mass coefficients of `p_x^2/2` and `p_y^2/2`; `None` means 1.
    pub mass_x: Option<CoefficientFn>,
    pub mass_y: Option<CoefficientFn>,
    pub lambda: f64,
}

impl fmt::Debug for QuadraticHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuadraticHamiltonian")
            .field("omega_x_sq(0)", &(self.omega_x_sq)(0.0))
            .field("omega_y_sq(0)", &(self.omega_y_sq)(0.0))
            .field("rotation", &self.rotation)
            .field("linear", &(self.xi_x.is_some() || self.xi_y.is_some()))
            .field("lambda", &self.lambda)
            .finish()
    }
}

impl QuadraticHamiltonian {
    pub fn new(omega_x_sq: CoefficientFn, omega_y_sq: CoefficientFn, rotation: f64) -> Self {
        QuadraticHamiltonian {
            omega_x_sq,
            omega_y_sq,
            rotation,
            xi_x: None,
            xi_y: None,
            mass_x: None,
            mass_y: None,
            lambda: 0.0,
        }
    }

    /// Constant trap frequencies.
    pub fn autonomous(omega_x_sq: f64, omega_y_sq: f64, rotation: f64) -> Self {
        Self::new(
            Arc::new(move |_| omega_x_sq),
            Arc::new(move |_| omega_y_sq),
            rotation,
        )
    }

    /// `w_x(t) = w0 (1 + sin(t/2))`, `w_y(t) = w0 - sin(t/2)`.
    pub fn modulated_trap(omega0_sq: f64, rotation: f64) -> Self {
        Self::new(
            Arc::new(move |t: f64| omega0_sq * (1.0 + (t / 2.0).sin())),
            Arc::new(move |t: f64| omega0_sq - (t / 2.0).sin()),
            rotation,
        )
    }

    pub fn with_linear(mut self, xi_x: Option<CoefficientFn>, xi_y: Option<CoefficientFn>) -> Self {
        self.xi_x = xi_x;
        self.xi_y = xi_y;
        self
    }

    pub fn with_masses(mut self, mass_x: CoefficientFn, mass_y: CoefficientFn) -> Self {
        self.mass_x = Some(mass_x);
        self.mass_y = Some(mass_y);
        self
    }

    pub fn with_dissipation(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn has_linear_terms(&self) -> bool {
        self.xi_x.is_some() || self.xi_y.is_some()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidArgument("dissipation lambda must be finite and >= 0"));
        }
        if !self.rotation.is_finite() {
            return Err(Error::NonFinite("rotation rate"));
        }
        Ok(())
    }

    pub fn mass_x_at(&self, t: f64) -> f64 {
        self.mass_x.as_ref().map_or(1.0, |m| m(t))
    }

    pub fn mass_y_at(&self, t: f64) -> f64 {
        self.mass_y.as_ref().map_or(1.0, |m| m(t))
    }

    /// The Hamiltonian frozen at time `t` (linear terms dropped).
    pub fn frozen(&self, t: f64) -> AveragedHamiltonian<f64> {
        AveragedHamiltonian {
            m_x: self.mass_x_at(t),
            m_y: self.mass_y_at(t),
            w_x: (self.omega_x_sq)(t),
            w_y: (self.omega_y_sq)(t),
            omega_x: self.rotation,
            omega_y: self.rotation,
            ..AveragedHamiltonian::zero()
        }
    }

    /// The Hamiltonian frozen at time `t` including linear terms.
    pub fn frozen_affine(&self, t: f64) -> AffineHamiltonian<f64> {
        AffineHamiltonian {
            quadratic: self.frozen(t),
            linear: [
                self.xi_x.as_ref().map_or(0.0, |f| f(t)),
                0.0,
                self.xi_y.as_ref().map_or(0.0, |f| f(t)),
                0.0,
            ],
            phase: 0.0,
        }
    }
}

/// Truncation order of the Magnus expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MagnusOrder {
    /// Midpoint rule.
    Two,
    /// Two-node Gauss-Legendre with one commutator.
    Four,
}

impl MagnusOrder {
    pub fn value(self) -> u32 {
        match self {
            MagnusOrder::Two => 2,
            MagnusOrder::Four => 4,
        }
    }

    pub fn from_value(p: u32) -> Option<Self> {
        match p {
            2 => Some(MagnusOrder::Two),
            4 => Some(MagnusOrder::Four),
            _ => None,
        }
    }
}

/// Gauss-Legendre nodes on [0, 1].
pub fn gauss_nodes() -> (f64, f64) {
    let d = 0.5 / 3.0f64.sqrt();
    (0.5 - d, 0.5 + d)
}

fn check_step(h: f64) -> Result<()> {
    if !h.is_finite() {
        return Err(Error::NonFinite("time step"));
    }
    if h == 0.0 {
        return Err(Error::InvalidArgument("time step must be nonzero"));
    }
    Ok(())
}

/// Splits the averaged Hamiltonian as `H~ = mean + step * correction`, where
/// `step` is the (possibly complex, effective) time step. Accepts backward
/// steps `h < 0`.
pub fn magnus_parts(
    h_a: &QuadraticHamiltonian,
    t: f64,
    h: f64,
    order: MagnusOrder,
) -> Result<(AveragedHamiltonian<f64>, AveragedHamiltonian<f64>)> {
    check_step(h)?;
    h_a.validate()?;
    match order {
        MagnusOrder::Two => {
            let mid = h_a.frozen(t + 0.5 * h);
            mid.validate()?;
            Ok((mid, AveragedHamiltonian::zero()))
        }
        MagnusOrder::Four => {
            let (c1, c2) = gauss_nodes();
            let h1 = h_a.frozen(t + c1 * h);
            let h2 = h_a.frozen(t + c2 * h);
            h1.validate()?;
            h2.validate()?;
            let mean = (h1 + h2).scale(0.5);
            let correction = bracket_in_basis(&h1, &h2)?.scale(-(3.0f64.sqrt()) / 12.0);
            Ok((mean, correction))
        }
    }
}

/// Affine counterpart of [`magnus_parts`].
pub fn magnus_parts_affine(
    h_a: &QuadraticHamiltonian,
    t: f64,
    h: f64,
    order: MagnusOrder,
) -> Result<(AffineHamiltonian<f64>, AffineHamiltonian<f64>)> {
    check_step(h)?;
    h_a.validate()?;
    match order {
        MagnusOrder::Two => {
            let mid = h_a.frozen_affine(t + 0.5 * h);
            mid.validate()?;
            Ok((mid, AffineHamiltonian::zero()))
        }
        MagnusOrder::Four => {
            let (c1, c2) = gauss_nodes();
            let h1 = h_a.frozen_affine(t + c1 * h);
            let h2 = h_a.frozen_affine(t + c2 * h);
            let mean = (h1 + h2).scale(0.5);
            let correction = affine_bracket(&h1, &h2)?.scale(-(3.0f64.sqrt()) / 12.0);
            Ok((mean, correction))
        }
    }
}

/// Averaged Hamiltonian `H~` over `[t, t + h]` with `Theta = -i h H~`.
///
/// Order 4 uses `Theta = -i h/2 (H1 + H2) - (sqrt(3) h^2 / 12) [-i H1, -i H2]`
/// at the Gauss nodes; order 2 is the midpoint value.
pub fn magnus_theta(
    h_a: &QuadraticHamiltonian,
    t: f64,
    h: f64,
    order: MagnusOrder,
) -> Result<AveragedHamiltonian<f64>> {
    if h <= 0.0 {
        return Err(Error::InvalidArgument("time step must be positive"));
    }
    magnus_theta_signed(h_a, t, h, order)
}

/// [`magnus_theta`] allowing backward intervals (`h < 0`).
pub fn magnus_theta_signed(
    h_a: &QuadraticHamiltonian,
    t: f64,
    h: f64,
    order: MagnusOrder,
) -> Result<AveragedHamiltonian<f64>> {
    let (mean, correction) = magnus_parts(h_a, t, h, order)?;
    Ok(mean + correction.scale(h))
}

/// Effective complex step `i h / (i - lambda)` of the damped equation
/// `(i - lambda) psi_t = H psi`.
pub fn dissipative_step_scale(h: f64, lambda: f64) -> Complex64 {
    let d = 1.0 + lambda * lambda;
    Complex64::new(h / d, -h * lambda / d)
}

//! Pointwise flows of the interaction and external potential.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Result, RotError};
use crate::wave::{Space, WaveFunction};

/// Potential `V(x, y, t)` added to the interaction.
pub type PotentialFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// `g |psi|^2 + V(x, y, t)` with damping `lambda >= 0`.
#[derive(Clone, Default)]
pub struct NonlinearTerm {
    pub g: f64,
    pub potential: Option<PotentialFn>,
    pub lambda: f64,
}

impl fmt::Debug for NonlinearTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearTerm")
            .field("g", &self.g)
            .field("potential", &self.potential.as_ref().map(|_| "<fn>"))
            .field("lambda", &self.lambda)
            .finish()
    }
}

impl NonlinearTerm {
    pub fn cubic(g: f64) -> Self {
        NonlinearTerm { g, potential: None, lambda: 0.0 }
    }

    pub fn with_potential(mut self, v: PotentialFn) -> Self {
        self.potential = Some(v);
        self
    }

    pub fn with_damping(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn is_dissipative(&self) -> bool {
        self.lambda != 0.0
    }

    pub fn is_trivial(&self) -> bool {
        self.g == 0.0 && self.potential.is_none()
    }

    fn validate(&self) -> Result<()> {
        if !self.g.is_finite() || !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(RotError::Invalid(format!(
                "nonlinear term needs finite g and lambda >= 0 (g = {}, lambda = {})",
                self.g, self.lambda
            )));
        }
        Ok(())
    }
}

/// `(e^z - 1)/z`, accurate near zero.
pub fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0
    } else {
        z.exp_m1() / z
    }
}

/// Exact flow over `h` of `i psi_t = (g |psi|^2 + V(t) + extra) psi` for
/// `lambda = 0`, or of the damped equation `(i - lambda) psi_t = i (...) psi`
/// otherwise. `V` is frozen at `t`; `extra(x, y)` is any further real
/// potential, e.g. the trap in the standard split.
pub fn nonlinear_flow_with(
    psi: &mut WaveFunction,
    term: &NonlinearTerm,
    t: f64,
    h: f64,
    extra: impl Fn(f64, f64) -> f64,
) -> Result<()> {
    psi.require(Space::Xy, "coordinate space")?;
    term.validate()?;
    let grid = psi.grid.clone();
    let ny = grid.spec.ny;
    let lambda = term.lambda;
    let scale = 1.0 + lambda * lambda;
    let a = 2.0 * lambda * h / scale;
    let rate = -Complex64::new(lambda, 1.0) / (2.0 * lambda);
    for (i, v) in psi.values.iter_mut().enumerate() {
        let (x, y) = (grid.x[i / ny], grid.y[i % ny]);
        let pot = term.potential.as_ref().map_or(0.0, |f| f(x, y, t)) + extra(x, y);
        let rho = v.norm_sqr();
        if lambda == 0.0 {
            *v *= Complex64::from_polar(1.0, -h * (pot + term.g * rho));
            continue;
        }
        // |psi|^2 solves a Bernoulli equation; log is ln(rho0 / rho(h))
        let z = a * pot;
        let log = z + (a * phi1(z) * term.g * rho * (-z).exp()).ln_1p();
        if !log.is_finite() {
            return Err(RotError::Invalid(format!("damped nonlinear flow blew up at h = {h}")));
        }
        *v *= (rate * log).exp();
    }
    Ok(())
}

/// Unitary flow of `g |psi|^2 + V` alone; `lambda` must be zero.
pub fn nonlinear_flow(psi: &mut WaveFunction, term: &NonlinearTerm, t: f64, h: f64) -> Result<()> {
    if term.is_dissipative() {
        return Err(RotError::Invalid("damped term needs dissipative_nonlinear_flow".into()));
    }
    if term.is_trivial() {
        return psi.require(Space::Xy, "coordinate space");
    }
    nonlinear_flow_with(psi, term, t, h, |_, _| 0.0)
}

/// Closed-form damped flow of `g |psi|^2 + V`; `lambda` must be positive.
pub fn dissipative_nonlinear_flow(psi: &mut WaveFunction, term: &NonlinearTerm, t: f64, h: f64) -> Result<()> {
    if !term.is_dissipative() {
        return Err(RotError::Invalid("undamped term needs nonlinear_flow".into()));
    }
    nonlinear_flow_with(psi, term, t, h, |_, _| 0.0)
}

/// Dispatches on `lambda`.
pub fn b_flow(psi: &mut WaveFunction, term: &NonlinearTerm, t: f64, h: f64) -> Result<()> {
    if term.is_dissipative() {
        dissipative_nonlinear_flow(psi, term, t, h)
    } else {
        nonlinear_flow(psi, term, t, h)
    }
}

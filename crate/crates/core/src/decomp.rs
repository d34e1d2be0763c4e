//! Coefficients of the four-factor Fourier-diagonalizable decomposition
//!
//! ```text
//! exp(-i f0 x^2/2) exp(-i (f1 y^2/2 + g1 p_x^2/2 - e1 y p_x))
//!   exp(-i (f2 x^2/2 + g2 p_y^2/2 + e2 x p_y)) exp(-i (f3 y^2/2 + g3 p_x^2/2 - e3 y p_x))
//! ```
//!
//! and of its affine extension. Coefficients are stored in the classical
//! convention: each factor is the time-one flow of the classical Hamiltonian in
//! its exponent, which makes the factor matrix `1 + N` with `N` nilpotent. The
//! operator exponents with the `1/2` factors removed are `-i f/2, -i g/2, -i e`
//! (see [`DecompCoefficients::operator_exponents`]).
//!
//! The classical matrix of the whole product is `N0 N1 N2 N3`: the rightmost
//! operator acts first on the wave function and its classical flow is applied
//! first to the phase-space point.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::algebra::{exp_and_phi1, matrix_exp, matrix_log, AveragedHamiltonian, Matrix4};
use crate::error::{Error, Result};
use crate::lsq::{solve_damped, solve_min_norm, Dense};
use crate::magnus::{
    dissipative_step_scale, magnus_parts, magnus_parts_affine, MagnusOrder, QuadraticHamiltonian,
};
use crate::scalar::Scalar;

/// Default absolute Frobenius tolerance on the matched product.
pub const DEFAULT_TOL: f64 = 1e-12;
const POLISH_STEPS: usize = 3;
/// Gauss-Newton iteration cap (accepted and rejected trial steps together).
pub const MAX_ITERATIONS: usize = 50;

/// Decomposition coefficients for one step `[t, t + h]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompCoefficients<T = f64> {
    pub f0: T,
    pub f1: T,
    pub g1: T,
    pub e1: T,
    pub f2: T,
    pub g2: T,
    pub e2: T,
    pub f3: T,
    pub g3: T,
    pub e3: T,
    pub t: f64,
    pub h: f64,
    /// `||factor_product - target||_F` when produced by a solver.
    pub residual: f64,
}

impl<T: Scalar> DecompCoefficients<T> {
    pub fn zero() -> Self {
        Self::from_array([T::zero(); 10], 0.0, 0.0)
    }

    /// Order: `f0, f1, g1, e1, f2, g2, e2, f3, g3, e3`.
    pub fn to_array(&self) -> [T; 10] {
        [
            self.f0, self.f1, self.g1, self.e1, self.f2, self.g2, self.e2, self.f3, self.g3,
            self.e3,
        ]
    }

    pub fn from_array(a: [T; 10], t: f64, h: f64) -> Self {
        DecompCoefficients {
            f0: a[0],
            f1: a[1],
            g1: a[2],
            e1: a[3],
            f2: a[4],
            g2: a[5],
            e2: a[6],
            f3: a[7],
            g3: a[8],
            e3: a[9],
            t,
            h,
            residual: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn norm(&self) -> f64 {
        self.to_array()
            .iter()
            .map(|v| v.modulus_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> DecompCoefficients<U> {
        let mut out = DecompCoefficients::from_array(self.to_array().map(f), self.t, self.h);
        out.residual = self.residual;
        out
    }
}

impl<T: Scalar> DecompCoefficients<T>
where
    T: Into<Complex64>,
{
    /// Operator exponents without the `1/2` factors, ordered as
    /// [`to_array`](Self::to_array): `exp(F0 x^2) exp(F1 y^2 + G1 p_x^2 - E1 y p_x) ...`
    /// with `F = -i f / 2`, `G = -i g / 2`, `E = -i e`.
    pub fn operator_exponents(&self) -> [Complex64; 10] {
        let mi = Complex64::new(0.0, -1.0);
        let a = self.to_array();
        core::array::from_fn(|k| {
            let v: Complex64 = a[k].into();
            let halved = matches!(k, 0 | 1 | 2 | 4 | 5 | 7 | 8);
            if halved {
                mi * v * 0.5
            } else {
                mi * v
            }
        })
    }
}

impl DecompCoefficients<f64> {
    pub fn to_complex(&self) -> DecompCoefficients<Complex64> {
        self.map(Complex64::from)
    }
}

/// `exp(-i f x^2/2)`: `p_x -= f x`.
pub fn outer_factor<T: Scalar>(f: T) -> Matrix4<T> {
    let mut m = Matrix4::identity();
    m[(2, 0)] = -f;
    m
}

/// `exp(-i (f y^2/2 + g p_x^2/2 - e y p_x))`: `x += g p_x - e y`, `p_y -= f y - e p_x`.
pub fn x_shear_factor<T: Scalar>(f: T, g: T, e: T) -> Matrix4<T> {
    let mut m = Matrix4::identity();
    m[(0, 1)] = -e;
    m[(0, 2)] = g;
    m[(3, 1)] = -f;
    m[(3, 2)] = e;
    m
}

/// `exp(-i (f x^2/2 + g p_y^2/2 + e x p_y))`: `y += g p_y + e x`, `p_x -= f x + e p_y`.
pub fn y_shear_factor<T: Scalar>(f: T, g: T, e: T) -> Matrix4<T> {
    let mut m = Matrix4::identity();
    m[(1, 0)] = e;
    m[(1, 3)] = g;
    m[(2, 0)] = -f;
    m[(2, 3)] = -e;
    m
}

/// The four unipotent factor matrices, leftmost operator first.
pub fn factor_matrices<T: Scalar>(c: &DecompCoefficients<T>) -> [Matrix4<T>; 4] {
    [
        outer_factor(c.f0),
        x_shear_factor(c.f1, c.g1, c.e1),
        y_shear_factor(c.f2, c.g2, c.e2),
        x_shear_factor(c.f3, c.g3, c.e3),
    ]
}

/// Classical matrix `N0 N1 N2 N3` of the decomposition.
pub fn factor_product<T: Scalar>(c: &DecompCoefficients<T>) -> Matrix4<T> {
    let [n0, n1, n2, n3] = factor_matrices(c);
    n0 * n1 * n2 * n3
}

/// Derivative of the factor owning parameter `k` with respect to it.
fn factor_derivative<T: Scalar>(k: usize) -> (usize, Matrix4<T>) {
    let one = T::one();
    let mut d = Matrix4::zeros();
    let factor = match k {
        0 => {
            d[(2, 0)] = -one;
            0
        }
        1 | 7 => {
            d[(3, 1)] = -one;
            if k == 1 { 1 } else { 3 }
        }
        2 | 8 => {
            d[(0, 2)] = one;
            if k == 2 { 1 } else { 3 }
        }
        3 | 9 => {
            d[(0, 1)] = -one;
            d[(3, 2)] = one;
            if k == 3 { 1 } else { 3 }
        }
        4 => {
            d[(2, 0)] = -one;
            2
        }
        5 => {
            d[(1, 3)] = one;
            2
        }
        6 => {
            d[(1, 0)] = one;
            d[(2, 3)] = -one;
            2
        }
        _ => unreachable!("ten decomposition parameters"),
    };
    (factor, d)
}

/// Jacobian of the 16 entries of [`factor_product`] (row-major) with respect
/// to the parameters in [`DecompCoefficients::to_array`] order.
pub fn factor_jacobian<T: Scalar>(c: &DecompCoefficients<T>) -> Dense<T> {
    let n = factor_matrices(c);
    let id = Matrix4::identity();
    let left = [id, n[0], n[0] * n[1], n[0] * n[1] * n[2]];
    let right = [n[1] * n[2] * n[3], n[2] * n[3], n[3], id];
    let mut jac = Dense::zeros(16, 10);
    for k in 0..10 {
        let (f, d) = factor_derivative::<T>(k);
        let col = left[f] * d * right[f];
        for i in 0..4 {
            for j in 0..4 {
                jac.set(4 * i + j, k, col[(i, j)]);
            }
        }
    }
    jac
}

/// Strang-splitting coefficients for the averaged Hamiltonian `avg` advanced
/// by the (possibly complex) step `step`:
/// `f1 = f3 = step w_y/2`, `g1 = g3 = step m_x/2`, `e1 = e3 = step Omega_y/2`,
/// `f2 = step w_x`, `g2 = step m_y`, `e2 = step Omega_x`, `f0 = 0`.
pub fn strang_seed_for<T: Scalar>(avg: &AveragedHamiltonian<T>, step: T) -> [T; 10] {
    let half = T::from_real(0.5);
    let f1 = step * avg.w_y * half;
    let g1 = step * avg.m_x * half;
    let e1 = step * avg.omega_y * half;
    [
        T::zero(),
        f1,
        g1,
        e1,
        step * avg.w_x,
        step * avg.m_y,
        step * avg.omega_x,
        f1,
        g1,
        e1,
    ]
}

/// Second-order Strang coefficients with the trap frozen at the midpoint.
pub fn strang_seed(h_a: &QuadraticHamiltonian, t: f64, h: f64) -> DecompCoefficients<f64> {
    let avg = h_a.frozen(t + 0.5 * h);
    DecompCoefficients::from_array(strang_seed_for(&avg, h), t, h)
}

fn residual_vec<T: Scalar>(c: &DecompCoefficients<T>, target: &Matrix4<T>) -> ([T; 16], f64) {
    let p = factor_product(c);
    let mut r = [T::zero(); 16];
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let v = p[(i, j)] - target[(i, j)];
            r[4 * i + j] = v;
            s += v.modulus_sqr();
        }
    }
    (r, s.sqrt())
}

/// Damped Gauss-Newton (Levenberg-Marquardt) on the sixteen entries of
/// `factor_product(c) - target` over the ten coefficients.
fn gauss_newton<T: Scalar>(
    target: &Matrix4<T>,
    seed: &DecompCoefficients<T>,
    tol: f64,
) -> Result<DecompCoefficients<T>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive"));
    }
    if !target.is_finite() {
        return Err(Error::NonFinite("target matrix"));
    }
    if !seed.is_finite() {
        return Err(Error::NonFinite("seed coefficients"));
    }
    let mut c = *seed;
    let (mut r, mut norm) = residual_vec(&c, target);
    let mut mu = 1e-10;
    let mut nu = 2.0;
    let mut iterations = 0;
    while norm > tol {
        if iterations == MAX_ITERATIONS {
            return Err(Error::NotConverged {
                residual: norm,
                iterations,
            });
        }
        iterations += 1;
        let jac = factor_jacobian(&c);
        let rhs: Vec<T> = r.iter().map(|v| -*v).collect();
        let delta = match solve_damped(&jac, &rhs, mu) {
            Ok(d) => d,
            Err(Error::Singular) => {
                mu = (mu * nu).max(1e-12);
                nu *= 2.0;
                continue;
            }
            Err(e) => return Err(e),
        };
        let arr = c.to_array();
        let trial_arr: [T; 10] = core::array::from_fn(|k| arr[k] + delta[k]);
        let mut trial = DecompCoefficients::from_array(trial_arr, c.t, c.h);
        let (r_new, norm_new) = residual_vec(&trial, target);
        // gain ratio against the linear model
        let mut predicted = 0.0;
        for i in 0..16 {
            let mut lin = r[i];
            for (k, dk) in delta.iter().enumerate() {
                lin += jac.get(i, k) * *dk;
            }
            predicted += lin.modulus_sqr();
        }
        let gain = (norm * norm - norm_new * norm_new) / (norm * norm - predicted).max(f64::MIN_POSITIVE);
        if trial.is_finite() && norm_new < norm {
            trial.residual = norm_new;
            c = trial;
            r = r_new;
            norm = norm_new;
            let q = 2.0 * gain - 1.0;
            mu = (mu * (1.0f64 / 3.0).max(1.0 - q * q * q)).max(1e-30);
            nu = 2.0;
        } else {
            mu *= nu;
            nu *= 2.0;
        }
    }
    polish(&mut c, &mut r, &mut norm, target);
    c.residual = norm;
    Ok(c)
}

/// A few plain Gauss-Newton steps past the tolerance, kept only while they
/// reduce the residual; brings it down to roundoff.
fn polish<T: Scalar>(c: &mut DecompCoefficients<T>, r: &mut [T; 16], norm: &mut f64, target: &Matrix4<T>) {
    for _ in 0..POLISH_STEPS {
        if *norm == 0.0 {
            return;
        }
        let jac = factor_jacobian(c);
        let rhs: Vec<T> = r.iter().map(|v| -*v).collect();
        let Ok(delta) = solve_damped(&jac, &rhs, 0.0) else {
            return;
        };
        let arr = c.to_array();
        let trial = DecompCoefficients::from_array(core::array::from_fn(|k| arr[k] + delta[k]), c.t, c.h);
        let (r_new, norm_new) = residual_vec(&trial, target);
        if !trial.is_finite() || !(norm_new < *norm) {
            return;
        }
        *c = trial;
        *r = r_new;
        *norm = norm_new;
    }
}

/// Matches `factor_product(c)` to `target` within `tol` (Frobenius). Starts
/// from `seed`, falls back to the zero seed and then to a continuation along
/// `exp(s log target)`, `s = 1/32, 2/32, ..., 1`.
pub fn solve_coefficients<T: Scalar>(
    target: &Matrix4<T>,
    seed: &DecompCoefficients<T>,
    tol: f64,
) -> Result<DecompCoefficients<T>> {
    let first = match gauss_newton(target, seed, tol) {
        Ok(c) => return Ok(c),
        Err(e @ Error::NotConverged { .. }) => e,
        Err(e) => return Err(e),
    };
    let zero = DecompCoefficients {
        t: seed.t,
        h: seed.h,
        ..DecompCoefficients::zero()
    };
    if let Ok(c) = gauss_newton(target, &zero, tol) {
        return Ok(c);
    }
    continuation(target, zero, tol).map_err(|_| first)
}

fn continuation<T: Scalar>(
    target: &Matrix4<T>,
    zero: DecompCoefficients<T>,
    tol: f64,
) -> Result<DecompCoefficients<T>> {
    const STAGES: usize = 32;
    let log = matrix_log(target)?;
    let avg = AveragedHamiltonian::from_classical_matrix(&log, 1e-8)?;
    let mut c = zero;
    for k in 1..=STAGES {
        let s = T::from_real(k as f64 / STAGES as f64);
        let stage_target = matrix_exp(&log, s)?;
        if k == 1 {
            c = DecompCoefficients::from_array(strang_seed_for(&avg, s), zero.t, zero.h);
        }
        let stage_tol = if k == STAGES { tol } else { tol.max(1e-10) };
        c = gauss_newton(&stage_target, &c, stage_tol)?;
    }
    Ok(c)
}

/// Target matrix, averaged Hamiltonian and step of the non-dissipative pipeline.
pub fn step_target_real(
    h_a: &QuadraticHamiltonian,
    t: f64,
    h: f64,
    order: MagnusOrder,
) -> Result<(AveragedHamiltonian<f64>, Matrix4<f64>)> {
    let (mean, corr) = magnus_parts(h_a, t, h, order)?;
    let avg = mean + corr.scale(h);
    let target = matrix_exp(&avg.classical_matrix(), h)?;
    Ok((avg, target))
}

/// Target with the effective step `i h / (i - lambda)`.
pub fn step_target(
    h_a: &QuadraticHamiltonian,
    t: f64,
    h: f64,
    order: MagnusOrder,
) -> Result<(AveragedHamiltonian<Complex64>, Complex64, Matrix4<Complex64>)> {
    let step = dissipative_step_scale(h, h_a.lambda);
    let (mean, corr) = magnus_parts(h_a, t, h, order)?;
    let avg = mean.to_complex() + corr.to_complex().scale(step);
    let target = matrix_exp(&avg.classical_matrix(), step)?;
    Ok((avg, step, target))
}

/// Magnus average, exponentiation and coefficient solve for one step of a
/// non-dissipative Hamiltonian. Backward steps (`h < 0`) are allowed.
pub fn decompose_step_real(
    h_a: &QuadraticHamiltonian,
    t: f64,
    h: f64,
    order: MagnusOrder,
    tol: f64,
) -> Result<DecompCoefficients<f64>> {
    if h_a.lambda != 0.0 {
        return Err(Error::InvalidArgument("dissipative Hamiltonian needs complex coefficients"));
    }
    let (avg, target) = step_target_real(h_a, t, h, order)?;
    let seed = DecompCoefficients::from_array(strang_seed_for(&avg, h), t, h);
    solve_coefficients(&target, &seed, tol)
}

/// Full coefficient pipeline for one step; coefficients are complex when the
/// Hamiltonian is dissipative and have zero imaginary parts otherwise.
pub fn decompose_step(
    h_a: &QuadraticHamiltonian,
    t: f64,
    h: f64,
    order: MagnusOrder,
) -> Result<DecompCoefficients<Complex64>> {
    decompose_step_with_tol(h_a, t, h, order, DEFAULT_TOL)
}

pub fn decompose_step_with_tol(
    h_a: &QuadraticHamiltonian,
    t: f64,
    h: f64,
    order: MagnusOrder,
    tol: f64,
) -> Result<DecompCoefficients<Complex64>> {
    if h_a.lambda == 0.0 {
        return decompose_step_real(h_a, t, h, order, tol).map(|c| c.to_complex());
    }
    let (avg, step, target) = step_target(h_a, t, h, order)?;
    let seed = DecompCoefficients::from_array(strang_seed_for(&avg, step), t, h);
    solve_coefficients(&target, &seed, tol)
}

/// Affine map `u -> matrix u + shift` on `(x, y, p_x, p_y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorFlow<T = f64> {
    pub matrix: Matrix4<T>,
    pub shift: [T; 4],
}

impl<T: Scalar> FactorFlow<T> {
    pub fn identity() -> Self {
        FactorFlow {
            matrix: Matrix4::identity(),
            shift: [T::zero(); 4],
        }
    }

    pub fn apply(&self, u: &[T; 4]) -> [T; 4] {
        let mu = self.matrix.apply(u);
        core::array::from_fn(|i| mu[i] + self.shift[i])
    }

    /// `next` after `self`.
    pub fn then(&self, next: &FactorFlow<T>) -> FactorFlow<T> {
        let s = next.matrix.apply(&self.shift);
        FactorFlow {
            matrix: next.matrix * self.matrix,
            shift: core::array::from_fn(|i| s[i] + next.shift[i]),
        }
    }

    /// Flow of `exp(-i (n x^2 + m x))`: `p_x -= 2 n x + m`.
    pub fn outer(n: T, m: T) -> Self {
        let two = T::from_real(2.0);
        FactorFlow {
            matrix: outer_factor(two * n),
            shift: [T::zero(), T::zero(), -m, T::zero()],
        }
    }

    /// Flow of `exp(-i (f y^2 + g p_x^2 - e y p_x + k p_x))`:
    /// `x += 2 g p_x - e y + k`, `p_y -= 2 f y - e p_x`.
    pub fn x_shear(f: T, g: T, e: T, k: T) -> Self {
        let two = T::from_real(2.0);
        FactorFlow {
            matrix: x_shear_factor(two * f, two * g, e),
            shift: [k, T::zero(), T::zero(), T::zero()],
        }
    }

    /// Flow of `exp(-i (f x^2 + g p_y^2 + e x p_y + k p_y))`:
    /// `y += 2 g p_y + e x + k`, `p_x -= 2 f x + e p_y`.
    pub fn y_shear(f: T, g: T, e: T, k: T) -> Self {
        let two = T::from_real(2.0);
        FactorFlow {
            matrix: y_shear_factor(two * f, two * g, e),
            shift: [T::zero(), k, T::zero(), T::zero()],
        }
    }
}

/// Coefficients of the five-factor affine decomposition
///
/// ```text
/// exp(n1 x^2 + m1 x) exp(f1 y^2 + g1 p_x^2 - e1 y p_x + k1 p_x)
///   exp(f2 x^2 + g2 p_y^2 + e2 x p_y + k2 p_y)
///   exp(f3 y^2 + g3 p_x^2 - e3 y p_x + k3 p_x) exp(n2 x^2 + m2 x)
/// ```
///
/// with every exponent multiplied by `-i`. Unlike [`DecompCoefficients`] the
/// quadratic exponents carry no `1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineDecompCoefficients<T = f64> {
    pub n1: T,
    pub m1: T,
    pub f1: T,
    pub g1: T,
    pub e1: T,
    pub k1: T,
    pub f2: T,
    pub g2: T,
    pub e2: T,
    pub k2: T,
    pub f3: T,
    pub g3: T,
    pub e3: T,
    pub k3: T,
    pub n2: T,
    pub m2: T,
    pub t: f64,
    pub h: f64,
    pub residual: f64,
}

impl<T: Scalar> AffineDecompCoefficients<T> {
    pub fn zero() -> Self {
        let z = T::zero();
        AffineDecompCoefficients {
            n1: z,
            m1: z,
            f1: z,
            g1: z,
            e1: z,
            k1: z,
            f2: z,
            g2: z,
            e2: z,
            k2: z,
            f3: z,
            g3: z,
            e3: z,
            k3: z,
            n2: z,
            m2: z,
            t: 0.0,
            h: 0.0,
            residual: 0.0,
        }
    }

    /// Quadratic part in the classical ([`DecompCoefficients`]) convention,
    /// ignoring `n2`.
    pub fn quadratic_part(&self) -> DecompCoefficients<T> {
        let two = T::from_real(2.0);
        let mut c = DecompCoefficients::from_array(
            [
                two * self.n1,
                two * self.f1,
                two * self.g1,
                self.e1,
                two * self.f2,
                two * self.g2,
                self.e2,
                two * self.f3,
                two * self.g3,
                self.e3,
            ],
            self.t,
            self.h,
        );
        c.residual = self.residual;
        c
    }

    fn with_quadratic(mut self, c: &DecompCoefficients<T>) -> Self {
        let half = T::from_real(0.5);
        self.n1 = c.f0 * half;
        self.f1 = c.f1 * half;
        self.g1 = c.g1 * half;
        self.e1 = c.e1;
        self.f2 = c.f2 * half;
        self.g2 = c.g2 * half;
        self.e2 = c.e2;
        self.f3 = c.f3 * half;
        self.g3 = c.g3 * half;
        self.e3 = c.e3;
        self
    }

    /// Linear exponents `m1, k1, k2, k3, m2`.
    pub fn linear(&self) -> [T; 5] {
        [self.m1, self.k1, self.k2, self.k3, self.m2]
    }

    fn with_linear(mut self, z: &[T]) -> Self {
        self.m1 = z[0];
        self.k1 = z[1];
        self.k2 = z[2];
        self.k3 = z[3];
        self.m2 = z[4];
        self
    }

    /// The five flows in application order (rightmost exponential first).
    pub fn flows(&self) -> [FactorFlow<T>; 5] {
        [
            FactorFlow::outer(self.n2, self.m2),
            FactorFlow::x_shear(self.f3, self.g3, self.e3, self.k3),
            FactorFlow::y_shear(self.f2, self.g2, self.e2, self.k2),
            FactorFlow::x_shear(self.f1, self.g1, self.e1, self.k1),
            FactorFlow::outer(self.n1, self.m1),
        ]
    }

    /// Composition of [`flows`](Self::flows).
    pub fn composed_flow(&self) -> FactorFlow<T> {
        self.flows()
            .iter()
            .fold(FactorFlow::identity(), |acc, f| acc.then(f))
    }

    pub fn is_finite(&self) -> bool {
        self.linear().iter().all(|v| v.is_finite())
            && self.quadratic_part().is_finite()
            && self.n2.is_finite()
    }
}

/// Affine solve: homogeneous part against `target_linear`, then the linear
/// exponents (minimum norm) against `target_shift`. `seed.n2` is held fixed.
pub fn solve_affine_coefficients<T: Scalar>(
    target_linear: &Matrix4<T>,
    target_shift: &[T; 4],
    seed: &AffineDecompCoefficients<T>,
    tol: f64,
) -> Result<AffineDecompCoefficients<T>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive"));
    }
    if !target_shift.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("target shift"));
    }
    if !seed.is_finite() {
        return Err(Error::NonFinite("seed coefficients"));
    }
    let two = T::from_real(2.0);
    // product = Q * N(n2) with N(n2) applied first
    let q = *target_linear * outer_factor(-(two * seed.n2));
    let quad = solve_coefficients(&q, &seed.quadratic_part(), tol)?;
    let base = seed.with_quadratic(&quad).with_linear(&[T::zero(); 5]);
    let unit_shift = |j: usize| {
        let mut z = [T::zero(); 5];
        z[j] = T::one();
        base.with_linear(&z).composed_flow().shift
    };
    let mut a = Dense::zeros(4, 5);
    for j in 0..5 {
        let s = unit_shift(j);
        for i in 0..4 {
            a.set(i, j, s[i]);
        }
    }
    let all_zero = target_shift.iter().all(|v| *v == T::zero());
    let z = if all_zero {
        vec![T::zero(); 5]
    } else {
        solve_min_norm(&a, target_shift)?
    };
    let mut out = base.with_linear(&z);
    let flow = out.composed_flow();
    let lin = (flow.matrix - *target_linear).frobenius_norm();
    let sh: f64 = flow
        .shift
        .iter()
        .zip(target_shift)
        .map(|(a, b)| (*a - *b).modulus_sqr())
        .sum::<f64>()
        .sqrt();
    let residual = (lin * lin + sh * sh).sqrt();
    if !(residual <= tol) {
        return Err(Error::NotConverged {
            residual,
            iterations: MAX_ITERATIONS,
        });
    }
    out.residual = residual;
    Ok(out)
}

/// Targets of the affine step: `exp(s M)` and `s phi1(s M) v`.
pub fn affine_step_target(
    h_a: &QuadraticHamiltonian,
    t: f64,
    h: f64,
    order: MagnusOrder,
) -> Result<(Matrix4<Complex64>, [Complex64; 4], AveragedHamiltonian<Complex64>, Complex64)> {
    let step = dissipative_step_scale(h, h_a.lambda);
    let (mean, corr) = magnus_parts_affine(h_a, t, h, order)?;
    let avg = mean.map(Complex64::from) + corr.map(Complex64::from).scale(step);
    let a = avg.quadratic.classical_matrix().scale(step);
    let (exp, phi) = exp_and_phi1(&a)?;
    let v = avg.classical_shift();
    let pv = phi.apply(&v);
    let shift = pv.map(|x| x * step);
    Ok((exp, shift, avg.quadratic, step))
}

/// Pipeline for Hamiltonians with linear terms.
pub fn decompose_affine_step(
    h_a: &QuadraticHamiltonian,
    t: f64,
    h: f64,
    order: MagnusOrder,
    tol: f64,
) -> Result<AffineDecompCoefficients<Complex64>> {
    let (target, shift, avg, step) = affine_step_target(h_a, t, h, order)?;
    let mut seed = AffineDecompCoefficients::zero();
    seed.t = t;
    seed.h = h;
    let strang = DecompCoefficients::from_array(strang_seed_for(&avg, step), t, h);
    let seed = seed.with_quadratic(&strang);
    solve_affine_coefficients(&target, &shift, &seed, tol)
}

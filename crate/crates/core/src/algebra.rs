//! Lie algebra of quadratic (and affine) Hamiltonians in two dimensions and
//! its faithful classical 4x4 matrix representation.
//!
//! A quadratic Hamiltonian `H(x, y, p_x, p_y)` generates the linear classical
//! flow `u' = M u` on `u = (x, y, p_x, p_y)`. The map `H -> M` is injective and
//! carries the Poisson bracket to the matrix commutator,
//! `M({a, b}) = [M(a), M(b)]`, so every computation in the algebra can be done
//! with 4x4 matrices. Symmetrized quantum products such as `(x p_x + p_x x)/2`
//! are represented by their classical monomial `x p_x`.

use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Basis of the ten-dimensional algebra spanned by the components of the
/// rotating, time-dependent trap Hamiltonian and their commutators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisElement10 {
    X2,
    Px2,
    Y2,
    Py2,
    XPy,
    YPx,
    XY,
    PxPy,
    /// `x p_x + p_x x`
    XPxSym,
    /// `y p_y + p_y y`
    YPySym,
}

impl BasisElement10 {
    pub const ALL: [BasisElement10; 10] = [
        BasisElement10::X2,
        BasisElement10::Px2,
        BasisElement10::Y2,
        BasisElement10::Py2,
        BasisElement10::XPy,
        BasisElement10::YPx,
        BasisElement10::XY,
        BasisElement10::PxPy,
        BasisElement10::XPxSym,
        BasisElement10::YPySym,
    ];

    /// The classical polynomial of this element as `(coefficient, [deg x, deg y, deg p_x, deg p_y])`.
    /// `x p_x + p_x x` is represented classically by `2 x p_x`.
    pub fn monomial(self) -> (f64, [u8; 4]) {
        match self {
            BasisElement10::X2 => (1.0, [2, 0, 0, 0]),
            BasisElement10::Px2 => (1.0, [0, 0, 2, 0]),
            BasisElement10::Y2 => (1.0, [0, 2, 0, 0]),
            BasisElement10::Py2 => (1.0, [0, 0, 0, 2]),
            BasisElement10::XPy => (1.0, [1, 0, 0, 1]),
            BasisElement10::YPx => (1.0, [0, 1, 1, 0]),
            BasisElement10::XY => (1.0, [1, 1, 0, 0]),
            BasisElement10::PxPy => (1.0, [0, 0, 1, 1]),
            BasisElement10::XPxSym => (2.0, [1, 0, 1, 0]),
            BasisElement10::YPySym => (2.0, [0, 1, 0, 1]),
        }
    }
}

/// The fifteen-element basis `E1..E15` of general affine-quadratic
/// Hamiltonians (linear terms and the identity included).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisElement15 {
    /// `x`
    E1,
    /// `p_x`
    E2,
    /// `x^2 / 2`
    E3,
    /// `p_x^2 / 2`
    E4,
    /// `(x p_x + p_x x) / 2`
    E5,
    /// `y`
    E6,
    /// `p_y`
    E7,
    /// `y^2 / 2`
    E8,
    /// `p_y^2 / 2`
    E9,
    /// `(y p_y + p_y y) / 2`
    E10,
    /// `x y`
    E11,
    /// `p_x p_y`
    E12,
    /// `x p_y`
    E13,
    /// `y p_x`
    E14,
    /// identity (global phase)
    E15,
}

impl BasisElement15 {
    pub const ALL: [BasisElement15; 15] = [
        BasisElement15::E1,
        BasisElement15::E2,
        BasisElement15::E3,
        BasisElement15::E4,
        BasisElement15::E5,
        BasisElement15::E6,
        BasisElement15::E7,
        BasisElement15::E8,
        BasisElement15::E9,
        BasisElement15::E10,
        BasisElement15::E11,
        BasisElement15::E12,
        BasisElement15::E13,
        BasisElement15::E14,
        BasisElement15::E15,
    ];

    /// Zero-based position, `E1 -> 0`.
    pub fn index(self) -> usize {
        self as usize
    }
}

/// Dense 4x4 matrix acting on the classical state `(x, y, p_x, p_y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix4<T> {
    pub entries: [[T; 4]; 4],
}

impl<T: Scalar> Matrix4<T> {
    pub fn zeros() -> Self {
        Matrix4 {
            entries: [[T::zero(); 4]; 4],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.entries[i][i] = T::one();
        }
        m
    }

    pub fn from_rows(entries: [[T; 4]; 4]) -> Self {
        Matrix4 { entries }
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = *self;
        for row in out.entries.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                out.entries[i][j] = self.entries[j][i];
            }
        }
        out
    }

    pub fn trace(&self) -> T {
        (0..4).fold(T::zero(), |acc, i| acc + self.entries[i][i])
    }

    pub fn frobenius_norm(&self) -> f64 {
        let s: f64 = self
            .entries
            .iter()
            .flat_map(|r| r.iter())
            .map(|v| v.modulus_sqr())
            .sum();
        num_traits::Float::sqrt(s)
    }

    /// `self * other - other * self`
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn apply(&self, v: &[T; 4]) -> [T; 4] {
        let mut out = [T::zero(); 4];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                *o += self.entries[i][j] * *vj;
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().flat_map(|r| r.iter()).all(|v| v.is_finite())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Matrix4<U> {
        let mut out = Matrix4::<U>::zeros();
        for i in 0..4 {
            for j in 0..4 {
                out.entries[i][j] = f(self.entries[i][j]);
            }
        }
        out
    }
}

impl Matrix4<f64> {
    pub fn to_complex(&self) -> Matrix4<Complex64> {
        self.map(Complex64::from)
    }
}

impl<T> Index<(usize, usize)> for Matrix4<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.entries[i][j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix4<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.entries[i][j]
    }
}

impl<T: Scalar> Mul for Matrix4<T> {
    type Output = Matrix4<T>;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Matrix4::zeros();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.entries[i][k];
                for j in 0..4 {
                    out.entries[i][j] += a * rhs.entries[k][j];
                }
            }
        }
        out
    }
}

impl<T: Scalar> Add for Matrix4<T> {
    type Output = Matrix4<T>;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..4 {
            for j in 0..4 {
                self.entries[i][j] += rhs.entries[i][j];
            }
        }
        self
    }
}

impl<T: Scalar> Sub for Matrix4<T> {
    type Output = Matrix4<T>;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..4 {
            for j in 0..4 {
                self.entries[i][j] -= rhs.entries[i][j];
            }
        }
        self
    }
}

impl<T: Scalar> Neg for Matrix4<T> {
    type Output = Matrix4<T>;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

/// Coefficients of a quadratic Hamiltonian in the ten-dimensional algebra,
///
/// `H = (m_x p_x^2 + m_y p_y^2)/2 + w_x x^2/2 + w_y y^2/2 + Omega_x x p_y
///      - Omega_y y p_x + alpha x p_x + beta y p_y + gamma x y + delta p_x p_y`
///
/// where `x p_x` stands for the symmetrized product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedHamiltonian<T = f64> {
    pub m_x: T,
    pub m_y: T,
    pub w_x: T,
    pub w_y: T,
    pub omega_x: T,
    pub omega_y: T,
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub delta: T,
}

impl<T: Scalar> AveragedHamiltonian<T> {
    pub fn zero() -> Self {
        Self::from_array([T::zero(); 10])
    }

    /// Field order: `m_x, m_y, w_x, w_y, omega_x, omega_y, alpha, beta, gamma, delta`.
    pub fn to_array(&self) -> [T; 10] {
        [
            self.m_x,
            self.m_y,
            self.w_x,
            self.w_y,
            self.omega_x,
            self.omega_y,
            self.alpha,
            self.beta,
            self.gamma,
            self.delta,
        ]
    }

    pub fn from_array(a: [T; 10]) -> Self {
        AveragedHamiltonian {
            m_x: a[0],
            m_y: a[1],
            w_x: a[2],
            w_y: a[3],
            omega_x: a[4],
            omega_y: a[5],
            alpha: a[6],
            beta: a[7],
            gamma: a[8],
            delta: a[9],
        }
    }

    /// `c` times a single basis element.
    pub fn from_basis(element: BasisElement10, c: T) -> Self {
        let mut h = Self::zero();
        let two = T::from_real(2.0);
        match element {
            BasisElement10::X2 => h.w_x = two * c,
            BasisElement10::Px2 => h.m_x = two * c,
            BasisElement10::Y2 => h.w_y = two * c,
            BasisElement10::Py2 => h.m_y = two * c,
            BasisElement10::XPy => h.omega_x = c,
            BasisElement10::YPx => h.omega_y = -c,
            BasisElement10::XY => h.gamma = c,
            BasisElement10::PxPy => h.delta = c,
            BasisElement10::XPxSym => h.alpha = two * c,
            BasisElement10::YPySym => h.beta = two * c,
        }
        h
    }

    /// Coefficient of `element` when `self` is expanded in [`BasisElement10`].
    pub fn coefficient(&self, element: BasisElement10) -> T {
        let half = T::from_real(0.5);
        match element {
            BasisElement10::X2 => self.w_x * half,
            BasisElement10::Px2 => self.m_x * half,
            BasisElement10::Y2 => self.w_y * half,
            BasisElement10::Py2 => self.m_y * half,
            BasisElement10::XPy => self.omega_x,
            BasisElement10::YPx => -self.omega_y,
            BasisElement10::XY => self.gamma,
            BasisElement10::PxPy => self.delta,
            BasisElement10::XPxSym => self.alpha * half,
            BasisElement10::YPySym => self.beta * half,
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_array(self.to_array().map(|v| v * s))
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite("averaged Hamiltonian"))
        }
    }

    /// Classical generator `M` with `u' = M u`, laid out as
    ///
    /// ```text
    ///  alpha    -Omega_y   m_x      delta
    ///  Omega_x   beta      delta    m_y
    /// -w_x      -gamma    -alpha   -Omega_x
    /// -gamma    -w_y       Omega_y -beta
    /// ```
    pub fn classical_matrix(&self) -> Matrix4<T> {
        let h = self;
        Matrix4::from_rows([
            [h.alpha, -h.omega_y, h.m_x, h.delta],
            [h.omega_x, h.beta, h.delta, h.m_y],
            [-h.w_x, -h.gamma, -h.alpha, -h.omega_x],
            [-h.gamma, -h.w_y, h.omega_y, -h.beta],
        ])
    }

    /// Inverse of [`classical_matrix`](Self::classical_matrix). Entries that
    /// appear twice are averaged; the disagreement is reported if it exceeds
    /// `tol` relative to the matrix size.
    pub fn from_classical_matrix(m: &Matrix4<T>, tol: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite("classical matrix"));
        }
        let half = T::from_real(0.5);
        let e = &m.entries;
        let alpha = (e[0][0] - e[2][2]) * half;
        let beta = (e[1][1] - e[3][3]) * half;
        let omega_y = (e[3][2] - e[0][1]) * half;
        let omega_x = (e[1][0] - e[2][3]) * half;
        let delta = (e[0][3] + e[1][2]) * half;
        let gamma = -(e[2][1] + e[3][0]) * half;
        let h = AveragedHamiltonian {
            m_x: e[0][2],
            m_y: e[1][3],
            w_x: -e[2][0],
            w_y: -e[3][1],
            omega_x,
            omega_y,
            alpha,
            beta,
            gamma,
            delta,
        };
        let defect = (h.classical_matrix() - *m).frobenius_norm();
        let scale = m.frobenius_norm().max(1.0);
        if defect > tol * scale {
            return Err(Error::NotInAlgebra { defect });
        }
        Ok(h)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> AveragedHamiltonian<U> {
        AveragedHamiltonian::from_array(self.to_array().map(f))
    }
}

impl AveragedHamiltonian<f64> {
    pub fn to_complex(&self) -> AveragedHamiltonian<Complex64> {
        self.map(Complex64::from)
    }
}

impl<T: Scalar> Add for AveragedHamiltonian<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (self.to_array(), rhs.to_array());
        Self::from_array(core::array::from_fn(|i| a[i] + b[i]))
    }
}

impl<T: Scalar> Sub for AveragedHamiltonian<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let (a, b) = (self.to_array(), rhs.to_array());
        Self::from_array(core::array::from_fn(|i| a[i] - b[i]))
    }
}

/// Tolerance for recognising a commutator as a member of the algebra.
const ALGEBRA_TOL: f64 = 1e-12;

/// Poisson bracket `{a, b}` computed as the commutator of the classical
/// representations. Corresponds to the quantum bracket through
/// `{a, b} <-> -i [a, b]`.
pub fn bracket_in_basis<T: Scalar>(
    a: &AveragedHamiltonian<T>,
    b: &AveragedHamiltonian<T>,
) -> Result<AveragedHamiltonian<T>> {
    a.validate()?;
    b.validate()?;
    let c = a.classical_matrix().commutator(&b.classical_matrix());
    AveragedHamiltonian::from_classical_matrix(&c, ALGEBRA_TOL)
}

/// Affine-quadratic Hamiltonian `sum_j alpha_j E_j` over the fifteen-element
/// basis. The phase coefficient (E15) is carried but has no classical
/// counterpart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineHamiltonian<T = f64> {
    pub quadratic: AveragedHamiltonian<T>,
    /// Coefficients of `x, p_x, y, p_y` (`alpha_1, alpha_2, alpha_6, alpha_7`).
    pub linear: [T; 4],
    pub phase: T,
}

impl<T: Scalar> AffineHamiltonian<T> {
    pub fn zero() -> Self {
        AffineHamiltonian {
            quadratic: AveragedHamiltonian::zero(),
            linear: [T::zero(); 4],
            phase: T::zero(),
        }
    }

    pub fn from_quadratic(quadratic: AveragedHamiltonian<T>) -> Self {
        AffineHamiltonian {
            quadratic,
            ..Self::zero()
        }
    }

    /// Builds from `alpha_1 .. alpha_15`.
    pub fn from_basis15(alpha: [T; 15]) -> Self {
        let quadratic = AveragedHamiltonian {
            m_x: alpha[3],
            m_y: alpha[8],
            w_x: alpha[2],
            w_y: alpha[7],
            omega_x: alpha[12],
            omega_y: -alpha[13],
            alpha: alpha[4],
            beta: alpha[9],
            gamma: alpha[10],
            delta: alpha[11],
        };
        AffineHamiltonian {
            quadratic,
            linear: [alpha[0], alpha[1], alpha[5], alpha[6]],
            phase: alpha[14],
        }
    }

    pub fn to_basis15(&self) -> [T; 15] {
        let q = &self.quadratic;
        [
            self.linear[0],
            self.linear[1],
            q.w_x,
            q.m_x,
            q.alpha,
            self.linear[2],
            self.linear[3],
            q.w_y,
            q.m_y,
            q.beta,
            q.gamma,
            q.delta,
            q.omega_x,
            -q.omega_y,
            self.phase,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.quadratic.is_finite()
            && self.linear.iter().all(|v| v.is_finite())
            && self.phase.is_finite()
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite("affine Hamiltonian"))
        }
    }

    /// Inhomogeneous part `v` of the classical flow `u' = M u + v`,
    /// `v = (alpha_2, alpha_7, -alpha_1, -alpha_6)`.
    pub fn classical_shift(&self) -> [T; 4] {
        let [cx, cpx, cy, cpy] = self.linear;
        [cpx, cpy, -cx, -cy]
    }

    pub fn scale(&self, s: T) -> Self {
        AffineHamiltonian {
            quadratic: self.quadratic.scale(s),
            linear: self.linear.map(|v| v * s),
            phase: self.phase * s,
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> AffineHamiltonian<U> {
        AffineHamiltonian {
            quadratic: self.quadratic.map(&f),
            linear: self.linear.map(&f),
            phase: f(self.phase),
        }
    }
}

impl<T: Scalar> Add for AffineHamiltonian<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        AffineHamiltonian {
            quadratic: self.quadratic + rhs.quadratic,
            linear: core::array::from_fn(|i| self.linear[i] + rhs.linear[i]),
            phase: self.phase + rhs.phase,
        }
    }
}

/// Poisson bracket of affine Hamiltonians through the affine representation
/// `u -> M u + v`. The constant produced by brackets of linear terms lands in
/// the (unobservable) phase slot.
pub fn affine_bracket<T: Scalar>(
    a: &AffineHamiltonian<T>,
    b: &AffineHamiltonian<T>,
) -> Result<AffineHamiltonian<T>> {
    a.validate()?;
    b.validate()?;
    let quadratic = bracket_in_basis(&a.quadratic, &b.quadratic)?;
    let (ma, mb) = (a.quadratic.classical_matrix(), b.quadratic.classical_matrix());
    let (va, vb) = (a.classical_shift(), b.classical_shift());
    let (mavb, mbva) = (ma.apply(&vb), mb.apply(&va));
    let v: [T; 4] = core::array::from_fn(|i| mavb[i] - mbva[i]);
    // v = (c_px, c_py, -c_x, -c_y)
    let linear = [-v[2], v[0], -v[3], v[1]];
    // {x, p_x} = {y, p_y} = 1
    let phase = a.linear[0] * b.linear[1] - a.linear[1] * b.linear[0] + a.linear[2] * b.linear[3]
        - a.linear[3] * b.linear[2];
    Ok(AffineHamiltonian {
        quadratic,
        linear,
        phase,
    })
}

/// Taylor terms used after scaling; with `||A|| <= 1/2` the truncation error is
/// below `0.5^19 / 19!`.
const EXP_TAYLOR_TERMS: usize = 18;

fn scaling_power(norm: f64) -> u32 {
    let mut s = 0;
    let mut n = norm;
    while n > 0.5 {
        n *= 0.5;
        s += 1;
    }
    s
}

/// `exp(t m)` by scaling and squaring with a fixed-order Taylor expansion.
pub fn matrix_exp<T: Scalar>(m: &Matrix4<T>, t: T) -> Result<Matrix4<T>> {
    if !m.is_finite() || !t.is_finite() {
        return Err(Error::NonFinite("matrix exponential input"));
    }
    let a = m.scale(t);
    let s = scaling_power(a.frobenius_norm());
    let a = a.scale(T::from_real(num_traits::Float::powi(0.5, s as i32)));
    let mut term = Matrix4::identity();
    let mut sum = Matrix4::identity();
    for k in 1..=EXP_TAYLOR_TERMS {
        term = (term * a).scale(T::from_real(1.0 / k as f64));
        sum = sum + term;
    }
    for _ in 0..s {
        sum = sum * sum;
    }
    Ok(sum)
}

/// Returns `(exp(a), phi1(a))` with `phi1(a) = sum_k a^k / (k+1)!`, so that
/// `a phi1(a) = exp(a) - 1` also when `a` is singular.
pub fn exp_and_phi1<T: Scalar>(a: &Matrix4<T>) -> Result<(Matrix4<T>, Matrix4<T>)> {
    if !a.is_finite() {
        return Err(Error::NonFinite("phi-function input"));
    }
    let s = scaling_power(a.frobenius_norm());
    let a = a.scale(T::from_real(num_traits::Float::powi(0.5, s as i32)));
    let id = Matrix4::identity();
    let mut term = Matrix4::identity();
    let mut phi = Matrix4::identity();
    for k in 1..=EXP_TAYLOR_TERMS {
        term = (term * a).scale(T::from_real(1.0 / (k + 1) as f64));
        phi = phi + term;
    }
    let mut exp = id + a * phi;
    // phi1(2a) = (exp(a) + 1) phi1(a) / 2
    for _ in 0..s {
        phi = ((exp + id) * phi).scale(T::from_real(0.5));
        exp = exp * exp;
    }
    Ok((exp, phi))
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn matrix_inverse<T: Scalar>(m: &Matrix4<T>) -> Result<Matrix4<T>> {
    let mut a = m.entries;
    let mut inv = Matrix4::<T>::identity().entries;
    let scale = m.frobenius_norm();
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| a[i][col].modulus().total_cmp(&a[j][col].modulus()))
            .unwrap_or(col);
        if a[pivot][col].modulus() <= 1e-14 * scale {
            return Err(Error::Singular);
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let d = a[col][col];
        for j in 0..4 {
            a[col][j] = a[col][j] / d;
            inv[col][j] = inv[col][j] / d;
        }
        for i in 0..4 {
            if i != col {
                let f = a[i][col];
                for j in 0..4 {
                    a[i][j] = a[i][j] - f * a[col][j];
                    inv[i][j] = inv[i][j] - f * inv[col][j];
                }
            }
        }
    }
    Ok(Matrix4::from_rows(inv))
}

/// Principal logarithm by inverse scaling and squaring: Denman-Beavers
/// square roots until `m` is close to the identity, then the Mercator series.
pub fn matrix_log<T: Scalar>(m: &Matrix4<T>) -> Result<Matrix4<T>> {
    if !m.is_finite() {
        return Err(Error::NonFinite("matrix logarithm input"));
    }
    let id = Matrix4::identity();
    let half = T::from_real(0.5);
    let mut a = *m;
    let mut s = 0;
    while (a - id).frobenius_norm() > 0.05 {
        if s == 40 {
            return Err(Error::NotConverged {
                residual: (a - id).frobenius_norm(),
                iterations: s,
            });
        }
        let (mut y, mut z) = (a, id);
        for _ in 0..60 {
            let yi = matrix_inverse(&y)?;
            let zi = matrix_inverse(&z)?;
            let y_next = (y + zi).scale(half);
            z = (z + yi).scale(half);
            let done = (y_next - y).frobenius_norm() <= 1e-15 * y_next.frobenius_norm();
            y = y_next;
            if done {
                break;
            }
        }
        a = y;
        s += 1;
    }
    let x = a - id;
    let mut term = id;
    let mut sum = Matrix4::zeros();
    for k in 1..=EXP_TAYLOR_TERMS {
        term = term * x;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum = sum + term.scale(T::from_real(sign / k as f64));
    }
    Ok(sum.scale(T::from_real(num_traits::Float::powi(2.0, s as i32))))
}

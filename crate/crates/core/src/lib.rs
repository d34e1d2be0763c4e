//! Magnus-averaged four-factor Fourier-splitting decomposition for
//! time-dependent quadratic Hamiltonians of rotating condensates.
//!
//! Everything here is pure algebra on 4x4 phase-space matrices; the
//! grid-based propagation lives in the `rotsplit` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod decomp;
pub mod error;
pub mod lsq;
pub mod magnus;
pub mod scalar;

pub use algebra::{
    bracket_in_basis, matrix_exp, AffineHamiltonian, AveragedHamiltonian, BasisElement10,
    BasisElement15, Matrix4,
};
pub use decomp::{
    decompose_affine_step, decompose_step, decompose_step_real, factor_product,
    solve_affine_coefficients, solve_coefficients, strang_seed, AffineDecompCoefficients,
    DecompCoefficients, FactorFlow,
};
pub use error::{Error, Result};
pub use magnus::{magnus_theta, MagnusOrder, QuadraticHamiltonian};
pub use scalar::Scalar;

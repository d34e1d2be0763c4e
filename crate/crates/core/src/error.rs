use core::fmt;

/// Errors raised by the algebraic layer.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A coefficient or matrix entry was NaN or infinite.
    NonFinite(&'static str),
    /// A time step or tolerance outside its admissible range.
    InvalidArgument(&'static str),
    /// A matrix that should lie in the image of the classical representation
    /// does not; carries the size of the inconsistent part.
    NotInAlgebra { defect: f64 },
    /// Gauss-Newton did not reach the requested residual.
    NotConverged { residual: f64, iterations: usize },
    /// A least-squares system was numerically rank deficient.
    Singular,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
            Error::NotInAlgebra { defect } => {
                write!(f, "matrix is not in the image of the classical representation (defect {defect:.3e})")
            }
            Error::NotConverged { residual, iterations } => write!(
                f,
                "coefficient solver did not converge after {iterations} iterations (residual {residual:.3e})"
            ),
            Error::Singular => write!(f, "singular least-squares system"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

impl core::error::Error for Error {}

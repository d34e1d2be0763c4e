//! Spectral time integration of two-dimensional rotating condensates with
//! explicitly time-dependent quadratic traps.

pub mod config;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod nonlinear;
pub mod schemes;
pub mod snapshot;
pub mod spectral;
pub mod wave;

pub use config::ExperimentConfig;
pub use error::{Result, RotError};
pub use grid::{Grid, GridSpec};
pub use nonlinear::{b_flow, dissipative_nonlinear_flow, nonlinear_flow, NonlinearTerm, PotentialFn};
pub use schemes::{integrate, Diagnostics, Method, Problem, SplittingScheme, Stage, StageKind};
pub use snapshot::Snapshot;
pub use wave::{Direction, PhaseVariable, QuadraticExponent, Space, WaveFunction};

//! Spectral-Galerkin solvers for the optimal control of a 2D incompressible
//! third grade fluid on `[0, pi]^2` with free-slip walls.
//!
//! The pieces:
//!
//! - [`spectral`]: the divergence-free modal basis, transforms, norms and
//!   constitutive operators.
//! - [`Model`]: state, linearized and adjoint solves with the implicit
//!   midpoint rule.
//! - [`control`]: tracking cost, adjoint gradient, projection onto the
//!   admissible ball and projected gradient descent.
//! - [`verify`]: the numerical property suite behind `thirdgrade verify`.
//! - [`io`]: run configuration, trajectory files and CSV exports.
//!
//! ```
//! use thirdgrade::sampling::{random_field, random_smooth_trajectory, rng};
//! use thirdgrade::{Model, ModelParams, SpectralBasis, TrajectoryKind};
//!
//! let model = Model::new(SpectralBasis::new(3, 0.1)?, ModelParams::new(0.5, 0.1, 0.05, 0.2)?)?;
//! let b = model.basis();
//! let mut r = rng(0);
//! let y0 = random_field(b, &mut r, 1.0);
//! let u = random_smooth_trajectory(b, &mut r, 1.0, 0.02, 10, TrajectoryKind::Control);
//! let state = model.integrate_state(&y0, &u)?;
//! let psi = random_smooth_trajectory(b, &mut r, 1.0, 0.02, 10, TrajectoryKind::Control);
//! let f = random_smooth_trajectory(b, &mut r, 1.0, 0.02, 10, TrajectoryKind::State);
//! assert!(model.check_duality(&state, &psi, &f)?.gap < 1e-10);
//! # Ok::<(), thirdgrade::Error>(())
//! ```

// Tensor code indexes 2x2 components; NaN must fail the positivity checks.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod control;
pub mod error;
pub mod io;
pub mod sampling;
pub mod solver;
pub mod spectral;
pub mod trajectory;
pub mod verify;

pub use error::{Error, Result};
pub use solver::{DualityCheck, EnergyReport, Model, SolverOptions, TaylorReport};
pub use spectral::{Field, ModelParams, NormKind, SpectralBasis};
pub use trajectory::{Trajectory, TrajectoryKind};
pub use control::{ControlProblem, CostConfig, OptimizerOptions, OptimizerReport};

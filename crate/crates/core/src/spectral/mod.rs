//! Discretization substrate: the free-slip modes on `[0, pi]^2`, grid
//! transforms, norms and the constitutive operators.

mod basis;
mod field;
mod grid;
mod norms;
mod operators;
mod params;

pub use basis::{BasisKey, SpectralBasis};
pub use field::Field;
pub use grid::{GridVector, TensorGridField};
pub use norms::{l2_inner, norm, NormKind};
pub use operators::{
    apply_modified_stokes, constitutive_terms, invert_modified_stokes, trilinear_b,
    ConstitutiveTerms,
};
pub use params::{validate_params, ModelParams};

pub(crate) use norms::{l2_dot, norm_sq_coeffs, strain_sq};
pub(crate) use operators::{
    a4_integral, adjoint_action, linearized_action, state_residual, vorticity_cross, FrozenState, Kinematics,
};

//! Time integrators for the state, linearized and adjoint equations.
//!
//! All three share one implicit-midpoint scheme: the mode-diagonal viscous
//! term is treated by Crank-Nicolson and every nonlinear (or frozen
//! coefficient) term is evaluated at the interval midpoint, found by
//! fixed-point iteration. Because the linearized step is the exact derivative
//! of the state step and the adjoint step is its exact transpose, the
//! duality identity and the adjoint gradient hold to round-off.

mod adjoint;
mod linearized;
mod state;

pub use adjoint::DualityCheck;
pub use linearized::TaylorReport;
pub use state::EnergyReport;

use crate::error::{Error, Result};
use crate::spectral::{ModelParams, SpectralBasis};

/// Controls of the midpoint fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative update at which the nonlinear state iteration stops.
    pub tol: f64,
    /// Relative update at which the affine linearized and adjoint iterations stop.
    pub linear_tol: f64,
    pub max_iter: usize,
    /// Flip the sign of `div S(y)` in the state equation. Test fixture only:
    /// it lets the diagnostics prove they notice a wrong cubic term.
    pub corrupt_cubic_sign: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            linear_tol: 1e-13,
            max_iter: 50,
            corrupt_cubic_sign: false,
        }
    }
}

/// A basis paired with material constants: everything needed to integrate.
#[derive(Debug, Clone)]
pub struct Model {
    basis: SpectralBasis,
    params: ModelParams,
    options: SolverOptions,
}

impl Model {
    /// The basis must have been built with the same `alpha1` as the
    /// parameters, since its V-normalization depends on it.
    pub fn new(basis: SpectralBasis, params: ModelParams) -> Result<Self> {
        if basis.alpha1() != params.alpha1() {
            return Err(Error::InvalidBasis(format!(
                "basis built for alpha1 = {}, parameters have alpha1 = {}",
                basis.alpha1(),
                params.alpha1()
            )));
        }
        Ok(Self {
            basis,
            params,
            options: SolverOptions::default(),
        })
    }

    pub fn with_options(mut self, options: SolverOptions) -> Self {
        self.options = options;
        self
    }

    pub fn basis(&self) -> &SpectralBasis {
        &self.basis
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    /// Suggested step `0.5 / (nu lambda_max + ||y0||_H3)`.
    pub fn suggested_dt(&self, y0_h3: f64) -> f64 {
        let lam_max = self.basis.lambda().iter().cloned().fold(0.0, f64::max);
        0.5 / (self.params.nu() * lam_max + y0_h3).max(f64::MIN_POSITIVE)
    }

    /// One implicit-midpoint step of
    /// `c' = -nu lambda w c + forcing - nonlinear(c)`, with `forcing` already
    /// paired against the modes and `nonlinear` evaluated at the midpoint.
    pub(crate) fn midpoint_step(
        &self,
        prev: &[f64],
        forcing: &[f64],
        dt: f64,
        step: usize,
        tol: f64,
        nonlinear: impl Fn(&[f64]) -> Vec<f64>,
    ) -> Result<Vec<f64>> {
        let nu = self.params.nu();
        let half: Vec<f64> = self
            .basis
            .lambda()
            .iter()
            .zip(self.basis.mass())
            .map(|(l, w)| 0.5 * dt * nu * l * w)
            .collect();
        let mut next = prev.to_vec();
        let mut mid = vec![0.0; prev.len()];
        let mut update = f64::INFINITY;
        for _ in 0..self.options.max_iter {
            for ((m, a), b) in mid.iter_mut().zip(prev).zip(&next) {
                *m = 0.5 * (a + b);
            }
            let r = nonlinear(&mid);
            let mut diff = 0.0;
            let mut size = 0.0;
            for k in 0..prev.len() {
                let cand = ((1.0 - half[k]) * prev[k] + dt * (forcing[k] - r[k])) / (1.0 + half[k]);
                diff += (cand - next[k]).powi(2);
                size += cand * cand;
                next[k] = cand;
            }
            if !(diff.is_finite() && size.is_finite()) {
                update = f64::INFINITY;
                break;
            }
            update = if size > 0.0 { (diff / size).sqrt() } else { diff.sqrt() };
            if update <= tol {
                return Ok(next);
            }
        }
        Err(Error::FixedPointDiverged {
            step,
            iterations: self.options.max_iter,
            update,
        })
    }

    /// `(U, h_k) = w_k u_k` for a control given in mode coefficients.
    pub(crate) fn pair_forcing(&self, coeffs: &[f64]) -> Vec<f64> {
        coeffs.iter().zip(self.basis.mass()).map(|(c, w)| c * w).collect()
    }
}

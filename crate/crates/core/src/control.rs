//! Tracking cost, adjoint gradient, admissible-set projection and projected
//! gradient descent.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sampling::{random_smooth_trajectory, rng};
use crate::solver::Model;
use crate::spectral::{Field, NormKind, SpectralBasis};
use crate::trajectory::{l2_pairing, time_norm, Trajectory, TrajectoryKind};

/// Target, cost weight and admissible-ball radius.
#[derive(Debug, Clone)]
pub struct CostConfig {
    target: Trajectory,
    lambda: f64,
    radius: f64,
}

impl CostConfig {
    pub fn new(target: Trajectory, lambda: f64, radius: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("cost weight lambda = {lambda} must be >= 0")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("admissible radius K = {radius} must be > 0")));
        }
        Ok(Self {
            target: target.with_kind(TrajectoryKind::Target),
            lambda,
            radius,
        })
    }

    pub fn target(&self) -> &Trajectory {
        &self.target
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn horizon(&self) -> f64 {
        self.target.horizon()
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        Self::new(self.target, lambda, self.radius)
    }
}

/// Value of the cost together with the state it was computed from.
#[derive(Debug, Clone)]
pub struct CostValue {
    pub j: f64,
    /// `1/2 int ||y - y_d||^2`
    pub tracking: f64,
    /// `lambda/2 int ||U||^2`
    pub control: f64,
    pub state: Trajectory,
}

/// Cost, state, adjoint and gradient `p + lambda U` at one control.
#[derive(Debug, Clone)]
pub struct GradientValue {
    pub cost: CostValue,
    pub adjoint: Trajectory,
    pub gradient: Trajectory,
}

/// Initial state, dynamics and cost: `min J(U)` over the admissible ball.
#[derive(Debug, Clone)]
pub struct ControlProblem<'m> {
    model: &'m Model,
    y0: Field,
    cost: CostConfig,
}

impl<'m> ControlProblem<'m> {
    pub fn new(model: &'m Model, y0: Field, cost: CostConfig) -> Result<Self> {
        y0.check_basis(model.basis())?;
        cost.target.check_basis(model.basis())?;
        Ok(Self { model, y0, cost })
    }

    pub fn model(&self) -> &Model {
        self.model
    }

    pub fn y0(&self) -> &Field {
        &self.y0
    }

    pub fn cost(&self) -> &CostConfig {
        &self.cost
    }

    fn basis(&self) -> &SpectralBasis {
        self.model.basis()
    }

    /// `J(U) = 1/2 int ||y - y_d||^2 + lambda/2 int ||U||^2`, both time
    /// integrals taken at interval midpoints.
    pub fn eval_cost(&self, control: &Trajectory) -> Result<CostValue> {
        control.check_compatible(&self.cost.target)?;
        let state = self.model.integrate_state(&self.y0, control)?;
        let misfit = state.axpy(-1.0, &self.cost.target)?;
        let tracking = 0.5 * l2_pairing(self.basis(), &misfit, &misfit)?;
        let control_term = 0.5 * self.cost.lambda * l2_pairing(self.basis(), control, control)?;
        Ok(CostValue {
            j: tracking + control_term,
            tracking,
            control: control_term,
            state,
        })
    }

    /// `g = p + lambda U` with `p` the adjoint driven by `y - y_d`. For every
    /// direction `psi`, `dJ(U) psi = l2_pairing(g, psi)` exactly.
    pub fn gradient_direction(&self, control: &Trajectory) -> Result<GradientValue> {
        let cost = self.eval_cost(control)?;
        let misfit = cost.state.axpy(-1.0, &self.cost.target)?;
        let adjoint = self.model.solve_adjoint(&cost.state, &misfit)?;
        let gradient = adjoint
            .axpy(self.cost.lambda, control)?
            .with_kind(TrajectoryKind::Control);
        Ok(GradientValue {
            cost,
            adjoint,
            gradient,
        })
    }

    /// Projected gradient descent with Armijo backtracking and
    /// Barzilai-Borwein initial steps.
    pub fn optimize(
        &self,
        initial: &Trajectory,
        opts: &OptimizerOptions,
    ) -> Result<(Trajectory, OptimizerReport)> {
        opts.validate()?;
        let basis = self.basis();
        let radius = self.cost.radius;
        let mut u = project_admissible(basis, initial, radius)?.with_kind(TrajectoryKind::Control);
        let mut at = self.gradient_direction(&u)?;
        let initial_j = at.cost.j;
        let mut report = OptimizerReport {
            initial_j,
            ..OptimizerReport::default()
        };
        let mut step = opts.initial_step;
        let mut converged = false;
        let mut iteration = 0;
        loop {
            let trial = project_admissible(basis, &u.axpy(-step, &at.gradient)?, radius)?;
            let mapping = time_norm(basis, &u.axpy(-1.0, &trial)?, NormKind::L2)? / step;
            let record = IterationRecord {
                iteration,
                j: at.cost.j,
                step,
                gradient_norm: time_norm(basis, &at.gradient, NormKind::L2)?,
                gradient_mapping: mapping,
                control_norm: time_norm(basis, &u, NormKind::H1)?,
                active: time_norm(basis, &u, NormKind::H1)? >= radius * (1.0 - 1e-12),
            };
            report.iterations.push(record);
            if mapping <= opts.tol {
                converged = true;
                break;
            }
            if iteration >= opts.max_iter {
                break;
            }
            // Backtrack from `step`.
            let mut s = step;
            let (next_u, next_at) = loop {
                let cand = project_admissible(basis, &u.axpy(-s, &at.gradient)?, radius)?;
                let d = cand.axpy(-1.0, &u)?;
                let slope = l2_pairing(basis, &at.gradient, &d)?;
                let cand_cost = self.eval_cost(&cand)?;
                if cand_cost.j < at.cost.j && cand_cost.j <= at.cost.j + opts.armijo_c * slope {
                    break (cand.clone(), self.gradient_direction(&cand)?);
                }
                s *= opts.backtrack_ratio;
                if s < opts.min_step {
                    return Err(Error::LineSearchFailed {
                        iteration,
                        min_step: opts.min_step,
                    });
                }
            };
            let du = next_u.axpy(-1.0, &u)?;
            let dg = next_at.gradient.axpy(-1.0, &at.gradient)?;
            let curvature = l2_pairing(basis, &du, &dg)?;
            let length = l2_pairing(basis, &du, &du)?;
            step = if curvature > 0.0 && length > 0.0 {
                (length / curvature).clamp(opts.min_step, 1e12)
            } else {
                s
            };
            if let Some(last) = report.iterations.last_mut() {
                last.step = s;
            }
            u = next_u;
            at = next_at;
            iteration += 1;
        }
        report.converged = converged;
        report.final_j = at.cost.j;
        report.final_gradient_mapping = report.iterations.last().map_or(0.0, |r| r.gradient_mapping);
        report.vi_tolerance = opts.tol * (1.0 + at.cost.j.abs());
        report.vi_residuals = self.vi_residuals(&u, &at.gradient, opts.vi_samples, opts.seed)?;
        Ok((u, report))
    }

    /// `int (psi - U, g) dt` for random admissible `psi`; nonnegative at an
    /// exact minimizer.
    pub fn vi_residuals(
        &self,
        control: &Trajectory,
        gradient: &Trajectory,
        samples: usize,
        seed: u64,
    ) -> Result<Vec<f64>> {
        let basis = self.basis();
        let mut r = rng(seed);
        (0..samples)
            .map(|_| {
                let raw = random_smooth_trajectory(
                    basis,
                    &mut r,
                    1.0,
                    control.dt(),
                    control.n_steps(),
                    TrajectoryKind::Control,
                );
                let len = time_norm(basis, &raw, NormKind::H1)?;
                let radius = self.cost.radius * r.gen_range(0.0..1.0);
                let psi = if len > 0.0 { raw.scaled(radius / len) } else { raw };
                l2_pairing(basis, &psi.axpy(-1.0, control)?, gradient)
            })
            .collect()
    }
}

/// Radial retraction onto `{ ||U||_{L^2(0,T;H^1)} <= K }`.
pub fn project_admissible(basis: &SpectralBasis, control: &Trajectory, radius: f64) -> Result<Trajectory> {
    let len = time_norm(basis, control, NormKind::H1)?;
    if len <= radius {
        Ok(control.clone())
    } else {
        Ok(control.scaled(radius / len))
    }
}

/// Step-search and stopping parameters for [`ControlProblem::optimize`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizerOptions {
    pub max_iter: usize,
    /// Stop when the gradient mapping falls to this value.
    pub tol: f64,
    pub armijo_c: f64,
    pub backtrack_ratio: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub vi_samples: usize,
    pub seed: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol: 1e-6,
            armijo_c: 1e-4,
            backtrack_ratio: 0.5,
            initial_step: 1.0,
            min_step: 1e-12,
            vi_samples: 20,
            seed: 0,
        }
    }
}

impl OptimizerOptions {
    fn validate(&self) -> Result<()> {
        let ok = self.tol >= 0.0
            && self.armijo_c > 0.0
            && self.armijo_c < 1.0
            && self.backtrack_ratio > 0.0
            && self.backtrack_ratio < 1.0
            && self.initial_step > 0.0
            && self.min_step > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("bad optimizer options {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub j: f64,
    /// Accepted step, or the trial step on the final record.
    pub step: f64,
    pub gradient_norm: f64,
    pub gradient_mapping: f64,
    /// `||U||_{L^2(0,T;H^1)}` of the iterate.
    pub control_norm: f64,
    pub active: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct OptimizerReport {
    pub iterations: Vec<IterationRecord>,
    pub converged: bool,
    pub initial_j: f64,
    pub final_j: f64,
    pub final_gradient_mapping: f64,
    pub vi_residuals: Vec<f64>,
    /// Residuals must be at least `-vi_tolerance`.
    pub vi_tolerance: f64,
}

impl OptimizerReport {
    pub fn is_monotone(&self) -> bool {
        self.iterations.windows(2).all(|w| w[1].j < w[0].j)
    }

    /// Every iterate inside the ball up to `1e-12` relative.
    pub fn all_admissible(&self, radius: f64) -> bool {
        self.iterations.iter().all(|r| r.control_norm <= radius * (1.0 + 1e-12))
    }

    pub fn vi_satisfied(&self) -> bool {
        self.vi_residuals.iter().all(|r| *r >= -self.vi_tolerance)
    }

    /// Number of accepted steps.
    pub fn accepted_steps(&self) -> usize {
        self.iterations.len().saturating_sub(1)
    }
}

//! Property harness: every identity and estimate as a pass/fail check.

mod checks;
mod report;
mod uniqueness;

use std::fmt;
use std::str::FromStr;

pub use checks::{
    basis_invariants, initial_data_sensitivity, manufactured_convergence, manufactured_forcing,
    stability_check, BasisInvariants, ConvergenceTable, InitialDataSensitivity, StabilityTable,
};
pub use report::{CheckResult, Relation, VerifyReport};
pub use uniqueness::{
    big_gamma_ratio, estimate_big_gamma, estimate_kappa, kappa_ratio, uniqueness_diagnostics,
    ConstantEstimate, SearchBudget, UniquenessReport,
};

use crate::control::{ControlProblem, CostConfig, OptimizerOptions};
use crate::error::{Error, Result};
use crate::sampling::{random_field, random_smooth_trajectory, rng, single_mode_trajectory};
use crate::solver::{Model, SolverOptions};
use crate::spectral::{
    a4_integral, constitutive_terms, l2_inner, ModelParams, NormKind, SpectralBasis,
};
use crate::trajectory::{l2_pairing, time_norm, Trajectory, TrajectoryKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

impl Level {
    pub fn name(self) -> &'static str {
        match self {
            Level::Fast => "fast",
            Level::Full => "full",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }
}

/// Sizes and draw counts of one suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSetup {
    pub level: Level,
    pub max_mode: usize,
    pub n_steps: usize,
    pub horizon: f64,
    pub params: ModelParams,
    pub duality_draws: usize,
    pub gradient_draws: usize,
    pub n_starts: usize,
    pub solver: SolverOptions,
}

impl SuiteSetup {
    pub fn for_level(level: Level) -> Self {
        let (max_mode, n_steps) = match level {
            Level::Fast => (4, 64),
            Level::Full => (6, 128),
        };
        Self {
            level,
            max_mode,
            n_steps,
            horizon: 0.5,
            params: ModelParams::new(0.5, 0.1, 0.05, 0.2).expect("admissible"),
            duality_draws: 10,
            gradient_draws: 5,
            n_starts: 3,
            solver: SolverOptions::default(),
        }
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    pub fn model(&self) -> Result<Model> {
        let basis = SpectralBasis::new(self.max_mode, self.params.alpha1())?;
        Ok(Model::new(basis, self.params)?.with_options(self.solver))
    }

    fn control(&self, basis: &SpectralBasis, r: &mut impl rand::Rng, amplitude: f64) -> Trajectory {
        random_smooth_trajectory(basis, r, amplitude, self.dt(), self.n_steps, TrajectoryKind::Control)
    }
}

/// Names of the checks in report order.
pub const CHECK_NAMES: [&str; 10] = [
    "basis_invariants",
    "energy_inequality",
    "duality_gap",
    "taylor_slope",
    "gradient_check",
    "stability_scaling",
    "initial_data_sensitivity",
    "manufactured_convergence",
    "optimizer_contract",
    "uniqueness_multistart",
];

/// Run every check at the given level. Failures are recorded, never raised.
pub fn run_suite(level: Level, seed: u64) -> VerifyReport {
    run_suite_with(&SuiteSetup::for_level(level), seed)
}

pub fn run_suite_with(setup: &SuiteSetup, seed: u64) -> VerifyReport {
    type Check = fn(&SuiteSetup, &Model, u64) -> Result<CheckResult>;
    let table: [(Check, Relation, f64); 10] = [
        (check_basis, Relation::AtMost, 1e-10),
        (check_energy, Relation::AtLeast, -1e-6),
        (check_duality, Relation::AtMost, 1e-6),
        (check_taylor, Relation::AtLeast, 0.9),
        (check_gradient, Relation::AtMost, 1e-4),
        (check_stability, Relation::AtMost, 0.25),
        (check_initial_data, Relation::AtMost, 1.0),
        (check_manufactured, Relation::AtLeast, 1.8),
        (check_optimizer, Relation::AtMost, 0.05),
        (check_uniqueness, Relation::AtMost, 1e-4),
    ];
    let model = setup.model();
    let checks: Vec<CheckResult> = table
        .iter()
        .zip(CHECK_NAMES)
        .enumerate()
        .map(|(i, ((run, relation, tol), name))| {
            let check_seed = seed ^ (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let outcome = model.as_ref().map_err(|e| e.to_string()).and_then(|m| {
                run(setup, m, check_seed).map_err(|e| e.to_string())
            });
            match outcome {
                Ok(c) => c,
                Err(e) => CheckResult::failed(name, *relation, *tol, e),
            }
        })
        .collect();
    VerifyReport {
        level: setup.level.name().to_string(),
        seed,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn check_basis(_: &SuiteSetup, model: &Model, seed: u64) -> Result<CheckResult> {
    let basis = model.basis();
    let probe = random_field(basis, &mut rng(seed), 1.0);
    let inv = basis_invariants(basis, &probe)?;
    let worst = inv
        .max_v_gram_defect
        .max(inv.max_mu_defect)
        .max(inv.parseval_defect)
        .max(inv.max_divergence)
        .max(inv.max_boundary_trace);
    Ok(CheckResult::new("basis_invariants", worst, Relation::AtMost, 1e-10)
        .require("divergence_within_1e-12", inv.max_divergence <= 1e-12)
        .require("boundary_trace_within_1e-12", inv.max_boundary_trace <= 1e-12)
        .detail("invariants", &inv))
}

fn check_energy(setup: &SuiteSetup, model: &Model, seed: u64) -> Result<CheckResult> {
    let basis = model.basis();
    let mut r = rng(seed);
    let y0 = random_field(basis, &mut r, 1.0);
    let u = setup.control(basis, &mut r, 1.0);
    let (traj, energy) = model.solve_state(&y0, &u)?;
    let slack = energy.worst_relative_slack();

    // <div S(y), y> = -(beta/2) int |A|^4 at the mid-horizon state.
    let y = traj.field(traj.n_steps() / 2);
    let terms = constitutive_terms(basis, &y, model.params())?;
    let lhs = l2_inner(basis, &terms.div_s, &y)?;
    let rhs = -0.5 * model.params().beta() * a4_integral(basis, y.coeffs());
    let identity_error = if rhs != 0.0 { (lhs - rhs).abs() / rhs.abs() } else { lhs.abs() };

    Ok(CheckResult::new("energy_inequality", slack, Relation::AtLeast, -1e-6)
        .require("quadrature_identity_within_1e-8", identity_error <= 1e-8)
        .require("cubic_term_dissipative", lhs <= 0.0)
        .detail("quadrature_identity_error", identity_error)
        .detail("div_s_pairing", lhs)
        .detail("scale", energy.scale())
        .detail("gamma", energy.gamma)
        .detail("final_dissipation", energy.dissipation.last().copied()))
}

fn check_duality(setup: &SuiteSetup, model: &Model, seed: u64) -> Result<CheckResult> {
    let basis = model.basis();
    let mut r = rng(seed);
    let mut gaps = Vec::with_capacity(setup.duality_draws);
    for _ in 0..setup.duality_draws {
        let y0 = random_field(basis, &mut r, 1.0);
        let u = setup.control(basis, &mut r, 1.0);
        let state = model.integrate_state(&y0, &u)?;
        let psi = setup.control(basis, &mut r, 1.0);
        let f = setup.control(basis, &mut r, 1.0).with_kind(TrajectoryKind::State);
        gaps.push(model.check_duality(&state, &psi, &f)?.gap);
    }
    let worst = gaps.iter().cloned().fold(0.0, f64::max);
    Ok(CheckResult::new("duality_gap", worst, Relation::AtMost, 1e-6).detail("gaps", gaps))
}

fn check_taylor(setup: &SuiteSetup, model: &Model, seed: u64) -> Result<CheckResult> {
    let basis = model.basis();
    let mut r = rng(seed);
    let y0 = random_field(basis, &mut r, 1.0);
    let u = setup.control(basis, &mut r, 1.0);
    let psi = setup.control(basis, &mut r, 1.0);
    let rep = model.gateaux_taylor_test(&y0, &u, &psi, &[1e-1, 1e-2, 1e-3, 1e-4])?;
    let slope = rep.fitted_slope.unwrap_or(f64::NAN);
    Ok(CheckResult::new("taylor_slope", slope, Relation::AtLeast, 0.9)
        .detail("residuals", &rep.residuals)
        .detail("slopes", &rep.slopes))
}

fn tracking_problem<'m>(
    setup: &SuiteSetup,
    model: &'m Model,
    r: &mut impl rand::Rng,
    lambda: f64,
    radius: f64,
) -> Result<ControlProblem<'m>> {
    let basis = model.basis();
    let y0 = random_field(basis, r, 1.0);
    let target = random_smooth_trajectory(basis, r, 0.5, setup.dt(), setup.n_steps, TrajectoryKind::Target);
    ControlProblem::new(model, y0, CostConfig::new(target, lambda, radius)?)
}

fn check_gradient(setup: &SuiteSetup, model: &Model, seed: u64) -> Result<CheckResult> {
    let basis = model.basis();
    let mut r = rng(seed);
    let prob = tracking_problem(setup, model, &mut r, 0.1, 100.0)?;
    let u = setup.control(basis, &mut r, 1.0);
    let g = prob.gradient_direction(&u)?.gradient;
    let rho = 1e-4;
    let mut errors = Vec::with_capacity(setup.gradient_draws);
    for _ in 0..setup.gradient_draws {
        let psi = setup.control(basis, &mut r, 1.0);
        let jp = prob.eval_cost(&u.axpy(rho, &psi)?)?.j;
        let jm = prob.eval_cost(&u.axpy(-rho, &psi)?)?.j;
        let fd = (jp - jm) / (2.0 * rho);
        let adj = l2_pairing(basis, &g, &psi)?;
        errors.push((fd - adj).abs() / adj.abs().max(f64::MIN_POSITIVE));
    }
    let worst = errors.iter().cloned().fold(0.0, f64::max);
    Ok(CheckResult::new("gradient_check", worst, Relation::AtMost, 1e-4)
        .detail("rho", rho)
        .detail("relative_errors", errors))
}

fn check_stability(setup: &SuiteSetup, model: &Model, seed: u64) -> Result<CheckResult> {
    let basis = model.basis();
    let mut r = rng(seed);
    let y0 = random_field(basis, &mut r, 1.0);
    let u = setup.control(basis, &mut r, 1.0);
    let psi = single_mode_trajectory(basis, 1, 2, setup.dt(), setup.n_steps, TrajectoryKind::Control, |t| {
        0.1 * (1.0 + t)
    })?;
    let table = stability_check(model, &y0, &u, &psi, &[1e-1, 1e-2, 1e-3])?;
    Ok(CheckResult::new("stability_scaling", table.spread, Relation::AtMost, 0.25).detail("table", &table))
}

fn check_initial_data(setup: &SuiteSetup, _: &Model, seed: u64) -> Result<CheckResult> {
    // Strong viscosity: the initial-data term of the stability bound alone.
    let params = ModelParams::new(5.0, setup.params.alpha1(), setup.params.alpha2(), setup.params.beta())?;
    let model = Model::new(SpectralBasis::new(setup.max_mode, params.alpha1())?, params)?
        .with_options(setup.solver);
    let basis = model.basis();
    let mut r = rng(seed);
    let a = random_field(basis, &mut r, 1.0);
    let b = a.axpy(1.0, &random_field(basis, &mut r, 0.1))?;
    let u = setup.control(basis, &mut r, 1.0);
    let s = initial_data_sensitivity(&model, &a, &b, &u)?;
    let ratio = s.final_gap / s.initial_gap;
    Ok(CheckResult::new("initial_data_sensitivity", ratio, Relation::AtMost, 1.0)
        .require("sup_gap_finite", s.sup_gap.is_finite())
        .detail("gaps", &s))
}

fn check_manufactured(setup: &SuiteSetup, model: &Model, _: u64) -> Result<CheckResult> {
    let g = |t: f64| 1.0 + 0.5 * (3.0 * t).sin();
    let dg = |t: f64| 1.5 * (3.0 * t).cos();
    let steps = [16, 32, 64, 128];
    let table = manufactured_convergence(model, (1, 1), setup.horizon, &steps, g, dg)?;
    let order = table.orders.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(CheckResult::new("manufactured_convergence", order, Relation::AtLeast, 1.8).detail("table", &table))
}

/// A target generated by a known control strictly inside the ball.
fn manufactured_problem<'m>(
    setup: &SuiteSetup,
    model: &'m Model,
    r: &mut impl rand::Rng,
    lambda: f64,
) -> Result<ControlProblem<'m>> {
    let basis = model.basis();
    let y0 = random_field(basis, r, 1.0);
    let u_true = setup.control(basis, r, 2.0);
    let target = model.integrate_state(&y0, &u_true)?;
    let radius = 2.0 * time_norm(basis, &u_true, NormKind::H1)?;
    ControlProblem::new(model, y0, CostConfig::new(target, lambda, radius)?)
}

fn check_optimizer(setup: &SuiteSetup, model: &Model, seed: u64) -> Result<CheckResult> {
    let basis = model.basis();
    let mut r = rng(seed);
    let prob = manufactured_problem(setup, model, &mut r, 1e-6)?;
    let zero = Trajectory::zeros(basis, setup.dt(), setup.n_steps, TrajectoryKind::Control);
    let opts = OptimizerOptions {
        max_iter: 200,
        tol: 1e-4,
        seed,
        ..Default::default()
    };
    let (_, rep) = prob.optimize(&zero, &opts)?;
    let reduction = rep.final_j / rep.initial_j;
    let worst_vi = rep.vi_residuals.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(CheckResult::new("optimizer_contract", reduction, Relation::AtMost, 0.05)
        .require("monotone", rep.is_monotone())
        .require("admissible", rep.all_admissible(prob.cost().radius()))
        .require("vi_residuals", rep.vi_satisfied())
        .detail("initial_j", rep.initial_j)
        .detail("final_j", rep.final_j)
        .detail("iterations", rep.accepted_steps())
        .detail("converged", rep.converged)
        .detail("worst_vi_residual", worst_vi)
        .detail("vi_tolerance", rep.vi_tolerance))
}

fn check_uniqueness(setup: &SuiteSetup, model: &Model, seed: u64) -> Result<CheckResult> {
    let basis = model.basis();
    let mut r = rng(seed);
    let prob = tracking_problem(setup, model, &mut r, 0.0, 5.0)?;
    let reference = Trajectory::zeros(basis, setup.dt(), setup.n_steps, TrajectoryKind::Control);
    let opts = OptimizerOptions {
        max_iter: 500,
        tol: 1e-7,
        vi_samples: 0,
        seed,
        ..Default::default()
    };
    let rep = uniqueness_diagnostics(
        &prob,
        &reference,
        setup.n_starts,
        10.0,
        SearchBudget::default(),
        &opts,
        seed,
    )?;
    let relative = rep.max_pairwise_distance / rep.radius;
    Ok(CheckResult::new("uniqueness_multistart", relative, Relation::AtMost, 1e-4).detail("diagnostics", &rep))
}

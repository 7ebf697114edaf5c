//! Numerical lower bounds for the constants behind uniqueness of the optimal
//! control, and an empirical multi-start uniqueness test.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::control::{project_admissible, ControlProblem, OptimizerOptions};
use crate::error::{Error, Result};
use crate::sampling::{random_smooth_trajectory, rng};
use crate::spectral::{norm_sq_coeffs, vorticity_cross, NormKind, SpectralBasis, Kinematics};
use crate::trajectory::{time_norm, Trajectory, TrajectoryKind};

/// Best ratio found by random search followed by local ascent. A lower bound
/// on the true supremum over the span.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantEstimate {
    pub value: f64,
    /// Best ratio among the random samples alone.
    pub best_sample: f64,
    pub samples: usize,
    pub ascent_steps: usize,
}

/// Search budget of [`estimate_kappa`] and [`estimate_big_gamma`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchBudget {
    pub samples: usize,
    pub ascent_steps: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            samples: 200,
            ascent_steps: 50,
        }
    }
}

/// `||u||_{W^{1,4}}^2 / ||u||_W^2`.
pub fn kappa_ratio(basis: &SpectralBasis, coeffs: &[f64]) -> f64 {
    let w = norm_sq_coeffs(basis, coeffs, NormKind::W);
    if w == 0.0 {
        return 0.0;
    }
    norm_sq_coeffs(basis, coeffs, NormKind::W14) / w
}

/// `sup_phi |(curl v(z) x z, phi)| / ||phi||_H2` divided by `||z||_H2^2`.
/// The inner supremum over the span is attained in closed form since the
/// modes are `H^2`-orthogonal.
pub fn big_gamma_ratio(basis: &SpectralBasis, coeffs: &[f64]) -> f64 {
    let h2 = norm_sq_coeffs(basis, coeffs, NormKind::H2);
    if h2 == 0.0 {
        return 0.0;
    }
    let kin = Kinematics::new(basis, coeffs);
    let curl: Vec<f64> = kin.grad_v.t[1][0]
        .iter()
        .zip(&kin.grad_v.t[0][1])
        .map(|(a, b)| a - b)
        .collect();
    let force = vorticity_cross(&curl, &kin.u);
    let pairs = basis.pair_vector(&force);
    let dual_sq: f64 = pairs
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let l = basis.lambda()[k];
            b * b / (basis.mass()[k] * (1.0 + l + l * l))
        })
        .sum();
    dual_sq.sqrt() / h2
}

pub fn estimate_kappa(basis: &SpectralBasis, budget: SearchBudget, seed: u64) -> ConstantEstimate {
    maximize(basis, budget, seed, |c| kappa_ratio(basis, c))
}

pub fn estimate_big_gamma(basis: &SpectralBasis, budget: SearchBudget, seed: u64) -> ConstantEstimate {
    maximize(basis, budget, seed, |c| big_gamma_ratio(basis, c))
}

fn unit(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

/// Random search over coefficient vectors, then gradient ascent with
/// central-difference gradients and an adaptive step. The ratio is
/// scale-invariant, so iterates are kept on the unit sphere.
fn maximize(
    basis: &SpectralBasis,
    budget: SearchBudget,
    seed: u64,
    ratio: impl Fn(&[f64]) -> f64,
) -> ConstantEstimate {
    let mut r = rng(seed);
    let n = basis.n_modes();
    let lam0 = basis.lambda()[0];
    let mut best = vec![0.0; n];
    best[0] = 1.0;
    let mut best_val = ratio(&best);
    for i in 0..budget.samples {
        // Alternate low-mode-weighted and flat draws.
        let mut c: Vec<f64> = basis
            .lambda()
            .iter()
            .map(|l| {
                let w = if i % 2 == 0 { lam0 / l } else { 1.0 };
                w * r.gen_range(-1.0..1.0)
            })
            .collect();
        unit(&mut c);
        let v = ratio(&c);
        if v > best_val {
            best_val = v;
            best = c;
        }
    }
    let best_sample = best_val;
    let mut step = 0.1;
    let h = 1e-6;
    for _ in 0..budget.ascent_steps {
        let mut grad = vec![0.0; n];
        let mut probe = best.clone();
        for k in 0..n {
            probe[k] = best[k] + h;
            let up = ratio(&probe);
            probe[k] = best[k] - h;
            let down = ratio(&probe);
            probe[k] = best[k];
            grad[k] = (up - down) / (2.0 * h);
        }
        unit(&mut grad);
        let mut cand: Vec<f64> = best.iter().zip(&grad).map(|(c, g)| c + step * g).collect();
        unit(&mut cand);
        let v = ratio(&cand);
        if v > best_val {
            best_val = v;
            best = cand;
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    ConstantEstimate {
        value: best_val,
        best_sample,
        samples: budget.samples,
        ascent_steps: budget.ascent_steps,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    /// `kappa`: `||u||_{W^{1,4}}^2 <= kappa ||u||_W^2`, lower bound.
    pub kappa: ConstantEstimate,
    /// `Gamma`: bound on the vorticity coupling, lower bound.
    pub big_gamma: ConstantEstimate,
    /// `gamma = sup_t ||y||_H3` of the reference solve.
    pub gamma: f64,
    /// `sup_t ||p||_W` of the reference adjoint.
    pub lambda_tilde: f64,
    /// `(Gamma + 4 kappa |alpha1 + alpha2| + 12 kappa beta gamma) lambda_tilde`.
    pub proxy: f64,
    pub lambda_used: f64,
    pub radius: f64,
    pub final_costs: Vec<f64>,
    pub converged: Vec<bool>,
    pub iterations: Vec<usize>,
    /// Largest `||U_i - U_j||_{L^2(0,T;L^2)}` among the multi-start optima.
    pub max_pairwise_distance: f64,
}

/// Estimate the constants around `reference` and run `n_starts` optimizations
/// from random admissible controls with `lambda = lambda_factor * proxy`.
pub fn uniqueness_diagnostics(
    problem: &ControlProblem<'_>,
    reference: &Trajectory,
    n_starts: usize,
    lambda_factor: f64,
    budget: SearchBudget,
    opts: &OptimizerOptions,
    seed: u64,
) -> Result<UniquenessReport> {
    if n_starts < 2 {
        return Err(Error::InvalidArgument(format!(
            "multi-start comparison needs at least 2 starts, got {n_starts}"
        )));
    }
    let model = problem.model();
    let basis = model.basis();
    let params = model.params();
    let kappa = estimate_kappa(basis, budget, seed);
    let big_gamma = estimate_big_gamma(basis, budget, seed.wrapping_add(1));
    let at = problem.gradient_direction(reference)?;
    let (_, energy) = model.solve_state(problem.y0(), reference)?;
    let gamma = energy.gamma;
    let lambda_tilde = at.adjoint.sup_norm(basis, NormKind::W)?;
    let proxy = (big_gamma.value
        + 4.0 * kappa.value * (params.alpha1() + params.alpha2()).abs()
        + 12.0 * kappa.value * params.beta() * gamma)
        * lambda_tilde;
    let lambda_used = lambda_factor * proxy;
    let radius = problem.cost().radius();
    let large = ControlProblem::new(
        model,
        problem.y0().clone(),
        problem.cost().clone().with_lambda(lambda_used)?,
    )?;

    let mut r = rng(seed.wrapping_add(2));
    let starts: Vec<Trajectory> = (0..n_starts)
        .map(|_| {
            let raw = random_smooth_trajectory(
                basis,
                &mut r,
                1.0,
                reference.dt(),
                reference.n_steps(),
                TrajectoryKind::Control,
            );
            let len = time_norm(basis, &raw, NormKind::H1).unwrap_or(0.0);
            let target = radius * r.gen_range(0.2..1.0);
            let scaled = if len > 0.0 { raw.scaled(target / len) } else { raw };
            project_admissible(basis, &scaled, radius).expect("same basis")
        })
        .collect();
    let runs: Vec<_> = starts
        .par_iter()
        .map(|u| large.optimize(u, opts))
        .collect::<Result<Vec<_>>>()?;

    let mut max_pairwise_distance: f64 = 0.0;
    for i in 0..runs.len() {
        for j in i + 1..runs.len() {
            let d = time_norm(basis, &runs[i].0.axpy(-1.0, &runs[j].0)?, NormKind::L2)?;
            max_pairwise_distance = max_pairwise_distance.max(d);
        }
    }
    Ok(UniquenessReport {
        kappa,
        big_gamma,
        gamma,
        lambda_tilde,
        proxy,
        lambda_used,
        radius,
        final_costs: runs.iter().map(|r| r.1.final_j).collect(),
        converged: runs.iter().map(|r| r.1.converged).collect(),
        iterations: runs.iter().map(|r| r.1.accepted_steps()).collect(),
        max_pairwise_distance,
    })
}

//! Stand-alone diagnostics used by the suite.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::Model;
use crate::spectral::{norm_sq_coeffs, state_residual, Field, NormKind, SpectralBasis};
use crate::trajectory::{time_norm, Trajectory, TrajectoryKind};

/// Sup-in-time squared `W` distance per unit squared control perturbation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityTable {
    pub epsilons: Vec<f64>,
    /// `sup_t ||y1 - y2||_W^2 / ||U1 - U2||^2_{L^2(0,T;L^2)}`
    pub ratios: Vec<f64>,
    /// `max / min - 1` over the ratios.
    pub spread: f64,
}

/// Compare the solve under `control` with solves under `control + eps psi`.
pub fn stability_check(
    model: &Model,
    y0: &Field,
    control: &Trajectory,
    psi: &Trajectory,
    epsilons: &[f64],
) -> Result<StabilityTable> {
    let basis = model.basis();
    let base = model.integrate_state(y0, control)?;
    let psi_sq = time_norm(basis, psi, NormKind::L2)?.powi(2);
    let mut ratios = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let other = model.integrate_state(y0, &control.axpy(eps, psi)?)?;
        let gap = base.axpy(-1.0, &other)?.sup_norm(basis, NormKind::W)?;
        let denom = eps * eps * psi_sq;
        ratios.push(if denom > 0.0 { gap * gap / denom } else { 0.0 });
    }
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = if min > 0.0 { max / min - 1.0 } else { 0.0 };
    Ok(StabilityTable {
        epsilons: epsilons.to_vec(),
        ratios,
        spread,
    })
}

/// `||y1(t) - y2(t)||_W` for two initial states under the same control.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialDataSensitivity {
    pub initial_gap: f64,
    pub sup_gap: f64,
    pub final_gap: f64,
}

pub fn initial_data_sensitivity(
    model: &Model,
    y0_a: &Field,
    y0_b: &Field,
    control: &Trajectory,
) -> Result<InitialDataSensitivity> {
    let basis = model.basis();
    let a = model.integrate_state(y0_a, control)?;
    let b = model.integrate_state(y0_b, control)?;
    let diff = a.axpy(-1.0, &b)?;
    let w = |n: usize| norm_sq_coeffs(basis, diff.node(n), NormKind::W).sqrt();
    Ok(InitialDataSensitivity {
        initial_gap: w(0),
        sup_gap: diff.sup_norm(basis, NormKind::W)?,
        final_gap: w(diff.n_steps()),
    })
}

/// Errors of the state solver against an exact single-mode solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub steps: Vec<usize>,
    pub dts: Vec<f64>,
    /// `max_n ||y_n - y*(t_n)||_V`
    pub errors: Vec<f64>,
    /// `log2` of consecutive error ratios.
    pub orders: Vec<f64>,
}

/// Forcing that makes `y*(t) = g(t) h_(m,n)` an exact solution of the
/// semi-discrete equations.
pub fn manufactured_forcing(
    model: &Model,
    mode: (usize, usize),
    g: impl Fn(f64) -> f64,
    dg: impl Fn(f64) -> f64,
    dt: f64,
    n_steps: usize,
) -> Result<Trajectory> {
    let basis = model.basis();
    let params = model.params();
    let k = mode_index(basis, mode)?;
    Trajectory::from_fn(basis, dt, n_steps, TrajectoryKind::Control, |t| {
        let mut c = vec![0.0; basis.n_modes()];
        c[k] = g(t);
        let r = state_residual(basis, params, &c, 1.0);
        (0..basis.n_modes())
            .map(|j| {
                let w = basis.mass()[j];
                let lhs = if j == k { dg(t) } else { 0.0 };
                (lhs + params.nu() * basis.lambda()[j] * w * c[j] + r[j]) / w
            })
            .collect()
    })
}

fn mode_index(basis: &SpectralBasis, (m, n): (usize, usize)) -> Result<usize> {
    basis
        .index_of(m, n)
        .ok_or_else(|| Error::InvalidArgument(format!("mode ({m}, {n}) not in the basis")))
}

/// Solve with the manufactured forcing for each step count and tabulate errors.
pub fn manufactured_convergence(
    model: &Model,
    mode: (usize, usize),
    horizon: f64,
    step_counts: &[usize],
    g: impl Fn(f64) -> f64 + Copy,
    dg: impl Fn(f64) -> f64 + Copy,
) -> Result<ConvergenceTable> {
    let basis = model.basis();
    let k = mode_index(basis, mode)?;
    let mut errors = Vec::new();
    let mut dts = Vec::new();
    for &n_steps in step_counts {
        let dt = horizon / n_steps as f64;
        let forcing = manufactured_forcing(model, mode, g, dg, dt, n_steps)?;
        let mut y0 = Field::zeros(basis);
        y0.coeffs_mut()[k] = g(0.0);
        let traj = model.integrate_state(&y0, &forcing)?;
        let err = (0..=n_steps)
            .map(|n| {
                let mut d = traj.node(n).to_vec();
                d[k] -= g(n as f64 * dt);
                norm_sq_coeffs(basis, &d, NormKind::V).sqrt()
            })
            .fold(0.0, f64::max);
        errors.push(err);
        dts.push(dt);
    }
    let orders = errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
    Ok(ConvergenceTable {
        steps: step_counts.to_vec(),
        dts,
        errors,
        orders,
    })
}

/// Largest defects of the basis contract, each measured by grid quadrature or
/// point evaluation rather than from the closed forms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisInvariants {
    pub max_divergence: f64,
    pub max_boundary_trace: f64,
    pub max_v_gram_defect: f64,
    pub max_mu_defect: f64,
    pub parseval_defect: f64,
}

pub fn basis_invariants(basis: &SpectralBasis, probe: &Field) -> Result<BasisInvariants> {
    let n = basis.n_modes();
    let alpha1 = basis.alpha1();
    let unit = |k: usize| {
        let mut c = vec![0.0; n];
        c[k] = 1.0;
        c
    };
    let mut max_divergence: f64 = 0.0;
    let mut max_boundary_trace: f64 = 0.0;
    let pi = std::f64::consts::PI;
    let samples = 17;
    let mut fields = Vec::with_capacity(n);
    for k in 0..n {
        let c = unit(k);
        let f = Field::from_coeffs(basis, c.clone())?;
        for d in basis.divergence(&f)? {
            max_divergence = max_divergence.max(d.abs());
        }
        for i in 0..samples {
            let s = pi * (i as f64 + 0.5) / samples as f64;
            // (point, normal index): x = 0, pi and y = 0, pi.
            for (x, y, normal) in [(0.0, s, 0), (pi, s, 0), (s, 0.0, 1), (s, pi, 1)] {
                let (u, g) = basis.eval_point(&c, x, y);
                let shear = 0.5 * (g[0][1] + g[1][0]);
                max_boundary_trace = max_boundary_trace.max(u[normal].abs()).max(shear.abs());
            }
        }
        let u = basis.velocity(&c);
        let grad = basis.gradient(&c);
        let lap = [
            add(&basis.synth(&c, 0, 2, 0), &basis.synth(&c, 0, 0, 2)),
            add(&basis.synth(&c, 1, 2, 0), &basis.synth(&c, 1, 0, 2)),
        ];
        fields.push((u, grad, lap));
    }
    // Gram matrices of (u, z)_V = (u, z) + 2 alpha1 (Du, Dz) and of (v(u), v(z)).
    let mut max_v_gram_defect: f64 = 0.0;
    let mut max_mu_defect: f64 = 0.0;
    for j in 0..n {
        for k in j..n {
            let (uj, gj, lj) = &fields[j];
            let (uk, gk, lk) = &fields[k];
            let l2 = basis.integrate(&dot2(&uj.u, &uk.u));
            let mut dd = vec![0.0; basis.grid_len()];
            for a in 0..2 {
                for b in 0..2 {
                    for (p, i) in dd.iter_mut().zip(0..) {
                        let dja = 0.5 * (gj.t[a][b][i] + gj.t[b][a][i]);
                        let dka = 0.5 * (gk.t[a][b][i] + gk.t[b][a][i]);
                        *p += dja * dka;
                    }
                }
            }
            let v = l2 + 2.0 * alpha1 * basis.integrate(&dd);
            let expected = if j == k { 1.0 } else { 0.0 };
            max_v_gram_defect = max_v_gram_defect.max((v - expected).abs());
            if j == k {
                let vj: Vec<Vec<f64>> = (0..2)
                    .map(|a| uj.u[a].iter().zip(&lj[a]).map(|(x, l)| x - alpha1 * l).collect())
                    .collect();
                let vk: Vec<Vec<f64>> = (0..2)
                    .map(|a| uk.u[a].iter().zip(&lk[a]).map(|(x, l)| x - alpha1 * l).collect())
                    .collect();
                let w = v + basis.integrate(&dot2(&vj, &vk));
                let mu = basis.mu()[k];
                max_mu_defect = max_mu_defect.max((w / v - mu).abs() / mu);
            }
        }
    }
    let grid = basis.to_grid(probe)?;
    let quad = basis.integrate(&dot2(&grid.u, &grid.u));
    let coeff = norm_sq_coeffs(basis, probe.coeffs(), NormKind::L2);
    let parseval_defect = if coeff > 0.0 { (quad - coeff).abs() / coeff } else { quad.abs() };
    Ok(BasisInvariants {
        max_divergence,
        max_boundary_trace,
        max_v_gram_defect,
        max_mu_defect,
        parseval_defect,
    })
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn dot2<A: AsRef<[f64]>>(a: &[A], b: &[A]) -> Vec<f64> {
    let (a0, a1, b0, b1) = (a[0].as_ref(), a[1].as_ref(), b[0].as_ref(), b[1].as_ref());
    (0..a0.len()).map(|i| a0[i] * b0[i] + a1[i] * b1[i]).collect()
}

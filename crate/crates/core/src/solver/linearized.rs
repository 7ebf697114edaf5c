use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{linearized_action, norm_sq_coeffs, Field, FrozenState, NormKind};
use crate::trajectory::{Trajectory, TrajectoryKind};

use super::Model;

/// Outcome of a Gateaux (Taylor) test of the control-to-state map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaylorReport {
    pub rhos: Vec<f64>,
    /// `sup_t ||(y_rho - y) / rho - z||_V` for each `rho`.
    pub residuals: Vec<f64>,
    /// Log-log slope between consecutive `rho`; `None` where a residual is zero.
    pub slopes: Vec<Option<f64>>,
    /// Least-squares log-log slope over all positive residuals.
    pub fitted_slope: Option<f64>,
}

impl Model {
    /// Derivative `z` of the state along `psi`, frozen around `state`; `z(0) = 0`.
    pub fn solve_linearized(&self, state: &Trajectory, psi: &Trajectory) -> Result<Trajectory> {
        state.check_basis(&self.basis)?;
        state.check_compatible(psi)?;
        let dt = state.dt();
        let mut nodes = Vec::with_capacity(state.n_steps() + 1);
        nodes.push(vec![0.0; self.basis.n_modes()]);
        for n in 0..state.n_steps() {
            let frozen = FrozenState::new(&self.basis, &state.midpoint(n));
            let forcing = self.pair_forcing(&psi.midpoint(n));
            let next = self.midpoint_step(&nodes[n], &forcing, dt, n, self.options.linear_tol, |mid| {
                linearized_action(&self.basis, &self.params, &frozen, mid)
            })?;
            nodes.push(next);
        }
        Trajectory::from_nodes(self.basis.key(), dt, TrajectoryKind::Linearized, nodes)
    }

    /// Compare finite differences of the state map against the linearized
    /// solve for each `rho` in `rhos` (positive, strictly decreasing).
    pub fn gateaux_taylor_test(
        &self,
        y0: &Field,
        control: &Trajectory,
        psi: &Trajectory,
        rhos: &[f64],
    ) -> Result<TaylorReport> {
        if rhos.is_empty()
            || rhos.iter().any(|r| !(*r > 0.0))
            || rhos.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(Error::InvalidArgument(format!(
                "step sizes must be positive and strictly decreasing, got {rhos:?}"
            )));
        }
        let y = self.integrate_state(y0, control)?;
        let z = self.solve_linearized(&y, psi)?;
        let mut residuals = Vec::with_capacity(rhos.len());
        for &rho in rhos {
            let y_rho = self.integrate_state(y0, &control.axpy(rho, psi)?)?;
            let r = (0..=y.n_steps())
                .map(|n| {
                    let d: Vec<f64> = y_rho
                        .node(n)
                        .iter()
                        .zip(y.node(n))
                        .zip(z.node(n))
                        .map(|((a, b), c)| (a - b) / rho - c)
                        .collect();
                    norm_sq_coeffs(&self.basis, &d, NormKind::V).sqrt()
                })
                .fold(0.0, f64::max);
            residuals.push(r);
        }
        let slopes = rhos
            .windows(2)
            .zip(residuals.windows(2))
            .map(|(p, r)| {
                (r[0] > 0.0 && r[1] > 0.0).then(|| (r[0] / r[1]).ln() / (p[0] / p[1]).ln())
            })
            .collect();
        Ok(TaylorReport {
            fitted_slope: loglog_slope(rhos, &residuals),
            rhos: rhos.to_vec(),
            residuals,
            slopes,
        })
    }
}

/// Least-squares slope of `ln r` against `ln rho` over the positive residuals.
pub(crate) fn loglog_slope(rhos: &[f64], residuals: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rhos
        .iter()
        .zip(residuals)
        .filter(|(_, r)| **r > 0.0)
        .map(|(p, r)| (p.ln(), r.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Some(sxy / sxx)
}

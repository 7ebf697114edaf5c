use serde::Serialize;

use crate::error::Result;
use crate::spectral::{a4_integral, norm_sq_coeffs, state_residual, strain_sq, Field, NormKind};
use crate::trajectory::{Trajectory, TrajectoryKind};

use super::Model;

/// Per-node diagnostics of a state trajectory.
///
/// Integrated quantities are cumulative sums over the intervals ending at each
/// node, evaluated at the interval midpoints exactly as the integrator sees
/// them, so the discrete energy balance closes up to the iteration tolerance:
/// `v_energy[n] + dissipation[n] + cubic_dissipation[n] = v_energy[0] + forcing_work[n]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub times: Vec<f64>,
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
    pub h3: Vec<f64>,
    /// `int |A(y)|^4` at each node.
    pub a4: Vec<f64>,
    /// `||y||_V^2` at each node.
    pub v_energy: Vec<f64>,
    /// `4 nu int_0^t ||D y||^2`.
    pub dissipation: Vec<f64>,
    /// `beta int_0^t int |A(y)|^4`.
    pub cubic_dissipation: Vec<f64>,
    /// `2 int_0^t (U, y)`.
    pub forcing_work: Vec<f64>,
    /// `sup_t ||y(t)||_H3`.
    pub gamma: f64,
}

impl EnergyReport {
    /// Right side minus left side of the energy inequality at each node.
    pub fn slack(&self) -> Vec<f64> {
        (0..self.times.len())
            .map(|n| {
                self.v_energy[0] + self.forcing_work[n]
                    - self.v_energy[n]
                    - self.dissipation[n]
                    - self.cubic_dissipation[n]
            })
            .collect()
    }

    /// Magnitude the slack is measured against.
    pub fn scale(&self) -> f64 {
        let last = self.times.len() - 1;
        let peak = self.v_energy.iter().cloned().fold(0.0, f64::max);
        peak + self.dissipation[last] + self.cubic_dissipation[last] + self.forcing_work[last].abs()
    }

    /// Smallest slack after the initial node divided by [`EnergyReport::scale`];
    /// zero for a zero or single-node trajectory.
    pub fn worst_relative_slack(&self) -> f64 {
        let scale = self.scale();
        let slack = self.slack();
        if slack.len() < 2 {
            return 0.0;
        }
        let worst = slack[1..].iter().cloned().fold(f64::INFINITY, f64::min);
        if scale > 0.0 {
            worst / scale
        } else {
            worst
        }
    }
}

impl Model {
    fn cubic_sign(&self) -> f64 {
        if self.options.corrupt_cubic_sign {
            -1.0
        } else {
            1.0
        }
    }

    fn state_step_raw(&self, y: &[f64], u_half: &[f64], dt: f64, step: usize) -> Result<Vec<f64>> {
        let forcing = self.pair_forcing(u_half);
        let sign = self.cubic_sign();
        self.midpoint_step(y, &forcing, dt, step, self.options.tol, |mid| {
            state_residual(&self.basis, &self.params, mid, sign)
        })
    }

    /// Advance the state by one step of size `dt` under the interval-averaged
    /// control `u_half`.
    pub fn step_state(&self, y_n: &Field, u_half: &Field, dt: f64) -> Result<Field> {
        y_n.check_basis(&self.basis)?;
        u_half.check_basis(&self.basis)?;
        let next = self.state_step_raw(y_n.coeffs(), u_half.coeffs(), dt, 0)?;
        Field::from_coeffs(&self.basis, next)
    }

    /// Integrate from `y0` over the time grid of `control`.
    pub fn solve_state(&self, y0: &Field, control: &Trajectory) -> Result<(Trajectory, EnergyReport)> {
        let traj = self.integrate_state(y0, control)?;
        let report = self.energy_report(&traj, Some(control))?;
        Ok((traj, report))
    }

    /// [`Model::solve_state`] without the diagnostics.
    pub fn integrate_state(&self, y0: &Field, control: &Trajectory) -> Result<Trajectory> {
        y0.check_basis(&self.basis)?;
        control.check_basis(&self.basis)?;
        let dt = control.dt();
        let mut nodes = Vec::with_capacity(control.n_steps() + 1);
        nodes.push(y0.coeffs().to_vec());
        for n in 0..control.n_steps() {
            let next = self.state_step_raw(&nodes[n], &control.midpoint(n), dt, n)?;
            nodes.push(next);
        }
        Trajectory::from_nodes(self.basis.key(), dt, TrajectoryKind::State, nodes)
    }

    /// Diagnostics of a stored state trajectory; `control = None` means `U = 0`.
    pub fn energy_report(&self, traj: &Trajectory, control: Option<&Trajectory>) -> Result<EnergyReport> {
        traj.check_basis(&self.basis)?;
        if let Some(u) = control {
            traj.check_compatible(u)?;
        }
        let basis = &self.basis;
        let params = &self.params;
        let a4_of = |c: &[f64]| a4_integral(basis, c);
        let mut r = EnergyReport {
            times: traj.times(),
            h1: vec![],
            h2: vec![],
            h3: vec![],
            a4: vec![],
            v_energy: vec![],
            dissipation: vec![0.0],
            cubic_dissipation: vec![0.0],
            forcing_work: vec![0.0],
            gamma: 0.0,
        };
        for c in traj.nodes() {
            r.h1.push(norm_sq_coeffs(basis, c, NormKind::H1).sqrt());
            r.h2.push(norm_sq_coeffs(basis, c, NormKind::H2).sqrt());
            r.h3.push(norm_sq_coeffs(basis, c, NormKind::H3).sqrt());
            r.a4.push(a4_of(c));
            r.v_energy.push(norm_sq_coeffs(basis, c, NormKind::V));
        }
        let dt = traj.dt();
        for n in 0..traj.n_steps() {
            let mid = traj.midpoint(n);
            let visc = 4.0 * params.nu() * strain_sq(basis, &mid);
            let cubic = params.beta() * a4_of(&mid);
            let work = match control {
                Some(u) => {
                    let f = self.pair_forcing(&u.midpoint(n));
                    2.0 * f.iter().zip(&mid).map(|(a, b)| a * b).sum::<f64>()
                }
                None => 0.0,
            };
            r.dissipation.push(r.dissipation[n] + dt * visc);
            r.cubic_dissipation.push(r.cubic_dissipation[n] + dt * cubic);
            r.forcing_work.push(r.forcing_work[n] + dt * work);
        }
        r.gamma = r.h3.iter().cloned().fold(0.0, f64::max);
        Ok(r)
    }
}

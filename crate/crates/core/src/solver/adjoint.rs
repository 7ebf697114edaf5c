use serde::Serialize;

use crate::error::Result;
use crate::spectral::{adjoint_action, FrozenState};
use crate::trajectory::{l2_pairing, Trajectory, TrajectoryKind};

use super::Model;

/// Both sides of `int (psi, p) dt = int (f, z) dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / max(|lhs|, |rhs|)`, zero when both sides vanish.
    pub gap: f64,
}

impl Model {
    /// Adjoint state driven by `f` around `state`, with `p(T) = 0`.
    ///
    /// Integrated forward in the reversed time `q(s) = p(T - s)` with the
    /// same midpoint scheme as the state, using the transposed frozen operator.
    pub fn solve_adjoint(&self, state: &Trajectory, f: &Trajectory) -> Result<Trajectory> {
        state.check_basis(&self.basis)?;
        state.check_compatible(f)?;
        let dt = state.dt();
        let n_steps = state.n_steps();
        let mut reversed = Vec::with_capacity(n_steps + 1);
        reversed.push(vec![0.0; self.basis.n_modes()]);
        for k in 0..n_steps {
            let n = n_steps - 1 - k;
            let frozen = FrozenState::new(&self.basis, &state.midpoint(n));
            let forcing = self.pair_forcing(&f.midpoint(n));
            let next = self.midpoint_step(&reversed[k], &forcing, dt, n, self.options.linear_tol, |mid| {
                adjoint_action(&self.basis, &self.params, &frozen, mid)
            })?;
            reversed.push(next);
        }
        reversed.reverse();
        Trajectory::from_nodes(self.basis.key(), dt, TrajectoryKind::Adjoint, reversed)
    }

    /// Solve `z` from `psi` and `p` from `f` around `state` and compare the
    /// two time-space pairings.
    pub fn check_duality(&self, state: &Trajectory, psi: &Trajectory, f: &Trajectory) -> Result<DualityCheck> {
        state.check_compatible(psi)?;
        state.check_compatible(f)?;
        let z = self.solve_linearized(state, psi)?;
        let p = self.solve_adjoint(state, f)?;
        let lhs = l2_pairing(&self.basis, psi, &p)?;
        let rhs = l2_pairing(&self.basis, f, &z)?;
        let denom = lhs.abs().max(rhs.abs());
        let gap = if denom > 0.0 { (lhs - rhs).abs() / denom } else { 0.0 };
        Ok(DualityCheck { lhs, rhs, gap })
    }
}

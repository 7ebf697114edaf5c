use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{l2_dot, norm_sq_coeffs, BasisKey, Field, NormKind, SpectralBasis};

/// What a [`Trajectory`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrajectoryKind {
    State,
    Linearized,
    Adjoint,
    Control,
    Target,
}

impl TrajectoryKind {
    pub const ALL: [TrajectoryKind; 5] = [
        TrajectoryKind::State,
        TrajectoryKind::Linearized,
        TrajectoryKind::Adjoint,
        TrajectoryKind::Control,
        TrajectoryKind::Target,
    ];

    pub fn tag(self) -> u32 {
        self as u32
    }

    pub fn from_tag(tag: u32) -> Option<Self> {
        Self::ALL.get(tag as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            TrajectoryKind::State => "state",
            TrajectoryKind::Linearized => "linearized",
            TrajectoryKind::Adjoint => "adjoint",
            TrajectoryKind::Control => "control",
            TrajectoryKind::Target => "target",
        }
    }
}

impl fmt::Display for TrajectoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TrajectoryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

/// Fields at the nodes `t_n = n dt`, `n = 0..=n_steps`, all in one basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    key: BasisKey,
    dt: f64,
    kind: TrajectoryKind,
    nodes: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn zeros(basis: &SpectralBasis, dt: f64, n_steps: usize, kind: TrajectoryKind) -> Self {
        Self::constant(&Field::zeros(basis), dt, n_steps, kind)
    }

    /// The same field at every node.
    pub fn constant(field: &Field, dt: f64, n_steps: usize, kind: TrajectoryKind) -> Self {
        Self {
            key: field.key(),
            dt,
            kind,
            nodes: vec![field.coeffs().to_vec(); n_steps + 1],
        }
    }

    /// Build from raw node coefficients. Rejects non-positive `dt`, an empty
    /// node list and rows of the wrong length.
    pub fn from_nodes(
        key: BasisKey,
        dt: f64,
        kind: TrajectoryKind,
        nodes: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::GridMismatch(format!("time step {dt} must be positive")));
        }
        if nodes.is_empty() {
            return Err(Error::GridMismatch("trajectory needs at least one node".into()));
        }
        if let Some(bad) = nodes.iter().position(|r| r.len() != key.n_modes()) {
            return Err(Error::ShapeMismatch(format!(
                "node {bad} has {} coefficients, basis has {}",
                nodes[bad].len(),
                key.n_modes()
            )));
        }
        Ok(Self { key, dt, kind, nodes })
    }

    /// Sample `f(t)` at every node.
    pub fn from_fn(
        basis: &SpectralBasis,
        dt: f64,
        n_steps: usize,
        kind: TrajectoryKind,
        mut f: impl FnMut(f64) -> Vec<f64>,
    ) -> Result<Self> {
        let nodes = (0..=n_steps).map(|n| f(n as f64 * dt)).collect();
        Self::from_nodes(basis.key(), dt, kind, nodes)
    }

    pub fn key(&self) -> BasisKey {
        self.key
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn kind(&self) -> TrajectoryKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: TrajectoryKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn n_steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.n_steps() as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.nodes.len()).map(|n| n as f64 * self.dt).collect()
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    pub fn nodes_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.nodes
    }

    pub fn node(&self, n: usize) -> &[f64] {
        &self.nodes[n]
    }

    pub fn field(&self, n: usize) -> Field {
        Field::from_key(self.key, self.nodes[n].clone()).expect("row length checked on construction")
    }

    /// Average of the two nodes bounding interval `n`.
    pub fn midpoint(&self, n: usize) -> Vec<f64> {
        self.nodes[n]
            .iter()
            .zip(&self.nodes[n + 1])
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    pub(crate) fn check_basis(&self, basis: &SpectralBasis) -> Result<()> {
        if self.key != basis.key() {
            return Err(Error::GridMismatch(format!(
                "{} trajectory lives in basis {:?}, expected {:?}",
                self.kind,
                self.key,
                basis.key()
            )));
        }
        Ok(())
    }

    /// Same basis, same step and same node count.
    pub fn check_compatible(&self, other: &Trajectory) -> Result<()> {
        if self.key != other.key {
            return Err(Error::GridMismatch(format!(
                "{} and {} trajectories use different bases: {:?} vs {:?}",
                self.kind, other.kind, self.key, other.key
            )));
        }
        if self.nodes.len() != other.nodes.len() || self.dt != other.dt {
            return Err(Error::GridMismatch(format!(
                "time grids differ: {} steps of {} vs {} steps of {}",
                self.n_steps(),
                self.dt,
                other.n_steps(),
                other.dt
            )));
        }
        Ok(())
    }

    pub fn scaled(&self, a: f64) -> Trajectory {
        let mut out = self.clone();
        out.nodes
            .iter_mut()
            .for_each(|r| r.iter_mut().for_each(|c| *c *= a));
        out
    }

    /// `self + a * other`, keeping the kind of `self`.
    pub fn axpy(&self, a: f64, other: &Trajectory) -> Result<Trajectory> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (r, o) in out.nodes.iter_mut().zip(&other.nodes) {
            for (c, d) in r.iter_mut().zip(o) {
                *c += a * d;
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.nodes.iter().flatten().all(|&c| c == 0.0)
    }

    /// Largest per-node value of the given norm.
    pub fn sup_norm(&self, basis: &SpectralBasis, kind: NormKind) -> Result<f64> {
        self.check_basis(basis)?;
        Ok(self
            .nodes
            .iter()
            .map(|r| norm_sq_coeffs(basis, r, kind).sqrt())
            .fold(0.0, f64::max))
    }
}

/// `sum_n dt (a_bar_n, b_bar_n)` with `_bar_n` the interval midpoint: the
/// time pairing the integrator is exactly consistent with.
pub fn l2_pairing(basis: &SpectralBasis, a: &Trajectory, b: &Trajectory) -> Result<f64> {
    a.check_basis(basis)?;
    a.check_compatible(b)?;
    Ok((0..a.n_steps())
        .map(|n| a.dt * l2_dot(basis, &a.midpoint(n), &b.midpoint(n)))
        .sum())
}

/// `sum_n w_n (a_n, b_n)_X` with trapezoid weights `w_n`, `X` one of the
/// coefficient-multiplier norms.
pub fn trapezoid_pairing(
    basis: &SpectralBasis,
    a: &Trajectory,
    b: &Trajectory,
    space: NormKind,
) -> Result<f64> {
    a.check_basis(basis)?;
    a.check_compatible(b)?;
    let n_steps = a.n_steps();
    Ok(a.nodes
        .iter()
        .zip(&b.nodes)
        .enumerate()
        .map(|(n, (x, y))| trapezoid_weight(n, n_steps, a.dt) * inner_coeffs(basis, x, y, space))
        .sum())
}

fn inner_coeffs(basis: &SpectralBasis, a: &[f64], b: &[f64], space: NormKind) -> f64 {
    // Polarization keeps one definition of every multiplier norm.
    let plus: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    let minus: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    0.25 * (norm_sq_coeffs(basis, &plus, space) - norm_sq_coeffs(basis, &minus, space))
}

/// Trapezoid weights of the node grid.
pub(crate) fn trapezoid_weight(n: usize, n_steps: usize, dt: f64) -> f64 {
    if n == 0 || n == n_steps {
        0.5 * dt
    } else {
        dt
    }
}

/// `||U||_{L^2(0,T; X)}` by the trapezoid rule over the nodes.
pub fn time_norm(basis: &SpectralBasis, u: &Trajectory, space: NormKind) -> Result<f64> {
    u.check_basis(basis)?;
    let n_steps = u.n_steps();
    Ok(u.nodes
        .iter()
        .enumerate()
        .map(|(n, r)| trapezoid_weight(n, n_steps, u.dt) * norm_sq_coeffs(basis, r, space))
        .sum::<f64>()
        .sqrt())
}

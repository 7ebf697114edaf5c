//! Seeded random fields and trajectories for tests, multi-start runs and
//! variational-inequality sampling.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::spectral::{Field, SpectralBasis};
use crate::trajectory::{Trajectory, TrajectoryKind};

/// The generator used throughout; fixed so seeds reproduce across platforms.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random coefficients with amplitude decaying like `1 / lambda`, scaled so the
/// largest coefficient is about `amplitude`.
pub fn random_field(basis: &SpectralBasis, rng: &mut impl Rng, amplitude: f64) -> Field {
    let lam0 = basis.lambda()[0];
    let coeffs = basis
        .lambda()
        .iter()
        .map(|l| amplitude * (lam0 / l) * rng.gen_range(-1.0..1.0))
        .collect();
    Field::from_coeffs(basis, coeffs).expect("length matches basis")
}

/// `a + b cos(pi t / T) + c sin(2 pi t / T)` per mode, with `a, b, c` drawn
/// like [`random_field`]. Smooth in time, so the node values carry no
/// grid-scale oscillation.
pub fn random_smooth_trajectory(
    basis: &SpectralBasis,
    rng: &mut impl Rng,
    amplitude: f64,
    dt: f64,
    n_steps: usize,
    kind: TrajectoryKind,
) -> Trajectory {
    let a = random_field(basis, rng, amplitude);
    let b = random_field(basis, rng, amplitude);
    let c = random_field(basis, rng, amplitude);
    let horizon = dt * n_steps as f64;
    let w = std::f64::consts::PI / horizon;
    Trajectory::from_fn(basis, dt, n_steps, kind, |t| {
        let (cb, sc) = ((w * t).cos(), (2.0 * w * t).sin());
        (0..basis.n_modes())
            .map(|k| a.coeffs()[k] + cb * b.coeffs()[k] + sc * c.coeffs()[k])
            .collect()
    })
    .expect("positive step")
}

/// Only the `(m, n)` mode, with time profile `profile(t)`.
pub fn single_mode_trajectory(
    basis: &SpectralBasis,
    m: usize,
    n: usize,
    dt: f64,
    n_steps: usize,
    kind: TrajectoryKind,
    profile: impl Fn(f64) -> f64,
) -> crate::Result<Trajectory> {
    let unit = Field::single_mode(basis, m, n, 1.0)?;
    Trajectory::from_fn(basis, dt, n_steps, kind, |t| unit.scaled(profile(t)).into_coeffs())
}

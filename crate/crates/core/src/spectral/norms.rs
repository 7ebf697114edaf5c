use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::basis::SpectralBasis;
use super::field::Field;

/// Norms available through [`norm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormKind {
    L2,
    V,
    W,
    H1,
    H2,
    H3,
    W14,
}

impl NormKind {
    pub const ALL: [NormKind; 7] = [
        NormKind::L2,
        NormKind::V,
        NormKind::W,
        NormKind::H1,
        NormKind::H2,
        NormKind::H3,
        NormKind::W14,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NormKind::L2 => "L2",
            NormKind::V => "V",
            NormKind::W => "W",
            NormKind::H1 => "H1",
            NormKind::H2 => "H2",
            NormKind::H3 => "H3",
            NormKind::W14 => "W14",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NormKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

/// Squared norm from the mode multipliers, for every kind except `W14`.
pub(crate) fn norm_sq_coeffs(basis: &SpectralBasis, coeffs: &[f64], kind: NormKind) -> f64 {
    let lam = basis.lambda();
    let mass = basis.mass();
    let sobolev = |order: i32| -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * c * mass[k] * (0..=order).map(|j| lam[k].powi(j)).sum::<f64>())
            .sum()
    };
    match kind {
        NormKind::L2 => sobolev(0),
        NormKind::V => coeffs.iter().map(|c| c * c).sum(),
        NormKind::W => coeffs.iter().zip(basis.mu()).map(|(c, m)| m * c * c).sum(),
        NormKind::H1 => sobolev(1),
        NormKind::H2 => sobolev(2),
        NormKind::H3 => sobolev(3),
        NormKind::W14 => w14_fourth(basis, coeffs).sqrt(),
    }
}

/// `int |y|^4 + int |grad y|^4` by grid quadrature, with pointwise Euclidean
/// and Frobenius magnitudes.
pub(crate) fn w14_fourth(basis: &SpectralBasis, coeffs: &[f64]) -> f64 {
    let u = basis.velocity(coeffs);
    let g = basis.gradient(coeffs);
    let gsq = g.frobenius_sq();
    let vals: Vec<f64> = (0..u.len())
        .map(|i| {
            let usq = u.u[0][i] * u.u[0][i] + u.u[1][i] * u.u[1][i];
            usq * usq + gsq[i] * gsq[i]
        })
        .collect();
    basis.integrate(&vals)
}

/// Norm of `y` of the requested kind.
pub fn norm(basis: &SpectralBasis, y: &Field, kind: NormKind) -> Result<f64> {
    y.check_basis(basis)?;
    Ok(match kind {
        NormKind::W14 => w14_fourth(basis, y.coeffs()).powf(0.25),
        _ => norm_sq_coeffs(basis, y.coeffs(), kind).sqrt(),
    })
}

/// `(y, z)` in `L^2`.
pub fn l2_inner(basis: &SpectralBasis, y: &Field, z: &Field) -> Result<f64> {
    y.check_basis(basis)?;
    y.check_same(z)?;
    Ok(l2_dot(basis, y.coeffs(), z.coeffs()))
}

pub(crate) fn l2_dot(basis: &SpectralBasis, a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).zip(basis.mass()).map(|((x, y), w)| x * y * w).sum()
}

/// `|| D y ||_2^2` with `D y` the symmetric part of the gradient.
pub(crate) fn strain_sq(basis: &SpectralBasis, coeffs: &[f64]) -> f64 {
    0.5 * coeffs
        .iter()
        .zip(basis.lambda())
        .zip(basis.mass())
        .map(|((c, l), w)| c * c * l * w)
        .sum::<f64>()
}

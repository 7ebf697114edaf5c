use crate::error::{Error, Result};

use super::basis::{BasisKey, SpectralBasis};

/// A divergence-free velocity field: real coefficients on the V-orthonormal
/// modes of one [`SpectralBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    key: BasisKey,
    coeffs: Vec<f64>,
}

impl Field {
    pub fn zeros(basis: &SpectralBasis) -> Self {
        Self {
            key: basis.key(),
            coeffs: vec![0.0; basis.n_modes()],
        }
    }

    pub fn from_coeffs(basis: &SpectralBasis, coeffs: Vec<f64>) -> Result<Self> {
        Self::from_key(basis.key(), coeffs)
    }

    pub fn from_key(key: BasisKey, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != key.n_modes() {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for a basis with {} modes",
                coeffs.len(),
                key.n_modes()
            )));
        }
        Ok(Self { key, coeffs })
    }

    /// `amplitude * h_(m,n)`.
    pub fn single_mode(basis: &SpectralBasis, m: usize, n: usize, amplitude: f64) -> Result<Self> {
        let k = basis.index_of(m, n).ok_or_else(|| {
            Error::ShapeMismatch(format!(
                "mode ({m}, {n}) outside 1..={}",
                basis.max_mode()
            ))
        })?;
        let mut f = Self::zeros(basis);
        f.coeffs[k] = amplitude;
        Ok(f)
    }

    pub fn key(&self) -> BasisKey {
        self.key
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub(crate) fn check_basis(&self, basis: &SpectralBasis) -> Result<()> {
        if self.key != basis.key() {
            return Err(Error::ShapeMismatch(format!(
                "field lives in basis {:?}, expected {:?}",
                self.key,
                basis.key()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_same(&self, other: &Field) -> Result<()> {
        if self.key != other.key {
            return Err(Error::ShapeMismatch(format!(
                "fields live in different bases: {:?} vs {:?}",
                self.key, other.key
            )));
        }
        Ok(())
    }

    pub fn scaled(&self, a: f64) -> Field {
        Field {
            key: self.key,
            coeffs: self.coeffs.iter().map(|c| a * c).collect(),
        }
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &Field) -> Result<Field> {
        self.check_same(other)?;
        Ok(Field {
            key: self.key,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(x, y)| x + a * y)
                .collect(),
        })
    }
}

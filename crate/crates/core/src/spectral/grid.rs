use crate::error::{Error, Result};

use super::basis::SpectralBasis;
use super::field::Field;

/// Two velocity components sampled on the collocation grid, row-major with the
/// `x` index outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct GridVector {
    pub u: [Vec<f64>; 2],
}

impl GridVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            u: [vec![0.0; len], vec![0.0; len]],
        }
    }

    pub fn len(&self) -> usize {
        self.u[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.u[0].is_empty()
    }
}

/// A 2x2 tensor field on the collocation grid; `t[i][j]` holds entry `(i, j)`.
///
/// The constitutive tensors `A(y)`, `S(y)` and `N(y)` are symmetric; general
/// tensors appear in the weak forms of the linearized and adjoint equations.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorGridField {
    pub t: [[Vec<f64>; 2]; 2],
}

impl TensorGridField {
    pub fn zeros(len: usize) -> Self {
        Self {
            t: [
                [vec![0.0; len], vec![0.0; len]],
                [vec![0.0; len], vec![0.0; len]],
            ],
        }
    }

    pub fn len(&self) -> usize {
        self.t[0][0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.t[0][0].is_empty()
    }

    /// Largest pointwise `|t12 - t21|`.
    pub fn symmetry_defect(&self) -> f64 {
        self.t[0][1]
            .iter()
            .zip(&self.t[1][0])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Pointwise Frobenius product `T : R`.
    pub fn contract(&self, other: &TensorGridField) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for i in 0..2 {
            for j in 0..2 {
                for ((o, a), b) in out.iter_mut().zip(&self.t[i][j]).zip(&other.t[i][j]) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Pointwise `|T|^2`.
    pub fn frobenius_sq(&self) -> Vec<f64> {
        self.contract(self)
    }

    /// Pointwise matrix product `T R`.
    pub fn matmul(&self, other: &TensorGridField) -> TensorGridField {
        let mut out = TensorGridField::zeros(self.len());
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for ((o, a), b) in out.t[i][j]
                        .iter_mut()
                        .zip(&self.t[i][k])
                        .zip(&other.t[k][j])
                    {
                        *o += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> TensorGridField {
        TensorGridField {
            t: [
                [self.t[0][0].clone(), self.t[1][0].clone()],
                [self.t[0][1].clone(), self.t[1][1].clone()],
            ],
        }
    }

    /// `self += a * s * other`, with `s` a pointwise scalar weight.
    pub fn add_weighted(&mut self, a: f64, s: Option<&[f64]>, other: &TensorGridField) {
        for i in 0..2 {
            for j in 0..2 {
                let dst = &mut self.t[i][j];
                match s {
                    Some(w) => {
                        for ((d, o), w) in dst.iter_mut().zip(&other.t[i][j]).zip(w) {
                            *d += a * w * o;
                        }
                    }
                    None => {
                        for (d, o) in dst.iter_mut().zip(&other.t[i][j]) {
                            *d += a * o;
                        }
                    }
                }
            }
        }
    }

    pub fn scale(&mut self, a: f64) {
        for row in &mut self.t {
            for e in row {
                e.iter_mut().for_each(|v| *v *= a);
            }
        }
    }
}

impl SpectralBasis {
    fn check_grid_len(&self, len: usize) -> Result<()> {
        if len != self.grid_len() {
            return Err(Error::ShapeMismatch(format!(
                "grid has {len} points, basis expects {}",
                self.grid_len()
            )));
        }
        Ok(())
    }

    /// Evaluate a field on the collocation grid.
    pub fn to_grid(&self, field: &Field) -> Result<GridVector> {
        field.check_basis(self)?;
        Ok(self.velocity(field.coeffs()))
    }

    pub(crate) fn velocity(&self, coeffs: &[f64]) -> GridVector {
        GridVector {
            u: [self.synth(coeffs, 0, 0, 0), self.synth(coeffs, 1, 0, 0)],
        }
    }

    /// `grad[i][j] = d_j y_i`.
    pub(crate) fn gradient(&self, coeffs: &[f64]) -> TensorGridField {
        TensorGridField {
            t: [
                [self.synth(coeffs, 0, 1, 0), self.synth(coeffs, 0, 0, 1)],
                [self.synth(coeffs, 1, 1, 0), self.synth(coeffs, 1, 0, 1)],
            ],
        }
    }

    /// `(F, h_k)` for every mode, by grid quadrature.
    pub(crate) fn pair_vector(&self, f: &GridVector) -> Vec<f64> {
        let mut out = self.test(&f.u[0], 0, 0, 0);
        for (o, b) in out.iter_mut().zip(self.test(&f.u[1], 1, 0, 0)) {
            *o += b;
        }
        out
    }

    /// `(T, grad h_k) = sum_ij (T_ij, d_j (h_k)_i)` for every mode.
    pub(crate) fn pair_tensor(&self, t: &TensorGridField) -> Vec<f64> {
        let mut out = vec![0.0; self.n_modes()];
        for i in 0..2 {
            for j in 0..2 {
                let (dx, dy) = if j == 0 { (1, 0) } else { (0, 1) };
                for (o, v) in out.iter_mut().zip(self.test(&t.t[i][j], i, dx, dy)) {
                    *o += v;
                }
            }
        }
        out
    }

    /// Coefficients of the `L^2`-orthogonal projection of grid data onto the
    /// span: Leray projection followed by truncation to `|m|, |n| <= M`.
    pub fn to_coeffs(&self, grid: &GridVector) -> Result<Field> {
        self.check_grid_len(grid.u[0].len())?;
        self.check_grid_len(grid.u[1].len())?;
        let coeffs = self
            .pair_vector(grid)
            .iter()
            .zip(self.mass())
            .map(|(p, w)| p / w)
            .collect();
        Field::from_coeffs(self, coeffs)
    }

    /// Project grid data onto the resolved div-free modes and evaluate back.
    pub fn dealias(&self, grid: &GridVector) -> Result<GridVector> {
        let f = self.to_coeffs(grid)?;
        self.to_grid(&f)
    }

    /// Grid quadrature of a scalar field.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() * self.cell_weight()
    }

    /// Divergence of a field on the grid.
    pub fn divergence(&self, field: &Field) -> Result<Vec<f64>> {
        field.check_basis(self)?;
        let c = field.coeffs();
        let a = self.synth(c, 0, 1, 0);
        let b = self.synth(c, 1, 0, 1);
        Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect())
    }
}

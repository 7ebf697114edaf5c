//! Differential and constitutive operators, evaluated pseudo-spectrally.
//!
//! Every nonlinear term is formed pointwise on the collocation grid and then
//! paired against the basis (or its gradient) by quadrature, so the Galerkin
//! equations are assembled directly from their weak forms. No term is
//! integrated by parts on the discrete side.

use crate::error::Result;

use super::basis::SpectralBasis;
use super::field::Field;
use super::grid::{GridVector, TensorGridField};
use super::params::ModelParams;

/// `(u . grad) w`, given `grad_w[i][j] = d_j w_i`.
pub(crate) fn advect(u: &GridVector, grad_w: &TensorGridField) -> GridVector {
    let mut out = GridVector::zeros(u.len());
    for i in 0..2 {
        for j in 0..2 {
            for ((o, a), g) in out.u[i].iter_mut().zip(&u.u[j]).zip(&grad_w.t[i][j]) {
                *o += a * g;
            }
        }
    }
    out
}

/// `sum_j w_j grad u_j`, the term paired by `b(phi, u, w)`.
pub(crate) fn transpose_advect(w: &GridVector, grad_u: &TensorGridField) -> GridVector {
    let mut out = GridVector::zeros(w.len());
    for i in 0..2 {
        for j in 0..2 {
            for ((o, a), g) in out.u[i].iter_mut().zip(&w.u[j]).zip(&grad_u.t[j][i]) {
                *o += a * g;
            }
        }
    }
    out
}

/// `T_ij = a_i b_j`.
pub(crate) fn outer(a: &GridVector, b: &GridVector) -> TensorGridField {
    let mut out = TensorGridField::zeros(a.len());
    for i in 0..2 {
        for j in 0..2 {
            out.t[i][j] = a.u[i].iter().zip(&b.u[j]).map(|(x, y)| x * y).collect();
        }
    }
    out
}

pub(crate) fn add_into(dst: &mut GridVector, a: f64, src: &GridVector) {
    for i in 0..2 {
        for (d, s) in dst.u[i].iter_mut().zip(&src.u[i]) {
            *d += a * s;
        }
    }
}

fn add_vec(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

/// `A = grad + grad^T`.
pub(crate) fn symmetric_rate(grad: &TensorGridField) -> TensorGridField {
    let mut a = grad.clone();
    a.add_weighted(1.0, None, &grad.transpose());
    a
}

/// Pointwise kinematic quantities of one field.
pub(crate) struct Kinematics {
    pub u: GridVector,
    pub grad: TensorGridField,
    pub v: GridVector,
    pub grad_v: TensorGridField,
    pub a: TensorGridField,
}

impl Kinematics {
    pub fn new(basis: &SpectralBasis, coeffs: &[f64]) -> Self {
        // v(h_k) = (1 + alpha1 lambda_k) h_k = h_k / mass_k.
        let vc: Vec<f64> = coeffs.iter().zip(basis.mass()).map(|(c, w)| c / w).collect();
        let grad = basis.gradient(coeffs);
        Self {
            u: basis.velocity(coeffs),
            a: symmetric_rate(&grad),
            grad,
            v: basis.velocity(&vc),
            grad_v: basis.gradient(&vc),
        }
    }
}

/// State-dependent coefficients frozen for the linearized and adjoint operators.
pub(crate) struct FrozenState {
    kin: Kinematics,
    a_sq: Vec<f64>,
}

impl FrozenState {
    pub fn new(basis: &SpectralBasis, coeffs: &[f64]) -> Self {
        let kin = Kinematics::new(basis, coeffs);
        let a_sq = kin.a.frobenius_sq();
        Self { kin, a_sq }
    }
}

/// `(alpha1 + alpha2)(A_y A_w + A_w A_y) + beta |A_y|^2 A_w + 2 beta (A_w : A_y) A_y`,
/// the symmetric-tensor part shared by the linearized and adjoint operators.
fn coupled_stress(params: &ModelParams, frozen: &FrozenState, a_w: &TensorGridField) -> TensorGridField {
    let ay = &frozen.kin.a;
    let mut t = ay.matmul(a_w);
    t.add_weighted(1.0, None, &a_w.matmul(ay));
    t.scale(params.alpha1() + params.alpha2());
    let beta = params.beta();
    if beta != 0.0 {
        t.add_weighted(beta, Some(&frozen.a_sq), a_w);
        let cross = a_w.contract(ay);
        t.add_weighted(2.0 * beta, Some(&cross), ay);
    }
    t
}

/// Nonlinear part of the linearized weak form, tested against every mode:
/// `b(y, v(z), h) + b(z, v(y), h) + b(h, y, v(z)) + b(h, z, v(y)) + (T(z), grad h)`.
pub(crate) fn linearized_action(
    basis: &SpectralBasis,
    params: &ModelParams,
    frozen: &FrozenState,
    z: &[f64],
) -> Vec<f64> {
    let y = &frozen.kin;
    let zk = Kinematics::new(basis, z);
    let mut f = advect(&y.u, &zk.grad_v);
    add_into(&mut f, 1.0, &advect(&zk.u, &y.grad_v));
    add_into(&mut f, 1.0, &transpose_advect(&zk.v, &y.grad));
    add_into(&mut f, 1.0, &transpose_advect(&y.v, &zk.grad));
    let t = coupled_stress(params, frozen, &zk.a);
    let mut out = basis.pair_vector(&f);
    add_vec(&mut out, &basis.pair_tensor(&t));
    out
}

/// Nonlinear part of the adjoint weak form, tested against every mode:
/// `-b(h, p, v(y)) + b(p, h, v(y)) + b(p, y, v(h)) - b(y, p, v(h)) + (T(p), grad h)`.
pub(crate) fn adjoint_action(
    basis: &SpectralBasis,
    params: &ModelParams,
    frozen: &FrozenState,
    p: &[f64],
) -> Vec<f64> {
    let y = &frozen.kin;
    let pk = Kinematics::new(basis, p);

    let mut f = transpose_advect(&y.v, &pk.grad);
    f.u.iter_mut().for_each(|c| c.iter_mut().for_each(|x| *x = -*x));

    let mut t = outer(&y.v, &pk.u);
    t.add_weighted(1.0, None, &coupled_stress(params, frozen, &pk.a));

    // Terms tested against v(h_k) = h_k / mass_k.
    let mut g = advect(&pk.u, &y.grad);
    add_into(&mut g, -1.0, &advect(&y.u, &pk.grad));

    let mut out = basis.pair_vector(&f);
    add_vec(&mut out, &basis.pair_tensor(&t));
    for ((o, gv), w) in out.iter_mut().zip(basis.pair_vector(&g)).zip(basis.mass()) {
        *o += gv / w;
    }
    out
}

/// `d_a d_b y_i` for all `i, a, b`.
fn hessian(basis: &SpectralBasis, coeffs: &[f64]) -> [[[Vec<f64>; 2]; 2]; 2] {
    let d = |i: usize, a: usize, b: usize| {
        let dx = (a == 0) as usize + (b == 0) as usize;
        basis.synth(coeffs, i, dx, 2 - dx)
    };
    let mut h: [[[Vec<f64>; 2]; 2]; 2] = Default::default();
    for (i, hi) in h.iter_mut().enumerate() {
        let xx = d(i, 0, 0);
        let xy = d(i, 0, 1);
        let yy = d(i, 1, 1);
        *hi = [[xx, xy.clone()], [xy, yy]];
    }
    h
}

/// `S(y) = beta |A|^2 A`.
fn cubic_stress(params: &ModelParams, a: &TensorGridField) -> TensorGridField {
    let mut s = TensorGridField::zeros(a.len());
    s.add_weighted(params.beta(), Some(&a.frobenius_sq()), a);
    s
}

/// `N(y) = alpha1 (y . grad A + grad y^T A + A grad y) + alpha2 A^2`.
fn elastic_stress(
    basis: &SpectralBasis,
    params: &ModelParams,
    coeffs: &[f64],
    kin: &Kinematics,
) -> TensorGridField {
    let a = &kin.a;
    let mut n = a.matmul(a);
    n.scale(params.alpha2());
    let alpha1 = params.alpha1();
    if alpha1 != 0.0 {
        let h = hessian(basis, coeffs);
        let mut conv = TensorGridField::zeros(a.len());
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    // d_k A_ij = d_k d_j y_i + d_k d_i y_j
                    for ((((c, u), p), q), _) in conv.t[i][j]
                        .iter_mut()
                        .zip(&kin.u.u[k])
                        .zip(&h[i][k][j])
                        .zip(&h[j][k][i])
                        .zip(0..)
                    {
                        *c += u * (p + q);
                    }
                }
            }
        }
        conv.add_weighted(1.0, None, &kin.grad.transpose().matmul(a));
        conv.add_weighted(1.0, None, &a.matmul(&kin.grad));
        n.add_weighted(alpha1, None, &conv);
    }
    n
}

/// Nonlinear state residual tested against every mode, in divergence form:
/// `b(y, y, h) + (N(y), grad h) + sign * (S(y), grad h)`.
///
/// `cubic_sign` is `1.0` for the physical equation; other values exist only to
/// check that diagnostics notice a corrupted cubic term.
pub(crate) fn state_residual(
    basis: &SpectralBasis,
    params: &ModelParams,
    coeffs: &[f64],
    cubic_sign: f64,
) -> Vec<f64> {
    let kin = Kinematics::new(basis, coeffs);
    let conv = advect(&kin.u, &kin.grad);
    let mut t = elastic_stress(basis, params, coeffs, &kin);
    t.add_weighted(cubic_sign, None, &cubic_stress(params, &kin.a));
    let mut out = basis.pair_vector(&conv);
    add_vec(&mut out, &basis.pair_tensor(&t));
    out
}

#[cfg(test)]
/// The same residual in the original convective form:
/// `b(y, v(y), h) + b(h, y, v(y)) + (alpha1 + alpha2)(A^2, grad h) + (S(y), grad h)`.
pub(crate) fn state_residual_convective(
    basis: &SpectralBasis,
    params: &ModelParams,
    coeffs: &[f64],
) -> Vec<f64> {
    let kin = Kinematics::new(basis, coeffs);
    let mut f = advect(&kin.u, &kin.grad_v);
    add_into(&mut f, 1.0, &transpose_advect(&kin.v, &kin.grad));
    let mut t = kin.a.matmul(&kin.a);
    t.scale(params.alpha1() + params.alpha2());
    t.add_weighted(1.0, None, &cubic_stress(params, &kin.a));
    let mut out = basis.pair_vector(&f);
    add_vec(&mut out, &basis.pair_tensor(&t));
    out
}

/// `int |A(y)|^4`.
pub(crate) fn a4_integral(basis: &SpectralBasis, coeffs: &[f64]) -> f64 {
    let sq = symmetric_rate(&basis.gradient(coeffs)).frobenius_sq();
    basis.integrate(&sq.iter().map(|s| s * s).collect::<Vec<_>>())
}

/// Trilinear form `b(phi, z, y) = int (phi . grad z) . y dx`.
pub fn trilinear_b(basis: &SpectralBasis, phi: &Field, z: &Field, y: &Field) -> Result<f64> {
    phi.check_basis(basis)?;
    z.check_basis(basis)?;
    y.check_basis(basis)?;
    let adv = advect(&basis.velocity(phi.coeffs()), &basis.gradient(z.coeffs()));
    let yv = basis.velocity(y.coeffs());
    let dot: Vec<f64> = (0..adv.len())
        .map(|k| adv.u[0][k] * yv.u[0][k] + adv.u[1][k] * yv.u[1][k])
        .collect();
    Ok(basis.integrate(&dot))
}

/// Constitutive quantities of a field, all evaluated on the collocation grid.
#[derive(Debug, Clone)]
pub struct ConstitutiveTerms {
    /// `A(y) = grad y + grad y^T`
    pub a: TensorGridField,
    /// `S(y) = beta |A|^2 A`
    pub s: TensorGridField,
    /// `N(y) = alpha1 (y . grad A + grad y^T A + A grad y) + alpha2 A^2`
    pub n: TensorGridField,
    /// Leray projection of `div S(y)` onto the span.
    pub div_s: Field,
    /// Leray projection of `div N(y)` onto the span.
    pub div_n: Field,
    /// Scalar vorticity of `v(y)`: `d_1 v_2 - d_2 v_1`.
    pub curl_v: Vec<f64>,
}

pub fn constitutive_terms(
    basis: &SpectralBasis,
    y: &Field,
    params: &ModelParams,
) -> Result<ConstitutiveTerms> {
    y.check_basis(basis)?;
    let kin = Kinematics::new(basis, y.coeffs());
    let s = cubic_stress(params, &kin.a);
    let n = elastic_stress(basis, params, y.coeffs(), &kin);
    // (div T, h_k) = -(T, grad h_k); coefficient = pairing / mass.
    let project_div = |t: &TensorGridField| -> Result<Field> {
        let c = basis
            .pair_tensor(t)
            .iter()
            .zip(basis.mass())
            .map(|(p, w)| -p / w)
            .collect();
        Field::from_coeffs(basis, c)
    };
    let curl_v = kin.grad_v.t[1][0]
        .iter()
        .zip(&kin.grad_v.t[0][1])
        .map(|(a, b)| a - b)
        .collect();
    Ok(ConstitutiveTerms {
        div_s: project_div(&s)?,
        div_n: project_div(&n)?,
        a: kin.a,
        s,
        n,
        curl_v,
    })
}

/// `h = (I - alpha1 P Delta)^{-1} f`: on each mode a division by `1 + alpha1 lambda`.
pub fn invert_modified_stokes(basis: &SpectralBasis, f: &Field) -> Result<Field> {
    f.check_basis(basis)?;
    let c = f
        .coeffs()
        .iter()
        .zip(basis.mass())
        .map(|(c, w)| c * w)
        .collect();
    Field::from_coeffs(basis, c)
}

/// `(I - alpha1 P Delta) h`, the forward modified Stokes operator.
pub fn apply_modified_stokes(basis: &SpectralBasis, h: &Field) -> Result<Field> {
    h.check_basis(basis)?;
    let c = h
        .coeffs()
        .iter()
        .zip(basis.mass())
        .map(|(c, w)| c / w)
        .collect();
    Field::from_coeffs(basis, c)
}

/// `curl v(z) x w` in 2D: the scalar vorticity times the rotated vector `(-w_2, w_1)`.
pub(crate) fn vorticity_cross(curl: &[f64], w: &GridVector) -> GridVector {
    GridVector {
        u: [
            curl.iter().zip(&w.u[1]).map(|(c, b)| -c * b).collect(),
            curl.iter().zip(&w.u[0]).map(|(c, a)| c * a).collect(),
        ],
    }
}

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identity of a basis: two fields can be combined only if their keys agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisKey {
    pub max_mode: usize,
    pub grid_size: usize,
    alpha1_bits: u64,
}

impl BasisKey {
    pub fn new(max_mode: usize, grid_size: usize, alpha1: f64) -> Self {
        Self {
            max_mode,
            grid_size,
            alpha1_bits: alpha1.to_bits(),
        }
    }

    pub fn alpha1(&self) -> f64 {
        f64::from_bits(self.alpha1_bits)
    }

    pub fn n_modes(&self) -> usize {
        self.max_mode * self.max_mode
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Trig {
    Sin,
    Cos,
}

impl Trig {
    /// Differentiate `kind(f x)` `order` times: returns the constant factor
    /// and the resulting kind.
    fn derive(self, f: f64, order: usize) -> (f64, Trig) {
        let mut factor = 1.0;
        let mut kind = self;
        for _ in 0..order {
            match kind {
                Trig::Sin => {
                    factor *= f;
                    kind = Trig::Cos;
                }
                Trig::Cos => {
                    factor *= -f;
                    kind = Trig::Sin;
                }
            }
        }
        (factor, kind)
    }

    fn eval(self, arg: f64) -> f64 {
        match self {
            Trig::Sin => arg.sin(),
            Trig::Cos => arg.cos(),
        }
    }
}

/// Divergence-free trigonometric basis on the square `[0, pi]^2` with
/// free-slip (Navier, zero tangential stress) walls.
///
/// Mode `(m, n)` is generated by the stream function
/// `psi = sin(m x) sin(n y)`, giving the velocity
/// `h = s (n sin(mx) cos(ny), -m cos(mx) sin(ny))`. Each mode is an
/// eigenfunction of the Stokes operator with eigenvalue `m^2 + n^2`, and the
/// scale `s` makes it unit length in the `V` inner product
/// `(u, z)_V = (u, z) + 2 alpha1 (Du, Dz)`.
///
/// Nonlinear terms are evaluated on a tensor grid of `grid_size` midpoints per
/// axis, `x_i = (i + 1/2) pi / G`. The midpoint rule integrates
/// `cos(k x)` exactly on `[0, pi]` for `k < 2G`, so every triple product of
/// basis functions is integrated exactly once `2G > 3M`.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    key: BasisKey,
    alpha1: f64,
    modes: Vec<(usize, usize)>,
    lambda: Vec<f64>,
    mu: Vec<f64>,
    scale: Vec<f64>,
    mass: Vec<f64>,
    points: Vec<f64>,
    sin_tab: Vec<f64>,
    cos_tab: Vec<f64>,
    weight: f64,
}

impl SpectralBasis {
    /// Basis with `max_mode^2` modes on the default `4 * max_mode` grid.
    pub fn new(max_mode: usize, alpha1: f64) -> Result<Self> {
        Self::with_grid(max_mode, alpha1, 4 * max_mode)
    }

    pub fn with_grid(max_mode: usize, alpha1: f64, grid_size: usize) -> Result<Self> {
        if max_mode == 0 {
            return Err(Error::InvalidBasis("max_mode must be >= 1".into()));
        }
        if !(alpha1.is_finite() && alpha1 >= 0.0) {
            return Err(Error::InvalidBasis(format!("alpha1 = {alpha1} must be >= 0")));
        }
        if 2 * grid_size <= 3 * max_mode {
            return Err(Error::InvalidBasis(format!(
                "grid_size = {grid_size} too small for max_mode = {max_mode}: need 2G > 3M"
            )));
        }

        let m_max = max_mode;
        let mut modes = Vec::with_capacity(m_max * m_max);
        let mut lambda = Vec::with_capacity(m_max * m_max);
        let mut mu = Vec::with_capacity(m_max * m_max);
        let mut scale = Vec::with_capacity(m_max * m_max);
        let mut mass = Vec::with_capacity(m_max * m_max);
        for m in 1..=m_max {
            for n in 1..=m_max {
                let l = (m * m + n * n) as f64;
                let stiff = 1.0 + alpha1 * l;
                modes.push((m, n));
                lambda.push(l);
                // ||h||_W^2 = ||h||_V^2 + ||v(h)||^2 = (1 + stiff) ||h||_V^2 for v(h) = stiff h.
                mu.push(2.0 + alpha1 * l);
                // Unnormalized ||h||^2 = pi^2 lambda / 4, ||h||_V^2 = stiff * that.
                scale.push(1.0 / (stiff * PI * PI * l / 4.0).sqrt());
                mass.push(1.0 / stiff);
            }
        }

        let g = grid_size;
        let points: Vec<f64> = (0..g).map(|i| (i as f64 + 0.5) * PI / g as f64).collect();
        let mut sin_tab = Vec::with_capacity(m_max * g);
        let mut cos_tab = Vec::with_capacity(m_max * g);
        for m in 1..=m_max {
            for &x in &points {
                sin_tab.push((m as f64 * x).sin());
                cos_tab.push((m as f64 * x).cos());
            }
        }
        let h = PI / g as f64;

        Ok(Self {
            key: BasisKey::new(max_mode, grid_size, alpha1),
            alpha1,
            modes,
            lambda,
            mu,
            scale,
            mass,
            points,
            sin_tab,
            cos_tab,
            weight: h * h,
        })
    }

    pub fn key(&self) -> BasisKey {
        self.key
    }

    pub fn max_mode(&self) -> usize {
        self.key.max_mode
    }

    pub fn grid_size(&self) -> usize {
        self.key.grid_size
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    /// Wavenumber pairs in lexicographic order.
    pub fn modes(&self) -> &[(usize, usize)] {
        &self.modes
    }

    /// Index of mode `(m, n)`.
    pub fn index_of(&self, m: usize, n: usize) -> Option<usize> {
        let mm = self.key.max_mode;
        if (1..=mm).contains(&m) && (1..=mm).contains(&n) {
            Some((m - 1) * mm + (n - 1))
        } else {
            None
        }
    }

    /// Stokes eigenvalues `m^2 + n^2`.
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Eigenratios of `(v, h)_W = mu (v, h)_V`.
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Squared `L^2` norm of each V-normalized mode, `1 / (1 + alpha1 lambda)`.
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Normalization factor applied to the stream-function velocity.
    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    /// Collocation points along each axis.
    pub fn grid_points(&self) -> &[f64] {
        &self.points
    }

    /// Quadrature weight of one grid cell.
    pub fn cell_weight(&self) -> f64 {
        self.weight
    }

    pub fn grid_len(&self) -> usize {
        self.key.grid_size * self.key.grid_size
    }

    fn table(&self, kind: Trig, m: usize) -> &[f64] {
        let g = self.key.grid_size;
        let tab = match kind {
            Trig::Sin => &self.sin_tab,
            Trig::Cos => &self.cos_tab,
        };
        &tab[(m - 1) * g..m * g]
    }

    /// Base amplitude and trig kinds of component `comp` of an unnormalized mode.
    fn component_shape(comp: usize, m: usize, n: usize) -> (f64, Trig, Trig) {
        match comp {
            0 => (n as f64, Trig::Sin, Trig::Cos),
            1 => (-(m as f64), Trig::Cos, Trig::Sin),
            _ => unreachable!("velocity has two components"),
        }
    }

    /// Per-mode factor and trig kinds of `d^dx/dx^dx d^dy/dy^dy h_comp`.
    fn derivative_shape(&self, comp: usize, dx: usize, dy: usize) -> (Vec<f64>, Trig, Trig) {
        let mut kinds = (Trig::Sin, Trig::Sin);
        let factors = self
            .modes
            .iter()
            .zip(&self.scale)
            .map(|(&(m, n), &s)| {
                let (amp, kx, ky) = Self::component_shape(comp, m, n);
                let (fx, kx) = kx.derive(m as f64, dx);
                let (fy, ky) = ky.derive(n as f64, dy);
                kinds = (kx, ky);
                s * amp * fx * fy
            })
            .collect();
        (factors, kinds.0, kinds.1)
    }

    /// Grid values of `sum_k a_k X_m(x) Y_n(y)`.
    fn synth_raw(&self, amps: &[f64], kx: Trig, ky: Trig) -> Vec<f64> {
        let mm = self.key.max_mode;
        let g = self.key.grid_size;
        let mut tmp = vec![0.0; mm * g];
        for m in 1..=mm {
            let row = &mut tmp[(m - 1) * g..m * g];
            for n in 1..=mm {
                let a = amps[(m - 1) * mm + (n - 1)];
                if a == 0.0 {
                    continue;
                }
                for (t, y) in row.iter_mut().zip(self.table(ky, n)) {
                    *t += a * y;
                }
            }
        }
        let mut out = vec![0.0; g * g];
        for m in 1..=mm {
            let row = &tmp[(m - 1) * g..m * g];
            for (i, &xv) in self.table(kx, m).iter().enumerate() {
                let dst = &mut out[i * g..(i + 1) * g];
                for (d, t) in dst.iter_mut().zip(row) {
                    *d += xv * t;
                }
            }
        }
        out
    }

    /// Quadrature `sum_ij g_ij X_m(x_i) Y_n(y_j) w` for every mode.
    fn analyze_raw(&self, grid: &[f64], kx: Trig, ky: Trig) -> Vec<f64> {
        let mm = self.key.max_mode;
        let g = self.key.grid_size;
        let mut tmp = vec![0.0; mm * g];
        for m in 1..=mm {
            let row = &mut tmp[(m - 1) * g..m * g];
            for (i, &xv) in self.table(kx, m).iter().enumerate() {
                let src = &grid[i * g..(i + 1) * g];
                for (t, s) in row.iter_mut().zip(src) {
                    *t += xv * s;
                }
            }
        }
        let mut out = vec![0.0; mm * mm];
        for m in 1..=mm {
            let row = &tmp[(m - 1) * g..m * g];
            for n in 1..=mm {
                let dot: f64 = row.iter().zip(self.table(ky, n)).map(|(a, b)| a * b).sum();
                out[(m - 1) * mm + (n - 1)] = dot * self.weight;
            }
        }
        out
    }

    /// Grid values of `d^dx_x d^dy_y y_comp` for the field with coefficients `coeffs`.
    pub(crate) fn synth(&self, coeffs: &[f64], comp: usize, dx: usize, dy: usize) -> Vec<f64> {
        let (factors, kx, ky) = self.derivative_shape(comp, dx, dy);
        let amps: Vec<f64> = coeffs.iter().zip(&factors).map(|(c, f)| c * f).collect();
        self.synth_raw(&amps, kx, ky)
    }

    /// Discrete pairing of a grid function with `d^dx_x d^dy_y (h_k)_comp` for every mode.
    /// This is the transpose of [`Self::synth`] under grid quadrature.
    pub(crate) fn test(&self, grid: &[f64], comp: usize, dx: usize, dy: usize) -> Vec<f64> {
        let (factors, kx, ky) = self.derivative_shape(comp, dx, dy);
        let mut raw = self.analyze_raw(grid, kx, ky);
        for (r, f) in raw.iter_mut().zip(&factors) {
            *r *= f;
        }
        raw
    }

    /// Velocity and velocity gradient (`grad[i][j] = d_j y_i`) of a
    /// coefficient vector at an arbitrary point, by direct summation.
    pub fn eval_point(&self, coeffs: &[f64], x: f64, y: f64) -> ([f64; 2], [[f64; 2]; 2]) {
        let mut u = [0.0; 2];
        let mut grad = [[0.0; 2]; 2];
        for ((&(m, n), &s), &c) in self.modes.iter().zip(&self.scale).zip(coeffs) {
            if c == 0.0 {
                continue;
            }
            for comp in 0..2 {
                let (amp, kx, ky) = Self::component_shape(comp, m, n);
                let base = c * s * amp;
                let (mf, nf) = (m as f64, n as f64);
                u[comp] += base * kx.eval(mf * x) * ky.eval(nf * y);
                let (fx, dkx) = kx.derive(mf, 1);
                let (fy, dky) = ky.derive(nf, 1);
                grad[comp][0] += base * fx * dkx.eval(mf * x) * ky.eval(nf * y);
                grad[comp][1] += base * fy * kx.eval(mf * x) * dky.eval(nf * y);
            }
        }
        (u, grad)
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Material constants of a third grade fluid.
///
/// Construct through [`ModelParams::new`] (or [`validate_params`]) so the
/// thermodynamic admissibility conditions are checked:
/// `nu >= 0`, `alpha1 >= 0`, `beta >= 0` and `|alpha1 + alpha2| <= sqrt(24 nu beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    nu: f64,
    alpha1: f64,
    alpha2: f64,
    beta: f64,
}

impl ModelParams {
    pub fn new(nu: f64, alpha1: f64, alpha2: f64, beta: f64) -> Result<Self> {
        for (name, value) in [
            ("nu", nu),
            ("alpha1", alpha1),
            ("alpha2", alpha2),
            ("beta", beta),
        ] {
            if !value.is_finite() {
                return Err(Error::NonFinite { name, value });
            }
        }
        for (name, value) in [("nu", nu), ("alpha1", alpha1), ("beta", beta)] {
            if value < 0.0 {
                return Err(Error::NegativeModulus { name, value });
            }
        }
        let lhs = (alpha1 + alpha2).abs();
        let rhs = (24.0 * nu * beta).sqrt();
        if lhs > rhs {
            return Err(Error::NonAdmissible { lhs, rhs });
        }
        Ok(Self {
            nu,
            alpha1,
            alpha2,
            beta,
        })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Free-function form of [`ModelParams::new`].
pub fn validate_params(nu: f64, alpha1: f64, alpha2: f64, beta: f64) -> Result<ModelParams> {
    ModelParams::new(nu, alpha1, alpha2, beta)
}

//! Isotropic elasticity from directional springs.
//!
//! A spring along the unit direction `h` stores `(mu/2) <grad_u h, h>^2` under the
//! affine displacement gradient `grad_u`. Averaging over the unit sphere with
//! `int_{S^2} <Z h, h>^2 dA = (4 pi / 15) (2 ||sym Z||^2 + (tr Z)^2)` gives the
//! isotropic energy `(4 pi / 15) (mu ||sym grad_u||^2 + (lambda/2) (tr grad_u)^2)` with
//! `lambda/2 = mu/2`, that is `lambda = mu` and a Poisson ratio of exactly 1/4.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{vec3, SquareMatrix, Vec3};

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElasticModuli {
    mu: f64,
    lambda: f64,
    nu: f64,
}

impl ElasticModuli {
    /// Requires `mu > 0` and a Poisson ratio in `(-1, 1/2)`.
    pub fn from_lame(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::NonPositiveMu(mu));
        }
        if !lambda.is_finite() {
            return Err(Error::NonFinite);
        }
        let nu = poisson_ratio(mu, lambda);
        if !(nu > -1.0 && nu < 0.5) {
            return Err(Error::InvalidParameter(format!("Poisson ratio {nu} outside (-1, 1/2)")));
        }
        Ok(ElasticModuli { mu, lambda, nu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

/// `lambda / (2 (mu + lambda))`.
pub fn poisson_ratio(mu: f64, lambda: f64) -> f64 {
    lambda / (2.0 * (mu + lambda))
}

fn check_grad(grad_u: &SquareMatrix) -> Result<()> {
    if grad_u.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: grad_u.dim() });
    }
    Ok(())
}

/// `(mu/2) <grad_u h, h>^2` for a unit direction `h`.
pub fn directional_energy(grad_u: &SquareMatrix, h: &Vec3, mu: f64) -> Result<f64> {
    check_grad(grad_u)?;
    let len = vec3::norm(h);
    if (len - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit(len));
    }
    let s = vec3::dot(&grad_u.mul_vec3(h), h);
    Ok(0.5 * mu * s * s)
}

/// `(4 pi / 15) (mu ||sym grad_u||^2 + (mu/2) (tr grad_u)^2)`.
pub fn averaged_energy(grad_u: &SquareMatrix, mu: f64) -> Result<f64> {
    check_grad(grad_u)?;
    let tr = grad_u.trace();
    Ok(4.0 * PI / 15.0 * (mu * grad_u.sym().frobenius_norm_sq() + 0.5 * mu * tr * tr))
}

/// `lambda = mu`, `nu = 1/4`.
pub fn moduli_from_isotropization(mu: f64) -> Result<ElasticModuli> {
    ElasticModuli::from_lame(mu, mu)
}

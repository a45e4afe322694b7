//! Matrix exponential, principal square root and principal logarithm of general
//! (nonsymmetric) matrices.

use super::eig::eigenvalues;
use super::matrix::SquareMatrix;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Relative tolerance for deciding that an eigenvalue sits on the closed negative
/// real axis.
pub const BRANCH_CUT_TOL: f64 = 1e-10;

/// Scaling and squaring with a degree-18 Taylor polynomial on `A / 2^s`,
/// `||A / 2^s||_1 <= 1/2`.
pub fn expm(a: &SquareMatrix) -> SquareMatrix {
    let n = a.dim();
    let norm = a.norm_1();
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let b = a.scale(0.5f64.powi(s));
    let mut result = SquareMatrix::identity(n);
    let mut term = SquareMatrix::identity(n);
    for k in 1..=18 {
        term = (term * b).scale(1.0 / k as f64);
        result += term;
    }
    for _ in 0..s {
        result = result * result;
    }
    result
}

/// Principal square root by the scaled Denman-Beavers iteration.
pub fn sqrtm(a: &SquareMatrix) -> Result<SquareMatrix> {
    let n = a.dim();
    let mut y = *a;
    let mut z = SquareMatrix::identity(n);
    for _ in 0..60 {
        let gamma = (y.det() * z.det()).abs().powf(-0.5 / n as f64);
        let (gy, gz) = if gamma.is_finite() && gamma > 0.0 {
            (y.scale(gamma), z.scale(gamma))
        } else {
            (y, z)
        };
        let y_next = (gy + gz.inverse()?).scale(0.5);
        let z_next = (gz + gy.inverse()?).scale(0.5);
        let step = (y_next - y).frobenius_norm();
        y = y_next;
        z = z_next;
        if !y.is_finite() {
            return Err(Error::NonFinite);
        }
        if step <= 1e-15 * y.frobenius_norm() {
            return Ok(y);
        }
    }
    // Quadratic convergence stalls at rounding level; accept if the residual is small.
    let res = (y * y - *a).frobenius_norm();
    if res <= 1e-12 * a.frobenius_norm() {
        Ok(y)
    } else {
        Err(Error::NoConvergence("Denman-Beavers square root"))
    }
}

/// Fails with [`Error::Singular`] or [`Error::BranchCut`] when `m` has no principal
/// logarithm.
pub fn check_principal_domain(m: &SquareMatrix) -> Result<()> {
    m.check_finite()?;
    if m.is_numerically_singular() {
        return Err(Error::Singular);
    }
    let scale = m.frobenius_norm();
    for ev in eigenvalues(m)? {
        if ev.im.abs() <= BRANCH_CUT_TOL * scale && ev.re <= BRANCH_CUT_TOL * scale {
            return Err(Error::BranchCut { re: ev.re, im: ev.im });
        }
    }
    Ok(())
}

/// Principal matrix logarithm by inverse scaling and squaring.
///
/// Takes square roots until `||X - I||_F < 1/4`, evaluates `log(I + E)` with the
/// Gauss-Legendre form of the diagonal Pade approximant
/// `sum_j w_j E (I + x_j E)^{-1}`, then scales by `2^k`.
pub fn principal_log(m: &SquareMatrix) -> Result<SquareMatrix> {
    check_principal_domain(m)?;
    let n = m.dim();
    let id = SquareMatrix::identity(n);
    let mut x = *m;
    let mut k = 0;
    while (x - id).frobenius_norm() >= 0.25 {
        x = sqrtm(&x)?;
        k += 1;
        if k > 60 {
            return Err(Error::NoConvergence("inverse scaling and squaring"));
        }
    }
    let e = x - id;
    let (nodes, weights) = gauss_legendre(10, 0.0, 1.0);
    let mut log = SquareMatrix::zeros(n);
    for (t, w) in nodes.iter().zip(&weights) {
        let inv = (id + e.scale(*t)).inverse()?;
        log += (e * inv).scale(*w);
    }
    Ok(log.scale(2f64.powi(k)))
}

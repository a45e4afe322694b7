//! Polar decomposition `F = R U` by two independent engines.

use crate::error::{Error, Result};
use crate::linalg::{svd, RotationMatrix, SpdMatrix, SquareMatrix};

pub const NEWTON_MAX_ITERATIONS: usize = 100;
const NEWTON_STEP_TOL: f64 = 1e-14;

/// Orthogonal factor, right stretch `U = sqrt(F^T F)` and its spectrum `Delta_i = lambda_i(U) - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarFactors {
    orthogonal: SquareMatrix,
    proper: bool,
    stretch: SpdMatrix,
    stretch_spectrum: Vec<f64>,
}

impl PolarFactors {
    fn new(orthogonal: SquareMatrix, stretch: SpdMatrix) -> Self {
        let proper = orthogonal.det() > 0.0;
        let stretch_spectrum = stretch_spectrum(&stretch);
        PolarFactors { orthogonal, proper, stretch, stretch_spectrum }
    }

    /// The orthogonal factor, whatever its determinant.
    pub fn orthogonal(&self) -> &SquareMatrix {
        &self.orthogonal
    }

    /// `false` when `det F < 0` and the orthogonal factor is a reflection.
    pub fn is_proper(&self) -> bool {
        self.proper
    }

    pub fn rotation(&self) -> Option<RotationMatrix> {
        self.proper.then(|| RotationMatrix::new_unchecked(self.orthogonal))
    }

    pub fn stretch(&self) -> &SpdMatrix {
        &self.stretch
    }

    /// Descending.
    pub fn stretch_spectrum(&self) -> &[f64] {
        &self.stretch_spectrum
    }

    pub fn reconstruct(&self) -> SquareMatrix {
        self.orthogonal * *self.stretch.matrix()
    }

    /// `||F - R U||_F`.
    pub fn residual(&self, f: &SquareMatrix) -> f64 {
        (*f - self.reconstruct()).frobenius_norm()
    }
}

fn check_invertible(f: &SquareMatrix) -> Result<()> {
    f.check_finite()?;
    if f.is_numerically_singular() {
        Err(Error::Singular)
    } else {
        Ok(())
    }
}

/// `R = W V^T`, `U = V Sigma V^T` from `F = W Sigma V^T`.
///
/// Succeeds for `det F < 0` as well; the orthogonal factor then has determinant -1
/// and [`PolarFactors::is_proper`] is false.
pub fn polar_svd(f: &SquareMatrix) -> Result<PolarFactors> {
    check_invertible(f)?;
    let s = svd(f);
    let r = s.u * s.v.transpose();
    let u = SpdMatrix::from_eigen(s.v, &s.singular_values)?;
    Ok(PolarFactors::new(r, u))
}

/// Determinant-scaled Newton iteration `X <- (g X + (g X)^{-T}) / 2`, `g = |det X|^{-1/n}`.
pub fn polar_newton(f: &SquareMatrix) -> Result<PolarFactors> {
    polar_newton_counted(f).map(|(p, _)| p)
}

/// As [`polar_newton`], also returning the number of iterations taken.
pub fn polar_newton_counted(f: &SquareMatrix) -> Result<(PolarFactors, usize)> {
    check_invertible(f)?;
    let det = f.det();
    if det <= 0.0 {
        return Err(Error::NonOrientation(det));
    }
    let n = f.dim();
    let mut x = *f;
    for k in 1..=NEWTON_MAX_ITERATIONS {
        let gamma = x.det().abs().powf(-1.0 / n as f64);
        let gx = x.scale(gamma);
        let next = (gx + gx.inverse()?.transpose()).scale(0.5);
        let step = (next - x).frobenius_norm();
        let scale = x.frobenius_norm();
        x = next;
        if step <= NEWTON_STEP_TOL * scale {
            let u = SpdMatrix::new(x.tr_mul(f).sym())?;
            return Ok((PolarFactors::new(x, u), k));
        }
    }
    Err(Error::NoConvergence("Newton polar iteration"))
}

/// `Delta_i = lambda_i(U) - 1`, descending.
pub fn stretch_spectrum(u: &SpdMatrix) -> Vec<f64> {
    u.eigenvalues().iter().map(|l| l - 1.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_rotation;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_and_spd_inputs() {
        for engine in [polar_svd, polar_newton] {
            let p = engine(&SquareMatrix::identity(3)).unwrap();
            assert!((*p.orthogonal() - SquareMatrix::identity(3)).max_abs() < 1e-15);
            assert!((*p.stretch().matrix() - SquareMatrix::identity(3)).max_abs() < 1e-15);
            let d = SquareMatrix::from_diag(&[2.0, 3.0, 4.0]);
            let p = engine(&d).unwrap();
            assert!((*p.orthogonal() - SquareMatrix::identity(3)).max_abs() < 1e-14);
            assert!((*p.stretch().matrix() - d).max_abs() < 1e-14);
        }
    }

    #[test]
    fn construct_then_recover() {
        let r0 = haar_rotation(3, 5);
        let u0 = SquareMatrix::from_diag(&[1.5, 0.5, 1.0]);
        let f = *r0.matrix() * u0;
        let p = polar_svd(&f).unwrap();
        assert!((*p.orthogonal() - *r0.matrix()).frobenius_norm() < 1e-11);
        assert!((*p.stretch().matrix() - u0).frobenius_norm() < 1e-11);
        let spec = p.stretch_spectrum();
        for (got, want) in spec.iter().zip([0.5, 0.0, -0.5]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert!(p.residual(&f) < 1e-12);
    }

    #[test]
    fn rotation_is_a_newton_fixed_point() {
        let r0 = haar_rotation(4, 9);
        let (p, iters) = polar_newton_counted(r0.matrix()).unwrap();
        assert!(iters <= 2, "{iters}");
        assert!((*p.orthogonal() - *r0.matrix()).frobenius_norm() < 1e-14);
        assert!((*p.stretch().matrix() - SquareMatrix::identity(4)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn reflection_is_flagged() {
        let f = SquareMatrix::from_diag(&[-1.0, 2.0, 3.0]);
        let p = polar_svd(&f).unwrap();
        assert!(!p.is_proper());
        assert!(p.rotation().is_none());
        assert!(p.residual(&f) < 1e-14);
        assert!(matches!(polar_newton(&f), Err(Error::NonOrientation(_))));
    }

    #[test]
    fn singular_inputs_rejected() {
        let f = SquareMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert_eq!(polar_svd(&f).unwrap_err(), Error::Singular);
        assert_eq!(polar_newton(&f).unwrap_err(), Error::Singular);
    }

    #[test]
    fn stretch_spectrum_examples() {
        let u = SpdMatrix::new(SquareMatrix::identity(3)).unwrap();
        assert_eq!(stretch_spectrum(&u), vec![0.0, 0.0, 0.0]);
        let u = SpdMatrix::new(SquareMatrix::from_diag(&[1.0, 0.7, 1.2])).unwrap();
        let d = stretch_spectrum(&u);
        for (got, want) in d.iter().zip([0.2, 0.0, -0.3]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        let sum_sq: f64 = d.iter().map(|x| x * x).sum();
        let dist = (*u.matrix() - SquareMatrix::identity(3)).frobenius_norm_sq();
        assert_abs_diff_eq!(sum_sq, dist, epsilon = 1e-15);
    }
}

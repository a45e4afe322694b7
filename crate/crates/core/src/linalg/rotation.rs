//! Rotation matrices, the axis-angle chart of SO(3) and Haar sampling on SO(n).

use std::f64::consts::PI;

use rand::Rng;

use super::matrix::{vec3, SquareMatrix, Vec3};
use crate::error::{Error, Result};
use crate::rng::{gaussian, stream_rng};

pub const ROTATION_TOL: f64 = 1e-12;

/// Orthogonal matrix with determinant +1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(SquareMatrix);

impl RotationMatrix {
    pub fn new(m: SquareMatrix) -> Result<Self> {
        m.check_finite()?;
        let n = m.dim();
        let orthogonality = (m.tr_mul(&m) - SquareMatrix::identity(n)).frobenius_norm();
        let det = m.det();
        if orthogonality > ROTATION_TOL || (det - 1.0).abs() > ROTATION_TOL {
            return Err(Error::NotRotation { orthogonality, det });
        }
        Ok(RotationMatrix(m))
    }

    /// For matrices orthogonal by construction whose defects are at rounding level.
    pub(crate) fn new_unchecked(m: SquareMatrix) -> Self {
        RotationMatrix(m)
    }

    pub fn identity(dim: usize) -> Self {
        RotationMatrix(SquareMatrix::identity(dim))
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> SquareMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn transpose(&self) -> Self {
        RotationMatrix(self.0.transpose())
    }

    pub fn compose(&self, other: &RotationMatrix) -> Self {
        RotationMatrix(self.0 * other.0)
    }

    pub fn orthogonality_defect(&self) -> f64 {
        (self.0.tr_mul(&self.0) - SquareMatrix::identity(self.dim())).frobenius_norm()
    }
}

/// Rotation vector `w` with `|w| <= pi`: rotation by `|w|` about `w / |w|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAngle(Vec3);

impl AxisAngle {
    pub fn new(w: Vec3) -> Result<Self> {
        let a = vec3::norm(&w);
        if !a.is_finite() {
            return Err(Error::NonFinite);
        }
        if a > PI + 1e-12 {
            return Err(Error::AngleOutOfRange(a));
        }
        Ok(AxisAngle(w))
    }

    pub fn zero() -> Self {
        AxisAngle([0.0; 3])
    }

    /// Maps an arbitrary rotation vector to the equivalent one inside the closed
    /// ball of radius pi.
    pub fn wrapped(w: Vec3) -> Self {
        let a = vec3::norm(&w);
        if a <= PI || !a.is_finite() {
            return AxisAngle(w);
        }
        let mut b = a % (2.0 * PI);
        let mut axis = vec3::scale(&w, 1.0 / a);
        if b > PI {
            b = 2.0 * PI - b;
            axis = vec3::scale(&axis, -1.0);
        }
        AxisAngle(vec3::scale(&axis, b))
    }

    pub fn vector(&self) -> Vec3 {
        self.0
    }

    pub fn angle(&self) -> f64 {
        vec3::norm(&self.0)
    }
}

pub fn hat(w: &Vec3) -> SquareMatrix {
    SquareMatrix::from_rows(&[[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]])
        .expect("finite 3x3")
}

/// Axial vector of the skew part of a 3x3 matrix.
pub fn vee(m: &SquareMatrix) -> Vec3 {
    [
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    ]
}

/// Rodrigues formula.
pub fn exp_so3(w: &AxisAngle) -> RotationMatrix {
    let v = w.vector();
    let theta = vec3::norm(&v);
    let k = hat(&v);
    let k2 = k * k;
    let (a, b) = if theta < 1e-4 {
        let t2 = theta * theta;
        (1.0 - t2 / 6.0 + t2 * t2 / 120.0, 0.5 - t2 / 24.0 + t2 * t2 / 720.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
    };
    RotationMatrix(SquareMatrix::identity(3) + k.scale(a) + k2.scale(b))
}

/// Inverse Rodrigues map onto `|w| <= pi`.
pub fn log_so3(r: &RotationMatrix) -> AxisAngle {
    let m = r.matrix();
    assert_eq!(m.dim(), 3, "log_so3 needs a 3x3 rotation");
    let cos = ((m.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let axial = vee(m);
    let sin = vec3::norm(&axial);
    let theta = sin.atan2(cos);
    if theta < 1e-4 {
        let t2 = theta * theta;
        return AxisAngle(vec3::scale(&axial, 1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0));
    }
    if cos > -0.9 {
        return AxisAngle(vec3::scale(&axial, theta / sin));
    }
    // Near pi the axial vector is unreliable; read the axis from (R + R^T)/2 - cos I
    // = (1 - cos) n n^T and take its sign from the axial vector.
    let s = m.sym();
    let b = SquareMatrix::from_fn(3, |i, j| {
        (s[(i, j)] - if i == j { cos } else { 0.0 }) / (1.0 - cos)
    });
    let k = (0..3).max_by(|&i, &j| b[(i, i)].total_cmp(&b[(j, j)])).unwrap();
    let mut axis: Vec3 = [b[(0, k)], b[(1, k)], b[(2, k)]];
    let nrm = vec3::norm(&axis);
    axis = vec3::scale(&axis, 1.0 / nrm);
    if vec3::dot(&axis, &axial) < 0.0 {
        axis = vec3::scale(&axis, -1.0);
    }
    AxisAngle(vec3::scale(&axis, theta))
}

/// Haar-distributed rotation from an explicit random source: Gaussian matrix, QR by
/// twice-iterated Gram-Schmidt (positive diagonal in R), determinant corrected by
/// negating the first column.
pub fn haar_rotation_from<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> RotationMatrix {
    let mut cols: Vec<Vec<f64>> = (0..dim).map(|_| (0..dim).map(|_| gaussian(rng)).collect()).collect();
    for j in 0..dim {
        for _ in 0..2 {
            for k in 0..j {
                let d: f64 = cols[j].iter().zip(&cols[k]).map(|(a, b)| a * b).sum();
                let ck = cols[k].clone();
                cols[j].iter_mut().zip(&ck).for_each(|(x, c)| *x -= d * c);
            }
        }
        let nrm = cols[j].iter().map(|x| x * x).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|x| *x /= nrm);
    }
    let mut q = SquareMatrix::zeros(dim);
    for (j, c) in cols.iter().enumerate() {
        q.set_col(j, c);
    }
    if q.det() < 0.0 {
        for i in 0..dim {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    RotationMatrix(q)
}

/// Deterministic per `(dim, seed)`.
pub fn haar_rotation(dim: usize, seed: u64) -> RotationMatrix {
    haar_rotation_from(&mut stream_rng(seed, 0), dim)
}

/// The `index`-th rotation of a seeded batch; independent of evaluation order.
pub fn haar_rotation_indexed(dim: usize, seed: u64, index: u64) -> RotationMatrix {
    haar_rotation_from(&mut stream_rng(seed, index), dim)
}

//! Dense square matrices of dimension 2 through 8, stored inline.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 8;
const STRIDE: usize = MAX_DIM;

pub type Vec3 = [f64; 3];

/// Real `n x n` matrix with `2 <= n <= 8`.
///
/// Entries live in a fixed buffer with row stride 8; slots outside the active
/// `dim x dim` block are kept at zero so that derived equality is entrywise.
#[derive(Clone, Copy, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: [f64; MAX_DIM * MAX_DIM],
}

fn check_dim(dim: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::Dimension(dim))
    }
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!((MIN_DIM..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        SquareMatrix { dim, data: [0.0; MAX_DIM * MAX_DIM] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from rows, rejecting ragged, out-of-range or non-finite input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        check_dim(n)?;
        for (i, r) in rows.iter().enumerate() {
            if r.as_ref().len() != n {
                return Err(Error::NotSquare { rows: n, row: i, cols: r.as_ref().len() });
            }
        }
        let m = Self::from_fn(n, |i, j| rows[i].as_ref()[j]);
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_row_major(dim: usize, entries: &[f64]) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        let m = Self::from_fn(dim, |i, j| entries[i * dim + j]);
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_cols3(c0: Vec3, c1: Vec3, c2: Vec3) -> Self {
        let cols = [c0, c1, c2];
        Self::from_fn(3, |i, j| cols[j][i])
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.entries().all(f64::is_finite) {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.check_finite().is_ok()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Active entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.dim).flat_map(move |i| (0..self.dim).map(move |j| self[(i, j)]))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.row(i)).collect()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.dim).map(|j| self[(i, j)]).collect()
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[f64]) {
        for (i, &x) in v.iter().enumerate().take(self.dim) {
            self[(i, j)] = x;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius inner product `tr(A^T B)`.
    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.entries().zip(other.entries()).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sq().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().map(f64::abs).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] *= s;
            }
        }
        m
    }

    pub fn sym(&self) -> Self {
        Self::from_fn(self.dim, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    pub fn skw(&self) -> Self {
        Self::from_fn(self.dim, |i, j| 0.5 * (self[(i, j)] - self[(j, i)]))
    }

    pub fn symmetry_defect(&self) -> f64 {
        (*self - self.transpose()).frobenius_norm()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self[(i, j)] * x[j]).sum()).collect()
    }

    pub fn mul_vec3(&self, x: &Vec3) -> Vec3 {
        debug_assert_eq!(self.dim, 3);
        let mut y = [0.0; 3];
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self[(i, 0)] * x[0] + self[(i, 1)] * x[1] + self[(i, 2)] * x[2];
        }
        y
    }

    /// `A^T B` without forming the transpose.
    pub fn tr_mul(&self, other: &Self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| (0..n).map(|k| self[(k, i)] * other[(k, j)]).sum())
    }

    /// LU factorization with partial pivoting.
    fn lu(&self) -> (Self, [usize; MAX_DIM], f64) {
        let n = self.dim;
        let mut a = *self;
        let mut perm = [0usize; MAX_DIM];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i;
        }
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            for i in k + 1..n {
                if a[(i, k)].abs() > a[(p, k)].abs() {
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    let t = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = t;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[(k, k)];
            if pivot == 0.0 {
                continue;
            }
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                a[(i, k)] = f;
                for j in k + 1..n {
                    a[(i, j)] -= f * a[(k, j)];
                }
            }
        }
        (a, perm, sign)
    }

    pub fn det(&self) -> f64 {
        match self.dim {
            2 => self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)],
            3 => {
                let a = self;
                a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)])
                    - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
                    + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)])
            }
            _ => {
                let (lu, _, sign) = self.lu();
                (0..self.dim).map(|i| lu[(i, i)]).product::<f64>() * sign
            }
        }
    }

    /// `|det A| <= 1e-12 * ||A||_F^n`, the invertibility test used throughout.
    pub fn is_numerically_singular(&self) -> bool {
        let scale = self.frobenius_norm().powi(self.dim as i32);
        !(self.det().abs() > 1e-12 * scale)
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim;
        let (lu, perm, _) = self.lu();
        if (0..n).any(|i| lu[(i, i)] == 0.0) {
            return Err(Error::Singular);
        }
        let mut inv = Self::zeros(n);
        for col in 0..n {
            let mut x = [0.0; MAX_DIM];
            for i in 0..n {
                let mut s = if perm[i] == col { 1.0 } else { 0.0 };
                for k in 0..i {
                    s -= lu[(i, k)] * x[k];
                }
                x[i] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[i];
                for k in i + 1..n {
                    s -= lu[(i, k)] * x[k];
                }
                x[i] = s / lu[(i, i)];
            }
            for i in 0..n {
                inv[(i, col)] = x[i];
            }
        }
        if inv.is_finite() {
            Ok(inv)
        } else {
            Err(Error::Singular)
        }
    }
}

/// Symmetric/skew splitting `A = sym A + skw A`.
pub fn split(a: &SquareMatrix) -> (SquareMatrix, SquareMatrix) {
    (a.sym(), a.skw())
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.dim && j < self.dim);
        &self.data[i * STRIDE + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.data[i * STRIDE + j]
    }
}

impl Add for SquareMatrix {
    type Output = SquareMatrix;
    fn add(mut self, rhs: SquareMatrix) -> SquareMatrix {
        self += rhs;
        self
    }
}

impl AddAssign for SquareMatrix {
    fn add_assign(&mut self, rhs: SquareMatrix) {
        debug_assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a += b;
        }
    }
}

impl Sub for SquareMatrix {
    type Output = SquareMatrix;
    fn sub(mut self, rhs: SquareMatrix) -> SquareMatrix {
        debug_assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a -= b;
        }
        self
    }
}

impl Neg for SquareMatrix {
    type Output = SquareMatrix;
    fn neg(self) -> SquareMatrix {
        self.scale(-1.0)
    }
}

impl Mul for SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: SquareMatrix) -> SquareMatrix {
        &self * &rhs
    }
}

impl Mul<&SquareMatrix> for &SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: &SquareMatrix) -> SquareMatrix {
        debug_assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * STRIDE + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Mul<f64> for SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, s: f64) -> SquareMatrix {
        self.scale(s)
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

pub mod vec3 {
    use super::Vec3;

    pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    pub fn norm_sq(a: &Vec3) -> f64 {
        dot(a, a)
    }

    pub fn norm(a: &Vec3) -> f64 {
        norm_sq(a).sqrt()
    }

    pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
        [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
    }

    pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }

    pub fn scale(a: &Vec3, s: f64) -> Vec3 {
        [a[0] * s, a[1] * s, a[2] * s]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn split_examples() {
        let (s, w) = split(&SquareMatrix::identity(3));
        assert_eq!(s, SquareMatrix::identity(3));
        assert_eq!(w, SquareMatrix::zeros(3));

        let a = SquareMatrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
        let (s, w) = split(&a);
        assert_eq!(s, SquareMatrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap());
        assert_eq!(w, SquareMatrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap());

        let k = SquareMatrix::from_rows(&[[0.0, 2.0, -1.0], [-2.0, 0.0, 3.0], [1.0, -3.0, 0.0]])
            .unwrap();
        let (s, w) = split(&k);
        assert_eq!(s, SquareMatrix::zeros(3));
        assert_eq!(w, k);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]),
            Err(Error::NotSquare { .. })
        ));
        assert_eq!(SquareMatrix::from_rows(&[[1.0]]).unwrap_err(), Error::Dimension(1));
        assert_eq!(
            SquareMatrix::from_rows(&[[1.0, f64::NAN], [0.0, 1.0]]).unwrap_err(),
            Error::NonFinite
        );
        let nine = vec![vec![0.0; 9]; 9];
        assert_eq!(SquareMatrix::from_rows(&nine).unwrap_err(), Error::Dimension(9));
    }

    #[test]
    fn inverse_and_det() {
        let a = SquareMatrix::from_rows(&[
            [4.0, 1.0, 0.0, 2.0],
            [1.0, 3.0, 1.0, 0.0],
            [0.0, 1.0, 5.0, 1.0],
            [2.0, 0.0, 1.0, 6.0],
        ])
        .unwrap();
        let inv = a.inverse().unwrap();
        let res = (a * inv - SquareMatrix::identity(4)).max_abs();
        assert!(res < 1e-14, "{res}");
        let d3 = SquareMatrix::from_diag(&[2.0, 3.0, 4.0]).det();
        assert_abs_diff_eq!(d3, 24.0);
        let sing = SquareMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert_eq!(sing.inverse().unwrap_err(), Error::Singular);
        assert!(sing.is_numerically_singular());
    }

    #[test]
    fn lu_det_matches_cofactor_det() {
        let a = SquareMatrix::from_rows(&[[0.5, -1.0, 2.0], [3.0, 0.25, 1.0], [-2.0, 1.5, 4.0]])
            .unwrap();
        let (lu, _, sign) = a.lu();
        let via_lu: f64 = (0..3).map(|i| lu[(i, i)]).product::<f64>() * sign;
        assert_abs_diff_eq!(via_lu, a.det(), epsilon = 1e-13);
    }
}

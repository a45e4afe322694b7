use super::eig::{symmetric_eigen, SymmetricEigen};
use super::matrix::SquareMatrix;
use crate::error::{Error, Result};

/// Symmetric positive definite matrix together with its eigendecomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    matrix: SquareMatrix,
    eigen: SymmetricEigen,
}

impl SpdMatrix {
    /// Accepts `a` if `||A - A^T||_F <= 1e-12 max(1, ||A||_F)` and
    /// `lambda_min > 1e-12 lambda_max`. The stored matrix is the symmetrized input.
    pub fn new(a: SquareMatrix) -> Result<Self> {
        a.check_finite()?;
        if a.symmetry_defect() > 1e-12 * a.frobenius_norm().max(1.0) {
            return Err(Error::NotSpd);
        }
        let matrix = a.sym();
        let eigen = symmetric_eigen(&matrix);
        Self::from_parts(matrix, eigen)
    }

    /// `V diag(values) V^T` for orthonormal `V`.
    pub fn from_eigen(vectors: SquareMatrix, values: &[f64]) -> Result<Self> {
        let n = vectors.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
        let eigen = SymmetricEigen {
            values: order.iter().map(|&i| values[i]).collect(),
            vectors: SquareMatrix::from_fn(n, |i, k| vectors[(i, order[k])]),
        };
        let matrix = eigen.reconstruct_with(|x| x).sym();
        Self::from_parts(matrix, eigen)
    }

    fn from_parts(matrix: SquareMatrix, eigen: SymmetricEigen) -> Result<Self> {
        let max = eigen.values[0];
        let min = *eigen.values.last().expect("dim >= 2");
        if !(max > 0.0) || !(min > 1e-12 * max) {
            return Err(Error::NotSpd);
        }
        Ok(SpdMatrix { matrix, eigen })
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> SquareMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    /// Orthonormal eigenvectors as columns, matching [`SpdMatrix::eigenvalues`].
    pub fn eigenvectors(&self) -> &SquareMatrix {
        &self.eigen.vectors
    }

    pub fn sqrt(&self) -> SpdMatrix {
        let values: Vec<f64> = self.eigen.values.iter().map(|x| x.sqrt()).collect();
        let matrix = self.eigen.reconstruct_with(f64::sqrt).sym();
        SpdMatrix {
            matrix,
            eigen: SymmetricEigen { values, vectors: self.eigen.vectors },
        }
    }

    pub fn log(&self) -> SquareMatrix {
        self.eigen.reconstruct_with(f64::ln).sym()
    }
}

pub fn spd_sqrt(a: &SpdMatrix) -> SpdMatrix {
    a.sqrt()
}

pub fn spd_log(a: &SpdMatrix) -> SquareMatrix {
    a.log()
}

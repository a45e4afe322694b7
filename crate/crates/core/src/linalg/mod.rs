//! Small dense linear algebra for `2 <= n <= 8`.

pub mod eig;
pub mod funcs;
pub mod io;
pub mod matrix;
pub mod rotation;
pub mod spd;
pub mod svd;

pub use eig::{eigenvalues, symmetric_eigen, Eigenvalue, SymmetricEigen};
pub use funcs::{expm, principal_log, sqrtm};
pub use matrix::{split, vec3, SquareMatrix, Vec3, MAX_DIM, MIN_DIM};
pub use rotation::{
    exp_so3, haar_rotation, haar_rotation_from, haar_rotation_indexed, hat, log_so3, vee,
    AxisAngle, RotationMatrix,
};
pub use spd::{spd_log, spd_sqrt, SpdMatrix};
pub use svd::{singular_values, svd, ui_norm, NormKind, Svd};

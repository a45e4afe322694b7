//! Numerical verification of the optimality of the polar factor.
//!
//! For an invertible `F = R U` the rotation `R` is the closest rotation to `F` in every
//! unitarily invariant norm, the best rigid approximation of the affine map
//! `x -> p + F (x - p*)` in the squared L2 distance over a ball, and the minimizer of the
//! weighted logarithmic energy `mu ||sym Log(Q^T F)||^2 + mu_c ||skw Log(Q^T F)||^2`.
//! It is *not* in general the minimizer of the weighted Euclidean energy
//! `mu ||sym(Q^T F - I)||^2 + mu_c ||skw(Q^T F - I)||^2` when `0 < mu_c < mu`.
//!
//! Every closed form in this crate is paired with an independent numerical oracle
//! (quadrature, sampling over SO(n), derivative-free optimization).

pub mod elasticity;
pub mod error;
pub mod linalg;
pub mod log_energy;
pub mod optimize;
pub mod par;
pub mod polar;
pub mod quadrature;
pub mod rigid;
pub mod rng;

pub use error::{Error, Result};

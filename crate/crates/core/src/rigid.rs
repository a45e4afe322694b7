//! Best rigid approximation of an affine deformation over a ball.
//!
//! For `S(x) = p + A (x - p*)` with `A = R U`, `det A > 0`, and a rigid motion written
//! about the ball center as `S'(x) = p* + t' + R' (x - p*)`,
//!
//! ```text
//! int_{B_rho(p*)} |S(x) - S'(x)|^2 dV
//!     = (4 pi rho^3 / 3) |t''|^2
//!     + (4 pi rho^5 / 15) sum_s [ (1 + Delta_s)^2 + 1 - 2 (1 + Delta_s) c_ss ]
//! ```
//!
//! where `t'' = R^T (p - p* - t')`, `1 + Delta_s` are the eigenvalues of `U` and `c_ss`
//! are the diagonal entries of `R^T R'` in the eigenbasis of `U`. Since `c_ss <= 1` the
//! distance is bounded below by `(4 pi rho^5 / 15) sum_s Delta_s^2`, with equality
//! exactly at `t' = p - p*`, `R' = R`.
//!
//! [`RigidMotion`] stores the uncentered form `x -> R' x + t`; the centered translation
//! `t' = t + R' p* - p*` is available through [`RigidMotion::centered_translation`].

use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{haar_rotation_indexed, vec3, exp_so3, AxisAngle, RotationMatrix, SquareMatrix, Vec3};
use crate::par::Execution;
use crate::polar::{polar_svd, PolarFactors};
use crate::quadrature::{quad_ball_with, BallDomain, QuadratureSpec};

/// Tangent model `S(x) = image + linear (x - p*)` of a deformation at `p*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    linear: SquareMatrix,
    image: Vec3,
}

impl AffineMap {
    pub fn new(linear: SquareMatrix, image: Vec3) -> Result<Self> {
        if linear.dim() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: linear.dim() });
        }
        linear.check_finite()?;
        if !image.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(AffineMap { linear, image })
    }

    pub fn identity_at(point: Vec3) -> Self {
        AffineMap { linear: SquareMatrix::identity(3), image: point }
    }

    pub fn linear(&self) -> &SquareMatrix {
        &self.linear
    }

    pub fn image(&self) -> Vec3 {
        self.image
    }

    pub fn apply(&self, center: &Vec3, x: &Vec3) -> Vec3 {
        vec3::add(&self.image, &self.linear.mul_vec3(&vec3::sub(x, center)))
    }
}

/// `x -> rotation x + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    rotation: RotationMatrix,
    translation: Vec3,
}

impl RigidMotion {
    pub fn new(rotation: RotationMatrix, translation: Vec3) -> Result<Self> {
        if rotation.dim() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: rotation.dim() });
        }
        Ok(RigidMotion { rotation, translation })
    }

    pub fn identity() -> Self {
        RigidMotion { rotation: RotationMatrix::identity(3), translation: [0.0; 3] }
    }

    /// `x -> center + t_centered + rotation (x - center)`.
    pub fn from_centered(rotation: RotationMatrix, t_centered: Vec3, center: &Vec3) -> Result<Self> {
        let rc = rotation.matrix().mul_vec3(center);
        let t = vec3::sub(&vec3::add(center, &t_centered), &rc);
        Self::new(rotation, t)
    }

    pub fn rotation(&self) -> &RotationMatrix {
        &self.rotation
    }

    pub fn translation(&self) -> Vec3 {
        self.translation
    }

    pub fn centered_translation(&self, center: &Vec3) -> Vec3 {
        let rc = self.rotation.matrix().mul_vec3(center);
        vec3::sub(&vec3::add(&self.translation, &rc), center)
    }

    pub fn apply(&self, x: &Vec3) -> Vec3 {
        vec3::add(&self.rotation.matrix().mul_vec3(x), &self.translation)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub best: RigidMotion,
    pub min_distance: f64,
    /// `t'' = R^T (p - p* - t')`
    pub residual_translation: Vec3,
    /// `R^T R'`
    pub relative_rotation: RotationMatrix,
}

/// Polar data of an affine map, reused across many candidate rigid motions.
#[derive(Debug, Clone)]
pub struct GrioliFrame {
    map: AffineMap,
    polar: PolarFactors,
    rotation: RotationMatrix,
    /// Eigenvectors of `U` as columns.
    principal_axes: SquareMatrix,
    /// `1 + Delta_s`, matching the columns of `principal_axes`.
    principal_stretches: Vec<f64>,
}

impl GrioliFrame {
    pub fn new(map: &AffineMap) -> Result<Self> {
        let det = map.linear.det();
        if det <= 0.0 {
            return Err(Error::NonOrientation(det));
        }
        let polar = polar_svd(&map.linear)?;
        let rotation = polar.rotation().ok_or(Error::NonOrientation(det))?;
        let principal_axes = *polar.stretch().eigenvectors();
        let principal_stretches = polar.stretch().eigenvalues().to_vec();
        Ok(GrioliFrame { map: *map, polar, rotation, principal_axes, principal_stretches })
    }

    pub fn polar(&self) -> &PolarFactors {
        &self.polar
    }

    pub fn rotation(&self) -> &RotationMatrix {
        &self.rotation
    }

    pub fn stretch_spectrum(&self) -> &[f64] {
        self.polar.stretch_spectrum()
    }

    /// `(4 pi rho^5 / 15) sum_s Delta_s^2`.
    pub fn lower_bound(&self, ball: &BallDomain) -> f64 {
        ball.second_moment() * self.stretch_spectrum().iter().map(|d| d * d).sum::<f64>()
    }

    /// `t''` and `R^T R'` for a candidate motion.
    pub fn reduced(&self, motion: &RigidMotion, ball: &BallDomain) -> (Vec3, SquareMatrix) {
        let c = ball.center();
        let t_centered = motion.centered_translation(&c);
        let offset = vec3::sub(&vec3::sub(&self.map.image, &c), &t_centered);
        let rt = self.rotation.matrix().transpose();
        (rt.mul_vec3(&offset), self.rotation.matrix().tr_mul(motion.rotation.matrix()))
    }

    /// Diagonal `c_ss` of `R^T R'` in the principal frame of `U`.
    pub fn direction_cosines(&self, relative: &SquareMatrix) -> Vec3 {
        let v = &self.principal_axes;
        let mut c = [0.0; 3];
        for (s, cs) in c.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    acc += v[(i, s)] * relative[(i, j)] * v[(j, s)];
                }
            }
            *cs = acc;
        }
        c
    }

    pub fn distance(&self, motion: &RigidMotion, ball: &BallDomain) -> f64 {
        let (t2, relative) = self.reduced(motion, ball);
        self.distance_from_parts(&t2, &relative, ball)
    }

    fn distance_from_parts(&self, t2: &Vec3, relative: &SquareMatrix, ball: &BallDomain) -> f64 {
        let c = self.direction_cosines(relative);
        let bracket: f64 = self
            .principal_stretches
            .iter()
            .zip(&c)
            .map(|(l, css)| l * l + 1.0 - 2.0 * l * css)
            .sum();
        ball.volume() * vec3::norm_sq(t2) + ball.second_moment() * bracket
    }

    /// Distance for rotation `r` with the translation fixed at its optimum `t' = p - p*`.
    pub fn distance_at_rotation(&self, r: &RotationMatrix, ball: &BallDomain) -> f64 {
        let relative = self.rotation.matrix().tr_mul(r.matrix());
        self.distance_from_parts(&[0.0; 3], &relative, ball)
    }

    pub fn optimal_motion(&self, ball: &BallDomain) -> RigidMotion {
        let c = ball.center();
        let t_centered = vec3::sub(&self.map.image, &c);
        RigidMotion::from_centered(self.rotation, t_centered, &c).expect("3x3 rotation")
    }
}

/// Closed-form Grioli distance `int_B |S(x) - S'(x)|^2 dV`.
pub fn distance_to_rigid(map: &AffineMap, motion: &RigidMotion, ball: &BallDomain) -> Result<f64> {
    Ok(GrioliFrame::new(map)?.distance(motion, ball))
}

/// The same integral evaluated numerically, with no use of the polar factors.
pub fn distance_by_quadrature(
    map: &AffineMap,
    motion: &RigidMotion,
    ball: &BallDomain,
    spec: &QuadratureSpec,
) -> f64 {
    let c = ball.center();
    quad_ball_with(
        |x| vec3::norm_sq(&vec3::sub(&map.apply(&c, x), &motion.apply(x))),
        ball,
        spec,
        Execution::Sequential,
    )
}

/// The minimizing rigid motion: the polar rotation, mapping `p*` to `p`.
pub fn best_rigid(map: &AffineMap, ball: &BallDomain) -> Result<FitResult> {
    let frame = GrioliFrame::new(map)?;
    let best = frame.optimal_motion(ball);
    let (t2, relative) = frame.reduced(&best, ball);
    Ok(FitResult {
        best,
        min_distance: frame.lower_bound(ball),
        residual_translation: t2,
        relative_rotation: RotationMatrix::new_unchecked(relative),
    })
}

/// `int_B |grad_u h - W h - offset|^2 dV` for skew `W`, where `offset = t' - p`.
pub fn skew_fit_objective(grad_u: &SquareMatrix, w: &SquareMatrix, offset: &Vec3, ball: &BallDomain) -> f64 {
    ball.volume() * vec3::norm_sq(offset) + ball.second_moment() * (*grad_u - *w).frobenius_norm_sq()
}

/// Best infinitesimal rotation: `W = skw grad_u`, minimum `(4 pi rho^5 / 15) ||sym grad_u||_F^2`.
pub fn best_skew(grad_u: &SquareMatrix, ball: &BallDomain) -> Result<(SquareMatrix, f64)> {
    if grad_u.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: grad_u.dim() });
    }
    Ok((grad_u.skw(), ball.second_moment() * grad_u.sym().frobenius_norm_sq()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RotationSampler {
    Haar { count: usize, seed: u64 },
    /// Cubic grid of spacing `2 pi / resolution` over the axis-angle ball `|w| <= pi`,
    /// containing the origin.
    AxisAngleGrid { resolution: usize },
}

impl RotationSampler {
    pub fn len(&self) -> usize {
        match *self {
            RotationSampler::Haar { count, .. } => count,
            RotationSampler::AxisAngleGrid { resolution } => grid_points(resolution).len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn grid_points(resolution: usize) -> Vec<Vec3> {
    let h = 2.0 * PI / resolution.max(1) as f64;
    let half = (resolution / 2) as i64;
    let mut out = Vec::new();
    for i in -half..=half {
        for j in -half..=half {
            for k in -half..=half {
                let w = [i as f64 * h, j as f64 * h, k as f64 * h];
                if vec3::norm(&w) <= PI {
                    out.push(w);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub best: RigidMotion,
    pub value: f64,
    pub samples: usize,
    /// Smallest `value - min_distance` over all samples.
    pub min_gap: f64,
}

fn lexicographic(a: &RotationMatrix, b: &RotationMatrix) -> Ordering {
    a.matrix()
        .entries()
        .zip(b.matrix().entries())
        .map(|(x, y)| x.total_cmp(&y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn better(a: &(f64, RotationMatrix), b: &(f64, RotationMatrix)) -> bool {
    match a.0.total_cmp(&b.0) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => lexicographic(&a.1, &b.1) == Ordering::Less,
    }
}

const ORACLE_CHUNK: usize = 2048;

/// Brute-force minimum over sampled rotations with the translation at `t' = p - p*`.
/// The result is an upper bound on the true minimum and is deterministic for a fixed
/// sampler regardless of execution mode.
pub fn min_over_rotations_oracle(
    map: &AffineMap,
    ball: &BallDomain,
    sampler: &RotationSampler,
    exec: Execution,
) -> Result<OracleResult> {
    let frame = GrioliFrame::new(map)?;
    let grid = match sampler {
        RotationSampler::AxisAngleGrid { resolution } => grid_points(*resolution),
        RotationSampler::Haar { .. } => Vec::new(),
    };
    let total = sampler.len();
    if total == 0 {
        return Err(Error::InvalidParameter("rotation sampler is empty".into()));
    }
    let rotation_at = |i: usize| match *sampler {
        RotationSampler::Haar { seed, .. } => haar_rotation_indexed(3, seed, i as u64),
        RotationSampler::AxisAngleGrid { .. } => exp_so3(&AxisAngle::wrapped(grid[i])),
    };
    let chunks = total.div_ceil(ORACLE_CHUNK);
    let partial = exec.map(chunks, |k| {
        let lo = k * ORACLE_CHUNK;
        let hi = total.min(lo + ORACLE_CHUNK);
        let mut best: Option<(f64, RotationMatrix)> = None;
        for i in lo..hi {
            let r = rotation_at(i);
            let cand = (frame.distance_at_rotation(&r, ball), r);
            if best.as_ref().is_none_or(|b| better(&cand, b)) {
                best = Some(cand);
            }
        }
        best.expect("non-empty chunk")
    });
    let mut best = partial[0];
    for cand in &partial[1..] {
        if better(cand, &best) {
            best = *cand;
        }
    }
    let c = ball.center();
    let motion = RigidMotion::from_centered(best.1, vec3::sub(&map.image(), &c), &c)?;
    Ok(OracleResult { best: motion, value: best.0, samples: total, min_gap: best.0 - frame.lower_bound(ball) })
}

/// Central-difference Jacobian of `field` at `point`.
pub fn fd_gradient<F>(field: F, point: &Vec3, h: f64) -> Result<SquareMatrix>
where
    F: Fn(&Vec3) -> Vec3,
{
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!("finite-difference step must be positive, got {h}")));
    }
    let mut g = SquareMatrix::zeros(3);
    for j in 0..3 {
        let mut plus = *point;
        let mut minus = *point;
        plus[j] += h;
        minus[j] -= h;
        let fp = field(&plus);
        let fm = field(&minus);
        if !fp.iter().chain(fm.iter()).all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        for i in 0..3 {
            g[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(g)
}

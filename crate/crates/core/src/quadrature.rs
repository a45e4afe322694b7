//! Integrals over the ball `B_rho(p*)` and the unit sphere in three dimensions.
//!
//! Each integral identity has a closed form and can be checked against two independent
//! numerical routes: a tensor-product Gauss-Legendre rule in spherical coordinates
//! (Jacobian `r^2 sin(theta)`) and seeded Monte Carlo by rejection from the bounding cube.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{vec3, SquareMatrix, Vec3};
use crate::par::Execution;
use crate::rng::{stream_rng, uniform};

/// Accepted Monte Carlo samples per independent random stream.
const MC_CHUNK: usize = 1 << 14;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = mid - half * x;
        nodes[n - 1 - i] = mid + half * x;
        weights[i] = half * w;
        weights[n - 1 - i] = half * w;
    }
    (nodes, weights)
}

/// `B_rho(p*)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallDomain {
    center: Vec3,
    radius: f64,
}

impl BallDomain {
    pub fn new(center: Vec3, radius: f64) -> Result<Self> {
        if !center.iter().all(|c| c.is_finite()) || !radius.is_finite() {
            return Err(Error::NonFinite);
        }
        if radius <= 0.0 {
            return Err(Error::InvalidParameter(format!("ball radius must be positive, got {radius}")));
        }
        Ok(BallDomain { center, radius })
    }

    pub fn unit() -> Self {
        BallDomain { center: [0.0; 3], radius: 1.0 }
    }

    pub fn centered(radius: f64) -> Result<Self> {
        Self::new([0.0; 3], radius)
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.radius.powi(3)
    }

    /// Second moment `int h_1^2 dV = 4 pi rho^5 / 15`.
    pub fn second_moment(&self) -> f64 {
        4.0 * PI * self.radius.powi(5) / 15.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum QuadratureSpec {
    Gauss { radial_order: usize, polar_order: usize, azimuthal_order: usize },
    MonteCarlo { sample_count: usize, seed: u64 },
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec::Gauss { radial_order: 8, polar_order: 8, azimuthal_order: 16 }
    }
}

impl QuadratureSpec {
    pub fn gauss(radial_order: usize, polar_order: usize, azimuthal_order: usize) -> Result<Self> {
        QuadratureSpec::Gauss { radial_order, polar_order, azimuthal_order }.validated()
    }

    pub fn monte_carlo(sample_count: usize, seed: u64) -> Result<Self> {
        QuadratureSpec::MonteCarlo { sample_count, seed }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            QuadratureSpec::Gauss { radial_order, polar_order, azimuthal_order } => {
                if radial_order < 2 || polar_order < 2 || azimuthal_order < 2 {
                    return Err(Error::InvalidParameter("quadrature orders must be >= 2".into()));
                }
            }
            QuadratureSpec::MonteCarlo { sample_count, .. } => {
                if sample_count < 1 {
                    return Err(Error::InvalidParameter("sample_count must be >= 1".into()));
                }
            }
        }
        Ok(self)
    }
}

fn require_dim3(z: &SquareMatrix) -> Result<()> {
    if z.dim() == 3 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: 3, found: z.dim() })
    }
}

/// `int h_i h_j dV = (4 pi rho^5 / 15) I`, `h` the offset from the center.
pub fn moment_tensor_ball(ball: &BallDomain) -> SquareMatrix {
    SquareMatrix::identity(3).scale(ball.second_moment())
}

/// `int <Z h, h> dV = (4 pi rho^5 / 15) tr Z`.
pub fn integral_quadform_ball(z: &SquareMatrix, ball: &BallDomain) -> Result<f64> {
    require_dim3(z)?;
    Ok(ball.second_moment() * z.trace())
}

/// `int |Z h|^2 dV = (4 pi rho^5 / 15) ||Z||_F^2`.
pub fn integral_sqnorm_ball(z: &SquareMatrix, ball: &BallDomain) -> Result<f64> {
    require_dim3(z)?;
    Ok(ball.second_moment() * z.frobenius_norm_sq())
}

/// `int_{S^2} <Z h, h>^2 dS = (4 pi / 15) (2 ||sym Z||^2 + (tr Z)^2)`.
pub fn integral_quadform_sq_sphere(z: &SquareMatrix) -> Result<f64> {
    require_dim3(z)?;
    let tr = z.trace();
    Ok(4.0 * PI / 15.0 * (2.0 * z.sym().frobenius_norm_sq() + tr * tr))
}

struct AngularRule {
    /// `(direction, weight)` with weights summing to `4 pi`.
    points: Vec<(Vec3, f64)>,
}

impl AngularRule {
    fn new(polar_order: usize, azimuthal_order: usize) -> Self {
        let (us, wu) = gauss_legendre(polar_order, -1.0, 1.0);
        let dphi = 2.0 * PI / azimuthal_order as f64;
        let mut points = Vec::with_capacity(polar_order * azimuthal_order);
        for (u, w) in us.iter().zip(&wu) {
            let s = (1.0 - u * u).sqrt();
            for k in 0..azimuthal_order {
                let phi = k as f64 * dphi;
                points.push(([s * phi.cos(), s * phi.sin(), *u], w * dphi));
            }
        }
        AngularRule { points }
    }
}

/// `int_{B} f(x) dV` with either rule. `f` receives absolute coordinates.
pub fn quad_ball<F>(f: F, ball: &BallDomain, spec: &QuadratureSpec) -> f64
where
    F: Fn(&Vec3) -> f64 + Sync + Send,
{
    quad_ball_with(f, ball, spec, Execution::default())
}

pub fn quad_ball_with<F>(f: F, ball: &BallDomain, spec: &QuadratureSpec, exec: Execution) -> f64
where
    F: Fn(&Vec3) -> f64 + Sync + Send,
{
    let c = ball.center();
    let rho = ball.radius();
    match *spec {
        QuadratureSpec::Gauss { radial_order, polar_order, azimuthal_order } => {
            let (rs, wr) = gauss_legendre(radial_order, 0.0, rho);
            let ang = AngularRule::new(polar_order, azimuthal_order);
            let mut total = 0.0;
            for (r, w) in rs.iter().zip(&wr) {
                let shell: f64 = ang
                    .points
                    .iter()
                    .map(|(d, wa)| wa * f(&vec3::add(&c, &vec3::scale(d, *r))))
                    .sum();
                total += w * r * r * shell;
            }
            total
        }
        QuadratureSpec::MonteCarlo { sample_count, seed } => {
            let sum = monte_carlo_sum(sample_count, seed, exec, |h| f(&vec3::add(&c, &vec3::scale(h, rho))));
            ball.volume() * sum / sample_count as f64
        }
    }
}

/// `int_{S^2} f(h) dS`.
pub fn quad_sphere<F>(f: F, spec: &QuadratureSpec) -> f64
where
    F: Fn(&Vec3) -> f64 + Sync + Send,
{
    quad_sphere_with(f, spec, Execution::default())
}

pub fn quad_sphere_with<F>(f: F, spec: &QuadratureSpec, exec: Execution) -> f64
where
    F: Fn(&Vec3) -> f64 + Sync + Send,
{
    match *spec {
        QuadratureSpec::Gauss { polar_order, azimuthal_order, .. } => {
            let ang = AngularRule::new(polar_order, azimuthal_order);
            ang.points.iter().map(|(d, w)| w * f(d)).sum()
        }
        QuadratureSpec::MonteCarlo { sample_count, seed } => {
            let sum = monte_carlo_sum(sample_count, seed, exec, |h| {
                let n = vec3::norm(h);
                f(&vec3::scale(h, 1.0 / n))
            });
            4.0 * PI * sum / sample_count as f64
        }
    }
}

/// Sum of `g` over `count` uniform points of the open unit ball. Chunk `k` draws from
/// stream `k`, and chunk sums are added in chunk order.
fn monte_carlo_sum<G>(count: usize, seed: u64, exec: Execution, g: G) -> f64
where
    G: Fn(&Vec3) -> f64 + Sync + Send,
{
    let chunks = count.div_ceil(MC_CHUNK);
    let partial = exec.map(chunks, |k| {
        let len = MC_CHUNK.min(count - k * MC_CHUNK);
        let mut rng = stream_rng(seed, k as u64);
        let mut acc = 0.0;
        let mut got = 0;
        while got < len {
            let h = [uniform(&mut rng, -1.0, 1.0), uniform(&mut rng, -1.0, 1.0), uniform(&mut rng, -1.0, 1.0)];
            let r2 = vec3::norm_sq(&h);
            if r2 < 1.0 && r2 > 0.0 {
                acc += g(&h);
                got += 1;
            }
        }
        acc
    });
    partial.iter().sum()
}

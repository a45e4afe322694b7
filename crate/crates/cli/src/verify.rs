//! Verification suites. Each assertion compares a measured error with its tolerance;
//! `scale` sets the sample counts.

use std::f64::consts::PI;

use grioli_core::elasticity::{averaged_energy, directional_energy, moduli_from_isotropization};
use grioli_core::linalg::{
    haar_rotation_from, haar_rotation_indexed, singular_values, ui_norm, vec3, NormKind, SquareMatrix, Vec3,
};
use grioli_core::log_energy::{minimize_over_so3, verify_log_optimality, EnergyWeights, Objective, OptimizerConfig};
use grioli_core::par::Execution;
use grioli_core::polar::{polar_newton, polar_svd};
use grioli_core::quadrature::{
    integral_quadform_ball, integral_quadform_sq_sphere, integral_sqnorm_ball, quad_ball_with, quad_sphere_with,
    BallDomain, QuadratureSpec,
};
use grioli_core::rigid::{
    best_rigid, distance_by_quadrature, distance_to_rigid, min_over_rotations_oracle, AffineMap, RigidMotion,
    RotationSampler,
};
use grioli_core::rng::{gaussian, stream_rng, uniform, StreamRng};
use grioli_core::Error;
use serde_json::json;

use crate::config::Suite;
use crate::report::{num, Assertion, Report};
use crate::{CliError, Context, Finished};

const DEFAULT_SCALE: usize = 10_000;

struct Env {
    rng: StreamRng,
    scale: usize,
    seed: u64,
    exec: Execution,
    optimizer: OptimizerConfig,
}

impl Env {
    fn matrix(&mut self, n: usize) -> SquareMatrix {
        SquareMatrix::from_fn(n, |_, _| gaussian(&mut self.rng))
    }

    fn point(&mut self) -> Vec3 {
        [gaussian(&mut self.rng), gaussian(&mut self.rng), gaussian(&mut self.rng)]
    }

    fn oriented(&mut self, n: usize) -> SquareMatrix {
        let mut f = self.matrix(n);
        if f.det() < 0.0 {
            for j in 0..n {
                f[(0, j)] = -f[(0, j)];
            }
        }
        f
    }

    /// `R0 V diag(l) V^T`, `log l_i` uniform in `[-a, a]`.
    fn rotated_stretch(&mut self, a: f64) -> SquareMatrix {
        let r0 = haar_rotation_from(&mut self.rng, 3);
        let v = haar_rotation_from(&mut self.rng, 3);
        let l: Vec<f64> = (0..3).map(|_| uniform(&mut self.rng, -a, a).exp()).collect();
        *r0.matrix() * (*v.matrix() * SquareMatrix::from_diag(&l) * v.matrix().transpose()).sym()
    }
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn integrals(env: &mut Env, report: &mut Report) {
    let gauss = QuadratureSpec::default();
    let unit = BallDomain::unit();
    let m = 4.0 * PI / 15.0;
    let moment_err = max_of((0..9).map(|k| {
        let (i, j) = (k / 3, k % 3);
        let v = quad_ball_with(|x| x[i] * x[j], &unit, &gauss, env.exec);
        (v - if i == j { m } else { 0.0 }).abs()
    }));
    report.check(Assertion::new("ball second moments", moment_err, 1e-10));

    let (mut quadform, mut sqnorm, mut sphere) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let z = SquareMatrix::from_fn(3, |_, _| uniform(&mut env.rng, -2.0, 2.0));
        let ball = BallDomain::new(env.point(), [0.5, 1.0, 2.0][env.rng_index(3)]).expect("valid radius");
        let c = ball.center();
        let q1 = quad_ball_with(|x| { let h = vec3::sub(x, &c); vec3::dot(&z.mul_vec3(&h), &h) }, &ball, &gauss, env.exec);
        let c1 = integral_quadform_ball(&z, &ball).expect("3x3");
        quadform = quadform.max((q1 - c1).abs() / (1.0 + c1.abs()));
        let q2 = quad_ball_with(|x| vec3::norm_sq(&z.mul_vec3(&vec3::sub(x, &c))), &ball, &gauss, env.exec);
        let c2 = integral_sqnorm_ball(&z, &ball).expect("3x3");
        sqnorm = sqnorm.max((q2 - c2).abs() / (1.0 + c2));
        let q3 = quad_sphere_with(|h| vec3::dot(&z.mul_vec3(h), h).powi(2), &gauss, env.exec);
        let c3 = integral_quadform_sq_sphere(&z).expect("3x3");
        sphere = sphere.max((q3 - c3).abs() / (1.0 + c3));
    }
    report.check(Assertion::new("quadratic form over ball", quadform, 1e-10));
    report.check(Assertion::new("squared norm over ball", sqnorm, 1e-10));
    report.check(Assertion::new("squared quadratic form over sphere", sphere, 1e-10));

    let n = env.scale.max(1);
    let mc = QuadratureSpec::monte_carlo(n, env.seed).expect("positive count");
    let v = quad_ball_with(|x| vec3::norm_sq(x) / 3.0, &unit, &mc, env.exec);
    report.set("monte_carlo_samples", json!(n));
    report.check(Assertion::new("Monte Carlo relative error", (v - m).abs() / m, 4.0 / (n as f64).sqrt()));
}

impl Env {
    fn rng_index(&mut self, n: usize) -> usize {
        (uniform(&mut self.rng, 0.0, n as f64) as usize).min(n - 1)
    }
}

fn grioli(env: &mut Env, report: &mut Report) -> Result<(), Error> {
    let spec = QuadratureSpec::default();
    let mut closed_vs_quad: f64 = 0.0;
    let mut residual: f64 = 0.0;
    let mut gap = f64::INFINITY;
    for s in 0..20u64 {
        let a = env.rotated_stretch(0.8);
        let map = AffineMap::new(a, env.point())?;
        let ball = BallDomain::new(env.point(), uniform(&mut env.rng, 0.5, 2.0))?;
        let motion = RigidMotion::new(haar_rotation_from(&mut env.rng, 3), env.point())?;
        let closed = distance_to_rigid(&map, &motion, &ball)?;
        let quad = distance_by_quadrature(&map, &motion, &ball, &spec);
        closed_vs_quad = closed_vs_quad.max((closed - quad).abs() / quad);
        let fit = best_rigid(&map, &ball)?;
        residual = residual.max(
            vec3::norm(&fit.residual_translation)
                + (*fit.relative_rotation.matrix() - SquareMatrix::identity(3)).frobenius_norm(),
        );
        let sampler = RotationSampler::Haar { count: env.scale.max(1), seed: env.seed.wrapping_add(s) };
        gap = gap.min(min_over_rotations_oracle(&map, &ball, &sampler, env.exec)?.min_gap);
    }
    report.check(Assertion::new("closed form vs quadrature (relative)", closed_vs_quad, 1e-9));
    report.check(Assertion::new("optimum residuals", residual, 1e-10));
    report.check(Assertion::at_least("Haar oracle gap", gap, -1e-12));

    let r0 = haar_rotation_indexed(3, env.seed, 0);
    let map = AffineMap::new(*r0.matrix() * SquareMatrix::from_diag(&[1.2, 1.0, 0.9]), [0.0; 3])?;
    let fit = best_rigid(&map, &BallDomain::unit())?;
    let want = 4.0 * PI / 15.0 * 0.05;
    report.set("stretch_example_min_distance", num(fit.min_distance));
    report.check(Assertion::new("diag(1.2, 1, 0.9) minimum", (fit.min_distance - want).abs(), 1e-13));
    Ok(())
}

fn log(env: &mut Env, report: &mut Report) -> Result<(), Error> {
    let cases = (env.scale / 2000).max(2);
    let half = 50f64.ln() / 2.0;
    let fs: Vec<SquareMatrix> = (0..cases).map(|_| env.rotated_stretch(half)).collect();
    let mut value_err: f64 = 0.0;
    let mut arg_err: f64 = 0.0;
    let mut failures = 0usize;
    for ratio in [0.0, 0.3, 1.0, 3.0] {
        let w = EnergyWeights::new(1.0, ratio)?;
        for f in &fs {
            let polar = polar_svd(f)?;
            match verify_log_optimality(f, &w, &env.optimizer) {
                Ok(c) => {
                    value_err = value_err.max((c.report.min_value - c.closed_form).abs() / c.closed_form.max(1e-300));
                    arg_err = arg_err.max((*c.report.argmin.matrix() - *polar.orthogonal()).frobenius_norm());
                }
                Err(Error::LogOptimality(_)) => failures += 1,
                Err(e) => return Err(e),
            }
        }
    }
    report.set("log_cases", json!(cases * 4));
    report.check(Assertion::new("log optimality failures", failures as f64, 0.0));
    report.check(Assertion::new("log minimum vs mu ||log U||^2 (relative)", value_err, 1e-6));
    report.check(Assertion::new("log argmin distance to polar factor", arg_err, 1e-4));

    let f = env.rotated_stretch(1.0);
    let w = EnergyWeights::new(1.0, 1.0)?;
    let r = minimize_over_so3(Objective::Euclidean, &f, &w, &env.optimizer)?;
    let want = (*polar_svd(&f)?.stretch().matrix() - SquareMatrix::identity(3)).frobenius_norm_sq();
    report.check(Assertion::new("equal weights: Euclidean minimum vs ||U - I||^2", (r.min_value - want).abs() / want, 1e-8));
    Ok(())
}

fn isotropy(env: &mut Env, report: &mut Report) -> Result<(), Error> {
    let spec = QuadratureSpec::default();
    let (mut quad_err, mut skew_err, mut rot_err) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let g = env.matrix(3);
        let mu = uniform(&mut env.rng, 0.1, 10.0);
        let closed = averaged_energy(&g, mu)?;
        let quad = quad_sphere_with(|h| directional_energy(&g, h, mu).unwrap_or(f64::NAN), &spec, env.exec);
        quad_err = quad_err.max((quad - closed).abs() / closed);
        let k = env.matrix(3).skw();
        skew_err = skew_err.max((averaged_energy(&(g + k), mu)? - closed).abs() / (1.0 + closed));
        let q = *haar_rotation_from(&mut env.rng, 3).matrix();
        rot_err = rot_err.max((averaged_energy(&(q.transpose() * g * q), mu)? - closed).abs() / (1.0 + closed));
    }
    let moduli = moduli_from_isotropization(1.0)?;
    report.set("lambda", num(moduli.lambda()));
    report.set("nu", num(moduli.nu()));
    report.check(Assertion::new("averaged energy vs sphere quadrature (relative)", quad_err, 1e-10));
    report.check(Assertion::new("skew invariance", skew_err, 1e-12));
    report.check(Assertion::new("rotation invariance", rot_err, 1e-10));
    report.check(Assertion::new("|nu - 1/4|", (moduli.nu() - 0.25).abs(), 0.0));
    Ok(())
}

fn fan_hoffman(env: &mut Env, report: &mut Report) -> Result<(), Error> {
    let mut worst = [f64::INFINITY; 3];
    for i in 0..10 {
        let n = 2 + i % 7;
        let f = env.oriented(n);
        let r = *polar_svd(&f)?.orthogonal();
        let base: Vec<f64> = NormKind::ALL.iter().map(|k| ui_norm(&(f - r), *k)).collect();
        let seed = env.seed.wrapping_add(i as u64);
        let margins = env.exec.map(env.scale.max(1), |k| {
            let q = *haar_rotation_indexed(n, seed, k as u64).matrix();
            let mut m = [0.0; 3];
            for (slot, (kind, b)) in m.iter_mut().zip(NormKind::ALL.iter().zip(&base)) {
                *slot = ui_norm(&(f - q), *kind) - b;
            }
            m
        });
        for m in margins {
            for (w, x) in worst.iter_mut().zip(m) {
                *w = w.min(x);
            }
        }
    }
    for (kind, w) in NormKind::ALL.iter().zip(worst) {
        report.check(Assertion::at_least(format!("{kind:?} norm margin"), w, -1e-12));
    }
    Ok(())
}

fn engines(env: &mut Env, report: &mut Report) -> Result<(), Error> {
    let (mut dr, mut du) = (0.0f64, 0.0f64);
    let mut n_cases = 0;
    while n_cases < 200 {
        let f = env.oriented(3);
        let s = singular_values(&f);
        if s[0] / s[2] > 1e6 {
            continue;
        }
        n_cases += 1;
        let a = polar_svd(&f)?;
        let b = polar_newton(&f)?;
        dr = dr.max((*a.orthogonal() - *b.orthogonal()).frobenius_norm());
        du = du.max((*a.stretch().matrix() - *b.stretch().matrix()).frobenius_norm() / f.frobenius_norm());
    }
    report.check(Assertion::new("engine disagreement in R", dr, 1e-11));
    report.check(Assertion::new("engine disagreement in U over ||F||", du, 1e-10));
    Ok(())
}

pub fn run(ctx: &Context, suite: Option<Suite>, scale: Option<usize>) -> Result<Finished, CliError> {
    let suite = crate::config::require(suite.or(ctx.file.suite), "suite")?;
    let scale = scale.or(ctx.file.scale).unwrap_or(DEFAULT_SCALE);
    let optimizer = OptimizerConfig { execution: ctx.execution, ..ctx.file.optimizer.unwrap_or_default() }.validated()?;
    let mut env = Env { rng: stream_rng(ctx.seed, 0x5eed), scale, seed: ctx.seed, exec: ctx.execution, optimizer };
    let mut report = Report::new("verify", json!({ "suite": suite.name(), "seed": ctx.seed, "scale": scale }));
    match suite {
        Suite::Integrals => integrals(&mut env, &mut report),
        Suite::Grioli => grioli(&mut env, &mut report)?,
        Suite::Log => log(&mut env, &mut report)?,
        Suite::Isotropy => isotropy(&mut env, &mut report)?,
        Suite::FanHoffman => fan_hoffman(&mut env, &mut report)?,
        Suite::Engines => engines(&mut env, &mut report)?,
    }
    Ok(Finished::from_report(report))
}

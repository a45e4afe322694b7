use std::f64::consts::PI;

use grioli_core::elasticity::averaged_energy;
use grioli_core::linalg::{
    exp_so3, expm, haar_rotation, haar_rotation_indexed, hat, principal_log, split, ui_norm, vec3, AxisAngle,
    NormKind, RotationMatrix, SquareMatrix, Vec3,
};
use grioli_core::log_energy::{log_energy, minimize_over_so3, EnergyWeights, Objective, OptimizerConfig};
use grioli_core::polar::{polar_newton, polar_svd};
use grioli_core::quadrature::{
    integral_quadform_ball, integral_quadform_sq_sphere, integral_sqnorm_ball, quad_ball, quad_sphere, BallDomain,
    QuadratureSpec,
};
use grioli_core::rigid::{best_rigid, best_skew, distance_to_rigid, skew_fit_objective, AffineMap, RigidMotion};
use grioli_core::rng::{gaussian, stream_rng};
use proptest::prelude::*;

fn matrix(n: usize) -> impl Strategy<Value = SquareMatrix> {
    prop::collection::vec(-2.0f64..2.0, n * n).prop_map(move |v| SquareMatrix::from_row_major(n, &v).unwrap())
}

fn any_dim_matrix() -> impl Strategy<Value = SquareMatrix> {
    (2usize..=8).prop_flat_map(matrix)
}

fn point() -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-3.0f64..3.0)
}

/// Invertible with positive determinant, condition number bounded by construction.
fn oriented(n: usize) -> impl Strategy<Value = SquareMatrix> {
    (any::<u64>(), prop::collection::vec(-1.5f64..1.5, n)).prop_map(move |(seed, logs)| {
        let l: Vec<f64> = logs.iter().map(|x| x.exp()).collect();
        let a = haar_rotation_indexed(n, seed, 0);
        let b = haar_rotation_indexed(n, seed, 1);
        *a.matrix() * SquareMatrix::from_diag(&l) * *b.matrix()
    })
}

fn rotation3() -> impl Strategy<Value = RotationMatrix> {
    any::<u64>().prop_map(|s| haar_rotation(3, s))
}

fn near(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn split_is_orthogonal(a in any_dim_matrix()) {
        let (s, k) = split(&a);
        prop_assert_eq!(s, s.transpose());
        prop_assert_eq!(k, -k.transpose());
        prop_assert!(near(a.frobenius_norm_sq(), s.frobenius_norm_sq() + k.frobenius_norm_sq(), 1e-13 * (1.0 + a.frobenius_norm_sq())));
        prop_assert!((s + k - a).max_abs() <= 1e-15);
    }

    #[test]
    fn ui_norms_are_unitarily_invariant(a in any_dim_matrix(), seed in any::<u64>()) {
        let n = a.dim();
        let q1 = haar_rotation_indexed(n, seed, 0);
        let q2 = haar_rotation_indexed(n, seed, 1);
        let b = *q1.matrix() * a * *q2.matrix();
        for kind in NormKind::ALL {
            prop_assert!(near(ui_norm(&a, kind), ui_norm(&b, kind), 1e-11));
        }
    }

    #[test]
    fn principal_log_inverts_exp_on_skew(w in prop::array::uniform3(-1.0f64..1.0), angle in 0.0f64..(PI - 1e-3)) {
        let n = vec3::norm(&w);
        prop_assume!(n > 1e-6);
        let k = hat(&vec3::scale(&w, angle / n));
        let l = principal_log(&expm(&k)).unwrap();
        prop_assert!((l - k).max_abs() <= 1e-9);
    }

    #[test]
    fn exp_so3_gives_rotations(w in prop::array::uniform3(-10.0f64..10.0)) {
        let r = exp_so3(&AxisAngle::wrapped(w));
        prop_assert!(r.orthogonality_defect() <= 1e-12);
        prop_assert!(near(r.matrix().det(), 1.0, 1e-12));
    }

    #[test]
    fn polar_engines_agree(f in (2usize..=8).prop_flat_map(oriented)) {
        let a = polar_svd(&f).unwrap();
        let b = polar_newton(&f).unwrap();
        prop_assert!((*a.orthogonal() - *b.orthogonal()).frobenius_norm() <= 1e-11);
        prop_assert!((*a.stretch().matrix() - *b.stretch().matrix()).frobenius_norm() <= 1e-11 * (1.0 + f.frobenius_norm()));
        prop_assert!(a.residual(&f) <= 1e-11 * (1.0 + f.frobenius_norm()));
        prop_assert!(a.stretch_spectrum().iter().all(|d| 1.0 + d > 0.0));
    }

    #[test]
    fn polar_factors_are_left_equivariant(f in oriented(3), q in rotation3()) {
        let a = polar_svd(&f).unwrap();
        let b = polar_svd(&(*q.matrix() * f)).unwrap();
        prop_assert!((*b.orthogonal() - *q.matrix() * *a.orthogonal()).frobenius_norm() <= 1e-11);
        prop_assert!((*b.stretch().matrix() - *a.stretch().matrix()).frobenius_norm() <= 1e-11 * (1.0 + f.frobenius_norm()));
    }

    #[test]
    fn stretch_spectrum_is_distance_to_identity(f in (2usize..=8).prop_flat_map(oriented)) {
        let p = polar_svd(&f).unwrap();
        let sum: f64 = p.stretch_spectrum().iter().map(|d| d * d).sum();
        let direct = (*p.stretch().matrix() - SquareMatrix::identity(f.dim())).frobenius_norm_sq();
        prop_assert!(near(sum, direct, 1e-12 * (1.0 + direct)));
    }

    #[test]
    fn ball_closed_forms_match_gauss(z in matrix(3), c in point(), r in prop::sample::select(vec![0.5, 1.0, 2.0])) {
        let ball = BallDomain::new(c, r).unwrap();
        let spec = QuadratureSpec::default();
        let h = |x: &Vec3| vec3::sub(x, &c);
        let q1 = quad_ball(|x| vec3::dot(&z.mul_vec3(&h(x)), &h(x)), &ball, &spec);
        let c1 = integral_quadform_ball(&z, &ball).unwrap();
        prop_assert!(near(q1, c1, 1e-10 * (1.0 + c1.abs())));
        let q2 = quad_ball(|x| vec3::norm_sq(&z.mul_vec3(&h(x))), &ball, &spec);
        let c2 = integral_sqnorm_ball(&z, &ball).unwrap();
        prop_assert!(near(q2, c2, 1e-10 * (1.0 + c2)));
        let q3 = quad_sphere(|d| vec3::dot(&z.mul_vec3(d), d).powi(2), &spec);
        let c3 = integral_quadform_sq_sphere(&z).unwrap();
        prop_assert!(near(q3, c3, 1e-10 * (1.0 + c3)));
    }

    #[test]
    fn sqnorm_integral_is_rotation_invariant(z in matrix(3), q in rotation3()) {
        let ball = BallDomain::unit();
        let a = integral_sqnorm_ball(&z, &ball).unwrap();
        let b = integral_sqnorm_ball(&(*q.matrix() * z), &ball).unwrap();
        prop_assert!(near(a, b, 1e-10 * (1.0 + a)));
    }

    #[test]
    fn ball_integrals_scale_as_fifth_power(z in matrix(3)) {
        let spec = QuadratureSpec::default();
        let at = |rho: f64| {
            let ball = BallDomain::centered(rho).unwrap();
            quad_ball(|x| vec3::norm_sq(&z.mul_vec3(x)), &ball, &spec)
        };
        let (one, two) = (at(1.0), at(2.0));
        prop_assume!(one > 1e-6);
        prop_assert!(near(two / one, 32.0, 1e-10));
    }

    #[test]
    fn rigid_distance_bounded_below(f in oriented(3), p in point(), c in point(), q in rotation3(), t in point()) {
        let map = AffineMap::new(f, p).unwrap();
        let ball = BallDomain::new(c, 1.3).unwrap();
        let fit = best_rigid(&map, &ball).unwrap();
        let d = distance_to_rigid(&map, &RigidMotion::new(q, t).unwrap(), &ball).unwrap();
        prop_assert!(d >= fit.min_distance - 1e-12);
        prop_assert!(fit.min_distance >= 0.0);
    }

    #[test]
    fn near_optimal_motions_are_near_the_optimum(
        f in oriented(3),
        p in point(),
        w in prop::array::uniform3(-1.0f64..1.0),
        dt in prop::array::uniform3(-1.0f64..1.0),
        scale in -9.0f64..-1.0,
    ) {
        let map = AffineMap::new(f, p).unwrap();
        let ball = BallDomain::unit();
        let fit = best_rigid(&map, &ball).unwrap();
        let eps = 10f64.powf(scale);
        let r = fit.best.rotation().compose(&exp_so3(&AxisAngle::wrapped(vec3::scale(&w, eps))));
        let t_c = vec3::add(&fit.best.centered_translation(&ball.center()), &vec3::scale(&dt, eps));
        let cand = RigidMotion::from_centered(r, t_c, &ball.center()).unwrap();
        let d = distance_to_rigid(&map, &cand, &ball).unwrap();
        if d - fit.min_distance <= 1e-8 {
            prop_assert!((*r.matrix() - *fit.best.rotation().matrix()).frobenius_norm() <= 1e-3);
            let off = vec3::sub(&t_c, &vec3::sub(&p, &ball.center()));
            prop_assert!(vec3::norm(&off) <= 1e-3);
        }
    }

    #[test]
    fn rigid_distance_is_left_invariant(f in oriented(3), p in point(), q in rotation3(), m in rotation3(), t in point()) {
        let ball = BallDomain::new([0.2, -0.1, 0.4], 0.9).unwrap();
        let map = AffineMap::new(f, p).unwrap();
        let motion = RigidMotion::new(m, t).unwrap();
        let qm = *q.matrix();
        let rotated_map = AffineMap::new(qm * f, qm.mul_vec3(&p)).unwrap();
        let rotated_motion = RigidMotion::new(q.compose(&m), qm.mul_vec3(&t)).unwrap();
        let a = distance_to_rigid(&map, &motion, &ball).unwrap();
        let b = distance_to_rigid(&rotated_map, &rotated_motion, &ball).unwrap();
        prop_assert!(near(a, b, 1e-10 * a.max(1e-300)));
    }

    #[test]
    fn best_skew_is_stationary(g in matrix(3), seed in any::<u64>()) {
        let ball = BallDomain::unit();
        let (w, _) = best_skew(&g, &ball).unwrap();
        let mut rng = stream_rng(seed, 0);
        let offset = [0.0; 3];
        for _ in 0..100 {
            let k = SquareMatrix::from_fn(3, |_, _| gaussian(&mut rng)).skw();
            let h = 1e-4;
            let plus = skew_fit_objective(&g, &(w + k.scale(h)), &offset, &ball);
            let minus = skew_fit_objective(&g, &(w - k.scale(h)), &offset, &ball);
            prop_assert!(((plus - minus) / (2.0 * h)).abs() <= 1e-9);
        }
    }

    #[test]
    fn log_energy_is_left_equivariant(f in oriented(3), q in rotation3(), qt in rotation3(), mu_c in 0.0f64..3.0) {
        let w = EnergyWeights::new(1.0, mu_c).unwrap();
        let a = log_energy(&f, &qt, &w);
        let b = log_energy(&(*q.matrix() * f), &q.compose(&qt), &w);
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!(near(a, b, 1e-10 * (1.0 + a)));
        }
    }

    #[test]
    fn log_energy_at_polar_factor_ignores_mu_c(f in oriented(3), mu_c in 0.0f64..5.0) {
        let p = polar_svd(&f).unwrap();
        let r = p.rotation().unwrap();
        let e = log_energy(&f, &r, &EnergyWeights::new(1.5, mu_c).unwrap()).unwrap();
        let want = 1.5 * p.stretch().log().frobenius_norm_sq();
        prop_assert!(near(e, want, 1e-12 * (1.0 + want)));
    }

    #[test]
    fn averaged_energy_sees_only_sym(g in matrix(3), k in matrix(3), q in rotation3(), mu in 0.1f64..10.0) {
        let base = averaged_energy(&g, mu).unwrap();
        prop_assert!(near(averaged_energy(&(g + k.skw()), mu).unwrap(), base, 1e-12 * (1.0 + base)));
        let qm = *q.matrix();
        prop_assert!(near(averaged_energy(&(qm.transpose() * g * qm), mu).unwrap(), base, 1e-10 * (1.0 + base)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn log_minimum_non_decreasing_in_mu_c(f in oriented(3)) {
        let config = OptimizerConfig { random_starts: 8, ..Default::default() };
        let mut last = f64::NEG_INFINITY;
        for mu_c in [0.0, 0.5, 1.0, 2.0] {
            let w = EnergyWeights::new(1.0, mu_c).unwrap();
            let r = minimize_over_so3(Objective::Log, &f, &w, &config).unwrap();
            prop_assert!(r.min_value >= last - 1e-10 * (1.0 + last.abs()));
            last = r.min_value;
        }
    }

    #[test]
    fn optimizer_beats_certificate_set(f in oriented(3), mu_c in 0.0f64..2.0, euclidean in any::<bool>()) {
        let objective = if euclidean { Objective::Euclidean } else { Objective::Log };
        let w = EnergyWeights::new(1.0, mu_c).unwrap();
        let r = minimize_over_so3(objective, &f, &w, &OptimizerConfig::default()).unwrap();
        prop_assert!(r.min_value <= r.polar_value + 1e-12);
        for k in 0..1000 {
            let q = haar_rotation_indexed(3, 99, k);
            prop_assert!(r.min_value <= objective.evaluate(&f, &q, &w) + 1e-12);
        }
    }
}

#[test]
fn monte_carlo_relative_error_within_one_percent() {
    let ball = BallDomain::unit();
    let want = 4.0 * PI / 15.0;
    let mut within = 0;
    for seed in 0..50 {
        let spec = QuadratureSpec::monte_carlo(1_000_000, seed).unwrap();
        let v = quad_ball(|x| vec3::norm_sq(x) / 3.0, &ball, &spec);
        if (v - want).abs() <= 0.01 * want {
            within += 1;
        }
    }
    assert!(within >= 50 * 99 / 100, "{within} of 50 seeds within 1%");
}

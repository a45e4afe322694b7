//! Acceptance gate. Each criterion prints one PASS/FAIL line; the process exits
//! non-zero if any criterion fails or exceeds its time budget.
//!
//! Set `GRIOLI_WRITE_FIXTURES=1` to regenerate the stored counterexample fixture.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use grioli_core::elasticity::{averaged_energy, moduli_from_isotropization};
use grioli_core::linalg::{
    haar_rotation_from, haar_rotation_indexed, singular_values, ui_norm, vec3, NormKind, RotationMatrix,
    SquareMatrix, Vec3,
};
use grioli_core::log_energy::{
    euclidean_energy, find_euclidean_counterexample, minimize_over_so3, CounterexampleSearch, EnergyWeights,
    Objective, OptimizerConfig,
};
use grioli_core::par::Execution;
use grioli_core::polar::{polar_newton, polar_svd};
use grioli_core::quadrature::{quad_ball, quad_sphere, BallDomain, QuadratureSpec};
use grioli_core::rigid::{best_rigid, best_skew, distance_to_rigid, min_over_rotations_oracle, AffineMap, RigidMotion, RotationSampler};
use grioli_core::rng::{gaussian, stream_rng, uniform, StreamRng};
use serde_json::json;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gaussian_matrix(rng: &mut StreamRng, n: usize) -> SquareMatrix {
    SquareMatrix::from_fn(n, |_, _| gaussian(rng))
}

fn gaussian_vec(rng: &mut StreamRng) -> Vec3 {
    [gaussian(rng), gaussian(rng), gaussian(rng)]
}

fn orient(mut f: SquareMatrix) -> SquareMatrix {
    if f.det() < 0.0 {
        for j in 0..f.dim() {
            f[(0, j)] = -f[(0, j)];
        }
    }
    f
}

fn cond(f: &SquareMatrix) -> f64 {
    let s = singular_values(f);
    s[0] / s[s.len() - 1]
}

/// `R0 V diag(l) V^T` with `log l_i` uniform in `[lo, hi]`.
fn rotated_stretch(rng: &mut StreamRng, lo: f64, hi: f64) -> SquareMatrix {
    let r0 = haar_rotation_from(rng, 3);
    let v = haar_rotation_from(rng, 3);
    let l: Vec<f64> = (0..3).map(|_| uniform(rng, lo, hi).exp()).collect();
    *r0.matrix() * (*v.matrix() * SquareMatrix::from_diag(&l) * v.matrix().transpose()).sym()
}

fn ball_moments() -> Outcome {
    let ball = BallDomain::unit();
    let spec = QuadratureSpec::gauss(8, 8, 16).map_err(|e| e.to_string())?;
    let want = 4.0 * PI / 15.0;
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let m = quad_ball(|x| x[i] * x[j], &ball, &spec);
            let target = if i == j { want } else { 0.0 };
            worst = worst.max((m - target).abs());
        }
    }
    check(worst <= 1e-10, format!("max |moment error| = {worst:.3e} (4 pi/15 = {want:.7})"))
}

fn frobenius_reduction() -> Outcome {
    let mut rng = stream_rng(2, 0);
    let spec = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let z = gaussian_matrix(&mut rng, 3);
        let ball = BallDomain::new(gaussian_vec(&mut rng), uniform(&mut rng, 0.2, 2.0)).unwrap();
        let c = ball.center();
        let quad = quad_ball(
            |x| {
                let h = vec3::sub(x, &c);
                vec3::dot(&z.mul_vec3(&h), &h)
            },
            &ball,
            &spec,
        );
        let rho = ball.radius();
        let closed = 4.0 * PI * rho.powi(5) / 15.0 * z.trace();
        worst = worst.max((quad - closed).abs() / (1.0 + z.trace().abs()));
    }
    check(worst <= 1e-10, format!("max scaled error = {worst:.3e} over 100 Z"))
}

fn grioli_closed_form() -> Outcome {
    let mut rng = stream_rng(3, 0);
    let spec = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    while cases < 200 {
        let a = SquareMatrix::identity(3) + gaussian_matrix(&mut rng, 3).scale(0.5);
        if a.det() <= 0.0 {
            continue;
        }
        cases += 1;
        let map = AffineMap::new(a, gaussian_vec(&mut rng)).unwrap();
        let ball = BallDomain::new(gaussian_vec(&mut rng), uniform(&mut rng, 0.2, 2.0)).unwrap();
        let motion = RigidMotion::new(haar_rotation_from(&mut rng, 3), gaussian_vec(&mut rng)).unwrap();
        let closed = distance_to_rigid(&map, &motion, &ball).map_err(|e| e.to_string())?;
        let c = ball.center();
        let quad = quad_ball(
            |x| {
                let s = vec3::add(&map.image(), &a.mul_vec3(&vec3::sub(x, &c)));
                let r = vec3::add(&motion.rotation().matrix().mul_vec3(x), &motion.translation());
                vec3::norm_sq(&vec3::sub(&s, &r))
            },
            &ball,
            &spec,
        );
        worst = worst.max((closed - quad).abs() / quad);
    }
    check(worst <= 1e-9, format!("max relative error = {worst:.3e} over 200 cases"))
}

fn grioli_lower_bound() -> Outcome {
    let mut rng = stream_rng(4, 0);
    let mut worst_gap = f64::INFINITY;
    let mut worst_translated = f64::INFINITY;
    let mut worst_grid: f64 = 0.0;
    // Nearest-grid rotation error is at most theta = (2 pi / 24)(sqrt 3 / 2), which raises the
    // distance by at most theta^2 (sum l - min l) (4 pi rho^5 / 15). Cases are drawn where
    // that excess is below 2% of the minimum.
    let theta = 2.0 * PI / 24.0 * 3f64.sqrt() / 2.0;
    let mut s = 0u64;
    while s < 20 {
        let a = rotated_stretch(&mut rng, 0.1f64.ln(), 10f64.ln());
        let l = polar_svd(&a).unwrap().stretch().eigenvalues().to_vec();
        let excess = theta * theta * (l.iter().sum::<f64>() - l[2]);
        if excess > 0.02 * l.iter().map(|x| (x - 1.0) * (x - 1.0)).sum::<f64>() {
            continue;
        }
        s += 1;
        let map = AffineMap::new(a, gaussian_vec(&mut rng)).unwrap();
        let ball = BallDomain::new(gaussian_vec(&mut rng), uniform(&mut rng, 0.5, 2.0)).unwrap();
        let fit = best_rigid(&map, &ball).map_err(|e| e.to_string())?;
        let d: f64 = polar_svd(&a).unwrap().stretch_spectrum().iter().map(|x| x * x).sum();
        let bound = 4.0 * PI * ball.radius().powi(5) / 15.0 * d;
        let haar = RotationSampler::Haar { count: 100_000, seed: 400 + s };
        let sampled = min_over_rotations_oracle(&map, &ball, &haar, Execution::default()).map_err(|e| e.to_string())?;
        worst_gap = worst_gap.min(sampled.value - bound);
        for k in 0..1000 {
            let t = vec3::add(&fit.best.translation(), &vec3::scale(&gaussian_vec(&mut rng), 0.1));
            let motion = RigidMotion::new(haar_rotation_indexed(3, 500 + s, k), t).unwrap();
            worst_translated = worst_translated.min(distance_to_rigid(&map, &motion, &ball).unwrap() - bound);
        }
        let grid = RotationSampler::AxisAngleGrid { resolution: 24 };
        let gridded = min_over_rotations_oracle(&map, &ball, &grid, Execution::default()).map_err(|e| e.to_string())?;
        worst_grid = worst_grid.max((gridded.value - bound) / bound);
    }
    check(
        worst_gap >= -1e-12 && worst_translated >= -1e-12 && worst_grid <= 0.02,
        format!(
            "min Haar gap = {worst_gap:.3e}, min translated gap = {worst_translated:.3e}, worst grid excess = {:.3}%",
            100.0 * worst_grid
        ),
    )
}

fn linearized_fit() -> Outcome {
    let mut rng = stream_rng(5, 0);
    let mut worst = f64::INFINITY;
    for _ in 0..20 {
        let g = gaussian_matrix(&mut rng, 3);
        let ball = BallDomain::new(gaussian_vec(&mut rng), uniform(&mut rng, 0.5, 2.0)).unwrap();
        let (w, min) = best_skew(&g, &ball).map_err(|e| e.to_string())?;
        let closed = 4.0 * PI * ball.radius().powi(5) / 15.0 * g.sym().frobenius_norm_sq();
        if (min - closed).abs() > 1e-12 * closed {
            return Err(format!("min_value {min} differs from {closed}"));
        }
        for _ in 0..10_000 {
            let k = gaussian_matrix(&mut rng, 3).skw();
            let eps = uniform(&mut rng, -6.0, 0.5);
            let cand = w + k.scale(10f64.powf(eps));
            let offset = vec3::scale(&gaussian_vec(&mut rng), 10f64.powf(eps));
            let m = ball.second_moment();
            let v = ball.volume() * vec3::norm_sq(&offset) + m * (g - cand).frobenius_norm_sq();
            worst = worst.min(v - min);
        }
    }
    check(worst >= -1e-12, format!("min candidate margin = {worst:.3e} over 2e5 skew candidates"))
}

fn fan_hoffman() -> Outcome {
    let mut rng = stream_rng(6, 0);
    let mut worst = f64::INFINITY;
    for i in 0..50 {
        let n = 2 + i % 7;
        let f = orient(gaussian_matrix(&mut rng, n));
        let r = *polar_svd(&f).map_err(|e| e.to_string())?.orthogonal();
        let base: Vec<f64> = NormKind::ALL.iter().map(|k| ui_norm(&(f - r), *k)).collect();
        let margins = Execution::default().map(10_000, |k| {
            let q = haar_rotation_indexed(n, 600 + i as u64, k as u64);
            NormKind::ALL
                .iter()
                .zip(&base)
                .map(|(kind, b)| ui_norm(&(f - *q.matrix()), *kind) + 1e-12 - b)
                .fold(f64::INFINITY, f64::min)
        });
        worst = worst.min(margins.into_iter().fold(f64::INFINITY, f64::min));
    }
    check(worst >= 0.0, format!("min margin over 50 F x 1e4 Q x 3 norms = {worst:.3e}"))
}

fn log_optimality() -> Outcome {
    let mut rng = stream_rng(7, 0);
    let half = 50f64.ln() / 2.0;
    let fs: Vec<SquareMatrix> = (0..100).map(|_| rotated_stretch(&mut rng, -half, half)).collect();
    if let Some(bad) = fs.iter().find(|f| cond(f) > 50.0 * (1.0 + 1e-12)) {
        return Err(format!("generated F with cond {}", cond(bad)));
    }
    let config = OptimizerConfig::default();
    let mut worst_value: f64 = 0.0;
    let mut worst_arg: f64 = 0.0;
    for ratio in [0.0, 0.3, 1.0, 3.0] {
        let w = EnergyWeights::new(1.0, ratio).unwrap();
        let results = Execution::default().map(fs.len(), |i| {
            let f = &fs[i];
            let p = polar_svd(f).unwrap();
            let closed = w.mu() * p.stretch().log().frobenius_norm_sq();
            minimize_over_so3(Objective::Log, f, &w, &config).map(|r| {
                let dv = (r.min_value - closed).abs() / closed;
                let dr = (*r.argmin.matrix() - *p.orthogonal()).frobenius_norm();
                (dv, dr)
            })
        });
        for res in results {
            let (dv, dr) = res.map_err(|e| e.to_string())?;
            worst_value = worst_value.max(dv);
            worst_arg = worst_arg.max(dr);
        }
    }
    check(
        worst_value <= 1e-6 && worst_arg <= 1e-4,
        format!("max relative value error = {worst_value:.3e}, max ||Q* - R||_F = {worst_arg:.3e}"),
    )
}

fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/euclidean_counterexample.json")
}

fn euclidean_failure() -> Outcome {
    let w = EnergyWeights::new(1.0, 0.1).unwrap();
    let search = CounterexampleSearch { seed: 1, trials: 500 };
    let found = find_euclidean_counterexample(&w, &search, &OptimizerConfig::default()).map_err(|e| e.to_string())?;
    let r = &found.report;
    let record = json!({
        "seed": search.seed,
        "trials": search.trials,
        "mu": w.mu(),
        "mu_c": w.mu_c(),
        "trial": found.trial,
        "f": found.f.to_rows(),
        "argmin": r.argmin.matrix().to_rows(),
        "min_value": r.min_value,
        "polar_value": r.polar_value,
        "gap": r.gap,
    });
    let path = fixture_path();
    if std::env::var_os("GRIOLI_WRITE_FIXTURES").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).map_err(|e| e.to_string())?;
        std::fs::write(&path, serde_json::to_string_pretty(&record).unwrap() + "\n").map_err(|e| e.to_string())?;
    }
    let stored: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(&path).map_err(|e| format!("reading {}: {e}", path.display()))?,
    )
    .map_err(|e| e.to_string())?;
    if stored != record {
        return Err(format!("search result differs from stored fixture {}", path.display()));
    }

    // Re-verify the stored deformation from scratch.
    let rows = |key: &str| -> Vec<Vec<f64>> { serde_json::from_value(stored[key].clone()).unwrap() };
    let f = SquareMatrix::from_rows(&rows("f")).unwrap();
    let q = RotationMatrix::new(SquareMatrix::from_rows(&rows("argmin")).unwrap()).map_err(|e| e.to_string())?;
    let min = euclidean_energy(&f, &q, &w);
    let u = polar_svd(&f).unwrap();
    let polar = w.mu() * (*u.stretch().matrix() - SquareMatrix::identity(3)).frobenius_norm_sq();
    let gap = polar - min;
    let rel = gap / (1.0 + min);
    let stored_min = stored["min_value"].as_f64().unwrap();
    check(
        (min - stored_min).abs() <= 1e-12 && rel >= 1e-3,
        format!("trial {} of {}: polar {polar:.6}, min {min:.6}, relative gap {rel:.3e}", found.trial, search.trials),
    )
}

fn isotropization() -> Outcome {
    let mut rng = stream_rng(9, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let g = gaussian_matrix(&mut rng, 3);
        let mu = uniform(&mut rng, 0.1, 10.0);
        let quad = quad_sphere(
            |h| {
                let s = vec3::dot(&g.mul_vec3(h), h);
                0.5 * mu * s * s
            },
            &QuadratureSpec::default(),
        );
        let closed = averaged_energy(&g, mu).map_err(|e| e.to_string())?;
        worst = worst.max((quad - closed).abs() / closed);
    }
    let nu = moduli_from_isotropization(1.0).map_err(|e| e.to_string())?.nu();
    check(worst <= 1e-10 && nu == 0.25, format!("max relative error = {worst:.3e}, nu = {nu}"))
}

fn engine_agreement() -> Outcome {
    let mut rng = stream_rng(10, 0);
    let mut fs = Vec::with_capacity(1000);
    while fs.len() < 1000 {
        let f = orient(gaussian_matrix(&mut rng, 3));
        if cond(&f) <= 1e6 {
            fs.push(f);
        }
    }
    let mut worst_r: f64 = 0.0;
    let mut worst_u: f64 = 0.0;
    for f in &fs {
        let a = polar_svd(f).map_err(|e| e.to_string())?;
        let b = polar_newton(f).map_err(|e| e.to_string())?;
        worst_r = worst_r.max((*a.orthogonal() - *b.orthogonal()).frobenius_norm());
        worst_u = worst_u.max((*a.stretch().matrix() - *b.stretch().matrix()).frobenius_norm() / f.frobenius_norm());
    }
    check(
        worst_r <= 1e-11 && worst_u <= 1e-10,
        format!("max ||dR||_F = {worst_r:.3e}, max ||dU||_F/||F||_F = {worst_u:.3e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 10] = [
        ("ball moments", 1, ball_moments),
        ("Frobenius reduction", 5, frobenius_reduction),
        ("closed-form rigid distance", 30, grioli_closed_form),
        ("lower bound and argmin", 60, grioli_lower_bound),
        ("linearized fit", 10, linearized_fit),
        ("unitarily invariant norms", 60, fan_hoffman),
        ("weighted log optimality", 300, log_optimality),
        ("weighted Euclidean failure", 120, euclidean_failure),
        ("isotropization", 5, isotropization),
        ("engine agreement", 10, engine_agreement),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(*budget);
        let (ok, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} [{}] {name}: {detail} ({:.2} s, budget {budget} s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

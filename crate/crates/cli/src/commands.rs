use std::path::{Path, PathBuf};

use grioli_core::linalg::io::{parse_csv, parse_json};
use grioli_core::linalg::{vec3, SquareMatrix, Vec3};
use grioli_core::log_energy::{find_euclidean_counterexample, CounterexampleSearch, OptimizerConfig};
use grioli_core::polar::{polar_newton_counted, polar_svd, PolarFactors};
use grioli_core::quadrature::BallDomain;
use grioli_core::rigid::{best_rigid, fd_gradient, min_over_rotations_oracle, AffineMap, RotationSampler};
use grioli_core::Error;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::{require, Engine, Oracle};
use crate::report::{matrix, num, nums, Assertion, Report};
use crate::{CliError, Context, Finished};

fn factors(p: &PolarFactors, f: &SquareMatrix) -> Value {
    json!({
        "orthogonal": matrix(p.orthogonal()),
        "proper": p.is_proper(),
        "stretch": matrix(p.stretch().matrix()),
        "stretch_spectrum": nums(p.stretch_spectrum()),
        "residual": num(p.residual(f)),
    })
}

pub fn load_matrix(path: &Path) -> Result<SquareMatrix, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let parsed = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => parse_csv(&text),
        _ => parse_json(&text),
    };
    Ok(parsed?)
}

pub fn decompose(ctx: &Context, input: Option<PathBuf>, engine: Option<Engine>) -> Result<Finished, CliError> {
    let input = require(input.or(ctx.file.input.clone()), "input")?;
    let engine = engine.or(ctx.file.engine).unwrap_or(Engine::Both);
    let f = load_matrix(&input)?;
    let mut report = Report::new(
        "decompose",
        json!({ "input": input.display().to_string(), "engine": engine }),
    );
    report.set("input", matrix(&f));
    report.set("det", num(f.det()));
    let svd = match engine {
        Engine::Svd | Engine::Both => Some(polar_svd(&f)?),
        Engine::Newton => None,
    };
    let newton = match engine {
        Engine::Newton => Some(polar_newton_counted(&f)?),
        Engine::Both => match polar_newton_counted(&f) {
            Ok(r) => Some(r),
            Err(Error::NonOrientation(det)) => {
                report.set("newton", json!({ "skipped": format!("det F = {det} is not positive") }));
                None
            }
            Err(e) => return Err(e.into()),
        },
        Engine::Svd => None,
    };
    if let Some(p) = &svd {
        report.set("svd", factors(p, &f));
    }
    if let Some((p, iterations)) = &newton {
        let mut v = factors(p, &f);
        v["iterations"] = json!(iterations);
        report.set("newton", v);
    }
    if let (Some(a), Some((b, _))) = (&svd, &newton) {
        let dr = (*a.orthogonal() - *b.orthogonal()).frobenius_norm();
        let du = (*a.stretch().matrix() - *b.stretch().matrix()).frobenius_norm();
        report.set("disagreement", json!({ "orthogonal": num(dr), "stretch": num(du) }));
        report.check(Assertion::new("engine disagreement in R", dr, 1e-11));
        report.check(Assertion::new("engine disagreement in U over ||F||", du / f.frobenius_norm(), 1e-10));
    }
    Ok(Finished::from_report(report))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldSpec {
    #[serde(default)]
    constant: Vec3,
    linear: Vec<Vec<f64>>,
    /// `quadratic[i]` is the Hessian of component `i`.
    #[serde(default)]
    quadratic: Option<[Vec<Vec<f64>>; 3]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    #[serde(default)]
    center: Vec3,
    translation: Option<Vec3>,
    linear: Option<Vec<Vec<f64>>>,
    field: Option<FieldSpec>,
}

fn square3(rows: &[Vec<f64>]) -> Result<SquareMatrix, CliError> {
    let m = SquareMatrix::from_rows(rows)?;
    if m.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: m.dim() }.into());
    }
    Ok(m)
}

fn load_map(path: &Path, fd_step: f64) -> Result<(AffineMap, Vec3, &'static str), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file: MapFile =
        serde_json::from_str(&text).map_err(|e| CliError::Core(Error::Parse(format!("{}: {e}", path.display()))))?;
    let c = file.center;
    match (file.linear, file.translation, file.field) {
        (Some(linear), Some(p), None) => Ok((AffineMap::new(square3(&linear)?, p)?, c, "affine")),
        (None, None, Some(field)) => {
            let a = square3(&field.linear)?;
            let hessians = match &field.quadratic {
                Some(h) => Some([square3(&h[0])?, square3(&h[1])?, square3(&h[2])?]),
                None => None,
            };
            let eval = |x: &Vec3| {
                let mut y = vec3::add(&field.constant, &a.mul_vec3(x));
                if let Some(h) = &hessians {
                    for (yi, hi) in y.iter_mut().zip(h) {
                        *yi += 0.5 * vec3::dot(x, &hi.mul_vec3(x));
                    }
                }
                y
            };
            let grad = fd_gradient(eval, &c, fd_step)?;
            Ok((AffineMap::new(grad, eval(&c))?, c, "field"))
        }
        _ => Err(CliError::Core(Error::Parse(format!(
            "{}: give either `linear` and `translation`, or `field`",
            path.display()
        )))),
    }
}

pub struct FitArgs {
    pub input: Option<PathBuf>,
    pub radius: Option<f64>,
    pub oracle: Option<Oracle>,
    pub samples: Option<usize>,
    pub resolution: Option<usize>,
    pub fd_step: Option<f64>,
}

pub fn fit(ctx: &Context, args: FitArgs) -> Result<Finished, CliError> {
    let cfg = &ctx.file;
    let input = require(args.input.or(cfg.input.clone()), "input")?;
    let radius = args.radius.or(cfg.radius).unwrap_or(1.0);
    let oracle = args.oracle.or(cfg.oracle).unwrap_or(Oracle::Haar);
    let samples = args.samples.or(cfg.samples).unwrap_or(10_000);
    let resolution = args.resolution.or(cfg.resolution).unwrap_or(24);
    let fd_step = args.fd_step.or(cfg.fd_step).unwrap_or(1e-5);
    if !(fd_step > 0.0 && fd_step.is_finite()) {
        return Err(Error::InvalidParameter(format!("fd_step must be positive, got {fd_step}")).into());
    }
    if oracle == Oracle::Grid && resolution < 2 {
        return Err(Error::InvalidParameter(format!("grid resolution must be at least 2, got {resolution}")).into());
    }
    let (map, center, source) = load_map(&input, fd_step)?;
    let ball = BallDomain::new(center, radius)?;
    let mut report = Report::new(
        "fit",
        json!({
            "input": input.display().to_string(),
            "radius": num(radius),
            "oracle": oracle,
            "samples": samples,
            "resolution": resolution,
            "fd_step": num(fd_step),
            "seed": ctx.seed,
        }),
    );
    report.set("source", json!(source));
    report.set("linear", matrix(map.linear()));
    report.set("translation", nums(&map.image()));
    report.set("center", nums(&center));
    let fit = best_rigid(&map, &ball)?;
    let spectrum = polar_svd(map.linear())?.stretch_spectrum().to_vec();
    report.set(
        "best",
        json!({
            "rotation": matrix(fit.best.rotation().matrix()),
            "translation": nums(&fit.best.translation()),
            "centered_translation": nums(&fit.best.centered_translation(&center)),
        }),
    );
    report.set("min_distance", num(fit.min_distance));
    report.set("stretch_spectrum", nums(&spectrum));
    report.set("residual_translation", nums(&fit.residual_translation));
    report.set("relative_rotation", matrix(fit.relative_rotation.matrix()));
    let residual = vec3::norm(&fit.residual_translation)
        + (*fit.relative_rotation.matrix() - SquareMatrix::identity(3)).frobenius_norm();
    report.check(Assertion::new("optimum residuals", residual, 1e-10));

    let sampler = match oracle {
        Oracle::Haar => Some(RotationSampler::Haar { count: samples, seed: ctx.seed }),
        Oracle::Grid => Some(RotationSampler::AxisAngleGrid { resolution }),
        Oracle::None => None,
    };
    if let Some(sampler) = sampler {
        let res = min_over_rotations_oracle(&map, &ball, &sampler, ctx.execution)?;
        report.set(
            "oracle",
            json!({
                "samples": res.samples,
                "value": num(res.value),
                "gap": num(res.min_gap),
                "rotation": matrix(res.best.rotation().matrix()),
            }),
        );
        report.check(Assertion::at_least("oracle gap over closed-form minimum", res.min_gap, -1e-12));
    }
    Ok(Finished::from_report(report))
}

pub fn counterexample(
    ctx: &Context,
    mu: Option<f64>,
    mu_c: Option<f64>,
    trials: Option<usize>,
) -> Result<Finished, CliError> {
    let weights = ctx.file.weights(mu, mu_c, 0.1)?;
    let trials = trials.or(ctx.file.trials).unwrap_or(500);
    let optimizer = OptimizerConfig { execution: ctx.execution, ..ctx.file.optimizer.unwrap_or_default() }.validated()?;
    let search = CounterexampleSearch { seed: ctx.seed, trials };
    let mut report = Report::new(
        "counterexample",
        json!({
            "mu": num(weights.mu()),
            "mu_c": num(weights.mu_c()),
            "trials": trials,
            "seed": ctx.seed,
            "optimizer": {
                "random_starts": optimizer.random_starts,
                "tolerance": num(optimizer.tolerance),
                "max_iterations": optimizer.max_iterations,
                "initial_step": num(optimizer.initial_step),
                "seed": optimizer.seed,
            },
        }),
    );
    match find_euclidean_counterexample(&weights, &search, &optimizer) {
        Ok(found) => {
            let r = &found.report;
            let polar = polar_svd(&found.f)?;
            report.set("found", json!(true));
            report.set("trial", json!(found.trial));
            report.set("f", matrix(&found.f));
            report.set("polar_rotation", matrix(polar.orthogonal()));
            report.set("argmin", matrix(r.argmin.matrix()));
            report.set("polar_value", num(r.polar_value));
            report.set("min_value", num(r.min_value));
            report.set("gap", num(r.gap));
            report.set("relative_gap", num(r.gap / (1.0 + r.min_value)));
            report.set("converged", json!(r.converged));
            report.set("best_start", json!(r.best_start));
            report.check(Assertion::at_least("relative gap", r.gap / (1.0 + r.min_value), 1e-3));
            Ok(Finished::from_report(report))
        }
        Err(Error::NotFound { trials, seed }) => {
            report.set("found", json!(false));
            report.set("trials_run", json!(trials));
            report.set("search_seed", json!(seed));
            Ok(Finished { report, code: 4 })
        }
        Err(e) => Err(e.into()),
    }
}

//! Weighted logarithmic and Euclidean energies over SO(3).
//!
//! Both energies depend on `F` and `Q` only through `X = Q^T F`:
//!
//! ```text
//! log:       mu ||sym Log X||^2     + mu_c ||skw Log X||^2
//! euclidean: mu ||sym(X - I)||^2    + mu_c ||skw(X - I)||^2
//! ```
//!
//! The polar factor minimizes the first for every `mu > 0`, `mu_c >= 0`, with minimum
//! `mu ||log U||^2`. For the second it is optimal when `mu_c = mu` but in general not
//! when `0 < mu_c < mu`. Only the principal logarithm is used; orientations where
//! `Q^T F` has an eigenvalue on the closed negative real axis are assigned `+inf` by
//! the optimizer.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    exp_so3, haar_rotation_from, haar_rotation_indexed, log_so3, principal_log, AxisAngle, RotationMatrix,
    SquareMatrix,
};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::par::Execution;
use crate::polar::polar_svd;
use crate::rng::{stream_rng, uniform};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyWeights {
    mu: f64,
    mu_c: f64,
}

impl EnergyWeights {
    pub fn new(mu: f64, mu_c: f64) -> Result<Self> {
        if !mu.is_finite() || !mu_c.is_finite() {
            return Err(Error::InvalidWeights { mu, mu_c, reason: "weights must be finite" });
        }
        if mu <= 0.0 {
            return Err(Error::InvalidWeights { mu, mu_c, reason: "mu must be positive" });
        }
        if mu_c < 0.0 {
            return Err(Error::InvalidWeights { mu, mu_c, reason: "mu_c must be nonnegative" });
        }
        Ok(EnergyWeights { mu, mu_c })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn mu_c(&self) -> f64 {
        self.mu_c
    }

    fn weigh(&self, m: &SquareMatrix) -> f64 {
        self.mu * m.sym().frobenius_norm_sq() + self.mu_c * m.skw().frobenius_norm_sq()
    }
}

/// `mu ||sym Log(Q^T F)||^2 + mu_c ||skw Log(Q^T F)||^2` with the principal logarithm.
pub fn log_energy(f: &SquareMatrix, q: &RotationMatrix, w: &EnergyWeights) -> Result<f64> {
    check_dims(f, q)?;
    Ok(w.weigh(&principal_log(&q.matrix().tr_mul(f))?))
}

/// `mu ||sym(Q^T F - I)||^2 + mu_c ||skw(Q^T F - I)||^2`.
///
/// # Panics
/// If `F` and `Q` differ in dimension.
pub fn euclidean_energy(f: &SquareMatrix, q: &RotationMatrix, w: &EnergyWeights) -> f64 {
    assert_eq!(f.dim(), q.dim(), "dimension mismatch");
    w.weigh(&(q.matrix().tr_mul(f) - SquareMatrix::identity(f.dim())))
}

fn check_dims(f: &SquareMatrix, q: &RotationMatrix) -> Result<()> {
    if f.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: q.dim() });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Log,
    Euclidean,
}

impl Objective {
    /// Objective value, `+inf` where the principal logarithm is undefined.
    pub fn evaluate(self, f: &SquareMatrix, q: &RotationMatrix, w: &EnergyWeights) -> f64 {
        match self {
            Objective::Log => log_energy(f, q, w).unwrap_or(f64::INFINITY),
            Objective::Euclidean => euclidean_energy(f, q, w),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Haar-random starts in addition to the polar factor and the identity.
    pub random_starts: usize,
    /// Simplex diameter at which a run counts as converged.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub initial_step: f64,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            random_starts: 30,
            tolerance: 1e-10,
            max_iterations: 5000,
            initial_step: 0.25,
            seed: 0,
            execution: Execution::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn validated(self) -> Result<Self> {
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if !(self.initial_step > 0.0) || !self.initial_step.is_finite() {
            return Err(Error::InvalidParameter(format!("initial_step must be positive, got {}", self.initial_step)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be positive".into()));
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationReport {
    pub objective: Objective,
    pub argmin: RotationMatrix,
    pub min_value: f64,
    pub polar_value: f64,
    /// `polar_value - min_value`.
    pub gap: f64,
    pub starts_used: usize,
    /// Whether the winning start met the tolerance.
    pub converged: bool,
    /// 0 is the polar factor, 1 the identity, `2 + k` the k-th random start.
    pub best_start: usize,
    pub evaluations: usize,
}

/// Start points in the axis-angle chart, in tie-breaking order.
pub fn start_points(polar: &RotationMatrix, config: &OptimizerConfig) -> Vec<AxisAngle> {
    let mut starts = vec![log_so3(polar), AxisAngle::zero()];
    starts.extend((0..config.random_starts).map(|k| log_so3(&haar_rotation_indexed(3, config.seed, k as u64))));
    starts
}

/// Multi-start Nelder–Mead over `w in R^3`, evaluated at `exp(wrap(w))`.
pub fn minimize_over_so3(
    objective: Objective,
    f: &SquareMatrix,
    w: &EnergyWeights,
    config: &OptimizerConfig,
) -> Result<OptimizationReport> {
    let config = config.validated()?;
    if f.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: f.dim() });
    }
    let det = f.det();
    if det <= 0.0 {
        return Err(Error::NonOrientation(det));
    }
    let polar = polar_svd(f)?.rotation().ok_or(Error::NonOrientation(det))?;
    let polar_value = objective.evaluate(f, &polar, w);
    let starts = start_points(&polar, &config);
    let value_at = |x: &[f64]| objective.evaluate(f, &exp_so3(&AxisAngle::wrapped([x[0], x[1], x[2]])), w);
    let coarse = NelderMeadOptions {
        initial_step: config.initial_step,
        diameter_tol: config.tolerance,
        max_iterations: config.max_iterations,
    };
    let fine = NelderMeadOptions { initial_step: 1e-3 * config.initial_step, ..coarse };

    let runs = config.execution.map(starts.len(), |i| {
        let first = nelder_mead(value_at, &starts[i].vector(), &coarse);
        // A restart rebuilds the simplex; this catches runs that collapsed early.
        let second = nelder_mead(value_at, &first.x, &fine);
        let evaluations = first.evaluations + second.evaluations;
        let best = if second.value <= first.value { second } else { first };
        (best, evaluations)
    });
    let evaluations = runs.iter().map(|(_, e)| e).sum();
    let (best_start, (best, _)) = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.0.value.total_cmp(&b.0.value).then(i.cmp(j)))
        .expect("at least two starts");
    let argmin = exp_so3(&AxisAngle::wrapped([best.x[0], best.x[1], best.x[2]]));
    let min_value = objective.evaluate(f, &argmin, w);
    Ok(OptimizationReport {
        objective,
        argmin,
        min_value,
        polar_value,
        gap: polar_value - min_value,
        starts_used: starts.len(),
        converged: best.converged,
        best_start,
        evaluations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogOptimalityCheck {
    pub report: OptimizationReport,
    /// `mu ||log U||_F^2`.
    pub closed_form: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogOptimalityFailure {
    pub f: SquareMatrix,
    pub weights: EnergyWeights,
    pub report: OptimizationReport,
    pub closed_form: f64,
}

impl fmt::Display for LogOptimalityFailure {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            out,
            "F = {:?}, mu = {}, mu_c = {}: optimized minimum {:.12e}, closed form {:.12e}, gap {:.3e}",
            self.f,
            self.weights.mu,
            self.weights.mu_c,
            self.report.min_value,
            self.closed_form,
            self.report.gap
        )
    }
}

/// Minimizes the log energy and checks the result against `mu ||log U||^2`:
/// `|min - closed| <= 1e-6 (1 + min)` and `gap >= -1e-10`.
pub fn verify_log_optimality(f: &SquareMatrix, w: &EnergyWeights, config: &OptimizerConfig) -> Result<LogOptimalityCheck> {
    let report = minimize_over_so3(Objective::Log, f, w, config)?;
    let closed_form = w.mu * polar_svd(f)?.stretch().log().frobenius_norm_sq();
    let ok = (report.min_value - closed_form).abs() <= 1e-6 * (1.0 + report.min_value) && report.gap >= -1e-10;
    if ok {
        Ok(LogOptimalityCheck { report, closed_form })
    } else {
        Err(Error::LogOptimality(Box::new(LogOptimalityFailure { f: *f, weights: *w, report, closed_form })))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleSearch {
    pub seed: u64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub f: SquareMatrix,
    pub trial: usize,
    pub report: OptimizationReport,
}

/// Trial deformation `F = R0 V diag(l) V^T` with `l` in `[0.1, 5]` and
/// `l_max / l_min` mostly at least 10.
pub fn counterexample_trial(seed: u64, trial: u64) -> SquareMatrix {
    let mut rng = stream_rng(seed, trial);
    let r0 = haar_rotation_from(&mut rng, 3);
    let v = haar_rotation_from(&mut rng, 3);
    let l1 = uniform(&mut rng, 2.0, 5.0);
    let l3 = (l1 / uniform(&mut rng, 10.0, 50.0)).max(0.1);
    let l2 = uniform(&mut rng, l3.ln(), l1.ln()).exp();
    let u = *v.matrix() * SquareMatrix::from_diag(&[l1, l2, l3]) * v.matrix().transpose();
    *r0.matrix() * u.sym()
}

pub fn is_counterexample(report: &OptimizationReport) -> bool {
    report.gap > 1e-3 * (1.0 + report.min_value)
}

const TRIAL_BATCH: usize = 8;

/// Searches seeded random deformations for one where the polar factor misses the
/// minimum of the weighted Euclidean energy by a relative gap above `1e-3`.
/// Requires `0 < mu_c < mu`.
pub fn find_euclidean_counterexample(
    w: &EnergyWeights,
    search: &CounterexampleSearch,
    config: &OptimizerConfig,
) -> Result<Counterexample> {
    if !(w.mu_c > 0.0 && w.mu_c < w.mu) {
        return Err(Error::InvalidWeights { mu: w.mu, mu_c: w.mu_c, reason: "requires 0 < mu_c < mu" });
    }
    search_euclidean_gap(w, search, config)
}

/// [`find_euclidean_counterexample`] without the weight precondition. The first trial (by
/// index) meeting the gap criterion is returned whatever the execution mode.
pub fn search_euclidean_gap(
    w: &EnergyWeights,
    search: &CounterexampleSearch,
    config: &OptimizerConfig,
) -> Result<Counterexample> {
    let mut start = 0;
    while start < search.trials {
        let end = search.trials.min(start + TRIAL_BATCH);
        let batch = config.execution.map(end - start, |k| {
            let trial = start + k;
            let f = counterexample_trial(search.seed, trial as u64);
            minimize_over_so3(Objective::Euclidean, &f, w, config).map(|report| (trial, f, report))
        });
        for outcome in batch {
            let (trial, f, report) = outcome?;
            if is_counterexample(&report) {
                return Ok(Counterexample { f, trial, report });
            }
        }
        start = end;
    }
    Err(Error::NotFound { trials: search.trials, seed: search.seed })
}

//! Derivative-free Nelder–Mead minimization.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
    /// Stop once every vertex lies within this distance of the best one.
    pub diameter_tol: f64,
    pub max_iterations: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions { initial_step: 0.25, diameter_tol: 1e-10, max_iterations: 5000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn affine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Minimizes `f` from `x0`. Non-finite values are treated as `+inf`, so the objective
/// may exclude regions by returning infinity. The best vertex value never increases,
/// so the result is no worse than `f(x0)`.
pub fn nelder_mead<F>(f: F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let v = eval(&x);
        simplex.push((x, v));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    order(&mut simplex);

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        let diameter = simplex[1..].iter().map(|(x, _)| dist(x, &simplex[0].0)).fold(0.0, f64::max);
        if diameter < opts.diameter_tol {
            converged = true;
            break;
        }
        iterations += 1;
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let (worst, f_worst) = simplex[n].clone();
        let f_best = simplex[0].1;
        let f_second = simplex[n - 1].1;

        let xr = affine(&centroid, &worst, -1.0);
        let fr = eval(&xr);
        if fr < f_best {
            let xe = affine(&centroid, &worst, -2.0);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < f_second {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < f_worst {
                let xc = affine(&centroid, &worst, -0.5);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = affine(&centroid, &worst, 0.5);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < f_worst.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let x = affine(&best, &vertex.0, 0.5);
                    let v = eval(&x);
                    *vertex = (x, v);
                }
            }
        }
        order(&mut simplex);
    }
    let (x, value) = simplex.swap_remove(0);
    NelderMeadResult { x, value, iterations, evaluations, converged }
}

//! One-sided cyclic Jacobi SVD and the unitarily invariant norms built on it.

use serde::{Deserialize, Serialize};

use super::matrix::SquareMatrix;

const MAX_SWEEPS: usize = 80;

/// `A = U diag(sigma) V^T`, singular values descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub u: SquareMatrix,
    pub singular_values: Vec<f64>,
    pub v: SquareMatrix,
}

/// Hestenes one-sided Jacobi: rotate column pairs of `A V` until every pair is
/// orthogonal to working precision.
///
/// A pair is skipped once `|g_pq| <= n eps sqrt(g_pp g_qq)`. That is tighter than the
/// absolute stop `|g_pq| < 1e-14 ||A||_F^2` and keeps small singular values accurate.
/// Sign convention: the largest-magnitude entry of every right singular vector is
/// positive.
pub fn svd(a: &SquareMatrix) -> Svd {
    let n = a.dim();
    let mut g = *a;
    let mut v = SquareMatrix::identity(n);
    let tol = n as f64 * f64::EPSILON;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..n {
                    alpha += g[(i, p)] * g[(i, p)];
                    beta += g[(i, q)] * g[(i, q)];
                    gamma += g[(i, p)] * g[(i, q)];
                }
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut g, &mut v] {
                    for i in 0..n {
                        let xp = m[(i, p)];
                        let xq = m[(i, q)];
                        m[(i, p)] = c * xp - s * xq;
                        m[(i, q)] = s * xp + c * xq;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| g[(i, j)] * g[(i, j)]).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));

    let sigma_max = norms[order[0]];
    let mut u = SquareMatrix::zeros(n);
    let mut vs = SquareMatrix::zeros(n);
    let mut singular_values = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        let sigma = norms[j];
        singular_values.push(sigma);
        let mut vcol = v.col(j);
        let mut ucol: Vec<f64> = if sigma > sigma_max * 1e-300 && sigma > 0.0 {
            (0..n).map(|i| g[(i, j)] / sigma).collect()
        } else {
            missing.push(k);
            vec![0.0; n]
        };
        let lead = vcol.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if lead < 0.0 {
            vcol.iter_mut().for_each(|x| *x = -*x);
            ucol.iter_mut().for_each(|x| *x = -*x);
        }
        vs.set_col(k, &vcol);
        u.set_col(k, &ucol);
    }
    for k in missing {
        complete_column(&mut u, k);
    }
    Svd { u, singular_values, v: vs }
}

/// Fills column `k` with a unit vector orthogonal to the other nonzero columns.
fn complete_column(u: &mut SquareMatrix, k: usize) {
    let n = u.dim();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for e in 0..n {
        let mut x = vec![0.0; n];
        x[e] = 1.0;
        for _ in 0..2 {
            for j in (0..n).filter(|&j| j != k) {
                let c = u.col(j);
                let d: f64 = c.iter().zip(&x).map(|(a, b)| a * b).sum();
                x.iter_mut().zip(&c).for_each(|(xi, ci)| *xi -= d * ci);
            }
        }
        let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        if best.as_ref().is_none_or(|(b, _)| norm > *b) {
            best = Some((norm, x));
        }
    }
    let (norm, x) = best.expect("dim >= 2");
    let x: Vec<f64> = x.iter().map(|a| a / norm).collect();
    u.set_col(k, &x);
}

pub fn singular_values(a: &SquareMatrix) -> Vec<f64> {
    svd(a).singular_values
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Frobenius,
    Spectral,
    Nuclear,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::Frobenius, NormKind::Spectral, NormKind::Nuclear];

    pub fn of_singular_values(self, sigma: &[f64]) -> f64 {
        match self {
            NormKind::Frobenius => sigma.iter().map(|s| s * s).sum::<f64>().sqrt(),
            NormKind::Spectral => sigma.iter().copied().fold(0.0, f64::max),
            NormKind::Nuclear => sigma.iter().sum(),
        }
    }
}

/// Unitarily invariant norm evaluated from the singular values.
pub fn ui_norm(a: &SquareMatrix, kind: NormKind) -> f64 {
    kind.of_singular_values(&singular_values(a))
}

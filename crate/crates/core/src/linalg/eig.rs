//! Eigenvalue routines: cyclic Jacobi for symmetric matrices and a Hessenberg
//! double-shift QR for the (possibly complex) spectrum of a general matrix.

use super::matrix::SquareMatrix;
use crate::error::{Error, Result};

/// Symmetric eigendecomposition `A = V diag(values) V^T`, values descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: SquareMatrix,
}

impl SymmetricEigen {
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> SquareMatrix {
        let n = self.vectors.dim();
        let v = &self.vectors;
        SquareMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| v[(i, k)] * f(self.values[k]) * v[(j, k)]).sum()
        })
    }
}

/// Cyclic Jacobi on the symmetric part of `a`.
pub fn symmetric_eigen(a: &SquareMatrix) -> SymmetricEigen {
    let n = a.dim();
    let mut m = a.sym();
    let mut v = SquareMatrix::identity(n);

    for _ in 0..100 {
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0
                    || apq.abs() <= f64::EPSILON * (m[(p, p)] * m[(q, q)]).abs().sqrt() * 0.5
                {
                    continue;
                }
                rotated = true;
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = if theta.is_infinite() {
                    0.5 / theta
                } else {
                    let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sgn / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = SquareMatrix::from_fn(n, |i, k| v[(i, order[k])]);
    SymmetricEigen { values, vectors }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Eigenvalue {
    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Reduction to upper Hessenberg form by stabilized elementary similarities.
fn hessenberg(a: &mut SquareMatrix) {
    let n = a.dim();
    for m in 1..n - 1 {
        let mut x = 0.0f64;
        let mut piv = m;
        for j in m..n {
            if a[(j, m - 1)].abs() > x.abs() {
                x = a[(j, m - 1)];
                piv = j;
            }
        }
        if piv != m {
            for j in m - 1..n {
                let t = a[(piv, j)];
                a[(piv, j)] = a[(m, j)];
                a[(m, j)] = t;
            }
            for j in 0..n {
                let t = a[(j, piv)];
                a[(j, piv)] = a[(j, m)];
                a[(j, m)] = t;
            }
        }
        if x != 0.0 {
            for i in m + 1..n {
                let mut y = a[(i, m - 1)];
                if y != 0.0 {
                    y /= x;
                    a[(i, m - 1)] = 0.0;
                    for j in m..n {
                        a[(i, j)] -= y * a[(m, j)];
                    }
                    for j in 0..n {
                        a[(j, m)] += y * a[(j, i)];
                    }
                }
            }
        }
    }
}

/// All eigenvalues of a general real matrix (Francis double-shift QR on the
/// Hessenberg form). Order is unspecified.
pub fn eigenvalues(a: &SquareMatrix) -> Result<Vec<Eigenvalue>> {
    a.check_finite()?;
    let n = a.dim();
    let mut h = *a;
    hessenberg(&mut h);
    let at = |h: &SquareMatrix, i: isize, j: isize| h[(i as usize, j as usize)];

    let mut out = vec![Eigenvalue { re: 0.0, im: 0.0 }; n];
    let eps = f64::EPSILON;
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += h[(i, j)].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    let (mut p, mut q, mut r) = (0.0f64, 0.0f64, 0.0f64);
    let (mut x, mut y, mut z, mut w, mut s);
    while nn >= 0 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l > 0 {
                s = at(&h, l - 1, l - 1).abs() + at(&h, l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if at(&h, l, l - 1).abs() <= eps * s {
                    h[(l as usize, l as usize - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            x = at(&h, nn, nn);
            if l == nn {
                out[nn as usize] = Eigenvalue { re: x + t, im: 0.0 };
                nn -= 1;
            } else {
                y = at(&h, nn - 1, nn - 1);
                w = at(&h, nn, nn - 1) * at(&h, nn - 1, nn);
                if l == nn - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + z.copysign(p);
                        let hi = x + z;
                        let lo = if z != 0.0 { x - w / z } else { hi };
                        out[nn as usize - 1] = Eigenvalue { re: hi, im: 0.0 };
                        out[nn as usize] = Eigenvalue { re: lo, im: 0.0 };
                    } else {
                        out[nn as usize] = Eigenvalue { re: x + p, im: -z };
                        out[nn as usize - 1] = Eigenvalue { re: x + p, im: z };
                    }
                    nn -= 2;
                } else {
                    if its == 60 {
                        return Err(Error::NoConvergence("Hessenberg QR"));
                    }
                    if its == 10 || its == 20 || its == 40 {
                        t += x;
                        for i in 0..=nn as usize {
                            h[(i, i)] -= x;
                        }
                        s = at(&h, nn, nn - 1).abs() + at(&h, nn - 1, nn - 2).abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    while m >= l {
                        z = at(&h, m, m);
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / at(&h, m + 1, m) + at(&h, m, m + 1);
                        q = at(&h, m + 1, m + 1) - z - r - s;
                        r = at(&h, m + 2, m + 1);
                        s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = at(&h, m, m - 1).abs() * (q.abs() + r.abs());
                        let v = p.abs()
                            * (at(&h, m - 1, m - 1).abs() + z.abs() + at(&h, m + 1, m + 1).abs());
                        if u <= eps * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m..nn - 1 {
                        h[(i as usize + 2, i as usize)] = 0.0;
                        if i != m {
                            h[(i as usize + 2, i as usize - 1)] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = at(&h, k, k - 1);
                            q = at(&h, k + 1, k - 1);
                            r = if k + 1 != nn { at(&h, k + 2, k - 1) } else { 0.0 };
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        s = (p * p + q * q + r * r).sqrt().copysign(p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    let (ku, km) = (k as usize, k as usize - 1);
                                    h[(ku, km)] = -h[(ku, km)];
                                }
                            } else {
                                h[(k as usize, k as usize - 1)] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                let (ku, ju) = (k as usize, j as usize);
                                p = h[(ku, ju)] + q * h[(ku + 1, ju)];
                                if k + 1 != nn {
                                    p += r * h[(ku + 2, ju)];
                                    h[(ku + 2, ju)] -= p * z;
                                }
                                h[(ku + 1, ju)] -= p * y;
                                h[(ku, ju)] -= p * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                let (iu, ku) = (i as usize, k as usize);
                                p = x * h[(iu, ku)] + y * h[(iu, ku + 1)];
                                if k + 1 != nn {
                                    p += z * h[(iu, ku + 2)];
                                    h[(iu, ku + 2)] -= p * r;
                                }
                                h[(iu, ku + 1)] -= p * q;
                                h[(iu, ku)] -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if l + 1 >= nn {
                break;
            }
        }
    }
    Ok(out)
}

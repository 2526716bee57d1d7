//! Compressed sparse rows and Krylov solvers with Jacobi preconditioning.

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Csr {
    pub fn with_capacity(n: usize, nnz: usize) -> Self {
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        Csr {
            n,
            row_ptr,
            cols: Vec::with_capacity(nnz),
            vals: Vec::with_capacity(nnz),
        }
    }

    /// Appends a row; entries with equal columns are merged.
    pub fn push_row(&mut self, entries: &mut Vec<(usize, f64)>) {
        entries.sort_by_key(|e| e.0);
        let mut last: Option<usize> = None;
        for &(c, v) in entries.iter() {
            if last == Some(c) {
                *self.vals.last_mut().unwrap() += v;
            } else {
                self.cols.push(c);
                self.vals.push(v);
                last = Some(c);
            }
        }
        self.row_ptr.push(self.cols.len());
        entries.clear();
    }

    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate().take(self.n) {
            let mut s = 0.0;
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.vals[p] * x[self.cols[p]];
            }
            *out = s;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .find(|&p| self.cols[p] == r)
                    .map_or(0.0, |p| self.vals[p])
            })
            .collect()
    }

    /// `b - A x`.
    pub fn residual(&self, x: &[f64], b: &[f64]) -> Vec<f64> {
        let mut ax = vec![0.0; self.n];
        self.mul(x, &mut ax);
        b.iter().zip(&ax).map(|(b, a)| b - a).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrylovStats {
    pub iterations: usize,
    pub residual: f64,
}

fn linf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Largest absolute row sum.
fn norm_inf(a: &Csr) -> f64 {
    (0..a.n)
        .map(|r| a.vals[a.row_ptr[r]..a.row_ptr[r + 1]].iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Target actually enforced: `tol`, raised to the round-off floor `100 ε (‖A‖ ‖x‖ + ‖b‖)`.
fn effective_tol(tol: f64, a_norm: f64, x: &[f64], b_norm: f64) -> f64 {
    tol.max(100.0 * f64::EPSILON * (a_norm * linf(x) + b_norm))
}

/// Gives up when the best residual has not dropped by 1% over a window of iterations.
struct Stall {
    best: f64,
    since: usize,
    window: usize,
}

impl Stall {
    fn new(n: usize, res: f64) -> Self {
        Stall {
            best: res,
            since: 0,
            window: 1000 + 10 * (n as f64).sqrt() as usize,
        }
    }

    fn stalled(&mut self, res: f64) -> bool {
        if res < 0.99 * self.best {
            self.best = res;
            self.since = 0;
        } else {
            self.since += 1;
        }
        self.since > self.window
    }
}

fn jacobi(a: &Csr) -> Vec<f64> {
    a.diagonal()
        .into_iter()
        .map(|d| if d != 0.0 { 1.0 / d } else { 1.0 })
        .collect()
}

/// Preconditioned conjugate gradients for symmetric positive-definite `a`.
/// Stops when the true residual satisfies `‖b − A x‖_∞ ≤ tol` (or the round-off floor, if larger).
pub fn pcg(a: &Csr, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> Result<KrylovStats> {
    let n = a.n;
    let minv = jacobi(a);
    let (a_norm, b_norm) = (norm_inf(a), linf(b));
    let mut r = a.residual(x, b);
    let mut res = linf(&r);
    let mut stall = Stall::new(n, res);
    if res <= effective_tol(tol, a_norm, x, b_norm) {
        return Ok(KrylovStats {
            iterations: 0,
            residual: res,
        });
    }
    let mut z: Vec<f64> = r.iter().zip(&minv).map(|(r, m)| r * m).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut it = 0;
    while it < max_iter {
        it += 1;
        a.mul(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = linf(&r);
        if res <= effective_tol(tol, a_norm, x, b_norm) {
            // guard against drift of the recursive residual
            r = a.residual(x, b);
            res = linf(&r);
            if res <= effective_tol(tol, a_norm, x, b_norm) {
                return Ok(KrylovStats {
                    iterations: it,
                    residual: res,
                });
            }
        }
        if stall.stalled(res) {
            break;
        }
        for i in 0..n {
            z[i] = r[i] * minv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::LinearSolve {
        iterations: it,
        residual: res,
        tol,
    })
}

/// Jacobi-preconditioned BiCGSTAB for general nonsingular `a`.
pub fn bicgstab(a: &Csr, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> Result<KrylovStats> {
    let n = a.n;
    let minv = jacobi(a);
    let (a_norm, b_norm) = (norm_inf(a), linf(b));
    let mut r = a.residual(x, b);
    let mut res = linf(&r);
    let mut stall = Stall::new(n, res);
    if res <= effective_tol(tol, a_norm, x, b_norm) {
        return Ok(KrylovStats {
            iterations: 0,
            residual: res,
        });
    }
    let mut r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut zz = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut it = 0;
    while it < max_iter {
        it += 1;
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || !rho_new.is_finite() {
            // restart from the current iterate
            r = a.residual(x, b);
            r_hat.copy_from_slice(&r);
            rho = 1.0;
            alpha = 1.0;
            omega = 1.0;
            v.iter_mut().for_each(|e| *e = 0.0);
            p.iter_mut().for_each(|e| *e = 0.0);
            continue;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
            y[i] = p[i] * minv[i];
        }
        a.mul(&y, &mut v);
        let rv = dot(&r_hat, &v);
        if rv == 0.0 {
            break;
        }
        alpha = rho / rv;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if linf(&s) <= effective_tol(tol, a_norm, x, b_norm) {
            for i in 0..n {
                x[i] += alpha * y[i];
            }
            r = a.residual(x, b);
            res = linf(&r);
            if res <= effective_tol(tol, a_norm, x, b_norm) {
                return Ok(KrylovStats {
                    iterations: it,
                    residual: res,
                });
            }
            continue;
        }
        for i in 0..n {
            zz[i] = s[i] * minv[i];
        }
        a.mul(&zz, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for i in 0..n {
            x[i] += alpha * y[i] + omega * zz[i];
            r[i] = s[i] - omega * t[i];
        }
        res = linf(&r);
        if res <= effective_tol(tol, a_norm, x, b_norm) {
            r = a.residual(x, b);
            res = linf(&r);
            if res <= effective_tol(tol, a_norm, x, b_norm) {
                return Ok(KrylovStats {
                    iterations: it,
                    residual: res,
                });
            }
        }
        if omega == 0.0 || stall.stalled(res) {
            break;
        }
    }
    Err(Error::LinearSolve {
        iterations: it,
        residual: res,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize) -> Csr {
        let mut a = Csr::with_capacity(n, 3 * n);
        let mut row = Vec::new();
        for i in 0..n {
            row.push((i, 2.0));
            if i > 0 {
                row.push((i - 1, -1.0));
            }
            if i + 1 < n {
                row.push((i + 1, -1.0));
            }
            a.push_row(&mut row);
        }
        a
    }

    #[test]
    fn cg_solves_tridiagonal() {
        let a = laplace_1d(50);
        let exact: Vec<f64> = (0..50).map(|i| (i as f64 * 0.1).sin()).collect();
        let mut b = vec![0.0; 50];
        a.mul(&exact, &mut b);
        let mut x = vec![0.0; 50];
        let st = pcg(&a, &b, &mut x, 1e-12, 1000).unwrap();
        assert!(st.residual <= 1e-12);
        assert!(x.iter().zip(&exact).all(|(a, b)| (a - b).abs() < 1e-9));
    }

    #[test]
    fn bicgstab_solves_nonsymmetric() {
        let n = 40;
        let mut a = Csr::with_capacity(n, 3 * n);
        let mut row = Vec::new();
        for i in 0..n {
            row.push((i, 3.0));
            if i > 0 {
                row.push((i - 1, -1.5));
            }
            if i + 1 < n {
                row.push((i + 1, -0.5));
            }
            a.push_row(&mut row);
        }
        let exact: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
        let mut b = vec![0.0; n];
        a.mul(&exact, &mut b);
        let mut x = vec![0.0; n];
        bicgstab(&a, &b, &mut x, 1e-12, 1000).unwrap();
        assert!(x.iter().zip(&exact).all(|(a, b)| (a - b).abs() < 1e-10));
    }

    #[test]
    fn iteration_cap_is_reported() {
        let a = laplace_1d(200);
        let b = vec![1.0; 200];
        let mut x = vec![0.0; 200];
        assert!(matches!(
            pcg(&a, &b, &mut x, 1e-14, 3),
            Err(Error::LinearSolve { iterations: 3, .. })
        ));
    }
}

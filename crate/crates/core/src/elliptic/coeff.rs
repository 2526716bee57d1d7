use crate::error::{Error, Result};
use crate::fields::Grid2;
use crate::geom::{self, Vec2};

/// Symmetric matrix field `[[a11, a12], [a12, a22]]` sampled at nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientField {
    grid: Grid2,
    a11: Vec<f64>,
    a12: Vec<f64>,
    a22: Vec<f64>,
    lambda_min: f64,
    lambda_max: f64,
}

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
pub fn eigenvalues(a11: f64, a12: f64, a22: f64) -> (f64, f64) {
    let m = 0.5 * (a11 + a22);
    let d = (0.25 * (a11 - a22).powi(2) + a12 * a12).sqrt();
    (m - d, m + d)
}

impl CoefficientField {
    pub fn new(grid: Grid2, a11: Vec<f64>, a12: Vec<f64>, a22: Vec<f64>) -> Result<Self> {
        for v in [&a11, &a12, &a22] {
            if v.len() != grid.len() {
                return Err(Error::FieldLength {
                    expected: grid.len(),
                    got: v.len(),
                });
            }
        }
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for k in 0..grid.len() {
            let vals = [a11[k], a12[k], a22[k]];
            if !vals.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite(k));
            }
            let (l, h) = eigenvalues(a11[k], a12[k], a22[k]);
            if l <= 0.0 {
                return Err(Error::NotElliptic {
                    node: k,
                    eigenvalue: l,
                });
            }
            lo = lo.min(l);
            hi = hi.max(h);
        }
        Ok(CoefficientField {
            grid,
            a11,
            a12,
            a22,
            lambda_min: lo,
            lambda_max: hi,
        })
    }

    pub fn identity(grid: Grid2) -> Self {
        Self::constant(grid, [1.0, 0.0, 1.0]).expect("identity is elliptic")
    }

    /// Constant matrix given as `[a11, a12, a22]`.
    pub fn constant(grid: Grid2, a: [f64; 3]) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![a[0]; n], vec![a[1]; n], vec![a[2]; n])
    }

    pub fn from_fn(grid: Grid2, f: impl Fn(f64, f64) -> [f64; 3]) -> Result<Self> {
        let n = grid.len();
        let (mut a11, mut a12, mut a22) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for k in 0..n {
            let p = grid.node_point(k);
            let a = f(p[0], p[1]);
            a11.push(a[0]);
            a12.push(a[1]);
            a22.push(a[2]);
        }
        Self::new(grid, a11, a12, a22)
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    #[inline]
    pub fn a11(&self, k: usize) -> f64 {
        self.a11[k]
    }

    #[inline]
    pub fn a12(&self, k: usize) -> f64 {
        self.a12[k]
    }

    #[inline]
    pub fn a22(&self, k: usize) -> f64 {
        self.a22[k]
    }

    /// `[a11, a12, a22]` at node `k`.
    #[inline]
    pub fn at(&self, k: usize) -> [f64; 3] {
        [self.a11[k], self.a12[k], self.a22[k]]
    }

    pub fn has_cross_terms(&self) -> bool {
        self.a12.iter().any(|&v| v != 0.0)
    }

    /// Bilinear interpolation of the entries; `None` outside the box.
    pub fn sample(&self, p: Vec2) -> Option<[f64; 3]> {
        let (i, j, fx, fy) = self.grid.locate(p)?;
        let mut out = [0.0; 3];
        for (di, dj, w) in [
            (0, 0, (1.0 - fx) * (1.0 - fy)),
            (1, 0, fx * (1.0 - fy)),
            (0, 1, (1.0 - fx) * fy),
            (1, 1, fx * fy),
        ] {
            let a = self.at(self.grid.idx(i + di, j + dj));
            for q in 0..3 {
                out[q] += w * a[q];
            }
        }
        Some(out)
    }

    /// Discrete Hölder seminorm of exponent `gamma` over node pairs at most
    /// `reach` cells apart, maximum over the three entries.
    pub fn holder_seminorm(&self, gamma: f64, reach: usize) -> f64 {
        let g = &self.grid;
        let r = reach as isize;
        let mut best = 0.0f64;
        for k in 0..g.len() {
            let (i, j) = g.ij(k);
            let a = self.at(k);
            for dj in 0..=r {
                for di in -r..=r {
                    if dj == 0 && di <= 0 {
                        continue;
                    }
                    let Some((ni, nj)) = g.offset(i, j, di, dj) else { continue };
                    let m = g.idx(ni, nj);
                    let b = self.at(m);
                    let d = geom::dist(g.point(i, j), g.point(ni, nj)).powf(gamma);
                    for q in 0..3 {
                        best = best.max((a[q] - b[q]).abs() / d);
                    }
                }
            }
        }
        best
    }

    /// `<A(k) v, v>`.
    #[inline]
    pub fn quad(&self, k: usize, v: Vec2) -> f64 {
        quad_form(self.at(k), v)
    }
}

#[inline]
pub fn quad_form(a: [f64; 3], v: Vec2) -> f64 {
    a[0] * v[0] * v[0] + 2.0 * a[1] * v[0] * v[1] + a[2] * v[1] * v[1]
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec2;

const MIN_NODES: usize = 8;

/// Uniform node grid over an axis-aligned box with square cells.
///
/// Node `(i, j)` sits at `(x0 + i h, y0 + j h)` and is stored at index `j * nx + i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    nx: usize,
    ny: usize,
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    h: f64,
}

impl Grid2 {
    /// `bbox` is `[x0, y0, x1, y1]`.
    pub fn new(nx: usize, ny: usize, bbox: [f64; 4]) -> Result<Self> {
        let [x0, y0, x1, y1] = bbox;
        if nx < MIN_NODES || ny < MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "node counts must be at least {MIN_NODES}, got {nx}x{ny}"
            )));
        }
        if !bbox.iter().all(|v| v.is_finite()) || x1 <= x0 || y1 <= y0 {
            return Err(Error::InvalidGrid(format!("degenerate box {bbox:?}")));
        }
        let hx = (x1 - x0) / (nx - 1) as f64;
        let hy = (y1 - y0) / (ny - 1) as f64;
        if (hx - hy).abs() > 1e-12 * hx.max(hy) {
            return Err(Error::InvalidGrid(format!(
                "non-square cells: hx = {hx}, hy = {hy}"
            )));
        }
        Ok(Grid2 {
            nx,
            ny,
            x0,
            y0,
            x1,
            y1,
            h: hx,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn bbox(&self) -> [f64; 4] {
        [self.x0, self.y0, self.x1, self.y1]
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.h
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.h
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> Vec2 {
        [self.x(i), self.y(j)]
    }

    #[inline]
    pub fn node_point(&self, k: usize) -> Vec2 {
        let (i, j) = self.ij(k);
        self.point(i, j)
    }

    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    /// Neighbor of `(i, j)` shifted by `(di, dj)`, if it exists.
    #[inline]
    pub fn offset(&self, i: usize, j: usize, di: isize, dj: isize) -> Option<(usize, usize)> {
        let ni = i as isize + di;
        let nj = j as isize + dj;
        if ni < 0 || nj < 0 || ni >= self.nx as isize || nj >= self.ny as isize {
            None
        } else {
            Some((ni as usize, nj as usize))
        }
    }

    /// True if `p` lies in the closed box (with a tolerance of 1e-9 h).
    pub fn contains(&self, p: Vec2) -> bool {
        let eps = 1e-9 * self.h;
        p[0] >= self.x0 - eps && p[0] <= self.x1 + eps && p[1] >= self.y0 - eps && p[1] <= self.y1 + eps
    }

    /// Cell containing `p` with local coordinates in `[0, 1]^2`.
    pub fn locate(&self, p: Vec2) -> Option<(usize, usize, f64, f64)> {
        if !self.contains(p) {
            return None;
        }
        let fx = ((p[0] - self.x0) / self.h).clamp(0.0, (self.nx - 1) as f64);
        let fy = ((p[1] - self.y0) / self.h).clamp(0.0, (self.ny - 1) as f64);
        let i = (fx.floor() as usize).min(self.nx - 2);
        let j = (fy.floor() as usize).min(self.ny - 2);
        Some((i, j, fx - i as f64, fy - j as f64))
    }

    /// Distance from `p` to the box boundary (negative outside).
    pub fn boundary_distance(&self, p: Vec2) -> f64 {
        (p[0] - self.x0)
            .min(self.x1 - p[0])
            .min(p[1] - self.y0)
            .min(self.y1 - p[1])
    }

    /// Same node layout shifted by `(dx, dy)`.
    pub fn translated(&self, dx: f64, dy: f64) -> Grid2 {
        Grid2 {
            x0: self.x0 + dx,
            x1: self.x1 + dx,
            y0: self.y0 + dy,
            y1: self.y1 + dy,
            ..*self
        }
    }

    pub fn same_layout(&self, other: &Grid2) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && self
                .bbox()
                .iter()
                .zip(other.bbox())
                .all(|(a, b)| (a - b).abs() <= 1e-9 * self.h)
    }
}

/// Builds a grid; see [`Grid2::new`].
pub fn make_grid(nx: usize, ny: usize, bbox: [f64; 4]) -> Result<Grid2> {
    Grid2::new(nx, ny, bbox)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_is_derived() {
        let g = make_grid(65, 65, [-1.0, -1.0, 1.0, 1.0]).unwrap();
        assert_eq!(g.h(), 0.03125);
        let g = make_grid(8, 8, [0.0, 0.0, 1.0, 1.0]).unwrap();
        assert!((g.h() - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(
            make_grid(65, 33, [-1.0, -1.0, 1.0, 1.0]),
            Err(Error::InvalidGrid(_))
        ));
        assert!(make_grid(4, 4, [0.0, 0.0, 1.0, 1.0]).is_err());
        assert!(make_grid(9, 9, [1.0, 0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn locate_clamps_to_last_cell() {
        let g = make_grid(9, 9, [0.0, 0.0, 1.0, 1.0]).unwrap();
        let (i, j, fx, fy) = g.locate([1.0, 1.0]).unwrap();
        assert_eq!((i, j), (7, 7));
        assert!((fx - 1.0).abs() < 1e-12 && (fy - 1.0).abs() < 1e-12);
        assert!(g.locate([1.1, 0.5]).is_none());
    }
}

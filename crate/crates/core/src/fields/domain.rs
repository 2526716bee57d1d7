use serde::{Deserialize, Serialize};

use crate::fields::Grid2;
use crate::geom::{self, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec2,
    pub radius: f64,
}

/// Computational domain: the whole grid box, optionally restricted to a ball.
///
/// With a ball, nodes strictly outside are inactive and the circle acts as the
/// outer Dirichlet boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    grid: Grid2,
    ball: Option<Ball>,
}

impl Domain {
    pub fn full(grid: Grid2) -> Self {
        Domain { grid, ball: None }
    }

    pub fn ball(grid: Grid2, center: Vec2, radius: f64) -> Self {
        Domain {
            grid,
            ball: Some(Ball { center, radius }),
        }
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }

    pub fn mask(&self) -> Option<Ball> {
        self.ball
    }

    fn tol(&self) -> f64 {
        1e-9 * self.grid.h()
    }

    /// Center of the domain: ball center, or box midpoint.
    pub fn center(&self) -> Vec2 {
        match self.ball {
            Some(b) => b.center,
            None => {
                let [x0, y0, x1, y1] = self.grid.bbox();
                [0.5 * (x0 + x1), 0.5 * (y0 + y1)]
            }
        }
    }

    /// Radius of the largest ball around [`Domain::center`] inside the domain.
    pub fn inradius(&self) -> f64 {
        match self.ball {
            Some(b) => b.radius.min(self.grid.boundary_distance(b.center)),
            None => self.grid.boundary_distance(self.center()),
        }
    }

    /// Signed distance to the outer boundary (positive inside).
    pub fn boundary_distance(&self, p: Vec2) -> f64 {
        let d = self.grid.boundary_distance(p);
        match self.ball {
            Some(b) => d.min(b.radius - geom::dist(p, b.center)),
            None => d,
        }
    }

    #[inline]
    pub fn is_active(&self, k: usize) -> bool {
        match self.ball {
            None => true,
            Some(b) => geom::dist(self.grid.node_point(k), b.center) <= b.radius + self.tol(),
        }
    }

    /// Active node carrying outer boundary data.
    pub fn is_outer_boundary(&self, k: usize) -> bool {
        let (i, j) = self.grid.ij(k);
        if self.grid.is_boundary(i, j) {
            return self.is_active(k);
        }
        match self.ball {
            None => false,
            Some(b) => {
                let r = geom::dist(self.grid.node_point(k), b.center);
                (r - b.radius).abs() <= self.tol()
            }
        }
    }

    pub fn is_interior(&self, k: usize) -> bool {
        self.is_active(k) && !self.is_outer_boundary(k)
    }

    /// Fraction `theta` in `(0, 1]` along the segment from active node `from` to
    /// inactive node `to` where the ball boundary is crossed.
    pub fn exit_fraction(&self, from: usize, to: usize) -> Option<f64> {
        let b = self.ball?;
        let p = geom::sub(self.grid.node_point(from), b.center);
        let d = geom::sub(self.grid.node_point(to), self.grid.node_point(from));
        // |p + t d| = R
        let a = geom::dot(d, d);
        let bq = 2.0 * geom::dot(p, d);
        let c = geom::dot(p, p) - b.radius * b.radius;
        let disc = bq * bq - 4.0 * a * c;
        if disc < 0.0 {
            return None;
        }
        let t = (-bq + disc.sqrt()) / (2.0 * a);
        Some(t.clamp(0.0, 1.0))
    }

    pub fn active_mask(&self) -> Vec<bool> {
        (0..self.grid.len()).map(|k| self.is_active(k)).collect()
    }

    pub fn with_grid(&self, grid: Grid2) -> Domain {
        Domain { grid, ..*self }
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Domain {
        Domain {
            grid: self.grid.translated(dx, dy),
            ball: self.ball.map(|b| Ball {
                center: [b.center[0] + dx, b.center[1] + dy],
                radius: b.radius,
            }),
        }
    }
}

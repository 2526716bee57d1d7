//! Two-plane solutions and minimax fitting.

use serde::Serialize;

use crate::diagnostics::quadrature::check_ball;
use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::geom::{self, Vec2};

pub const BETA_MAX: f64 = 10.0;

/// `U_β(⟨x − center, ν⟩ + c)` with `U_β(t) = α t⁺ − β t⁻`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoPlane {
    pub beta: f64,
    pub nu: Vec2,
    pub c: f64,
}

impl TwoPlane {
    pub fn new(beta: f64, nu: Vec2, c: f64) -> Result<Self> {
        let n = geom::norm(nu);
        if !(beta >= 0.0) || !beta.is_finite() || !(n > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!("two-plane beta = {beta}, nu = {nu:?}, c = {c}")));
        }
        Ok(TwoPlane {
            beta,
            nu: geom::scale(nu, 1.0 / n),
            c,
        })
    }

    /// Normal at angle `a` from `e_y`, measured clockwise: `ν = (sin a, cos a)`.
    pub fn from_angle(beta: f64, angle: f64, c: f64) -> Self {
        TwoPlane {
            beta,
            nu: [angle.sin(), angle.cos()],
            c,
        }
    }

    pub fn alpha(&self) -> f64 {
        (1.0 + self.beta * self.beta).sqrt()
    }

    pub fn angle(&self) -> f64 {
        self.nu[0].atan2(self.nu[1])
    }

    pub fn profile(beta: f64, t: f64) -> f64 {
        if t > 0.0 {
            (1.0 + beta * beta).sqrt() * t
        } else {
            beta * t
        }
    }

    pub fn eval(&self, x: Vec2, center: Vec2) -> f64 {
        Self::profile(self.beta, geom::dot(geom::sub(x, center), self.nu) + self.c)
    }

    pub fn field(&self, grid: crate::fields::Grid2, center: Vec2) -> ScalarField {
        ScalarField::from_fn(grid, |x, y| self.eval([x, y], center))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoPlaneFit {
    pub plane: TwoPlane,
    /// `max |u − U|` over nodes in the ball.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug)]
struct Cand {
    a: f64,
    beta: f64,
    c: f64,
    res: f64,
}

impl Cand {
    fn better_than(&self, o: &Cand) -> bool {
        if !o.res.is_finite() {
            return self.res.is_finite() || self.res < o.res;
        }
        let tie = 1e-12 * o.res.max(1e-12);
        if self.res < o.res - tie {
            return true;
        }
        if self.res > o.res + tie {
            return false;
        }
        (self.beta, self.c.abs(), self.a.abs()) < (o.beta, o.c.abs(), o.a.abs())
    }
}

struct Samples {
    rel: Vec<Vec2>,
    u: Vec<f64>,
}

impl Samples {
    fn residual(&self, a: f64, beta: f64, c: f64) -> f64 {
        let (s, co) = a.sin_cos();
        let alpha = (1.0 + beta * beta).sqrt();
        let mut m = 0.0f64;
        for (p, &v) in self.rel.iter().zip(&self.u) {
            let t = p[0] * s + p[1] * co + c;
            let model = if t > 0.0 { alpha * t } else { beta * t };
            m = m.max((v - model).abs());
        }
        m
    }

    fn stride(&self, max: usize) -> Samples {
        let step = self.u.len().div_ceil(max).max(1);
        Samples {
            rel: self.rel.iter().step_by(step).copied().collect(),
            u: self.u.iter().step_by(step).copied().collect(),
        }
    }
}

fn wrap(a: f64) -> f64 {
    use std::f64::consts::PI;
    let mut a = a % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    } else if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// Minimax fit of a two-plane solution to the nodes of `u` in `B_r(center)`.
///
/// Coarse search over 64 angles, 32 values of `β ∈ [0, 10]` and 32 offsets in
/// `[−r/2, r/2]`, three rounds of tenfold zoom, then a compass polish. Ties go
/// to smaller `β`, then smaller `|c|`, then the angle closest to `e_y`.
pub fn two_plane_fit(u: &ScalarField, center: Vec2, r: f64) -> Result<TwoPlaneFit> {
    check_ball(u, center, r)?;
    let g = u.grid();
    let mut s = Samples { rel: Vec::new(), u: Vec::new() };
    for k in 0..g.len() {
        let d = geom::sub(g.node_point(k), center);
        if geom::norm(d) <= r {
            s.rel.push(d);
            s.u.push(u.at(k));
        }
    }
    if s.u.is_empty() {
        return Err(Error::InvalidParameter(format!("no nodes within radius {r}")));
    }
    use std::f64::consts::PI;
    let (na, nb, nc) = (64usize, 32usize, 32usize);
    let da = 2.0 * PI / na as f64;
    let db = BETA_MAX / (nb - 1) as f64;
    let dc = r / (nc - 1) as f64;
    let coarse = s.stride(800);
    let mut best = Cand { a: 0.0, beta: 0.0, c: 0.0, res: f64::INFINITY };
    for ia in 0..na {
        let a = wrap(-PI + da * ia as f64);
        for ib in 0..nb {
            let beta = db * ib as f64;
            for ic in 0..nc {
                let c = -0.5 * r + dc * ic as f64;
                let cand = Cand { a, beta, c, res: coarse.residual(a, beta, c) };
                if cand.better_than(&best) {
                    best = cand;
                }
            }
        }
    }
    best.res = s.residual(best.a, best.beta, best.c);
    let clamp = |beta: f64, c: f64| (beta.clamp(0.0, BETA_MAX), c.clamp(-0.5 * r, 0.5 * r));
    let (mut sa, mut sb, mut sc) = (da, db, dc);
    for _ in 0..3 {
        let center_c = best;
        for ia in -10..=10 {
            let a = wrap(center_c.a + sa * ia as f64 / 10.0);
            for ib in -10..=10 {
                for ic in -10..=10 {
                    let (beta, c) = clamp(center_c.beta + sb * ib as f64 / 10.0, center_c.c + sc * ic as f64 / 10.0);
                    let cand = Cand { a, beta, c, res: s.residual(a, beta, c) };
                    if cand.better_than(&best) {
                        best = cand;
                    }
                }
            }
        }
        sa /= 10.0;
        sb /= 10.0;
        sc /= 10.0;
    }
    // compass polish over all 26 neighbors
    let mut sweeps = 0;
    while (sa > 1e-14 || sb > 1e-14 || sc > 1e-14) && sweeps < 20_000 {
        sweeps += 1;
        let mut moved = false;
        for ia in -1..=1 {
            for ib in -1..=1 {
                for ic in -1..=1 {
                    if ia == 0 && ib == 0 && ic == 0 {
                        continue;
                    }
                    let a = wrap(best.a + sa * ia as f64);
                    let (beta, c) = clamp(best.beta + sb * ib as f64, best.c + sc * ic as f64);
                    let cand = Cand { a, beta, c, res: s.residual(a, beta, c) };
                    if cand.res < best.res {
                        best = cand;
                        moved = true;
                    }
                }
            }
        }
        if !moved {
            sa *= 0.5;
            sb *= 0.5;
            sc *= 0.5;
        }
    }
    Ok(TwoPlaneFit {
        plane: TwoPlane::from_angle(best.beta, best.a, best.c),
        residual: best.res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid2;

    fn grid() -> Grid2 {
        Grid2::new(65, 65, [-1.0, -1.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn alpha_is_derived() {
        let p = TwoPlane::new(0.7, [0.0, 3.0], 0.0).unwrap();
        assert!((p.alpha().powi(2) - p.beta.powi(2) - 1.0).abs() < 1e-15);
        assert!((geom::norm(p.nu) - 1.0).abs() < 1e-12);
        assert!(TwoPlane::new(-1.0, [0.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn recovers_exact_plane() {
        let g = grid();
        let u = TwoPlane::from_angle(0.7, 0.0, 0.0).field(g, [0.0, 0.0]);
        let fit = two_plane_fit(&u, [0.0, 0.0], 0.5).unwrap();
        assert!(fit.residual < 1e-6, "{fit:?}");
        assert!((fit.plane.beta - 0.7).abs() < 1e-6);
        assert!(fit.plane.c.abs() < 1e-6 && fit.plane.angle().abs() < 1e-6);
    }

    #[test]
    fn recovers_rotation() {
        let g = grid();
        let a = 30f64.to_radians();
        let u = TwoPlane::from_angle(0.7, a, 0.0).field(g, [0.0, 0.0]);
        let fit = two_plane_fit(&u, [0.0, 0.0], 0.5).unwrap();
        assert!((fit.plane.angle() - a).abs() < 0.2f64.to_radians());
        assert!((fit.plane.beta - 0.7).abs() < 1e-3);
    }

    #[test]
    fn recovers_normal_far_from_e_y() {
        let g = grid();
        let a = 100f64.to_radians();
        let u = TwoPlane::from_angle(0.3, a, 0.05).field(g, [0.1, 0.0]);
        let fit = two_plane_fit(&u, [0.1, 0.0], 0.5).unwrap();
        assert!(fit.residual < 1e-6, "{fit:?}");
        assert!((fit.plane.angle() - a).abs() < 1e-6);
    }

    #[test]
    fn perturbed_plane_residual_bound() {
        let g = grid();
        let u = ScalarField::from_fn(g, |x, y| y.max(0.0) + 0.01 * (5.0 * x).sin());
        let fit = two_plane_fit(&u, [0.0, 0.0], 0.5).unwrap();
        assert!(fit.residual <= 0.01 + 1e-6, "{}", fit.residual);
    }
}

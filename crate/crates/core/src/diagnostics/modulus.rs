//! Hölder modulus of the normalized deviation and oscillation decay of trapping offsets.

use serde::Serialize;

use crate::diagnostics::fit::two_plane_fit;
use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::geom::{self, Vec2};

/// Stand-in for the smallness threshold `ε̄`.
pub const EPS_BAR: f64 = 0.1;
const RING_SAMPLES: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "gamma", rename_all = "snake_case")]
pub enum HolderEstimate {
    /// All deviations at round-off, below `1e-8 max|u|`.
    ExactPlane,
    Exponent(f64),
}

impl HolderEstimate {
    pub fn exponent(&self) -> Option<f64> {
        match self {
            HolderEstimate::ExactPlane => None,
            HolderEstimate::Exponent(g) => Some(*g),
        }
    }
}

/// Slope of `log max_{|x−x0|=r} |ũ(x) − ũ(x0)|` against `log r`, where
/// `ũ = (u − U_β(⟨x − x0, ν⟩)) / (α ε)` in the frame fitted at the smallest radius.
pub fn holder_exponent(
    u: &ScalarField,
    x0: Vec2,
    alpha: f64,
    beta: f64,
    epsilon: f64,
    radii: &[f64],
) -> Result<HolderEstimate> {
    let rmin = radii.iter().copied().fold(f64::INFINITY, f64::min);
    if !rmin.is_finite() {
        return Err(Error::InvalidParameter("need at least two radii".into()));
    }
    let fit = two_plane_fit(u, x0, rmin)?;
    holder_exponent_in_frame(u, x0, fit.plane.nu, alpha, beta, epsilon, radii)
}

pub fn holder_exponent_in_frame(
    u: &ScalarField,
    x0: Vec2,
    nu: Vec2,
    alpha: f64,
    beta: f64,
    epsilon: f64,
    radii: &[f64],
) -> Result<HolderEstimate> {
    if !(epsilon > 0.0) || !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon}, alpha = {alpha}")));
    }
    if radii.len() < 2 {
        return Err(Error::InvalidParameter("need at least two radii".into()));
    }
    if let Some(r) = radii.iter().find(|&&r| r < epsilon / EPS_BAR) {
        return Err(Error::InvalidParameter(format!("radius {r} is inside epsilon / {EPS_BAR}")));
    }
    let outside = || Error::WindowOutsideDomain;
    let tilde = |p: Vec2| -> Result<f64> {
        let t = geom::dot(geom::sub(p, x0), nu);
        let model = if t > 0.0 { alpha * t } else { beta * t };
        Ok((u.sample(p).ok_or_else(outside)? - model) / (alpha * epsilon))
    };
    let base = tilde(x0)?;
    let mut devs = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut m = 0.0f64;
        for k in 0..RING_SAMPLES {
            let th = 2.0 * std::f64::consts::PI * k as f64 / RING_SAMPLES as f64;
            let p = geom::add(x0, geom::scale(geom::unit(th), r));
            m = m.max((tilde(p)? - base).abs());
        }
        devs.push(m);
    }
    // deviations at solver round-off carry no exponent
    let umax = u.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = (1e-8 * umax / (alpha * epsilon)).max(1e-12);
    if devs.iter().all(|&d| d < floor) {
        return Ok(HolderEstimate::ExactPlane);
    }
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(&devs)
        .filter(|(_, &d)| d >= floor)
        .map(|(&r, &d)| (r.ln(), d.ln()))
        .collect();
    if pts.len() < 2 {
        return Ok(HolderEstimate::ExactPlane);
    }
    Ok(HolderEstimate::Exponent(slope(&pts)))
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let xm = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - xm).powi(2)).sum();
    sxy / sxx
}

/// Trapping offsets at one scale: `U_β(x_n + a) ≤ u ≤ U_β(x_n + b)` on `B_r(x0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OscillationLevel {
    pub r: f64,
    pub a: f64,
    pub b: f64,
}

impl OscillationLevel {
    pub fn width(&self) -> f64 {
        self.b - self.a
    }
}

/// Scale ratio between levels.
pub const LEVEL_RATIO: f64 = 20.0;

/// Offsets at `r_k = r0 / 20^k`, `k = 0..levels`, in the frame fitted on `B_{r0}(x0)`.
pub fn oscillation_decay(
    u: &ScalarField,
    x0: Vec2,
    r0: f64,
    levels: usize,
    alpha: f64,
    beta: f64,
) -> Result<Vec<OscillationLevel>> {
    let nu = two_plane_fit(u, x0, r0)?.plane.nu;
    oscillation_decay_in_frame(u, x0, nu, r0, levels, alpha, beta)
}

pub fn oscillation_decay_in_frame(
    u: &ScalarField,
    x0: Vec2,
    nu: Vec2,
    r0: f64,
    levels: usize,
    alpha: f64,
    beta: f64,
) -> Result<Vec<OscillationLevel>> {
    let g = u.grid();
    if levels == 0 {
        return Err(Error::InvalidParameter("levels must be positive".into()));
    }
    let deepest = r0 / LEVEL_RATIO.powi(levels as i32 - 1);
    if deepest < 4.0 * g.h() {
        return Err(Error::InvalidParameter(format!(
            "deepest radius {deepest} is below 4h = {}",
            4.0 * g.h()
        )));
    }
    let mut out = Vec::with_capacity(levels);
    for k in 0..levels {
        let r = r0 / LEVEL_RATIO.powi(k as i32);
        let (mut a, mut b) = (f64::INFINITY, f64::NEG_INFINITY);
        for n in 0..g.len() {
            let p = g.node_point(n);
            if geom::dist(p, x0) > r {
                continue;
            }
            let xn = geom::dot(geom::sub(p, x0), nu);
            let v = u.at(n);
            // {t : U(xn + t) <= v} = (-inf, hi], {t : U(xn + t) >= v} = [lo, inf)
            let (lo, hi) = if v > 0.0 {
                let t = v / alpha - xn;
                (t, t)
            } else if beta > 0.0 {
                let t = v / beta - xn;
                (t, t)
            } else if v == 0.0 {
                (f64::NEG_INFINITY, -xn)
            } else {
                (f64::NEG_INFINITY, f64::NEG_INFINITY)
            };
            a = a.min(hi);
            b = b.max(lo);
        }
        out.push(OscillationLevel { r, a, b });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::TwoPlane;
    use crate::fields::Grid2;

    fn grid(n: usize) -> Grid2 {
        Grid2::new(n, n, [-1.0, -1.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn exact_plane_is_flagged() {
        let g = grid(65);
        let u = TwoPlane::from_angle(0.5, 0.0, 0.0).field(g, [0.0, 0.0]);
        let alpha = 1.25f64.sqrt();
        let est = holder_exponent(&u, [0.0, 0.0], alpha, 0.5, 0.01, &[0.1, 0.2, 0.4]).unwrap();
        assert_eq!(est, HolderEstimate::ExactPlane);
    }

    #[test]
    fn round_off_noise_counts_as_exact() {
        let g = grid(65);
        let plane = TwoPlane::from_angle(0.5, 0.0, 0.0).field(g, [0.0, 0.0]);
        let u = ScalarField::from_fn(g, |x, y| plane.sample([x, y]).unwrap() + 1e-11 * (37.0 * x + 11.0 * y).sin());
        let est = holder_exponent(&u, [0.0, 0.0], 1.25f64.sqrt(), 0.5, 0.01, &[0.1, 0.2, 0.4]).unwrap();
        assert_eq!(est, HolderEstimate::ExactPlane);
    }

    #[test]
    fn planted_exponent() {
        let g = grid(257);
        let eps = 0.01;
        let u = ScalarField::from_fn(g, |x, y| y.max(0.0) + eps * (x * x + y * y).sqrt().sqrt());
        let radii = [0.1, 0.15, 0.2, 0.3, 0.4];
        let est = holder_exponent_in_frame(&u, [0.0, 0.0], [0.0, 1.0], 1.0, 0.0, eps, &radii).unwrap();
        let gamma = est.exponent().unwrap();
        assert!((gamma - 0.5).abs() < 0.05, "{gamma}");
    }

    #[test]
    fn smooth_interface_is_lipschitz() {
        let g = grid(129);
        let u = ScalarField::from_fn(g, |x, y| (y - 0.05 * (std::f64::consts::PI * x).sin()).max(0.0));
        let gamma = holder_exponent(&u, [0.0, 0.0], 1.0, 0.0, 0.01, &[0.1, 0.2, 0.3, 0.4])
            .unwrap()
            .exponent()
            .unwrap();
        assert!(gamma >= 0.9, "{gamma}");
    }

    #[test]
    fn radii_inside_epsilon_ball_rejected() {
        let g = grid(33);
        let u = ScalarField::zeros(g);
        assert!(holder_exponent_in_frame(&u, [0.0, 0.0], [0.0, 1.0], 1.0, 0.0, 0.05, &[0.2, 0.4]).is_err());
    }

    #[test]
    fn offsets_of_exact_and_shifted_planes() {
        let g = grid(257);
        let beta = 0.5;
        let alpha = 1.25f64.sqrt();
        let exact = TwoPlane::from_angle(beta, 0.0, 0.0).field(g, [0.0, 0.0]);
        for lvl in oscillation_decay(&exact, [0.0, 0.0], 0.9, 2, alpha, beta).unwrap() {
            assert!(lvl.a.abs() < 1e-6 && lvl.b.abs() < 1e-6, "{lvl:?}");
        }
        let shifted = TwoPlane::from_angle(beta, 0.0, 0.01).field(g, [0.0, 0.0]);
        for lvl in oscillation_decay_in_frame(&shifted, [0.0, 0.0], [0.0, 1.0], 0.9, 2, alpha, beta).unwrap() {
            assert!((lvl.a - 0.01).abs() < 1e-12 && (lvl.b - 0.01).abs() < 1e-12, "{lvl:?}");
        }
        assert!(oscillation_decay(&exact, [0.0, 0.0], 0.9, 3, alpha, beta).is_err());
    }
}

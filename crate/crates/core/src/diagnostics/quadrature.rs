//! Ball integrals with sub-cell linear-cut fractions, the Weiss functional and the ACF product.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{LevelSet, ScalarField};
use crate::geom::{self, Vec2};

/// Angular samples of the boundary term.
pub const BOUNDARY_SAMPLES: usize = 512;

/// Integrals over `B_r(center)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct BallIntegrals {
    pub grad2: f64,
    pub grad2_plus: f64,
    pub grad2_minus: f64,
    pub area_plus: f64,
    pub area_minus: f64,
}

/// Area fraction of the unit square centered at 0 on the side `x·n <= d`.
fn square_fraction(d: f64, n: Vec2) -> f64 {
    let (mut a, mut b) = (n[0].abs(), n[1].abs());
    if a < b {
        std::mem::swap(&mut a, &mut b);
    }
    // t measured from the lowest corner along n
    let t = d + 0.5 * (a + b);
    if t <= 0.0 {
        return 0.0;
    }
    if t >= a + b {
        return 1.0;
    }
    if b < 1e-14 {
        return (t / a).clamp(0.0, 1.0);
    }
    let f = if t <= b {
        t * t / (2.0 * a * b)
    } else if t <= a {
        (t - 0.5 * b) / a
    } else {
        1.0 - (a + b - t).powi(2) / (2.0 * a * b)
    };
    f.clamp(0.0, 1.0)
}

pub(crate) fn check_ball(u: &ScalarField, center: Vec2, r: f64) -> Result<()> {
    let g = u.grid();
    if !(r > 0.0) || g.boundary_distance(center) < r - 1e-12 {
        return Err(Error::BallOutsideDomain {
            cx: center[0],
            cy: center[1],
            radius: r,
        });
    }
    Ok(())
}

/// Sub-cells per cell side for a ball of radius `r`.
fn subdivisions(h: f64, r: f64) -> usize {
    ((64.0 * h / r).ceil() as usize).clamp(4, 32)
}

/// Integrates `|∇u|²` (split by phase) and the phase areas over `B_r(center)`.
///
/// `u` and `phi` are bilinear per cell; each sub-cell contributes its center
/// value weighted by linear-cut fractions for the circle and for the zero set.
pub fn ball_integrals(u: &ScalarField, phi: &LevelSet, center: Vec2, r: f64) -> Result<BallIntegrals> {
    if !u.grid().same_layout(phi.grid()) {
        return Err(Error::GridMismatch);
    }
    check_ball(u, center, r)?;
    let g = u.grid();
    let h = g.h();
    let s = subdivisions(h, r);
    let d = h / s as f64;
    let w = d * d;
    let [x0, y0, _, _] = g.bbox();
    let lo_i = (((center[0] - r - x0) / h).floor().max(0.0)) as usize;
    let lo_j = (((center[1] - r - y0) / h).floor().max(0.0)) as usize;
    let hi_i = (((center[0] + r - x0) / h).ceil() as usize).min(g.nx() - 1);
    let hi_j = (((center[1] + r - y0) / h).ceil() as usize).min(g.ny() - 1);
    let mut out = BallIntegrals::default();
    for j in lo_j..hi_j {
        for i in lo_i..hi_i {
            let cx = g.x(i) + 0.5 * h;
            let cy = g.y(j) + 0.5 * h;
            if geom::dist([cx, cy], center) > r + h {
                continue;
            }
            let (u00, u10, u01, u11) = (u.get(i, j), u.get(i + 1, j), u.get(i, j + 1), u.get(i + 1, j + 1));
            let (p00, p10, p01, p11) = (phi.phi_at(i, j), phi.phi_at(i + 1, j), phi.phi_at(i, j + 1), phi.phi_at(i + 1, j + 1));
            for b in 0..s {
                let fy = (b as f64 + 0.5) / s as f64;
                for a in 0..s {
                    let fx = (a as f64 + 0.5) / s as f64;
                    let p = [g.x(i) + fx * h, g.y(j) + fy * h];
                    let rel = geom::sub(p, center);
                    let rho = geom::norm(rel);
                    let ball = if rho < 1e-300 {
                        1.0
                    } else {
                        square_fraction((r - rho) / d, geom::scale(rel, 1.0 / rho))
                    };
                    if ball == 0.0 {
                        continue;
                    }
                    let bil = |v00: f64, v10: f64, v01: f64, v11: f64| {
                        let v = v00 * (1.0 - fx) * (1.0 - fy) + v10 * fx * (1.0 - fy) + v01 * (1.0 - fx) * fy + v11 * fx * fy;
                        let gx = ((v10 - v00) * (1.0 - fy) + (v11 - v01) * fy) / h;
                        let gy = ((v01 - v00) * (1.0 - fx) + (v11 - v10) * fx) / h;
                        (v, [gx, gy])
                    };
                    let (_, gu) = bil(u00, u10, u01, u11);
                    let (pv, gp) = bil(p00, p10, p01, p11);
                    let gn = geom::norm(gp);
                    let plus = if gn > 0.0 {
                        // side phi > 0 is x·(-n) < phi/|∇phi|
                        square_fraction(pv / (gn * d), geom::scale(gp, -1.0 / gn))
                    } else if pv > 0.0 {
                        1.0
                    } else {
                        0.0
                    };
                    let g2 = geom::dot(gu, gu) * w * ball;
                    out.grad2 += g2;
                    out.grad2_plus += g2 * plus;
                    out.grad2_minus += g2 * (1.0 - plus);
                    out.area_plus += w * ball * plus;
                    out.area_minus += w * ball * (1.0 - plus);
                }
            }
        }
    }
    Ok(out)
}

/// `∫_{∂B_r} u²` by the periodic trapezoid rule on bilinearly interpolated `u`.
pub fn boundary_term(u: &ScalarField, center: Vec2, r: f64) -> Result<f64> {
    check_ball(u, center, r)?;
    let n = BOUNDARY_SAMPLES;
    let mut sum = 0.0;
    for k in 0..n {
        let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let p = geom::add(center, geom::scale(geom::unit(t), r));
        let v = u.sample(p).ok_or(Error::BallOutsideDomain {
            cx: center[0],
            cy: center[1],
            radius: r,
        })?;
        sum += v * v;
    }
    Ok(sum * r * 2.0 * std::f64::consts::PI / n as f64)
}

/// `E(u, r) = ∫_{B_r} |∇u|² + α² χ{phi > 0} + β² χ{phi < 0}`.
pub fn weiss_energy(u: &ScalarField, phi: &LevelSet, center: Vec2, r: f64, alpha: f64, beta: f64) -> Result<f64> {
    let b = ball_integrals(u, phi, center, r)?;
    Ok(b.grad2 + alpha * alpha * b.area_plus + beta * beta * b.area_minus)
}

/// One evaluation of the Weiss functional with its parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeissValue {
    pub r: f64,
    pub energy: f64,
    pub boundary: f64,
    pub phi: f64,
}

/// `Φ(r) = r^{-n} E(u, r) − r^{-1-n} ∫_{∂B_r} u²`; only `n = 2` quadrature exists.
pub fn weiss_phi(u: &ScalarField, phi: &LevelSet, center: Vec2, r: f64, alpha: f64, beta: f64, n: u32) -> Result<WeissValue> {
    if n != 2 {
        return Err(Error::InvalidParameter(format!("dimension {n}: only n = 2 is supported")));
    }
    let energy = weiss_energy(u, phi, center, r, alpha, beta)?;
    let boundary = boundary_term(u, center, r)?;
    Ok(WeissValue {
        r,
        energy,
        boundary,
        phi: combine(r, energy, boundary),
    })
}

fn combine(r: f64, energy: f64, boundary: f64) -> f64 {
    energy / (r * r) - boundary / (r * r * r)
}

/// Non-decreasing check with additive slack per step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotoneVerdict {
    pub monotone: bool,
    pub slack: f64,
    /// First index `i` with `values[i + 1] < values[i] − slack`.
    pub first_violation: Option<usize>,
}

impl MonotoneVerdict {
    /// Slack is `1e-3 · max |value|`.
    pub fn of(values: &[f64]) -> Self {
        let slack = 1e-3 * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let first_violation = values.windows(2).position(|w| w[1] < w[0] - slack);
        MonotoneVerdict {
            monotone: first_violation.is_none(),
            slack,
            first_violation,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeissSeries {
    pub center: Vec2,
    pub radii: Vec<f64>,
    pub e_values: Vec<f64>,
    pub boundary_terms: Vec<f64>,
    pub phi_values: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub verdict: MonotoneVerdict,
}

impl WeissSeries {
    /// Recomputes `Φ` from the stored parts.
    pub fn recomputed(&self) -> Vec<f64> {
        self.radii
            .iter()
            .zip(self.e_values.iter().zip(&self.boundary_terms))
            .map(|(&r, (&e, &b))| combine(r, e, b))
            .collect()
    }
}

pub(crate) fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() || radii.windows(2).any(|w| !(w[1] > w[0])) || radii[0] <= 0.0 {
        return Err(Error::InvalidParameter("radii must be positive and strictly increasing".into()));
    }
    Ok(())
}

pub fn weiss_series(u: &ScalarField, phi: &LevelSet, center: Vec2, radii: &[f64], alpha: f64, beta: f64) -> Result<WeissSeries> {
    check_radii(radii)?;
    let vals = radii
        .iter()
        .map(|&r| weiss_phi(u, phi, center, r, alpha, beta, 2))
        .collect::<Result<Vec<_>>>()?;
    let phi_values: Vec<f64> = vals.iter().map(|v| v.phi).collect();
    Ok(WeissSeries {
        center,
        radii: radii.to_vec(),
        e_values: vals.iter().map(|v| v.energy).collect(),
        boundary_terms: vals.iter().map(|v| v.boundary).collect(),
        verdict: MonotoneVerdict::of(&phi_values),
        phi_values,
        alpha,
        beta,
    })
}

/// `u_λ(X) = λ^{-1} u(center + λ (X − center))`, resampled bilinearly at the nodes.
pub fn rescale(u: &ScalarField, lambda: f64, center: Vec2) -> Result<ScalarField> {
    resample(u, lambda, center, 1.0 / lambda)
}

/// Same map for a level set, without the amplitude factor.
pub fn rescale_level_set(phi: &LevelSet, lambda: f64, center: Vec2) -> Result<LevelSet> {
    Ok(LevelSet::new(resample(phi.field(), lambda, center, 1.0)?))
}

fn resample(u: &ScalarField, lambda: f64, center: Vec2, amp: f64) -> Result<ScalarField> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must lie in (0, 1]")));
    }
    let g = *u.grid();
    if !g.contains(center) {
        return Err(Error::WindowOutsideDomain);
    }
    if lambda == 1.0 {
        return Ok(u.clone());
    }
    let mut out = Vec::with_capacity(g.len());
    for k in 0..g.len() {
        let x = g.node_point(k);
        let p = geom::add(center, geom::scale(geom::sub(x, center), lambda));
        out.push(amp * u.sample(p).ok_or(Error::WindowOutsideDomain)?);
    }
    ScalarField::new(g, out)
}

/// `J(r) = r^{-4} ∫_{B_r} |∇u⁺|² · ∫_{B_r} |∇u⁻|²` (weight `|x|^{2-n} = 1` in two dimensions).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AcfSeries {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub verdict: MonotoneVerdict,
}

pub fn acf_product(u: &ScalarField, phi: &LevelSet, center: Vec2, radii: &[f64]) -> Result<AcfSeries> {
    check_radii(radii)?;
    let values = radii
        .iter()
        .map(|&r| {
            let b = ball_integrals(u, phi, center, r)?;
            Ok(b.grad2_plus * b.grad2_minus / r.powi(4))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AcfSeries {
        radii: radii.to_vec(),
        verdict: MonotoneVerdict::of(&values),
        values,
    })
}

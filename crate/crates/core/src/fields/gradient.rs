//! Finite-difference gradients, centered or one-sided with respect to a level set.

use crate::error::{Error, Result};
use crate::fields::{Domain, LevelSet, Phase, ScalarField};
use crate::geom::Vec2;

/// Stencil selection for [`gradient`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradientMode {
    /// Second-order central differences (one-sided second order at the box edge).
    Centered,
    /// Uses only nodes strictly inside the positive phase plus interface crossings.
    OneSidedPositive,
    /// Uses only nodes strictly inside the negative phase plus interface crossings.
    OneSidedNegative,
}

impl GradientMode {
    pub fn one_sided(phase: Phase) -> Self {
        match phase {
            Phase::Positive => GradientMode::OneSidedPositive,
            Phase::Negative => GradientMode::OneSidedNegative,
        }
    }

    fn phase(self) -> Option<Phase> {
        match self {
            GradientMode::Centered => None,
            GradientMode::OneSidedPositive => Some(Phase::Positive),
            GradientMode::OneSidedNegative => Some(Phase::Negative),
        }
    }
}

/// Gradient of `field` at node `(i, j)`.
///
/// One-sided modes treat the zero set of `phi` as a boundary where the field
/// vanishes: crossings between a node on the requested side and one off it
/// enter the stencil with value zero at the linearly interpolated position.
pub fn gradient(
    field: &ScalarField,
    node: (usize, usize),
    mode: GradientMode,
    phi: &LevelSet,
) -> Result<Vec2> {
    gradient_in(field, node, mode, phi, &Domain::full(*field.grid()))
}

/// As [`gradient`], ignoring nodes that are inactive in `domain`.
pub fn gradient_in(
    field: &ScalarField,
    node: (usize, usize),
    mode: GradientMode,
    phi: &LevelSet,
    domain: &Domain,
) -> Result<Vec2> {
    let grid = field.grid();
    let (i, j) = node;
    let k = grid.idx(i, j);
    let phase = mode.phase();
    if let Some(p) = phase {
        if !p.contains(phi.phi(k)) {
            return Err(Error::InsufficientStencil { i, j });
        }
    }
    let axis = |di: isize, dj: isize| -> Result<f64> {
        let line = AxisLine {
            field,
            phi,
            domain,
            phase,
            node,
            step: (di, dj),
        };
        line.derivative()
            .map(|d| d / grid.h())
            .ok_or(Error::InsufficientStencil { i, j })
    };
    Ok([axis(1, 0)?, axis(0, 1)?])
}

struct AxisLine<'a> {
    field: &'a ScalarField,
    phi: &'a LevelSet,
    domain: &'a Domain,
    phase: Option<Phase>,
    node: (usize, usize),
    step: (isize, isize),
}

#[derive(Clone, Copy)]
enum Sample {
    Node(f64),
    Crossing(f64),
}

impl AxisLine<'_> {
    fn node_at(&self, s: isize) -> Option<usize> {
        let g = self.field.grid();
        let (i, j) = g.offset(self.node.0, self.node.1, self.step.0 * s, self.step.1 * s)?;
        let k = g.idx(i, j);
        self.domain.is_active(k).then_some(k)
    }

    fn on_side(&self, k: usize) -> bool {
        self.phase.is_none_or(|p| p.contains(self.phi.phi(k)))
    }

    /// Walks up to two nodes in direction `dir`, collecting `(offset, sample)` pairs;
    /// stops at the first interface crossing.
    fn walk(&self, dir: isize) -> Vec<(f64, Sample)> {
        let mut out = Vec::with_capacity(2);
        let mut prev = self.field.grid().idx(self.node.0, self.node.1);
        for n in 1..=2isize {
            let Some(k) = self.node_at(dir * n) else { break };
            if self.on_side(k) {
                out.push(((dir * n) as f64, Sample::Node(self.field.at(k))));
                prev = k;
            } else {
                let (pa, pb) = (self.phi.phi(prev), self.phi.phi(k));
                let theta = pa / (pa - pb);
                out.push(((dir * (n - 1)) as f64 + dir as f64 * theta, Sample::Crossing(0.0)));
                break;
            }
        }
        out
    }

    /// Derivative in grid units (per h).
    fn derivative(&self) -> Option<f64> {
        let k0 = self.field.grid().idx(self.node.0, self.node.1);
        let u0 = self.field.at(k0);
        let fwd = self.walk(1);
        let bwd = self.walk(-1);
        let is_node = |v: &[(f64, Sample)], n: usize| {
            v.len() > n && matches!(v[n].1, Sample::Node(_))
        };
        let val = |s: Sample| match s {
            Sample::Node(v) | Sample::Crossing(v) => v,
        };
        if is_node(&fwd, 0) && is_node(&bwd, 0) {
            return Some(0.5 * (val(fwd[0].1) - val(bwd[0].1)));
        }
        if is_node(&fwd, 0) && is_node(&fwd, 1) && (self.phase.is_some() || bwd.is_empty()) {
            return Some(0.5 * (-3.0 * u0 + 4.0 * val(fwd[0].1) - val(fwd[1].1)));
        }
        if is_node(&bwd, 0) && is_node(&bwd, 1) && (self.phase.is_some() || fwd.is_empty()) {
            return Some(0.5 * (3.0 * u0 - 4.0 * val(bwd[0].1) + val(bwd[1].1)));
        }
        // Fall back to the three samples nearest the node, crossings included.
        let mut pts: Vec<(f64, f64)> = fwd
            .iter()
            .chain(bwd.iter())
            .map(|&(s, v)| (s, val(v)))
            .collect();
        pts.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()).then(a.0.total_cmp(&b.0)));
        if pts.len() < 2 {
            return None;
        }
        let (s1, v1) = pts[0];
        let (s2, v2) = pts[1];
        if s1.abs() < 1e-12 || s2.abs() < 1e-12 || (s1 - s2).abs() < 1e-12 {
            return None;
        }
        // Derivative at 0 of the quadratic through (0, u0), (s1, v1), (s2, v2).
        let w1 = -s2 / (s1 * (s1 - s2));
        let w2 = -s1 / (s2 * (s2 - s1));
        let w0 = -(w1 + w2);
        Some(w0 * u0 + w1 * v1 + w2 * v2)
    }
}

/// Centered gradient of `field` at an arbitrary point, by bilinear
/// interpolation of node gradients.
pub fn sample_gradient(field: &ScalarField, p: Vec2) -> Option<Vec2> {
    let grid = field.grid();
    let (i, j, fx, fy) = grid.locate(p)?;
    let dummy = LevelSet::new(ScalarField::zeros(*grid));
    let mut acc = [0.0; 2];
    for (di, dj, w) in [
        (0, 0, (1.0 - fx) * (1.0 - fy)),
        (1, 0, fx * (1.0 - fy)),
        (0, 1, (1.0 - fx) * fy),
        (1, 1, fx * fy),
    ] {
        let g = gradient(field, (i + di, j + dj), GradientMode::Centered, &dummy).ok()?;
        acc[0] += w * g[0];
        acc[1] += w * g[1];
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid2;

    fn grid() -> Grid2 {
        Grid2::new(65, 65, [-1.0, -1.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn centered_is_exact_on_linear_fields() {
        let g = grid();
        let u = ScalarField::from_fn(g, |x, _| x);
        let phi = LevelSet::from_fn(g, |_, y| y);
        for node in [(1, 1), (32, 40), (63, 63), (0, 0), (64, 10)] {
            let d = gradient(&u, node, GradientMode::Centered, &phi).unwrap();
            assert!((d[0] - 1.0).abs() < 1e-12 && d[1].abs() < 1e-12, "{node:?}: {d:?}");
        }
    }

    #[test]
    fn centered_second_order_on_quadratic() {
        let g = grid();
        let u = ScalarField::from_fn(g, |x, y| x * x + y * y);
        let phi = LevelSet::from_fn(g, |_, y| y);
        // node (0.5, 0) is (48, 32)
        let d = gradient(&u, (48, 32), GradientMode::Centered, &phi).unwrap();
        // central differences are exact on quadratics
        assert!((d[0] - 1.0).abs() < 1e-12 && d[1].abs() < 1e-12);
    }

    #[test]
    fn one_sided_reproduces_plane_above_zero_line() {
        let g = grid();
        let u = ScalarField::from_fn(g, |_, y| y.max(0.0));
        let phi = LevelSet::from_fn(g, |_, y| y);
        let d = gradient(&u, (20, 33), GradientMode::OneSidedPositive, &phi).unwrap();
        assert!(d[0].abs() < 1e-12 && (d[1] - 1.0).abs() < 1e-12, "{d:?}");
        // node off the requested side is rejected
        assert!(gradient(&u, (20, 31), GradientMode::OneSidedPositive, &phi).is_err());
    }

    #[test]
    fn one_sided_uses_crossings_in_thin_slivers() {
        let g = grid();
        // positive phase 0.01 < y < 0.05 holds a single node row
        let phi = LevelSet::from_fn(g, |_, y| (y - 0.01) * (0.05 - y));
        let u = phi.field().clone();
        let j = (1.03125f64 / g.h()).round() as usize; // y = 0.03125
        let d = gradient(&u, (10, j), GradientMode::OneSidedPositive, &phi).unwrap();
        // quadratic through the two linearly interpolated zero crossings
        let (lo, mid, hi) = (phi.phi_at(10, j - 1), phi.phi_at(10, j), phi.phi_at(10, j + 1));
        let a = mid / (mid - lo);
        let b = mid / (mid - hi);
        let expected = mid * (b - a) / (a * b) / g.h();
        assert!((d[1] - expected).abs() < 1e-12, "{d:?} vs {expected}");
        assert!(d[0].abs() < 1e-12);
    }

    #[test]
    fn one_sided_fails_without_stencil() {
        let g = grid();
        // positive phase is the left box edge only
        let phi = LevelSet::from_fn(g, |x, _| if x < -0.99 { 1.0 } else { -1.0 });
        let u = ScalarField::zeros(g);
        assert!(matches!(
            gradient(&u, (0, 32), GradientMode::OneSidedPositive, &phi),
            Err(Error::InsufficientStencil { .. })
        ));
    }
}

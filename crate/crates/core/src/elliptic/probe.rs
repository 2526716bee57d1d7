use crate::elliptic::coeff::quad_form;
use crate::elliptic::CoefficientField;
use crate::error::{Error, Result};
use crate::fields::{gradient_in, sample_gradient, Domain, GradientMode, LevelSet, Phase, ScalarField};
use crate::geom::{self, Vec2};

/// Distances along the normal, in units of h, of the gradient samples.
pub const PROBES: [f64; 2] = [1.5, 2.5];

/// One-sided gradient trace at an interface point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterfaceGradient {
    pub grad: Vec2,
    /// `<A grad, grad>` with `A` interpolated at the point.
    pub q: f64,
    /// Unit normal pointing into the positive phase.
    pub normal: Vec2,
}

/// Unit normal of `phi` at `p`, oriented toward `phi > 0`.
pub fn interface_normal(phi: &LevelSet, p: Vec2) -> Option<Vec2> {
    let g = sample_gradient(phi.field(), p)?;
    let n = geom::norm(g);
    (n > 0.0).then(|| geom::scale(g, 1.0 / n))
}

/// Gradient of `u` on side `phase` of the interface at `point`, where `u` vanishes.
///
/// One-sided node gradients are interpolated bilinearly to [`PROBES`] along the normal
/// and extrapolated linearly back to the interface.
pub fn interface_normal_gradient(
    u: &ScalarField,
    a: &CoefficientField,
    phi: &LevelSet,
    point: Vec2,
    phase: Phase,
) -> Result<InterfaceGradient> {
    interface_normal_gradient_in(u, a, phi, point, phase, &Domain::full(*u.grid()))
}

pub fn interface_normal_gradient_in(
    u: &ScalarField,
    a: &CoefficientField,
    phi: &LevelSet,
    point: Vec2,
    phase: Phase,
    domain: &Domain,
) -> Result<InterfaceGradient> {
    let under = || Error::UnderResolved {
        x: point[0],
        y: point[1],
        phase,
    };
    let normal = interface_normal(phi, point).ok_or_else(under)?;
    let h = u.grid().h();
    let dir = geom::scale(normal, phase.sign() * h);
    let coef = a.sample(point).ok_or_else(under)?;
    let mut g = [[0.0; 2]; 2];
    for (slot, s) in PROBES.iter().enumerate() {
        let p = geom::add(point, geom::scale(dir, *s));
        g[slot] = probe(u, phi, p, phase, domain).ok_or_else(under)?;
    }
    let grad = [2.5 * g[0][0] - 1.5 * g[1][0], 2.5 * g[0][1] - 1.5 * g[1][1]];
    Ok(InterfaceGradient {
        grad,
        q: quad_form(coef, grad),
        normal,
    })
}

fn probe(u: &ScalarField, phi: &LevelSet, p: Vec2, phase: Phase, domain: &Domain) -> Option<Vec2> {
    let grid = u.grid();
    let (i, j, fx, fy) = grid.locate(p)?;
    let mode = GradientMode::one_sided(phase);
    let mut acc = [0.0; 2];
    for (di, dj, w) in [
        (0, 0, (1.0 - fx) * (1.0 - fy)),
        (1, 0, fx * (1.0 - fy)),
        (0, 1, (1.0 - fx) * fy),
        (1, 1, fx * fy),
    ] {
        let k = grid.idx(i + di, j + dj);
        if !domain.is_active(k) || !phase.contains(phi.phi(k)) {
            return None;
        }
        let d = gradient_in(u, (i + di, j + dj), mode, phi, domain).ok()?;
        acc[0] += w * d[0];
        acc[1] += w * d[1];
    }
    Some(acc)
}

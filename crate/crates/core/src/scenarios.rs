//! Ready-made problems: two-plane, perturbed plane, PB disk, manufactured Poisson.

use crate::diagnostics::TwoPlane;
use crate::elliptic::CoefficientField;
use crate::error::Result;
use crate::fbiter::{IterationOptions, PhaseProblem};
use crate::fields::{Grid2, LevelSet, ScalarField};
use crate::prandtl::PbParams;

/// A problem with its initial level set and the options it is meant to run with.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub problem: PhaseProblem,
    pub phi0: LevelSet,
    pub options: IterationOptions,
}

/// `[-1, 1]²` with `n` nodes per side.
pub fn unit_box(n: usize) -> Result<Grid2> {
    Grid2::new(n, n, [-1.0, -1.0, 1.0, 1.0])
}

/// `A = I`, `f = 0`, `Q ≡ 1`, outer data `U_β(y)`, flat `phi0 = y`.
pub fn two_plane(n: usize, beta: f64) -> Result<Scenario> {
    let g = unit_box(n)?;
    let plane = TwoPlane::new(beta, [0.0, 1.0], 0.0)?;
    let problem = PhaseProblem::shared_f(
        CoefficientField::identity(g),
        ScalarField::zeros(g),
        ScalarField::constant(g, 1.0),
        plane.field(g, [0.0, 0.0]),
    )?;
    Ok(Scenario {
        problem,
        phi0: LevelSet::from_fn(g, |_, y| y),
        options: IterationOptions::default(),
    })
}

/// One-phase problem with outer data `(y + a sin(πx))⁺` and flat `phi0 = y`.
pub fn perturbed_plane(n: usize, amplitude: f64) -> Result<Scenario> {
    let g = unit_box(n)?;
    let outer = ScalarField::from_fn(g, |x, y| (y + amplitude * (std::f64::consts::PI * x).sin()).max(0.0));
    let problem = PhaseProblem::shared_f(CoefficientField::identity(g), ScalarField::zeros(g), ScalarField::constant(g, 1.0), outer)?;
    Ok(Scenario {
        problem,
        phi0: LevelSet::from_fn(g, |_, y| y),
        options: IterationOptions::default(),
    })
}

/// Jump tolerance used for PB disks; the probe bias at 193² is about 0.03.
pub const PB_TOL_JUMP: f64 = 0.05;

/// PB vortex patch in the unit disk: `Δu = h²ω` inside, harmonic outside,
/// jump `h²σ`, `u = μ` on the circle, started from a circle of radius `r0`.
pub fn pb_disk(n: usize, params: &PbParams, r0: f64) -> Result<Scenario> {
    params.validate()?;
    let g = unit_box(n)?;
    let h2 = params.h * params.h;
    let problem = PhaseProblem::new(
        CoefficientField::identity(g),
        ScalarField::zeros(g),
        ScalarField::constant(g, h2 * params.omega),
        ScalarField::constant(g, h2 * params.sigma),
        ScalarField::constant(g, params.mu),
    )?
    .with_ball([0.0, 0.0], 1.0)?;
    let options = IterationOptions {
        tol_jump: Some(PB_TOL_JUMP),
        max_iters: 400,
        ..IterationOptions::default()
    };
    Ok(Scenario {
        problem,
        // negative phase inside
        phi0: LevelSet::circle(g, [0.0, 0.0], r0),
        options,
    })
}

/// `u = sin(πx) sin(πy)` with `Δu = −2π² u` on `[-1, 1]²`: (exact, rhs).
pub fn manufactured_sine(n: usize) -> Result<(ScalarField, ScalarField)> {
    let g = unit_box(n)?;
    let pi = std::f64::consts::PI;
    let exact = ScalarField::from_fn(g, |x, y| (pi * x).sin() * (pi * y).sin());
    let f = exact.scaled(-2.0 * pi * pi);
    Ok((exact, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pb_disk_places_vortex_inside() {
        let s = pb_disk(33, &PbParams::new(1.0, 1.0, 8.0, 1.0).unwrap(), 0.5).unwrap();
        let g = *s.phi0.grid();
        assert!(s.phi0.phi(g.idx(16, 16)) < 0.0);
        assert_eq!(s.problem.f_minus.max(), 1.0);
        assert_eq!(s.problem.q.min(), 8.0);
        assert!(s.problem.domain.mask().is_some());
    }
}

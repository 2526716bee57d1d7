//! Second-order convergence of the phase solver on `u = sin(πx) sin(πy)`, then a
//! variable anisotropic coefficient with cross terms (BiCGSTAB path).

use fblab::elliptic::{solve_phase_with, CoefficientField, PhaseRegion, SolveOptions};
use fblab::fields::{LevelSet, Phase, ScalarField};
use fblab::scenarios::{manufactured_sine, unit_box};

fn main() -> fblab::Result<()> {
    // sin·sin is a discrete eigenvector, so CG finishes in one step
    let mut prev: Option<f64> = None;
    for n in [33, 65, 129] {
        let (exact, f) = manufactured_sine(n)?;
        let g = *exact.grid();
        let region = PhaseRegion::new(LevelSet::from_fn(g, |_, _| 1.0), Phase::Positive, exact.clone());
        let sol = solve_phase_with(&CoefficientField::identity(g), &f, &region, &SolveOptions::new(1e-10))?;
        let err = sol.u.max_diff(&exact);
        let ratio = prev.map(|p| format!("{:.3}", p / err)).unwrap_or_else(|| "-".into());
        println!("n = {n:>3}: {} unknowns, {} Krylov its, max error {err:.3e}, ratio {ratio}", sol.unknowns, sol.iterations);
        prev = Some(err);
    }

    // div(A∇u) with A = [[2, 0.5], [0.5, 1]] and u = x² + xy: div(A∇u) = 2·2 + 2·0.5·1 = 5.
    let g = unit_box(65)?;
    let a = CoefficientField::constant(g, [2.0, 0.5, 1.0])?;
    let exact = ScalarField::from_fn(g, |x, y| x * x + x * y);
    let region = PhaseRegion::new(LevelSet::from_fn(g, |_, _| 1.0), Phase::Positive, exact.clone());
    let sol = solve_phase_with(&a, &ScalarField::constant(g, 5.0), &region, &SolveOptions::new(1e-10))?;
    println!("anisotropic quadratic: max error {:.3e} (exact up to solver tolerance)", sol.u.max_diff(&exact));
    Ok(())
}

//! The two-plane solution `U_β` is a fixed point of the free boundary iteration.

use fblab::fbiter::run;
use fblab::scenarios::two_plane;

fn main() -> fblab::Result<()> {
    for beta in [0.0, 0.5, 1.0, 2.0] {
        let s = two_plane(65, beta)?;
        let out = run(&s.problem, &s.phi0, &s.options)?;
        let g = *out.phi.grid();
        // largest |y| over interface vertices: drift of the line y = 0
        let drift = fblab::fields::interface_extract(&out.phi).vertices().map(|p| p[1].abs()).fold(0.0, f64::max);
        let alpha = (1.0 + beta * beta).sqrt();
        let slope = out.u.sample([0.0, 0.5]).unwrap() - out.u.sample([0.0, -0.5]).unwrap();
        println!(
            "beta = {beta}: converged {} in {} its, |J| = {:.2e}, drift {drift:.1e} (h = {:.4}), (alpha + beta)/2 = {:.4} vs {:.4}",
            out.report.converged,
            out.report.iterations,
            out.report.final_defect().unwrap_or(f64::NAN),
            g.h(),
            (alpha + beta) / 2.0,
            slope,
        );
    }
    Ok(())
}

//! Weiss functional on exact two-plane data and on a relaxed vortex patch.

use fblab::diagnostics::{weiss_series, TwoPlane};
use fblab::fbiter::run;
use fblab::fields::LevelSet;
use fblab::prandtl::PbParams;
use fblab::scenarios::{pb_disk, unit_box};

fn main() -> fblab::Result<()> {
    let g = unit_box(129)?;
    let radii = [0.1, 0.2, 0.4, 0.8];
    for beta in [0.0, 1.0] {
        let plane = TwoPlane::from_angle(beta, 0.0, 0.0);
        let u = plane.field(g, [0.0, 0.0]);
        let phi = LevelSet::new(u.clone());
        let s = weiss_series(&u, &phi, [0.0, 0.0], &radii, plane.alpha(), beta)?;
        let pi = std::f64::consts::PI;
        println!("beta = {beta}: Phi = {:?}, closed form {:.5}", s.phi_values, pi / 2.0 * (plane.alpha().powi(2) + beta * beta));
    }

    let p = PbParams::new(1.0, 1.0, 8.0, 1.0)?;
    let sc = pb_disk(129, &p, 0.5)?;
    let out = run(&sc.problem, &sc.phi0, &sc.options)?;
    // normalize so the jump is one, then center on the interface
    let u = out.u.scaled(1.0 / p.target().sqrt());
    let x0 = fblab::diagnostics::nearest_interface_point(&out.phi, [0.5, 0.0])?;
    let radii: Vec<f64> = (1..=5).map(|k| k as f64 / 16.0).collect();
    let s = weiss_series(&u, &out.phi, x0, &radii, 1.0, 0.0)?;
    println!("vortex patch at {x0:.3?}: Phi = {:.4?}, monotone {}", s.phi_values, s.verdict.monotone);
    Ok(())
}

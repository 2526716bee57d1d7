//! Relaxes a Prandtl-Batchelor vortex patch in the unit disk and compares the
//! computed interface radius with the radial theory.

use fblab::fbiter::run;
use fblab::fields::interface_extract;
use fblab::geom;
use fblab::prandtl::{exact_roots, PbParams};
use fblab::scenarios::pb_disk;

fn main() -> fblab::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(129);
    let params = PbParams::new(1.0, 1.0, 8.0, 1.0)?;
    let (rho1, rho2) = exact_roots(&params)?;
    println!("radial roots: rho1 = {rho1:.5}, rho2 = {rho2:.5}");

    let s = pb_disk(n, &params, 0.5)?;
    let out = run(&s.problem, &s.phi0, &s.options)?;
    for rec in out.report.records().step_by(5) {
        println!("  iter {:>3}: |J| = {:.4}, area+ = {:.4}", rec.iter, rec.jump_linf, rec.area_plus);
    }
    let c = interface_extract(&out.phi);
    let radii: Vec<f64> = c.vertices().map(geom::norm).collect();
    let mean = radii.iter().sum::<f64>() / radii.len() as f64;
    let dev = radii.iter().map(|r| (r - rho2).abs()).fold(0.0, f64::max);
    println!(
        "{n}^2: converged {} in {} its; mean radius {mean:.5}, max |r - rho2| = {dev:.4} (h = {:.4})",
        out.report.converged,
        out.report.iterations,
        out.phi.grid().h()
    );
    Ok(())
}

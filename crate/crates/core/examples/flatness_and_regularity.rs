//! Full diagnostics report on a relaxed one-phase perturbed plane: flatness decay,
//! Hölder modulus, non-degeneracy, oscillation offsets and the ACF product.

use fblab::diagnostics::{diagnose, DiagnoseOptions};
use fblab::fbiter::run;
use fblab::scenarios::perturbed_plane;

fn main() -> fblab::Result<()> {
    let s = perturbed_plane(129, 0.05)?;
    let out = run(&s.problem, &s.phi0, &s.options)?;
    println!("relaxed in {} its, one-phase {}", out.report.iterations, out.report.one_phase);

    let opts = DiagnoseOptions {
        epsilon: 0.01,
        jump: Some(1.0),
        ..DiagnoseOptions::default()
    };
    let rep = diagnose(&out.u, &out.phi, &opts)?;
    for row in &rep.rows {
        println!("r = {:.2}: Phi = {:.5}, ACF J = {:.3e}, delta = {:?}", row.r, row.phi_weiss, row.acf_j, row.delta_flat);
    }
    let sm = &rep.summary;
    println!("flatness decay ratio {:?}", rep.flatness.decay_ratio());
    println!("two-plane fit: beta {:.3}, residual {:.3e}", sm.two_plane.plane.beta, sm.two_plane.residual);
    println!("gamma {:?}, c0 {:?}, Weiss monotone {}", sm.gamma_est, sm.c0_est, sm.weiss_monotone.monotone);
    for lvl in &sm.oscillation {
        println!("oscillation at r = {:.4}: [{:.4e}, {:.4e}]", lvl.r, lvl.a, lvl.b);
    }
    for (what, why) in &sm.skipped {
        println!("skipped {what}: {why}");
    }
    Ok(())
}

//! Loads a TOML run configuration, relaxes it and writes the standard outputs.
//!
//! `cargo run --example config_run -- crates/core/configs/two_plane.toml`

use std::path::PathBuf;

use fblab::config;
use fblab::fbiter::run;
use fblab::fields::io::write_field;

fn main() -> fblab::Result<()> {
    let path: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/two_plane.toml"));
    let loaded = config::load(&path)?;
    let g = *loaded.phi0.grid();
    println!("{}: {}x{} grid, h = {:.4}", path.display(), g.nx(), g.ny(), g.h());
    let out = run(&loaded.problem, &loaded.phi0, &loaded.config.iteration)?;
    println!(
        "converged {} in {} its, |J| = {:.3e}",
        out.report.converged,
        out.report.iterations,
        out.report.final_defect().unwrap_or(f64::NAN)
    );
    let dir = std::env::temp_dir().join("fblab_config_run");
    std::fs::create_dir_all(&dir)?;
    write_field(dir.join("u.csv"), &out.u)?;
    out.report.write_csv(std::fs::File::create(dir.join("iterations.csv"))?)?;
    println!("wrote {}", dir.display());
    Ok(())
}

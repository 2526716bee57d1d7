//! `fblab` subcommands: solve, diagnose, prandtl, verify.
//!
//! Exit codes: 0 success, 1 runtime failure or failed verification, 2 non-convergence
//! (or no admissible PB sweep point), 3 invalid input, 4 phase collapse.

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::{self, SCHEMA_VERSION};
use crate::diagnostics::{diagnose, DiagnosticsReport, DiagnosticsSummary, FlatnessTable, MonotoneVerdict, TwoPlaneFit};
use crate::error::{Error, Result};
use crate::fbiter::{run, FlatnessRow};
use crate::fields::io::{fmt_f64, read_field, write_field, write_polylines};
use crate::fields::{interface_extract, Contours, LevelSet};
use crate::geom::{self, Vec2};
use crate::prandtl::{self, Branch, PbParams, SweepRow};
use crate::verify::{self, Level, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_COLLAPSE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "fblab", version, about = "Two-phase free boundary solver and diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relax a free boundary problem described by a configuration file.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output` from the configuration.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the diagnostics on stored `u` and `phi` fields.
    Diagnose {
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Radial Prandtl-Batchelor roots, optionally over a parameter sweep.
    Prandtl {
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, allow_hyphen_values = true)]
        omega: f64,
        #[arg(long, allow_hyphen_values = true)]
        h: f64,
        #[arg(long, allow_hyphen_values = true)]
        sigma: f64,
        /// `key=a:b:n` with key in {mu, omega, h, sigma}; repeat for a product sweep.
        #[arg(long)]
        sweep: Vec<String>,
        /// Write `r,u` profiles of both branches with this many samples.
        #[arg(long)]
        profiles: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the acceptance criteria.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
        /// Comma-separated subset of criterion numbers.
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<u8>>,
        /// Directory for audit tables.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, hide = true)]
        break_jump_sign: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum LevelArg {
    Quick,
    Full,
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Solve { config, out } => cmd_solve(&config, out.as_deref()),
        Command::Diagnose { u, phi, config, out } => cmd_diagnose(&u, &phi, &config, &out),
        Command::Prandtl {
            mu,
            omega,
            h,
            sigma,
            sweep,
            profiles,
            out,
        } => cmd_prandtl(PrandtlArgs { mu, omega, h, sigma, sweep, profiles }, &out),
        Command::Verify {
            level,
            criteria,
            out,
            break_jump_sign,
        } => cmd_verify(&VerifyOptions {
            level: match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            },
            break_jump_sign,
            criteria,
            out,
        }),
    }
}

/// Exit code for an error raised while running a command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::InvalidGrid(_)
        | Error::FieldLength { .. }
        | Error::NonFinite(_)
        | Error::GridMismatch
        | Error::NotElliptic { .. }
        | Error::InvalidParameter(_)
        | Error::FieldFile { .. }
        | Error::SingleSigned
        | Error::BallOutsideDomain { .. } => EXIT_INVALID,
        Error::PhaseCollapse { .. } | Error::EmptyRegion { .. } => EXIT_COLLAPSE,
        _ => EXIT_FAILURE,
    }
}

fn fail(e: Error) -> i32 {
    eprintln!("fblab: {e}");
    exit_code(&e)
}

/// Exclusive claim on an output directory, released on drop.
struct DirLock(PathBuf);

impl DirLock {
    fn acquire(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let path = dir.join(".fblab.lock");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(DirLock(path))
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::Io(std::io::Error::new(
                e.kind(),
                format!("{} is locked by another run", dir.display()),
            ))),
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

fn write_json<T: Serialize>(path: PathBuf, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct InterfaceSummary {
    pub components: usize,
    pub vertices: usize,
    pub length: f64,
    /// Measured from `center`, the domain center.
    pub center: Vec2,
    pub mean_radius: Option<f64>,
    pub max_radius_deviation: Option<f64>,
}

impl InterfaceSummary {
    pub fn of(contours: &Contours, center: Vec2) -> Self {
        let radii: Vec<f64> = contours.vertices().map(|p| geom::dist(p, center)).collect();
        let mean = (!radii.is_empty()).then(|| radii.iter().sum::<f64>() / radii.len() as f64);
        InterfaceSummary {
            components: contours.polylines.len(),
            vertices: radii.len(),
            length: contours.length(),
            center,
            mean_radius: mean,
            max_radius_deviation: mean.map(|m| radii.iter().map(|r| (r - m).abs()).fold(0.0, f64::max)),
        }
    }
}

/// `summary.json` of `solve`.
#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub converged: bool,
    pub iterations: usize,
    pub final_jump_defect: Option<f64>,
    pub jump_tolerance: f64,
    pub one_phase: bool,
    pub skipped_vertices: usize,
    pub interface: InterfaceSummary,
    pub two_plane: Option<TwoPlaneFit>,
    pub weiss_monotone: Option<MonotoneVerdict>,
    pub flatness: Vec<FlatnessRow>,
    /// Full diagnostics summary, including `gamma_est` and `c0_est`.
    pub diagnostics: Option<DiagnosticsSummary>,
    pub diagnostics_error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
struct Timing {
    schema_version: u32,
    seconds: f64,
}

pub fn cmd_solve(config_path: &Path, out: Option<&Path>) -> i32 {
    match solve_inner(config_path, out) {
        Ok(code) => code,
        Err(e) => fail(e),
    }
}

fn solve_inner(config_path: &Path, out: Option<&Path>) -> Result<i32> {
    let start = Instant::now();
    let loaded = config::load(config_path)?;
    let dir = match (out, &loaded.config.output) {
        (Some(d), _) => d.to_path_buf(),
        (None, Some(d)) => config_path.parent().unwrap_or(Path::new(".")).join(d),
        (None, None) => return Err(Error::Config("no output directory: pass --out or set `output`".into())),
    };
    let _lock = DirLock::acquire(&dir)?;
    let cfg = &loaded.config;
    let result = run(&loaded.problem, &loaded.phi0, &cfg.iteration)?;
    let rep = &result.report;

    let contours = interface_extract(&result.phi);
    write_field(dir.join("u.csv"), &result.u)?;
    write_field(dir.join("phi.csv"), result.phi.field())?;
    write_polylines(dir.join("interface.csv"), &contours)?;
    rep.write_csv(File::create(dir.join("iterations.csv"))?)?;

    let mut dopts = cfg.diagnostics.clone();
    if dopts.jump.is_none() {
        let q = &loaded.problem.q;
        if q.min() == q.max() {
            dopts.jump = Some(q.min());
        }
    }
    let (diag, diag_err) = match diagnose(&result.u, &result.phi, &dopts) {
        Ok(d) => {
            d.write_csv(File::create(dir.join("diagnostics.csv"))?)?;
            (Some(d.summary), None)
        }
        Err(e) => (None, Some(e.to_string())),
    };
    let summary = RunSummary {
        schema_version: SCHEMA_VERSION,
        converged: rep.converged,
        iterations: rep.iterations,
        final_jump_defect: rep.final_defect(),
        jump_tolerance: cfg.iteration.jump_tolerance(&loaded.problem),
        one_phase: rep.one_phase,
        skipped_vertices: rep.skipped_vertices,
        interface: InterfaceSummary::of(&contours, loaded.problem.domain.center()),
        two_plane: diag.as_ref().map(|d| d.two_plane),
        weiss_monotone: diag.as_ref().map(|d| d.weiss_monotone.clone()),
        flatness: rep.flatness.clone(),
        diagnostics: diag,
        diagnostics_error: diag_err,
    };
    write_json(dir.join("summary.json"), &summary)?;
    write_json(
        dir.join("timing.json"),
        &Timing {
            schema_version: SCHEMA_VERSION,
            seconds: start.elapsed().as_secs_f64(),
        },
    )?;
    println!(
        "solve: converged {} after {} iterations, |J|_inf = {}",
        rep.converged,
        rep.iterations,
        rep.final_defect().map(fmt_f64).unwrap_or_default()
    );
    Ok(if rep.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

/// `summary.json` of `diagnose`.
#[derive(Clone, Debug, Serialize)]
pub struct DiagnoseSummary {
    pub schema_version: u32,
    pub summary: DiagnosticsSummary,
    pub flatness: FlatnessTable,
}

pub fn cmd_diagnose(u: &Path, phi: &Path, config_path: &Path, out: &Path) -> i32 {
    let inner = || -> Result<i32> {
        let cfg = config::read_diagnose(config_path)?;
        let uf = read_field(u)?;
        let pf = read_field(phi)?;
        if !uf.grid().same_layout(pf.grid()) {
            return Err(Error::GridMismatch);
        }
        config::check_diagnostics(&cfg.diagnostics, uf.grid())?;
        let rep: DiagnosticsReport = diagnose(&uf, &LevelSet::new(pf), &cfg.diagnostics)?;
        let _lock = DirLock::acquire(out)?;
        rep.write_csv(File::create(out.join("diagnostics.csv"))?)?;
        write_json(
            out.join("summary.json"),
            &DiagnoseSummary {
                schema_version: SCHEMA_VERSION,
                summary: rep.summary.clone(),
                flatness: rep.flatness.clone(),
            },
        )?;
        println!(
            "diagnose: {} radii, Weiss monotone {}, ACF monotone {}",
            rep.rows.len(),
            rep.summary.weiss_monotone.monotone,
            rep.summary.acf_monotone.monotone
        );
        Ok(EXIT_OK)
    };
    inner().unwrap_or_else(fail)
}

pub struct PrandtlArgs {
    pub mu: f64,
    pub omega: f64,
    pub h: f64,
    pub sigma: f64,
    pub sweep: Vec<String>,
    pub profiles: Option<usize>,
}

fn parse_sweep(spec: &str) -> Result<(String, Vec<f64>)> {
    let bad = || Error::Config(format!("sweep `{spec}` is not key=a:b:n"));
    let (key, range) = spec.split_once('=').ok_or_else(bad)?;
    if !["mu", "omega", "h", "sigma"].contains(&key) {
        return Err(Error::Config(format!("unknown sweep key `{key}`")));
    }
    let parts: Vec<&str> = range.split(':').collect();
    let [a, b, n] = parts.as_slice() else { return Err(bad()) };
    let (a, b): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    let n: usize = n.parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    let vals = if n == 1 { vec![a] } else { (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect() };
    Ok((key.to_string(), vals))
}

fn sweep_points(base: PbParams, sweeps: &[(String, Vec<f64>)]) -> Vec<PbParams> {
    let mut pts = vec![base];
    for (key, vals) in sweeps {
        let mut next = Vec::with_capacity(pts.len() * vals.len());
        for p in &pts {
            for &v in vals {
                let mut q = *p;
                match key.as_str() {
                    "mu" => q.mu = v,
                    "omega" => q.omega = v,
                    "h" => q.h = v,
                    _ => q.sigma = v,
                }
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}

pub const SWEEP_HEADER: [&str; 9] = ["h", "mu", "omega", "sigma", "z0", "rho_star", "cond_holds", "rho1", "rho2"];

pub fn write_sweep<W: Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SWEEP_HEADER)?;
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    for r in rows {
        out.write_record([
            fmt_f64(r.h),
            fmt_f64(r.mu),
            fmt_f64(r.omega),
            fmt_f64(r.sigma),
            fmt_f64(r.z0),
            fmt_f64(r.rho_star),
            r.cond_holds.to_string(),
            opt(r.rho1),
            opt(r.rho2),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn cmd_prandtl(args: PrandtlArgs, out: &Path) -> i32 {
    let inner = || -> Result<i32> {
        let base = PbParams::new(args.mu, args.omega, args.sigma, args.h)?;
        let sweeps = args.sweep.iter().map(|s| parse_sweep(s)).collect::<Result<Vec<_>>>()?;
        let points = sweep_points(base, &sweeps);
        for p in &points {
            p.validate()?;
        }
        let rows: Vec<SweepRow> = points.iter().map(prandtl::sweep_row).collect();
        let _lock = DirLock::acquire(out)?;
        write_sweep(File::create(out.join("sweep.csv"))?, &rows)?;
        if let Some(n) = args.profiles {
            if n < 2 {
                return Err(Error::Config("--profiles needs at least 2 samples".into()));
            }
            for (i, p) in points.iter().enumerate() {
                if !rows[i].cond_holds {
                    continue;
                }
                for branch in [Branch::Inner, Branch::Outer] {
                    let sol = prandtl::radial_solution(p, branch)?;
                    let name = if points.len() == 1 {
                        format!("profile_branch{}.csv", branch.index())
                    } else {
                        format!("profile_{i:03}_branch{}.csv", branch.index())
                    };
                    let mut w = csv::Writer::from_path(out.join(name))?;
                    w.write_record(["r", "u"])?;
                    for (r, u) in sol.sample_profile(n) {
                        w.write_record([fmt_f64(r), fmt_f64(u)])?;
                    }
                    w.flush()?;
                }
            }
        }
        let admissible = rows.iter().filter(|r| r.cond_holds).count();
        println!("prandtl: {} points, {admissible} satisfy the existence condition", rows.len());
        Ok(if admissible == 0 { EXIT_NOT_CONVERGED } else { EXIT_OK })
    };
    inner().unwrap_or_else(fail)
}

pub fn cmd_verify(opts: &VerifyOptions) -> i32 {
    if let Some(bad) = opts.criteria.iter().flatten().find(|&&c| !verify::ALL.contains(&c)) {
        eprintln!("fblab: no criterion {bad}");
        return EXIT_INVALID;
    }
    let results = verify::run_suite(opts);
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| format!("{} ({})", r.id, r.name)).collect();
    if failed.is_empty() {
        println!("verify: all {} criteria pass", results.len());
        EXIT_OK
    } else {
        println!("verify: FAILED criteria {}", failed.join(", "));
        EXIT_FAILURE
    }
}


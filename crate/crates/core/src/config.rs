//! Run configuration files (TOML) and the problem they describe.
//!
//! ```toml
//! schema_version = 1
//!
//! [grid]
//! nx = 129
//! ny = 129
//! box = [-1.0, -1.0, 1.0, 1.0]
//!
//! [problem]
//! outer = { kind = "two_plane", beta = 0.5 }
//!
//! [init]
//! interface = { kind = "flat" }
//! ```
//!
//! Relative file paths resolve against the directory of the configuration file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::diagnostics::{DiagnoseOptions, TwoPlane};
use crate::elliptic::CoefficientField;
use crate::error::{Error, Result};
use crate::fbiter::{IterationOptions, PhaseProblem};
use crate::fields::io::read_field;
use crate::fields::{Grid2, LevelSet, ScalarField};
use crate::geom::Vec2;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub grid: GridSpec,
    #[serde(default)]
    pub domain: DomainSpec,
    pub problem: ProblemSpec,
    pub init: InitSpec,
    #[serde(default)]
    pub iteration: IterationOptions,
    #[serde(default)]
    pub diagnostics: DiagnoseOptions,
    /// Output directory; the command line overrides it.
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    #[serde(rename = "box")]
    pub bbox: [f64; 4],
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    #[default]
    Box,
    Ball {
        #[serde(default)]
        center: Vec2,
        radius: f64,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default)]
    pub coefficient: CoefficientSpec,
    #[serde(default = "ScalarSpec::zero")]
    pub f_plus: ScalarSpec,
    #[serde(default = "ScalarSpec::zero")]
    pub f_minus: ScalarSpec,
    #[serde(default = "ScalarSpec::one")]
    pub q: ScalarSpec,
    pub outer: OuterSpec,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientSpec {
    #[default]
    Identity,
    Constant {
        a11: f64,
        #[serde(default)]
        a12: f64,
        a22: f64,
    },
    /// One field file per entry.
    File { a11: PathBuf, a12: PathBuf, a22: PathBuf },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarSpec {
    Constant { value: f64 },
    File { path: PathBuf },
}

impl ScalarSpec {
    fn zero() -> Self {
        ScalarSpec::Constant { value: 0.0 }
    }

    fn one() -> Self {
        ScalarSpec::Constant { value: 1.0 }
    }
}

/// Normal `ν = (sin angle, cos angle)` throughout.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OuterSpec {
    /// `U_β(⟨x, ν⟩ + offset)`.
    TwoPlane {
        beta: f64,
        #[serde(default)]
        angle: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `U_β(y + amplitude sin(wavenumber π x))`.
    PerturbedPlane {
        #[serde(default)]
        beta: f64,
        amplitude: f64,
        #[serde(default = "one")]
        wavenumber: f64,
    },
    Constant {
        value: f64,
    },
    File {
        path: PathBuf,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSpec {
    pub interface: InterfaceSpec,
}

/// Initial level set; positive phase outside a circle.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InterfaceSpec {
    /// `phi = ⟨x, ν⟩ + offset`.
    Flat {
        #[serde(default)]
        angle: f64,
        #[serde(default)]
        offset: f64,
    },
    Circle {
        #[serde(default)]
        center: Vec2,
        radius: f64,
    },
    File {
        path: PathBuf,
    },
}

/// A validated configuration with its fields materialized.
#[derive(Clone, Debug)]
pub struct LoadedRun {
    pub config: RunConfig,
    pub problem: PhaseProblem,
    pub phi0: LevelSet,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub fn parse(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(bad(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", cfg.schema_version)));
    }
    Ok(cfg)
}

pub fn read(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    parse(&text)
}

/// Reads, validates and materializes a configuration file.
pub fn load(path: &Path) -> Result<LoadedRun> {
    let cfg = read(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    build(cfg, base)
}

/// Materializes a parsed configuration; relative paths resolve against `base`.
pub fn build(cfg: RunConfig, base: &Path) -> Result<LoadedRun> {
    let g = Grid2::new(cfg.grid.nx, cfg.grid.ny, cfg.grid.bbox).map_err(|e| bad(e.to_string()))?;
    let file = |p: &Path| -> Result<ScalarField> {
        let full = if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
        if !full.exists() {
            return Err(bad(format!("{} does not exist", full.display())));
        }
        let f = read_field(&full)?;
        if !f.grid().same_layout(&g) {
            return Err(bad(format!("{} is not on the configured grid", full.display())));
        }
        Ok(f)
    };
    let scalar = |s: &ScalarSpec| -> Result<ScalarField> {
        match s {
            ScalarSpec::Constant { value } if value.is_finite() => Ok(ScalarField::constant(g, *value)),
            ScalarSpec::Constant { value } => Err(bad(format!("constant {value} is not finite"))),
            ScalarSpec::File { path } => file(path),
        }
    };
    let a = match &cfg.problem.coefficient {
        CoefficientSpec::Identity => CoefficientField::identity(g),
        CoefficientSpec::Constant { a11, a12, a22 } => CoefficientField::constant(g, [*a11, *a12, *a22])?,
        CoefficientSpec::File { a11, a12, a22 } => {
            CoefficientField::new(g, file(a11)?.into_values(), file(a12)?.into_values(), file(a22)?.into_values())?
        }
    };
    let outer = match &cfg.problem.outer {
        OuterSpec::TwoPlane { beta, angle, offset } => {
            let plane = TwoPlane::new(*beta, [angle.sin(), angle.cos()], *offset).map_err(|e| bad(e.to_string()))?;
            plane.field(g, [0.0, 0.0])
        }
        OuterSpec::PerturbedPlane { beta, amplitude, wavenumber } => {
            if !(*beta >= 0.0) || !amplitude.is_finite() || !wavenumber.is_finite() {
                return Err(bad("perturbed_plane needs beta >= 0 and finite amplitude, wavenumber"));
            }
            let k = wavenumber * std::f64::consts::PI;
            ScalarField::from_fn(g, |x, y| TwoPlane::profile(*beta, y + amplitude * (k * x).sin()))
        }
        OuterSpec::Constant { value } => scalar(&ScalarSpec::Constant { value: *value })?,
        OuterSpec::File { path } => file(path)?,
    };
    let mut problem = PhaseProblem::new(a, scalar(&cfg.problem.f_plus)?, scalar(&cfg.problem.f_minus)?, scalar(&cfg.problem.q)?, outer)
        .map_err(|e| bad(e.to_string()))?;
    if let DomainSpec::Ball { center, radius } = cfg.domain {
        problem = problem.with_ball(center, radius).map_err(|e| bad(e.to_string()))?;
        let [x0, y0, x1, y1] = g.bbox();
        if center[0] - radius < x0 || center[0] + radius > x1 || center[1] - radius < y0 || center[1] + radius > y1 {
            return Err(bad("ball domain leaves the grid box"));
        }
    }
    let phi0 = match &cfg.init.interface {
        InterfaceSpec::Flat { angle, offset } => {
            let (s, c) = angle.sin_cos();
            LevelSet::from_fn(g, |x, y| s * x + c * y + offset)
        }
        InterfaceSpec::Circle { center, radius } => {
            if !(*radius > 0.0) {
                return Err(bad(format!("circle radius {radius}")));
            }
            LevelSet::circle(g, *center, *radius)
        }
        InterfaceSpec::File { path } => LevelSet::new(file(path)?),
    };
    cfg.iteration.validate().map_err(|e| bad(e.to_string()))?;
    check_diagnostics(&cfg.diagnostics, &g)?;
    Ok(LoadedRun { config: cfg, problem, phi0 })
}

/// Radii strictly increasing, positive and no larger than the half-width of the box.
pub fn check_diagnostics(d: &DiagnoseOptions, g: &Grid2) -> Result<()> {
    let [x0, y0, x1, y1] = g.bbox();
    let half = 0.5 * (x1 - x0).min(y1 - y0);
    if d.radii.is_empty() || d.radii.iter().any(|&r| !(r > 0.0 && r <= half)) {
        return Err(bad(format!("diagnostics radii must lie in (0, {half}]")));
    }
    if d.radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad("diagnostics radii must be strictly increasing"));
    }
    if let Some(c) = d.center {
        let rmax = d.radii[d.radii.len() - 1];
        if c[0] - rmax < x0 || c[0] + rmax > x1 || c[1] - rmax < y0 || c[1] + rmax > y1 {
            return Err(bad("largest diagnostics ball leaves the box"));
        }
    }
    if d.levels == 0 || !(d.epsilon > 0.0) {
        return Err(bad("diagnostics levels and epsilon must be positive"));
    }
    Ok(())
}

/// Only `schema_version` and `[diagnostics]` are read; other sections are ignored.
#[derive(Clone, Debug, Deserialize)]
pub struct DiagnoseConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub diagnostics: DiagnoseOptions,
}

pub fn read_diagnose(path: &Path) -> Result<DiagnoseConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    let cfg: DiagnoseConfig = toml::from_str(&text).map_err(|e| bad(e.to_string()))?;
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(bad(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", cfg.schema_version)));
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_PLANE: &str = r#"
schema_version = 1
[grid]
nx = 33
ny = 33
box = [-1.0, -1.0, 1.0, 1.0]
[problem]
outer = { kind = "two_plane", beta = 0.5 }
[init]
interface = { kind = "flat" }
[iteration]
max_iters = 5
"#;

    #[test]
    fn minimal_config_builds() {
        let run = build(parse(TWO_PLANE).unwrap(), Path::new(".")).unwrap();
        assert_eq!(run.config.iteration.max_iters, 5);
        assert_eq!(run.config.iteration.kappa, 0.5);
        assert_eq!(run.problem.q.min(), 1.0);
        let g = *run.phi0.grid();
        assert!((run.problem.outer.get(0, 32) - 1.25f64.sqrt()).abs() < 1e-12);
        assert!(run.phi0.phi(g.idx(0, 32)) > 0.0);
    }

    #[test]
    fn rejects_bad_configs() {
        let cases = [
            TWO_PLANE.replace("nx = 33", "nx = 4"),
            TWO_PLANE.replace("schema_version = 1", "schema_version = 7"),
            TWO_PLANE.replace("max_iters = 5", "max_iter = 5"),
            TWO_PLANE.replace("two_plane", "three_plane"),
            TWO_PLANE.replace("max_iters = 5", "kappa = 2.0"),
            format!("{TWO_PLANE}[diagnostics]\nradii = [0.5, 0.2]\n"),
            TWO_PLANE.replace(r#"{ kind = "flat" }"#, r#"{ kind = "file", path = "missing.csv" }"#),
        ];
        for text in cases {
            let r = parse(&text).and_then(|c| build(c, Path::new(".")));
            assert!(matches!(r, Err(Error::Config(_))), "{text}: {r:?}");
        }
    }
}

use std::path::PathBuf;

use crate::fields::Phase;

/// Errors raised by the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field has {got} values, grid needs {expected}")]
    FieldLength { expected: usize, got: usize },

    #[error("non-finite value at node {0}")]
    NonFinite(usize),

    #[error("grids do not match")]
    GridMismatch,

    #[error("insufficient one-sided stencil at node ({i}, {j}): phase is under-resolved")]
    InsufficientStencil { i: usize, j: usize },

    #[error("level set has a single sign; no interface")]
    SingleSigned,

    #[error("reinitialization sweeps did not converge after {0} passes")]
    ReinitNotConverged(usize),

    #[error("coefficient field is not uniformly elliptic at node {node} (eigenvalue {eigenvalue})")]
    NotElliptic { node: usize, eigenvalue: f64 },

    #[error("{phase:?} region has no interior nodes")]
    EmptyRegion { phase: Phase },

    #[error("linear solver stalled after {iterations} iterations (residual {residual:e}, target {tol:e})")]
    LinearSolve {
        iterations: usize,
        residual: f64,
        tol: f64,
    },

    #[error("interface point ({x:.6}, {y:.6}) is under-resolved on the {phase:?} side")]
    UnderResolved { x: f64, y: f64, phase: Phase },

    #[error("no interface points")]
    EmptyInterface,

    #[error("{phase:?} phase collapsed at iteration {iteration}")]
    PhaseCollapse { phase: Phase, iteration: usize },

    #[error("ball of radius {radius} around ({cx}, {cy}) leaves the domain")]
    BallOutsideDomain { cx: f64, cy: f64, radius: f64 },

    #[error("rescaling window leaves the domain")]
    WindowOutsideDomain,

    #[error("no interface inside the ball; flatness undefined")]
    NoInterfaceInBall,

    #[error("free boundary is not a graph over any direction")]
    NotAGraph,

    #[error("no nodes qualify for the estimate")]
    NoQualifyingNodes,

    #[error("existence condition fails: h^2 sigma = {target} must exceed max(0, z0 = {z0})")]
    ConditionFails { z0: f64, target: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed field file {path}: {reason}")]
    FieldFile { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! Divergence-form Dirichlet solves on one phase and one-sided interface traces.

mod coeff;
mod probe;
pub mod sparse;
mod solve;

pub use coeff::{eigenvalues, quad_form, CoefficientField};
pub use probe::{interface_normal, interface_normal_gradient, interface_normal_gradient_in, InterfaceGradient, PROBES};
pub use solve::{solve_phase, solve_phase_with, Ordering, PhaseRegion, PhaseSolution, SolveOptions, THETA_MIN};

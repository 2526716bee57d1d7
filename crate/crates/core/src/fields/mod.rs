//! Grids, node fields, level sets and interface geometry.

pub mod contour;
mod domain;
mod field;
pub mod gradient;
mod grid;
pub mod io;
pub mod reinit;

pub use contour::{interface_extract, Contours, NearestPoint, Polyline};
pub use domain::{Ball, Domain};
pub use field::{LevelSet, Phase, ScalarField};
pub use gradient::{gradient, gradient_in, sample_gradient, GradientMode};
pub use grid::{make_grid, Grid2};
pub use reinit::reinitialize;

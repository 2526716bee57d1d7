//! Monitor quantities on discrete `(u, phi)` pairs.

mod fit;
mod geometry;
mod modulus;
mod quadrature;
mod report;

pub use fit::{two_plane_fit, TwoPlane, TwoPlaneFit, BETA_MAX};
pub use geometry::{flatness_slab, flatness_table, graph_direction, interface_points_in_ball, minimal_slab, nondegeneracy, FlatnessEntry, FlatnessTable};
pub use modulus::{
    holder_exponent, holder_exponent_in_frame, oscillation_decay, oscillation_decay_in_frame, HolderEstimate, OscillationLevel, EPS_BAR,
    LEVEL_RATIO,
};
pub use quadrature::{
    acf_product, ball_integrals, boundary_term, rescale, rescale_level_set, weiss_energy, weiss_phi, weiss_series, AcfSeries, BallIntegrals,
    MonotoneVerdict, WeissSeries, WeissValue, BOUNDARY_SAMPLES,
};
pub use report::{diagnose, nearest_interface_point, report_flatness, DiagnoseOptions, DiagnosticsReport, DiagnosticsRow, DiagnosticsSummary, CSV_HEADER};

//! Radial calculus on R^4: grids, profiles, Laplacians, norms and the
//! exponential functional.

mod constants;
mod function;
mod grid;
mod norms;

pub use constants::{alpha_beta, concentration_limit_pbeta};
pub use function::{fornberg_weights, Jet, JetFn, Piece, RadialFunction, SampledMeta, ScalarFn, MIN_DECAY};
pub use grid::RadialGrid;
pub use norms::{
    adams_functional, adams_functional_series, integrate_radial, lp_norm, radial_laplacian, sup_abs,
    weighted_seminorm, weighted_seminorm_sq, AdamsValue, LpNorm, SeriesValue, SPHERE_AREA,
};
#[allow(unused_imports)]
pub(crate) use norms::integrate_profile;

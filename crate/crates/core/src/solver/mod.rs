//! Finite-element mountain-pass solver for Delta(omega_beta Delta u) = f(u).

mod config;
mod fem;
mod mountain_pass;
mod problem;
mod verify;

pub use config::{SolveConfig, SolveMode, StepRule, VerifySpec};
pub use fem::{FemSpace, MeshSpec, OuterBoundary};
pub use mountain_pass::{
    mountain_pass_geometry_probe, mountain_pass_solve, resolve_from, solve_on, Certificates, GeometryProbe, Profile,
    PsDiagnostics, SolveReport, Stage, TraceRow,
};
pub use problem::Problem;
pub use verify::{gradient_check, verify_solution, weak_defects, ResolveCheck, VerificationCertificate};

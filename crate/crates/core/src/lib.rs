//! Weighted Adams inequalities on R^4.
//!
//! The crate covers the radial weight omega_beta and its structural
//! conditions, radial calculus with the sharp exponent alpha_beta, the
//! pointwise radial bound for |x| >= 1, the concentrating extremal family,
//! the model exponential nonlinearity, and a C1 finite-element
//! mountain-pass solver for Delta(omega_beta Delta u) = f(u).

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod corpus;
pub mod error;
pub mod extremals;
pub mod io;
pub mod nonlinearity;
pub mod quadrature;
pub mod radial;
pub mod radial_lemma;
pub mod report;
pub mod solver;
pub mod weights;

pub use error::{Error, Result};
pub use quadrature::QuadratureSpec;
pub use report::{ConditionEntry, ConditionReport};

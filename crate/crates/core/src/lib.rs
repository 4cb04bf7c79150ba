//! Algebraic estimating equations for curved exponential families.
//!
//! The crate builds maximum-likelihood and higher-order efficient estimating
//! systems for algebraic models, lowers their degree with Gröbner normal forms,
//! solves them with linear homotopy continuation and runs Monte-Carlo
//! experiments comparing the estimators.

pub mod polyalg;
pub mod groebner;
pub mod homotopy;
pub mod estimators;
pub mod models;
pub mod simulate;

//! Sparse multivariate polynomials over exact rationals or complex doubles,
//! pure lex monomial orders, variable tables and a text exchange grammar.

mod monomial;
mod order;
mod poly;
mod table;
mod text;

pub use monomial::{Monomial, Var};
pub use order::{MonomialOrder, OrderKind};
pub(crate) use order::Relabel;

pub use poly::{divide_with_remainder, f64_to_rat, rat, rat_to_f64, Coeff, Division, Field, Polynomial, Rat};
pub(crate) use poly::{insert_unchecked, pop_last};
pub use table::{Block, VariableTable};
pub use text::{format_poly, format_rat, parse_poly, parse_rat};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("no value bound for variable {0}")]
    Unbound(Var),
    #[error("variable {0} listed twice in a monomial order")]
    DuplicateVariable(Var),
    #[error("invalid variable name `{0}`")]
    BadName(String),
    #[error("variable `{0}` declared twice")]
    DuplicateName(String),
    #[error("unknown variable `{0}`")]
    UnknownName(String),
    #[error("eta block has {eta} variables but X block has {x}")]
    BlockMismatch { eta: usize, x: usize },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

//! Words, state symbols and (nc) state polynomials.
//!
//! The basic objects are free words in letters `x1..xn` ([`NcWord`]),
//! canonical state symbols `s(w)` with `s(w) = s(w*)` ([`SSymbol`]),
//! products of state symbols ([`SWord`]), products with a word tail
//! ([`NcsWord`]) and sparse polynomials over those bases ([`StatePoly`],
//! [`NcStatePoly`]). All values are immutable after construction and safe to
//! share across threads.

mod coeff;
mod eval;
mod parse;
mod poly;
mod word;

pub use coeff::{Coeff, Rat};
pub use eval::{random_evaluation, random_nonzero_witness, EvalError, Evaluation, State};
pub use parse::{
    parse_nc_state_poly, parse_state_poly, print_nc_state_poly, print_state_poly, ParseError,
    VarTable,
};
pub use poly::{NcStatePoly, StatePoly};
pub use word::{NcWord, NcsWord, SSymbol, SWord, Var};

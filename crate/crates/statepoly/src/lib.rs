//! Optimization of state polynomials in noncommuting variables.
//!
//! A *state polynomial* is a commutative polynomial in formal expectation
//! symbols `s(w)` of words in noncommuting letters; an *nc state polynomial*
//! additionally carries a free word tail. This crate provides
//!
//! * exact symbolic arithmetic for words, state symbols and (nc) state
//!   polynomials, with rational or floating coefficients and numeric
//!   evaluation at (state, matrix tuple) pairs ([`algebra`]);
//! * confluent rewriting modulo structural relations: binary observables,
//!   projections, cross-party commutation and network factorization of the
//!   state symbol ([`quotient`]);
//! * moment relaxations of state polynomial optimization problems: word
//!   bases, Hankel/localizing blocks, moment identification and the
//!   primal/dual SDP pair ([`moment`]), with correlative-sparsity and
//!   sign-symmetry reductions ([`sparsity`]) and a complex-framework variant
//!   ([`complex`]);
//! * an embedded primal–dual interior point SDP solver and bit-exact SDPA
//!   sparse file interop ([`solver`]);
//! * flatness detection and GNS extraction of finite-dimensional minimizers
//!   ([`extract`]);
//! * exact verification of algebraic positivity certificates ([`certify`]);
//! * a front end for Bell-inequality and quantum-network scenarios with a
//!   small problem DSL ([`scenarios`]) and reproducible run reports
//!   ([`report`]).
//!
//! The guide in `book/` walks through the concepts; its code snippets are
//! compiled as doctests via the [`guide`] module.

pub mod algebra;
pub mod certify;
pub mod complex;
pub mod extract;
pub mod guide;
pub mod linalg;
pub mod moment;
pub mod quotient;
pub mod report;
pub mod scenarios;
pub mod solver;
pub mod sparsity;

pub use algebra::{Coeff, Evaluation, NcStatePoly, NcWord, NcsWord, Rat, SSymbol, SWord, StatePoly};
pub use quotient::{NormalForm, QuotientContext, VarKind};


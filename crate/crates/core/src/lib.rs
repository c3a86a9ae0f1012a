//! Intuitionistic fuzzy normed spaces and weighted-mean summability of
//! double sequences.
//!
//! The crate is organised bottom-up:
//!
//! - [`ifn`]: vectors in `R^d`, induced norms, membership/nonmembership
//!   pairs `(mu, nu)` and an executable axiom suite.
//! - [`sequences`]: double sequences (closures or a small expression
//!   language), weight sequences, sampled lattices and weighted 2D prefix
//!   tables, difference transforms.
//! - [`means`]: the weighted mean tables `t^{11}`, `t^{10}`, `t^{01}`,
//!   rectangle/strip means over `(m, [lambda m]]` windows and the algebraic
//!   decomposition identities linking them.
//! - [`analysis`]: finite-horizon estimators for convergence, Cauchy,
//!   q-boundedness, slow oscillation, the Tauberian window conditions,
//!   weight-class membership, and a harness that checks
//!   hypothesis-to-conclusion implications on concrete instances.
//!
//! Every limit statement is rendered at a declared horizon and over declared
//! grids; verdicts say "at horizon" for that reason.

pub mod analysis;
mod error;
pub mod ifn;
pub mod means;
pub mod sequences;

pub use error::{Error, EvalFailure, Result, SyntaxError};
pub use ifn::{standard_pair, IFNormPair, NormChoice, Vector};

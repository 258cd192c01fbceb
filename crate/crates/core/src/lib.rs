//! Erasure list-decodable binary codes viewed as vertex Turán objects in the
//! hypercube.
//!
//! A set of binary words of length `n` is a `(d, L, n)`-code when every
//! `d`-dimensional subcube of `Q_n` contains at most `L` of its words, or
//! equivalently when erasing any `d` bits of a codeword leaves at most `L`
//! completions. This crate builds such codes, verifies them exhaustively and
//! computes the extremal quantities that bound them:
//!
//! - [`gf2`]: bit-packed linear algebra over GF(2).
//! - [`basisprob`]: the basis probability `P(t)`, its limit `c`, and
//!   distributional bounds on the probability of drawing a basis.
//! - [`extremal`]: `B(k, d)`, `g(d)`, the prior lower bound `t2 + t3`, and the
//!   `L(d)` bounds table.
//! - [`codes`]: the random-linear layered construction, residue subcodes,
//!   weight-class codes, hitting sets, and the code file format.
//! - [`cube`]: subcube enumeration, verification scans and small exact
//!   maximum-code searches.
//! - [`hypergraph`]: uniform hypergraphs, augmentations, blow-ups, copy
//!   search and Lagrangians.
//! - [`regression`]: the manifest of published reference values.

pub mod basisprob;
pub mod codes;
pub mod cube;
mod error;
pub mod extremal;
pub mod gf2;
pub mod hypergraph;
pub mod regression;
pub mod seed;

pub use error::{Error, Result};

//! Exact evaluation and asymptotic analysis of spin networks.
//!
//! A spin network is a cubic ribbon graph (every vertex carries a cyclic
//! order of its three half-edges) together with a coloring of its edges by
//! nonnegative integers. The crate provides:
//!
//! * ribbon-graph combinatorics: parsing, curves (2-regular subgraphs),
//!   faces, genus and crossing parities (`graph`),
//! * exact evaluation in several normalizations, by brute-force state sum
//!   and by a much faster curve-configuration sum, plus closed forms for
//!   theta and tetrahedron networks (`exact`),
//! * the rational generating function of all evaluations of a fixed graph
//!   (`genfun`),
//! * the metric geometry of the tetrahedron attached to a six-edge
//!   coloring: Cayley-Menger determinant, dihedral angles, growth rates
//!   (`tet`),
//! * asymptotics: a saddle-point engine for balanced factorial terms,
//!   Stokes-type amplitude constants and exact asymptotic expansions of
//!   coloring sequences (`asympt`),
//! * exact guessing of linear recurrences with polynomial coefficients
//!   (`recurrence`),
//! * a self-check runner shared by the CLI and the integration tests
//!   (`acceptance`).

// Series and matrix code below sticks to index loops where the indices
// carry meaning (shifts, powers of n); iterator forms read worse there.
#![allow(clippy::needless_range_loop)]

pub mod acceptance;
pub mod asympt;
pub mod error;
pub mod exact;
pub mod genfun;
pub mod graph;
pub mod quadnum;
pub mod real;
pub mod recurrence;
pub mod tet;

pub use error::{Error, Result};

//! Computational toolkit for unipotent weighted orbital integrals on GL(n).
//!
//! The crate is organized bottom-up:
//!
//! * [`orbits`]: partitions, Jordan data, the standard nilpotent `X`.
//! * [`roots`]: semi-standard parabolics and Levis, coroots, weights, θ.
//! * [`richardson`]: the ε-parametrization of Richardson parabolics.
//! * [`localfield`]: Iwasawa decompositions and the weight data `R_P`.
//! * [`gmfam`]: (G,M)-families, jets, polytope oracles.
//! * [`zeta`]: local, global and partial zeta factors.
//! * [`orbital`]: weighted orbital integrals and global coefficients.
//! * [`verify`]: the seeded consistency suites shared by the CLI and tests.
//! * [`cli`]: the command-line driver behind the `uwoi` binary.

pub mod error;
pub mod gmfam;
pub mod hull;
pub mod jet;
pub mod linalg;
pub mod localfield;
pub mod orbital;
pub mod orbits;
pub mod richardson;
pub mod roots;
pub mod verify;
pub mod cli;
pub mod zeta;

pub use error::{Error, Result};

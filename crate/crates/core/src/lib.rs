//! Rational Ruijsenaars-Schneider hierarchy and polynomial tau-functions of
//! the discrete KP hierarchy.
//!
//! The crate is `no_std` (it needs `alloc`). Modules:
//!
//! - [`dynamics`]: the matrices `X`, `Y`, `M`, Hamiltonians `tr(Y^k)` and
//!   their vector fields.
//! - [`integrator`]: adaptive integration of single flows and multi-time paths.
//! - [`tau`]: the determinant formula for `tau(n; t)`, its roots, Miwa shifts,
//!   and recovery of the particle system from `tau`.
//! - [`pdo`]: exact and sampled pseudo-difference operator algebra, the wave
//!   and Lax operators, and finite-difference residuals of the hierarchy.
//! - [`wave`]: wave functions as tau-quotients and their expansions.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dynamics;
pub mod error;
pub mod integrator;
pub mod math;
pub mod pdo;
pub mod phase;
pub mod sample;
pub mod tau;
pub mod time;
pub mod wave;

pub use error::{Error, Result};
pub use phase::{PhasePoint, DEFAULT_EPSILON_COLLISION};
pub use time::TimeVector;

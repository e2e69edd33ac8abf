//! Pseudo-difference operator algebra over the lattice variable `n`.

pub mod coeff;
pub mod exact;
pub mod lax;
pub mod op;
pub mod poly;
pub mod ratfn;
pub mod residuals;
pub mod shift;

pub use coeff::{Coefficient, GridFn};
pub use exact::ExactPhase;
pub use op::{binomial, PseudoDiffOp};
pub use poly::Polynomial;
pub use ratfn::RationalFn;
pub use shift::ShiftOp;

//! Energy-consistent acoustic tube models.
//!
//! Webster horn model on a curved, lossy tube ([`webster`]), an axisymmetric
//! finite-volume wave solver for straight cylinders ([`cylinder`]), the
//! boundary-node energy checks ([`node`]), a shared implicit midpoint
//! integrator with an energy ledger ([`stepper`]) and the command layer used
//! by the `tubenode` binary ([`commands`]).

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod cylinder;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod node;
pub mod stepper;
pub mod webster;

//! Simulation and numerical verification of a weak one-out-of-two quantum
//! oblivious transfer protocol and the cheat-sensitive quantum bit
//! commitment scheme built on top of it.
//!
//! The crate is organised bottom-up:
//!
//! - [`quantum`]: dense state vectors, density matrices, measurements and the
//!   trace-norm / Helstrom discrimination toolkit.
//! - [`branching`]: the randomness abstraction shared by sampled runs and
//!   exhaustive exact enumeration.
//! - [`ot`]: the oblivious transfer state machine over one global state.
//! - [`adversaries`]: explicit cheating strategies and random strategy families.
//! - [`qbc`]: bit commitment built from two oblivious transfer executions.
//! - [`analysis`]: exact statistics, Monte Carlo cross-checks, bound verifiers.

pub mod adversaries;
pub mod analysis;
pub mod bit;
pub mod branching;
pub mod error;
pub mod ot;
pub mod qbc;
pub mod quantum;

pub use bit::Bit;
pub use error::{Error, Result};

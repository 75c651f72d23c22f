//! Deterministic simulation of small composite quantum systems.
//!
//! The crate models pure states and density operators over named tensor
//! factors and builds three families of scenarios on top of them:
//!
//! * an exponential-decay model entangling a two-level emitter with a
//!   two-state target, reduced to show when superpositions survive,
//! * cavity-QED which-path protocols (Ramsey pulses, dispersive shifts,
//!   resonant atom-field exchange, which-path erasure and state-selective
//!   detection),
//! * a pointer-chain premeasurement that correlates a system with a
//!   multi-reading apparatus.
//!
//! A line-oriented protocol language (`.qproto`) drives the same operations
//! from scripts, and every built-in scenario emits structured report rows
//! that the command line front end serializes deterministically.

pub use num_complex::Complex64 as C64;

pub mod cat;
pub mod cavity;
pub mod measurement;
pub mod protocol;
pub mod report;
pub mod scenario;
pub mod testkit;
pub mod tol;

mod density;
mod error;
mod operator;
mod state;

pub mod space;

pub use density::DensityOperator;
pub use error::Error;
pub use operator::{hermiticity_deviation, unitarity_deviation, Observable};
pub use space::{SpaceLabel, SpaceRegistry};
pub use state::StateVector;

pub type Result<T> = std::result::Result<T, Error>;

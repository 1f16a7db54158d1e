//! Evolutionary search engines built around an exact small-register quantum
//! simulator.
//!
//! The crate bundles four engines that share the [`qsim`] core:
//!
//! * [`opga`] — a real-coded GA that learns an n×n linear operator from
//!   input/output examples.
//! * [`circga`] — GAs over quantum circuits: codon-encoded teleportation
//!   circuits (optimization) and gate-structure lists (design).
//! * [`qiga`] — a quantum-inspired GA for the 0-1 knapsack, plus the
//!   conventional-GA baselines it is usually compared against.
//! * [`qga`] — a classical simulation of a quantum GA built on entangled
//!   individual/fitness register pairs.
//!
//! All engines are deterministic for a fixed seed.

pub mod circga;
pub mod opga;
pub mod qga;
pub mod qiga;
pub mod qsim;

pub use qsim::{Gate, MeasurementOutcome, StateVector};

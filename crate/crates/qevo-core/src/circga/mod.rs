//! GAs over quantum circuits.
//!
//! Two search modes share this module:
//!
//! * teleportation-circuit optimization over codon chromosomes — fixed-length
//!   strings over {0,1,2,3} read three letters at a time, each codon naming a
//!   gate for the EPR / Alice / Bob stage it falls in;
//! * circuit design over lists of gate structures, scored by amplitude-wise
//!   distance to target states.

mod codon;
mod design;
mod ga;
mod teleport;

pub use codon::{
    decode, encode, CodonChromosome, CodonError, DecodedCircuit, TeleportGate,
};
pub use design::{
    bell_design_case, design_error, run_design_ga, DesignError, DesignParams, DesignResult,
    GateKind, GateStructure,
};
pub use ga::{run_circuit_ga, CircuitGaParams, CircuitGaResult, CircuitInit, GaRecord};
pub use teleport::{branch_error, evaluate, sample_eval_states, simulate_teleport, ZERO_AMP_TOL};

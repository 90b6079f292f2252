//! Dense simulation of the reduction algorithm.

pub mod reduction;
pub mod state;
pub mod unitary;

pub use reduction::{run_reduction, theorem_bound, verify_bound, BoundReport, Reduction, ReductionOutcome};
pub use state::QuantumState;
pub use unitary::{DecoderUnitary, RegisterMap};

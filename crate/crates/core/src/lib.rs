//! Finite domains and information orders, entropy-valued measurements, a
//! contextuality quantifier for measurement bases, and two reference
//! experiments: a classical box search and sequential spin measurements.

pub mod classical;
pub mod cli;
pub mod context;
pub mod measures;
pub mod poset;
pub mod quantum;
pub mod sims;

pub use classical::{bayesian_leq, ClassicalState};
pub use context::{contextual_distance, Classification, ContextReport};
pub use measures::{verify_axioms, AxiomReport, MeasurementFn};
pub use poset::{ElementSubset, FinitePoset, PosetReport};
pub use quantum::{BlochAxis, NBasis, QubitState};

//! Faithful AND-OR interaction explanations of set functions.
//!
//! A black-box model evaluated on all `2^n` masked versions of an input is a
//! [`ValueTable`]. From it this crate extracts AND interactions (Harsanyi
//! dividends) and OR interactions in closed form, relates them to Shapley
//! style indices, and searches for a sparse mixed AND-OR explanation.

pub mod axioms;
pub mod concepts;
pub mod decompose;
pub mod error;
pub mod interactions;
pub mod lattice;
pub mod oracle;
pub mod shapley;
pub mod synthetic;
pub mod table;

pub use concepts::{ConceptReport, ThresholdPolicy};
pub use decompose::{decompose, DecomposerConfig, DecompositionResult, Method};
pub use error::{Error, Result};
pub use interactions::{and_interactions, or_interactions, InteractionKind, InteractionVector};
pub use lattice::{LatticeVector, Subset};
pub use table::{TableFormat, ValueTable};

//! Reasoning over definite logic programs: least Herbrand models with
//! provenance, θ-subsumption, connected theories, and hypothesis
//! generalization by inverse subsumption.

pub mod connected;
pub mod entailment;
pub mod error;
pub mod exec;
pub mod gen;
pub mod induction;
pub mod oracle;
mod report;
pub mod subsumption;
pub mod syntax;

pub use error::{Error, ParseError, Result};

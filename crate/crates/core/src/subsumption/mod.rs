//! Substitutions, θ-subsumption between clauses, subsumption between
//! theories, and generalization of ground clauses.
//!
//! `C ⪰ D` holds when some θ maps `C`'s head onto `D`'s head and `C`'s body
//! into `D`'s body. Heads are matched against heads only; for definite
//! clauses this coincides with the classical literal-set definition.

mod generalize;
mod matching;
mod substitution;

pub use generalize::{generalize_clause, Generalizations};
pub use matching::{
    clause_subsumes, find_subsumer, is_instance, is_variant, theory_subsumes, SubsumptionWitness,
};
pub use substitution::Substitution;

//! First-order syntax: terms, atoms, definite clauses, theories and open
//! programs, plus the text format they are read from and printed to.

mod clause;
mod parser;
mod term;
mod theory;
mod universe;

pub use clause::{Clause, DefiniteGoal};
pub use parser::{
    parse_atom, parse_clause, parse_constraints, parse_layers, parse_program, parse_signatures,
    parse_theory,
};
pub use term::{Atom, Signature, Term};
pub use theory::{ArityTable, OpenProgram, Theory};
pub use universe::{ground_instances, Symbols};

use thiserror::Error;

use crate::syntax::{Atom, Clause};

/// A syntax error with a 1-based source location.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),

    #[error("arity clash: {kind} `{name}` used with arity {first} and {second}")]
    ArityClash {
        kind: &'static str,
        name: String,
        first: usize,
        second: usize,
    },

    #[error("functor `{0}` makes the Herbrand universe infinite; set a depth bound")]
    UnboundedUniverse(String),

    #[error("cannot ground `{0}` over an empty Herbrand universe")]
    EmptyUniverse(String),

    #[error("expected a ground {kind}, found `{item}`")]
    NonGround { kind: &'static str, item: String },

    #[error("`{0}` is not entailed")]
    NotEntailed(Atom),

    #[error("background and hypothesis violate an integrity constraint")]
    Inconsistent,

    #[error("the support of `{0}` uses no hypothesis clause")]
    NoHypothesisClause(Atom),

    #[error("a layered theory needs at least one layer")]
    EmptyTheory,

    #[error("layer {0} is empty")]
    EmptyLayer(usize),

    #[error("clause `{clause}` appears in layers {first} and {second}")]
    OverlappingLayers {
        clause: Clause,
        first: usize,
        second: usize,
    },

    #[error("clause `{0}` never fires over the background theory")]
    UnusedClause(Clause),

    #[error("oracle bound exceeded: {what} is {size}, limit {limit}")]
    OracleBounds {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("`{0}` cannot be reached through abducible predicates")]
    Unreachable(Atom),

    #[error("`{0}` already follows from the background theory")]
    AlreadyEntailed(Atom),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Sentences over a finite vocabulary: syntax, the `.plog` reader and
//! quantifier grounding.

mod constraints;
mod ground;
mod parser;
mod syntax;

pub use constraints::{Constraint, ConstraintSet, MAX_CONSTRAINTS};
pub use ground::{absorb, ground};
pub use parser::{parse_formula, parse_number, parse_program, NamedSentence, Program};
pub use syntax::{Domain, GroundAtom, GroundSentence, Sentence, Symbol, Term, Vocabulary};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LogicError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("undeclared {kind} `{name}`")]
    Undeclared { kind: &'static str, name: String },
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("domain `{0}` has no constants")]
    EmptyDomain(String),
    #[error("line {line}: belief value {value} is outside [0,1]")]
    BeliefRange { line: usize, value: String },
    #[error("`{name}` takes {expected} argument(s), found {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("term `{term}` belongs to domain `{found}`, expected `{expected}`")]
    DomainMismatch {
        term: String,
        expected: String,
        found: String,
    },
    #[error("variable `{0}` is not bound by a quantifier")]
    FreeVariable(String),
    #[error("at most {0} constraint sentences are supported")]
    TooManyConstraints(usize),
    #[error("line {line}: {inner}")]
    InLine { line: usize, inner: Box<LogicError> },
}

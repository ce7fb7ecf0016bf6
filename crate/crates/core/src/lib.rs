//! Probabilities on sentences of a finite first-order language.
//!
//! A knowledge base declares finite domains, predicates and propositions,
//! and assigns probabilities to some sentences. Sentences are grounded to
//! propositional formulas; a belief is a weight per world (complete truth
//! assignment). The crate decides whether an assignment extends to a
//! probability, completes it by relative-entropy projection from a prior,
//! and answers probability queries. The [`induct`] module covers the
//! countable case for sequences `B(1), B(2), …` in closed form.

pub mod belief;
pub mod extend;
pub mod induct;
pub mod logic;
pub mod maxent;
pub mod numeric;
pub mod sat;
pub mod scenarios;
pub mod worlds;

use thiserror::Error;

use belief::BeliefError;
use extend::ExtendError;
use induct::InductError;
use logic::LogicError;
use maxent::MaxentError;
use sat::SatError;
use worlds::WorldsError;

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// The constraints admit no probability, or the solver could not find one.
pub const EXIT_INFEASIBLE: i32 = 1;
/// Malformed input: syntax, names, values, files.
pub const EXIT_INPUT: i32 = 2;
/// A resource cap (worlds, atoms, constraints) was exceeded.
pub const EXIT_CAP: i32 = 3;
/// Conditioning on a sentence of probability zero.
pub const EXIT_UNDEFINED: i32 = 4;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Sat(#[from] SatError),
    #[error(transparent)]
    Worlds(#[from] WorldsError),
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Extend(#[from] ExtendError),
    #[error(transparent)]
    Maxent(#[from] MaxentError),
    #[error(transparent)]
    Induct(#[from] InductError),
    #[error("{0}")]
    Input(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Logic(e) => logic_code(e),
            Error::Sat(_) => EXIT_CAP,
            Error::Worlds(e) => worlds_code(e),
            Error::Belief(e) => belief_code(e),
            Error::Extend(e) => extend_code(e),
            Error::Maxent(e) => maxent_code(e),
            Error::Induct(e) => match e {
                InductError::ZeroPrefix(_) => EXIT_UNDEFINED,
                InductError::PrefixTooLong(_) => EXIT_CAP,
                InductError::Worlds(w) => worlds_code(w),
                InductError::Belief(b) => belief_code(b),
                _ => EXIT_INPUT,
            },
            Error::Input(_) => EXIT_INPUT,
        }
    }
}

fn logic_code(e: &LogicError) -> i32 {
    match e {
        LogicError::TooManyConstraints(_) => EXIT_CAP,
        LogicError::InLine { inner, .. } => logic_code(inner),
        _ => EXIT_INPUT,
    }
}

fn worlds_code(e: &WorldsError) -> i32 {
    match e {
        WorldsError::CapExceeded { .. }
        | WorldsError::CapTooLarge(_)
        | WorldsError::TooManySentences(_) => EXIT_CAP,
        WorldsError::Logic(l) => logic_code(l),
        _ => EXIT_INPUT,
    }
}

fn belief_code(e: &BeliefError) -> i32 {
    match e {
        BeliefError::UndefinedConditional => EXIT_UNDEFINED,
        BeliefError::Worlds(w) => worlds_code(w),
        _ => EXIT_INPUT,
    }
}

fn extend_code(e: &ExtendError) -> i32 {
    match e {
        ExtendError::TooManyConstraints(_) | ExtendError::Sat(_) => EXIT_CAP,
        ExtendError::Worlds(w) => worlds_code(w),
        ExtendError::Belief(b) => belief_code(b),
        ExtendError::Maxent(m) => maxent_code(m),
        ExtendError::PriorNotCournot | ExtendError::PriorDegenerate { .. } => EXIT_INPUT,
        ExtendError::Numerical(_) => EXIT_INFEASIBLE,
    }
}

fn maxent_code(e: &MaxentError) -> i32 {
    match e {
        MaxentError::Infeasible(_) | MaxentError::Numerical { .. } => EXIT_INFEASIBLE,
        MaxentError::PriorDegenerate | MaxentError::Dimension(..) => EXIT_INPUT,
        MaxentError::Extend(x) => extend_code(x),
        MaxentError::Worlds(w) => worlds_code(w),
        MaxentError::Belief(b) => belief_code(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let e: Error = LogicError::Duplicate("p".into()).into();
        assert_eq!(e.exit_code(), EXIT_INPUT);
        let e: Error = WorldsError::CapExceeded { atoms: 30, cap: 20 }.into();
        assert_eq!(e.exit_code(), EXIT_CAP);
        let e: Error = BeliefError::UndefinedConditional.into();
        assert_eq!(e.exit_code(), EXIT_UNDEFINED);
        let inf = extend::Infeasibility {
            subsystem: vec![0],
            artificial_sum: 0.5,
        };
        let e: Error = MaxentError::Infeasible(inf).into();
        assert_eq!(e.exit_code(), EXIT_INFEASIBLE);
        let e: Error = LogicError::InLine {
            line: 3,
            inner: Box::new(LogicError::TooManyConstraints(20)),
        }
        .into();
        assert_eq!(e.exit_code(), EXIT_CAP);
    }
}

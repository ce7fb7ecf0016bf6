//! Satisfiability of ground sentences, and the validity, implication and
//! disjointness queries built on it.

mod cnf;
mod dpll;

pub use cnf::{to_cnf, Cnf, Lit, SatLimits};
pub use dpll::Solver;

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use thiserror::Error;

use crate::logic::GroundSentence;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SatError {
    #[error("{found} distinct ground atoms exceed the solver cap of {cap}")]
    TooManyGround { found: usize, cap: usize },
    #[error("clause form needs more than {cap} auxiliary variables")]
    TooManyAux { cap: usize },
}

/// Satisfiability oracle. Each query builds and runs a fresh solver, so an
/// oracle can be shared freely between threads.
#[derive(Debug, Default)]
pub struct SatOracle {
    limits: SatLimits,
    dimacs_dir: Option<PathBuf>,
    dumped: AtomicUsize,
}

impl Clone for SatOracle {
    fn clone(&self) -> Self {
        SatOracle {
            limits: self.limits,
            dimacs_dir: self.dimacs_dir.clone(),
            dumped: AtomicUsize::new(self.dumped.load(Ordering::Relaxed)),
        }
    }
}

impl SatOracle {
    pub fn new(limits: SatLimits) -> Self {
        SatOracle {
            limits,
            ..Default::default()
        }
    }

    /// Write every clause form handed to the solver as `query-<k>.cnf` in
    /// `dir`, for cross-checking with external solvers.
    pub fn with_dimacs_dump(mut self, dir: PathBuf) -> Self {
        self.dimacs_dir = Some(dir);
        self
    }

    pub fn limits(&self) -> SatLimits {
        self.limits
    }

    /// A satisfying assignment, keyed by ground-atom index, if one exists.
    pub fn model(&self, g: &GroundSentence) -> Result<Option<Vec<(usize, bool)>>, SatError> {
        let cnf = to_cnf(g, self.limits)?;
        if let Some(dir) = &self.dimacs_dir {
            let k = self.dumped.fetch_add(1, Ordering::Relaxed);
            // best effort; a failed debug dump must not change answers
            let _ = std::fs::write(dir.join(format!("query-{k}.cnf")), cnf.to_dimacs());
        }
        Ok(Solver::new(&cnf).solve().map(|values| {
            cnf.atoms
                .iter()
                .enumerate()
                .map(|(v, &a)| (a, values[v]))
                .collect()
        }))
    }

    pub fn is_satisfiable(&self, g: &GroundSentence) -> Result<bool, SatError> {
        Ok(self.model(g)?.is_some())
    }

    pub fn is_valid(&self, g: &GroundSentence) -> Result<bool, SatError> {
        Ok(!self.is_satisfiable(&g.clone().not())?)
    }

    /// `a → b` is valid.
    pub fn implies(&self, a: &GroundSentence, b: &GroundSentence) -> Result<bool, SatError> {
        Ok(!self.is_satisfiable(&a.clone().and(b.clone().not()))?)
    }

    /// `¬(a ∧ b)` is valid.
    pub fn disjoint(&self, a: &GroundSentence, b: &GroundSentence) -> Result<bool, SatError> {
        Ok(!self.is_satisfiable(&a.clone().and(b.clone()))?)
    }

    pub fn equivalent(&self, a: &GroundSentence, b: &GroundSentence) -> Result<bool, SatError> {
        Ok(!self.is_satisfiable(&a.clone().iff(b.clone()).not())?)
    }
}

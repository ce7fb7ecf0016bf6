//! The finite space of worlds (complete truth assignments to the ground
//! atoms), model sets of sentences, and the partition into blocks `ψ_S`.
//!
//! Every world is the unique model of the conjunction of its literals, so
//! in this setting "has a separating model" and "is satisfiable" coincide and
//! only the strong form of the non-dogmatism condition is exposed.

mod modelset;
mod partition;
mod tree;

pub use modelset::ModelSet;
pub use partition::Partition;
pub use tree::{check_tree_coefficients, TreeCoefficients, TreeViolation, TreeViolationKind};

use std::sync::Arc;

use thiserror::Error;

use crate::logic::{ground, GroundSentence, LogicError, Sentence, Vocabulary};

pub const DEFAULT_WORLD_CAP: usize = 20;
pub const HARD_WORLD_CAP: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WorldsError {
    #[error("{atoms} ground atoms exceed the world cap of {cap} (2^{cap} worlds)")]
    CapExceeded { atoms: usize, cap: usize },
    #[error("world cap {0} is above the hard maximum of {HARD_WORLD_CAP}")]
    CapTooLarge(usize),
    #[error("sentence mentions ground atom {atom}, outside a space of {atoms} atoms")]
    AtomOutOfRange { atom: usize, atoms: usize },
    #[error("{0} sentences exceed the partition limit of 20")]
    TooManySentences(usize),
    #[error("coefficients go to level {level} but only {sentences} sentences were given")]
    LevelBeyondSentences { level: usize, sentences: usize },
    #[error("missing tree coefficient for level {level}, subset {subset:#b}")]
    MissingCoefficient { level: usize, subset: u32 },
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// All `2^k` truth assignments over a vocabulary's `k` ground atoms.
#[derive(Debug)]
pub struct WorldSpace {
    vocab: Arc<Vocabulary>,
    num_atoms: usize,
}

impl WorldSpace {
    pub fn new(vocab: Arc<Vocabulary>) -> Result<Arc<Self>, WorldsError> {
        Self::with_cap(vocab, DEFAULT_WORLD_CAP)
    }

    pub fn with_cap(vocab: Arc<Vocabulary>, cap: usize) -> Result<Arc<Self>, WorldsError> {
        if cap > HARD_WORLD_CAP {
            return Err(WorldsError::CapTooLarge(cap));
        }
        let num_atoms = vocab.num_atoms();
        if num_atoms > cap {
            return Err(WorldsError::CapExceeded {
                atoms: num_atoms,
                cap,
            });
        }
        Ok(Arc::new(WorldSpace { vocab, num_atoms }))
    }

    pub fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn num_atoms(&self) -> usize {
        self.num_atoms
    }

    pub fn world_count(&self) -> usize {
        1 << self.num_atoms
    }

    pub fn is_true_in(&self, atom: usize, world: usize) -> bool {
        (world >> atom) & 1 == 1
    }

    /// Model set of a ground sentence, computed word-parallel over the
    /// connective structure.
    pub fn models(&self, g: &GroundSentence) -> Result<ModelSet, WorldsError> {
        let bound = g.atom_bound();
        if bound > self.num_atoms {
            return Err(WorldsError::AtomOutOfRange {
                atom: bound - 1,
                atoms: self.num_atoms,
            });
        }
        Ok(self.models_unchecked(g))
    }

    fn models_unchecked(&self, g: &GroundSentence) -> ModelSet {
        let n = self.world_count();
        match g {
            GroundSentence::True => ModelSet::full(n),
            GroundSentence::False => ModelSet::empty(n),
            GroundSentence::Atom(a) => ModelSet::atom(*a, n),
            GroundSentence::Not(x) => self.models_unchecked(x).complement(),
            GroundSentence::And(a, b) => self
                .models_unchecked(a)
                .intersect(&self.models_unchecked(b)),
            GroundSentence::Or(a, b) => self.models_unchecked(a).union(&self.models_unchecked(b)),
            GroundSentence::Implies(a, b) => self
                .models_unchecked(a)
                .complement()
                .union(&self.models_unchecked(b)),
            GroundSentence::Iff(a, b) => {
                let ma = self.models_unchecked(a);
                let mb = self.models_unchecked(b);
                ma.intersect(&mb)
                    .union(&ma.complement().intersect(&mb.complement()))
            }
        }
    }

    /// Ground `s` against this space's vocabulary and return its model set.
    pub fn models_of(&self, s: &Sentence) -> Result<ModelSet, WorldsError> {
        let g = ground(s, &self.vocab)?;
        self.models(&g)
    }

    /// The literal conjunction naming `world` (its unique model).
    pub fn world_sentence(&self, world: usize) -> GroundSentence {
        GroundSentence::conjunction((0..self.num_atoms).map(|a| {
            if self.is_true_in(a, world) {
                GroundSentence::Atom(a)
            } else {
                GroundSentence::Atom(a).not()
            }
        }))
    }

    pub fn partition(&self, sentences: &[GroundSentence]) -> Result<Partition, WorldsError> {
        Partition::new(self, sentences)
    }
}

/// World cap from `PLOG_WORLD_CAP`, falling back to the default.
pub fn world_cap_from_env() -> Result<usize, WorldsError> {
    match std::env::var("PLOG_WORLD_CAP") {
        Ok(v) => {
            let cap: usize = v.trim().parse().map_err(|_| {
                WorldsError::Logic(LogicError::Syntax {
                    line: 0,
                    col: 0,
                    msg: format!("PLOG_WORLD_CAP must be an integer, got `{v}`"),
                })
            })?;
            if cap > HARD_WORLD_CAP {
                return Err(WorldsError::CapTooLarge(cap));
            }
            Ok(cap)
        }
        Err(_) => Ok(DEFAULT_WORLD_CAP),
    }
}

/// `{1,3}`-style rendering of a subset mask over `n` sentences (1-based).
pub fn partition_subset_string(subset: u32, n: usize) -> String {
    let items: Vec<String> = (0..n.max(32 - subset.leading_zeros() as usize))
        .filter(|i| subset >> i & 1 == 1)
        .map(|i| (i + 1).to_string())
        .collect();
    format!("{{{}}}", items.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_program;

    fn space(src: &str) -> Arc<WorldSpace> {
        let p = parse_program(src).unwrap();
        WorldSpace::new(p.vocabulary).unwrap()
    }

    #[test]
    fn atom_models() {
        let w = space("prop p\nprop q");
        let m = w.models(&GroundSentence::Atom(0)).unwrap();
        assert_eq!(m.iter().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(w.models(&GroundSentence::True).unwrap().count(), 4);
        assert!(w.models(&GroundSentence::False).unwrap().is_empty());
    }

    #[test]
    fn unique_prize_has_three_models() {
        let src = "domain Door = {d1, d2, d3}\npred prize : Door\n\
                   sentence u := exists d:Door. (prize(d) & forall x:Door. (prize(x) -> x = d))";
        let p = parse_program(src).unwrap();
        let w = WorldSpace::new(p.vocabulary.clone()).unwrap();
        let m = w.models_of(p.sentence("u").unwrap()).unwrap();
        assert_eq!(m.count(), 3);
        assert_eq!(m.iter().collect::<Vec<_>>(), vec![1, 2, 4]);
    }

    #[test]
    fn cap_enforced() {
        let p = parse_program("domain D = {a,b,c}\npred r : D, D").unwrap();
        assert!(matches!(
            WorldSpace::with_cap(p.vocabulary.clone(), 8),
            Err(WorldsError::CapExceeded { atoms: 9, cap: 8 })
        ));
        assert!(WorldSpace::with_cap(p.vocabulary.clone(), 9).is_ok());
        assert!(matches!(
            WorldSpace::with_cap(p.vocabulary, 25),
            Err(WorldsError::CapTooLarge(25))
        ));
    }

    #[test]
    fn out_of_range_atom() {
        let w = space("prop p");
        assert!(w.models(&GroundSentence::Atom(3)).is_err());
    }

    #[test]
    fn world_sentence_names_one_world() {
        let w = space("prop p\nprop q\nprop r");
        for world in 0..8 {
            let m = w.models(&w.world_sentence(world)).unwrap();
            assert_eq!(m.iter().collect::<Vec<_>>(), vec![world]);
        }
    }
}

use std::sync::Arc;

use super::ground::ground;
use super::syntax::{GroundSentence, Sentence, Vocabulary};
use super::LogicError;

/// Largest number of constraint sentences; block subsets are `u32` masks.
pub const MAX_CONSTRAINTS: usize = 20;

#[derive(Clone, Debug)]
pub struct Constraint {
    pub label: String,
    pub sentence: Sentence,
    pub ground: GroundSentence,
    pub target: f64,
}

/// Sentences `φ_1..φ_n` with target probabilities, grounded against a shared
/// vocabulary. Index `i` (0-based) is bit `i` of every block subset mask.
#[derive(Clone, Debug)]
pub struct ConstraintSet {
    vocab: Arc<Vocabulary>,
    items: Vec<Constraint>,
}

impl ConstraintSet {
    pub fn new(vocab: Arc<Vocabulary>) -> Self {
        ConstraintSet {
            vocab,
            items: Vec::new(),
        }
    }

    pub fn push<L: Into<String>>(
        &mut self,
        label: L,
        sentence: Sentence,
        target: f64,
    ) -> Result<(), LogicError> {
        if !(0.0..=1.0).contains(&target) {
            return Err(LogicError::BeliefRange {
                line: 0,
                value: target.to_string(),
            });
        }
        if self.items.len() >= MAX_CONSTRAINTS {
            return Err(LogicError::TooManyConstraints(MAX_CONSTRAINTS));
        }
        let ground = ground(&sentence, &self.vocab)?;
        self.items.push(Constraint {
            label: label.into(),
            sentence,
            ground,
            target,
        });
        Ok(())
    }

    /// Convenience for building sets in code: label is the printed sentence.
    pub fn with(mut self, sentence: Sentence, target: f64) -> Result<Self, LogicError> {
        let label = sentence.to_string();
        self.push(label, sentence, target)?;
        Ok(self)
    }

    pub fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, i: usize) -> &Constraint {
        &self.items[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Constraint> {
        self.items.iter()
    }

    pub fn grounds(&self) -> Vec<GroundSentence> {
        self.items.iter().map(|c| c.ground.clone()).collect()
    }

    pub fn targets(&self) -> Vec<f64> {
        self.items.iter().map(|c| c.target).collect()
    }

    /// The same sentences with different targets.
    pub fn with_targets(&self, targets: &[f64]) -> Result<Self, LogicError> {
        assert_eq!(targets.len(), self.items.len());
        let mut out = ConstraintSet::new(self.vocab.clone());
        for (c, &t) in self.items.iter().zip(targets) {
            out.push(c.label.clone(), c.sentence.clone(), t)?;
        }
        Ok(out)
    }
}

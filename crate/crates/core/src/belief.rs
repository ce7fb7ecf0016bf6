//! Probabilities on sentences, represented by a weight per world.

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::logic::{ground, GroundSentence, Sentence};
use crate::numeric::{self, CompensatedSum};
use crate::worlds::{ModelSet, WorldSpace, WorldsError};

/// Normalization tolerance for world weights.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeliefError {
    #[error("expected {expected} world weights, found {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("world {world} has invalid weight {value}")]
    InvalidWeight { world: usize, value: f64 },
    #[error("weights sum to {sum}, not 1")]
    NotNormalized { sum: f64 },
    #[error("weights have zero total mass")]
    ZeroMass,
    #[error("conditional probability undefined: the condition has probability 0")]
    UndefinedConditional,
    #[error("beliefs live on different world spaces")]
    SpaceMismatch,
    #[error("belief table line {line}: {msg}")]
    Table { line: usize, msg: String },
    #[error(transparent)]
    Worlds(#[from] WorldsError),
}

impl From<crate::logic::LogicError> for BeliefError {
    fn from(e: crate::logic::LogicError) -> Self {
        BeliefError::Worlds(WorldsError::Logic(e))
    }
}

/// A probability over the worlds of a [`WorldSpace`]; induces
/// `μ(φ) = Σ_{w ⊨ φ} weight(w)`.
#[derive(Clone, Debug)]
pub struct Belief {
    space: Arc<WorldSpace>,
    weights: Vec<f64>,
}

impl Belief {
    pub fn uniform(space: Arc<WorldSpace>) -> Self {
        let n = space.world_count();
        Belief {
            weights: vec![1.0 / n as f64; n],
            space,
        }
    }

    /// Point mass on a single world.
    pub fn point(space: Arc<WorldSpace>, world: usize) -> Self {
        let mut weights = vec![0.0; space.world_count()];
        weights[world] = 1.0;
        Belief { space, weights }
    }

    /// Weights that already sum to 1 (within `1e-12`).
    pub fn from_weights(space: Arc<WorldSpace>, weights: Vec<f64>) -> Result<Self, BeliefError> {
        let weights = Self::validate(&space, weights)?;
        let sum = numeric::sum(weights.iter().copied());
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(BeliefError::NotNormalized { sum });
        }
        Ok(Belief { space, weights })
    }

    /// Non-negative weights, rescaled to sum to 1.
    pub fn normalized(space: Arc<WorldSpace>, weights: Vec<f64>) -> Result<Self, BeliefError> {
        let mut weights = Self::validate(&space, weights)?;
        let sum = numeric::sum(weights.iter().copied());
        if sum <= 0.0 {
            return Err(BeliefError::ZeroMass);
        }
        weights.iter_mut().for_each(|w| *w /= sum);
        Ok(Belief { space, weights })
    }

    fn validate(space: &WorldSpace, mut weights: Vec<f64>) -> Result<Vec<f64>, BeliefError> {
        if weights.len() != space.world_count() {
            return Err(BeliefError::WeightCount {
                expected: space.world_count(),
                found: weights.len(),
            });
        }
        for (world, w) in weights.iter_mut().enumerate() {
            if !w.is_finite() || *w < 0.0 {
                return Err(BeliefError::InvalidWeight { world, value: *w });
            }
            // clears negative zero
            *w += 0.0;
        }
        Ok(weights)
    }

    pub fn space(&self) -> &Arc<WorldSpace> {
        &self.space
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, world: usize) -> f64 {
        self.weights[world]
    }

    /// Total weight of a set of worlds, clamped to `[0, 1]`.
    pub fn mass(&self, models: &ModelSet) -> f64 {
        let mut s = CompensatedSum::new();
        for w in models.iter() {
            s.add(self.weights[w]);
        }
        s.value().clamp(0.0, 1.0)
    }

    pub fn prob_ground(&self, g: &GroundSentence) -> Result<f64, BeliefError> {
        Ok(self.mass(&self.space.models(g)?))
    }

    pub fn prob(&self, s: &Sentence) -> Result<f64, BeliefError> {
        let g = ground(s, self.space.vocabulary())?;
        self.prob_ground(&g)
    }

    /// `μ(φ | ψ) = μ(φ ∧ ψ) / μ(ψ)`.
    pub fn cond(&self, phi: &Sentence, psi: &Sentence) -> Result<f64, BeliefError> {
        let vocab = self.space.vocabulary();
        self.cond_ground(&ground(phi, vocab)?, &ground(psi, vocab)?)
    }

    pub fn cond_ground(
        &self,
        phi: &GroundSentence,
        psi: &GroundSentence,
    ) -> Result<f64, BeliefError> {
        let m_psi = self.space.models(psi)?;
        let denom = self.mass(&m_psi);
        if denom <= 0.0 {
            return Err(BeliefError::UndefinedConditional);
        }
        let num = self.mass(&self.space.models(phi)?.intersect(&m_psi));
        Ok((num / denom).clamp(0.0, 1.0))
    }

    /// The belief `μ(· | ψ)`.
    pub fn condition(&self, psi: &Sentence) -> Result<Belief, BeliefError> {
        let g = ground(psi, self.space.vocabulary())?;
        self.condition_ground(&g)
    }

    pub fn condition_ground(&self, psi: &GroundSentence) -> Result<Belief, BeliefError> {
        self.condition_on(&self.space.models(psi)?)
    }

    pub fn condition_on(&self, models: &ModelSet) -> Result<Belief, BeliefError> {
        let mass = self.mass(models);
        if mass <= 0.0 {
            return Err(BeliefError::UndefinedConditional);
        }
        let mut weights = vec![0.0; self.weights.len()];
        for w in models.iter() {
            weights[w] = self.weights[w] / mass;
        }
        Ok(Belief {
            space: self.space.clone(),
            weights,
        })
    }

    /// Relative entropy `KL(self || other) = Σ_w μ_w log(μ_w / ξ_w)`, with
    /// `0 log(0/·) = 0` and `+∞` when `μ_w > 0 = ξ_w`.
    pub fn kl(&self, other: &Belief) -> Result<f64, BeliefError> {
        if !Arc::ptr_eq(&self.space, &other.space)
            && self.space.world_count() != other.space.world_count()
        {
            return Err(BeliefError::SpaceMismatch);
        }
        Ok(kl_divergence(&self.weights, &other.weights))
    }

    /// Every satisfiable sentence has positive probability, i.e. every world
    /// has positive weight.
    pub fn is_strongly_cournot(&self) -> bool {
        self.weights.iter().all(|&w| w > 0.0)
    }

    /// Text table: a header recording the atom order, then one
    /// `world-index weight` line per world with non-zero weight.
    pub fn to_table(&self) -> String {
        let vocab = self.space.vocabulary();
        let mut out = String::from("# plog belief\n# atoms:");
        for a in 0..self.space.num_atoms() {
            let _ = write!(out, " {}", vocab.atom_name(a));
        }
        out.push('\n');
        for (w, &x) in self.weights.iter().enumerate() {
            if x != 0.0 {
                let _ = writeln!(out, "{w} {x:?}");
            }
        }
        out
    }

    pub fn from_table(space: Arc<WorldSpace>, text: &str) -> Result<Belief, BeliefError> {
        let vocab = space.vocabulary().clone();
        let expected: Vec<String> = (0..space.num_atoms()).map(|a| vocab.atom_name(a)).collect();
        let mut weights = vec![0.0; space.world_count()];
        let mut seen_header = false;
        let mut seen = vec![false; space.world_count()];
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let t = raw.trim();
            if let Some(rest) = t.strip_prefix("# atoms:") {
                let atoms: Vec<&str> = rest.split_whitespace().collect();
                if atoms != expected {
                    return Err(BeliefError::Table {
                        line,
                        msg: format!(
                            "atom order [{}] does not match the vocabulary [{}]",
                            atoms.join(" "),
                            expected.join(" ")
                        ),
                    });
                }
                seen_header = true;
                continue;
            }
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let mut parts = t.split_whitespace();
            let (Some(w), Some(x), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(BeliefError::Table {
                    line,
                    msg: "expected `world-index weight`".into(),
                });
            };
            let w: usize = w.parse().map_err(|_| BeliefError::Table {
                line,
                msg: format!("bad world index `{w}`"),
            })?;
            let x: f64 = x.parse().map_err(|_| BeliefError::Table {
                line,
                msg: format!("bad weight `{x}`"),
            })?;
            if w >= weights.len() {
                return Err(BeliefError::Table {
                    line,
                    msg: format!("world {w} out of range"),
                });
            }
            if std::mem::replace(&mut seen[w], true) {
                return Err(BeliefError::Table {
                    line,
                    msg: format!("world {w} listed twice"),
                });
            }
            weights[w] = x;
        }
        if !seen_header {
            return Err(BeliefError::Table {
                line: 1,
                msg: "missing `# atoms:` header".into(),
            });
        }
        Belief::from_weights(space, weights)
    }
}

pub(crate) fn kl_divergence(mu: &[f64], xi: &[f64]) -> f64 {
    let mut s = CompensatedSum::new();
    for (&m, &x) in mu.iter().zip(xi) {
        if m > 0.0 {
            if x <= 0.0 {
                return f64::INFINITY;
            }
            s.add(m * (m / x).ln());
        }
    }
    s.value().max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_program, Program};

    fn setup(src: &str) -> (Program, Arc<WorldSpace>) {
        let p = parse_program(src).unwrap();
        let w = WorldSpace::new(p.vocabulary.clone()).unwrap();
        (p, w)
    }

    #[test]
    fn uniform_probabilities() {
        let (_, w) = setup("prop p");
        let b = Belief::uniform(w);
        assert_eq!(b.prob(&Sentence::prop("p")).unwrap(), 0.5);
        assert_eq!(b.prob(&Sentence::True).unwrap(), 1.0);
        assert_eq!(b.prob(&Sentence::False).unwrap(), 0.0);
    }

    #[test]
    fn naive_ravens_conjunctions() {
        let (_, w) = setup("domain R = {1,2,3,4,5,6}\npred B : R");
        let b = Belief::uniform(w);
        for n in 1..=6 {
            let conj =
                Sentence::conjunction((1..=n).map(|i| Sentence::atom("B", &[&i.to_string()])));
            assert_eq!(b.prob(&conj).unwrap(), 0.5f64.powi(n));
            if n < 6 {
                let next = Sentence::atom("B", &[&(n + 1).to_string()]);
                assert_eq!(b.cond(&next, &conj).unwrap(), 0.5);
            }
        }
    }

    #[test]
    fn conditionals() {
        let (_, w) = setup("prop p\nprop q");
        let b = Belief::uniform(w);
        let p = Sentence::prop("p");
        let q = Sentence::prop("q");
        assert_eq!(b.cond(&p, &q).unwrap(), 0.5);
        assert_eq!(b.cond(&q, &q).unwrap(), 1.0);
        assert_eq!(
            b.cond(&p, &Sentence::False),
            Err(BeliefError::UndefinedConditional)
        );
        let c = b.condition(&p).unwrap();
        assert_eq!(c.prob(&p).unwrap(), 1.0);
        assert!(!c.is_strongly_cournot());
        let same = b.condition(&Sentence::True).unwrap();
        assert_eq!(same.weights(), b.weights());
    }

    #[test]
    fn kl_cases() {
        let (_, w) = setup("prop p\nprop q");
        let u = Belief::uniform(w.clone());
        assert_eq!(u.kl(&u).unwrap(), 0.0);
        let pt = Belief::point(w.clone(), 2);
        assert!((pt.kl(&u).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert_eq!(u.kl(&pt).unwrap(), f64::INFINITY);
        // Bernoulli(0.7) on p, uniform on q
        let b = Belief::from_weights(w, vec![0.15, 0.35, 0.15, 0.35]).unwrap();
        let expect = 0.7 * 1.4f64.ln() + 0.3 * 0.6f64.ln();
        assert!((b.kl(&u).unwrap() - expect).abs() < 1e-15);
        // the same value from the two-block form over φ = p
        let two_block = 0.7 * (0.7f64 / 0.5).ln() + 0.3 * (0.3f64 / 0.5).ln();
        assert!((two_block - expect).abs() < 1e-15);
    }

    #[test]
    fn strongly_cournot_example() {
        let (_, w) = setup("prop p\nprop q");
        let b = Belief::from_weights(w.clone(), vec![0.5, 0.25, 0.125, 0.125]).unwrap();
        assert!(b.is_strongly_cournot());
        // every satisfiable sentence over two atoms (16 model sets) is positive
        for mask in 1u32..16 {
            let m = ModelSet::from_indices(4, (0..4).filter(|i| mask >> i & 1 == 1));
            assert!(b.mass(&m) > 0.0);
        }
    }

    #[test]
    fn validation() {
        let (_, w) = setup("prop p");
        assert!(matches!(
            Belief::from_weights(w.clone(), vec![0.5]),
            Err(BeliefError::WeightCount { .. })
        ));
        assert!(matches!(
            Belief::from_weights(w.clone(), vec![0.6, 0.6]),
            Err(BeliefError::NotNormalized { .. })
        ));
        assert!(Belief::from_weights(w.clone(), vec![-0.5, 1.5]).is_err());
        let b = Belief::from_weights(w.clone(), vec![-0.0, 1.0]).unwrap();
        assert!(b.weight(0).is_sign_positive());
        assert!(matches!(
            Belief::normalized(w, vec![0.0, 0.0]),
            Err(BeliefError::ZeroMass)
        ));
    }

    #[test]
    fn table_round_trip() {
        let (_, w) = setup("domain D = {a,b}\npred q : D\nprop r");
        let b = Belief::normalized(w.clone(), (1..=8).map(|i| i as f64).collect()).unwrap();
        let text = b.to_table();
        assert!(text.contains("# atoms: q(a) q(b) r"));
        let back = Belief::from_table(w.clone(), &text).unwrap();
        assert_eq!(back.weights(), b.weights());
        let bad = text.replace("q(a) q(b)", "q(b) q(a)");
        assert!(Belief::from_table(w, &bad).is_err());
    }
}

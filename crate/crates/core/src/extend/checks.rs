use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::logic::{ConstraintSet, GroundSentence};
use crate::sat::{SatError, SatOracle};

/// Tolerance for the subadditivity inequalities and equalities.
pub const SUBADDITIVITY_TOL: f64 = 1e-9;

/// How one sentence of a pair relates to the other, decided by SAT.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `¬(φ_i ∧ φ_j)` is valid.
    Disjoint,
    /// `φ_i → φ_j` is valid.
    Implies,
    /// `φ_j → φ_i` is valid.
    ImpliedBy,
    /// None of the three holds.
    Neither,
    /// More than one holds (equivalent or unsatisfiable sentences).
    Multiple,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Disjoint => "disjoint",
            Relation::Implies => "implies",
            Relation::ImpliedBy => "implied-by",
            Relation::Neither => "none",
            Relation::Multiple => "multiple",
        })
    }
}

/// Pairwise disjointness and implication facts for a constraint set.
#[derive(Clone, Debug)]
pub struct PairFacts {
    n: usize,
    disjoint: Vec<bool>,
    implies: Vec<bool>,
}

impl PairFacts {
    pub fn compute(sentences: &[GroundSentence], oracle: &SatOracle) -> Result<Self, SatError> {
        let n = sentences.len();
        let mut disjoint = vec![false; n * n];
        let mut implies = vec![false; n * n];
        for i in 0..n {
            implies[i * n + i] = true;
            for j in 0..n {
                if i == j {
                    continue;
                }
                implies[i * n + j] = oracle.implies(&sentences[i], &sentences[j])?;
                if j > i {
                    let d = oracle.disjoint(&sentences[i], &sentences[j])?;
                    disjoint[i * n + j] = d;
                    disjoint[j * n + i] = d;
                }
            }
        }
        Ok(PairFacts {
            n,
            disjoint,
            implies,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn disjoint(&self, i: usize, j: usize) -> bool {
        self.disjoint[i * self.n + j]
    }

    pub fn implies(&self, i: usize, j: usize) -> bool {
        self.implies[i * self.n + j]
    }

    pub fn relation(&self, i: usize, j: usize) -> Relation {
        let facts = [self.disjoint(i, j), self.implies(i, j), self.implies(j, i)];
        match facts.iter().filter(|&&b| b).count() {
            0 => Relation::Neither,
            1 if facts[0] => Relation::Disjoint,
            1 if facts[1] => Relation::Implies,
            1 => Relation::ImpliedBy,
            _ => Relation::Multiple,
        }
    }
}

/// Which sentence a disjoint family is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// The tautology, whose value is always 1.
    Top,
    Sentence(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubadditivityViolation {
    pub target: Target,
    /// Pairwise-disjoint sentences whose disjunction implies the target.
    pub subset: Vec<usize>,
    pub sum: f64,
    pub target_value: f64,
    /// The target also implies the disjunction, so equality was required.
    pub equality: bool,
}

impl SubadditivityViolation {
    pub fn render(&self, c: &ConstraintSet) -> String {
        let members: Vec<String> = self.subset.iter().map(|i| (i + 1).to_string()).collect();
        let labels: Vec<&str> = self
            .subset
            .iter()
            .map(|&i| c.get(i).label.as_str())
            .collect();
        let target = match self.target {
            Target::Top => "true".to_string(),
            Target::Sentence(i) => format!("{} ({})", i + 1, c.get(i).label),
        };
        let relation = if self.equality {
            "must equal"
        } else {
            "exceeds"
        };
        format!(
            "SUBADD: disjoint {{{}}} ({}) -> {}: sum {} {} {}",
            members.join(","),
            labels.join("; "),
            target,
            self.sum,
            relation,
            self.target_value
        )
    }
}

#[derive(Clone, Debug)]
pub struct SubadditivityReport {
    pub violations: Vec<SubadditivityViolation>,
    /// Every pairwise-disjoint family was examined.
    pub exhaustive: bool,
    pub families_checked: usize,
}

impl SubadditivityReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn lines(&self, c: &ConstraintSet) -> Vec<String> {
        let mut out: Vec<String> = self.violations.iter().map(|v| v.render(c)).collect();
        if !self.exhaustive {
            out.push(format!(
                "SUBADD: note: {} sentences exceed the exhaustive limit; {} sampled families checked",
                c.len(),
                self.families_checked
            ));
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SubadditivityOptions {
    /// Largest `n` for which every disjoint family is enumerated.
    pub exhaustive_limit: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SubadditivityOptions {
    fn default() -> Self {
        SubadditivityOptions {
            exhaustive_limit: 12,
            samples: 10_000,
            seed: 0x5eed,
        }
    }
}

/// Check every family of pairwise-disjoint sentences against each sentence
/// it implies, and against the tautology (value 1).
pub fn check_subadditive(
    c: &ConstraintSet,
    oracle: &SatOracle,
) -> Result<SubadditivityReport, SatError> {
    check_subadditive_with(c, oracle, SubadditivityOptions::default())
}

pub fn check_subadditive_with(
    c: &ConstraintSet,
    oracle: &SatOracle,
    opts: SubadditivityOptions,
) -> Result<SubadditivityReport, SatError> {
    let grounds = c.grounds();
    let facts = PairFacts::compute(&grounds, oracle)?;
    check_subadditive_facts(c, &grounds, &facts, oracle, opts)
}

pub(crate) fn check_subadditive_facts(
    c: &ConstraintSet,
    grounds: &[GroundSentence],
    facts: &PairFacts,
    oracle: &SatOracle,
    opts: SubadditivityOptions,
) -> Result<SubadditivityReport, SatError> {
    let n = c.len();
    let targets = c.targets();
    let exhaustive = n <= opts.exhaustive_limit;
    let families: Vec<Vec<usize>> = if exhaustive {
        let mut out = Vec::new();
        let mut current = Vec::new();
        enumerate_disjoint(facts, 0, &mut current, &mut out);
        out
    } else {
        sample_disjoint(facts, opts.samples, opts.seed)
    };

    let mut violations = Vec::new();
    for family in &families {
        let sum = crate::numeric::sum(family.iter().map(|&j| targets[j]));
        let disjunction = GroundSentence::disjunction(family.iter().map(|&j| grounds[j].clone()));
        let mut candidates = vec![Target::Top];
        candidates.extend(
            (0..n)
                .filter(|i| !family.contains(i) && family.iter().all(|&j| facts.implies(j, *i)))
                .map(Target::Sentence),
        );
        for target in candidates {
            let (value, covered) = match target {
                Target::Top => (1.0, oracle.is_valid(&disjunction)?),
                Target::Sentence(i) => (targets[i], oracle.implies(&grounds[i], &disjunction)?),
            };
            let bad = if covered {
                (sum - value).abs() > SUBADDITIVITY_TOL
            } else {
                sum > value + SUBADDITIVITY_TOL
            };
            if bad {
                violations.push(SubadditivityViolation {
                    target,
                    subset: family.clone(),
                    sum,
                    target_value: value,
                    equality: covered,
                });
            }
        }
    }
    Ok(SubadditivityReport {
        violations,
        exhaustive,
        families_checked: families.len(),
    })
}

fn enumerate_disjoint(
    facts: &PairFacts,
    from: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    for j in from..facts.len() {
        if current.iter().all(|&k| facts.disjoint(k, j)) {
            current.push(j);
            out.push(current.clone());
            enumerate_disjoint(facts, j + 1, current, out);
            current.pop();
        }
    }
}

fn sample_disjoint(facts: &PairFacts, samples: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..facts.len()).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    // singletons first, so single-sentence implications are always covered
    for j in 0..facts.len() {
        seen.insert(1u32 << j);
        out.push(vec![j]);
    }
    for _ in 0..samples {
        order.shuffle(&mut rng);
        let mut family: Vec<usize> = Vec::new();
        for &j in &order {
            if rng.gen_bool(0.5) && family.iter().all(|&k| facts.disjoint(k, j)) {
                family.push(j);
            }
        }
        if family.is_empty() {
            continue;
        }
        family.sort_unstable();
        let mask = family.iter().fold(0u32, |m, &j| m | 1 << j);
        if seen.insert(mask) {
            out.push(family);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct EligibilityViolation {
    pub index: usize,
    pub value: f64,
}

impl EligibilityViolation {
    pub fn render(&self, c: &ConstraintSet) -> String {
        format!(
            "ELIG: sentence {} ({}) is unsatisfiable but has value {}",
            self.index + 1,
            c.get(self.index).label,
            self.value
        )
    }
}

/// Sentences that are unsatisfiable yet have a positive target.
pub fn check_eligible(
    c: &ConstraintSet,
    oracle: &SatOracle,
) -> Result<Vec<EligibilityViolation>, SatError> {
    let mut out = Vec::new();
    for (index, item) in c.iter().enumerate() {
        if item.target > 0.0 && !oracle.is_satisfiable(&item.ground)? {
            out.push(EligibilityViolation {
                index,
                value: item.target,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Hierarchy {
    pub hierarchical: bool,
    /// `relations[i][j]` classifies the pair `(φ_i, φ_j)`; the diagonal is
    /// `Multiple` by convention and never consulted.
    pub relations: Vec<Vec<Relation>>,
    /// Depth of each sentence; empty unless hierarchical.
    pub depths: Vec<usize>,
}

impl Hierarchy {
    pub fn depth(&self) -> usize {
        self.depths.iter().copied().max().unwrap_or(0)
    }

    /// First pair that is not disjoint or strictly nested.
    pub fn offending_pair(&self) -> Option<(usize, usize, Relation)> {
        let n = self.relations.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, self.relations[i][j]))
            .find(|(_, _, r)| matches!(r, Relation::Neither | Relation::Multiple))
    }

    pub fn line(&self) -> String {
        if self.hierarchical {
            format!("HIER: yes, depth {}", self.depth())
        } else {
            let (i, j, r) = self
                .offending_pair()
                .expect("non-hierarchical set has a bad pair");
            format!("HIER: no (sentences {} and {}: {})", i + 1, j + 1, r)
        }
    }
}

/// Classify every pair; depth is the length of the longest implication
/// chain from a maximal sentence.
pub fn is_hierarchical(c: &ConstraintSet, oracle: &SatOracle) -> Result<Hierarchy, SatError> {
    let grounds = c.grounds();
    let facts = PairFacts::compute(&grounds, oracle)?;
    Ok(hierarchy_from_facts(&facts))
}

pub(crate) fn hierarchy_from_facts(facts: &PairFacts) -> Hierarchy {
    let n = facts.len();
    let relations: Vec<Vec<Relation>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Relation::Multiple
                    } else {
                        facts.relation(i, j)
                    }
                })
                .collect()
        })
        .collect();
    let hierarchical = (0..n).all(|i| {
        (0..n).all(|j| {
            i == j
                || matches!(
                    relations[i][j],
                    Relation::Disjoint | Relation::Implies | Relation::ImpliedBy
                )
        })
    });
    let depths = if hierarchical {
        let mut memo = vec![0usize; n];
        (0..n).map(|i| depth_of(i, &relations, &mut memo)).collect()
    } else {
        Vec::new()
    };
    Hierarchy {
        hierarchical,
        relations,
        depths,
    }
}

fn depth_of(i: usize, relations: &[Vec<Relation>], memo: &mut [usize]) -> usize {
    if memo[i] > 0 {
        return memo[i];
    }
    let parents: Vec<usize> = (0..relations.len())
        .filter(|&j| j != i && relations[i][j] == Relation::Implies)
        .collect();
    let d = 1 + parents
        .into_iter()
        .map(|j| depth_of(j, relations, memo))
        .max()
        .unwrap_or(0);
    memo[i] = d;
    d
}

use std::fmt;

use super::partition::low_mask;
use super::{Partition, WorldsError};

const TOL: f64 = 1e-12;

/// Labels `α_{n,S}` of the sentence tree, for levels `n = 1..=depth`.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeCoefficients {
    levels: Vec<Vec<Option<f64>>>,
}

impl TreeCoefficients {
    /// All coefficients unset.
    pub fn new(depth: usize) -> Self {
        assert!(depth <= 20);
        TreeCoefficients {
            levels: (1..=depth).map(|n| vec![None; 1 << n]).collect(),
        }
    }

    /// `α_{n,S} = 2^{-n}` everywhere.
    pub fn uniform(depth: usize) -> Self {
        let mut t = Self::new(depth);
        for n in 1..=depth {
            for s in 0..1u32 << n {
                t.set(n, s, 0.5f64.powi(n as i32));
            }
        }
        t
    }

    /// Read `α_{n,S} = μ(ψ_{n,S})` off world weights.
    pub fn from_weights(partition: &Partition, weights: &[f64], depth: usize) -> Self {
        assert!(depth <= partition.num_sentences());
        let mut t = Self::new(depth);
        for n in 1..=depth {
            let mask = low_mask(n);
            let mut acc = vec![crate::numeric::CompensatedSum::new(); 1 << n];
            for (w, &sig) in partition.signatures().iter().enumerate() {
                acc[(sig & mask) as usize].add(weights[w]);
            }
            for (s, a) in acc.iter().enumerate() {
                t.set(n, s as u32, a.value());
            }
        }
        t
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn set(&mut self, level: usize, subset: u32, value: f64) {
        self.levels[level - 1][subset as usize] = Some(value);
    }

    pub fn unset(&mut self, level: usize, subset: u32) {
        self.levels[level - 1][subset as usize] = None;
    }

    pub fn get(&self, level: usize, subset: u32) -> Option<f64> {
        self.levels
            .get(level.wrapping_sub(1))
            .and_then(|l| l.get(subset as usize))
            .copied()
            .flatten()
    }

    fn need(&self, level: usize, subset: u32) -> Result<f64, WorldsError> {
        self.get(level, subset)
            .ok_or(WorldsError::MissingCoefficient { level, subset })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TreeViolationKind {
    /// `α_{n,S} < 0`
    Negative,
    /// `ψ_{n,S}` unsatisfiable but `α_{n,S} ≠ 0`
    Unsatisfiable,
    /// `α_{n,S} ≠ α_{n+1,S} + α_{n+1,S∪{n+1}}`
    Split,
    /// `Σ_S α_{n,S} ≠ 1`
    LevelSum,
}

impl TreeViolationKind {
    pub fn tag(self) -> &'static str {
        match self {
            TreeViolationKind::Negative => "NONNEG",
            TreeViolationKind::Unsatisfiable => "UNSAT",
            TreeViolationKind::Split => "SPLIT",
            TreeViolationKind::LevelSum => "SUM",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeViolation {
    pub kind: TreeViolationKind,
    pub level: usize,
    /// `None` for level-sum violations.
    pub subset: Option<u32>,
    /// The offending coefficient, or the discrepancy for split/sum.
    pub value: f64,
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} level {}", self.kind.tag(), self.level)?;
        if let Some(s) = self.subset {
            write!(
                f,
                " S={}",
                crate::worlds::partition_subset_string(s, self.level)
            )?;
        }
        write!(f, ": {:e}", self.value)
    }
}

/// Check coefficients against the tree conditions: non-negativity, zero on
/// unsatisfiable blocks, the splitting identity between consecutive levels,
/// and unit level sums. Tolerance `1e-12`.
pub fn check_tree_coefficients(
    alpha: &TreeCoefficients,
    partition: &Partition,
) -> Result<Vec<TreeViolation>, WorldsError> {
    let depth = alpha.depth();
    if depth > partition.num_sentences() {
        return Err(WorldsError::LevelBeyondSentences {
            level: depth,
            sentences: partition.num_sentences(),
        });
    }
    let mut out = Vec::new();
    for n in 1..=depth {
        let sat = partition.level_blocks(n);
        let mut level_sum = crate::numeric::CompensatedSum::new();
        for s in 0..1u32 << n {
            let a = alpha.need(n, s)?;
            level_sum.add(a);
            if a < -TOL {
                out.push(TreeViolation {
                    kind: TreeViolationKind::Negative,
                    level: n,
                    subset: Some(s),
                    value: a,
                });
            }
            if a.abs() > TOL && sat.binary_search(&s).is_err() {
                out.push(TreeViolation {
                    kind: TreeViolationKind::Unsatisfiable,
                    level: n,
                    subset: Some(s),
                    value: a,
                });
            }
            if n < depth {
                let lo = alpha.need(n + 1, s)?;
                let hi = alpha.need(n + 1, s | 1 << n)?;
                let gap = a - (lo + hi);
                if gap.abs() > TOL {
                    out.push(TreeViolation {
                        kind: TreeViolationKind::Split,
                        level: n,
                        subset: Some(s),
                        value: gap,
                    });
                }
            }
        }
        let gap = level_sum.value() - 1.0;
        if gap.abs() > TOL {
            out.push(TreeViolation {
                kind: TreeViolationKind::LevelSum,
                level: n,
                subset: None,
                value: gap,
            });
        }
    }
    Ok(out)
}

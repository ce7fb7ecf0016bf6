//! Whether a partial assignment `μ0(φ_1..φ_n)` extends to a probability.
//!
//! The test is linear in the block masses: find `α_S ≥ 0` over satisfiable
//! blocks `ψ_S` with `Σ α_S = 1` and `Σ_{S∋i} α_S = μ0(φ_i)`. Subadditivity
//! and eligibility are necessary conditions reported as diagnostics; for
//! hierarchical sets they are also sufficient.

mod checks;
pub mod simplex;

pub use checks::{
    check_eligible, check_subadditive, check_subadditive_with, is_hierarchical,
    EligibilityViolation, Hierarchy, PairFacts, Relation, SubadditivityOptions,
    SubadditivityReport, SubadditivityViolation, Target, SUBADDITIVITY_TOL,
};

use thiserror::Error;

use crate::belief::{Belief, BeliefError};
use crate::logic::{ConstraintSet, MAX_CONSTRAINTS};
use crate::maxent::{self, MaxentError, ProjectConfig, Projection};
use crate::numeric::CompensatedSum;
use crate::sat::{SatError, SatOracle};
use crate::worlds::{Partition, WorldSpace, WorldsError};
use simplex::{BlockColumns, LpStatus, SimplexOptions};

/// Feasibility tolerance on the phase-1 objective and on witness residuals.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone)]
pub enum ExtendError {
    #[error("{0} constraints exceed the maximum of {MAX_CONSTRAINTS}")]
    TooManyConstraints(usize),
    #[error("numerical failure in the feasibility LP: {0}")]
    Numerical(String),
    #[error("the prior is not strongly Cournot: some world has zero weight")]
    PriorNotCournot,
    #[error("the prior gives zero mass to block {block} which the witness uses")]
    PriorDegenerate { block: String },
    #[error(transparent)]
    Worlds(#[from] WorldsError),
    #[error(transparent)]
    Sat(#[from] SatError),
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Maxent(#[from] Box<MaxentError>),
}

/// A solution `α` of the extension equations, one value per satisfiable
/// block (aligned with `partition.blocks()`).
#[derive(Clone, Debug)]
pub struct Witness {
    pub partition: Partition,
    pub alpha: Vec<f64>,
    /// Largest equation residual.
    pub residual: f64,
}

impl Witness {
    pub fn alpha_of(&self, subset: u32) -> f64 {
        self.partition
            .block_index(subset)
            .map(|k| self.alpha[k])
            .unwrap_or(0.0)
    }

    /// The probability `μ(φ) = Σ_S α_S ξ(φ | ψ_S)`, spreading each block's
    /// mass according to the prior's shape inside it.
    pub fn realize(&self, prior: &Belief) -> Result<Belief, ExtendError> {
        let masses = self.partition.block_masses(prior.weights());
        let n = self.partition.num_sentences();
        for (k, &a) in self.alpha.iter().enumerate() {
            if a > 0.0 && masses[k] <= 0.0 {
                return Err(ExtendError::PriorDegenerate {
                    block: crate::worlds::partition_subset_string(self.partition.blocks()[k], n),
                });
            }
        }
        let weights: Vec<f64> = prior
            .weights()
            .iter()
            .enumerate()
            .map(|(w, &xi)| {
                let k = self
                    .partition
                    .block_index(self.partition.signature(w))
                    .expect("every world lies in a satisfiable block");
                if self.alpha[k] == 0.0 {
                    0.0
                } else {
                    self.alpha[k] * xi / masses[k]
                }
            })
            .collect();
        Ok(Belief::normalized(prior.space().clone(), weights)?)
    }
}

/// A set of constraint indices whose equations (with `Σ α_S = 1`) have no
/// non-negative solution, while every proper subset does.
#[derive(Clone, Debug, PartialEq)]
pub struct Infeasibility {
    pub subsystem: Vec<usize>,
    /// Phase-1 optimum for the full system.
    pub artificial_sum: f64,
}

impl Infeasibility {
    pub fn line(&self, c: &ConstraintSet) -> String {
        let parts: Vec<String> = self
            .subsystem
            .iter()
            .map(|&i| format!("{}: {} = {}", i + 1, c.get(i).label, c.get(i).target))
            .collect();
        format!(
            "LP-INFEASIBLE: no probability matches the irreducible subsystem {{{}}} (phase-1 residual {:.3e})",
            parts.join("; "),
            self.artificial_sum
        )
    }
}

#[derive(Clone, Debug)]
pub enum Feasibility {
    Feasible(Witness),
    Infeasible(Infeasibility),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Feasibility::Feasible(w) => Some(w),
            Feasibility::Infeasible(_) => None,
        }
    }
}

/// Phase-1 simplex over the block variables of the satisfiable blocks.
pub fn extend_feasible(c: &ConstraintSet, space: &WorldSpace) -> Result<Feasibility, ExtendError> {
    if c.len() > MAX_CONSTRAINTS {
        return Err(ExtendError::TooManyConstraints(c.len()));
    }
    let partition = space.partition(&c.grounds())?;
    let targets = c.targets();
    let rows: Vec<usize> = (0..c.len()).collect();
    match solve_rows(&partition, &targets, &rows)? {
        RowOutcome::Feasible(alpha) => {
            let cols = BlockColumns {
                masks: partition.blocks(),
                rows,
            };
            let residual = block_residual(&cols, &targets, &alpha);
            if residual > FEASIBILITY_TOL || alpha.iter().any(|&a| a < 0.0) {
                return Err(ExtendError::Numerical(format!(
                    "witness residual {residual:.3e} exceeds tolerance"
                )));
            }
            Ok(Feasibility::Feasible(Witness {
                partition,
                alpha,
                residual,
            }))
        }
        RowOutcome::Infeasible(artificial_sum) => {
            let subsystem = deletion_filter(&partition, &targets)?;
            Ok(Feasibility::Infeasible(Infeasibility {
                subsystem,
                artificial_sum,
            }))
        }
    }
}

enum RowOutcome {
    Feasible(Vec<f64>),
    Infeasible(f64),
}

fn solve_rows(
    partition: &Partition,
    targets: &[f64],
    rows: &[usize],
) -> Result<RowOutcome, ExtendError> {
    let cols = BlockColumns {
        masks: partition.blocks(),
        rows: rows.to_vec(),
    };
    let mut b = vec![1.0];
    b.extend(rows.iter().map(|&r| targets[r]));
    let sol = simplex::solve(&cols, &b, None, SimplexOptions::default());
    match sol.status {
        LpStatus::Optimal => Ok(RowOutcome::Feasible(sol.x)),
        LpStatus::Infeasible => Ok(RowOutcome::Infeasible(sol.infeasibility)),
        other => Err(ExtendError::Numerical(format!(
            "simplex stopped with status {other:?}"
        ))),
    }
}

fn block_residual(cols: &BlockColumns<'_>, targets: &[f64], alpha: &[f64]) -> f64 {
    let mut total = CompensatedSum::new();
    let mut per_row = vec![CompensatedSum::new(); cols.rows.len()];
    for (&s, &a) in cols.masks.iter().zip(alpha) {
        total.add(a);
        for (k, &r) in cols.rows.iter().enumerate() {
            if s >> r & 1 == 1 {
                per_row[k].add(a);
            }
        }
    }
    cols.rows
        .iter()
        .zip(&per_row)
        .map(|(&r, s)| (s.value() - targets[r]).abs())
        .fold((total.value() - 1.0).abs(), f64::max)
}

/// Drop constraint rows one at a time, keeping each drop that leaves the
/// system infeasible.
fn deletion_filter(partition: &Partition, targets: &[f64]) -> Result<Vec<usize>, ExtendError> {
    let mut keep: Vec<usize> = (0..targets.len()).collect();
    let mut k = 0;
    while k < keep.len() {
        let mut trial = keep.clone();
        trial.remove(k);
        match solve_rows(partition, targets, &trial)? {
            RowOutcome::Infeasible(_) => keep = trial,
            RowOutcome::Feasible(_) => k += 1,
        }
    }
    Ok(keep)
}

/// Structural findings for an assignment that does not extend.
#[derive(Clone, Debug)]
pub struct Diagnostic {
    pub subadditivity: SubadditivityReport,
    pub eligibility: Vec<EligibilityViolation>,
    pub infeasibility: Infeasibility,
}

impl Diagnostic {
    pub fn lines(&self, c: &ConstraintSet) -> Vec<String> {
        let mut out = self.subadditivity.lines(c);
        out.extend(self.eligibility.iter().map(|v| v.render(c)));
        out.push(self.infeasibility.line(c));
        out
    }
}

#[derive(Clone, Debug)]
pub enum Extension {
    Extended(Box<Projection>),
    Explained(Diagnostic),
}

/// Extend `μ0` to the probability closest to `prior` in relative entropy,
/// or explain why no extension exists.
pub fn extend_or_explain(c: &ConstraintSet, prior: &Belief) -> Result<Extension, ExtendError> {
    extend_or_explain_with(c, prior, &SatOracle::default(), &ProjectConfig::default())
}

pub fn extend_or_explain_with(
    c: &ConstraintSet,
    prior: &Belief,
    oracle: &SatOracle,
    cfg: &ProjectConfig,
) -> Result<Extension, ExtendError> {
    if !prior.is_strongly_cournot() {
        return Err(ExtendError::PriorNotCournot);
    }
    match extend_feasible(c, prior.space())? {
        Feasibility::Feasible(_) => {
            let projection = maxent::project_with(prior, c, cfg).map_err(Box::new)?;
            Ok(Extension::Extended(Box::new(projection)))
        }
        Feasibility::Infeasible(infeasibility) => Ok(Extension::Explained(Diagnostic {
            subadditivity: check_subadditive(c, oracle)?,
            eligibility: check_eligible(c, oracle)?,
            infeasibility,
        })),
    }
}

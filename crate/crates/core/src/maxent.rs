//! Relative-entropy projection of a prior onto a constraint set.
//!
//! The minimizer of `KL(μ || ξ)` subject to `μ(φ_i) = μ0(φ_i)` reweights
//! each block `ψ_S` by `w_S = exp(Σ_{j∈S} λ_j) / Φ(λ)` and keeps the prior's
//! shape inside blocks. Constraints with value 0 or 1 are applied first by
//! conditioning; the remaining multipliers maximize the concave dual
//! `Σ λ_i μ0(φ_i) − log Φ(λ)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::belief::{Belief, BeliefError};
use crate::extend::{extend_feasible, ExtendError, Feasibility, Infeasibility};
use crate::logic::ConstraintSet;
use crate::numeric::{log_sum_exp, CompensatedSum};
use crate::worlds::{partition_subset_string, WorldsError};

#[derive(Debug, Error, Clone)]
pub enum MaxentError {
    #[error("constraints admit no probability (irreducible subsystem {:?})", .0.subsystem)]
    Infeasible(Infeasibility),
    #[error("solver stalled with residual {residual:.3e} after {iterations} iterations")]
    Numerical {
        residual: f64,
        iterations: usize,
        best: Box<Projection>,
    },
    #[error("the prior gives zero mass to the worlds allowed by the certain constraints")]
    PriorDegenerate,
    #[error("{0} multipliers given for {1} constraints")]
    Dimension(usize, usize),
    #[error(transparent)]
    Extend(Box<ExtendError>),
    #[error(transparent)]
    Worlds(#[from] WorldsError),
    #[error(transparent)]
    Belief(#[from] BeliefError),
}

impl From<ExtendError> for MaxentError {
    fn from(e: ExtendError) -> Self {
        MaxentError::Extend(Box::new(e))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ProjectConfig {
    pub max_iterations: usize,
    /// Largest acceptable constraint residual.
    pub tolerance: f64,
    /// Residual at which iteration stops early.
    pub target: f64,
    /// Targets this close to 0 or 1 are treated as certain.
    pub hard_tol: f64,
}

impl Default for ProjectConfig {
    fn default() -> Self {
        ProjectConfig {
            max_iterations: 10_000,
            tolerance: 1e-8,
            target: 1e-12,
            hard_tol: 1e-12,
        }
    }
}

/// Dual variable of one constraint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Multiplier {
    Finite(f64),
    /// Applied by conditioning: `certain` for value 1, otherwise value 0.
    /// Stands for the `−∞` multiplier of the complementary sentence.
    Hard {
        certain: bool,
    },
}

impl Multiplier {
    pub fn finite(&self) -> Option<f64> {
        match self {
            Multiplier::Finite(l) => Some(*l),
            Multiplier::Hard { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Only certain constraints (or none): pure conditioning.
    Conditioning,
    Newton,
    Scaling,
}

#[derive(Clone, Debug)]
pub struct BlockRow {
    pub subset: u32,
    /// `ξ(ψ_S)`.
    pub prior_mass: f64,
    /// `w_S`; zero on blocks excluded by certain constraints.
    pub weight: f64,
    /// `μ̂(ψ_S) = w_S ξ(ψ_S)`.
    pub mass: f64,
}

#[derive(Clone, Debug)]
pub struct Projection {
    pub belief: Belief,
    pub multipliers: Vec<Multiplier>,
    pub blocks: Vec<BlockRow>,
    /// `log Φ(λ)` against the original prior.
    pub log_phi: f64,
    /// `KL(μ̂ || ξ)` computed from the weights.
    pub kl: f64,
    /// `Σ λ_i μ0(φ_i) − log Φ(λ)` over the finite multipliers.
    pub dual: f64,
    /// `|μ̂(φ_i) − μ0(φ_i)|` per constraint.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub method: Method,
}

impl Projection {
    pub fn phi(&self) -> f64 {
        self.log_phi.exp()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn report(&self, c: &ConstraintSet) -> String {
        let n = c.len();
        let mut out = String::new();
        let method = match self.method {
            Method::Conditioning => "conditioning",
            Method::Newton => "newton",
            Method::Scaling => "iterative scaling",
        };
        let _ = writeln!(
            out,
            "solver: {method}, {} iterations, max residual {:.3e}",
            self.iterations,
            self.max_residual()
        );
        let _ = writeln!(
            out,
            "log Phi = {:.12}  Phi = {:.12}",
            self.log_phi,
            self.phi()
        );
        let _ = writeln!(out, "KL = {:.12}  dual = {:.12}", self.kl, self.dual);
        let _ = writeln!(out, "multipliers:");
        for (i, (m, item)) in self.multipliers.iter().zip(c.iter()).enumerate() {
            let lam = match m {
                Multiplier::Finite(l) => format!("{l:.12}"),
                Multiplier::Hard { certain: true } => "-inf (certain, not-phi excluded)".into(),
                Multiplier::Hard { certain: false } => "-inf (impossible)".into(),
            };
            let _ = writeln!(
                out,
                "  {:>2}  {:<30} target {:.12}  lambda {}  residual {:.3e}",
                i + 1,
                item.label,
                item.target,
                lam,
                self.residuals[i]
            );
        }
        let _ = writeln!(out, "blocks:");
        for row in &self.blocks {
            let _ = writeln!(
                out,
                "  {:<20} prior {:.12}  w {:.12}  mass {:.12}",
                partition_subset_string(row.subset, n),
                row.prior_mass,
                row.weight,
                row.mass
            );
        }
        out
    }
}

pub fn project(prior: &Belief, c: &ConstraintSet) -> Result<Projection, MaxentError> {
    project_with(prior, c, &ProjectConfig::default())
}

pub fn project_with(
    prior: &Belief,
    c: &ConstraintSet,
    cfg: &ProjectConfig,
) -> Result<Projection, MaxentError> {
    let partition = match extend_feasible(c, prior.space())? {
        Feasibility::Feasible(w) => w.partition,
        Feasibility::Infeasible(i) => return Err(MaxentError::Infeasible(i)),
    };
    let targets = c.targets();
    let mut hard_one = 0u32;
    let mut hard_zero = 0u32;
    let mut soft = Vec::new();
    for (i, &t) in targets.iter().enumerate() {
        if t >= 1.0 - cfg.hard_tol {
            hard_one |= 1 << i;
        } else if t <= cfg.hard_tol {
            hard_zero |= 1 << i;
        } else {
            soft.push(i);
        }
    }
    let allowed = |s: u32| s & hard_one == hard_one && s & hard_zero == 0;
    let block_mass = partition.block_masses(prior.weights());
    let mut z = CompensatedSum::new();
    for (&s, &m) in partition.blocks().iter().zip(&block_mass) {
        if allowed(s) {
            z.add(m);
        }
    }
    let z = z.value();
    if z <= 0.0 {
        return Err(MaxentError::PriorDegenerate);
    }

    // collapse blocks to their pattern over the soft constraints
    let pattern = |s: u32| {
        soft.iter()
            .enumerate()
            .fold(0u32, |acc, (k, &i)| acc | ((s >> i) & 1) << k)
    };
    let mut grouped: BTreeMap<u32, CompensatedSum> = BTreeMap::new();
    for (&s, &m) in partition.blocks().iter().zip(&block_mass) {
        if allowed(s) && m > 0.0 {
            grouped.entry(pattern(s)).or_default().add(m / z);
        }
    }
    let feats: Vec<u32> = grouped.keys().copied().collect();
    let logq: Vec<f64> = grouped.values().map(|s| s.value().ln()).collect();
    let a: Vec<f64> = soft.iter().map(|&i| targets[i]).collect();
    let dual = Dual {
        logq: &logq,
        feats: &feats,
        a: &a,
    };

    let (lambda, iterations, method) = if soft.is_empty() {
        (Vec::new(), 0, Method::Conditioning)
    } else {
        solve_dual(&dual, cfg)
    };
    let log_phi_c = dual.log_phi(&lambda);

    let exponent = |s: u32| -> f64 {
        let p = pattern(s);
        lambda
            .iter()
            .enumerate()
            .filter(|(k, _)| p >> k & 1 == 1)
            .map(|(_, l)| l)
            .sum::<f64>()
    };
    let weights: Vec<f64> = prior
        .weights()
        .iter()
        .enumerate()
        .map(|(w, &xi)| {
            let s = partition.signature(w);
            if !allowed(s) || xi == 0.0 {
                0.0
            } else if soft.is_empty() {
                xi / z
            } else {
                xi / z * (exponent(s) - log_phi_c).exp()
            }
        })
        .collect();
    let belief = Belief::normalized(prior.space().clone(), weights)?;

    let log_phi = z.ln() + log_phi_c;
    let post_mass = partition.block_masses(belief.weights());
    let blocks: Vec<BlockRow> = partition
        .blocks()
        .iter()
        .zip(&block_mass)
        .zip(&post_mass)
        .map(|((&subset, &prior_mass), &mass)| BlockRow {
            subset,
            prior_mass,
            weight: if allowed(subset) {
                (exponent(subset) - log_phi).exp()
            } else {
                0.0
            },
            mass,
        })
        .collect();
    let residuals: Vec<f64> = (0..c.len())
        .map(|i| {
            let mut s = CompensatedSum::new();
            for row in blocks.iter().filter(|r| r.subset >> i & 1 == 1) {
                s.add(row.mass);
            }
            (s.value() - targets[i]).abs()
        })
        .collect();
    let mut multipliers: Vec<Multiplier> = targets
        .iter()
        .map(|&t| Multiplier::Hard { certain: t >= 0.5 })
        .collect();
    for (k, &i) in soft.iter().enumerate() {
        multipliers[i] = Multiplier::Finite(lambda[k]);
    }
    let dual_value = crate::numeric::sum(lambda.iter().zip(&a).map(|(l, t)| l * t)) - log_phi;
    let projection = Projection {
        kl: belief.kl(prior)?,
        belief,
        multipliers,
        blocks,
        log_phi,
        dual: dual_value,
        residuals,
        iterations,
        method,
    };
    let residual = projection.max_residual();
    if residual > cfg.tolerance {
        return Err(MaxentError::Numerical {
            residual,
            iterations,
            best: Box::new(projection),
        });
    }
    Ok(projection)
}

/// The concave dual over grouped blocks: `log q_S` and soft-feature masks.
struct Dual<'a> {
    logq: &'a [f64],
    feats: &'a [u32],
    a: &'a [f64],
}

impl Dual<'_> {
    fn logits(&self, lambda: &[f64]) -> Vec<f64> {
        self.logq
            .iter()
            .zip(self.feats)
            .map(|(&lq, &f)| {
                lq + lambda
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| f >> k & 1 == 1)
                    .map(|(_, l)| l)
                    .sum::<f64>()
            })
            .collect()
    }

    fn log_phi(&self, lambda: &[f64]) -> f64 {
        log_sum_exp(&self.logits(lambda))
    }

    fn value(&self, lambda: &[f64]) -> f64 {
        crate::numeric::sum(lambda.iter().zip(self.a).map(|(l, a)| l * a)) - self.log_phi(lambda)
    }

    /// Block probabilities under the tilted distribution.
    fn probs(&self, lambda: &[f64]) -> Vec<f64> {
        let logits = self.logits(lambda);
        let lse = log_sum_exp(&logits);
        logits.iter().map(|l| (l - lse).exp()).collect()
    }

    /// Expected features.
    fn expectation(&self, p: &[f64]) -> Vec<f64> {
        let k = self.a.len();
        let mut e = vec![CompensatedSum::new(); k];
        for (&pi, &f) in p.iter().zip(self.feats) {
            for (j, ej) in e.iter_mut().enumerate() {
                if f >> j & 1 == 1 {
                    ej.add(pi);
                }
            }
        }
        e.iter().map(|s| s.value()).collect()
    }

    fn gradient(&self, lambda: &[f64]) -> Vec<f64> {
        let e = self.expectation(&self.probs(lambda));
        self.a.iter().zip(&e).map(|(a, e)| a - e).collect()
    }

    /// Feature covariance, the negated Hessian of the dual.
    fn covariance(&self, p: &[f64], e: &[f64]) -> DMatrix<f64> {
        let k = self.a.len();
        let mut h = DMatrix::zeros(k, k);
        for (&pi, &f) in p.iter().zip(self.feats) {
            for i in 0..k {
                if f >> i & 1 == 1 {
                    for j in i..k {
                        if f >> j & 1 == 1 {
                            h[(i, j)] += pi;
                        }
                    }
                }
            }
        }
        for i in 0..k {
            for j in i..k {
                let v = h[(i, j)] - e[i] * e[j];
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        h
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Damped Newton with a ridge, then coordinate-wise iterative scaling if
/// Newton stalls.
fn solve_dual(dual: &Dual<'_>, cfg: &ProjectConfig) -> (Vec<f64>, usize, Method) {
    let k = dual.a.len();
    let mut lambda = vec![0.0; k];
    let mut iterations = 0;
    let mut stalled = false;
    while iterations < cfg.max_iterations {
        let p = dual.probs(&lambda);
        let e = dual.expectation(&p);
        let g: Vec<f64> = dual.a.iter().zip(&e).map(|(a, e)| a - e).collect();
        let res = max_abs(&g);
        if res <= cfg.target {
            return (lambda, iterations, Method::Newton);
        }
        let cov = dual.covariance(&p, &e);
        let scale = (0..k).map(|i| cov[(i, i)]).fold(0.0, f64::max).max(1e-300);
        let gv = DVector::from_column_slice(&g);
        let step = [1e-13, 1e-10, 1e-7, 1e-4, 1e-1].iter().find_map(|&r| {
            let mut h = cov.clone();
            for i in 0..k {
                h[(i, i)] += r * scale;
            }
            h.cholesky().map(|ch| ch.solve(&gv))
        });
        let Some(step) = step else {
            stalled = true;
            break;
        };
        let value = dual.value(&lambda);
        let slope: f64 = g.iter().zip(step.iter()).map(|(a, b)| a * b).sum();
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-12 {
            let cand: Vec<f64> = lambda
                .iter()
                .zip(step.iter())
                .map(|(l, d)| l + t * d)
                .collect();
            let v = dual.value(&cand);
            if v.is_finite()
                && (v >= value + 1e-4 * t * slope || max_abs(&dual.gradient(&cand)) < res)
            {
                lambda = cand;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        iterations += 1;
        if !accepted {
            stalled = true;
            break;
        }
    }
    if !stalled {
        return (lambda, iterations, Method::Newton);
    }
    // exact single-coordinate maximization for 0/1 features
    while iterations < cfg.max_iterations {
        let g = dual.gradient(&lambda);
        if max_abs(&g) <= cfg.target {
            break;
        }
        for i in 0..k {
            let e = dual.expectation(&dual.probs(&lambda));
            let (a, m) = (dual.a[i], e[i]);
            if m > 0.0 && m < 1.0 {
                lambda[i] += (a / m).ln() - ((1.0 - a) / (1.0 - m)).ln();
            }
        }
        iterations += 1;
    }
    (lambda, iterations, Method::Scaling)
}

fn dual_parts(
    prior: &Belief,
    c: &ConstraintSet,
    lambda: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), MaxentError> {
    if lambda.len() != c.len() {
        return Err(MaxentError::Dimension(lambda.len(), c.len()));
    }
    let partition = prior.space().partition(&c.grounds())?;
    let masses = partition.block_masses(prior.weights());
    let mut logits = Vec::new();
    let mut feats = Vec::new();
    for (&s, &m) in partition.blocks().iter().zip(&masses) {
        if m > 0.0 {
            feats.push(s);
            logits.push(m.ln());
        }
    }
    let dual = Dual {
        logq: &logits,
        feats: &feats,
        a: &c.targets(),
    };
    Ok((vec![dual.value(lambda)], dual.gradient(lambda)))
}

/// `Σ λ_i μ0(φ_i) − log Σ_S ξ(ψ_S) exp(Σ_{j∈S} λ_j)` for finite `λ`.
pub fn dual_value(lambda: &[f64], prior: &Belief, c: &ConstraintSet) -> Result<f64, MaxentError> {
    Ok(dual_parts(prior, c, lambda)?.0[0])
}

/// Gradient of [`dual_value`]: `μ0(φ_i) − Σ_{S∋i} w_S ξ(ψ_S)`.
pub fn dual_gradient(
    lambda: &[f64],
    prior: &Belief,
    c: &ConstraintSet,
) -> Result<Vec<f64>, MaxentError> {
    Ok(dual_parts(prior, c, lambda)?.1)
}

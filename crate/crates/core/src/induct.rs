//! Sequence priors over a predicate `B` on the indices `1, 2, 3, …`.
//!
//! A prior is a finite mixture with positive masses; each component is a
//! point mass on one infinite 0/1 sequence or an i.i.d. Bernoulli law. All
//! quantities are closed-form, so the countable case can be studied exactly:
//! the probability of `∀x. B(x)`, of the prefix `B(1) ∧ … ∧ B(n)`, and the
//! posterior of the universal hypothesis after `n` positive instances.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::belief::{Belief, BeliefError};
use crate::logic::{parse_number, Vocabulary};
use crate::numeric::CompensatedSum;
use crate::worlds::{WorldSpace, WorldsError};

/// Tolerance on the mixture masses summing to one.
pub const MASS_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InductError {
    #[error("malformed mixture spec: {0}")]
    Spec(String),
    #[error("mixture masses sum to {0}, not 1")]
    MassSum(f64),
    #[error("mixture mass {0} is not positive")]
    NonPositiveMass(f64),
    #[error("i.i.d. parameter {0} is outside [0,1]")]
    Theta(f64),
    #[error("the prefix of length {0} has probability zero")]
    ZeroPrefix(u64),
    #[error("prefix length {0} is beyond the supported 64")]
    PrefixTooLong(usize),
    #[error(transparent)]
    Worlds(#[from] WorldsError),
    #[error(transparent)]
    Belief(#[from] BeliefError),
}

/// Law of one mixture component over infinite 0/1 sequences.
#[derive(Clone, Debug, PartialEq)]
pub enum Component {
    AllTrue,
    AllFalse,
    /// `B(i)` holds iff `i` is in the set (indices start at 1).
    TrueOn(BTreeSet<u64>),
    /// Each `B(i)` independently true with probability `θ`.
    Iid(f64),
}

impl Component {
    /// Probability that `B(1..n)` all hold.
    fn prefix(&self, n: u64) -> f64 {
        match self {
            Component::AllTrue => 1.0,
            Component::AllFalse => f64::from(n == 0),
            Component::TrueOn(set) => f64::from((1..=n).all(|i| set.contains(&i))),
            Component::Iid(theta) => pow(*theta, n),
        }
    }

    /// Probability of `∀x. B(x)`.
    fn universal(&self) -> f64 {
        match self {
            Component::AllTrue => 1.0,
            Component::Iid(theta) if *theta == 1.0 => 1.0,
            _ => 0.0,
        }
    }

    /// Probability that the first `n` values are exactly `pattern`
    /// (bit `i-1` for index `i`).
    fn cylinder(&self, n: usize, pattern: u64) -> f64 {
        let full = low_bits(n);
        match self {
            Component::AllTrue => f64::from(pattern == full),
            Component::AllFalse => f64::from(pattern == 0),
            Component::TrueOn(set) => {
                let own = set
                    .iter()
                    .filter(|&&i| i >= 1 && i <= n as u64)
                    .fold(0u64, |m, &i| m | 1 << (i - 1));
                f64::from(pattern == own)
            }
            Component::Iid(theta) => {
                let k = u64::from(pattern.count_ones());
                pow(*theta, k) * pow(1.0 - theta, n as u64 - k)
            }
        }
    }
}

fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn pow(x: f64, n: u64) -> f64 {
    match i32::try_from(n) {
        Ok(k) => x.powi(k),
        Err(_) => x.powf(n as f64),
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::AllTrue => f.write_str("all-true"),
            Component::AllFalse => f.write_str("all-false"),
            Component::TrueOn(set) => {
                let items: Vec<String> = set.iter().map(u64::to_string).collect();
                write!(f, "true-on{{{}}}", items.join(","))
            }
            Component::Iid(theta) => write!(f, "iid({theta})"),
        }
    }
}

/// A rigid mixture `Σ m_i μ_i` with every `m_i > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SequencePrior {
    components: Vec<(f64, Component)>,
}

impl SequencePrior {
    pub fn new(components: Vec<(f64, Component)>) -> Result<Self, InductError> {
        if components.is_empty() {
            return Err(InductError::Spec("no components".into()));
        }
        for (m, c) in &components {
            if !(m.is_finite() && *m > 0.0) {
                return Err(InductError::NonPositiveMass(*m));
            }
            if let Component::Iid(theta) = c {
                if !(0.0..=1.0).contains(theta) {
                    return Err(InductError::Theta(*theta));
                }
            }
        }
        let total = crate::numeric::sum(components.iter().map(|(m, _)| *m));
        if (total - 1.0).abs() > MASS_TOL {
            return Err(InductError::MassSum(total));
        }
        Ok(SequencePrior { components })
    }

    /// Every `B(i)` i.i.d. with probability 1/2: the uniform tree prior.
    pub fn naive() -> Self {
        SequencePrior {
            components: vec![(1.0, Component::Iid(0.5))],
        }
    }

    /// Half the mass on `∀x. B(x)`, half on fair coin flips.
    pub fn ravens() -> Self {
        SequencePrior {
            components: vec![(0.5, Component::AllTrue), (0.5, Component::Iid(0.5))],
        }
    }

    pub fn certain() -> Self {
        SequencePrior {
            components: vec![(1.0, Component::AllTrue)],
        }
    }

    /// Parse `kind:mass[@param],…` with kinds `alltrue`, `allfalse`,
    /// `iid` (param `θ`) and `finite` (param `i|j|…`, the true indices).
    /// Masses and `θ` may be decimals or `p/q` fractions.
    pub fn parse(spec: &str) -> Result<Self, InductError> {
        let bad = |msg: String| InductError::Spec(msg);
        let mut components = Vec::new();
        for part in spec.split(',').map(str::trim) {
            let (kind, rest) = part
                .split_once(':')
                .ok_or_else(|| bad(format!("`{part}` lacks `kind:mass`")))?;
            let (mass, param) = match rest.split_once('@') {
                Some((m, p)) => (m, Some(p)),
                None => (rest, None),
            };
            let mass =
                parse_number(mass.trim()).ok_or_else(|| bad(format!("bad mass `{mass}`")))?;
            let component = match (kind.trim(), param) {
                ("alltrue", None) => Component::AllTrue,
                ("allfalse", None) => Component::AllFalse,
                ("iid", Some(p)) => Component::Iid(
                    parse_number(p.trim()).ok_or_else(|| bad(format!("bad parameter `{p}`")))?,
                ),
                ("finite", Some(p)) => {
                    let set = p
                        .split('|')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| match s.trim().parse::<u64>() {
                            Ok(i) if i >= 1 => Ok(i),
                            _ => Err(bad(format!("bad index `{s}`"))),
                        })
                        .collect::<Result<BTreeSet<u64>, _>>()?;
                    Component::TrueOn(set)
                }
                ("alltrue" | "allfalse", Some(_)) => {
                    return Err(bad(format!("`{kind}` takes no parameter")))
                }
                ("iid" | "finite", None) => {
                    return Err(bad(format!("`{kind}` needs `@parameter`")))
                }
                (other, _) => return Err(bad(format!("unknown component kind `{other}`"))),
            };
            components.push((mass, component));
        }
        SequencePrior::new(components)
    }

    pub fn components(&self) -> &[(f64, Component)] {
        &self.components
    }

    fn mix(&self, f: impl Fn(&Component) -> f64) -> f64 {
        let mut s = CompensatedSum::new();
        for (m, c) in &self.components {
            s.add(m * f(c));
        }
        s.value().clamp(0.0, 1.0)
    }

    /// `μ(B(1) ∧ … ∧ B(n))`.
    pub fn prefix_prob(&self, n: u64) -> f64 {
        self.mix(|c| c.prefix(n))
    }

    /// `μ(∀x. B(x))`, the limit of `prefix_prob`.
    pub fn universal_prob(&self) -> f64 {
        self.mix(Component::universal)
    }

    /// `μ(∀x. B(x) | B(1) ∧ … ∧ B(n))`.
    pub fn posterior_universal(&self, n: u64) -> Result<f64, InductError> {
        let prefix = self.prefix_prob(n);
        if prefix <= 0.0 {
            return Err(InductError::ZeroPrefix(n));
        }
        Ok((self.universal_prob() / prefix).min(1.0))
    }

    /// `μ(B(n+1) | B(1) ∧ … ∧ B(n))`.
    pub fn predictive(&self, n: u64) -> Result<f64, InductError> {
        let prefix = self.prefix_prob(n);
        if prefix <= 0.0 {
            return Err(InductError::ZeroPrefix(n));
        }
        Ok((self.prefix_prob(n + 1) / prefix).min(1.0))
    }

    /// Tree coefficient `α_{n,S} = μ(ψ_{n,S})` for the sentences
    /// `φ_i = B(i)`: the probability that exactly the indices in `S` (bit
    /// `i-1` for index `i`) are true among `1..n`.
    pub fn tree_coefficient(&self, n: usize, subset: u64) -> Result<f64, InductError> {
        if n > 64 {
            return Err(InductError::PrefixTooLong(n));
        }
        Ok(self.mix(|c| c.cylinder(n, subset & low_bits(n))))
    }

    /// The vocabulary `domain N = {1..n}`, `pred B : N`.
    pub fn vocabulary(n: usize) -> Vocabulary {
        let mut v = Vocabulary::new();
        v.add_domain("N", (1..=n).map(|i| i.to_string()).collect())
            .expect("fresh vocabulary");
        v.add_pred("B", &["N"]).expect("fresh vocabulary");
        v
    }

    /// The prior's marginal on `B(1..n)` as a belief over the finite
    /// vocabulary from [`SequencePrior::vocabulary`].
    pub fn finite_belief(&self, n: usize) -> Result<Belief, InductError> {
        let space = WorldSpace::new(Arc::new(Self::vocabulary(n)))?;
        let weights = (0..space.world_count() as u64)
            .map(|w| self.tree_coefficient(n, w))
            .collect::<Result<Vec<f64>, _>>()?;
        Ok(Belief::normalized(space, weights)?)
    }

    /// Numeric check that the posterior of `∀x. B(x)` tends to 1 iff the
    /// prefix probabilities tend to a positive universal probability.
    pub fn cuh_equivalence_check(&self, n_max: u64) -> CuhReport {
        self.cuh_equivalence_check_with(n_max, CUH_TOL)
    }

    pub fn cuh_equivalence_check_with(&self, n_max: u64, tol: f64) -> CuhReport {
        let universal = self.universal_prob();
        let mut prefix_gap = Vec::new();
        let mut posterior_gap = Vec::new();
        for n in 0..=n_max {
            prefix_gap.push(self.prefix_prob(n) - universal);
            posterior_gap.push(
                self.posterior_universal(n)
                    .map(|p| 1.0 - p)
                    .unwrap_or(f64::NAN),
            );
        }
        let last_post = *posterior_gap.last().expect("n_max + 1 entries");
        let last_prefix = *prefix_gap.last().expect("n_max + 1 entries");
        let left = last_post.is_finite() && last_post <= tol;
        let right = universal > 0.0 && last_prefix <= tol;
        CuhReport {
            universal,
            prefix_gap,
            posterior_gap,
            left,
            right,
            tol,
        }
    }

    /// `n,prefix_prob,posterior_universal,predictive` rows for `n = 0..=n_max`;
    /// undefined entries are left empty.
    pub fn convergence_csv(&self, n_max: u64) -> String {
        let mut out = String::from("n,prefix_prob,posterior_universal,predictive\n");
        let cell = |r: Result<f64, InductError>| r.map(|v| format!("{v:?}")).unwrap_or_default();
        for n in 0..=n_max {
            out.push_str(&format!(
                "{n},{:?},{},{}\n",
                self.prefix_prob(n),
                cell(self.posterior_universal(n)),
                cell(self.predictive(n))
            ));
        }
        out
    }
}

impl fmt::Display for SequencePrior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|(m, c)| format!("{m} {c}"))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Default tolerance for "has converged" in [`SequencePrior::cuh_equivalence_check`].
pub const CUH_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct CuhReport {
    pub universal: f64,
    /// `prefix_prob(n) − universal_prob` for `n = 0..=n_max`.
    pub prefix_gap: Vec<f64>,
    /// `1 − posterior_universal(n)`; NaN where the prefix has probability 0.
    pub posterior_gap: Vec<f64>,
    /// The posterior of the universal hypothesis reached 1 within `tol`.
    pub left: bool,
    /// Prefix probabilities reached a positive universal probability.
    pub right: bool,
    pub tol: f64,
}

impl CuhReport {
    pub fn equivalence_holds(&self) -> bool {
        self.left == self.right
    }
}

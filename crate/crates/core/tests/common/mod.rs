//! Independent oracles and random generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use plog_core::belief::Belief;
use plog_core::logic::{GroundAtom, Sentence, Term, Vocabulary};
use plog_core::worlds::WorldSpace;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Propositions `p0 .. p{k-1}`; atom `i` is `p{i}`.
pub fn props(k: usize) -> Arc<Vocabulary> {
    let mut v = Vocabulary::new();
    for i in 0..k {
        v.add_prop(format!("p{i}")).unwrap();
    }
    Arc::new(v)
}

pub fn prop(i: usize) -> Sentence {
    Sentence::prop(format!("p{i}"))
}

/// Random quantifier-free sentence over `p0 .. p{k-1}`.
pub fn random_qf(rng: &mut TestRng, k: usize, depth: usize) -> Sentence {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..20) {
            0 => Sentence::True,
            1 => Sentence::False,
            _ => prop(rng.gen_range(0..k)),
        };
    }
    let a = random_qf(rng, k, depth - 1);
    match rng.gen_range(0..6) {
        0 => a.not(),
        1 | 2 => a.and(random_qf(rng, k, depth - 1)),
        3 => a.or(random_qf(rng, k, depth - 1)),
        4 => a.implies(random_qf(rng, k, depth - 1)),
        _ => a.iff(random_qf(rng, k, depth - 1)),
    }
}

/// Truth of a sentence in a world, by direct recursion on the semantics.
pub fn eval(s: &Sentence, vocab: &Vocabulary, world: usize) -> bool {
    eval_in(s, vocab, world, &mut HashMap::new())
}

fn resolve<'a>(t: &'a Term, env: &'a HashMap<String, String>) -> &'a str {
    match t {
        Term::Var(v) => env.get(v).map(String::as_str).unwrap_or(v),
        Term::Const(c) => env.get(c).map(String::as_str).unwrap_or(c),
    }
}

fn eval_in(
    s: &Sentence,
    vocab: &Vocabulary,
    world: usize,
    env: &mut HashMap<String, String>,
) -> bool {
    match s {
        Sentence::True => true,
        Sentence::False => false,
        Sentence::Prop(name) => {
            let atom = GroundAtom {
                symbol: vocab.symbol_index(name).unwrap(),
                args: vec![],
            };
            world >> vocab.atom_index(&atom).unwrap() & 1 == 1
        }
        Sentence::Atom { pred, args } => {
            let args = args
                .iter()
                .map(|t| vocab.constant(resolve(t, env)).unwrap().1)
                .collect();
            let atom = GroundAtom {
                symbol: vocab.symbol_index(pred).unwrap(),
                args,
            };
            world >> vocab.atom_index(&atom).unwrap() & 1 == 1
        }
        Sentence::Equals(a, b) => resolve(a, env) == resolve(b, env),
        Sentence::Not(a) => !eval_in(a, vocab, world, env),
        Sentence::And(a, b) => eval_in(a, vocab, world, env) & eval_in(b, vocab, world, env),
        Sentence::Or(a, b) => eval_in(a, vocab, world, env) | eval_in(b, vocab, world, env),
        Sentence::Implies(a, b) => !eval_in(a, vocab, world, env) | eval_in(b, vocab, world, env),
        Sentence::Iff(a, b) => eval_in(a, vocab, world, env) == eval_in(b, vocab, world, env),
        Sentence::Forall { var, domain, body } | Sentence::Exists { var, domain, body } => {
            let universal = matches!(s, Sentence::Forall { .. });
            let d = &vocab.domains()[vocab.domain_index(domain).unwrap()];
            let saved = env.get(var).cloned();
            let mut result = universal;
            for c in &d.constants {
                env.insert(var.clone(), c.clone());
                let v = eval_in(body, vocab, world, env);
                if v != universal {
                    result = v;
                    break;
                }
            }
            match saved {
                Some(old) => env.insert(var.clone(), old),
                None => env.remove(var),
            };
            result
        }
    }
}

/// Truth table of a sentence over all worlds, evaluated column-wise.
pub fn truth_table(s: &Sentence, vocab: &Vocabulary) -> Vec<bool> {
    table_in(s, vocab, &mut HashMap::new())
}

fn atom_column(vocab: &Vocabulary, atom: &GroundAtom) -> Vec<bool> {
    let i = vocab.atom_index(atom).unwrap();
    (0..1usize << vocab.num_atoms())
        .map(|w| w >> i & 1 == 1)
        .collect()
}

fn zip(a: Vec<bool>, b: Vec<bool>, f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

fn table_in(s: &Sentence, vocab: &Vocabulary, env: &mut HashMap<String, String>) -> Vec<bool> {
    let worlds = 1usize << vocab.num_atoms();
    match s {
        Sentence::True => vec![true; worlds],
        Sentence::False => vec![false; worlds],
        Sentence::Prop(name) => atom_column(
            vocab,
            &GroundAtom {
                symbol: vocab.symbol_index(name).unwrap(),
                args: vec![],
            },
        ),
        Sentence::Atom { pred, args } => {
            let args = args
                .iter()
                .map(|t| vocab.constant(resolve(t, env)).unwrap().1)
                .collect();
            atom_column(
                vocab,
                &GroundAtom {
                    symbol: vocab.symbol_index(pred).unwrap(),
                    args,
                },
            )
        }
        Sentence::Equals(a, b) => vec![resolve(a, env) == resolve(b, env); worlds],
        Sentence::Not(a) => table_in(a, vocab, env).into_iter().map(|x| !x).collect(),
        Sentence::And(a, b) => zip(table_in(a, vocab, env), table_in(b, vocab, env), |x, y| {
            x & y
        }),
        Sentence::Or(a, b) => zip(table_in(a, vocab, env), table_in(b, vocab, env), |x, y| {
            x | y
        }),
        Sentence::Implies(a, b) => zip(table_in(a, vocab, env), table_in(b, vocab, env), |x, y| {
            !x | y
        }),
        Sentence::Iff(a, b) => zip(table_in(a, vocab, env), table_in(b, vocab, env), |x, y| {
            x == y
        }),
        Sentence::Forall { var, domain, body } | Sentence::Exists { var, domain, body } => {
            let universal = matches!(s, Sentence::Forall { .. });
            let d = &vocab.domains()[vocab.domain_index(domain).unwrap()];
            let saved = env.get(var).cloned();
            let mut acc = vec![universal; worlds];
            for c in &d.constants {
                env.insert(var.clone(), c.clone());
                let t = table_in(body, vocab, env);
                acc = if universal {
                    zip(acc, t, |x, y| x & y)
                } else {
                    zip(acc, t, |x, y| x | y)
                };
            }
            match saved {
                Some(old) => env.insert(var.clone(), old),
                None => env.remove(var),
            };
            acc
        }
    }
}

/// Sum of `weights` over the worlds where `table` holds, in index order.
pub fn mass(weights: &[f64], table: &[bool]) -> f64 {
    weights
        .iter()
        .zip(table)
        .filter(|(_, &t)| t)
        .map(|(w, _)| w)
        .sum()
}

/// Random normalized weights; each world is zeroed with probability `zero`.
pub fn random_weights(rng: &mut TestRng, n: usize, zero: f64) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            if rng.gen_bool(zero) {
                0.0
            } else {
                rng.gen_range(0.05..1.0)
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.gen_range(0..n)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

pub fn random_belief(rng: &mut TestRng, space: &Arc<WorldSpace>, zero: f64) -> Belief {
    let w = random_weights(rng, space.world_count(), zero);
    Belief::normalized(space.clone(), w).unwrap()
}

/// `KL(mu || xi)` by direct summation.
pub fn kl(mu: &[f64], xi: &[f64]) -> f64 {
    mu.iter()
        .zip(xi)
        .filter(|(&m, _)| m > 0.0)
        .map(|(&m, &x)| m * (m / x).ln())
        .sum()
}

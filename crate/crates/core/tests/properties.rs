mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;

use common::*;
use plog_core::belief::Belief;
use plog_core::extend::{check_eligible, check_subadditive, extend_feasible};
use plog_core::induct::{Component, SequencePrior};
use plog_core::logic::{ground, parse_formula, ConstraintSet, Sentence, Term, Vocabulary};
use plog_core::maxent::project;
use plog_core::sat::SatOracle;
use plog_core::worlds::{ModelSet, Partition, WorldSpace};

/// Domain `D = {a, b, c}` (first `size` of them), `P : D`, `R : D × D`, props `s`, `t`.
fn fo_vocab(size: usize) -> Arc<Vocabulary> {
    let consts: Vec<String> = ["a", "b", "c"][..size]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut v = Vocabulary::new();
    v.add_domain("D", consts).unwrap();
    v.add_pred("P", &["D"]).unwrap();
    v.add_pred("R", &["D", "D"]).unwrap();
    v.add_prop("s").unwrap();
    v.add_prop("t").unwrap();
    Arc::new(v)
}

fn term(rng: &mut TestRng, scope: &[String], consts: &[String]) -> Term {
    if !scope.is_empty() && rng.gen_bool(0.6) {
        Term::Var(scope[rng.gen_range(0..scope.len())].clone())
    } else {
        Term::Const(consts[rng.gen_range(0..consts.len())].clone())
    }
}

fn random_fo(
    rng: &mut TestRng,
    depth: usize,
    scope: &mut Vec<String>,
    consts: &[String],
) -> Sentence {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..8) {
            0 => Sentence::prop("s"),
            1 => Sentence::prop("t"),
            2 => Sentence::Equals(term(rng, scope, consts), term(rng, scope, consts)),
            3 => Sentence::Atom {
                pred: "R".into(),
                args: vec![term(rng, scope, consts), term(rng, scope, consts)],
            },
            4 => [Sentence::True, Sentence::False][rng.gen_range(0..2)].clone(),
            _ => Sentence::Atom {
                pred: "P".into(),
                args: vec![term(rng, scope, consts)],
            },
        };
    }
    let sub = |rng: &mut TestRng, scope: &mut Vec<String>| random_fo(rng, depth - 1, scope, consts);
    match rng.gen_range(0..7) {
        0 => sub(rng, scope).not(),
        1 => sub(rng, scope).and(sub(rng, scope)),
        2 => sub(rng, scope).or(sub(rng, scope)),
        3 => sub(rng, scope).implies(sub(rng, scope)),
        4 => sub(rng, scope).iff(sub(rng, scope)),
        q => {
            let var = format!("x{}", scope.len());
            scope.push(var.clone());
            let body = sub(rng, scope);
            scope.pop();
            if q == 5 {
                Sentence::forall(var, "D", body)
            } else {
                Sentence::exists(var, "D", body)
            }
        }
    }
}

fn fo_case(seed: u64) -> (Arc<Vocabulary>, Sentence) {
    let mut r = rng(seed);
    let size = r.gen_range(1..=3);
    let vocab = fo_vocab(size);
    let s = fo_sentence(&mut r, &vocab);
    (vocab, s)
}

fn fo_sentence(r: &mut TestRng, vocab: &Vocabulary) -> Sentence {
    let consts = vocab.domains()[0].constants.clone();
    random_fo(r, 4, &mut Vec::new(), &consts)
}

fn model_set(table: &[bool]) -> ModelSet {
    ModelSet::from_indices(
        table.len(),
        table.iter().enumerate().filter(|(_, &t)| t).map(|(w, _)| w),
    )
}

/// Random props vocabulary, sentences over it and a belief.
fn qf_case(
    seed: u64,
    max_atoms: usize,
    max_sentences: usize,
    zero: f64,
) -> (Arc<WorldSpace>, Vec<Sentence>, Belief) {
    let mut r = rng(seed);
    let k = r.gen_range(1..=max_atoms);
    let n = r.gen_range(1..=max_sentences);
    let space = WorldSpace::new(props(k)).unwrap();
    let sentences = (0..n).map(|_| random_qf(&mut r, k, 3)).collect();
    let b = random_belief(&mut r, &space, zero);
    (space, sentences, b)
}

fn constraints(space: &WorldSpace, sentences: &[Sentence], b: &Belief) -> ConstraintSet {
    let mut c = ConstraintSet::new(space.vocabulary().clone());
    for (i, s) in sentences.iter().enumerate() {
        c.push(
            format!("c{i}"),
            s.clone(),
            b.prob(s).unwrap().clamp(0.0, 1.0),
        )
        .unwrap();
    }
    c
}

fn random_mixture(seed: u64) -> SequencePrior {
    let mut r = rng(seed);
    let parts = r.gen_range(1..=4);
    let raw: Vec<f64> = (0..parts).map(|_| r.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let components = raw
        .iter()
        .map(|m| {
            let c = match r.gen_range(0..4) {
                0 => Component::AllTrue,
                1 => Component::AllFalse,
                2 => Component::Iid(r.gen_range(0.05..0.95)),
                _ => Component::TrueOn((1..=12u64).filter(|_| r.gen_bool(0.7)).collect()),
            };
            (m / total, c)
        })
        .collect();
    SequencePrior::new(components).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sentence_display_parses_back(seed in any::<u64>()) {
        let (vocab, s) = fo_case(seed);
        let text = s.to_string();
        let back = parse_formula(&text, &vocab, &[]).unwrap();
        prop_assert_eq!(back, s, "{}", text);
    }

    #[test]
    fn models_match_semantics(seed in any::<u64>()) {
        let (vocab, s) = fo_case(seed);
        let space = WorldSpace::new(vocab.clone()).unwrap();
        let table = truth_table(&s, &vocab);
        prop_assert_eq!(space.models_of(&s).unwrap(), model_set(&table));
        let g = ground(&s, &vocab).unwrap();
        for w in (0..table.len()).step_by(7) {
            prop_assert_eq!(g.eval_world(w as u64), table[w]);
            prop_assert_eq!(eval(&s, &vocab, w), table[w]);
        }
    }

    #[test]
    fn models_distribute_over_connectives(seed in any::<u64>()) {
        let (vocab, a) = fo_case(seed);
        let b = fo_sentence(&mut rng(!seed), &vocab);
        let space = WorldSpace::new(vocab.clone()).unwrap();
        let (ma, mb) = (space.models_of(&a).unwrap(), space.models_of(&b).unwrap());
        prop_assert_eq!(space.models_of(&a.clone().not()).unwrap(), ma.complement());
        prop_assert_eq!(space.models_of(&a.clone().and(b.clone())).unwrap(), ma.intersect(&mb));
        prop_assert_eq!(space.models_of(&a.or(b)).unwrap(), ma.union(&mb));
    }

    #[test]
    fn sat_agrees_with_truth_tables(seed in any::<u64>()) {
        let (vocab, s) = fo_case(seed);
        let g = ground(&s, &vocab).unwrap();
        let table = truth_table(&s, &vocab);
        let oracle = SatOracle::default();
        prop_assert_eq!(oracle.is_satisfiable(&g).unwrap(), table.iter().any(|&t| t));
        prop_assert_eq!(oracle.is_valid(&g).unwrap(), table.iter().all(|&t| t));
        if let Some(model) = oracle.model(&g).unwrap() {
            let mut world = 0u64;
            for (atom, value) in model {
                if value {
                    world |= 1 << atom;
                }
            }
            prop_assert!(g.eval_world(world));
        }
    }

    #[test]
    fn partition_invariants(seed in any::<u64>()) {
        let (space, sentences, _) = qf_case(seed, 8, 5, 0.0);
        let grounds: Vec<_> = sentences.iter().map(|s| ground(s, space.vocabulary()).unwrap()).collect();
        let p = space.partition(&grounds).unwrap();
        let worlds = space.world_count();
        // Blocks are disjoint and cover every world.
        let mut covered = ModelSet::empty(worlds);
        for &s in p.blocks() {
            let m = p.block_models(s);
            prop_assert!(!m.is_empty());
            prop_assert!(covered.intersect(&m).is_empty());
            covered = covered.union(&m);
        }
        prop_assert_eq!(covered.count(), worlds);
        // Mod(φ_i) is the union of the blocks containing i.
        for i in 0..sentences.len() {
            let mut u = ModelSet::empty(worlds);
            for &s in p.blocks().iter().filter(|&&s| s >> i & 1 == 1) {
                u = u.union(&p.block_models(s));
            }
            prop_assert_eq!(&u, p.sentence_models(i));
        }
        // Block satisfiability agrees between bitsets and SAT.
        let oracle = SatOracle::default();
        let n = sentences.len();
        for s in 0..1u32 << n {
            let psi = Partition::psi(&grounds, n, s);
            prop_assert_eq!(p.is_satisfiable(s), oracle.is_satisfiable(&psi).unwrap());
        }
        // Refinement: each level-n block is the union of its two children.
        if n >= 2 {
            let coarse = space.partition(&grounds[..n - 1]).unwrap();
            for &s in coarse.blocks() {
                let lo = p.block_models(s);
                let hi = p.block_models(s | 1 << (n - 1));
                prop_assert_eq!(lo.union(&hi), coarse.block_models(s));
            }
        }
    }

    #[test]
    fn belief_table_round_trips(seed in any::<u64>()) {
        let (space, _, b) = qf_case(seed, 8, 1, 0.4);
        let back = Belief::from_table(space, &b.to_table()).unwrap();
        prop_assert_eq!(back.weights(), b.weights());
    }

    #[test]
    fn read_off_assignments_are_coherent(seed in any::<u64>()) {
        let (space, sentences, b) = qf_case(seed, 6, 6, 0.5);
        let c = constraints(&space, &sentences, &b);
        let oracle = SatOracle::default();
        let sub = check_subadditive(&c, &oracle).unwrap();
        prop_assert!(sub.is_clean(), "{:?}", sub.lines(&c));
        prop_assert!(check_eligible(&c, &oracle).unwrap().is_empty());
        prop_assert!(extend_feasible(&c, &space).unwrap().is_feasible());
    }

    #[test]
    fn projection_is_pythagorean(seed in any::<u64>()) {
        let (space, sentences, source) = qf_case(seed, 5, 3, 0.0);
        let c = constraints(&space, &sentences, &source);
        let mut r = rng(seed.wrapping_add(1));
        let prior = random_belief(&mut r, &space, 0.0);
        let p = project(&prior, &c).unwrap();
        prop_assert!(p.max_residual() <= 1e-8);
        // `source` satisfies the constraints, so it plays the role of ν.
        let (nu, mu, xi) = (source.weights(), p.belief.weights(), prior.weights());
        prop_assert!(kl(nu, xi) + 1e-7 >= kl(nu, mu) + kl(mu, xi));
        prop_assert!(kl(nu, xi) + 1e-9 >= kl(mu, xi));
    }

    #[test]
    fn projection_keeps_quantifiers_exact(seed in any::<u64>()) {
        let (vocab, s) = fo_case(seed);
        let space = WorldSpace::new(vocab.clone()).unwrap();
        let mut r = rng(seed);
        let source = random_belief(&mut r, &space, 0.0);
        let px = Sentence::Atom { pred: "P".into(), args: vec![Term::Var("x".into())] };
        let phi = Sentence::forall("x", "D", px.implies(Sentence::prop("s")));
        let mut c = ConstraintSet::new(vocab.clone());
        c.push("phi", phi.clone(), source.prob(&phi).unwrap().clamp(0.0, 1.0)).unwrap();
        let p = project(&Belief::uniform(space), &c).unwrap();
        let expanded = ground(&s, &vocab).unwrap().to_sentence(&vocab);
        prop_assert_eq!(p.belief.prob(&s).unwrap(), p.belief.prob(&expanded).unwrap());
    }

    #[test]
    fn prefix_probabilities_decrease_to_universal(seed in any::<u64>()) {
        let prior = random_mixture(seed);
        let u = prior.universal_prob();
        let mut last = 1.0f64;
        for n in 0..40 {
            let p = prior.prefix_prob(n);
            prop_assert!(p <= last + 1e-15);
            prop_assert!(p + 1e-15 >= u);
            last = p;
        }
    }

    #[test]
    fn finite_engine_matches_closed_forms(seed in any::<u64>(), n in 1usize..=10) {
        let prior = random_mixture(seed);
        let b = prior.finite_belief(n).unwrap();
        let bi = |i: usize| Sentence::atom("B", &[&i.to_string()]);
        let prefix = |m: usize| Sentence::conjunction((1..=m).map(bi));
        for m in 0..=n {
            let p = b.prob(&prefix(m)).unwrap();
            prop_assert!((p - prior.prefix_prob(m as u64)).abs() <= 1e-12);
            if m < n && p > 0.0 {
                let q = b.cond(&bi(m + 1), &prefix(m)).unwrap();
                prop_assert!((q - prior.predictive(m as u64).unwrap()).abs() <= 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn universal_mass_drives_posterior_up(m in 0.01f64..0.99, theta in 0.05f64..0.95) {
        let prior = SequencePrior::new(vec![(m, Component::AllTrue), (1.0 - m, Component::Iid(theta))]).unwrap();
        let mut last = 0.0;
        for n in 0..60u64 {
            let p = prior.posterior_universal(n).unwrap();
            prop_assert!(p > last || (p >= last && 1.0 - p < 1e-12));
            last = p;
            // Closed-form threshold: the posterior exceeds 1 − ε once θ^n (1−m)/m < ε.
            let eps = theta.powi(n as i32) * (1.0 - m) / m * 1.000001;
            if eps < 1.0 {
                prop_assert!(p >= 1.0 - eps - 1e-15);
            }
        }
    }
}

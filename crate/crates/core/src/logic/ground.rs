use super::syntax::{GroundAtom, GroundSentence, Sentence, Symbol, Term, Vocabulary};
use super::LogicError;

/// Eliminate quantifiers and equalities over the finite domains of `vocab`.
///
/// `forall x:D. b` becomes the left-folded conjunction of `b` over the
/// constants of `D` in declaration order, `exists` the disjunction.
/// Equalities between constants fold to `True`/`False`, and constants are
/// absorbed by their parent connective. No other simplification happens.
pub fn ground(s: &Sentence, vocab: &Vocabulary) -> Result<GroundSentence, LogicError> {
    let mut env = Vec::new();
    ground_in(s, vocab, &mut env)
}

struct Binding<'a> {
    var: &'a str,
    domain: usize,
    position: usize,
}

fn resolve(
    term: &Term,
    vocab: &Vocabulary,
    env: &[Binding<'_>],
) -> Result<(usize, usize), LogicError> {
    match term {
        Term::Var(v) => env
            .iter()
            .rev()
            .find(|b| b.var == v)
            .map(|b| (b.domain, b.position))
            .ok_or_else(|| LogicError::FreeVariable(v.clone())),
        Term::Const(c) => vocab.constant(c).ok_or_else(|| LogicError::Undeclared {
            kind: "constant",
            name: c.clone(),
        }),
    }
}

fn ground_in<'a>(
    s: &'a Sentence,
    vocab: &Vocabulary,
    env: &mut Vec<Binding<'a>>,
) -> Result<GroundSentence, LogicError> {
    Ok(match s {
        Sentence::True => GroundSentence::True,
        Sentence::False => GroundSentence::False,
        Sentence::Prop(name) => {
            let sym = vocab
                .symbol_index(name)
                .ok_or_else(|| LogicError::Undeclared {
                    kind: "proposition",
                    name: name.clone(),
                })?;
            if !matches!(vocab.symbols()[sym], Symbol::Prop { .. }) {
                return Err(LogicError::Arity {
                    name: name.clone(),
                    expected: vocab_arity(vocab, sym),
                    found: 0,
                });
            }
            GroundSentence::Atom(atom_of(vocab, sym, vec![])?)
        }
        Sentence::Atom { pred, args } => {
            let sym = vocab
                .symbol_index(pred)
                .ok_or_else(|| LogicError::Undeclared {
                    kind: "predicate",
                    name: pred.clone(),
                })?;
            let Symbol::Pred { args: doms, .. } = &vocab.symbols()[sym] else {
                return Err(LogicError::Arity {
                    name: pred.clone(),
                    expected: 0,
                    found: args.len(),
                });
            };
            if doms.len() != args.len() {
                return Err(LogicError::Arity {
                    name: pred.clone(),
                    expected: doms.len(),
                    found: args.len(),
                });
            }
            let mut positions = Vec::with_capacity(args.len());
            for (term, &want) in args.iter().zip(doms) {
                let (dom, pos) = resolve(term, vocab, env)?;
                if dom != want {
                    return Err(LogicError::DomainMismatch {
                        term: term.name().to_string(),
                        expected: vocab.domains()[want].name.clone(),
                        found: vocab.domains()[dom].name.clone(),
                    });
                }
                positions.push(pos);
            }
            GroundSentence::Atom(atom_of(vocab, sym, positions)?)
        }
        Sentence::Equals(a, b) => {
            let (da, pa) = resolve(a, vocab, env)?;
            let (db, pb) = resolve(b, vocab, env)?;
            if da != db {
                return Err(LogicError::DomainMismatch {
                    term: b.name().to_string(),
                    expected: vocab.domains()[da].name.clone(),
                    found: vocab.domains()[db].name.clone(),
                });
            }
            if pa == pb {
                GroundSentence::True
            } else {
                GroundSentence::False
            }
        }
        Sentence::Not(x) => mk_not(ground_in(x, vocab, env)?),
        Sentence::And(a, b) => mk_and(ground_in(a, vocab, env)?, ground_in(b, vocab, env)?),
        Sentence::Or(a, b) => mk_or(ground_in(a, vocab, env)?, ground_in(b, vocab, env)?),
        Sentence::Implies(a, b) => mk_implies(ground_in(a, vocab, env)?, ground_in(b, vocab, env)?),
        Sentence::Iff(a, b) => mk_iff(ground_in(a, vocab, env)?, ground_in(b, vocab, env)?),
        Sentence::Forall { var, domain, body } | Sentence::Exists { var, domain, body } => {
            let dom = vocab
                .domain_index(domain)
                .ok_or_else(|| LogicError::Undeclared {
                    kind: "domain",
                    name: domain.clone(),
                })?;
            let universal = matches!(s, Sentence::Forall { .. });
            let mut acc: Option<GroundSentence> = None;
            for position in 0..vocab.domains()[dom].constants.len() {
                env.push(Binding {
                    var,
                    domain: dom,
                    position,
                });
                let inst = ground_in(body, vocab, env);
                env.pop();
                let inst = inst?;
                acc = Some(match acc {
                    None => inst,
                    Some(prev) if universal => mk_and(prev, inst),
                    Some(prev) => mk_or(prev, inst),
                });
            }
            // domains are non-empty
            acc.expect("empty domain")
        }
    })
}

fn vocab_arity(vocab: &Vocabulary, sym: usize) -> usize {
    match &vocab.symbols()[sym] {
        Symbol::Pred { args, .. } => args.len(),
        Symbol::Prop { .. } => 0,
    }
}

fn atom_of(vocab: &Vocabulary, symbol: usize, args: Vec<usize>) -> Result<usize, LogicError> {
    let atom = GroundAtom { symbol, args };
    vocab
        .atom_index(&atom)
        .ok_or_else(|| LogicError::Undeclared {
            kind: "ground atom",
            name: format!("{atom:?}"),
        })
}

/// Re-apply the grounding absorption rules to an existing ground sentence.
/// `ground` output is a fixpoint of this.
pub fn absorb(g: &GroundSentence) -> GroundSentence {
    match g {
        GroundSentence::True | GroundSentence::False | GroundSentence::Atom(_) => g.clone(),
        GroundSentence::Not(x) => mk_not(absorb(x)),
        GroundSentence::And(a, b) => mk_and(absorb(a), absorb(b)),
        GroundSentence::Or(a, b) => mk_or(absorb(a), absorb(b)),
        GroundSentence::Implies(a, b) => mk_implies(absorb(a), absorb(b)),
        GroundSentence::Iff(a, b) => mk_iff(absorb(a), absorb(b)),
    }
}

fn mk_not(x: GroundSentence) -> GroundSentence {
    match x {
        GroundSentence::True => GroundSentence::False,
        GroundSentence::False => GroundSentence::True,
        x => x.not(),
    }
}

fn mk_and(a: GroundSentence, b: GroundSentence) -> GroundSentence {
    match (a, b) {
        (GroundSentence::False, _) | (_, GroundSentence::False) => GroundSentence::False,
        (GroundSentence::True, x) | (x, GroundSentence::True) => x,
        (a, b) => a.and(b),
    }
}

fn mk_or(a: GroundSentence, b: GroundSentence) -> GroundSentence {
    match (a, b) {
        (GroundSentence::True, _) | (_, GroundSentence::True) => GroundSentence::True,
        (GroundSentence::False, x) | (x, GroundSentence::False) => x,
        (a, b) => a.or(b),
    }
}

fn mk_implies(a: GroundSentence, b: GroundSentence) -> GroundSentence {
    match (a, b) {
        (GroundSentence::False, _) | (_, GroundSentence::True) => GroundSentence::True,
        (GroundSentence::True, x) => x,
        (x, GroundSentence::False) => mk_not(x),
        (a, b) => a.implies(b),
    }
}

fn mk_iff(a: GroundSentence, b: GroundSentence) -> GroundSentence {
    match (a, b) {
        (GroundSentence::True, x) | (x, GroundSentence::True) => x,
        (GroundSentence::False, x) | (x, GroundSentence::False) => mk_not(x),
        (a, b) => a.iff(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab3() -> Vocabulary {
        let mut v = Vocabulary::new();
        v.add_domain("D", vec!["a".into(), "b".into(), "c".into()])
            .unwrap();
        v.add_pred("q", &["D"]).unwrap();
        v
    }

    #[test]
    fn forall_expands_to_conjunction() {
        let v = vocab3();
        let s = Sentence::forall(
            "x",
            "D",
            Sentence::Atom {
                pred: "q".into(),
                args: vec![Term::Var("x".into())],
            },
        );
        let g = ground(&s, &v).unwrap();
        let expect = GroundSentence::Atom(0)
            .and(GroundSentence::Atom(1))
            .and(GroundSentence::Atom(2));
        assert_eq!(g, expect);
    }

    #[test]
    fn exists_over_singleton_is_the_instance() {
        let mut v = Vocabulary::new();
        v.add_domain("D", vec!["a".into()]).unwrap();
        v.add_pred("q", &["D"]).unwrap();
        let s = Sentence::exists(
            "x",
            "D",
            Sentence::Atom {
                pred: "q".into(),
                args: vec![Term::Var("x".into())],
            },
        );
        assert_eq!(ground(&s, &v).unwrap(), GroundSentence::Atom(0));
    }

    #[test]
    fn uniqueness_over_three_doors() {
        let mut v = Vocabulary::new();
        v.add_domain("Door", vec!["d1".into(), "d2".into(), "d3".into()])
            .unwrap();
        v.add_pred("p", &["Door"]).unwrap();
        let px = |n: &str| Sentence::Atom {
            pred: "p".into(),
            args: vec![Term::Var(n.into())],
        };
        let s = Sentence::exists(
            "d",
            "Door",
            px("d").and(Sentence::forall(
                "x",
                "Door",
                px("x").implies(Sentence::Equals(
                    Term::Var("x".into()),
                    Term::Var("d".into()),
                )),
            )),
        );
        let g = ground(&s, &v).unwrap();
        // cross equalities fold away: p(d1) & (~p(d2) & ~p(d3)) for d = d1
        let a = GroundSentence::Atom;
        let first = a(0).and(a(1).not().and(a(2).not()));
        let GroundSentence::Or(left, _) = &g else {
            panic!("expected a disjunction, got {g:?}");
        };
        let GroundSentence::Or(d1, _) = left.as_ref() else {
            panic!("expected three disjuncts");
        };
        assert_eq!(d1.as_ref(), &first);
        // truth-table oracle: exactly one p holds
        for w in 0u64..8 {
            assert_eq!(g.eval_world(w), w.count_ones() == 1, "world {w}");
        }
        let text = format!("{:?}", g);
        assert!(!text.contains("True") && !text.contains("False"));
    }

    #[test]
    fn free_variable_is_an_error() {
        let v = vocab3();
        let s = Sentence::Atom {
            pred: "q".into(),
            args: vec![Term::Var("x".into())],
        };
        assert!(matches!(ground(&s, &v), Err(LogicError::FreeVariable(_))));
    }

    #[test]
    fn equality_across_domains_is_rejected() {
        let mut v = vocab3();
        v.add_domain("E", vec!["e".into()]).unwrap();
        let s = Sentence::Equals(Term::Const("a".into()), Term::Const("e".into()));
        assert!(matches!(
            ground(&s, &v),
            Err(LogicError::DomainMismatch { .. })
        ));
    }

    #[test]
    fn ground_is_idempotent_on_ground_input() {
        let v = vocab3();
        let s = Sentence::forall(
            "x",
            "D",
            Sentence::Atom {
                pred: "q".into(),
                args: vec![Term::Var("x".into())],
            }
            .or(Sentence::Equals(
                Term::Var("x".into()),
                Term::Const("b".into()),
            )),
        );
        let g = ground(&s, &v).unwrap();
        let again = ground(&g.to_sentence(&v), &v).unwrap();
        assert_eq!(g, again);
        assert_eq!(absorb(&g), g);
    }
}

use std::collections::HashMap;
use std::fmt;

use super::LogicError;

/// A named finite set of constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub name: String,
    pub constants: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Symbol {
    /// Predicate over one or more domains (stored as domain indices).
    Pred {
        name: String,
        args: Vec<usize>,
    },
    Prop {
        name: String,
    },
}

impl Symbol {
    pub fn name(&self) -> &str {
        match self {
            Symbol::Pred { name, .. } | Symbol::Prop { name } => name,
        }
    }
}

/// A predicate applied to constants, or a proposition. `args` holds
/// positions within the respective argument domains.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub symbol: usize,
    pub args: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct ConstRef {
    domain: usize,
    position: usize,
}

/// Declared domains, predicates and propositions.
///
/// Ground atoms are ordered by symbol declaration order, and within a
/// predicate by the lexicographic order of argument tuples (domain constant
/// order, last argument fastest). Atom `i` is bit `i` of a world index.
#[derive(Clone, Debug, Default)]
pub struct Vocabulary {
    domains: Vec<Domain>,
    symbols: Vec<Symbol>,
    constants: HashMap<String, ConstRef>,
    names: HashMap<String, usize>,
    atoms: Vec<GroundAtom>,
    atom_index: HashMap<GroundAtom, usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_domain<S: Into<String>>(
        &mut self,
        name: S,
        constants: Vec<String>,
    ) -> Result<usize, LogicError> {
        let name = name.into();
        if constants.is_empty() {
            return Err(LogicError::EmptyDomain(name));
        }
        self.claim_name(&name)?;
        let idx = self.domains.len();
        for (position, c) in constants.iter().enumerate() {
            if self.constants.contains_key(c) || self.names.contains_key(c) {
                return Err(LogicError::Duplicate(c.clone()));
            }
            self.constants.insert(
                c.clone(),
                ConstRef {
                    domain: idx,
                    position,
                },
            );
        }
        self.domains.push(Domain { name, constants });
        Ok(idx)
    }

    pub fn add_pred<S: Into<String>>(
        &mut self,
        name: S,
        arg_domains: &[&str],
    ) -> Result<usize, LogicError> {
        let name = name.into();
        if arg_domains.is_empty() {
            return Err(LogicError::Syntax {
                line: 0,
                col: 0,
                msg: format!("predicate `{name}` needs at least one argument domain"),
            });
        }
        let args = arg_domains
            .iter()
            .map(|d| {
                self.domain_index(d).ok_or_else(|| LogicError::Undeclared {
                    kind: "domain",
                    name: d.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.claim_name(&name)?;
        self.symbols.push(Symbol::Pred { name, args });
        self.rebuild_atoms();
        Ok(self.symbols.len() - 1)
    }

    pub fn add_prop<S: Into<String>>(&mut self, name: S) -> Result<usize, LogicError> {
        let name = name.into();
        self.claim_name(&name)?;
        self.symbols.push(Symbol::Prop { name });
        self.rebuild_atoms();
        Ok(self.symbols.len() - 1)
    }

    /// Reserve a name in the shared namespace (domains, symbols, constants
    /// and named sentences all live in one namespace).
    pub(crate) fn claim_name(&mut self, name: &str) -> Result<(), LogicError> {
        if self.names.contains_key(name) || self.constants.contains_key(name) {
            return Err(LogicError::Duplicate(name.to_string()));
        }
        self.names.insert(name.to_string(), self.names.len());
        Ok(())
    }

    pub(crate) fn is_name_taken(&self, name: &str) -> bool {
        self.names.contains_key(name) || self.constants.contains_key(name)
    }

    fn rebuild_atoms(&mut self) {
        self.atoms.clear();
        for (s, sym) in self.symbols.iter().enumerate() {
            match sym {
                Symbol::Prop { .. } => self.atoms.push(GroundAtom {
                    symbol: s,
                    args: vec![],
                }),
                Symbol::Pred { args, .. } => {
                    let sizes: Vec<usize> = args
                        .iter()
                        .map(|&d| self.domains[d].constants.len())
                        .collect();
                    let total: usize = sizes.iter().product();
                    for mut code in 0..total {
                        let mut tuple = vec![0usize; sizes.len()];
                        for k in (0..sizes.len()).rev() {
                            tuple[k] = code % sizes[k];
                            code /= sizes[k];
                        }
                        self.atoms.push(GroundAtom {
                            symbol: s,
                            args: tuple,
                        });
                    }
                }
            }
        }
        self.atom_index = self
            .atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn domain_index(&self, name: &str) -> Option<usize> {
        self.domains.iter().position(|d| d.name == name)
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name() == name)
    }

    /// Domain index and position of a constant.
    pub fn constant(&self, name: &str) -> Option<(usize, usize)> {
        self.constants.get(name).map(|c| (c.domain, c.position))
    }

    pub fn atoms(&self) -> &[GroundAtom] {
        &self.atoms
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_index(&self, atom: &GroundAtom) -> Option<usize> {
        self.atom_index.get(atom).copied()
    }

    /// Human-readable name of ground atom `i`, e.g. `q(a)` or `p`.
    pub fn atom_name(&self, i: usize) -> String {
        let atom = &self.atoms[i];
        match &self.symbols[atom.symbol] {
            Symbol::Prop { name } => name.clone(),
            Symbol::Pred { name, args } => {
                let parts: Vec<&str> = args
                    .iter()
                    .zip(&atom.args)
                    .map(|(&d, &p)| self.domains[d].constants[p].as_str())
                    .collect();
                format!("{}({})", name, parts.join(","))
            }
        }
    }

    /// The sentence consisting of ground atom `i` alone.
    pub fn atom_sentence(&self, i: usize) -> Sentence {
        let atom = &self.atoms[i];
        match &self.symbols[atom.symbol] {
            Symbol::Prop { name } => Sentence::Prop(name.clone()),
            Symbol::Pred { name, args } => Sentence::Atom {
                pred: name.clone(),
                args: args
                    .iter()
                    .zip(&atom.args)
                    .map(|(&d, &p)| Term::Const(self.domains[d].constants[p].clone()))
                    .collect(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Const(String),
    Var(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Const(n) | Term::Var(n) => n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Sentence {
    True,
    False,
    Atom {
        pred: String,
        args: Vec<Term>,
    },
    Prop(String),
    Not(Box<Sentence>),
    And(Box<Sentence>, Box<Sentence>),
    Or(Box<Sentence>, Box<Sentence>),
    Implies(Box<Sentence>, Box<Sentence>),
    Iff(Box<Sentence>, Box<Sentence>),
    Equals(Term, Term),
    Forall {
        var: String,
        domain: String,
        body: Box<Sentence>,
    },
    Exists {
        var: String,
        domain: String,
        body: Box<Sentence>,
    },
}

#[allow(clippy::should_implement_trait)]
impl Sentence {
    pub fn atom<P: Into<String>>(pred: P, args: &[&str]) -> Self {
        Sentence::Atom {
            pred: pred.into(),
            args: args.iter().map(|a| Term::Const(a.to_string())).collect(),
        }
    }

    pub fn prop<P: Into<String>>(name: P) -> Self {
        Sentence::Prop(name.into())
    }

    pub fn not(self) -> Self {
        Sentence::Not(Box::new(self))
    }

    pub fn and(self, other: Sentence) -> Self {
        Sentence::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Sentence) -> Self {
        Sentence::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Sentence) -> Self {
        Sentence::Implies(Box::new(self), Box::new(other))
    }

    pub fn iff(self, other: Sentence) -> Self {
        Sentence::Iff(Box::new(self), Box::new(other))
    }

    /// Left-folded conjunction; `True` for an empty iterator.
    pub fn conjunction<I: IntoIterator<Item = Sentence>>(items: I) -> Self {
        items
            .into_iter()
            .reduce(Sentence::and)
            .unwrap_or(Sentence::True)
    }

    /// Left-folded disjunction; `False` for an empty iterator.
    pub fn disjunction<I: IntoIterator<Item = Sentence>>(items: I) -> Self {
        items
            .into_iter()
            .reduce(Sentence::or)
            .unwrap_or(Sentence::False)
    }

    pub fn forall<V: Into<String>, D: Into<String>>(var: V, domain: D, body: Sentence) -> Self {
        Sentence::Forall {
            var: var.into(),
            domain: domain.into(),
            body: Box::new(body),
        }
    }

    pub fn exists<V: Into<String>, D: Into<String>>(var: V, domain: D, body: Sentence) -> Self {
        Sentence::Exists {
            var: var.into(),
            domain: domain.into(),
            body: Box::new(body),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Sentence::Forall { .. } | Sentence::Exists { .. } => 0,
            Sentence::Iff(..) => 1,
            Sentence::Implies(..) => 2,
            Sentence::Or(..) => 3,
            Sentence::And(..) => 4,
            Sentence::Not(..) => 5,
            _ => 6,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let paren = self.precedence() < min_prec;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Sentence::True => f.write_str("true")?,
            Sentence::False => f.write_str("false")?,
            Sentence::Prop(p) => f.write_str(p)?,
            Sentence::Atom { pred, args } => {
                write!(f, "{pred}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(a.name())?;
                }
                f.write_str(")")?;
            }
            Sentence::Equals(a, b) => write!(f, "{} = {}", a.name(), b.name())?,
            Sentence::Not(s) => {
                f.write_str("~")?;
                s.write_at(f, 5)?;
            }
            Sentence::And(a, b) => {
                a.write_at(f, 4)?;
                f.write_str(" & ")?;
                b.write_at(f, 5)?;
            }
            Sentence::Or(a, b) => {
                a.write_at(f, 3)?;
                f.write_str(" | ")?;
                b.write_at(f, 4)?;
            }
            Sentence::Implies(a, b) => {
                a.write_at(f, 3)?;
                f.write_str(" -> ")?;
                b.write_at(f, 2)?;
            }
            Sentence::Iff(a, b) => {
                a.write_at(f, 1)?;
                f.write_str(" <-> ")?;
                b.write_at(f, 2)?;
            }
            Sentence::Forall { var, domain, body } => {
                write!(f, "forall {var}:{domain}. ")?;
                body.write_at(f, 0)?;
            }
            Sentence::Exists { var, domain, body } => {
                write!(f, "exists {var}:{domain}. ")?;
                body.write_at(f, 0)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

/// Quantifier-free sentence over ground atom indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroundSentence {
    True,
    False,
    Atom(usize),
    Not(Box<GroundSentence>),
    And(Box<GroundSentence>, Box<GroundSentence>),
    Or(Box<GroundSentence>, Box<GroundSentence>),
    Implies(Box<GroundSentence>, Box<GroundSentence>),
    Iff(Box<GroundSentence>, Box<GroundSentence>),
}

#[allow(clippy::should_implement_trait)]
impl GroundSentence {
    pub fn not(self) -> Self {
        GroundSentence::Not(Box::new(self))
    }

    pub fn and(self, other: GroundSentence) -> Self {
        GroundSentence::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: GroundSentence) -> Self {
        GroundSentence::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: GroundSentence) -> Self {
        GroundSentence::Implies(Box::new(self), Box::new(other))
    }

    pub fn iff(self, other: GroundSentence) -> Self {
        GroundSentence::Iff(Box::new(self), Box::new(other))
    }

    pub fn conjunction<I: IntoIterator<Item = GroundSentence>>(items: I) -> Self {
        items
            .into_iter()
            .reduce(GroundSentence::and)
            .unwrap_or(GroundSentence::True)
    }

    pub fn disjunction<I: IntoIterator<Item = GroundSentence>>(items: I) -> Self {
        items
            .into_iter()
            .reduce(GroundSentence::or)
            .unwrap_or(GroundSentence::False)
    }

    /// Truth value under an assignment of ground atoms.
    pub fn eval<F: Fn(usize) -> bool + Copy>(&self, assignment: F) -> bool {
        match self {
            GroundSentence::True => true,
            GroundSentence::False => false,
            GroundSentence::Atom(i) => assignment(*i),
            GroundSentence::Not(s) => !s.eval(assignment),
            GroundSentence::And(a, b) => a.eval(assignment) && b.eval(assignment),
            GroundSentence::Or(a, b) => a.eval(assignment) || b.eval(assignment),
            GroundSentence::Implies(a, b) => !a.eval(assignment) || b.eval(assignment),
            GroundSentence::Iff(a, b) => a.eval(assignment) == b.eval(assignment),
        }
    }

    /// Truth value in world `world`, whose bit `i` is atom `i`.
    pub fn eval_world(&self, world: u64) -> bool {
        self.eval(|i| (world >> i) & 1 == 1)
    }

    /// One past the largest atom index mentioned (0 if none).
    pub fn atom_bound(&self) -> usize {
        match self {
            GroundSentence::True | GroundSentence::False => 0,
            GroundSentence::Atom(i) => i + 1,
            GroundSentence::Not(s) => s.atom_bound(),
            GroundSentence::And(a, b)
            | GroundSentence::Or(a, b)
            | GroundSentence::Implies(a, b)
            | GroundSentence::Iff(a, b) => a.atom_bound().max(b.atom_bound()),
        }
    }

    /// Re-embed as a [`Sentence`] over `vocab`.
    pub fn to_sentence(&self, vocab: &Vocabulary) -> Sentence {
        match self {
            GroundSentence::True => Sentence::True,
            GroundSentence::False => Sentence::False,
            GroundSentence::Atom(i) => vocab.atom_sentence(*i),
            GroundSentence::Not(s) => s.to_sentence(vocab).not(),
            GroundSentence::And(a, b) => a.to_sentence(vocab).and(b.to_sentence(vocab)),
            GroundSentence::Or(a, b) => a.to_sentence(vocab).or(b.to_sentence(vocab)),
            GroundSentence::Implies(a, b) => a.to_sentence(vocab).implies(b.to_sentence(vocab)),
            GroundSentence::Iff(a, b) => a.to_sentence(vocab).iff(b.to_sentence(vocab)),
        }
    }
}

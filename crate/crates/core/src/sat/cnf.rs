use std::collections::HashMap;
use std::fmt::Write as _;

use crate::logic::GroundSentence;

use super::SatError;

/// A literal: variable `v` is encoded as `2v` (positive) or `2v + 1`
/// (negated).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: usize, negated: bool) -> Self {
        Lit((var as u32) << 1 | negated as u32)
    }

    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn negate(self) -> Self {
        Lit(self.0 ^ 1)
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        self.negate()
    }
}

/// Clause form of a ground sentence. Variables `0..num_ground` are the ground
/// atoms occurring in the sentence (see [`Cnf::atoms`]); the rest are
/// auxiliary definitions.
#[derive(Clone, Debug, Default)]
pub struct Cnf {
    pub clauses: Vec<Vec<Lit>>,
    pub num_ground: usize,
    pub num_aux: usize,
    /// `atoms[v]` is the ground-atom index of variable `v < num_ground`.
    pub atoms: Vec<usize>,
}

impl Cnf {
    pub fn num_vars(&self) -> usize {
        self.num_ground + self.num_aux
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        for (v, a) in self.atoms.iter().enumerate() {
            let _ = writeln!(out, "c var {} = atom {}", v + 1, a);
        }
        let _ = writeln!(out, "p cnf {} {}", self.num_vars(), self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let v = l.var() as i64 + 1;
                let _ = write!(out, "{} ", if l.is_negated() { -v } else { v });
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Limits on clause-form size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SatLimits {
    pub max_ground: usize,
    pub max_aux: usize,
}

impl Default for SatLimits {
    fn default() -> Self {
        SatLimits {
            max_ground: 64,
            max_aux: 4096,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Polarity {
    Pos,
    Neg,
    Both,
}

impl Polarity {
    fn flip(self) -> Self {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
            Polarity::Both => Polarity::Both,
        }
    }
    fn pos(self) -> bool {
        self != Polarity::Neg
    }
    fn neg(self) -> bool {
        self != Polarity::Pos
    }
}

struct Encoder {
    limits: SatLimits,
    var_of_atom: HashMap<usize, usize>,
    cnf: Cnf,
    aux_defs: Vec<(usize, Vec<Vec<Lit>>)>,
}

/// Polarity-aware definitional transformation: one auxiliary variable per
/// binary connective, with only the implication directions its polarity
/// needs.
pub fn to_cnf(g: &GroundSentence, limits: SatLimits) -> Result<Cnf, SatError> {
    match g {
        GroundSentence::True => return Ok(Cnf::default()),
        GroundSentence::False => {
            return Ok(Cnf {
                clauses: vec![vec![]],
                ..Cnf::default()
            })
        }
        _ => {}
    }
    let mut atoms = Vec::new();
    collect_atoms(g, &mut atoms);
    atoms.sort_unstable();
    atoms.dedup();
    if atoms.len() > limits.max_ground {
        return Err(SatError::TooManyGround {
            found: atoms.len(),
            cap: limits.max_ground,
        });
    }
    let mut enc = Encoder {
        limits,
        var_of_atom: atoms.iter().enumerate().map(|(v, &a)| (a, v)).collect(),
        cnf: Cnf {
            num_ground: atoms.len(),
            atoms,
            ..Cnf::default()
        },
        aux_defs: Vec::new(),
    };
    let root = enc.encode(g, Polarity::Pos)?;
    enc.cnf.clauses.push(vec![root]);
    for (_, defs) in enc.aux_defs.drain(..) {
        enc.cnf.clauses.extend(defs);
    }
    Ok(enc.cnf)
}

fn collect_atoms(g: &GroundSentence, out: &mut Vec<usize>) {
    match g {
        GroundSentence::True | GroundSentence::False => {}
        GroundSentence::Atom(a) => out.push(*a),
        GroundSentence::Not(x) => collect_atoms(x, out),
        GroundSentence::And(a, b)
        | GroundSentence::Or(a, b)
        | GroundSentence::Implies(a, b)
        | GroundSentence::Iff(a, b) => {
            collect_atoms(a, out);
            collect_atoms(b, out);
        }
    }
}

impl Encoder {
    fn fresh(&mut self) -> Result<usize, SatError> {
        if self.cnf.num_aux >= self.limits.max_aux {
            return Err(SatError::TooManyAux {
                cap: self.limits.max_aux,
            });
        }
        let v = self.cnf.num_ground + self.cnf.num_aux;
        self.cnf.num_aux += 1;
        Ok(v)
    }

    /// Constants below the root get a dedicated variable fixed by a unit
    /// clause.
    fn constant(&mut self, value: bool) -> Result<Lit, SatError> {
        let v = self.fresh()?;
        self.cnf.clauses.push(vec![Lit::new(v, !value)]);
        Ok(Lit::new(v, false))
    }

    fn encode(&mut self, g: &GroundSentence, pol: Polarity) -> Result<Lit, SatError> {
        match g {
            GroundSentence::True => self.constant(true),
            GroundSentence::False => self.constant(false),
            GroundSentence::Atom(a) => Ok(Lit::new(self.var_of_atom[a], false)),
            GroundSentence::Not(x) => Ok(!self.encode(x, pol.flip())?),
            GroundSentence::And(a, b) => {
                let la = self.encode(a, pol)?;
                let lb = self.encode(b, pol)?;
                let x = Lit::new(self.fresh()?, false);
                let mut defs = Vec::new();
                if pol.pos() {
                    defs.push(vec![!x, la]);
                    defs.push(vec![!x, lb]);
                }
                if pol.neg() {
                    defs.push(vec![!la, !lb, x]);
                }
                self.aux_defs.push((x.var(), defs));
                Ok(x)
            }
            GroundSentence::Or(a, b) => {
                let la = self.encode(a, pol)?;
                let lb = self.encode(b, pol)?;
                Ok(self.define_or(la, lb, pol)?)
            }
            GroundSentence::Implies(a, b) => {
                let la = self.encode(a, pol.flip())?;
                let lb = self.encode(b, pol)?;
                Ok(self.define_or(!la, lb, pol)?)
            }
            GroundSentence::Iff(a, b) => {
                let la = self.encode(a, Polarity::Both)?;
                let lb = self.encode(b, Polarity::Both)?;
                let x = Lit::new(self.fresh()?, false);
                let mut defs = Vec::new();
                if pol.pos() {
                    defs.push(vec![!x, !la, lb]);
                    defs.push(vec![!x, la, !lb]);
                }
                if pol.neg() {
                    defs.push(vec![x, la, lb]);
                    defs.push(vec![x, !la, !lb]);
                }
                self.aux_defs.push((x.var(), defs));
                Ok(x)
            }
        }
    }

    fn define_or(&mut self, la: Lit, lb: Lit, pol: Polarity) -> Result<Lit, SatError> {
        let x = Lit::new(self.fresh()?, false);
        let mut defs = Vec::new();
        if pol.pos() {
            defs.push(vec![!x, la, lb]);
        }
        if pol.neg() {
            defs.push(vec![!la, x]);
            defs.push(vec![!lb, x]);
        }
        self.aux_defs.push((x.var(), defs));
        Ok(x)
    }
}

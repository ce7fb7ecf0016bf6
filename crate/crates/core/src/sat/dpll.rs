use super::cnf::{Cnf, Lit};

const UNASSIGNED: u8 = 2;

struct Decision {
    trail_len: usize,
    lit: Lit,
    flipped: bool,
}

/// DPLL with unit propagation over two watched literals and chronological
/// backtracking. Single use.
pub struct Solver {
    clauses: Vec<Vec<Lit>>,
    /// `watches[l]`: clauses currently watching literal `l`.
    watches: Vec<Vec<usize>>,
    /// Per variable: 0 = false, 1 = true, 2 = unassigned.
    value: Vec<u8>,
    trail: Vec<Lit>,
    qhead: usize,
    decisions: Vec<Decision>,
    order: Vec<usize>,
    unsat: bool,
}

impl Solver {
    pub fn new(cnf: &Cnf) -> Self {
        let n = cnf.num_vars();
        let mut s = Solver {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            value: vec![UNASSIGNED; n],
            trail: Vec::new(),
            qhead: 0,
            decisions: Vec::new(),
            order: Vec::new(),
            unsat: false,
        };
        let mut occurrences = vec![0usize; n];
        let mut units = Vec::new();
        for clause in &cnf.clauses {
            let mut c = clause.clone();
            c.sort_unstable();
            c.dedup();
            if c.windows(2).any(|w| w[0].var() == w[1].var()) {
                // tautology
                continue;
            }
            for l in &c {
                occurrences[l.var()] += 1;
            }
            match c.len() {
                0 => s.unsat = true,
                1 => units.push(c[0]),
                _ => {
                    let idx = s.clauses.len();
                    s.watches[c[0].code()].push(idx);
                    s.watches[c[1].code()].push(idx);
                    s.clauses.push(c);
                }
            }
        }
        s.order = (0..n).collect();
        s.order
            .sort_by(|&a, &b| occurrences[b].cmp(&occurrences[a]).then(a.cmp(&b)));
        for u in units {
            if !s.enqueue(u) {
                s.unsat = true;
            }
        }
        s
    }

    fn lit_value(&self, l: Lit) -> u8 {
        let v = self.value[l.var()];
        if v == UNASSIGNED {
            UNASSIGNED
        } else {
            v ^ l.is_negated() as u8
        }
    }

    /// Make `l` true. Returns false if it is already false.
    fn enqueue(&mut self, l: Lit) -> bool {
        match self.lit_value(l) {
            1 => true,
            0 => false,
            _ => {
                self.value[l.var()] = !l.is_negated() as u8;
                self.trail.push(l);
                true
            }
        }
    }

    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let falsified = !self.trail[self.qhead];
            self.qhead += 1;
            let mut watching = std::mem::take(&mut self.watches[falsified.code()]);
            let mut i = 0;
            let mut conflict = false;
            while i < watching.len() {
                let ci = watching[i];
                let clause = &mut self.clauses[ci];
                if clause[0] == falsified {
                    clause.swap(0, 1);
                }
                let other = clause[0];
                let other_val = {
                    let v = self.value[other.var()];
                    if v == UNASSIGNED {
                        UNASSIGNED
                    } else {
                        v ^ other.is_negated() as u8
                    }
                };
                if other_val == 1 {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let l = clause[k];
                    let v = self.value[l.var()];
                    let lv = if v == UNASSIGNED {
                        UNASSIGNED
                    } else {
                        v ^ l.is_negated() as u8
                    };
                    if lv != 0 {
                        clause.swap(1, k);
                        let new_watch = clause[1];
                        self.watches[new_watch.code()].push(ci);
                        watching.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if other_val == 0 {
                    conflict = true;
                    break;
                }
                self.enqueue(other);
                i += 1;
            }
            self.watches[falsified.code()] = watching;
            if conflict {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let l = self.trail.pop().unwrap();
            self.value[l.var()] = UNASSIGNED;
        }
        self.qhead = self.trail.len();
    }

    /// Full assignment to all variables if satisfiable.
    pub fn solve(mut self) -> Option<Vec<bool>> {
        if self.unsat {
            return None;
        }
        let mut next = 0usize;
        loop {
            if !self.propagate() {
                // backtrack to the most recent unflipped decision
                loop {
                    let mut d = self.decisions.pop()?;
                    if d.flipped {
                        continue;
                    }
                    self.undo_to(d.trail_len);
                    d.flipped = true;
                    d.lit = !d.lit;
                    let lit = d.lit;
                    self.decisions.push(d);
                    self.enqueue(lit);
                    next = 0;
                    break;
                }
                continue;
            }
            while next < self.order.len() && self.value[self.order[next]] != UNASSIGNED {
                next += 1;
            }
            if next == self.order.len() {
                return Some(self.value.iter().map(|&v| v == 1).collect());
            }
            let lit = Lit::new(self.order[next], true);
            self.decisions.push(Decision {
                trail_len: self.trail.len(),
                lit,
                flipped: false,
            });
            self.enqueue(lit);
        }
    }
}

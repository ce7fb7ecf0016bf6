//! Reader for `.plog` knowledge bases.
//!
//! One statement per line; a line starting with whitespace continues the
//! previous statement. `#` starts a comment.
//!
//! ```text
//! domain Door = { d1, d2, d3 }
//! pred prize : Door
//! prop rain
//! sentence one_prize := exists d:Door. prize(d) & forall x:Door. (prize(x) -> x = d)
//! believe one_prize = 1
//! believe rain | prize(d1) = 3/4
//! ```

use std::sync::Arc;

use super::constraints::ConstraintSet;
use super::ground::ground;
use super::syntax::{Sentence, Symbol, Term, Vocabulary};
use super::LogicError;

#[derive(Clone, Debug)]
pub struct NamedSentence {
    pub name: String,
    pub sentence: Sentence,
}

/// A parsed knowledge base.
#[derive(Clone, Debug)]
pub struct Program {
    pub vocabulary: Arc<Vocabulary>,
    pub sentences: Vec<NamedSentence>,
    pub constraints: ConstraintSet,
}

impl Program {
    pub fn sentence(&self, name: &str) -> Option<&Sentence> {
        self.sentences
            .iter()
            .find(|s| s.name == name)
            .map(|s| &s.sentence)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Define,
    Dot,
    Not,
    And,
    Or,
    Arrow,
    DoubleArrow,
    Eq,
    Slash,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex_line(text: &str, line: usize, out: &mut Vec<Token>) -> Result<(), LogicError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (off, c) = chars[i];
        let col = text[..off].chars().count() + 1;
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line, col });
        match c {
            '#' => break,
            c if c.is_whitespace() => {}
            '(' => push(out, Tok::LParen),
            ')' => push(out, Tok::RParen),
            '{' => push(out, Tok::LBrace),
            '}' => push(out, Tok::RBrace),
            ',' => push(out, Tok::Comma),
            '.' => push(out, Tok::Dot),
            '~' => push(out, Tok::Not),
            '&' => push(out, Tok::And),
            '|' => push(out, Tok::Or),
            '=' => push(out, Tok::Eq),
            '/' => push(out, Tok::Slash),
            ':' => {
                if chars.get(i + 1).map(|p| p.1) == Some('=') {
                    i += 1;
                    push(out, Tok::Define);
                } else {
                    push(out, Tok::Colon);
                }
            }
            '-' if chars.get(i + 1).map(|p| p.1) == Some('>') => {
                i += 1;
                push(out, Tok::Arrow);
            }
            '<' if chars.get(i + 1).map(|p| p.1) == Some('-')
                && chars.get(i + 2).map(|p| p.1) == Some('>') =>
            {
                i += 2;
                push(out, Tok::DoubleArrow);
            }
            c if is_word_char(c) => {
                let start = off;
                let mut j = i;
                while j < chars.len() && is_word_char(chars[j].1) {
                    j += 1;
                }
                let end = chars.get(j).map(|p| p.0).unwrap_or(text.len());
                push(out, Tok::Ident(text[start..end].to_string()));
                i = j;
                continue;
            }
            other => {
                return Err(LogicError::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
    }
    Ok(())
}

const KEYWORDS: &[&str] = &[
    "domain", "pred", "prop", "sentence", "believe", "forall", "exists", "true", "false", "True",
    "False",
];

struct Statement<'a> {
    /// (line number, raw text) of each physical line.
    lines: Vec<(usize, &'a str)>,
    tokens: Vec<Token>,
}

fn split_statements(text: &str) -> Result<Vec<Statement<'_>>, LogicError> {
    let mut out: Vec<Statement<'_>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut toks = Vec::new();
        lex_line(raw, line, &mut toks)?;
        if toks.is_empty() {
            continue;
        }
        let continues = raw.starts_with(char::is_whitespace);
        if continues && !out.is_empty() {
            let st = out.last_mut().unwrap();
            st.lines.push((line, raw));
            st.tokens.extend(toks);
        } else {
            out.push(Statement {
                lines: vec![(line, raw)],
                tokens: toks,
            });
        }
    }
    Ok(out)
}

/// Parse a decimal (`0.25`) or fraction (`1/4`) probability value.
pub fn parse_number(text: &str) -> Option<f64> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: u64 = p.trim().parse().ok()?;
        let q: u64 = q.trim().parse().ok()?;
        if q == 0 {
            return None;
        }
        return Some(p as f64 / q as f64);
    }
    if t.is_empty() || !t.chars().all(|c| c.is_ascii_digit() || c == '.') {
        return None;
    }
    t.parse::<f64>().ok()
}

struct Parser<'v> {
    tokens: Vec<Token>,
    pos: usize,
    vocab: &'v Vocabulary,
    named: &'v [NamedSentence],
    scope: Vec<String>,
    end: (usize, usize),
}

impl<'v> Parser<'v> {
    fn new(tokens: Vec<Token>, vocab: &'v Vocabulary, named: &'v [NamedSentence]) -> Self {
        let end = tokens.last().map(|t| (t.line, t.col + 1)).unwrap_or((0, 0));
        Parser {
            tokens,
            pos: 0,
            vocab,
            named,
            scope: Vec::new(),
            end,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + k).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, LogicError> {
        let (line, col) = self.here();
        Err(LogicError::Syntax {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), LogicError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, LogicError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn done(&self) -> Result<(), LogicError> {
        if self.pos < self.tokens.len() {
            self.err("unexpected trailing input")
        } else {
            Ok(())
        }
    }

    fn formula(&mut self) -> Result<Sentence, LogicError> {
        if self.at_quantifier() {
            return self.quantifier();
        }
        self.iff()
    }

    fn at_quantifier(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(k)) if k == "forall" || k == "exists")
    }

    fn quantifier(&mut self) -> Result<Sentence, LogicError> {
        let universal = matches!(self.peek(), Some(Tok::Ident(k)) if k == "forall");
        self.pos += 1;
        let var = self.ident("variable name")?;
        self.expect(Tok::Colon, "`:` after quantified variable")?;
        let (line, col) = self.here();
        let domain = self.ident("domain name")?;
        if self.vocab.domain_index(&domain).is_none() {
            return Err(LogicError::Syntax {
                line,
                col,
                msg: format!("undeclared domain `{domain}`"),
            });
        }
        self.expect(Tok::Dot, "`.` after quantifier prefix")?;
        self.scope.push(var.clone());
        let body = self.formula();
        self.scope.pop();
        let body = Box::new(body?);
        Ok(if universal {
            Sentence::Forall { var, domain, body }
        } else {
            Sentence::Exists { var, domain, body }
        })
    }

    fn iff(&mut self) -> Result<Sentence, LogicError> {
        let mut lhs = self.implication()?;
        while self.peek() == Some(&Tok::DoubleArrow) {
            self.pos += 1;
            let rhs = self.implication()?;
            lhs = lhs.iff(rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Sentence, LogicError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = if self.at_quantifier() {
                self.quantifier()?
            } else {
                self.implication()?
            };
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Sentence, LogicError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let rhs = self.conjunction()?;
            lhs = lhs.or(rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Sentence, LogicError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = lhs.and(rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Sentence, LogicError> {
        if self.peek() == Some(&Tok::Not) {
            self.pos += 1;
            return Ok(self.unary()?.not());
        }
        if self.at_quantifier() {
            return self.quantifier();
        }
        self.primary()
    }

    fn term(&mut self) -> Result<Term, LogicError> {
        let (line, col) = self.here();
        let name = self.ident("term")?;
        if self.scope.contains(&name) {
            Ok(Term::Var(name))
        } else if self.vocab.constant(&name).is_some() {
            Ok(Term::Const(name))
        } else {
            Err(LogicError::Syntax {
                line,
                col,
                msg: format!("`{name}` is neither a bound variable nor a declared constant"),
            })
        }
    }

    fn primary(&mut self) -> Result<Sentence, LogicError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(k)) if k == "true" || k == "True" => {
                self.pos += 1;
                Ok(Sentence::True)
            }
            Some(Tok::Ident(k)) if k == "false" || k == "False" => {
                self.pos += 1;
                Ok(Sentence::False)
            }
            Some(Tok::Ident(_)) => {
                if self.peek_at(1) == Some(&Tok::Eq) {
                    let a = self.term()?;
                    self.pos += 1;
                    let b = self.term()?;
                    return Ok(Sentence::Equals(a, b));
                }
                let (line, col) = self.here();
                let name = self.ident("formula")?;
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    let mut args = vec![self.term()?];
                    while self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                        args.push(self.term()?);
                    }
                    self.expect(Tok::RParen, "`)` closing argument list")?;
                    match self
                        .vocab
                        .symbol_index(&name)
                        .map(|i| &self.vocab.symbols()[i])
                    {
                        Some(Symbol::Pred { .. }) => Ok(Sentence::Atom { pred: name, args }),
                        _ => Err(LogicError::Syntax {
                            line,
                            col,
                            msg: format!("undeclared predicate `{name}`"),
                        }),
                    }
                } else if self.scope.contains(&name) {
                    Err(LogicError::Syntax {
                        line,
                        col,
                        msg: format!("variable `{name}` used as a formula"),
                    })
                } else if let Some(ns) = self.named.iter().find(|n| n.name == name) {
                    Ok(ns.sentence.clone())
                } else {
                    match self
                        .vocab
                        .symbol_index(&name)
                        .map(|i| &self.vocab.symbols()[i])
                    {
                        Some(Symbol::Prop { .. }) => Ok(Sentence::Prop(name)),
                        Some(Symbol::Pred { .. }) => Err(LogicError::Syntax {
                            line,
                            col,
                            msg: format!("predicate `{name}` needs arguments"),
                        }),
                        None => Err(LogicError::Syntax {
                            line,
                            col,
                            msg: format!("undeclared name `{name}`"),
                        }),
                    }
                }
            }
            _ => self.err("expected a formula"),
        }
    }
}

/// Parse a single formula against an existing vocabulary and set of named
/// sentences (used by queries).
pub fn parse_formula(
    text: &str,
    vocab: &Vocabulary,
    named: &[NamedSentence],
) -> Result<Sentence, LogicError> {
    let mut tokens = Vec::new();
    for (i, line) in text.lines().enumerate() {
        lex_line(line, i + 1, &mut tokens)?;
    }
    let mut p = Parser::new(tokens, vocab, named);
    let s = p.formula()?;
    p.done()?;
    ground(&s, vocab)?;
    Ok(s)
}

/// Parse a complete knowledge base.
pub fn parse_program(text: &str) -> Result<Program, LogicError> {
    let mut vocab = Vocabulary::new();
    let mut named: Vec<NamedSentence> = Vec::new();
    // (label, sentence, target, line)
    let mut beliefs: Vec<(String, Sentence, f64, usize)> = Vec::new();

    for st in split_statements(text)? {
        let first_line = st.lines[0].0;
        let keyword = match &st.tokens[0].tok {
            Tok::Ident(k) => k.clone(),
            _ => {
                return Err(LogicError::Syntax {
                    line: first_line,
                    col: st.tokens[0].col,
                    msg: "expected a statement keyword".into(),
                })
            }
        };
        let at_line = |e: LogicError| match e {
            e @ LogicError::Syntax { .. } => e,
            e => LogicError::InLine {
                line: first_line,
                inner: Box::new(e),
            },
        };
        match keyword.as_str() {
            "domain" => {
                let mut p = Parser::new(st.tokens[1..].to_vec(), &vocab, &named);
                let name = p.ident("domain name")?;
                p.expect(Tok::Eq, "`=`")?;
                p.expect(Tok::LBrace, "`{`")?;
                let mut consts = vec![p.ident("constant")?];
                while p.peek() == Some(&Tok::Comma) {
                    p.pos += 1;
                    consts.push(p.ident("constant")?);
                }
                p.expect(Tok::RBrace, "`}`")?;
                p.done()?;
                for (i, c) in consts.iter().enumerate() {
                    if consts[..i].contains(c) {
                        return Err(at_line(LogicError::Duplicate(c.clone())));
                    }
                }
                vocab.add_domain(name, consts).map_err(at_line)?;
            }
            "pred" => {
                let mut p = Parser::new(st.tokens[1..].to_vec(), &vocab, &named);
                let name = p.ident("predicate name")?;
                p.expect(Tok::Colon, "`:`")?;
                let mut doms = vec![p.ident("domain name")?];
                while p.peek() == Some(&Tok::Comma) {
                    p.pos += 1;
                    doms.push(p.ident("domain name")?);
                }
                p.done()?;
                let refs: Vec<&str> = doms.iter().map(String::as_str).collect();
                vocab.add_pred(name, &refs).map_err(at_line)?;
            }
            "prop" => {
                let mut p = Parser::new(st.tokens[1..].to_vec(), &vocab, &named);
                let name = p.ident("proposition name")?;
                p.done()?;
                vocab.add_prop(name).map_err(at_line)?;
            }
            "sentence" => {
                let (name, body) = {
                    let mut p = Parser::new(st.tokens[1..].to_vec(), &vocab, &named);
                    let name = p.ident("sentence name")?;
                    p.expect(Tok::Define, "`:=`")?;
                    let body = p.formula()?;
                    p.done()?;
                    (name, body)
                };
                if vocab.is_name_taken(&name) {
                    return Err(at_line(LogicError::Duplicate(name)));
                }
                ground(&body, &vocab).map_err(at_line)?;
                vocab.claim_name(&name).map_err(at_line)?;
                named.push(NamedSentence {
                    name,
                    sentence: body,
                });
            }
            "believe" => {
                let Some(eq_idx) = st.tokens.iter().rposition(|t| t.tok == Tok::Eq) else {
                    return Err(LogicError::Syntax {
                        line: first_line,
                        col: st.tokens.last().map(|t| t.col + 1).unwrap_or(1),
                        msg: "expected `= <number>`".into(),
                    });
                };
                let eq = &st.tokens[eq_idx];
                let raw = st
                    .lines
                    .iter()
                    .find(|(l, _)| *l == eq.line)
                    .map(|(_, r)| *r)
                    .unwrap_or("");
                let after: String = raw.chars().skip(eq.col).collect();
                let after = after.split('#').next().unwrap_or("").trim().to_string();
                let value = parse_number(&after).ok_or_else(|| LogicError::Syntax {
                    line: eq.line,
                    col: eq.col + 1,
                    msg: format!("expected a decimal or p/q number, found `{after}`"),
                })?;
                if !(0.0..=1.0).contains(&value) {
                    return Err(LogicError::BeliefRange {
                        line: eq.line,
                        value: after,
                    });
                }
                let lhs_tokens = st.tokens[1..eq_idx].to_vec();
                let label = label_of(&st, &lhs_tokens);
                let mut p = Parser::new(lhs_tokens, &vocab, &named);
                let s = p.formula()?;
                p.done()?;
                ground(&s, &vocab).map_err(at_line)?;
                beliefs.push((label, s, value, first_line));
            }
            other => {
                return Err(LogicError::Syntax {
                    line: first_line,
                    col: st.tokens[0].col,
                    msg: format!("unknown statement `{other}`"),
                })
            }
        }
    }

    let vocabulary = Arc::new(vocab);
    let mut constraints = ConstraintSet::new(vocabulary.clone());
    for (label, s, value, line) in beliefs {
        constraints
            .push(label, s, value)
            .map_err(|e| LogicError::InLine {
                line,
                inner: Box::new(e),
            })?;
    }
    Ok(Program {
        vocabulary,
        sentences: named,
        constraints,
    })
}

/// Source text of the tokens, used as the label of inline `believe` formulas.
fn label_of(st: &Statement<'_>, toks: &[Token]) -> String {
    let (Some(first), Some(last)) = (toks.first(), toks.last()) else {
        return String::new();
    };
    let mut parts = Vec::new();
    for (line, raw) in &st.lines {
        if *line < first.line || *line > last.line {
            continue;
        }
        let chars: Vec<char> = raw.chars().collect();
        let from = if *line == first.line {
            first.col - 1
        } else {
            0
        };
        let to = if *line == last.line {
            // last token ends before the `=`; trim at the next `=`
            let rest: String = chars[last.col - 1..].iter().collect();
            let cut = rest.find('=').unwrap_or(rest.len());
            last.col - 1 + rest[..cut].chars().count()
        } else {
            chars.len()
        };
        parts.push(
            chars[from..to]
                .iter()
                .collect::<String>()
                .trim()
                .to_string(),
        );
    }
    parts.join(" ")
}

//! Canned examples: Monty Hall, black ravens, and naive black ravens.

use std::fmt::Write as _;

use crate::belief::Belief;
use crate::induct::SequencePrior;
use crate::logic::{parse_formula, parse_program, Program};
use crate::maxent::{self, Projection};
use crate::worlds::WorldSpace;
use crate::Error;

pub const MONTY_HALL_KB: &str = include_str!("../kb/monty-hall.plog");
pub const RAVENS_KB: &str = include_str!("../kb/ravens.plog");

pub const EXAMPLES: [&str; 3] = ["monty-hall", "ravens", "naive-ravens"];

/// Parse a knowledge base, project the uniform prior onto its beliefs.
pub fn extend_uniform(program: &Program) -> Result<Projection, Error> {
    let space = WorldSpace::new(program.vocabulary.clone())?;
    Ok(maxent::project(
        &Belief::uniform(space),
        &program.constraints,
    )?)
}

fn prob(program: &Program, belief: &Belief, formula: &str) -> Result<f64, Error> {
    let s = parse_formula(formula, &program.vocabulary, &program.sentences)?;
    Ok(belief.prob(&s)?)
}

fn cond(program: &Program, belief: &Belief, formula: &str, given: &str) -> Result<f64, Error> {
    let s = parse_formula(formula, &program.vocabulary, &program.sentences)?;
    let g = parse_formula(given, &program.vocabulary, &program.sentences)?;
    Ok(belief.cond(&s, &g)?)
}

#[derive(Clone, Debug)]
pub struct MontyHall {
    /// Probability that the door not first selected (and not opened) hides
    /// the prize.
    pub switch_wins: f64,
    pub stay_wins: f64,
    /// `P(prize behind d2 | first selection d1, host opens d3)`.
    pub switch_given: f64,
    /// `P(prize behind d1 | first selection d1, host opens d3)`.
    pub stay_given: f64,
    pub projection: Projection,
}

pub fn monty_hall() -> Result<MontyHall, Error> {
    let program = parse_program(MONTY_HALL_KB)?;
    let projection = extend_uniform(&program)?;
    let b = &projection.belief;
    let seen = "playerFirstSelection(d1) & hostSelection(d3)";
    Ok(MontyHall {
        switch_wins: prob(&program, b, "~phi9")?,
        stay_wins: prob(&program, b, "phi9")?,
        switch_given: cond(&program, b, "prizeDoor(d2)", seen)?,
        stay_given: cond(&program, b, "prizeDoor(d1)", seen)?,
        projection,
    })
}

fn monty_hall_text() -> Result<String, Error> {
    let r = monty_hall()?;
    let mut out = String::new();
    let _ = writeln!(out, "Monty Hall");
    let _ = writeln!(
        out,
        "Three doors hide one prize. The player selects a door, the host opens another\n\
         door that hides nothing, and the player may switch to the remaining door.\n\
         Knowledge base: uniqueness of prize, selection and host door, and the host's\n\
         rule, all certain; prize and first selection symmetric and uncorrelated.\n\
         Prior: uniform over the {} worlds of {} ground atoms.",
        r.projection.belief.space().world_count(),
        r.projection.belief.space().num_atoms()
    );
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "P(win by switching)                 = {:.12}",
        r.switch_wins
    );
    let _ = writeln!(
        out,
        "P(win by staying)                   = {:.12}",
        r.stay_wins
    );
    let _ = writeln!(
        out,
        "P(prize d2 | selected d1, opened d3) = {:.12}",
        r.switch_given
    );
    let _ = writeln!(
        out,
        "P(prize d1 | selected d1, opened d3) = {:.12}",
        r.stay_given
    );
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "Switching wins with probability 2/3: the host's choice is forced whenever the\n\
         first selection missed the prize."
    );
    Ok(out)
}

fn ravens_text(n_max: u64) -> Result<String, Error> {
    let mut out = String::new();
    let _ = writeln!(out, "Black ravens");
    let program = parse_program(RAVENS_KB)?;
    let projection = extend_uniform(&program)?;
    let b = &projection.belief;
    let _ = writeln!(
        out,
        "Finite knowledge base: 10 ravens, B(1)..B(5) certain, uniform prior over worlds."
    );
    for f in ["B(1) & B(2)", "B(6)", "all_black", "some_white"] {
        let label = format!("P({f})");
        let _ = writeln!(out, "  {label:<15} = {:.12}", prob(&program, b, f)?);
    }
    let _ = writeln!(
        out,
        "Certain evidence makes its consequences certain, but the uniform prior learns\n\
         nothing about unobserved ravens."
    );
    let _ = writeln!(out);
    let prior = SequencePrior::ravens();
    let _ = writeln!(
        out,
        "Sequence prior {prior}: mass 1/2 on all ravens black, 1/2 on fair coin flips."
    );
    let _ = writeln!(out, "   n  P(all black | B(1..n))  P(B(n+1) | B(1..n))");
    for n in (0..=n_max).filter(|n| n % 5 == 0 || *n < 5) {
        let _ = writeln!(
            out,
            "{n:>4}  {:.12}          {:.12}",
            prior.posterior_universal(n)?,
            prior.predictive(n)?
        );
    }
    let _ = writeln!(
        out,
        "The posterior of the universal hypothesis approaches 1 as black ravens accumulate."
    );
    Ok(out)
}

fn naive_ravens_text(n_max: u64) -> Result<String, Error> {
    let mut out = String::new();
    let prior = SequencePrior::naive();
    let _ = writeln!(out, "Naive black ravens");
    let _ = writeln!(
        out,
        "Uniform tree prior: every B(i) an independent fair coin, alpha(n,S) = 2^-n."
    );
    let _ = writeln!(
        out,
        "   n  P(B(n+1) | B(1..n))  bound on P(all black | B(1..n)) via m = n+20"
    );
    for n in (0..=n_max).filter(|n| n % 5 == 0 || *n < 5) {
        let bound = prior.prefix_prob(n + 20) / prior.prefix_prob(n);
        let _ = writeln!(
            out,
            "{n:>4}  {:.12}       {:.12e}",
            prior.predictive(n)?,
            bound
        );
    }
    let _ = writeln!(out, "P(all black) = {:.12}", prior.universal_prob());
    let _ = writeln!(
        out,
        "The predictive stays at 1/2 and the universal hypothesis can never be confirmed."
    );
    Ok(out)
}

/// Run a canned example by name and return its report.
pub fn run_example(name: &str) -> Result<String, Error> {
    match name {
        "monty-hall" => monty_hall_text(),
        "ravens" => ravens_text(40),
        "naive-ravens" => naive_ravens_text(30),
        other => Err(Error::Input(format!(
            "unknown example `{other}` (expected one of {})",
            EXAMPLES.join(", ")
        ))),
    }
}

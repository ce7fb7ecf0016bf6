//! `plog`: check, extend and query probabilities on sentences.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use plog_core::belief::Belief;
use plog_core::extend::{
    check_eligible, check_subadditive, extend_feasible, extend_or_explain_with, is_hierarchical,
    Extension, Feasibility,
};
use plog_core::induct::SequencePrior;
use plog_core::logic::{parse_formula, parse_program, Program};
use plog_core::maxent::{ProjectConfig, Projection};
use plog_core::sat::SatOracle;
use plog_core::scenarios::run_example;
use plog_core::worlds::{world_cap_from_env, WorldSpace, HARD_WORLD_CAP};
use plog_core::{Error, EXIT_INFEASIBLE, EXIT_OK};

#[derive(Parser, Debug)]
#[command(
    name = "plog",
    version,
    about = "Probabilities on sentences of a finite first-order language"
)]
struct Cli {
    /// Largest number of ground atoms (worlds = 2^atoms). Overrides PLOG_WORLD_CAP.
    #[arg(long, global = true, value_name = "ATOMS")]
    world_cap: Option<usize>,

    /// Write every SAT query in DIMACS form to this directory.
    #[arg(long, global = true, value_name = "DIR")]
    dimacs_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report structural findings and whether the beliefs extend to a probability.
    Check { kb: PathBuf },
    /// Probability of a formula under the extended belief.
    Query {
        kb: PathBuf,
        formula: String,
        /// Condition on this formula.
        #[arg(long)]
        given: Option<String>,
        #[command(flatten)]
        opts: ExtendOpts,
    },
    /// Print the extended belief as a weight table.
    Extend {
        kb: PathBuf,
        #[command(flatten)]
        opts: ExtendOpts,
        /// Print multipliers, block masses and divergence instead of the table.
        #[arg(long)]
        report: bool,
    },
    /// Convergence table for a sequence mixture prior, as CSV.
    Confirm {
        /// Mixture such as `alltrue:0.5,iid:0.5@0.5`.
        #[arg(long)]
        mixture: String,
        /// Largest prefix length.
        #[arg(long, default_value_t = 20)]
        n: u64,
    },
    /// Run a canned example: monty-hall, ravens or naive-ravens.
    Example { name: String },
}

#[derive(clap::Args, Debug)]
struct ExtendOpts {
    /// Prior belief table; uniform over worlds if omitted.
    #[arg(long, value_name = "FILE")]
    prior: Option<PathBuf>,
    /// Largest acceptable constraint residual of the projection.
    #[arg(long, value_name = "TOL")]
    tolerance: Option<f64>,
    /// Iteration limit of the projection.
    #[arg(long, value_name = "N")]
    max_iterations: Option<usize>,
}

impl ExtendOpts {
    fn config(&self) -> Result<ProjectConfig, Error> {
        let mut cfg = ProjectConfig::default();
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Input(format!("tolerance must be positive, got {t}")));
            }
            cfg.tolerance = t;
            cfg.target = cfg.target.min(t);
        }
        if let Some(n) = self.max_iterations {
            if n == 0 {
                return Err(Error::Input("max-iterations must be positive".into()));
            }
            cfg.max_iterations = n;
        }
        Ok(cfg)
    }
}

struct Context {
    cap: usize,
    oracle: SatOracle,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self, Error> {
        let cap = match cli.world_cap {
            Some(cap) if cap > HARD_WORLD_CAP => {
                return Err(plog_core::worlds::WorldsError::CapTooLarge(cap).into())
            }
            Some(cap) => cap,
            None => world_cap_from_env()?,
        };
        let mut oracle = SatOracle::default();
        if let Some(dir) = &cli.dimacs_dir {
            std::fs::create_dir_all(dir)
                .map_err(|e| Error::Input(format!("cannot create {}: {e}", dir.display())))?;
            oracle = oracle.with_dimacs_dump(dir.clone());
        }
        Ok(Context { cap, oracle })
    }

    fn space(&self, program: &Program) -> Result<Arc<WorldSpace>, Error> {
        Ok(WorldSpace::with_cap(program.vocabulary.clone(), self.cap)?)
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Program, Error> {
    Ok(parse_program(&read(path)?)?)
}

fn prior(space: Arc<WorldSpace>, file: Option<&Path>) -> Result<Belief, Error> {
    match file {
        None => Ok(Belief::uniform(space)),
        Some(path) => Ok(Belief::from_table(space, &read(path)?)?),
    }
}

fn check(ctx: &Context, kb: &Path) -> Result<i32, Error> {
    let program = load(kb)?;
    let c = &program.constraints;
    let space = ctx.space(&program)?;

    let subadd = check_subadditive(c, &ctx.oracle)?;
    let lines = subadd.lines(c);
    if subadd.is_clean() {
        println!("SUBADD: ok ({} disjoint families)", subadd.families_checked);
    }
    for line in lines {
        println!("{line}");
    }
    let elig = check_eligible(c, &ctx.oracle)?;
    if elig.is_empty() {
        println!("ELIG: ok");
    }
    for v in &elig {
        println!("{}", v.render(c));
    }
    println!("{}", is_hierarchical(c, &ctx.oracle)?.line());

    match extend_feasible(c, &space)? {
        Feasibility::Feasible(w) => {
            println!(
                "LP-FEASIBLE: {} constraints over {} satisfiable blocks (residual {:.1e})",
                c.len(),
                w.partition.blocks().len(),
                w.residual
            );
            Ok(EXIT_OK)
        }
        Feasibility::Infeasible(inf) => {
            println!("{}", inf.line(c));
            Ok(EXIT_INFEASIBLE)
        }
    }
}

/// Extend the knowledge base, or print the diagnostic and return the exit status.
fn extend(
    ctx: &Context,
    program: &Program,
    opts: &ExtendOpts,
) -> Result<Result<Projection, i32>, Error> {
    let space = ctx.space(program)?;
    let prior = prior(space, opts.prior.as_deref())?;
    let c = &program.constraints;
    match extend_or_explain_with(c, &prior, &ctx.oracle, &opts.config()?)? {
        Extension::Extended(p) => Ok(Ok(*p)),
        Extension::Explained(d) => {
            for line in d.lines(c) {
                eprintln!("{line}");
            }
            Ok(Err(EXIT_INFEASIBLE))
        }
    }
}

fn query(
    ctx: &Context,
    kb: &Path,
    formula: &str,
    given: Option<&str>,
    opts: &ExtendOpts,
) -> Result<i32, Error> {
    let program = load(kb)?;
    let phi = parse_formula(formula, &program.vocabulary, &program.sentences)?;
    let psi = given
        .map(|g| parse_formula(g, &program.vocabulary, &program.sentences))
        .transpose()?;
    let projection = match extend(ctx, &program, opts)? {
        Ok(p) => p,
        Err(code) => return Ok(code),
    };
    let b = &projection.belief;
    let value = match &psi {
        Some(psi) => b.cond(&phi, psi)?,
        None => b.prob(&phi)?,
    };
    println!("{value:.12}");
    Ok(EXIT_OK)
}

fn extend_cmd(ctx: &Context, kb: &Path, opts: &ExtendOpts, report: bool) -> Result<i32, Error> {
    let program = load(kb)?;
    let projection = match extend(ctx, &program, opts)? {
        Ok(p) => p,
        Err(code) => return Ok(code),
    };
    if report {
        print!("{}", projection.report(&program.constraints));
    } else {
        print!("{}", projection.belief.to_table());
    }
    Ok(EXIT_OK)
}

fn run(cli: &Cli) -> Result<i32, Error> {
    match &cli.command {
        Command::Check { kb } => check(&Context::new(cli)?, kb),
        Command::Query {
            kb,
            formula,
            given,
            opts,
        } => query(&Context::new(cli)?, kb, formula, given.as_deref(), opts),
        Command::Extend { kb, opts, report } => extend_cmd(&Context::new(cli)?, kb, opts, *report),
        Command::Confirm { mixture, n } => {
            let prior = SequencePrior::parse(mixture)?;
            print!("{}", prior.convergence_csv(*n));
            Ok(EXIT_OK)
        }
        Command::Example { name } => {
            print!("{}", run_example(name)?);
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = run(&cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}

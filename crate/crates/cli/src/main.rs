//! Command-line front end: enumerate catalogs of number-conserving
//! rules, decide single rules with certificates, verify by brute force,
//! and run trajectories.
//!
//! Exit codes: 0 success or pass, 1 "not conserving" or verification
//! fail, 2 usage or parse error, 3 exhaustive budget refusal.

mod record;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ncca_core::engine::{
    decide_number_conservation, enumerate_ncca_by_split, NcVerdict, NcWitness,
};
use ncca_core::harness::{run_trajectory, Verifier, DEFAULT_BUDGET};
use ncca_core::lattice::GridGeometry;
use ncca_core::localfn::{from_wolfram_code, Configuration, LocalFunction};
use ncca_core::neighborhood::StateSet;
use record::RuleRecord;
use serde::Deserialize;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ncca",
    version,
    about = "Exact enumeration and verification of number-conserving cellular automata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all number-conserving rules for a dimension and state
    /// count, as one JSON record per line.
    Enumerate {
        /// Grid dimension (1 to 4).
        #[arg(long)]
        dim: usize,
        /// Maximum state: the state set is {0, ..., qstar}.
        #[arg(long)]
        qstar: i64,
        /// Also print the number of rules found per split function.
        #[arg(long)]
        per_split: bool,
        /// Also print symmetry-orbit counts for splits and rules.
        #[arg(long)]
        orbits: bool,
        /// Write the catalog here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a rule conserves the cell-state sum; print the
    /// split + coefficients certificate or a counterexample witness.
    Decide {
        #[command(flatten)]
        rule: RuleSource,
    },
    /// Check sum conservation by direct global application.
    Verify {
        #[command(flatten)]
        rule: RuleSource,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Torus side lengths, comma separated (all at least 5).
        #[arg(long, value_delimiter = ',', required = true)]
        sides: Vec<usize>,
        /// Window radius for window mode.
        #[arg(long, default_value_t = 1)]
        radius: usize,
        /// Number of random configurations for sampled mode.
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Seed for sampled mode.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exhaustive-enumeration ceiling.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Iterate a rule from an initial configuration, reporting the sum
    /// at every step.
    Simulate {
        #[command(flatten)]
        rule: RuleSource,
        #[arg(long)]
        steps: usize,
        /// JSON file with {"sides": [...], "cells": [...]}.
        #[arg(long)]
        init: PathBuf,
        /// Include the cell array in every output line.
        #[arg(long)]
        dump_configs: bool,
    },
    /// Print the number of split functions for a dimension and state
    /// count.
    CountSplits {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        qstar: i64,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct RuleSource {
    /// Elementary rule code (one-dimensional binary).
    #[arg(long)]
    eca: Option<u8>,
    /// Rule record file (JSON or first line of a catalog).
    #[arg(long)]
    lut: Option<PathBuf>,
}

impl RuleSource {
    fn load(&self) -> Result<LocalFunction> {
        if let Some(code) = self.eca {
            return Ok(from_wolfram_code(code));
        }
        let path = self.lut.as_ref().expect("clap enforces one source");
        let contents =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        RuleRecord::parse(&contents)?.to_local_function()
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Window,
    Sampled,
}

#[derive(Deserialize)]
struct InitFile {
    sides: Vec<usize>,
    cells: Vec<i64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err
                .downcast_ref::<ncca_core::Error>()
                .is_some_and(|e| matches!(e, ncca_core::Error::BudgetExceeded { .. }))
            {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Enumerate {
            dim,
            qstar,
            per_split,
            orbits,
            out,
        } => cmd_enumerate(dim, qstar, per_split, orbits, out),
        Command::Decide { rule } => cmd_decide(&rule.load()?),
        Command::Verify {
            rule,
            mode,
            sides,
            radius,
            trials,
            seed,
            budget,
        } => cmd_verify(&rule.load()?, mode, sides, radius, trials, seed, budget),
        Command::Simulate {
            rule,
            steps,
            init,
            dump_configs,
        } => cmd_simulate(&rule.load()?, steps, &init, dump_configs),
        Command::CountSplits { dim, qstar } => {
            let states = StateSet::contiguous(qstar)?;
            println!("{}", ncca_core::split::count_splits(dim, &states)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_enumerate(
    dim: usize,
    qstar: i64,
    per_split: bool,
    orbits: bool,
    out: Option<PathBuf>,
) -> Result<ExitCode> {
    if dim == 0 || dim > 4 {
        bail!("dimension must be between 1 and 4");
    }
    if !(1..=3).contains(&qstar) {
        bail!("qstar must be between 1 and 3");
    }
    let states = StateSet::contiguous(qstar)?;
    let groups = enumerate_ncca_by_split(dim, &states)?;

    let mut sink: Box<dyn Write> = match &out {
        Some(path) => Box::new(std::io::BufWriter::new(
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(std::io::BufWriter::new(std::io::stdout().lock())),
    };

    let materializer = ncca_core::engine::Materializer::new(dim, &states)?;
    let mut total = 0usize;
    let mut rule_luts = Vec::new();
    for group in &groups {
        let labels = group.split.label().ok();
        for coeffs in &group.coeff_vectors {
            let rule = materializer.rule(&group.split, coeffs)?;
            let mut record = RuleRecord::from_local_function(&rule);
            record.split = labels
                .as_ref()
                .map(|(one, two)| vec![one.clone(), two.clone()]);
            record.coeffs = Some(coeffs.clone());
            serde_json::to_writer(&mut sink, &record)?;
            writeln!(sink)?;
            total += 1;
            if orbits {
                rule_luts.push(rule);
            }
        }
    }
    sink.flush()?;

    eprintln!("{total} rules");
    if per_split {
        for group in &groups {
            let name = match group.split.label() {
                Ok((one, two)) => format!("{one}/{two}"),
                Err(_) => format!("{:?}", group.split.recipes()),
            };
            eprintln!(
                "split {:>4} {name}: {}",
                group.split_index,
                group.coeff_vectors.len()
            );
        }
    }
    if orbits {
        let split_luts: Vec<LocalFunction> = groups.iter().map(|g| g.split.to_lut()).collect();
        let split_orbits = ncca_core::engine::orbit_representatives(&split_luts, dim);
        let rule_orbits = ncca_core::engine::orbit_representatives(&rule_luts, dim);
        eprintln!("split orbits: {}", split_orbits.len());
        eprintln!("rule orbits: {}", rule_orbits.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_decide(f: &LocalFunction) -> Result<ExitCode> {
    match decide_number_conservation(f)? {
        NcVerdict::Conserving(dec) => {
            let catalog = ncca_core::lattice::PairCatalog::canonical(f.dimension())?;
            let coeffs = ncca_core::perturb::Perturbation::read_from(&dec.residual, catalog)?;
            let payload = serde_json::json!({
                "conserving": true,
                "split_recipes": dec.split.recipes(),
                "coeffs": coeffs.coeffs(),
            });
            println!("{payload}");
            Ok(ExitCode::SUCCESS)
        }
        NcVerdict::NotConserving(witness) => {
            let witness_json = match witness {
                NcWitness::MonomerSum { q, sum } => serde_json::json!({
                    "kind": "monomer_sum",
                    "q": q,
                    "sum": sum,
                }),
                NcWitness::ResidualMismatch {
                    index,
                    value,
                    expected,
                } => serde_json::json!({
                    "kind": "residual_mismatch",
                    "index": index,
                    "value": value,
                    "expected": expected,
                }),
            };
            let payload = serde_json::json!({
                "conserving": false,
                "witness": witness_json,
            });
            println!("{payload}");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_verify(
    f: &LocalFunction,
    mode: Mode,
    sides: Vec<usize>,
    radius: usize,
    trials: u64,
    seed: u64,
    budget: u64,
) -> Result<ExitCode> {
    let geometry = GridGeometry::new(sides)?;
    let verifier = Verifier::with_budget(budget);
    let report = match mode {
        Mode::Exhaustive => verifier.exhaustive(f, &geometry)?,
        Mode::Window => verifier.window(f, &geometry, radius)?,
        Mode::Sampled => verifier.sampled(f, &geometry, trials, seed)?,
    };
    println!("{}", serde_json::to_string(&report)?);
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_simulate(
    f: &LocalFunction,
    steps: usize,
    init: &PathBuf,
    dump_configs: bool,
) -> Result<ExitCode> {
    let contents =
        fs::read_to_string(init).with_context(|| format!("reading {}", init.display()))?;
    let parsed: InitFile = serde_json::from_str(&contents).context("malformed init file")?;
    let geometry = GridGeometry::new(parsed.sides)?;
    let x0 = Configuration::new(geometry, parsed.cells)?;
    let trajectory = run_trajectory(f, &x0, steps)?;
    let mut sink = std::io::BufWriter::new(std::io::stdout().lock());
    for (step, (x, s)) in trajectory.iter().enumerate() {
        let line = if dump_configs {
            serde_json::json!({"step": step, "sigma": s, "cells": x.cells()})
        } else {
            serde_json::json!({"step": step, "sigma": s})
        };
        writeln!(sink, "{line}")?;
    }
    sink.flush()?;
    Ok(ExitCode::SUCCESS)
}

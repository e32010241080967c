use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use branchinv::branch::{BranchRecord, CoefficientChoice};
use branchinv::differentials::{lambda_set, tjurina_oracle};
use branchinv::harness::{class_sweep, verify_all, SweepOptions};
use branchinv::series::parse_rational;
use branchinv::{make_branch, NumericalSemigroup, PuiseuxBranch, Q};
use clap::{Parser, Subcommand};
use serde_json::json;

const TRUNC_FACTOR_VAR: &str = "BRANCHINV_TRUNC_FACTOR";

#[derive(Parser)]
#[command(name = "branchinv", version, about = "Exact invariants of plane curve branches")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Numerical semigroup data.
    Semigroup {
        #[command(subcommand)]
        command: SemigroupCommand,
    },
    /// Branch construction.
    Branch {
        #[command(subcommand)]
        command: BranchCommand,
    },
    /// Semigroup, Λ \ Γ, Tjurina number (two ways) and semiroots of a branch.
    Invariants {
        #[arg(long)]
        branch: PathBuf,
    },
    /// Runs the structural checks on a branch; exits with 1 on a violation.
    Verify {
        #[arg(long)]
        branch: PathBuf,
        /// Also compare the Tjurina number with the ideal codimension.
        #[arg(long)]
        all: bool,
    },
    /// Samples seeded branches of a class and tabulates (Λ \ Γ, τ).
    Sweep {
        #[arg(long, value_delimiter = ',', required = true)]
        gens: Vec<i64>,
        #[arg(long, default_value_t = 100)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// TSV table path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Full JSON report path.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Worker threads; defaults to the number of processors.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Subcommand)]
enum SemigroupCommand {
    Info {
        #[arg(long, value_delimiter = ',', required = true)]
        gens: Vec<i64>,
    },
}

#[derive(Subcommand)]
enum BranchCommand {
    Make {
        /// Characteristic exponents β_0, ..., β_g.
        #[arg(long = "char", value_delimiter = ',', required = true)]
        char_exponents: Vec<i64>,
        /// Exact coefficients as `exponent:num/den`; seeded when absent.
        #[arg(long, value_delimiter = ',', conflicts_with = "seed")]
        coeffs: Option<Vec<String>>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failures caused by the inputs, reported with exit code 2.
#[derive(Debug)]
struct UsageError(anyhow::Error);

enum Outcome {
    Clean,
    Violated,
}

fn trunc_factor() -> anyhow::Result<usize> {
    match std::env::var(TRUNC_FACTOR_VAR) {
        Err(_) => Ok(1),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(f) if f >= 1 => Ok(f),
            _ => bail!("{TRUNC_FACTOR_VAR} must be a positive integer, got {v:?}"),
        },
    }
}

fn usage<T, E: Into<anyhow::Error>>(r: Result<T, E>) -> Result<T, UsageError> {
    r.map_err(|e| UsageError(e.into()))
}

fn parse_coeffs(items: &[String]) -> anyhow::Result<BTreeMap<usize, Q>> {
    let mut map = BTreeMap::new();
    for item in items {
        let (e, c) = item
            .split_once(':')
            .with_context(|| format!("coefficient {item:?} is not of the form exponent:num/den"))?;
        let e: usize = e.trim().parse().with_context(|| format!("bad exponent in {item:?}"))?;
        let c = parse_rational(c.trim())?;
        if map.insert(e, c).is_some() {
            bail!("exponent {e} given twice");
        }
    }
    Ok(map)
}

fn read_branch(path: &Path) -> Result<PuiseuxBranch, UsageError> {
    let text = usage(fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())))?;
    let rec: BranchRecord = usage(serde_json::from_str(&text).with_context(|| format!("{} is not a branch file", path.display())))?;
    let branch = usage(PuiseuxBranch::from_record(&rec))?;
    let factor = usage(trunc_factor())?;
    let floor = branchinv::branch::default_trunc(branch.semigroup(), factor);
    Ok(branch.with_trunc(branch.trunc().max(floor)))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<Outcome, UsageError> {
    match cli.command {
        Command::Semigroup {
            command: SemigroupCommand::Info { gens },
        } => {
            let s = usage(NumericalSemigroup::from_generators(&gens))?;
            let gaps = s.gaps();
            let info = json!({
                "generators": s.generators(),
                "char_exponents": s.char_exponents(),
                "gcd_chain": s.gcd_chain(),
                "quotients": (1..=s.genus()).map(|i| s.n(i)).collect::<Vec<_>>(),
                "conductor": s.conductor(),
                "milnor": s.milnor(),
                "gap_count": gaps.len(),
                "gaps": gaps,
            });
            usage(emit(None, &pretty(&info)))?;
        }
        Command::Branch {
            command:
                BranchCommand::Make {
                    char_exponents,
                    coeffs,
                    seed,
                    out,
                },
        } => {
            let choice = match coeffs {
                Some(items) => CoefficientChoice::Explicit(usage(parse_coeffs(&items))?),
                None => CoefficientChoice::GenericSeeded(seed.unwrap_or(0)),
            };
            let factor = usage(trunc_factor())?;
            let b = usage(make_branch(&char_exponents, choice, factor))?;
            let mut text = serde_json::to_string(&b.record()).expect("serializable");
            text.push('\n');
            usage(emit(out.as_deref(), &text))?;
        }
        Command::Invariants { branch } => {
            let b = read_branch(&branch)?;
            let lambda = usage(lambda_set(&b))?;
            let oracle = usage(tjurina_oracle(&b.implicit()))?;
            let semiroots: Vec<String> = b.semiroots().polys.iter().map(|p| p.to_string()).collect();
            let info = json!({
                "branch": b.to_string(),
                "semigroup": b.semigroup().record(),
                "milnor": lambda.mu(),
                "lambda_minus_gamma": lambda.extra,
                "tjurina": lambda.tau(),
                "tjurina_ideal": oracle,
                "semiroots": semiroots,
            });
            usage(emit(None, &pretty(&info)))?;
        }
        Command::Verify { branch, all } => {
            let b = read_branch(&branch)?;
            let reports = usage(verify_all(&b, all))?;
            usage(emit(None, &pretty(&reports)))?;
            if reports.iter().any(|r| r.is_violated()) {
                return Ok(Outcome::Violated);
            }
        }
        Command::Sweep {
            gens,
            samples,
            seed,
            out,
            json,
            jobs,
        } => {
            let s = usage(NumericalSemigroup::from_generators(&gens))?;
            let opts = SweepOptions {
                trunc_factor: usage(trunc_factor())?,
                jobs,
                oracle: false,
            };
            let report = usage(class_sweep(&s, samples, seed, &opts))?;
            usage(emit(out.as_deref(), &report.to_tsv()))?;
            if let Some(p) = json {
                usage(emit(Some(&p), &pretty(&report)))?;
            }
            let violations = report.violations();
            if !violations.is_empty() {
                eprintln!("{} violated checks", violations.len());
                for v in violations {
                    eprintln!("{}", serde_json::to_string(v).expect("serializable"));
                }
                return Ok(Outcome::Violated);
            }
        }
    }
    Ok(Outcome::Clean)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Violated) => ExitCode::from(1),
        Err(UsageError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

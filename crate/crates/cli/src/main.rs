//! `angulus`: scenario runner for slit-strip semigroups, the angular-derivative
//! inequalities, the star quadratic differential and digon moduli.
//!
//! Exit codes: 0 success, 1 computation failure or violated inequality,
//! 2 usage or input validation error, 3 indeterminate verification,
//! 4 quadratic-differential failure, 5 reduced modulus did not stabilize.

mod commands;
mod output;
mod scenario;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use scenario::{parse_list, parse_weight_lists, MultiplierTable, Overrides, Scenario, ScenarioFile, UsageError};

#[derive(Parser)]
#[command(name = "angulus", version, about = "Angular derivatives at boundary fixed points of extremal self-maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the Koenigs map; write certificate.json, fixed_points.csv, domain.svg.
    Semigroup(CommonArgs),
    /// Check both inequalities; write inequality_report.{json,csv}.
    Verify(VerifyArgs),
    /// Fit the star quadratic differential; write qd.json, trajectories.svg.
    Qd(CommonArgs),
    /// Extremal digon system and its moduli; write moduli_report.json.
    Moduli(CommonArgs),
}

/// Comma-separated numbers as one flag value.
#[derive(Debug, Clone)]
struct List(Vec<f64>);

#[derive(Debug, Clone)]
struct WeightLists(Vec<Vec<f64>>);

fn list(s: &str) -> Result<List, String> {
    parse_list(s).map(List)
}

fn weight_lists(s: &str) -> Result<WeightLists, String> {
    parse_weight_lists(s).map(WeightLists)
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Scenario file (JSON); flags override its fields.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Channel widths, comma separated, summing to 1.
    #[arg(long, value_parser = list, allow_hyphen_values = true)]
    alphas: Option<List>,
    /// Slit tip abscissas (negative), one fewer than the widths.
    #[arg(long, value_parser = list, allow_hyphen_values = true)]
    gammas: Option<List>,
    /// Semigroup times.
    #[arg(long, value_parser = list)]
    times: Option<List>,
    /// Weight vectors, `0.3,0.7;0.5,0.5`.
    #[arg(long, value_parser = weight_lists)]
    weights: Option<WeightLists>,
    /// Numerical tolerance.
    #[arg(long, env = "ANGULUS_TOL")]
    tol: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Multiplier table (JSON) used instead of a domain.
    #[arg(long)]
    multipliers: Option<PathBuf>,
    /// Skip numerically estimated multipliers.
    #[arg(long)]
    exact_only: bool,
}

/// Failure carrying its own exit code.
#[derive(Debug)]
pub struct Coded(pub u8, pub String);

impl std::fmt::Display for Coded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for Coded {}

pub enum Outcome {
    Ok,
    Violated,
    Indeterminate,
}

fn scenario(args: &CommonArgs, multipliers: Option<MultiplierTable>, need_domain: bool) -> anyhow::Result<Scenario> {
    let file = match &args.scenario {
        Some(p) => ScenarioFile::load(p).map_err(|e| anyhow::Error::new(UsageError(format!("{e:#}"))))?,
        None => ScenarioFile::default(),
    };
    let o = Overrides {
        alphas: args.alphas.clone().map(|l| l.0),
        gammas: args.gammas.clone().map(|l| l.0),
        times: args.times.clone().map(|l| l.0),
        weights: args.weights.clone().map(|l| l.0),
        tolerance: args.tol,
        multipliers,
        out: args.out.clone(),
    };
    Scenario::resolve(file, o, need_domain)
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Semigroup(a) => commands::semigroup(&scenario(&a, None, true)?),
        Command::Verify(v) => {
            let table = match &v.multipliers {
                Some(p) => {
                    let text = std::fs::read_to_string(p)
                        .map_err(|e| anyhow::Error::new(UsageError(format!("reading {}: {e}", p.display()))))?;
                    Some(
                        serde_json::from_str::<MultiplierTable>(&text)
                            .map_err(|e| anyhow::Error::new(UsageError(format!("parsing {}: {e}", p.display()))))?,
                    )
                }
                None => None,
            };
            commands::verify(&scenario(&v.common, table, false)?, v.exact_only)
        }
        Command::Qd(a) => commands::qd(&scenario(&a, None, true)?),
        Command::Moduli(a) => commands::moduli(&scenario(&a, None, true)?),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    if let Some(Coded(code, _)) = err.downcast_ref::<Coded>() {
        return *code;
    }
    match err.downcast_ref::<angulus::Error>() {
        Some(angulus::Error::InvalidInput(_) | angulus::Error::DegenerateMultiplier(_) | angulus::Error::WeightMismatch) => 2,
        Some(angulus::Error::ModulusUnstable { .. }) => 5,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violated) => {
            eprintln!("angulus: an inequality is violated beyond its error bound");
            ExitCode::from(1)
        }
        Ok(Outcome::Indeterminate) => {
            eprintln!("angulus: verification indeterminate, error bars straddle zero");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("angulus: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&UsageError("x".into()).into()), 2);
        assert_eq!(exit_code(&Coded(4, "qd".into()).into()), 4);
        assert_eq!(exit_code(&angulus::Error::WeightMismatch.into()), 2);
        assert_eq!(exit_code(&angulus::Error::ModulusUnstable { last: 0.0, spread: 1.0 }.into()), 5);
        assert_eq!(exit_code(&angulus::Error::PossibleRotation(3).into()), 1);
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use epw_cli::{
    cmd_lattice_table, cmd_no_k3, cmd_strata, cmd_verify_identities, Format, Outcome, RunConfig, StrataOptions,
    UsageError, DEFAULT_BOUND, DEFAULT_DEGREE_BOUND, DEFAULT_SAMPLES, DEFAULT_SEED,
};

/// Exact verification suites for Lagrangian degeneracy strata, the symmetric double
/// cover and Heegner-divisor lattices.
///
/// Exit codes: 0 all checks passed, 1 a verification failed, 2 usage error.
#[derive(Parser, Debug)]
#[command(name = "epw", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fuzz the exact identities (cofactor involution, double cover, discriminant formula,
    /// tangent Lagrangians) with `--samples` cases each.
    VerifyIdentities(Common),
    /// Sample corank histograms for certified Lagrangians.
    Strata {
        #[command(flatten)]
        common: Common,
        /// Also construct a Lagrangian with a corank-4 point and report it.
        #[arg(long)]
        gamma: bool,
        /// Also compute the degree of the degeneracy hypersurface along a random line.
        #[arg(long)]
        line_degree: bool,
    },
    /// Heegner-divisor table for e = 1..=--bound (CSV by default).
    LatticeTable(Common),
    /// Transcript showing that the rank-3 lattice T' has no isotropic vector of divisibility 1.
    NoK3(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// RNG seed; every random choice is derived from it.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Number of random samples per suite or Lagrangian.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Search bound: largest e for lattice-table, coordinate bound for no-k3.
    #[arg(long, default_value_t = DEFAULT_BOUND, value_parser = clap::value_parser!(i64).range(1..))]
    bound: i64,
    /// Largest degree tried by the emptiness certificates.
    #[arg(long, default_value_t = DEFAULT_DEGREE_BOUND as u16, value_parser = clap::value_parser!(u16).range(2..=10))]
    degree_bound: u16,
    /// Output format (default: json, csv for lattice-table, text for no-k3).
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write output to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add a deliberately failing check (harness self-test).
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Json,
    Csv,
}

impl Common {
    fn config(&self) -> RunConfig {
        RunConfig {
            seed: self.seed,
            samples: self.samples,
            bound: self.bound,
            degree_bound: self.degree_bound as usize,
            format: self.format.map(|f| match f {
                FormatArg::Json => Format::Json,
                FormatArg::Csv => Format::Csv,
            }),
            inject_fault: self.inject_fault,
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<(Outcome, Option<PathBuf>)> {
    let (outcome, common) = match &cli.command {
        Command::VerifyIdentities(c) => (cmd_verify_identities(&c.config())?, c),
        Command::Strata { common, gamma, line_degree } => {
            let opts = StrataOptions { gamma: *gamma, line_degree: *line_degree };
            (cmd_strata(&common.config(), &opts)?, common)
        }
        Command::LatticeTable(c) => (cmd_lattice_table(&c.config())?, c),
        Command::NoK3(c) => (cmd_no_k3(&c.config())?, c),
    };
    Ok((outcome, common.out.clone()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((outcome, out)) => {
            let written = match out {
                Some(path) => std::fs::write(&path, &outcome.output),
                None => {
                    print!("{}", outcome.output);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

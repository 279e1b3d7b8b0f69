//! Command-line front end. Exit codes: 0 success, 1 I/O or internal error,
//! 2 malformed input or failed validation, 3 infeasible, 4 precondition or
//! size guard.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use spassign_core::commands;
use spassign_core::generators::Family;
use spassign_core::io::Format;
use spassign_core::partition::Algorithm;
use spassign_core::Error;

#[derive(Parser)]
#[command(name = "spassign", version, about = "Strategyproof reviewer assignment by partitioning")]
struct Cli {
    /// Encoding of reports written to disk and printed to stdout.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Kv)]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Kv,
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Kv => Format::Kv,
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Random,
    Cycle,
    Coloring,
    Multi,
    General,
    RandomComponents,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Algorithm {
        match a {
            AlgoArg::Random => Algorithm::Random,
            AlgoArg::Cycle => Algorithm::Cycle,
            AlgoArg::Coloring => Algorithm::Coloring,
            AlgoArg::Multi => Algorithm::Multi,
            AlgoArg::General => Algorithm::General,
            AlgoArg::RandomComponents => Algorithm::RandomComponents,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Theorem2,
    Theorem6,
    UniformRandom,
    BinaryRandom,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Theorem2 => Family::Theorem2,
            FamilyArg::Theorem6 => Family::Theorem6,
            FamilyArg::UniformRandom => Family::UniformRandom,
            FamilyArg::BinaryRandom => Family::BinaryRandom,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Unconstrained maximum-similarity assignment.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// Load of a one-to-one instance (default: from the manifest).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Partition the agents and assign across the partition.
    Partition {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum)]
        algo: AlgoArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a generated instance (manifest plus matrix files).
    Generate {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of papers; makes a random family use general authorship.
        #[arg(long)]
        papers: Option<usize>,
        #[arg(long, default_value_t = 1)]
        max_authors: usize,
        /// Agent load for general instances (default: k).
        #[arg(long)]
        agent_load: Option<usize>,
        /// Manifest path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact best balanced bipartition of a small instance.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Outcome statistics of a partition.
    Evaluate {
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        outcomes: PathBuf,
        /// Instance used to place papers when the partition file lists agents only.
        #[arg(long)]
        instance: Option<PathBuf>,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check assignment (and partition) files against an instance.
    Validate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        assignment: PathBuf,
        #[arg(long)]
        partition: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    let format: Format = cli.format.into();
    let rec = match cli.command {
        Command::Solve { instance, k, out } => commands::cmd_solve(&instance, k, &out, format)?,
        Command::Partition {
            instance,
            k,
            algo,
            seed,
            trials,
            out,
        } => commands::cmd_partition(&instance, k, algo.into(), seed, trials, &out, format)?,
        Command::Generate {
            family,
            n,
            k,
            seed,
            papers,
            max_authors,
            agent_load,
            out,
        } => commands::cmd_generate(family.into(), n, k, seed, papers, max_authors, agent_load, &out)?,
        Command::Oracle { instance, k, out } => commands::cmd_oracle(&instance, k, &out, format)?,
        Command::Evaluate {
            partition,
            outcomes,
            instance,
            out,
        } => {
            let rec = commands::cmd_evaluate(&partition, &outcomes, instance.as_deref())?;
            if let Some(out) = out {
                spassign_core::io::write_record(&out, &rec, format)?;
            }
            rec
        }
        Command::Validate {
            instance,
            k,
            assignment,
            partition,
        } => {
            let (rec, verdict) = commands::cmd_validate(&instance, k, &assignment, partition.as_deref())?;
            print!("{}", rec.render(format));
            if !verdict.is_valid() {
                return Err(Error::InvalidAssignment(format!(
                    "{} violation(s); first: {}",
                    verdict.violations.len(),
                    verdict.violations[0]
                )));
            }
            return Ok(());
        }
    };
    print!("{}", rec.render(format));
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spassign: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

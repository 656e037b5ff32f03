use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use zrec::cli::{self, CliError, CmdOutput, ConvertTarget, OutputFormat, SolveMethod};

#[derive(Parser)]
#[command(
    name = "zrec",
    version,
    about = "Semiring recurrence systems, weighted one-letter automata, and z-transform series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Override the semiring named in the input file
    #[arg(long, global = true)]
    semiring: Option<String>,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t)]
    out: OutputFormat,
    /// Seed for randomized runs
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a system/composition file and print f(n) for n = 0..=N
    Solve {
        file: PathBuf,
        /// Largest n to print
        #[arg(long, default_value_t = 12)]
        upto: usize,
        #[arg(long, value_enum, default_value_t)]
        method: SolveMethod,
    },
    /// Print the z-transform of the solution in both series forms
    Transform {
        file: PathBuf,
        /// Truncation order of the series
        #[arg(long, default_value_t = 12)]
        order: usize,
    },
    /// Mechanically verify one of the four series theorems
    Verify {
        file: Option<PathBuf>,
        /// 1: constant single, 2: variable single, 3: constant composed, 4: variable composed
        #[arg(long)]
        theorem: u8,
        #[arg(long, default_value_t = 12)]
        order: usize,
        /// Verify seeded random systems instead of a file
        #[arg(long)]
        random: bool,
        /// Number of random trials
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Fixed dimension for random systems (default: drawn from 1..=3)
        #[arg(long)]
        k: Option<usize>,
    },
    /// Enumerate length-n paths from a state with their weights
    Paths {
        file: PathBuf,
        /// Start state
        #[arg(long)]
        from: String,
        /// Path length n
        #[arg(long)]
        length: usize,
    },
    /// Convert between system and automaton documents
    Convert {
        file: PathBuf,
        #[arg(long, value_enum)]
        to: ConvertTarget,
    },
    /// Check the semiring laws of a builtin semiring (--semiring <name>)
    Laws,
    /// List the builtin semirings
    Semirings,
}

fn run(cli: Cli) -> Result<CmdOutput, CliError> {
    let semiring = cli.semiring.as_deref();
    match cli.command {
        Command::Solve { file, upto, method } => {
            cli::cmd_solve(&file, upto, method, cli.out, semiring)
        }
        Command::Transform { file, order } => cli::cmd_transform(&file, order, cli.out, semiring),
        Command::Verify { file, theorem, order, random, trials, k } => cli::cmd_verify(
            file.as_deref(),
            theorem,
            order,
            random,
            trials,
            cli.seed,
            k,
            cli.out,
            semiring,
        ),
        Command::Paths { file, from, length } => {
            cli::cmd_paths(&file, &from, length, cli.out, semiring)
        }
        Command::Convert { file, to } => cli::cmd_convert(&file, to),
        Command::Laws => cli::cmd_laws(semiring, cli.out),
        Command::Semirings => cli::cmd_semirings(cli.out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(output) => {
            println!("{}", output.text);
            ExitCode::from(output.exit_code())
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use satmatch::commands::{cmd_adversary, cmd_analyze, cmd_enumerate, cmd_match};
use satmatch::verify::VerifyConfig;
use satmatch::{cmd_verify, CliError, Outcome};
use satmatch_core::{Side, DEFAULT_NODE_CAP};

#[derive(Parser)]
#[command(
    name = "satmatch",
    version,
    about = "Saturation analysis for stable matchings in bipartite markets"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    X,
    Y,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::X => Side::X,
            SideArg::Y => Side::Y,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check whether every stable matching saturates a side, for all preferences.
    Analyze {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = SideArg::X)]
        side: SideArg,
    },
    /// Run deferred acceptance on the market's preferences.
    Match {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = SideArg::X)]
        propose: SideArg,
    },
    /// List every stable matching of the market's preferences.
    Enumerate {
        file: PathBuf,
        /// Maximum search nodes before giving up.
        #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
        cap: u64,
    },
    /// Build preferences that leave a vertex unmatched in every stable matching.
    Adversary {
        file: PathBuf,
        #[arg(long)]
        target: String,
        /// Side of the target, when its name is ambiguous.
        #[arg(long, value_enum)]
        side: Option<SideArg>,
        /// Write the market with the built preferences here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
        cap: u64,
    },
    /// Check the theory exhaustively on small markets.
    Verify {
        #[arg(long, default_value_t = 3)]
        max_side: usize,
        /// Exhaust preference instances up to this count per graph, sample above it.
        #[arg(long, default_value_t = 10_000)]
        cap: u128,
        #[arg(long, default_value_t = 200)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Analyze { file, side } => cmd_analyze(&file, side.into()),
        Command::Match { file, propose } => cmd_match(&file, propose.into()),
        Command::Enumerate { file, cap } => cmd_enumerate(&file, cap),
        Command::Adversary { file, target, side, out, cap } => {
            cmd_adversary(&file, &target, side.map(Side::from), out.as_deref(), cap)
        }
        Command::Verify { max_side, cap, seeds, seed } => {
            let config =
                VerifyConfig { instance_cap: cap, seeds, seed, ..VerifyConfig::with_max_side(max_side) };
            Ok(cmd_verify(&config))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(outcome) => {
            match cli.format {
                Format::Text => print!("{}", outcome.report),
                Format::Structured => println!("{}", outcome.report.to_json()),
            }
            ExitCode::from(outcome.exit_code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gptdim_core::Error;

#[derive(Parser, Debug)]
#[command(name = "gptdim", version, about = "Dimensions of finite GPT systems and boxworld protocols")]
struct Cli {
    /// Worker threads for LP batches (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    text: bool,
    #[command(subcommand)]
    command: Command,
}

/// Where systems come from. Builder flags may be repeated.
#[derive(Args, Debug, Default, Clone)]
pub struct Sources {
    /// The g-bit (a square).
    #[arg(long, action = clap::ArgAction::Count)]
    gbit: u8,
    /// Hypercube bit with D settings.
    #[arg(long, value_name = "D")]
    hypercube: Vec<usize>,
    /// Classical system with d outcomes.
    #[arg(long, value_name = "d")]
    classical: Vec<usize>,
    /// Projected k-g-bit system.
    #[arg(long, value_name = "k")]
    amplify: Vec<usize>,
    /// Vertex cap for --amplify.
    #[arg(long, default_value_t = gptdim_core::composition::DEFAULT_VERTEX_CAP)]
    amplify_cap: u128,
    /// System files.
    files: Vec<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Measurement and information dimension.
    Dims {
        #[command(flatten)]
        source: Sources,
        /// Exhaust every clique size when bounding d_m.
        #[arg(long)]
        certify: bool,
        /// Largest clique size tried for one discriminating measurement.
        #[arg(long, value_name = "N", conflicts_with = "certify")]
        certify_limit: Option<usize>,
        /// Decide every pair by LP, skipping the atomic-effect shortcut.
        #[arg(long)]
        lp_only: bool,
    },
    /// Maximal tensor product of g-bits as a box list.
    Compose {
        #[arg(long, default_value_t = 2)]
        gbits: usize,
        /// Write the box list as a system file.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Parity projection of a box list.
    Project {
        file: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Isomorphism up to setting and outcome relabeling of two systems.
    Iso {
        #[command(flatten)]
        source: Sources,
    },
    /// Write a system as a system file.
    Export {
        #[command(flatten)]
        source: Sources,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Communication protocols.
    Protocol {
        #[command(subcommand)]
        which: ProtocolCommand,
    },
    /// Maxwell-demon memory and erasure ledger.
    Demon {
        #[arg(long = "D", value_name = "D")]
        dimension: usize,
        /// Decision string; random from --seed when omitted.
        #[arg(long)]
        decisions: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Temperature in kelvin, for energies in joules.
        #[arg(long)]
        temperature: Option<f64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ProtocolCommand {
    /// Bob reads b_k from a hypercube bit.
    Index {
        #[arg(long)]
        bits: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        /// Demonstration: run COUNT random (b, k) draws instead.
        #[arg(long, value_name = "COUNT")]
        sample: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Information-causality quantity of the index protocol.
    Ic {
        #[arg(long)]
        n: usize,
        /// Send a classical bit carrying b_1 instead.
        #[arg(long)]
        classical_bit: bool,
    },
    /// Communication complexity of a truth table.
    Cc {
        #[arg(long, value_name = "FILE", required_unless_present = "function")]
        table: Option<PathBuf>,
        /// Named function: inner-product, equality, constant, xor-first.
        #[arg(long, conflicts_with = "table")]
        function: Option<String>,
        /// Input width for --function.
        #[arg(long, default_value_t = 2)]
        width: usize,
        #[arg(long, default_value_t = 12)]
        max_alice_bits: usize,
        #[arg(long, default_value_t = 12)]
        max_bob_bits: usize,
    },
    /// Hypercube bit simulated by PR boxes and one classical bit.
    PrboxSim {
        #[arg(long)]
        zeta: String,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::CapExceeded { .. }) => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
        {
            eprintln!("gptdim: {e}");
            return ExitCode::from(2);
        }
    }
    let echo: Vec<String> = std::env::args().skip(1).collect();
    match commands::run(cli.command, echo) {
        Ok(report) => {
            if cli.text {
                print!("{}", report.text);
            } else {
                println!("{}", report.to_json());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("gptdim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

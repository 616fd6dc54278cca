//! `nlbox-lab`: command-line access to the nonlocal box toolkit.

mod commands;
mod input;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::output::Format;

#[derive(Parser, Debug)]
#[command(name = "nlbox-lab", version, about = "Nonlocal box complexity, XOR protocols and bias amplification")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Lift the default memory budget for matrix work.
    #[arg(long, global = true)]
    pub allow_large: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// A truth table `g`, read from the argument or from stdin with `-`.
#[derive(Args, Debug, Clone)]
pub struct TableArg {
    /// Truth table: binary (first character is g(0)) or 0x-prefixed hex.
    #[arg(long)]
    pub g: String,
    /// Number of variables (inferred from the table length when omitted).
    #[arg(long)]
    pub n: Option<usize>,
}

/// Where a protocol comes from.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct ProtocolArg {
    /// Built-in protocol: brassard-maj3, addr:<n>, adaptive:<table>, nonadaptive:<table>, base:<table>.
    #[arg(long)]
    pub protocol: Option<String>,
    /// Protocol description file (JSON); `-` reads stdin.
    #[arg(long)]
    pub protocol_file: Option<PathBuf>,
}

/// Fixed inputs; uniform over all inputs when absent.
#[derive(Args, Debug, Clone)]
pub struct InputArg {
    /// Alice's input bits (decimal or 0x hex, bit i is input i).
    #[arg(long, requires = "y")]
    pub x: Option<String>,
    /// Bob's input bits.
    #[arg(long, requires = "x")]
    pub y: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fourier spectrum, dimensions and the bias polynomial of g.
    Fourier {
        #[command(flatten)]
        table: TableArg,
        /// Evaluate Bias_eps(g) at these comma-separated biases.
        #[arg(long)]
        eps: Option<String>,
    },
    /// Nonlocal box complexity of g(x XOR y) via F2 rank.
    Nlbc {
        #[command(flatten)]
        table: TableArg,
        /// Also print a decomposition with NLBC product terms.
        #[arg(long)]
        decompose: bool,
    },
    /// NLBC of Maj_n(x XOR y) for odd n.
    MajTable {
        /// Comma-separated odd n in 3..=17.
        #[arg(long, default_value = "3,5,7,9,11,13")]
        odd_n: String,
        /// Permit n = 15.
        #[arg(long)]
        include_15: bool,
        /// Permit n = 17 (about 1 GiB of memory and hours of compute).
        #[arg(long)]
        include_17: bool,
        /// Directory caching reduced bases between runs.
        #[arg(long, env = "NLBOX_CACHE_DIR")]
        cache_dir: Option<PathBuf>,
    },
    /// One-way communication complexities of g(x XOR y).
    Commcx {
        #[command(flatten)]
        table: TableArg,
    },
    /// Monte Carlo estimate of a protocol's bias over isotropic boxes.
    Simulate {
        #[command(flatten)]
        protocol: ProtocolArg,
        #[command(flatten)]
        inputs: InputArg,
        /// Box bias, in [-1, 1].
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// Decimal or 0x hex.
        #[arg(long, value_parser = input::parse_u64, default_value = "0xC0FFEE")]
        seed: u64,
    },
    /// Exact bias of a protocol over isotropic boxes.
    BiasExact {
        #[command(flatten)]
        protocol: ProtocolArg,
        #[command(flatten)]
        inputs: InputArg,
        /// Comma-separated box biases.
        #[arg(long)]
        delta: String,
    },
    /// Iterates the noisy amplification map eps -> delta^D * Bias_eps(g).
    Amplify {
        #[command(flatten)]
        table: TableArg,
        /// Box bias, in [0, 1].
        #[arg(long)]
        delta: f64,
        /// Starting bias.
        #[arg(long, default_value_t = 1e-3)]
        eps0: f64,
        #[arg(long, default_value_t = nlbox_core::amplify::MAX_STEPS)]
        steps: u64,
    },
    /// rho_B, delta_B and the CHSH threshold of g.
    Thresholds {
        #[command(flatten)]
        table: TableArg,
    },
    /// Exhaustive census of all functions on n <= 4 variables.
    Search {
        #[arg(long)]
        n: usize,
    },
    /// rho_B, D and delta_B of Maj_n for odd n <= 13.
    MajoritySweep {
        #[arg(long, default_value = "3,5,7,9,11,13")]
        odd_n: String,
    },
    /// Writes a built-in protocol as a protocol description file.
    ExportProtocol {
        /// Built-in protocol name.
        #[arg(long)]
        protocol: String,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<nlbox_core::Error>() {
        Some(e) if e.is_resource_guard() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = nlbox_core::par::set_threads(t) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(report) => {
            let text = output::render(&report, cli.format);
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

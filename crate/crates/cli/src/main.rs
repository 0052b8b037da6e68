//! `revival`: command-line driver for collapse-revival analysis.
//!
//! Verbs: `simulate` writes an inversion trace, `decompose` splits it into
//! dispersive packets, `retrieve` reads the photon-number distribution off
//! the base packet's spectrum, `retrieve-overlap` first disentangles
//! overlapping revivals by solving the window-leakage integral equation,
//! and `state` prints the configured photon-number distribution.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.
//! `REVIVAL_LOG` (off, error, warn, info, debug) sets stderr verbosity.

mod artifacts;
mod commands;
mod config;
mod error;

use clap::{Parser, Subcommand};
use config::{parse_m_range, Overrides, RunConfig};
use error::CliError;
use std::path::PathBuf;

pub mod logger {
    //! Minimal stderr logger driven by the `REVIVAL_LOG` env var.
    use std::sync::OnceLock;

    static LEVEL: OnceLock<u8> = OnceLock::new();

    fn level() -> u8 {
        *LEVEL.get_or_init(|| {
            match std::env::var("REVIVAL_LOG").ok().as_deref() {
                Some("off") => 0,
                Some("error") => 1,
                None | Some("warn") => 2,
                Some("info") => 3,
                Some("debug") => 4,
                Some(other) => {
                    eprintln!("revival: unknown REVIVAL_LOG level `{other}`, using warn");
                    2
                }
            }
        })
    }

    pub fn warn(msg: &str) {
        if level() >= 2 {
            eprintln!("[warn] {msg}");
        }
    }

    pub fn info(msg: &str) {
        if level() >= 3 {
            eprintln!("[info] {msg}");
        }
    }
}

#[derive(Parser)]
#[command(
    name = "revival",
    version,
    about = "Collapse-revival traces, packet decomposition, photon-statistics retrieval"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,

    /// TOML run configuration; built-in defaults apply when absent.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Mean photon number (coherent/thermal `nbar`, cat `alpha_sq`).
    #[arg(long, global = true)]
    nbar: Option<f64>,

    /// Coupling strength.
    #[arg(long, global = true)]
    g: Option<f64>,

    /// Packet window half-width (must sit on the sample lattice).
    #[arg(long, global = true)]
    window: Option<f64>,

    /// Packet index range for decompose, inclusive, e.g. `0..4` or `-1..5`.
    #[arg(long = "m-range", global = true, value_parser = parse_m_range, value_name = "LO..HI", allow_hyphen_values = true)]
    m_range: Option<(i64, i64)>,

    /// Zero-pad factor for windowed spectra (and the overlap solver grid).
    #[arg(long, global = true)]
    pad: Option<usize>,

    /// Frequency band half-width for the overlap solver.
    #[arg(long, global = true)]
    band: Option<f64>,

    /// Diagonal ridge for the overlap solver (0 = plain solve).
    #[arg(long, global = true)]
    ridge: Option<f64>,
}

#[derive(Subcommand)]
enum Verb {
    /// Simulate the inversion trace and write it as CSV.
    Simulate,
    /// Split a trace into dispersive packets and write each one.
    Decompose,
    /// Retrieve the photon-number distribution from the base packet.
    Retrieve,
    /// Retrieve through the overlapping-revival integral equation.
    RetrieveOverlap,
    /// Print the configured photon-number distribution to stdout.
    State,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(cli.config.as_ref())?;
    cfg.apply(&Overrides {
        out: cli.out.clone(),
        nbar: cli.nbar,
        g: cli.g,
        window: cli.window,
        m_range: cli.m_range,
        pad: cli.pad,
        band: cli.band,
        ridge: cli.ridge,
    })?;
    match cli.verb {
        Verb::Simulate => commands::cmd_simulate(&mut cfg),
        Verb::Decompose => commands::cmd_decompose(&mut cfg),
        Verb::Retrieve => commands::cmd_retrieve(&mut cfg),
        Verb::RetrieveOverlap => commands::cmd_retrieve_overlap(&mut cfg),
        Verb::State => commands::cmd_state(&cfg),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("revival: {e}");
        std::process::exit(e.exit_code());
    }
}

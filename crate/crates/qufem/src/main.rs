use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use qufem::commands::{self, DemoKind};
use qufem::config::PdeConfig;
use qufem::io;
use qufem::verify::Verifier;

#[derive(Parser)]
#[command(name = "qufem", version, about = "Block-encoded finite-element assembly, simulated classically")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Assemble global arrays through block-encodings and check them against element loops.
    Assemble {
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long)]
        n: usize,
        /// JSON coefficient file; assembles the scaled PDE operator instead of K and M.
        #[arg(long)]
        coeff: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the letter-domain Poisson or square-duct flow demo.
    Demo {
        #[arg(value_enum)]
        kind: DemoKind,
        #[arg(long)]
        n: usize,
        /// Bitmap of active nodes ('1'/'0', top row first).
        #[arg(long)]
        mask: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Toffoli and ancilla counts over a range of n, as CSV.
    Cost {
        #[arg(long)]
        construct: String,
        #[arg(long, default_value = "n=3..10")]
        sweep: String,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the oracle-equivalence suite.
    Verify {
        /// Comma-separated criterion numbers (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Assemble { d, p, n, coeff, out } => {
            let cfg = coeff.map(|c| PdeConfig::load(&c)).transpose()?;
            let rep = commands::assemble(d, p, n, cfg.as_ref(), out.as_deref())?;
            println!("{}", serde_json::to_string_pretty(&rep)?);
            Ok(rep.passed)
        }
        Cmd::Demo { kind, n, mask, out } => {
            let mask = mask.map(|m| io::load_mask(&m)).transpose()?;
            let rep = commands::demo(kind, n, mask, out.as_deref())?;
            println!("{}", serde_json::to_string_pretty(&rep)?);
            Ok(rep.passed)
        }
        Cmd::Cost { construct, sweep, p, out } => {
            let rows = commands::cost(&construct, commands::parse_sweep(&sweep)?, p)?;
            let csv = io::cost_csv(&rows);
            match out {
                Some(path) => std::fs::write(&path, csv)?,
                None => print!("{csv}"),
            }
            Ok(true)
        }
        Cmd::Verify { only, out } => {
            let ids = if only.is_empty() { (1..=10).collect() } else { only };
            let mut v = Verifier::new();
            let mut results = Vec::new();
            for id in ids {
                let o = v.run(id)?;
                println!("{}", o.line());
                results.push(o);
            }
            if let Some(path) = out {
                std::fs::write(&path, serde_json::to_string_pretty(&results)?)?;
            }
            Ok(results.iter().all(|o| o.passed))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

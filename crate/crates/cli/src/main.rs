//! `dpx`: proof checking, disjunction-property extraction and the machine reduction.

mod commands;
mod io;
mod tm;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dpx::corpus::{DEFAULT_GENERATED, DEFAULT_SEED};
use dpx::oracle::DEFAULT_CAP;

pub use io::Failure;

#[derive(Parser, Debug)]
#[command(name = "dpx", version, about = "Harrop extraction toolkit for intuitionistic propositional logic")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Normalization fuel in contractions; defaults to 10·|d|².
    #[arg(long, global = true, env = "DPX_FUEL")]
    pub fuel: Option<usize>,
    /// Connective cap for the validity oracle.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    pub oracle_cap: usize,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Bm,
    Slash,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Check a derivation file.
    Check { file: PathBuf },
    /// Extract a disjunct and write its certificate.
    Extract {
        #[arg(long, value_enum, default_value = "bm")]
        method: MethodArg,
        /// Choice bits over the antecedent's strictly positive disjunctions.
        #[arg(long)]
        choices: Option<String>,
        /// Certificate path; defaults to the input with extension `cert`.
        #[arg(long)]
        out: Option<PathBuf>,
        file: PathBuf,
    },
    /// Harrop-normalize a derivation.
    Normalize {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the slash relation and print its trace.
    Slash {
        /// Sequent-set file used as the base.
        #[arg(long, conflicts_with = "derivation")]
        base: Option<PathBuf>,
        /// Use the analysis base of this derivation, and its antecedent as the default context.
        #[arg(long)]
        derivation: Option<PathBuf>,
        #[arg(long)]
        context: Option<String>,
        formula: String,
    },
    /// Decide a Horn clause file.
    Horn { file: PathBuf },
    /// Test immediate derivability against a sequent-set file.
    Idcheck {
        #[arg(long)]
        base: PathBuf,
        target: String,
        /// Certificate path; defaults to the base file with extension `cert`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the strictly positive disjunctions of a cedent.
    Spd { cedent: String },
    /// Machine encoding, derivation and decision.
    Tm {
        #[command(subcommand)]
        cmd: tm::TmCmd,
    },
    /// Intuitionistic validity of a sequent: prints `valid` (exit 0) or `invalid` (exit 1).
    Oracle { sequent: String },
    /// Batch runs over a derivation corpus.
    Corpus {
        #[command(subcommand)]
        cmd: CorpusCmd,
    },
}

#[derive(Subcommand, Debug)]
pub enum CorpusCmd {
    /// Check, extract and normalize every entry.
    Run {
        /// Read `*.njp` files from this directory instead of the bundled corpus.
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Generated entries added to the bundled ones.
        #[arg(long, default_value_t = DEFAULT_GENERATED)]
        count: usize,
        /// Write each derivation and its certificate here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs one command; output lines go to `out`.
pub fn run(cli: &Cli, out: &mut Vec<String>) -> Result<i32, Failure> {
    match &cli.cmd {
        Cmd::Check { file } => commands::check(file, out),
        Cmd::Extract { method, choices, out: dest, file } => commands::extract(*method, choices.as_deref(), dest.as_deref(), file, out),
        Cmd::Normalize { file, out: dest } => commands::normalize(cli.fuel, file, dest.as_deref(), out),
        Cmd::Slash { base, derivation, context, formula } => {
            commands::slash(base.as_deref(), derivation.as_deref(), context.as_deref(), formula, out)
        }
        Cmd::Horn { file } => commands::horn(file, out),
        Cmd::Idcheck { base, target, out: dest } => commands::idcheck(base, target, dest.as_deref(), out),
        Cmd::Spd { cedent } => commands::spd(cedent, out),
        Cmd::Tm { cmd } => tm::run(cmd, out),
        Cmd::Oracle { sequent } => commands::oracle(sequent, cli.oracle_cap, out),
        Cmd::Corpus { cmd: CorpusCmd::Run { dir, count, out: dest } } => {
            commands::corpus_run(cli, dir.as_deref(), *count, dest.as_deref(), out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut out = Vec::new();
    let code = match run(&cli, &mut out) {
        Ok(code) => code,
        Err(f) => {
            for line in &out {
                println!("{line}");
            }
            eprintln!("dpx: {}", f.message);
            return ExitCode::from(f.code as u8);
        }
    };
    for line in &out {
        println!("{line}");
    }
    ExitCode::from(code as u8)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("dpx").chain(args.iter().copied()))
    }

    #[test]
    fn argument_shapes() {
        let c = parse(&["extract", "--method", "slash", "--choices", "01", "d.njp"]).unwrap();
        assert!(matches!(c.cmd, Cmd::Extract { method: MethodArg::Slash, .. }));
        let c = parse(&["--seed", "9", "corpus", "run", "--count", "3"]).unwrap();
        assert_eq!(c.seed, 9);
        assert!(matches!(c.cmd, Cmd::Corpus { cmd: CorpusCmd::Run { count: 3, .. } }));
        let c = parse(&["tm", "decide", "--machine", "m1.tm", "--input", "1", "--fuel", "5"]).unwrap();
        assert_eq!(c.fuel, Some(5));
        assert!(parse(&["extract", "--method", "nope", "d.njp"]).is_err());
        assert!(parse(&["slash", "--base", "a", "--derivation", "b", "p"]).is_err());
    }

    #[test]
    fn defaults() {
        let c = parse(&["oracle", "=> p"]).unwrap();
        assert_eq!(c.oracle_cap, DEFAULT_CAP);
        assert_eq!(c.seed, DEFAULT_SEED);
    }
}

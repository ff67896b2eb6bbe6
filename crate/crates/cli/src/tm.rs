//! `dpx tm ...`

use std::path::{Path, PathBuf};

use clap::Subcommand;

use dpx::deduction::check_derivation;
use dpx::tmreduce::{build_dp_derivation, jl7_mismatches, Decider, TmEncoding, TmSpec};

use crate::io::{read_text, write_atomic, Failure, PRECONDITION, USAGE};

#[derive(Subcommand, Debug)]
pub enum TmCmd {
    /// Size of the encoding for an input length, or for one input.
    Encode {
        /// Machine file, or `m1` / `parity` for the bundled machines.
        #[arg(long)]
        machine: String,
        #[arg(long, conflicts_with = "input", required_unless_present = "input")]
        n: Option<usize>,
        #[arg(long)]
        input: Option<String>,
        /// Write the target sequent here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the derivation for an input length.
    Derive {
        #[arg(long)]
        machine: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide an input by extraction.
    Decide {
        #[arg(long)]
        machine: String,
        #[arg(long)]
        input: String,
    },
    /// Compare unit propagation over the input cedent with the run.
    CheckJl7 {
        #[arg(long)]
        machine: String,
        #[arg(long)]
        input: String,
    },
    /// Print the run on an input.
    Simulate {
        #[arg(long)]
        machine: String,
        #[arg(long)]
        input: String,
    },
}

pub fn load_machine(name: &str) -> Result<TmSpec, Failure> {
    let text = match name {
        "m1" => return Ok(TmSpec::m1()),
        "parity" => return Ok(TmSpec::parity()),
        path => read_text(Path::new(path))?,
    };
    TmSpec::parse(&text).map_err(|e| Failure::precondition(format!("{name}: {e}")))
}

fn input(m: &TmSpec, x: &str) -> Result<Vec<usize>, Failure> {
    m.parse_input(x).map_err(|e| Failure::new(USAGE, e.to_string()))
}

fn stats(e: &TmEncoding, out: &mut Vec<String>) {
    out.push(format!("n {}", e.n));
    out.push(format!("ell {}", e.ell));
    out.push(format!("formulas {}", e.delta_big.len()));
    out.push(format!("size {}", e.size()));
}

pub fn run(cmd: &TmCmd, out: &mut Vec<String>) -> Result<i32, Failure> {
    match cmd {
        TmCmd::Encode { machine, n, input: x, out: dest } => {
            let m = load_machine(machine)?;
            let x = x.as_deref().map(|x| input(&m, x)).transpose()?;
            let n = x.as_ref().map_or_else(|| n.unwrap_or(0), Vec::len);
            let e = TmEncoding::new(&m, n);
            stats(&e, out);
            if let Some(x) = &x {
                let k = e.input_to_choices(x).map_err(|err| Failure::precondition(err.to_string()))?;
                out.push(format!("choices {k}"));
                out.push(format!("initial {}", e.initial_for(x).map_err(|err| Failure::precondition(err.to_string()))?));
            }
            if let Some(p) = dest {
                let delta: Vec<String> = e.delta().iter().map(ToString::to_string).collect();
                write_atomic(p, &format!("{} => {}\n", delta.join(", "), e.goal()))?;
                out.push(p.display().to_string());
            }
            Ok(0)
        }
        TmCmd::Derive { machine, n, out: dest } => {
            let m = load_machine(machine)?;
            let e = TmEncoding::new(&m, *n);
            let d = build_dp_derivation(&e);
            check_derivation(&d).map_err(|err| Failure::precondition(err.to_string()))?;
            stats(&e, out);
            out.push(format!("nodes {}", d.node_count()));
            if let Some(p) = dest {
                write_atomic(p, &format!("{d}\n"))?;
                out.push(p.display().to_string());
            }
            Ok(0)
        }
        TmCmd::Decide { machine, input: x } => {
            let m = load_machine(machine)?;
            let x = input(&m, x)?;
            let d = Decider::new(&m, x.len())
                .decide(&x)
                .map_err(|e| Failure::precondition(e.to_string()))?;
            out.push(d.verdict.to_string());
            out.push(format!("choices {}", d.choices));
            out.push(format!("index {}", d.extraction.index));
            Ok(0)
        }
        TmCmd::CheckJl7 { machine, input: x } => {
            let m = load_machine(machine)?;
            let x = input(&m, x)?;
            let e = TmEncoding::new(&m, x.len());
            let bad = jl7_mismatches(&e, &x).map_err(|err| Failure::precondition(err.to_string()))?;
            if bad.is_empty() {
                out.push("ok".into());
                return Ok(0);
            }
            for b in &bad {
                let kind = if b.derived { "derived, not in run" } else { "in run, not derived" };
                out.push(format!("{} cell {} time {}: {kind}", m.symbol_name(b.symbol), b.i, b.t));
            }
            Ok(PRECONDITION)
        }
        TmCmd::Simulate { machine, input: x } => {
            let m = load_machine(machine)?;
            let x = input(&m, x)?;
            let run = m.simulate(&x).map_err(|e| Failure::precondition(e.to_string()))?;
            out.extend(run.display(&m).lines().map(str::to_string));
            out.push(if run.accepted(&m) { "accept" } else { "reject" }.into());
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn machine(name: &str) -> String {
        name.to_string()
    }

    #[test]
    fn decide_matches_simulation() {
        for (x, want) in [("1", "accept"), ("0", "reject"), ("10", "accept")] {
            let mut out = Vec::new();
            run(&TmCmd::Decide { machine: machine("m1"), input: x.into() }, &mut out).unwrap();
            assert_eq!(out[0], want, "{x}");
            let mut sim = Vec::new();
            run(&TmCmd::Simulate { machine: machine("m1"), input: x.into() }, &mut sim).unwrap();
            assert_eq!(sim.last().unwrap(), want);
        }
    }

    #[test]
    fn encode_and_jl7() {
        let mut out = Vec::new();
        run(&TmCmd::Encode { machine: machine("parity"), n: None, input: Some("11".into()), out: None }, &mut out).unwrap();
        assert_eq!(out[0], "n 2");
        assert_eq!(out[1], "ell 3");
        assert!(out[4].starts_with("choices "));
        let mut out = Vec::new();
        assert_eq!(run(&TmCmd::CheckJl7 { machine: machine("parity"), input: "101".into() }, &mut out).unwrap(), 0);
        assert_eq!(out, vec!["ok"]);
    }

    #[test]
    fn bad_machine_and_input() {
        assert_eq!(load_machine("/nonexistent/m.tm").unwrap_err().code, PRECONDITION);
        let e = run(&TmCmd::Decide { machine: machine("m1"), input: "2".into() }, &mut Vec::new()).unwrap_err();
        assert_eq!(e.code, USAGE);
    }
}

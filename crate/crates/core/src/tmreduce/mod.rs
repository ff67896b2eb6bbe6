//! Machines, their propositional encoding, and deciding acceptance through
//! disjunction-property extraction.

mod derive;
mod encode;
mod machine;

use std::collections::HashMap;

use thiserror::Error;

use crate::deduction::{check_derivation, NjDerivation};
use crate::extract::{extract_choice, ExtractError, ExtractionResult};
use crate::horn::{horn_satisfiability, HornClauseSet, HornOutcome};
use crate::syntax::{spd_enumerate, strengthen, Cedent, ChoiceVector, Formula};

pub use derive::build_dp_derivation;
pub use encode::{atom_name, ExclusiveOr, InitialBlock, Junction, StepRule, TmEncoding};
pub use machine::{Symbol, TmComputation, TmError, TmSpec};

pub fn simulate(m: &TmSpec, x: &[usize]) -> Result<TmComputation, TmError> {
    m.simulate(x)
}

pub fn encode(m: &TmSpec, n: usize) -> TmEncoding {
    TmEncoding::new(m, n)
}

/// `Γ(x,t)`.
pub fn encode_input(m: &TmSpec, x: &[usize], t: usize) -> Result<Cedent, TmError> {
    TmEncoding::new(m, x.len()).input_cedent(x, t)
}

pub fn input_to_choices(m: &TmSpec, x: &[usize]) -> Result<ChoiceVector, TmError> {
    TmEncoding::new(m, x.len()).input_to_choices(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
        })
    }
}

#[derive(Debug, Error)]
pub enum DecideError {
    #[error(transparent)]
    Machine(#[from] TmError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error("extracted disjunct {0} is neither goal atom")]
    Unexpected(Formula),
}

#[derive(Clone, Debug)]
pub struct Decision {
    pub verdict: Verdict,
    pub choices: ChoiceVector,
    pub extraction: ExtractionResult,
}

/// The encoding and derivation for one input length, shared by every input of that length.
pub struct Decider {
    pub encoding: TmEncoding,
    pub derivation: NjDerivation,
}

impl Decider {
    pub fn new(m: &TmSpec, n: usize) -> Decider {
        let encoding = TmEncoding::new(m, n);
        let derivation = build_dp_derivation(&encoding);
        Decider { encoding, derivation }
    }

    /// Extraction from `d(k)` with `k` the choices naming `x`; accepts iff the witness is `acc`.
    pub fn decide(&self, x: &[usize]) -> Result<Decision, DecideError> {
        let choices = self.encoding.input_to_choices(x)?;
        let extraction = extract_choice(&self.derivation, &choices)?;
        let picked = &extraction.target.succedent;
        let verdict = if picked == &self.encoding.acc {
            Verdict::Accept
        } else if picked == &self.encoding.rej {
            Verdict::Reject
        } else {
            return Err(DecideError::Unexpected(picked.clone()));
        };
        Ok(Decision { verdict, choices, extraction })
    }
}

/// Decides `x` with one [`Decider`] per input length.
#[derive(Default)]
pub struct DeciderCache {
    by_length: HashMap<usize, Decider>,
}

impl DeciderCache {
    pub fn decide(&mut self, m: &TmSpec, x: &[usize]) -> Result<Decision, DecideError> {
        self.by_length.entry(x.len()).or_insert_with(|| Decider::new(m, x.len())).decide(x)
    }
}

pub fn decide(m: &TmSpec, x: &[usize]) -> Result<Verdict, DecideError> {
    Ok(Decider::new(m, x.len()).decide(x)?.verdict)
}

/// A cell where unit propagation over `Γ(x,t)` disagrees with the run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jl7Mismatch {
    pub symbol: Symbol,
    pub i: usize,
    pub t: usize,
    pub derived: bool,
}

/// Compares, for every `a`, `1 ≤ i ≤ ℓ`, `t ≤ ℓ`, derivability of `P(a,i,t)` from `Γ(x,t)` with `σ_t[i] = a`.
pub fn jl7_mismatches(e: &TmEncoding, x: &[usize]) -> Result<Vec<Jl7Mismatch>, TmError> {
    let run = e.machine.simulate(x)?;
    let mut out = Vec::new();
    for t in 0..=e.ell {
        let clauses = HornClauseSet::new(e.horn_clauses(x, t)?);
        let model = match horn_satisfiability(&clauses) {
            HornOutcome::Satisfiable { model } => model,
            HornOutcome::Refuted(_) => {
                out.push(Jl7Mismatch { symbol: run.at(1, t), i: 1, t, derived: false });
                continue;
            }
        };
        for i in 1..=e.ell {
            for &s in &e.symbols {
                let derived = model.contains(e.atom(s, i, t));
                if derived != (run.at(i, t) == s) {
                    out.push(Jl7Mismatch { symbol: s, i, t, derived });
                }
            }
        }
    }
    Ok(out)
}

pub fn check_jl7(m: &TmSpec, x: &[usize]) -> Result<bool, TmError> {
    Ok(jl7_mismatches(&TmEncoding::new(m, x.len()), x)?.is_empty())
}

/// Whether the run's assignment satisfies `Δ(x) ∪ {α}`, with `Δ(x)` the strengthening of `Δ` naming `x`.
pub fn strengthened_satisfiable(e: &TmEncoding, x: &[usize]) -> Result<bool, TmError> {
    let k = e.input_to_choices(x)?;
    let en = spd_enumerate(&e.delta_big);
    let dx = strengthen(&e.delta_big, &en, &k).expect("choices match the enumeration");
    let truth = e.run_assignment(&e.machine.simulate(x)?);
    let value = |a: &str| truth.contains(a);
    Ok(dx.iter().chain(std::iter::once(&e.alpha_neg)).all(|g| g.evaluate(&value)))
}

/// Encoding size and derivation node count for one input length.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizePoint {
    pub n: usize,
    pub encoding_size: usize,
    pub node_count: usize,
}

pub fn measure(m: &TmSpec, n: usize) -> SizePoint {
    let e = TmEncoding::new(m, n);
    let d = build_dp_derivation(&e);
    debug_assert!(check_derivation(&d).is_ok());
    SizePoint { n, encoding_size: e.size(), node_count: d.node_count() }
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let cov: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let var: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(m: &TmSpec, x: &str) -> Vec<usize> {
        m.parse_input(x).unwrap()
    }

    #[test]
    fn m1_decides() {
        let m = TmSpec::m1();
        assert_eq!(decide(&m, &input(&m, "1")).unwrap(), Verdict::Accept);
        assert_eq!(decide(&m, &input(&m, "0")).unwrap(), Verdict::Reject);
    }

    #[test]
    fn decisions_match_runs_for_short_inputs() {
        for m in [TmSpec::m1(), TmSpec::parity()] {
            let mut cache = DeciderCache::default();
            for n in 1..=2 {
                for x in m.inputs_of_length(n) {
                    let d = cache.decide(&m, &x).unwrap();
                    assert!(d.extraction.validate());
                    let accepted = m.simulate(&x).unwrap().accepted(&m);
                    assert_eq!(d.verdict == Verdict::Accept, accepted, "{}", m.input_string(&x));
                }
            }
        }
    }

    #[test]
    fn jl7_examples() {
        let m = TmSpec::m1();
        let e = TmEncoding::new(&m, 1);
        let x = input(&m, "1");
        let clauses = HornClauseSet::new(e.horn_clauses(&x, 0).unwrap());
        let HornOutcome::Satisfiable { model } = horn_satisfiability(&clauses) else { panic!("refuted") };
        assert!(model.contains(e.atom(m.parse_symbol("s0/1").unwrap(), 1, 0)));
        assert!(!model.contains(e.atom(m.parse_symbol("s0/0").unwrap(), 1, 0)));
        for t in 0..=e.ell {
            assert!(model.contains(e.atom(Symbol::BLANK, 0, t)));
        }
        for m in [TmSpec::m1(), TmSpec::parity()] {
            for n in 1..=2 {
                for x in m.inputs_of_length(n) {
                    assert!(check_jl7(&m, &x).unwrap());
                }
            }
        }
    }

    #[test]
    fn side_condition_holds() {
        let m = TmSpec::parity();
        let e = TmEncoding::new(&m, 2);
        for x in m.inputs_of_length(2) {
            assert!(strengthened_satisfiable(&e, &x).unwrap());
        }
    }

    #[test]
    fn slope_of_known_powers() {
        let pts: Vec<(f64, f64)> = (1..=5).map(|n| (n as f64, 3.0 * (n as f64).powi(2))).collect();
        assert!((loglog_slope(&pts) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn measurements_grow() {
        let m = TmSpec::m1();
        let a = measure(&m, 1);
        let b = measure(&m, 2);
        assert!(a.encoding_size < b.encoding_size && a.node_count < b.node_count);
    }
}

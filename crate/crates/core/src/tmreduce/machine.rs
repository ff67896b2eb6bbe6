//! One-tape machines given by a local rule on symbol triples, and their runs.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// A cell content: a plain tape symbol or a head pair `(state, tape symbol)`.
///
/// Tape symbol `0` is always the blank `B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Tape(usize),
    Head(usize, usize),
}

impl Symbol {
    pub const BLANK: Symbol = Symbol::Tape(0);

    pub fn is_head(self) -> bool {
        matches!(self, Symbol::Head(..))
    }

    /// The tape symbol under the cell, dropping any state.
    pub fn plain(self) -> Symbol {
        match self {
            Symbol::Head(_, a) => Symbol::Tape(a),
            s => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TmError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("symbol {0:?} is not in the input alphabet")]
    BadInput(String),
    #[error("input is empty")]
    EmptyInput,
    #[error("step {t}: {count} head symbols after applying the rule (triple at position {position}: {triple})")]
    HeadCount { t: usize, count: usize, position: usize, triple: String },
    #[error("bound gives {ell} steps, fewer than the input length {n}")]
    BoundTooSmall { ell: usize, n: usize },
    #[error("step {t}: halting symbol at position 1 is not absorbing ({triple})")]
    NotAbsorbing { t: usize, triple: String },
    #[error("no halting symbol at position 1 after {0} steps")]
    NoVerdict(usize),
}

fn parse_err(line: usize, message: impl Into<String>) -> TmError {
    TmError::Parse { line, message: message.into() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TmSpec {
    pub states: Vec<String>,
    /// Tape alphabet, blank first.
    pub tape: Vec<String>,
    /// Indices into `tape`.
    pub input: Vec<usize>,
    pub start: usize,
    pub accept: usize,
    pub reject: usize,
    /// `ℓ = c0 + c1·n + c2·n²`.
    pub bound: [usize; 3],
    rules: HashMap<(Symbol, Symbol, Symbol), Symbol>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Any,
    Is(Symbol),
}

impl TmSpec {
    pub const M1_SOURCE: &'static str = include_str!("../../machines/m1.tm");
    pub const PARITY_SOURCE: &'static str = include_str!("../../machines/parity.tm");

    /// Accepts iff the first input symbol is `1`.
    pub fn m1() -> TmSpec {
        TmSpec::parse(TmSpec::M1_SOURCE).expect("bundled machine parses")
    }

    /// Accepts iff the input has an odd number of `1`s.
    pub fn parity() -> TmSpec {
        TmSpec::parse(TmSpec::PARITY_SOURCE).expect("bundled machine parses")
    }

    /// Builds a machine from an explicit rule table; unlisted triples are the identity.
    #[allow(clippy::too_many_arguments)]
    pub fn from_rules(
        states: Vec<String>,
        tape: Vec<String>,
        input: Vec<usize>,
        start: usize,
        accept: usize,
        reject: usize,
        bound: [usize; 3],
        rules: HashMap<(Symbol, Symbol, Symbol), Symbol>,
    ) -> TmSpec {
        TmSpec { states, tape, input, start, accept, reject, bound, rules }
    }

    /// Reads the text format. `*` in the first or third slot of a rule matches any symbol;
    /// a rule with fewer wildcards takes precedence.
    pub fn parse(text: &str) -> Result<TmSpec, TmError> {
        let mut header: HashMap<&str, (usize, Vec<&str>)> = HashMap::new();
        let mut rule_lines = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let no = no + 1;
            if let Some((key, rest)) = line.split_once(':') {
                let key = key.trim();
                if !["states", "input", "tape", "start", "accept", "reject", "bound"].contains(&key) {
                    return Err(parse_err(no, format!("unknown header {key:?}")));
                }
                if header.insert(key, (no, rest.split_whitespace().collect())).is_some() {
                    return Err(parse_err(no, format!("duplicate header {key:?}")));
                }
            } else {
                rule_lines.push((no, line));
            }
        }
        let get = |key: &str| header.get(key).ok_or_else(|| parse_err(0, format!("missing header {key:?}")));
        let states: Vec<String> = get("states")?.1.iter().map(|s| s.to_string()).collect();
        let mut tape = vec!["B".to_string()];
        if let Some((_, names)) = header.get("tape") {
            tape.extend(names.iter().filter(|&&n| n != "B").map(|s| s.to_string()));
        }
        let (input_line, input_names) = get("input")?;
        let mut input = Vec::new();
        for name in input_names {
            if *name == "B" {
                return Err(parse_err(*input_line, "blank in the input alphabet"));
            }
            if !tape.iter().any(|t| t == name) {
                tape.push(name.to_string());
            }
            input.push(tape.iter().position(|t| t == name).unwrap());
        }
        for (names, what) in [(&states, "state"), (&tape, "tape symbol")] {
            for (i, n) in names.iter().enumerate() {
                if n.is_empty() || !n.chars().all(|c| c.is_ascii_alphanumeric()) {
                    return Err(parse_err(0, format!("{what} {n:?} must be alphanumeric")));
                }
                if names[..i].contains(n) {
                    return Err(parse_err(0, format!("duplicate {what} {n:?}")));
                }
            }
        }
        for n in &input {
            if tape[*n].chars().count() != 1 {
                return Err(parse_err(*input_line, "input symbols must be single characters"));
            }
        }
        let state = |key: &str| -> Result<usize, TmError> {
            let (no, v) = get(key)?;
            match v.as_slice() {
                [name] => states.iter().position(|s| s == name).ok_or_else(|| parse_err(*no, format!("unknown state {name:?}"))),
                _ => Err(parse_err(*no, "expected one state")),
            }
        };
        let (start, accept, reject) = (state("start")?, state("accept")?, state("reject")?);
        if accept == reject {
            return Err(parse_err(0, "accept and reject states coincide"));
        }
        let (bound_line, coeffs) = get("bound")?;
        let bound: Vec<usize> = coeffs
            .iter()
            .map(|c| c.parse().map_err(|_| parse_err(*bound_line, format!("bad coefficient {c:?}"))))
            .collect::<Result<_, _>>()?;
        let bound: [usize; 3] = bound.try_into().map_err(|_| parse_err(*bound_line, "expected three coefficients"))?;

        let mut m = TmSpec { states, tape, input, start, accept, reject, bound, rules: HashMap::new() };
        let mut patterns: Vec<(usize, Slot, Symbol, Slot, Symbol)> = Vec::new();
        for (no, line) in rule_lines {
            let (lhs, rhs) = line.split_once("->").ok_or_else(|| parse_err(no, "expected `a b c -> d`"))?;
            let parts: Vec<&str> = lhs.split_whitespace().collect();
            let [a, b, c] = parts.as_slice() else {
                return Err(parse_err(no, "expected three symbols before `->`"));
            };
            let slot = |s: &str| -> Result<Slot, TmError> {
                if s == "*" {
                    Ok(Slot::Any)
                } else {
                    m.parse_symbol(s).map(Slot::Is).ok_or_else(|| parse_err(no, format!("unknown symbol {s:?}")))
                }
            };
            let b = m.parse_symbol(b).ok_or_else(|| parse_err(no, format!("unknown symbol {b:?}")))?;
            let d = m.parse_symbol(rhs.trim()).ok_or_else(|| parse_err(no, format!("unknown symbol {:?}", rhs.trim())))?;
            patterns.push((no, slot(a)?, b, slot(c)?, d));
        }
        let universe = m.symbols();
        let mut chosen: HashMap<(Symbol, Symbol, Symbol), (usize, usize, Symbol)> = HashMap::new();
        for (no, a, b, c, d) in patterns {
            let expand = |s: Slot| match s {
                Slot::Any => universe.clone(),
                Slot::Is(x) => vec![x],
            };
            let wild = (a == Slot::Any) as usize + (c == Slot::Any) as usize;
            for &x in &expand(a) {
                for &z in &expand(c) {
                    match chosen.get(&(x, b, z)) {
                        Some(&(w, prev, e)) if w == wild && e != d => {
                            return Err(parse_err(no, format!("conflicts with the rule on line {prev}")));
                        }
                        Some(&(w, _, _)) if w <= wild => {}
                        _ => {
                            chosen.insert((x, b, z), (wild, no, d));
                        }
                    }
                }
            }
        }
        m.rules = chosen.into_iter().filter(|(k, v)| k.1 != v.2).map(|(k, v)| (k, v.2)).collect();
        Ok(m)
    }

    /// `B`, a tape symbol name, or `q/a`.
    pub fn parse_symbol(&self, s: &str) -> Option<Symbol> {
        match s.split_once('/') {
            Some((q, a)) => Some(Symbol::Head(
                self.states.iter().position(|x| x == q)?,
                self.tape.iter().position(|x| x == a)?,
            )),
            None => Some(Symbol::Tape(self.tape.iter().position(|x| x == s)?)),
        }
    }

    pub fn symbol_name(&self, s: Symbol) -> String {
        match s {
            Symbol::Tape(a) => self.tape[a].clone(),
            Symbol::Head(q, a) => format!("{}/{}", self.states[q], self.tape[a]),
        }
    }

    /// `T ∪ (Q×T)`: plain symbols first, then head pairs state-major.
    pub fn symbols(&self) -> Vec<Symbol> {
        let t = self.tape.len();
        (0..t)
            .map(Symbol::Tape)
            .chain((0..self.states.len()).flat_map(|q| (0..t).map(move |a| Symbol::Head(q, a))))
            .collect()
    }

    /// Position of `s` in [`TmSpec::symbols`].
    pub fn symbol_index(&self, s: Symbol) -> usize {
        match s {
            Symbol::Tape(a) => a,
            Symbol::Head(q, a) => self.tape.len() * (q + 1) + a,
        }
    }

    pub fn symbol_count(&self) -> usize {
        self.tape.len() * (self.states.len() + 1)
    }

    pub fn accept_symbol(&self) -> Symbol {
        Symbol::Head(self.accept, 0)
    }

    pub fn reject_symbol(&self) -> Symbol {
        Symbol::Head(self.reject, 0)
    }

    /// The local rule `f`.
    pub fn apply(&self, a: Symbol, b: Symbol, c: Symbol) -> Symbol {
        self.rules.get(&(a, b, c)).copied().unwrap_or(b)
    }

    /// Triples where `f` differs from the identity, sorted.
    pub fn explicit_rules(&self) -> Vec<((Symbol, Symbol, Symbol), Symbol)> {
        let mut v: Vec<_> = self.rules.iter().map(|(k, v)| (*k, *v)).collect();
        v.sort();
        v
    }

    pub fn ell(&self, n: usize) -> usize {
        self.bound[0] + self.bound[1] * n + self.bound[2] * n * n
    }

    /// Reads one character per input symbol.
    pub fn parse_input(&self, x: &str) -> Result<Vec<usize>, TmError> {
        let out = x
            .chars()
            .map(|c| {
                let name = c.to_string();
                self.input.iter().copied().find(|&a| self.tape[a] == name).ok_or(TmError::BadInput(name))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if out.is_empty() {
            return Err(TmError::EmptyInput);
        }
        Ok(out)
    }

    pub fn input_string(&self, x: &[usize]) -> String {
        x.iter().map(|&a| self.tape[a].as_str()).collect()
    }

    /// All inputs of length `n`, in lexicographic order of the input alphabet listing.
    pub fn inputs_of_length(&self, n: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|p| {
                    self.input.iter().map(move |&a| {
                        let mut q = p.clone();
                        q.push(a);
                        q
                    })
                })
                .collect();
        }
        out
    }

    fn triple_text(&self, a: Symbol, b: Symbol, c: Symbol) -> String {
        format!(
            "{} {} {} -> {}",
            self.symbol_name(a),
            self.symbol_name(b),
            self.symbol_name(c),
            self.symbol_name(self.apply(a, b, c))
        )
    }

    /// Runs `ℓ` steps from `σ_0`, checking the one-head and absorption invariants.
    pub fn simulate(&self, x: &[usize]) -> Result<TmComputation, TmError> {
        let n = x.len();
        if n == 0 {
            return Err(TmError::EmptyInput);
        }
        if let Some(&bad) = x.iter().find(|a| !self.input.contains(a)) {
            return Err(TmError::BadInput(self.tape.get(bad).cloned().unwrap_or_else(|| bad.to_string())));
        }
        let ell = self.ell(n);
        if ell < n {
            return Err(TmError::BoundTooSmall { ell, n });
        }
        let mut sigma = vec![Symbol::BLANK; ell + 2];
        sigma[1] = Symbol::Head(self.start, x[0]);
        for (i, &a) in x.iter().enumerate().skip(1) {
            sigma[i + 1] = Symbol::Tape(a);
        }
        let mut ids = vec![sigma];
        for t in 0..ell {
            let cur = &ids[t];
            let mut next = vec![Symbol::BLANK; ell + 2];
            for i in 1..=ell {
                next[i] = self.apply(cur[i - 1], cur[i], cur[i + 1]);
            }
            let heads: Vec<usize> = (1..=ell).filter(|&i| next[i].is_head()).collect();
            if heads.len() != 1 {
                let position = heads.get(1).or(heads.first()).copied().unwrap_or(1);
                return Err(TmError::HeadCount {
                    t: t + 1,
                    count: heads.len(),
                    position,
                    triple: self.triple_text(cur[position - 1], cur[position], cur[position + 1]),
                });
            }
            if (cur[1] == self.accept_symbol() || cur[1] == self.reject_symbol()) && next != *cur {
                let i = (1..=ell).find(|&i| next[i] != cur[i]).unwrap();
                return Err(TmError::NotAbsorbing { t: t + 1, triple: self.triple_text(cur[i - 1], cur[i], cur[i + 1]) });
            }
            ids.push(next);
        }
        let last = ids[ell][1];
        if last != self.accept_symbol() && last != self.reject_symbol() {
            return Err(TmError::NoVerdict(ell));
        }
        Ok(TmComputation { ids })
    }
}

/// `σ_0 … σ_ℓ`, each of length `ℓ+2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TmComputation {
    pub ids: Vec<Vec<Symbol>>,
}

impl TmComputation {
    pub fn ell(&self) -> usize {
        self.ids.len() - 1
    }

    pub fn at(&self, i: usize, t: usize) -> Symbol {
        self.ids[t][i]
    }

    pub fn accepted(&self, m: &TmSpec) -> bool {
        self.ids[self.ell()][1] == m.accept_symbol()
    }

    pub fn display(&self, m: &TmSpec) -> String {
        let mut out = String::new();
        for (t, sigma) in self.ids.iter().enumerate() {
            let cells: Vec<String> = sigma.iter().map(|&s| m.symbol_name(s)).collect();
            out.push_str(&format!("{t}: {}\n", cells.join(" ")));
        }
        out
    }
}

impl fmt::Display for TmSpec {
    /// The text format, with every non-identity triple listed.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states: {}", self.states.join(" "))?;
        let input: Vec<&str> = self.input.iter().map(|&a| self.tape[a].as_str()).collect();
        writeln!(f, "input: {}", input.join(" "))?;
        writeln!(f, "tape: {}", self.tape.join(" "))?;
        writeln!(f, "start: {}", self.states[self.start])?;
        writeln!(f, "accept: {}", self.states[self.accept])?;
        writeln!(f, "reject: {}", self.states[self.reject])?;
        writeln!(f, "bound: {} {} {}", self.bound[0], self.bound[1], self.bound[2])?;
        for ((a, b, c), _) in self.explicit_rules() {
            writeln!(f, "{}", self.triple_text(a, b, c))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(m: &TmSpec, x: &str) -> TmComputation {
        m.simulate(&m.parse_input(x).unwrap()).unwrap()
    }

    #[test]
    fn m1_runs() {
        let m = TmSpec::m1();
        assert_eq!(m.symbol_count(), 12);
        let c = run(&m, "1");
        assert_eq!(c.ell(), 2);
        assert_eq!(m.symbol_name(c.at(1, 0)), "s0/1");
        assert_eq!(c.at(1, 1), m.accept_symbol());
        assert_eq!(c.at(1, 2), m.accept_symbol());
        assert!(c.accepted(&m));
        let c = run(&m, "0");
        assert_eq!(c.at(1, 2), m.reject_symbol());
        assert!(!c.accepted(&m));
    }

    #[test]
    fn boundary_cells_stay_blank() {
        for m in [TmSpec::m1(), TmSpec::parity()] {
            for n in 1..=3 {
                for x in m.inputs_of_length(n) {
                    let c = m.simulate(&x).unwrap();
                    for sigma in &c.ids {
                        assert_eq!(sigma.len(), c.ell() + 2);
                        assert_eq!(sigma[0], Symbol::BLANK);
                        assert_eq!(sigma[c.ell() + 1], Symbol::BLANK);
                        assert_eq!(sigma.iter().filter(|s| s.is_head()).count(), 1);
                    }
                }
            }
        }
    }

    #[test]
    fn parity_matches_count() {
        let m = TmSpec::parity();
        assert_eq!(m.symbol_count(), 15);
        for n in 1..=5 {
            for x in m.inputs_of_length(n) {
                let s = m.input_string(&x);
                let odd = s.chars().filter(|&c| c == '1').count() % 2 == 1;
                assert_eq!(m.simulate(&x).unwrap().accepted(&m), odd, "{s}");
            }
        }
        let c = run(&m, "10");
        assert_eq!(c.display(&m).lines().nth(1).unwrap(), "1: B o/0 B B B");
    }

    #[test]
    fn round_trip_text() {
        for m in [TmSpec::m1(), TmSpec::parity()] {
            assert_eq!(TmSpec::parse(&m.to_string()).unwrap(), m);
        }
    }

    #[test]
    fn symbol_indexing() {
        let m = TmSpec::parity();
        for (i, s) in m.symbols().into_iter().enumerate() {
            assert_eq!(m.symbol_index(s), i);
            assert_eq!(m.parse_symbol(&m.symbol_name(s)), Some(s));
        }
        assert_eq!(m.symbol_name(m.accept_symbol()), "sa/B");
    }

    #[test]
    fn parse_errors() {
        let base = "states: s0 sa sr\ninput: 0 1\nstart: s0\naccept: sa\nreject: sr\nbound: 1 1 0\n";
        assert!(TmSpec::parse(base).is_ok());
        let e = TmSpec::parse(&format!("{base}s0/1 B B -> zz\n")).unwrap_err();
        assert!(matches!(e, TmError::Parse { line: 7, .. }));
        let e = TmSpec::parse(&format!("{base}B s0/1 B -> sa/B\nB s0/1 B -> sr/B\n")).unwrap_err();
        assert!(e.to_string().contains("conflicts"));
        assert!(TmSpec::parse(&base.replace("bound: 1 1 0", "bound: 1 1")).is_err());
        assert!(TmSpec::parse(&base.replace("accept: sa", "accept: sr")).is_err());
        let specific = TmSpec::parse(&format!("{base}* s0/1 * -> sa/B\nB s0/1 B -> sr/B\n")).unwrap();
        let (b, h) = (Symbol::BLANK, specific.parse_symbol("s0/1").unwrap());
        assert_eq!(specific.apply(b, h, b), specific.reject_symbol());
        assert_eq!(specific.apply(Symbol::Tape(1), h, b), specific.accept_symbol());
    }

    #[test]
    fn invariant_violations_are_reported() {
        let base = "states: s0 sa sr\ninput: 0 1\nstart: s0\naccept: sa\nreject: sr\nbound: 1 1 0\n";
        let two_heads = TmSpec::parse(&format!("{base}* s0/1 * -> sa/B\n* s0/0 * -> sr/B\n* B B -> sa/B\n")).unwrap();
        let e = two_heads.simulate(&two_heads.parse_input("1").unwrap()).unwrap_err();
        assert!(matches!(e, TmError::HeadCount { t: 1, count: 2, .. }), "{e}");
        let restless = TmSpec::parse(&format!("{base}* s0/1 * -> sa/B\n* s0/0 * -> sr/B\n* sa/B * -> sr/B\n")).unwrap();
        let e = restless.simulate(&restless.parse_input("1").unwrap()).unwrap_err();
        assert!(matches!(e, TmError::NotAbsorbing { .. }), "{e}");
        assert!(matches!(TmSpec::m1().parse_input("2"), Err(TmError::BadInput(_))));
    }
}

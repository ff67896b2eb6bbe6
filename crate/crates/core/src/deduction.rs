//! NJp derivations: local checking, the s-expression file format, and
//! surgery (weakening, grafting, ex falso, strengthening, `d(k)`).

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::syntax::{
    choices_for, parse_sequent, strengthen_formula, Cedent, ChoiceVector, Formula, Kind, ParseError, PathChoices,
    Sequent, SpdEnumeration, Step, StrengthenError,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Ax,
    OrE,
    OrI0,
    OrI1,
    AndE0,
    AndE1,
    AndI,
    ImpE,
    ImpI,
}

impl Rule {
    pub const ALL: [Rule; 9] =
        [Rule::Ax, Rule::OrE, Rule::OrI0, Rule::OrI1, Rule::AndE0, Rule::AndE1, Rule::AndI, Rule::ImpE, Rule::ImpI];

    pub fn arity(self) -> usize {
        match self {
            Rule::Ax => 0,
            Rule::OrE => 3,
            Rule::AndI | Rule::ImpE => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::Ax => "ax",
            Rule::OrE => "orE",
            Rule::OrI0 => "orI0",
            Rule::OrI1 => "orI1",
            Rule::AndE0 => "andE0",
            Rule::AndE1 => "andE1",
            Rule::AndI => "andI",
            Rule::ImpE => "impE",
            Rule::ImpI => "impI",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == name)
    }

    pub fn is_introduction(self) -> bool {
        matches!(self, Rule::OrI0 | Rule::OrI1 | Rule::AndI | Rule::ImpI)
    }

    pub fn is_elimination(self) -> bool {
        matches!(self, Rule::OrE | Rule::AndE0 | Rule::AndE1 | Rule::ImpE)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A derivation tree; every node stores its conclusion.
#[derive(Clone, PartialEq, Eq)]
pub struct NjDerivation {
    rule: Rule,
    conclusion: Sequent,
    premises: Vec<NjDerivation>,
}

impl NjDerivation {
    /// Unchecked constructor. Run [`check_derivation`] on anything built this way.
    pub fn new(rule: Rule, conclusion: Sequent, premises: Vec<NjDerivation>) -> NjDerivation {
        NjDerivation { rule, conclusion, premises }
    }

    pub fn rule(&self) -> Rule {
        self.rule
    }

    pub fn conclusion(&self) -> &Sequent {
        &self.conclusion
    }

    pub fn antecedent(&self) -> &Cedent {
        &self.conclusion.antecedent
    }

    pub fn succedent(&self) -> &Formula {
        &self.conclusion.succedent
    }

    pub fn premises(&self) -> &[NjDerivation] {
        &self.premises
    }

    /// Node at a premise-index path.
    pub fn at(&self, path: &[usize]) -> Option<&NjDerivation> {
        let mut cur = self;
        for &i in path {
            cur = cur.premises.get(i)?;
        }
        Some(cur)
    }

    /// Replaces the node at `path`.
    pub fn replace_at(&self, path: &[usize], with: NjDerivation) -> Option<NjDerivation> {
        match path.split_first() {
            None => Some(with),
            Some((&i, rest)) => {
                let child = self.premises.get(i)?.replace_at(rest, with)?;
                let mut premises = self.premises.clone();
                premises[i] = child;
                Some(NjDerivation { rule: self.rule, conclusion: self.conclusion.clone(), premises })
            }
        }
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        let mut stack = vec![self];
        while let Some(d) = stack.pop() {
            n += 1;
            stack.extend(d.premises.iter());
        }
        n
    }

    pub fn depth(&self) -> usize {
        1 + self.premises.iter().map(NjDerivation::depth).max().unwrap_or(0)
    }

    /// Every sequent occurring in the derivation.
    pub fn sequents(&self) -> BTreeSet<Sequent> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(d) = stack.pop() {
            out.insert(d.conclusion.clone());
            stack.extend(d.premises.iter());
        }
        out
    }

    pub fn ax(ctx: Cedent, f: Formula) -> NjDerivation {
        NjDerivation::new(Rule::Ax, Sequent::new(ctx, f), Vec::new())
    }

    /// Panics unless both premises share an antecedent.
    pub fn and_i(left: NjDerivation, right: NjDerivation) -> NjDerivation {
        assert!(left.antecedent() == right.antecedent(), "andI premises differ in antecedent");
        let succ = Formula::and(left.succedent().clone(), right.succedent().clone());
        let ctx = left.antecedent().clone();
        NjDerivation::new(Rule::AndI, Sequent::new(ctx, succ), vec![left, right])
    }

    /// Panics unless the premise concludes a conjunction.
    pub fn and_e(side: usize, d: NjDerivation) -> NjDerivation {
        let (a, b) = d.succedent().as_and().expect("andE on a non-conjunction");
        let succ = if side == 0 { a.clone() } else { b.clone() };
        let rule = if side == 0 { Rule::AndE0 } else { Rule::AndE1 };
        NjDerivation::new(rule, Sequent::new(d.antecedent().clone(), succ), vec![d])
    }

    /// Panics unless the major premise concludes an implication.
    pub fn imp_e(major: NjDerivation, minor: NjDerivation) -> NjDerivation {
        let (_, b) = major.succedent().as_imp().expect("impE on a non-implication");
        let conclusion = Sequent::new(major.antecedent().clone(), b.clone());
        NjDerivation::new(Rule::ImpE, conclusion, vec![major, minor])
    }

    /// `ctx ⇒ hyp ⊃ β` from a derivation of `ctx ∪ {hyp} ⇒ β`.
    pub fn imp_i(ctx: Cedent, hyp: Formula, d: NjDerivation) -> NjDerivation {
        let succ = Formula::imp(hyp, d.succedent().clone());
        NjDerivation::new(Rule::ImpI, Sequent::new(ctx, succ), vec![d])
    }

    /// Side 0 concludes `α ∨ other`, side 1 concludes `other ∨ α`.
    pub fn or_i(side: usize, d: NjDerivation, other: Formula) -> NjDerivation {
        let (succ, rule) = if side == 0 {
            (Formula::or(d.succedent().clone(), other), Rule::OrI0)
        } else {
            (Formula::or(other, d.succedent().clone()), Rule::OrI1)
        };
        NjDerivation::new(rule, Sequent::new(d.antecedent().clone(), succ), vec![d])
    }

    pub fn or_e(major: NjDerivation, left: NjDerivation, right: NjDerivation) -> NjDerivation {
        let conclusion = Sequent::new(major.antecedent().clone(), left.succedent().clone());
        NjDerivation::new(Rule::OrE, conclusion, vec![major, left, right])
    }
}

impl fmt::Display for NjDerivation {
    /// The s-expression file format, one node per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(d: &NjDerivation, indent: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "{:indent$}({} \"{}\"", "", d.rule, d.conclusion, indent = indent)?;
            for p in &d.premises {
                writeln!(f)?;
                go(p, indent + 2, f)?;
            }
            write!(f, ")")
        }
        go(self, 0, f)
    }
}

impl fmt::Debug for NjDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("offset {pos}: bad sequent: {source}")]
    Sequent { pos: usize, source: ParseError },
    #[error("offset {pos}: rule {rule} takes {expected} premises, found {found}")]
    Arity { pos: usize, rule: Rule, expected: usize, found: usize },
}

/// Parses the s-expression format `(RULE "<sequent>" <premise>*)`.
pub fn parse_derivation(text: &str) -> Result<NjDerivation, FormatError> {
    struct P<'a> {
        s: &'a str,
        i: usize,
    }
    impl P<'_> {
        fn skip(&mut self) {
            let b = self.s.as_bytes();
            while self.i < b.len() {
                if b[self.i].is_ascii_whitespace() {
                    self.i += 1;
                } else if b[self.i] == b';' || b[self.i] == b'#' {
                    while self.i < b.len() && b[self.i] != b'\n' {
                        self.i += 1;
                    }
                } else {
                    break;
                }
            }
        }
        fn err<T>(&self, message: &str) -> Result<T, FormatError> {
            Err(FormatError::Syntax { pos: self.i, message: message.to_string() })
        }
        fn node(&mut self) -> Result<NjDerivation, FormatError> {
            self.skip();
            let start = self.i;
            if !self.s[self.i..].starts_with('(') {
                return self.err("expected '('");
            }
            self.i += 1;
            self.skip();
            let name_start = self.i;
            while self.i < self.s.len() && self.s.as_bytes()[self.i].is_ascii_alphanumeric() {
                self.i += 1;
            }
            let name = &self.s[name_start..self.i];
            let Some(rule) = Rule::from_name(name) else {
                return Err(FormatError::Syntax { pos: name_start, message: format!("unknown rule {name:?}") });
            };
            self.skip();
            if !self.s[self.i..].starts_with('"') {
                return self.err("expected a quoted sequent");
            }
            let q = self.i + 1;
            let Some(len) = self.s[q..].find('"') else {
                return self.err("unterminated string");
            };
            let conclusion = parse_sequent(&self.s[q..q + len])
                .map_err(|e| FormatError::Sequent { pos: q + e.pos, source: e })?;
            self.i = q + len + 1;
            let mut premises = Vec::new();
            loop {
                self.skip();
                if self.s[self.i..].starts_with(')') {
                    self.i += 1;
                    break;
                }
                if self.i >= self.s.len() {
                    return self.err("unexpected end of input");
                }
                premises.push(self.node()?);
            }
            if premises.len() != rule.arity() {
                return Err(FormatError::Arity { pos: start, rule, expected: rule.arity(), found: premises.len() });
            }
            Ok(NjDerivation::new(rule, conclusion, premises))
        }
    }
    let mut p = P { s: text, i: 0 };
    let d = p.node()?;
    p.skip();
    if p.i != text.len() {
        return p.err("trailing input");
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckFailure {
    #[error("{rule} takes {expected} premises, found {found}")]
    BadArity { rule: Rule, expected: usize, found: usize },
    #[error("antecedent of premise {premise} does not match")]
    AntecedentMismatch { premise: usize },
    #[error("bottom axiom needs an atomic succedent, found {0}")]
    NonAtomicBottomAxiom(Formula),
    #[error("succedent is not an axiom instance")]
    NotAnAxiom,
    #[error("connective mismatch: {0}")]
    ConnectiveMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("node {}: {reason}", display_path(.path))]
pub struct CheckError {
    /// Premise indices from the root.
    pub path: Vec<usize>,
    pub reason: CheckFailure,
}

pub fn display_path(path: &[usize]) -> String {
    let mut s = String::from("root");
    for i in path {
        s.push('.');
        s.push_str(&i.to_string());
    }
    s
}

fn check_node(d: &NjDerivation) -> Result<(), CheckFailure> {
    let rule = d.rule;
    if d.premises.len() != rule.arity() {
        return Err(CheckFailure::BadArity { rule, expected: rule.arity(), found: d.premises.len() });
    }
    let gamma = d.antecedent();
    let succ = d.succedent();
    let same = |i: usize| -> Result<(), CheckFailure> {
        if d.premises[i].antecedent() == gamma {
            Ok(())
        } else {
            Err(CheckFailure::AntecedentMismatch { premise: i })
        }
    };
    let extended = |i: usize, extra: &Formula| -> Result<(), CheckFailure> {
        if d.premises[i].antecedent().is_extension(gamma, extra) {
            Ok(())
        } else {
            Err(CheckFailure::AntecedentMismatch { premise: i })
        }
    };
    let mismatch = |what: &str| Err(CheckFailure::ConnectiveMismatch(what.to_string()));
    match rule {
        Rule::Ax => {
            if gamma.contains(succ) {
                Ok(())
            } else if gamma.contains(&Formula::bottom()) {
                if succ.is_atom() {
                    Ok(())
                } else {
                    Err(CheckFailure::NonAtomicBottomAxiom(succ.clone()))
                }
            } else {
                Err(CheckFailure::NotAnAxiom)
            }
        }
        Rule::OrE => {
            same(0)?;
            let Some((a, b)) = d.premises[0].succedent().as_or() else {
                return mismatch("major premise of orE is not a disjunction");
            };
            extended(1, a)?;
            extended(2, b)?;
            if d.premises[1].succedent() != succ || d.premises[2].succedent() != succ {
                return mismatch("minor premises of orE must conclude the succedent");
            }
            Ok(())
        }
        Rule::OrI0 | Rule::OrI1 => {
            same(0)?;
            let Some((a, b)) = succ.as_or() else {
                return mismatch("orI must conclude a disjunction");
            };
            let side = if rule == Rule::OrI0 { a } else { b };
            if d.premises[0].succedent() != side {
                return mismatch("orI premise is not the chosen disjunct");
            }
            Ok(())
        }
        Rule::AndE0 | Rule::AndE1 => {
            same(0)?;
            let Some((a, b)) = d.premises[0].succedent().as_and() else {
                return mismatch("andE premise is not a conjunction");
            };
            let side = if rule == Rule::AndE0 { a } else { b };
            if side != succ {
                return mismatch("andE conclusion is not the projected conjunct");
            }
            Ok(())
        }
        Rule::AndI => {
            same(0)?;
            same(1)?;
            let Some((a, b)) = succ.as_and() else {
                return mismatch("andI must conclude a conjunction");
            };
            if d.premises[0].succedent() != a || d.premises[1].succedent() != b {
                return mismatch("andI premises do not match the conjuncts");
            }
            Ok(())
        }
        Rule::ImpE => {
            same(0)?;
            same(1)?;
            let Some((a, b)) = d.premises[0].succedent().as_imp() else {
                return mismatch("major premise of impE is not an implication");
            };
            if d.premises[1].succedent() != a || b != succ {
                return mismatch("impE minor premise or conclusion does not fit the major premise");
            }
            Ok(())
        }
        Rule::ImpI => {
            let Some((a, b)) = succ.as_imp() else {
                return mismatch("impI must conclude an implication");
            };
            extended(0, a)?;
            if d.premises[0].succedent() != b {
                return mismatch("impI premise does not conclude the consequent");
            }
            Ok(())
        }
    }
}

/// Checks every node; reports the first failure in preorder.
pub fn check_derivation(d: &NjDerivation) -> Result<(), CheckError> {
    fn go(d: &NjDerivation, path: &mut Vec<usize>) -> Result<(), CheckError> {
        check_node(d).map_err(|reason| CheckError { path: path.clone(), reason })?;
        for (i, p) in d.premises.iter().enumerate() {
            path.push(i);
            go(p, path)?;
            path.pop();
        }
        Ok(())
    }
    go(d, &mut Vec::new())
}

/// Maps antecedents node by node, sharing results for shared cedents.
struct CedentMap<F: FnMut(&Cedent) -> Cedent> {
    memo: HashMap<usize, Cedent>,
    f: F,
}

impl<F: FnMut(&Cedent) -> Cedent> CedentMap<F> {
    fn new(f: F) -> Self {
        CedentMap { memo: HashMap::new(), f }
    }

    fn get(&mut self, c: &Cedent) -> Cedent {
        if let Some(hit) = self.memo.get(&c.ptr_key()) {
            return hit.clone();
        }
        let out = (self.f)(c);
        self.memo.insert(c.ptr_key(), out.clone());
        out
    }
}

/// Adds `extra` to every antecedent.
pub fn weaken(d: &NjDerivation, extra: &Cedent) -> NjDerivation {
    if extra.is_empty() || extra.is_subset(d.antecedent()) && is_uniform_superset(d, extra) {
        return d.clone();
    }
    let mut map = CedentMap::new(|c: &Cedent| c.union(extra));
    fn go<F: FnMut(&Cedent) -> Cedent>(d: &NjDerivation, map: &mut CedentMap<F>) -> NjDerivation {
        let premises = d.premises.iter().map(|p| go(p, map)).collect();
        NjDerivation::new(d.rule, Sequent::new(map.get(d.antecedent()), d.succedent().clone()), premises)
    }
    go(d, &mut map)
}

fn is_uniform_superset(d: &NjDerivation, extra: &Cedent) -> bool {
    let mut stack = vec![d];
    while let Some(n) = stack.pop() {
        if !extra.is_subset(n.antecedent()) {
            return false;
        }
        stack.extend(n.premises.iter());
    }
    true
}

/// A derivation of `Γ ⇒ target` from one of `Γ ⇒ ⊥`.
pub fn ex_falso(d0: &NjDerivation, target: &Formula) -> NjDerivation {
    let ctx = d0.antecedent().clone();
    match target.kind() {
        Kind::Bottom => d0.clone(),
        Kind::Atom(_) => {
            let inner = NjDerivation::ax(ctx.with(&Formula::bottom()), target.clone());
            NjDerivation::imp_e(NjDerivation::imp_i(ctx, Formula::bottom(), inner), d0.clone())
        }
        Kind::And(a, b) => NjDerivation::and_i(ex_falso(d0, a), ex_falso(d0, b)),
        Kind::Or(a, b) => NjDerivation::or_i(0, ex_falso(d0, a), b.clone()),
        Kind::Imp(a, b) => {
            let inner = ex_falso(&weaken(d0, &Cedent::singleton(a.clone())), b);
            NjDerivation::imp_i(ctx, a.clone(), inner)
        }
    }
}

/// True for the `ex_falso` pattern `impE(impI(ax ⊥,X ⇒ p), d)` with `p` atomic.
pub fn is_ex_falso_gadget(d: &NjDerivation) -> bool {
    if d.rule != Rule::ImpE {
        return false;
    }
    let major = &d.premises[0];
    if major.rule != Rule::ImpI {
        return false;
    }
    let Some((hyp, goal)) = major.succedent().as_imp() else {
        return false;
    };
    let body = &major.premises[0];
    hyp.is_bottom() && goal.is_atom() && body.rule == Rule::Ax && !body.antecedent().contains(goal)
}

/// Turns `X ⇒ ⊥` into `X ⇒ p`, structurally where possible.
fn bottom_to_atom(d: NjDerivation, p: &Formula) -> NjDerivation {
    match d.rule {
        Rule::Ax => NjDerivation::ax(d.antecedent().clone(), p.clone()),
        Rule::OrE => {
            let mut it = d.premises.into_iter();
            let (major, left, right) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
            NjDerivation::or_e(major, bottom_to_atom(left, p), bottom_to_atom(right, p))
        }
        _ => ex_falso(&d, p),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraftError {
    #[error("hypothesis {0} does not occur in the antecedent of the receiving derivation")]
    HypothesisMismatch(Formula),
}

struct Grafter<'a> {
    d0: &'a NjDerivation,
    alpha: &'a Formula,
    gamma: &'a Cedent,
    retain: bool,
    free: HashMap<usize, Cedent>,
    bound: HashMap<usize, Cedent>,
}

impl Grafter<'_> {
    fn map(&mut self, c: &Cedent, removing: bool) -> Cedent {
        let memo = if removing { &mut self.free } else { &mut self.bound };
        if let Some(hit) = memo.get(&c.ptr_key()) {
            return hit.clone();
        }
        let base = if removing && !self.retain { c.without(self.alpha) } else { c.clone() };
        let out = base.union(self.gamma);
        memo.insert(c.ptr_key(), out.clone());
        out
    }

    fn go(&mut self, d: &NjDerivation, removing: bool) -> NjDerivation {
        let ant = self.map(d.antecedent(), removing);
        let succ = d.succedent();
        match d.rule {
            Rule::Ax => {
                if removing && succ == self.alpha {
                    return weaken(self.d0, &ant);
                }
                if ant.contains(succ) || (succ.is_atom() && ant.contains(&Formula::bottom())) {
                    return NjDerivation::ax(ant, succ.clone());
                }
                // Only reachable when the removed hypothesis is ⊥.
                bottom_to_atom(weaken(self.d0, &ant), succ)
            }
            Rule::ImpI => {
                let hyp = succ.as_imp().map(|(a, _)| a.clone());
                let inner = removing && hyp.as_ref() != Some(self.alpha);
                let p = self.go(&d.premises[0], inner);
                NjDerivation::new(Rule::ImpI, Sequent::new(ant, succ.clone()), vec![p])
            }
            Rule::OrE => {
                let major = self.go(&d.premises[0], removing);
                let (a, b) = match d.premises[0].succedent().as_or() {
                    Some((a, b)) => (Some(a.clone()), Some(b.clone())),
                    None => (None, None),
                };
                let left = self.go(&d.premises[1], removing && a.as_ref() != Some(self.alpha));
                let right = self.go(&d.premises[2], removing && b.as_ref() != Some(self.alpha));
                NjDerivation::new(Rule::OrE, Sequent::new(ant, succ.clone()), vec![major, left, right])
            }
            rule => {
                let premises = d.premises.iter().map(|p| self.go(p, removing)).collect();
                NjDerivation::new(rule, Sequent::new(ant, succ.clone()), premises)
            }
        }
    }
}

fn graft_impl(d0: &NjDerivation, d1: &NjDerivation, retain: bool) -> Result<NjDerivation, GraftError> {
    let alpha = d0.succedent();
    if !d1.antecedent().contains(alpha) {
        return Err(GraftError::HypothesisMismatch(alpha.clone()));
    }
    let mut g = Grafter {
        d0,
        alpha,
        gamma: d0.antecedent(),
        retain,
        free: HashMap::new(),
        bound: HashMap::new(),
    };
    Ok(g.go(d1, true))
}

/// Substitutes `d0: Γ ⇒ α` for the hypothesis `α` of `d1: α,Δ ⇒ β`, concluding `Γ,Δ ⇒ β`.
///
/// Uses of `α` discharged inside `d1` stay axioms.
pub fn graft(d0: &NjDerivation, d1: &NjDerivation) -> Result<NjDerivation, GraftError> {
    graft_impl(d0, d1, false)
}

/// As [`graft`], but `α` stays in the antecedents because it also belongs to `Δ`.
pub fn graft_retaining(d0: &NjDerivation, d1: &NjDerivation) -> Result<NjDerivation, GraftError> {
    graft_impl(d0, d1, true)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurgeryError {
    #[error(transparent)]
    Strengthen(#[from] StrengthenError),
    #[error(transparent)]
    Graft(#[from] GraftError),
}

fn strengthening(f: &Formula, path: &mut Vec<Step>, choices: &PathChoices) -> Result<(Formula, NjDerivation), GraftError> {
    let identity = |f: &Formula| (f.clone(), NjDerivation::ax(Cedent::singleton(f.clone()), f.clone()));
    match f.kind() {
        Kind::Or(a, b) if choices.contains_key(path.as_slice()) => {
            let side = usize::from(choices[path.as_slice()]);
            path.push(if side == 0 { Step::Left } else { Step::Right });
            let chosen = if side == 0 { a } else { b };
            let other = if side == 0 { b } else { a };
            let (g, d) = strengthening(chosen, path, choices)?;
            path.pop();
            Ok((g, NjDerivation::or_i(side, d, other.clone())))
        }
        Kind::And(a, b) | Kind::Or(a, b) => {
            path.push(Step::Left);
            let (na, da) = strengthening(a, path, choices)?;
            path.pop();
            path.push(Step::Right);
            let (nb, db) = strengthening(b, path, choices)?;
            path.pop();
            if na == *a && nb == *b {
                return Ok(identity(f));
            }
            if f.as_or().is_some() {
                // A disjunction left unchosen inside a kept subformula: rebuild by cases.
                let g = Formula::or(na.clone(), nb.clone());
                let ctx = Cedent::singleton(g.clone());
                let left = NjDerivation::or_i(0, weaken(&da, &ctx), b.clone());
                let right = NjDerivation::or_i(1, weaken(&db, &ctx), a.clone());
                return Ok((g.clone(), NjDerivation::or_e(NjDerivation::ax(ctx, g), left, right)));
            }
            let g = Formula::and(na.clone(), nb.clone());
            let ctx = Cedent::singleton(g.clone());
            let left = graft(&NjDerivation::and_e(0, NjDerivation::ax(ctx.clone(), g.clone())), &da)?;
            let right = graft(&NjDerivation::and_e(1, NjDerivation::ax(ctx, g.clone())), &db)?;
            Ok((g, NjDerivation::and_i(left, right)))
        }
        Kind::Imp(beta, gamma) => {
            path.push(Step::Right);
            let (ng, dg) = strengthening(gamma, path, choices)?;
            path.pop();
            if ng == *gamma {
                return Ok(identity(f));
            }
            let g = Formula::imp(beta.clone(), ng.clone());
            let ctx: Cedent = [beta.clone(), g.clone()].into_iter().collect();
            let e = NjDerivation::imp_e(NjDerivation::ax(ctx.clone(), g.clone()), NjDerivation::ax(ctx, beta.clone()));
            let body = graft(&e, &dg)?;
            Ok((g.clone(), NjDerivation::imp_i(Cedent::singleton(g), beta.clone(), body)))
        }
        Kind::Atom(_) | Kind::Bottom => Ok(identity(f)),
    }
}

/// A derivation of `{f(k)} ⇒ f`; `e` enumerates the single formula `f`.
pub fn strengthening_derivation(
    f: &Formula,
    e: &SpdEnumeration,
    k: &ChoiceVector,
) -> Result<NjDerivation, SurgeryError> {
    if e.basis.len() != 1 || e.basis[0] != *f {
        return Err(StrengthenError::Inconsistent.into());
    }
    let choices = choices_for(e, k)?;
    let (g, d) = strengthening(f, &mut Vec::new(), &choices[0])?;
    debug_assert!(g == strengthen_formula(f, &choices[0]));
    Ok(d)
}

/// `d(k)`: the derivation of `Γ(k) ⇒ φ` obtained by grafting strengthening derivations.
pub fn derive_dk(d: &NjDerivation, e: &SpdEnumeration, k: &ChoiceVector) -> Result<NjDerivation, SurgeryError> {
    if d.antecedent().canonical() != e.basis {
        return Err(StrengthenError::Inconsistent.into());
    }
    let per = choices_for(e, k)?;
    let mut cur = d.clone();
    for (idx, g) in e.basis.iter().enumerate() {
        if per[idx].is_empty() {
            continue;
        }
        let (ng, sd) = strengthening(g, &mut Vec::new(), &per[idx])?;
        if ng == *g {
            continue;
        }
        cur = graft(&sd, &cur)?;
    }
    Ok(cur)
}

//! Intuitionistic validity by contraction-free sequent search (G4ip), with
//! translation of the found proofs into NJp derivations.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use thiserror::Error;

use crate::deduction::{graft, weaken, NjDerivation};
use crate::syntax::{Cedent, Formula, Kind, Sequent};

pub const DEFAULT_CAP: usize = 200;
const EFFORT_LIMIT: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("sequent has {found} connectives, above the cap of {cap}")]
    TooLarge { found: usize, cap: usize },
    #[error("search exceeded {0} steps")]
    EffortExceeded(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleVerdict {
    pub valid: bool,
    /// Sequents expanded by the search.
    pub effort: usize,
}

pub fn connectives(f: &Formula) -> usize {
    match f.children() {
        Some((a, b)) => 1 + connectives(a) + connectives(b),
        None => 0,
    }
}

fn sequent_connectives(s: &Sequent) -> usize {
    s.antecedent.iter().map(connectives).sum::<usize>() + connectives(&s.succedent)
}

#[derive(Debug, Clone)]
enum G4Rule {
    Axiom,
    BottomLeft,
    AndLeft(Formula),
    OrLeft(Formula),
    /// `p ⊃ B` with `p` in the context.
    AtomImpLeft(Formula),
    /// `⊥ ⊃ B`, dropped.
    BottomImpLeft,
    AndImpLeft(Formula),
    OrImpLeft(Formula),
    ImpImpLeft(Formula),
    AndRight,
    ImpRight,
    OrRight(usize),
}

#[derive(Debug)]
struct G4Node {
    sequent: Sequent,
    rule: G4Rule,
    premises: Vec<Rc<G4Node>>,
}

struct Search {
    failed: HashSet<Sequent>,
    proved: HashMap<Sequent, Rc<G4Node>>,
    effort: usize,
}

type Found = Result<Option<Rc<G4Node>>, OracleError>;

impl Search {
    fn new() -> Self {
        Search { failed: HashSet::new(), proved: HashMap::new(), effort: 0 }
    }

    fn node(sequent: Sequent, rule: G4Rule, premises: Vec<Rc<G4Node>>) -> Option<Rc<G4Node>> {
        Some(Rc::new(G4Node { sequent, rule, premises }))
    }

    fn prove(&mut self, s: &Sequent) -> Found {
        if let Some(p) = self.proved.get(s) {
            return Ok(Some(p.clone()));
        }
        if self.failed.contains(s) {
            return Ok(None);
        }
        self.effort += 1;
        if self.effort > EFFORT_LIMIT {
            return Err(OracleError::EffortExceeded(EFFORT_LIMIT));
        }
        let out = self.expand(s)?;
        match &out {
            Some(p) => {
                self.proved.insert(s.clone(), p.clone());
            }
            None => {
                self.failed.insert(s.clone());
            }
        }
        Ok(out)
    }

    fn all(&mut self, s: &Sequent, rule: G4Rule, premises: &[Sequent]) -> Found {
        let mut ps = Vec::with_capacity(premises.len());
        for p in premises {
            match self.prove(p)? {
                Some(d) => ps.push(d),
                None => return Ok(None),
            }
        }
        Ok(Search::node(s.clone(), rule, ps))
    }

    fn expand(&mut self, s: &Sequent) -> Found {
        let gamma = &s.antecedent;
        let goal = &s.succedent;
        if gamma.contains(goal) {
            return Ok(Search::node(s.clone(), G4Rule::Axiom, vec![]));
        }
        if gamma.contains(&Formula::bottom()) {
            return Ok(Search::node(s.clone(), G4Rule::BottomLeft, vec![]));
        }
        let seq = |c: Cedent, g: &Formula| Sequent::new(c, g.clone());
        for x in gamma.iter() {
            let rest = gamma.without(x);
            match x.kind() {
                Kind::And(a, b) => {
                    return self.all(s, G4Rule::AndLeft(x.clone()), &[seq(rest.with(a).with(b), goal)]);
                }
                Kind::Or(a, b) => {
                    let prem = [seq(rest.with(a), goal), seq(rest.with(b), goal)];
                    return self.all(s, G4Rule::OrLeft(x.clone()), &prem);
                }
                Kind::Imp(a, b) => match a.kind() {
                    Kind::Atom(_) if gamma.contains(a) => {
                        return self.all(s, G4Rule::AtomImpLeft(x.clone()), &[seq(rest.with(b), goal)]);
                    }
                    Kind::Bottom => return self.all(s, G4Rule::BottomImpLeft, &[seq(rest, goal)]),
                    Kind::And(c, d) => {
                        let y = Formula::imp(c.clone(), Formula::imp(d.clone(), b.clone()));
                        return self.all(s, G4Rule::AndImpLeft(x.clone()), &[seq(rest.with(&y), goal)]);
                    }
                    Kind::Or(c, d) => {
                        let y1 = Formula::imp(c.clone(), b.clone());
                        let y2 = Formula::imp(d.clone(), b.clone());
                        return self.all(s, G4Rule::OrImpLeft(x.clone()), &[seq(rest.with(&y1).with(&y2), goal)]);
                    }
                    _ => {}
                },
                _ => {}
            }
        }
        match goal.kind() {
            Kind::And(a, b) => {
                return self.all(s, G4Rule::AndRight, &[seq(gamma.clone(), a), seq(gamma.clone(), b)]);
            }
            Kind::Imp(a, b) => return self.all(s, G4Rule::ImpRight, &[seq(gamma.with(a), b)]),
            Kind::Or(a, b) => {
                for (side, g) in [(0, a), (1, b)] {
                    if let Some(p) = self.all(s, G4Rule::OrRight(side), &[seq(gamma.clone(), g)])? {
                        return Ok(Some(p));
                    }
                }
            }
            _ => {}
        }
        for x in gamma.iter() {
            let Some((cd, b)) = x.as_imp() else { continue };
            let Some((c, d)) = cd.as_imp() else { continue };
            let rest = gamma.without(x);
            let db = Formula::imp(d.clone(), b.clone());
            let prem = [seq(rest.with(&db), &Formula::imp(c.clone(), d.clone())), seq(rest.with(b), goal)];
            if let Some(p) = self.all(s, G4Rule::ImpImpLeft(x.clone()), &prem)? {
                return Ok(Some(p));
            }
        }
        Ok(None)
    }
}

fn checked(s: &Sequent, cap: usize) -> Result<(), OracleError> {
    let found = sequent_connectives(s);
    if found > cap {
        Err(OracleError::TooLarge { found, cap })
    } else {
        Ok(())
    }
}

/// Decides intuitionistic validity of `s`; refuses sequents with more than `cap` connectives.
pub fn ipc_valid(s: &Sequent, cap: usize) -> Result<OracleVerdict, OracleError> {
    checked(s, cap)?;
    let mut search = Search::new();
    let valid = search.prove(s)?.is_some();
    Ok(OracleVerdict { valid, effort: search.effort })
}

/// An NJp derivation of `s` if it is valid.
pub fn prove(s: &Sequent, cap: usize) -> Result<Option<NjDerivation>, OracleError> {
    checked(s, cap)?;
    let mut search = Search::new();
    Ok(search.prove(s)?.map(|p| {
        let mut memo = HashMap::new();
        translate(&p, &mut memo)
    }))
}

/// `Γ ⇒ C` from `⊥ ∈ Γ`, without the ⊥-gadget.
fn from_bottom(gamma: &Cedent, c: &Formula) -> NjDerivation {
    match c.kind() {
        Kind::Atom(_) | Kind::Bottom => NjDerivation::ax(gamma.clone(), c.clone()),
        Kind::And(a, b) => NjDerivation::and_i(from_bottom(gamma, a), from_bottom(gamma, b)),
        Kind::Or(a, b) => NjDerivation::or_i(0, from_bottom(gamma, a), b.clone()),
        Kind::Imp(a, b) => NjDerivation::imp_i(gamma.clone(), a.clone(), from_bottom(&gamma.with(a), b)),
    }
}

/// Rebases `pi` onto `gamma`, grafting in derivations of the formulas it assumes beyond `gamma`.
fn realize(pi: NjDerivation, gamma: &Cedent, provided: Vec<(Formula, NjDerivation)>) -> NjDerivation {
    let mut cur = pi;
    for (f, d0) in provided {
        if gamma.contains(&f) || !cur.antecedent().contains(&f) {
            continue;
        }
        cur = graft(&d0, &cur).expect("hypothesis is present");
    }
    if cur.antecedent() != gamma {
        cur = weaken(&cur, gamma);
    }
    assert!(cur.antecedent() == gamma, "translated premise leaves the context");
    cur
}

fn translate(p: &G4Node, memo: &mut HashMap<*const G4Node, NjDerivation>) -> NjDerivation {
    let key = p as *const G4Node;
    if let Some(d) = memo.get(&key) {
        return d.clone();
    }
    let gamma = &p.sequent.antecedent;
    let goal = &p.sequent.succedent;
    let ax = |c: &Cedent, f: &Formula| NjDerivation::ax(c.clone(), f.clone());
    let sub = |i: usize, memo: &mut HashMap<*const G4Node, NjDerivation>| translate(&p.premises[i], memo);
    let out = match &p.rule {
        G4Rule::Axiom => ax(gamma, goal),
        G4Rule::BottomLeft => from_bottom(gamma, goal),
        G4Rule::AndLeft(x) => {
            let pi = sub(0, memo);
            let (a, b) = x.as_and().unwrap();
            let da = NjDerivation::and_e(0, ax(gamma, x));
            let db = NjDerivation::and_e(1, ax(gamma, x));
            realize(pi, gamma, vec![(a.clone(), da), (b.clone(), db)])
        }
        G4Rule::OrLeft(x) => {
            let (a, b) = x.as_or().unwrap();
            let l = weaken(&sub(0, memo), &gamma.with(a));
            let r = weaken(&sub(1, memo), &gamma.with(b));
            NjDerivation::or_e(ax(gamma, x), l, r)
        }
        G4Rule::AtomImpLeft(x) => {
            let (a, b) = x.as_imp().unwrap();
            let db = NjDerivation::imp_e(ax(gamma, x), ax(gamma, a));
            realize(sub(0, memo), gamma, vec![(b.clone(), db)])
        }
        G4Rule::BottomImpLeft => realize(sub(0, memo), gamma, vec![]),
        G4Rule::AndImpLeft(x) => {
            let (cd, b) = x.as_imp().unwrap();
            let (c, d) = cd.as_and().unwrap();
            let gc = gamma.with(c);
            let gcd = gc.with(d);
            let inner = NjDerivation::imp_e(ax(&gcd, x), NjDerivation::and_i(ax(&gcd, c), ax(&gcd, d)));
            let y = NjDerivation::imp_i(gamma.clone(), c.clone(), NjDerivation::imp_i(gc, d.clone(), inner));
            let yf = Formula::imp(c.clone(), Formula::imp(d.clone(), b.clone()));
            realize(sub(0, memo), gamma, vec![(yf, y)])
        }
        G4Rule::OrImpLeft(x) => {
            let (cd, b) = x.as_imp().unwrap();
            let (c, d) = cd.as_or().unwrap();
            let gc = gamma.with(c);
            let gd = gamma.with(d);
            let y1 = NjDerivation::imp_i(
                gamma.clone(),
                c.clone(),
                NjDerivation::imp_e(ax(&gc, x), NjDerivation::or_i(0, ax(&gc, c), d.clone())),
            );
            let y2 = NjDerivation::imp_i(
                gamma.clone(),
                d.clone(),
                NjDerivation::imp_e(ax(&gd, x), NjDerivation::or_i(1, ax(&gd, d), c.clone())),
            );
            let f1 = Formula::imp(c.clone(), b.clone());
            let f2 = Formula::imp(d.clone(), b.clone());
            realize(sub(0, memo), gamma, vec![(f1, y1), (f2, y2)])
        }
        G4Rule::ImpImpLeft(x) => {
            let (cd, b) = x.as_imp().unwrap();
            let (c, d) = cd.as_imp().unwrap();
            let gd = gamma.with(d);
            let gdc = gd.with(c);
            let to_cd = NjDerivation::imp_i(gd.clone(), c.clone(), ax(&gdc, d));
            let db = NjDerivation::imp_i(gamma.clone(), d.clone(), NjDerivation::imp_e(ax(&gd, x), to_cd));
            let dbf = Formula::imp(d.clone(), b.clone());
            let left = realize(sub(0, memo), gamma, vec![(dbf, db)]);
            let eb = NjDerivation::imp_e(ax(gamma, x), left);
            realize(sub(1, memo), gamma, vec![(b.clone(), eb)])
        }
        G4Rule::AndRight => NjDerivation::and_i(sub(0, memo), sub(1, memo)),
        G4Rule::ImpRight => {
            let (a, _) = goal.as_imp().unwrap();
            NjDerivation::imp_i(gamma.clone(), a.clone(), sub(0, memo))
        }
        G4Rule::OrRight(side) => {
            let (a, b) = goal.as_or().unwrap();
            let other = if *side == 0 { b } else { a };
            NjDerivation::or_i(*side, sub(0, memo), other.clone())
        }
    };
    debug_assert!(out.conclusion() == &p.sequent);
    memo.insert(key, out.clone());
    out
}

//! Horn clauses over formulas-as-atoms, positive unit resolution, the
//! immediate-derivability test and its cut-deduction certificates.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::deduction::FormatError;
use crate::syntax::{parse_formula, parse_sequent, Cedent, Formula, Kind, ParseError, Sequent};

/// A clause with at most one positive literal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HornClause<A> {
    pub negatives: BTreeSet<A>,
    pub positive: Option<A>,
}

impl<A: Ord> HornClause<A> {
    pub fn new(negatives: impl IntoIterator<Item = A>, positive: Option<A>) -> Self {
        HornClause { negatives: negatives.into_iter().collect(), positive }
    }

    pub fn fact(a: A) -> Self {
        HornClause { negatives: BTreeSet::new(), positive: Some(a) }
    }

    pub fn size(&self) -> usize {
        self.negatives.len() + usize::from(self.positive.is_some())
    }
}

impl<A: fmt::Display> fmt::Display for HornClause<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.negatives.iter().map(|a| format!("-{a}")).collect();
        if let Some(p) = &self.positive {
            parts.push(p.to_string());
        }
        if parts.is_empty() {
            write!(f, "[]")
        } else {
            write!(f, "{{{}}}", parts.join(", "))
        }
    }
}

/// A duplicate-free list of clauses; indices are stable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HornClauseSet<A> {
    clauses: Vec<HornClause<A>>,
}

impl<A: Ord + Clone> HornClauseSet<A> {
    pub fn new(clauses: impl IntoIterator<Item = HornClause<A>>) -> Self {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for c in clauses {
            if seen.insert(c.clone()) {
                out.push(c);
            }
        }
        HornClauseSet { clauses: out }
    }

    pub fn clauses(&self) -> &[HornClause<A>] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Total number of literal occurrences.
    pub fn size(&self) -> usize {
        self.clauses.iter().map(HornClause::size).sum()
    }

    pub fn atoms(&self) -> BTreeSet<A> {
        let mut out = BTreeSet::new();
        for c in &self.clauses {
            out.extend(c.negatives.iter().cloned());
            out.extend(c.positive.iter().cloned());
        }
        out
    }
}

/// One positive unit resolution round: unit `unit` is chosen from `H_round`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitStep<A> {
    pub unit: A,
    pub round: usize,
    /// Clause that first became the unit `{unit}`.
    pub reason: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefutationTrace<A> {
    pub steps: Vec<UnitStep<A>>,
    /// Clause that was reduced to the empty clause.
    pub empty_clause: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HornOutcome<A> {
    /// Satisfiable; `model` is the least model (all derived units).
    Satisfiable { model: BTreeSet<A> },
    Refuted(RefutationTrace<A>),
}

impl<A> HornOutcome<A> {
    pub fn is_satisfiable(&self) -> bool {
        matches!(self, HornOutcome::Satisfiable { .. })
    }
}

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Reason {
    Clause(u32),
    Hypothesis,
}

/// Counter-based unit propagation. Clauses sharing an antecedent share a body counter.
struct Propagator {
    bodies: Vec<Vec<u32>>,
    occurs: Vec<Vec<u32>>,
    body_clauses: Vec<Vec<u32>>,
    clause_body: Vec<u32>,
    heads: Vec<u32>,
    rank: Vec<u32>,
}

struct Propagation {
    order: Vec<(u32, Reason)>,
    reason: Vec<Option<Reason>>,
    empty: Option<u32>,
    goal: Option<u32>,
}

impl Propagator {
    fn new(n_atoms: usize, bodies: Vec<Vec<u32>>, clause_body: &[u32], heads: Vec<u32>, rank: Vec<u32>) -> Self {
        let mut occurs = vec![Vec::new(); n_atoms];
        for (b, members) in bodies.iter().enumerate() {
            for &a in members {
                occurs[a as usize].push(b as u32);
            }
        }
        let mut body_clauses = vec![Vec::new(); bodies.len()];
        for (c, &b) in clause_body.iter().enumerate() {
            body_clauses[b as usize].push(c as u32);
        }
        Propagator { bodies, occurs, body_clauses, clause_body: clause_body.to_vec(), heads, rank }
    }

    /// Runs to a fixpoint, stopping at the first empty clause or when a clause with head `goal` fires.
    fn run(&self, hypotheses: &[u32], goal: u32) -> Propagation {
        let n = self.occurs.len();
        let mut remaining: Vec<u32> = self.bodies.iter().map(|b| b.len() as u32).collect();
        let mut reason: Vec<Option<Reason>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        let mut empty: Option<u32> = None;
        let mut goal_hit: Option<u32> = None;
        let mut order = Vec::new();

        let fire = |b: usize,
                        reason: &mut Vec<Option<Reason>>,
                        heap: &mut BinaryHeap<Reverse<(u32, u32)>>,
                        empty: &mut Option<u32>,
                        goal_hit: &mut Option<u32>| {
            for &c in &self.body_clauses[b] {
                let h = self.heads[c as usize];
                if h == NONE {
                    *empty = Some(empty.map_or(c, |e| e.min(c)));
                } else if h == goal {
                    *goal_hit = Some(goal_hit.map_or(c, |g| g.min(c)));
                } else if reason[h as usize].is_none() {
                    reason[h as usize] = Some(Reason::Clause(c));
                    heap.push(Reverse((self.rank[h as usize], h)));
                }
            }
        };

        for b in 0..self.bodies.len() {
            if remaining[b] == 0 {
                fire(b, &mut reason, &mut heap, &mut empty, &mut goal_hit);
            }
        }
        for &h in hypotheses {
            if reason[h as usize].is_none() {
                reason[h as usize] = Some(Reason::Hypothesis);
                heap.push(Reverse((self.rank[h as usize], h)));
            }
        }
        while empty.is_none() && goal_hit.is_none() {
            let Some(Reverse((_, p))) = heap.pop() else { break };
            order.push((p, reason[p as usize].expect("queued atoms have a reason")));
            for &b in &self.occurs[p as usize] {
                let r = &mut remaining[b as usize];
                *r -= 1;
                if *r == 0 {
                    fire(b as usize, &mut reason, &mut heap, &mut empty, &mut goal_hit);
                }
            }
        }
        Propagation { order, reason, empty, goal: goal_hit }
    }
}

fn ranks_by_print<A: fmt::Display + Ord>(atoms: &[A]) -> Vec<u32> {
    let mut idx: Vec<(String, usize)> = atoms.iter().enumerate().map(|(i, a)| (a.to_string(), i)).collect();
    idx.sort_by(|x, y| x.0.cmp(&y.0).then_with(|| atoms[x.1].cmp(&atoms[y.1])));
    let mut rank = vec![0; atoms.len()];
    for (r, (_, i)) in idx.into_iter().enumerate() {
        rank[i] = r as u32;
    }
    rank
}

/// Positive unit resolution; the smallest printed unit is chosen first.
pub fn horn_satisfiability<A: Clone + Ord + fmt::Display>(h: &HornClauseSet<A>) -> HornOutcome<A> {
    let atoms: Vec<A> = h.atoms().into_iter().collect();
    let id = |a: &A| atoms.binary_search(a).expect("atom is interned") as u32;
    let bodies: Vec<Vec<u32>> = h.clauses.iter().map(|c| c.negatives.iter().map(id).collect()).collect();
    let clause_body: Vec<u32> = (0..h.clauses.len() as u32).collect();
    let heads: Vec<u32> = h.clauses.iter().map(|c| c.positive.as_ref().map_or(NONE, id)).collect();
    let prop = Propagator::new(atoms.len(), bodies, &clause_body, heads, ranks_by_print(&atoms));
    let run = prop.run(&[], NONE);
    match run.empty {
        Some(empty_clause) => HornOutcome::Refuted(RefutationTrace {
            steps: run
                .order
                .iter()
                .enumerate()
                .map(|(round, &(a, r))| UnitStep {
                    unit: atoms[a as usize].clone(),
                    round,
                    reason: match r {
                        Reason::Clause(c) => c as usize,
                        Reason::Hypothesis => unreachable!("no hypotheses in plain satisfiability"),
                    },
                })
                .collect(),
            empty_clause: empty_clause as usize,
        }),
        None => HornOutcome::Satisfiable {
            model: run
                .reason
                .iter()
                .enumerate()
                .filter(|(_, r)| r.is_some())
                .map(|(a, _)| atoms[a].clone())
                .collect(),
        },
    }
}

/// Sequent-set file: one sequent per line, `#` comments. Errors carry the 1-based line.
pub fn parse_sequent_file(text: &str) -> Result<BTreeSet<Sequent>, (usize, ParseError)> {
    let mut out = BTreeSet::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if !line.is_empty() {
            out.insert(parse_sequent(line).map_err(|e| (no + 1, e))?);
        }
    }
    Ok(out)
}

/// Parses the clause file format: one clause per line, `-` marks negation, `#` comments.
/// Literals are separated by spaces; a literal containing spaces is written in double quotes.
pub fn parse_clause_file(text: &str) -> Result<HornClauseSet<Formula>, String> {
    let mut clauses = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut negatives = Vec::new();
        let mut positive: Option<Formula> = None;
        for lit in split_literals(line).map_err(|e| format!("line {}: {e}", lineno + 1))? {
            let (neg, body) = match lit.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, lit.as_str()),
            };
            let body = body.trim_matches('"');
            let f = parse_formula(body).map_err(|e| format!("line {}: {e}", lineno + 1))?;
            if neg {
                negatives.push(f);
            } else if positive.replace(f).is_some() {
                return Err(format!("line {}: more than one positive literal", lineno + 1));
            }
        }
        clauses.push(HornClause::new(negatives, positive));
    }
    Ok(HornClauseSet::new(clauses))
}

fn split_literals(line: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for c in line.chars() {
        match c {
            '"' => {
                quoted = !quoted;
                cur.push(c);
            }
            c if c.is_whitespace() && !quoted => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if quoted {
        return Err("unterminated quote".into());
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    Ok(out)
}

/// Horn clauses of a conjunction of Horn implications, or `None` if `f` is not of that shape.
pub fn horn_clauses_of(f: &Formula) -> Option<Vec<HornClause<Formula>>> {
    fn body_atoms(f: &Formula, out: &mut Vec<Formula>) -> bool {
        match f.kind() {
            Kind::And(a, b) => body_atoms(a, out) && body_atoms(b, out),
            Kind::Atom(_) | Kind::Bottom => {
                out.push(f.clone());
                true
            }
            _ => false,
        }
    }
    fn go(f: &Formula, body: &[Formula], out: &mut Vec<HornClause<Formula>>) -> bool {
        match f.kind() {
            Kind::And(a, b) => go(a, body, out) && go(b, body, out),
            Kind::Atom(_) => {
                out.push(HornClause::new(body.iter().cloned(), Some(f.clone())));
                true
            }
            Kind::Bottom => {
                out.push(HornClause::new(body.iter().cloned(), None));
                true
            }
            Kind::Imp(a, b) => {
                let mut extended = body.to_vec();
                body_atoms(a, &mut extended) && go(b, &extended, out)
            }
            Kind::Or(..) => false,
        }
    }
    let mut out = Vec::new();
    go(f, &[], &mut out).then_some(out)
}

/// A tree of cut steps over base sequents. Subtrees may be shared.
#[derive(Clone, PartialEq, Eq)]
pub enum CutDeduction {
    Leaf(Sequent),
    Cut { left: Arc<CutDeduction>, right: Arc<CutDeduction>, conclusion: Sequent },
}

impl CutDeduction {
    /// Cuts the succedent of `left` against the antecedent of `right`.
    pub fn cut(left: Arc<CutDeduction>, right: Arc<CutDeduction>) -> CutDeduction {
        let beta = &left.conclusion().succedent;
        let r = right.conclusion();
        let ant = left.conclusion().antecedent.union(&r.antecedent.without(beta));
        let conclusion = Sequent::new(ant, r.succedent.clone());
        CutDeduction::Cut { left, right, conclusion }
    }

    pub fn conclusion(&self) -> &Sequent {
        match self {
            CutDeduction::Leaf(s) => s,
            CutDeduction::Cut { conclusion, .. } => conclusion,
        }
    }

    /// Distinct nodes, counting shared subtrees once.
    pub fn node_count(&self) -> usize {
        let mut seen = HashSet::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            if !seen.insert(n as *const CutDeduction) {
                continue;
            }
            if let CutDeduction::Cut { left, right, .. } = n {
                stack.push(left);
                stack.push(right);
            }
        }
        seen.len()
    }

    pub fn leaves(&self) -> BTreeSet<Sequent> {
        let mut out = BTreeSet::new();
        let mut seen = HashSet::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            if !seen.insert(n as *const CutDeduction) {
                continue;
            }
            match n {
                CutDeduction::Leaf(s) => {
                    out.insert(s.clone());
                }
                CutDeduction::Cut { left, right, .. } => {
                    stack.push(left);
                    stack.push(right);
                }
            }
        }
        out
    }

    /// Numbered node listing, children before parents, root last.
    pub fn to_certificate(&self) -> String {
        let mut ids: HashMap<*const CutDeduction, usize> = HashMap::new();
        let mut lines = vec!["# cut deduction; the last node is the root".to_string()];
        let mut stack: Vec<(&CutDeduction, bool)> = vec![(self, false)];
        while let Some((n, expanded)) = stack.pop() {
            let key = n as *const CutDeduction;
            if ids.contains_key(&key) {
                continue;
            }
            match n {
                CutDeduction::Leaf(s) => {
                    ids.insert(key, ids.len());
                    lines.push(format!("{} leaf \"{}\"", ids.len() - 1, s));
                }
                CutDeduction::Cut { left, right, conclusion } => {
                    if expanded {
                        let l = ids[&(left.as_ref() as *const CutDeduction)];
                        let r = ids[&(right.as_ref() as *const CutDeduction)];
                        ids.insert(key, ids.len());
                        lines.push(format!("{} cut {} {} \"{}\"", ids.len() - 1, l, r, conclusion));
                    } else {
                        stack.push((n, true));
                        stack.push((right, false));
                        stack.push((left, false));
                    }
                }
            }
        }
        lines.join("\n") + "\n"
    }

    pub fn parse_certificate(text: &str) -> Result<Arc<CutDeduction>, FormatError> {
        let mut nodes: Vec<Arc<CutDeduction>> = Vec::new();
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let pos = offset;
            offset += line.len();
            let body = line.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let err = |message: &str| FormatError::Syntax { pos, message: message.to_string() };
            let q = body.find('"').ok_or_else(|| err("missing quoted sequent"))?;
            if !body.ends_with('"') || q + 1 >= body.len() {
                return Err(err("unterminated sequent"));
            }
            let seq_text = &body[q + 1..body.len() - 1];
            let sequent =
                parse_sequent(seq_text).map_err(|e| FormatError::Sequent { pos: pos + q + 1 + e.pos, source: e })?;
            let words: Vec<&str> = body[..q].split_whitespace().collect();
            if words.first().and_then(|w| w.parse::<usize>().ok()) != Some(nodes.len()) {
                return Err(err("nodes must be numbered consecutively from 0"));
            }
            let child = |w: Option<&&str>| -> Result<Arc<CutDeduction>, FormatError> {
                let i: usize = w.and_then(|w| w.parse().ok()).ok_or_else(|| err("bad child index"))?;
                nodes.get(i).cloned().ok_or_else(|| err("child index refers forward"))
            };
            let node = match words.get(1) {
                Some(&"leaf") if words.len() == 2 => CutDeduction::Leaf(sequent),
                Some(&"cut") if words.len() == 4 => {
                    CutDeduction::Cut { left: child(words.get(2))?, right: child(words.get(3))?, conclusion: sequent }
                }
                _ => return Err(err("expected `N leaf \"..\"` or `N cut L R \"..\"`")),
            };
            nodes.push(Arc::new(node));
        }
        nodes.pop().ok_or(FormatError::Syntax { pos: 0, message: "empty certificate".into() })
    }
}

impl fmt::Debug for CutDeduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutDeduction::Leaf(s) => write!(f, "leaf({s})"),
            CutDeduction::Cut { left, right, conclusion } => write!(f, "cut({left:?}, {right:?} => {conclusion})"),
        }
    }
}

/// Leaves in `base`, every cut well formed, conclusion a subsequent of `target`.
pub fn validate_cut_deduction(cd: &CutDeduction, base: &BTreeSet<Sequent>, target: &Sequent) -> bool {
    let mut ok: HashSet<*const CutDeduction> = HashSet::new();
    let mut stack: Vec<(&CutDeduction, bool)> = vec![(cd, false)];
    while let Some((n, expanded)) = stack.pop() {
        let key = n as *const CutDeduction;
        if ok.contains(&key) {
            continue;
        }
        match n {
            CutDeduction::Leaf(s) => {
                if !base.contains(s) {
                    return false;
                }
            }
            CutDeduction::Cut { left, right, conclusion } => {
                if !expanded {
                    stack.push((n, true));
                    stack.push((right, false));
                    stack.push((left, false));
                    continue;
                }
                let l = left.conclusion();
                let r = right.conclusion();
                if !r.antecedent.contains(&l.succedent) || conclusion.succedent != r.succedent {
                    return false;
                }
                if conclusion.antecedent != l.antecedent.union(&r.antecedent.without(&l.succedent)) {
                    return false;
                }
            }
        }
        ok.insert(key);
    }
    cd.conclusion().is_subsequent_of(target)
}

/// Atom of the immediate-derivability encoding.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IdAtom {
    /// Fresh goal atom, printed as the empty string so it is always chosen first.
    Goal,
    Formula(Formula),
}

impl fmt::Display for IdAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdAtom::Goal => Ok(()),
            IdAtom::Formula(x) => write!(f, "{x}"),
        }
    }
}

/// The clause set whose refutability decides whether a subsequent of `target` is i.d. from `base`.
///
/// Base sequent `Δ ⇒ δ` becomes `{¬Δ, δ}`, each `β` of the target antecedent a unit `{β}`.
/// The goal is reached through copies `{¬Δ, Goal}` of the clauses with head `α` and the unit
/// `{¬Goal}`, so a hypothesis `α ∈ Γ` does not count as a derivation of `α` on its own.
pub fn encode_id_instance(base: &BTreeSet<Sequent>, target: &Sequent) -> HornClauseSet<IdAtom> {
    let atom = |f: &Formula| IdAtom::Formula(f.clone());
    let mut clauses = Vec::new();
    for s in base {
        clauses.push(HornClause::new(s.antecedent.iter().map(atom), Some(atom(&s.succedent))));
    }
    for b in target.antecedent.iter() {
        clauses.push(HornClause::fact(atom(b)));
    }
    for s in base.iter().filter(|s| s.succedent == target.succedent) {
        clauses.push(HornClause::new(s.antecedent.iter().map(atom), Some(IdAtom::Goal)));
    }
    clauses.push(HornClause::new([IdAtom::Goal], None));
    HornClauseSet::new(clauses)
}

/// Decides immediate derivability against a fixed base; reusable across targets.
pub struct IdChecker {
    base: Vec<Sequent>,
    atoms: HashMap<Formula, u32>,
    prop: Propagator,
}

impl IdChecker {
    pub fn new<'a>(base: impl IntoIterator<Item = &'a Sequent>) -> IdChecker {
        let mut base: Vec<Sequent> = base.into_iter().cloned().collect();
        base.sort();
        base.dedup();
        let mut atoms: HashMap<Formula, u32> = HashMap::new();
        let mut formulas: Vec<Formula> = Vec::new();
        let mut intern = |f: &Formula, atoms: &mut HashMap<Formula, u32>| -> u32 {
            if let Some(&i) = atoms.get(f) {
                return i;
            }
            let i = formulas.len() as u32;
            formulas.push(f.clone());
            atoms.insert(f.clone(), i);
            i
        };
        let mut body_ids: HashMap<Cedent, u32> = HashMap::new();
        let mut bodies: Vec<Vec<u32>> = Vec::new();
        let mut clause_body = Vec::with_capacity(base.len());
        let mut heads = Vec::with_capacity(base.len());
        for s in &base {
            let b = match body_ids.get(&s.antecedent) {
                Some(&b) => b,
                None => {
                    let members: Vec<u32> = s.antecedent.iter().map(|f| intern(f, &mut atoms)).collect();
                    bodies.push(members);
                    body_ids.insert(s.antecedent.clone(), bodies.len() as u32 - 1);
                    bodies.len() as u32 - 1
                }
            };
            clause_body.push(b);
            heads.push(intern(&s.succedent, &mut atoms));
        }
        let rank = ranks_by_print(&formulas);
        let prop = Propagator::new(formulas.len(), bodies, &clause_body, heads, rank);
        IdChecker { base, atoms, prop }
    }

    pub fn base(&self) -> &[Sequent] {
        &self.base
    }

    pub fn base_set(&self) -> BTreeSet<Sequent> {
        self.base.iter().cloned().collect()
    }

    /// A cut deduction of a subsequent of `target`, or `None`.
    pub fn check(&self, target: &Sequent) -> Option<Arc<CutDeduction>> {
        let goal = *self.atoms.get(&target.succedent)?;
        let hyps: Vec<u32> = target.antecedent.iter().filter_map(|f| self.atoms.get(f).copied()).collect();
        let run = self.prop.run(&hyps, goal);
        let goal_clause = run.goal?;
        Some(self.reconstruct(&run, goal_clause))
    }

    /// Builds the deduction for `clause`, cutting in the deductions of its non-hypothesis premises.
    fn reconstruct(&self, run: &Propagation, root: u32) -> Arc<CutDeduction> {
        let n = self.prop.occurs.len();
        let mut memo: Vec<Option<Arc<CutDeduction>>> = vec![None; n];
        let clause_of = |a: u32| match run.reason[a as usize] {
            Some(Reason::Clause(c)) => Some(c),
            _ => None,
        };
        let pending = |c: u32, memo: &Vec<Option<Arc<CutDeduction>>>| -> Vec<u32> {
            let b = &self.prop.bodies[self.body_of(c)];
            b.iter()
                .copied()
                .filter(|&a| clause_of(a).is_some() && memo[a as usize].is_none())
                .collect()
        };
        let build = |c: u32, memo: &Vec<Option<Arc<CutDeduction>>>| -> Arc<CutDeduction> {
            let seq = &self.base[c as usize];
            let mut cur = Arc::new(CutDeduction::Leaf(seq.clone()));
            for (f, &a) in seq.antecedent.iter().zip(&self.prop.bodies[self.body_of(c)]) {
                debug_assert!(self.atoms[f] == a);
                if clause_of(a).is_some() {
                    let left = memo[a as usize].clone().expect("premise built first");
                    cur = Arc::new(CutDeduction::cut(left, cur));
                }
            }
            cur
        };
        let mut stack: Vec<u32> = pending(root, &memo);
        while let Some(&a) = stack.last() {
            if memo[a as usize].is_some() {
                stack.pop();
                continue;
            }
            let c = clause_of(a).expect("only derived atoms are stacked");
            let todo = pending(c, &memo);
            if todo.is_empty() {
                memo[a as usize] = Some(build(c, &memo));
                stack.pop();
            } else {
                stack.extend(todo);
            }
        }
        build(root, &memo)
    }

    fn body_of(&self, clause: u32) -> usize {
        self.prop.clause_body[clause as usize] as usize
    }
}

/// A cut deduction of some subsequent of `target` from `base`, or `None`.
pub fn id_check(base: &BTreeSet<Sequent>, target: &Sequent) -> Option<Arc<CutDeduction>> {
    IdChecker::new(base).check(target)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::syntax::tests::{f, s};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn clause(neg: &[&str], pos: Option<&str>) -> HornClause<Formula> {
        HornClause::new(neg.iter().map(|x| f(x)), pos.map(f))
    }

    /// Truth-table satisfiability over the atoms of `h`.
    pub(crate) fn brute_force_sat<A: Clone + Ord>(h: &HornClauseSet<A>) -> bool {
        let atoms: Vec<A> = h.atoms().into_iter().collect();
        assert!(atoms.len() <= 20);
        (0u32..1 << atoms.len()).any(|mask| {
            let val = |a: &A| mask >> atoms.binary_search(a).unwrap() & 1 == 1;
            h.clauses().iter().all(|c| c.negatives.iter().any(|a| !val(a)) || c.positive.as_ref().is_some_and(val))
        })
    }

    /// Replays a trace with the `C_p` rule and reports whether the empty clause appears.
    pub(crate) fn replay_reaches_empty<A: Clone + Ord>(h: &HornClauseSet<A>, trace: &RefutationTrace<A>) -> bool {
        let mut cur: Vec<HornClause<A>> = h.clauses().to_vec();
        if cur.iter().any(|c| c.size() == 0) {
            return true;
        }
        for step in &trace.steps {
            let unit = HornClause { negatives: BTreeSet::new(), positive: Some(step.unit.clone()) };
            if !cur.contains(&unit) {
                return false;
            }
            cur = cur
                .into_iter()
                .filter(|c| c.positive.as_ref() != Some(&step.unit))
                .map(|mut c| {
                    c.negatives.remove(&step.unit);
                    c
                })
                .collect();
            if cur.iter().any(|c| c.size() == 0) {
                return true;
            }
        }
        false
    }

    pub(crate) fn random_horn(rng: &mut ChaCha8Rng, atoms: usize, clauses: usize) -> HornClauseSet<String> {
        let names: Vec<String> = (0..atoms).map(|i| format!("a{i}")).collect();
        let mut out = Vec::new();
        for _ in 0..clauses {
            let n_neg = rng.gen_range(0..=3.min(atoms));
            let neg: Vec<String> = (0..n_neg).map(|_| names[rng.gen_range(0..atoms)].clone()).collect();
            let pos = if rng.gen_bool(0.75) { Some(names[rng.gen_range(0..atoms)].clone()) } else { None };
            out.push(HornClause::new(neg, pos));
        }
        HornClauseSet::new(out)
    }

    #[test]
    fn satisfiability_examples() {
        let h = HornClauseSet::new([clause(&[], Some("p")), clause(&["p"], None)]);
        match horn_satisfiability(&h) {
            HornOutcome::Refuted(t) => {
                assert_eq!(t.steps.len(), 1);
                assert_eq!(t.steps[0].unit, f("p"));
                assert!(replay_reaches_empty(&h, &t));
            }
            other => panic!("{other:?}"),
        }
        let h = HornClauseSet::new([clause(&["p"], Some("q"))]);
        assert!(matches!(horn_satisfiability(&h), HornOutcome::Satisfiable { model } if model.is_empty()));
        let h = HornClauseSet::new([clause(&[], Some("p")), clause(&["p"], Some("q")), clause(&["q"], None)]);
        assert!(!brute_force_sat(&h));
        match horn_satisfiability(&h) {
            HornOutcome::Refuted(t) => {
                assert_eq!(t.steps.iter().map(|s| s.unit.clone()).collect::<Vec<_>>(), vec![f("p"), f("q")]);
                assert_eq!(t.empty_clause, 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_clause_refutes_without_steps() {
        let h = HornClauseSet::new([HornClause::<Formula>::new([], None)]);
        match horn_satisfiability(&h) {
            HornOutcome::Refuted(t) => assert!(t.steps.is_empty()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn smallest_printed_unit_goes_first() {
        let h = HornClauseSet::new([clause(&[], Some("z")), clause(&[], Some("b")), clause(&["b", "z"], None)]);
        let HornOutcome::Refuted(t) = horn_satisfiability(&h) else { panic!() };
        assert_eq!(t.steps[0].unit, f("b"));
        assert_eq!(t.steps[1].unit, f("z"));
    }

    #[test]
    fn model_is_least() {
        let h = HornClauseSet::new([clause(&[], Some("p")), clause(&["p"], Some("q")), clause(&["r"], Some("s"))]);
        let HornOutcome::Satisfiable { model } = horn_satisfiability(&h) else { panic!() };
        assert_eq!(model, [f("p"), f("q")].into_iter().collect());
    }

    #[test]
    fn clause_file_parsing() {
        let h = parse_clause_file("# facts\np\n-p q\n-q -\"r & s\"\n").unwrap();
        assert_eq!(h.len(), 3);
        assert_eq!(h.clauses()[2].negatives.len(), 2);
        assert!(parse_clause_file("p q").is_err());
        assert!(parse_clause_file("-\"p").is_err());
    }

    #[test]
    fn sequent_file_parsing() {
        let set = parse_sequent_file("# base\np => q\n\nq => r  # trailing\np => q\n").unwrap();
        assert_eq!(set, [s("p => q"), s("q => r")].into_iter().collect());
        assert_eq!(parse_sequent_file("p => q\np q\n").unwrap_err().0, 2);
    }

    #[test]
    fn horn_decomposition() {
        let cl = horn_clauses_of(&f("p & (p & q -> r) & (r -> _|_)")).unwrap();
        assert_eq!(cl.len(), 3);
        assert_eq!(cl[1], clause(&["p", "q"], Some("r")));
        assert_eq!(cl[2], clause(&["r"], None));
        assert!(horn_clauses_of(&f("p | q")).is_none());
        assert!(horn_clauses_of(&f("(p -> q) -> r")).is_none());
        assert_eq!(horn_clauses_of(&f("p -> q -> r")).unwrap(), vec![clause(&["p", "q"], Some("r"))]);
    }

    fn set(items: &[&str]) -> BTreeSet<Sequent> {
        items.iter().map(|x| s(x)).collect()
    }

    #[test]
    fn id_check_examples() {
        let base = set(&["p => q"]);
        let cd = id_check(&base, &s("p => q")).unwrap();
        assert_eq!(*cd, CutDeduction::Leaf(s("p => q")));

        let base = set(&["=> p", "p => q"]);
        let cd = id_check(&base, &s("=> q")).unwrap();
        assert!(matches!(&*cd, CutDeduction::Cut { .. }));
        assert_eq!(cd.conclusion(), &s("=> q"));
        assert!(validate_cut_deduction(&cd, &base, &s("=> q")));

        let base = set(&["p => q"]);
        let cd = id_check(&base, &s("p, r => q")).unwrap();
        assert_eq!(cd.conclusion(), &s("p => q"));
        assert!(id_check(&base, &s("=> q")).is_none());
    }

    #[test]
    fn hypothesis_goal_needs_a_base_sequent() {
        // p ∈ Γ but no base sequent concludes p.
        assert!(id_check(&set(&["q => r"]), &s("p => p")).is_none());
        let cd = id_check(&set(&["q => p", "=> q"]), &s("p => p")).unwrap();
        assert_eq!(cd.conclusion(), &s("=> p"));
    }

    #[test]
    fn validation_rejects_bad_cuts() {
        let base = set(&["=> p", "p => q", "r => q"]);
        let leaf = |x: &str| Arc::new(CutDeduction::Leaf(s(x)));
        assert!(validate_cut_deduction(&leaf("p => q"), &base, &s("p => q")));
        let bad = CutDeduction::Cut { left: leaf("=> p"), right: leaf("r => q"), conclusion: s("r => q") };
        assert!(!validate_cut_deduction(&bad, &base, &s("r => q")));
        let wrong = CutDeduction::Cut { left: leaf("=> p"), right: leaf("p => q"), conclusion: s("p => q") };
        assert!(!validate_cut_deduction(&wrong, &base, &s("p => q")));
        assert!(!validate_cut_deduction(&leaf("s => q"), &base, &s("s => q")));
        assert!(!validate_cut_deduction(&leaf("p => q"), &base, &s("=> q")));
    }

    #[test]
    fn certificates_round_trip() {
        let base = set(&["=> p", "p => q", "p, q => r"]);
        let cd = id_check(&base, &s("=> r")).unwrap();
        let text = cd.to_certificate();
        let back = CutDeduction::parse_certificate(&text).unwrap();
        assert_eq!(*back, *cd);
        assert!(validate_cut_deduction(&back, &base, &s("=> r")));
        assert!(CutDeduction::parse_certificate("0 cut 1 2 \"=> p\"").is_err());
        assert!(CutDeduction::parse_certificate("").is_err());
    }

    /// Closure of `base` under cut with antecedents over the occurring formulas.
    pub(crate) fn cut_closure(base: &BTreeSet<Sequent>) -> BTreeSet<Sequent> {
        let mut all = base.clone();
        loop {
            let cur: Vec<Sequent> = all.iter().cloned().collect();
            let mut added = false;
            for l in &cur {
                for r in &cur {
                    if r.antecedent.contains(&l.succedent) {
                        let ant = l.antecedent.union(&r.antecedent.without(&l.succedent));
                        added |= all.insert(Sequent::new(ant, r.succedent.clone()));
                    }
                }
            }
            if !added {
                return all;
            }
        }
    }

    pub(crate) fn random_instance(rng: &mut ChaCha8Rng, n_base: usize, pool: &[Formula]) -> (BTreeSet<Sequent>, Sequent) {
        let pick_cedent = |rng: &mut ChaCha8Rng| -> Cedent {
            let n = rng.gen_range(0..=2.min(pool.len()));
            (0..n).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect()
        };
        let mut base = BTreeSet::new();
        for _ in 0..n_base {
            let ant = pick_cedent(rng);
            base.insert(Sequent::new(ant, pool[rng.gen_range(0..pool.len())].clone()));
        }
        let ant = pick_cedent(rng);
        (base, Sequent::new(ant, pool[rng.gen_range(0..pool.len())].clone()))
    }

    #[test]
    fn matches_cut_closure_on_small_instances() {
        let pool: Vec<Formula> = ["p", "q", "p & q", "p -> q"].iter().map(|x| f(x)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.gen_range(1..=8);
            let (base, target) = random_instance(&mut rng, n, &pool);
            let closure = cut_closure(&base);
            let expected = closure.iter().any(|x| x.is_subsequent_of(&target));
            let got = id_check(&base, &target);
            assert_eq!(got.is_some(), expected, "{base:?} {target}");
            if let Some(cd) = got {
                assert!(validate_cut_deduction(&cd, &base, &target));
            }
        }
    }

    #[test]
    fn agrees_with_explicit_encoding() {
        let pool: Vec<Formula> = ["p", "q", "r", "q | r"].iter().map(|x| f(x)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(0..=8);
            let (base, target) = random_instance(&mut rng, n, &pool);
            let encoded = encode_id_instance(&base, &target);
            assert_eq!(horn_satisfiability(&encoded).is_satisfiable(), id_check(&base, &target).is_none());
        }
    }

    proptest! {
        #[test]
        fn engine_matches_truth_tables(seed in any::<u64>(), atoms in 1usize..=6, n in 0usize..=12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_horn(&mut rng, atoms, n);
            let out = horn_satisfiability(&h);
            prop_assert_eq!(out.is_satisfiable(), brute_force_sat(&h));
            if let HornOutcome::Refuted(t) = out {
                prop_assert!(replay_reaches_empty(&h, &t));
                prop_assert!(t.steps.len() <= h.atoms().len());
            }
        }

        #[test]
        fn id_check_is_monotone(seed in any::<u64>()) {
            let pool: Vec<Formula> = ["p", "q", "r", "p -> q"].iter().map(|x| f(x)).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (base, target) = random_instance(&mut rng, 6, &pool);
            let (extra, _) = random_instance(&mut rng, 3, &pool);
            if id_check(&base, &target).is_some() {
                let more: BTreeSet<Sequent> = base.union(&extra).cloned().collect();
                prop_assert!(id_check(&more, &target).is_some());
            }
        }
    }
}

//! The propositional encoding of a machine's runs on inputs of a fixed length.

use std::collections::{HashMap, HashSet};

use crate::horn::{horn_clauses_of, HornClause};
use crate::syntax::{spd_enumerate, Cedent, ChoiceVector, Formula, Step};

use super::machine::{Symbol, TmComputation, TmError, TmSpec};

/// A right-nested list `x0 ∘ (x1 ∘ (… ∘ xk))` with every suffix kept.
#[derive(Clone, Debug)]
pub struct Junction {
    pub items: Vec<Formula>,
    /// `tails[j]` is the list from item `j` on; `tails[0]` is the whole formula.
    pub tails: Vec<Formula>,
}

impl Junction {
    fn build(items: Vec<Formula>, join: fn(Formula, Formula) -> Formula) -> Junction {
        assert!(!items.is_empty(), "empty junction");
        let mut tails = vec![items[items.len() - 1].clone()];
        for f in items[..items.len() - 1].iter().rev() {
            let next = join(f.clone(), tails.last().unwrap().clone());
            tails.push(next);
        }
        tails.reverse();
        Junction { items, tails }
    }

    pub fn conj(items: Vec<Formula>) -> Junction {
        Junction::build(items, Formula::and)
    }

    pub fn disj(items: Vec<Formula>) -> Junction {
        Junction::build(items, Formula::or)
    }

    pub fn formula(&self) -> &Formula {
        &self.tails[0]
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Path from the root to item `k`.
    pub fn path_to(&self, k: usize) -> Vec<Step> {
        let mut p = vec![Step::Right; k];
        if k + 1 < self.len() {
            p.push(Step::Left);
        }
        p
    }
}

/// `⊕` over `p_0 … p_{m-1}`: the disjunction of `p_j ∧ ⋀_{i≠j} ¬p_i`.
#[derive(Clone, Debug)]
pub struct ExclusiveOr {
    pub disjuncts: Junction,
    /// Conjunction lists of each disjunct; `None` when `m = 1` and the disjunct is the atom.
    pub parts: Vec<Option<Junction>>,
}

impl ExclusiveOr {
    fn new(atoms: &[Formula]) -> ExclusiveOr {
        let parts: Vec<Option<Junction>> = (0..atoms.len())
            .map(|j| {
                if atoms.len() == 1 {
                    return None;
                }
                let mut items = vec![atoms[j].clone()];
                items.extend(atoms.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, p)| Formula::not(p.clone())));
                Some(Junction::conj(items))
            })
            .collect();
        let disjuncts = Junction::disj(
            parts.iter().zip(atoms).map(|(p, a)| p.as_ref().map_or_else(|| a.clone(), |j| j.formula().clone())).collect(),
        );
        ExclusiveOr { disjuncts, parts }
    }
}

/// One member of `δ0`: a `⊕` block for positions `1..=n`, a blank fact beyond.
#[derive(Clone, Debug)]
pub enum InitialBlock {
    Choice(ExclusiveOr),
    Blank(Formula),
}

/// `δ_{t+1}` as lists: by position, then `a`, `b`, `c`.
#[derive(Clone, Debug)]
pub struct StepRule {
    pub positions: Junction,
    pub by_a: Vec<Junction>,
    pub by_b: Vec<Vec<Junction>>,
    pub by_c: Vec<Vec<Vec<Junction>>>,
}

#[derive(Clone, Debug)]
pub struct TmEncoding {
    pub machine: TmSpec,
    pub n: usize,
    pub ell: usize,
    pub symbols: Vec<Symbol>,
    atoms: Vec<Formula>,
    /// Over `t ≤ ℓ`, items `P(B,0,t) ∧ P(B,ℓ+1,t)`.
    pub beta: Junction,
    pub initial: Junction,
    pub initial_blocks: Vec<InitialBlock>,
    /// `steps[t]` is `δ_{t+1}`.
    pub steps: Vec<StepRule>,
    pub gamma_excl: Junction,
    /// Symbols of the items of `gamma_excl`, in order.
    pub gamma_symbols: Vec<Symbol>,
    pub alpha_neg: Formula,
    pub acc: Formula,
    pub rej: Formula,
    pub big_gamma: Cedent,
    pub delta_big: Cedent,
    /// Occurrence paths inside `δ0` of the `⊕` disjunctions: `(position, depth)`.
    choice_sites: HashMap<Vec<Step>, (usize, usize)>,
}

/// `P_a_i_t`, with head pairs written `q_a`.
pub fn atom_name(m: &TmSpec, s: Symbol, i: usize, t: usize) -> String {
    match s {
        Symbol::Tape(a) => format!("P_{}_{i}_{t}", m.tape[a]),
        Symbol::Head(q, a) => format!("P_{}_{}_{i}_{t}", m.states[q], m.tape[a]),
    }
}

impl TmEncoding {
    pub fn new(m: &TmSpec, n: usize) -> TmEncoding {
        assert!(n >= 1, "input length must be positive");
        let ell = m.ell(n);
        let symbols = m.symbols();
        let ns = symbols.len();
        let mut atoms = Vec::with_capacity((ell + 1) * (ell + 2) * ns);
        for t in 0..=ell {
            for i in 0..=ell + 1 {
                for &s in &symbols {
                    atoms.push(Formula::atom(&atom_name(m, s, i, t)));
                }
            }
        }
        let p = |s: Symbol, i: usize, t: usize| atoms[(t * (ell + 2) + i) * ns + m.symbol_index(s)].clone();
        let blank = Symbol::BLANK;

        let beta = Junction::conj((0..=ell).map(|t| Formula::and(p(blank, 0, t), p(blank, ell + 1, t))).collect());

        let mut initial_blocks = Vec::new();
        for i in 1..=ell {
            if i <= n {
                let cands: Vec<Formula> = m
                    .input
                    .iter()
                    .map(|&a| if i == 1 { p(Symbol::Head(m.start, a), 1, 0) } else { p(Symbol::Tape(a), i, 0) })
                    .collect();
                initial_blocks.push(InitialBlock::Choice(ExclusiveOr::new(&cands)));
            } else {
                initial_blocks.push(InitialBlock::Blank(p(blank, i, 0)));
            }
        }
        let initial = Junction::conj(
            initial_blocks
                .iter()
                .map(|b| match b {
                    InitialBlock::Choice(x) => x.disjuncts.formula().clone(),
                    InitialBlock::Blank(f) => f.clone(),
                })
                .collect(),
        );
        let mut choice_sites = HashMap::new();
        for (k, b) in initial_blocks.iter().enumerate() {
            if let InitialBlock::Choice(x) = b {
                let base = initial.path_to(k);
                for depth in 0..x.disjuncts.len() - 1 {
                    let mut path = base.clone();
                    path.extend(std::iter::repeat(Step::Right).take(depth));
                    choice_sites.insert(path, (k + 1, depth));
                }
            }
        }

        let mut steps = Vec::with_capacity(ell);
        for t in 0..ell {
            let mut by_a = Vec::with_capacity(ell);
            let mut by_b = Vec::with_capacity(ell);
            let mut by_c = Vec::with_capacity(ell);
            for i in 1..=ell {
                let mut bs = Vec::with_capacity(ns);
                let mut cs = Vec::with_capacity(ns);
                for &a in &symbols {
                    let mut c_lists = Vec::with_capacity(ns);
                    for &b in &symbols {
                        let imps = symbols
                            .iter()
                            .map(|&c| {
                                let body = Formula::and(p(a, i - 1, t), Formula::and(p(b, i, t), p(c, i + 1, t)));
                                Formula::imp(body, p(m.apply(a, b, c), i, t + 1))
                            })
                            .collect();
                        c_lists.push(Junction::conj(imps));
                    }
                    bs.push(Junction::conj(c_lists.iter().map(|j| j.formula().clone()).collect()));
                    cs.push(c_lists);
                }
                by_a.push(Junction::conj(bs.iter().map(|j| j.formula().clone()).collect()));
                by_b.push(bs);
                by_c.push(cs);
            }
            let positions = Junction::conj(by_a.iter().map(|j| j.formula().clone()).collect());
            steps.push(StepRule { positions, by_a, by_b, by_c });
        }

        let (acc_sym, rej_sym) = (m.accept_symbol(), m.reject_symbol());
        let gamma_symbols: Vec<Symbol> = symbols.iter().copied().filter(|&s| s != acc_sym && s != rej_sym).collect();
        let gamma_excl = Junction::conj(gamma_symbols.iter().map(|&s| Formula::not(p(s, 1, ell))).collect());
        let acc = p(acc_sym, 1, ell);
        let rej = p(rej_sym, 1, ell);
        let alpha_neg = Formula::not(Formula::and(acc.clone(), rej.clone()));

        let big_gamma: Cedent = std::iter::once(beta.formula().clone())
            .chain(std::iter::once(initial.formula().clone()))
            .chain(steps.iter().map(|s| s.positions.formula().clone()))
            .collect();
        let delta_big = big_gamma.with(gamma_excl.formula()).with(&alpha_neg);

        TmEncoding {
            machine: m.clone(),
            n,
            ell,
            symbols,
            atoms,
            beta,
            initial,
            initial_blocks,
            steps,
            gamma_excl,
            gamma_symbols,
            alpha_neg,
            acc,
            rej,
            big_gamma,
            delta_big,
            choice_sites,
        }
    }

    /// `P(s,i,t)`.
    pub fn atom(&self, s: Symbol, i: usize, t: usize) -> &Formula {
        &self.atoms[(t * (self.ell + 2) + i) * self.symbols.len() + self.machine.symbol_index(s)]
    }

    /// `δ_0 … δ_ℓ`.
    pub fn delta(&self) -> Vec<Formula> {
        std::iter::once(self.initial.formula().clone()).chain(self.steps.iter().map(|s| s.positions.formula().clone())).collect()
    }

    pub fn beta_formula(&self) -> &Formula {
        self.beta.formula()
    }

    pub fn gamma_formula(&self) -> &Formula {
        self.gamma_excl.formula()
    }

    pub fn goal(&self) -> Formula {
        Formula::or(self.acc.clone(), self.rej.clone())
    }

    /// Total formula size of `Δ`.
    pub fn size(&self) -> usize {
        self.delta_big.iter().map(Formula::size).sum()
    }

    /// `D_{i,t} = ⋁_a P(a,i,t)`.
    pub fn cell_disjunction(&self, i: usize, t: usize) -> Junction {
        Junction::disj(self.symbols.iter().map(|&s| self.atom(s, i, t).clone()).collect())
    }

    /// `δ0(x)`.
    pub fn initial_for(&self, x: &[usize]) -> Result<Formula, TmError> {
        self.check_input(x)?;
        let m = &self.machine;
        let items = (1..=self.ell)
            .map(|i| match i {
                1 => self.atom(Symbol::Head(m.start, x[0]), 1, 0).clone(),
                i if i <= self.n => self.atom(Symbol::Tape(x[i - 1]), i, 0).clone(),
                i => self.atom(Symbol::BLANK, i, 0).clone(),
            })
            .collect();
        Ok(Formula::and_all(items).expect("ℓ ≥ 1"))
    }

    fn check_input(&self, x: &[usize]) -> Result<(), TmError> {
        if x.len() != self.n {
            return Err(TmError::BadInput(format!("input of length {} for an encoding of length {}", x.len(), self.n)));
        }
        match x.iter().find(|a| !self.machine.input.contains(a)) {
            Some(a) => Err(TmError::BadInput(a.to_string())),
            None => Ok(()),
        }
    }

    /// `Γ(x,t)`: `{β, δ0(x)} ∪ {δ_s : 0<s≤t}`.
    pub fn input_cedent(&self, x: &[usize], t: usize) -> Result<Cedent, TmError> {
        assert!(t <= self.ell, "time beyond the bound");
        let d0 = self.initial_for(x)?;
        Ok([self.beta.formula().clone(), d0]
            .into_iter()
            .chain(self.steps[..t].iter().map(|s| s.positions.formula().clone()))
            .collect())
    }

    /// The choice vector over `spd_enumerate(Δ)` picking the disjunct naming `x_i` in each `⊕`.
    pub fn input_to_choices(&self, x: &[usize]) -> Result<ChoiceVector, TmError> {
        self.check_input(x)?;
        let e = spd_enumerate(&self.delta_big);
        let initial = self.initial.formula();
        let bits = e
            .occurrences
            .iter()
            .map(|occ| {
                if &e.basis[occ.formula_index] != initial {
                    return false;
                }
                let (pos, depth) = self.choice_sites[&occ.steps];
                let s = self.machine.input.iter().position(|&a| a == x[pos - 1]).expect("checked input");
                s > depth
            })
            .collect();
        Ok(ChoiceVector::new(bits))
    }

    /// The truth assignment of a run: `P(a,i,t)` holds iff `σ_t[i] = a`.
    pub fn run_assignment(&self, run: &TmComputation) -> HashSet<String> {
        let mut out = HashSet::new();
        for t in 0..=self.ell {
            for i in 0..=self.ell + 1 {
                out.insert(atom_name(&self.machine, run.at(i, t), i, t));
            }
        }
        out
    }

    /// Horn clauses of every member of `Γ(x,t)`.
    pub fn horn_clauses(&self, x: &[usize], t: usize) -> Result<Vec<HornClause<Formula>>, TmError> {
        let mut out = Vec::new();
        for g in self.input_cedent(x, t)?.iter() {
            out.extend(horn_clauses_of(g).expect("encoding members are Horn"));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{is_harrop, strengthen, tests::f};

    fn p(e: &TmEncoding, s: &str, i: usize, t: usize) -> Formula {
        e.atom(e.machine.parse_symbol(s).unwrap(), i, t).clone()
    }

    #[test]
    fn junction_paths() {
        let j = Junction::conj(vec![f("a"), f("b"), f("c")]);
        assert_eq!(j.formula(), &f("a & (b & c)"));
        assert_eq!(j.tails[1], f("b & c"));
        for k in 0..3 {
            assert_eq!(j.formula().subformula(&j.path_to(k)), Some(&j.items[k]));
        }
        let x = ExclusiveOr::new(&[f("p"), f("q")]);
        assert_eq!(x.disjuncts.formula(), &f("p & ~q | q & ~p"));
        assert_eq!(ExclusiveOr::new(&[f("p")]).disjuncts.formula(), &f("p"));
    }

    #[test]
    fn m1_n1_shape() {
        let m = TmSpec::m1();
        let e = TmEncoding::new(&m, 1);
        assert_eq!(e.ell, 2);
        assert_eq!(e.acc, f("P_sa_B_1_2"));
        assert_eq!(e.rej, f("P_sr_B_1_2"));
        assert_eq!(e.alpha_neg, f("~(P_sa_B_1_2 & P_sr_B_1_2)"));
        for t in 0..=2 {
            assert!(e.beta.items.contains(&Formula::and(p(&e, "B", 0, t), p(&e, "B", 3, t))));
        }
        let x = ExclusiveOr::new(&[p(&e, "s0/0", 1, 0), p(&e, "s0/1", 1, 0)]);
        assert_eq!(e.initial.items[0], *x.disjuncts.formula());
        assert_eq!(e.initial.items[1], p(&e, "B", 2, 0));
        assert_eq!(e.initial.len(), 2);
        assert_eq!(e.delta_big.len(), 2 + e.ell + 2);
        assert_eq!(e.gamma_excl.len(), 10);
    }

    #[test]
    fn one_implication_per_triple() {
        let m = TmSpec::m1();
        let e = TmEncoding::new(&m, 2);
        let ns = e.symbols.len();
        for s in &e.steps {
            let mut count = 0;
            let mut stack = vec![s.positions.formula().clone()];
            while let Some(g) = stack.pop() {
                match g.as_and() {
                    Some((a, b)) if g.as_imp().is_none() => {
                        stack.push(a.clone());
                        stack.push(b.clone());
                    }
                    _ => {
                        assert!(g.as_imp().is_some());
                        count += 1;
                    }
                }
            }
            assert_eq!(count, e.ell * ns * ns * ns);
        }
        let (a, b, c) = (m.parse_symbol("B").unwrap(), m.parse_symbol("s0/1").unwrap(), m.parse_symbol("0").unwrap());
        let imp = &e.steps[0].by_c[0][m.symbol_index(a)][m.symbol_index(b)].items[m.symbol_index(c)];
        assert_eq!(imp, &f("P_B_0_0 & (P_s0_1_1_0 & P_0_2_0) -> P_sa_B_1_1"));
    }

    #[test]
    fn initial_configuration() {
        let m = TmSpec::m1();
        let e = TmEncoding::new(&m, 1);
        let one = m.parse_input("1").unwrap();
        assert_eq!(e.initial_for(&one).unwrap(), f("P_s0_1_1_0 & P_B_2_0"));
        let g0 = e.input_cedent(&one, 0).unwrap();
        assert_eq!(g0.len(), 2);
        for t in 0..e.ell {
            assert!(g0.is_subset(&e.input_cedent(&one, t).unwrap()));
            assert!(e.input_cedent(&one, t).unwrap().is_subset(&e.input_cedent(&one, t + 1).unwrap()));
        }
        assert!(e.initial_for(&[1, 1]).is_err());
    }

    #[test]
    fn choices_pick_the_input() {
        let m = TmSpec::m1();
        let e = TmEncoding::new(&m, 1);
        let en = spd_enumerate(&e.delta_big);
        assert_eq!(en.count(), 1);
        for (x, want) in [("0", "P_s0_0_1_0 & ~P_s0_1_1_0"), ("1", "P_s0_1_1_0 & ~P_s0_0_1_0")] {
            let k = e.input_to_choices(&m.parse_input(x).unwrap()).unwrap();
            let g = strengthen(&e.delta_big, &en, &k).unwrap();
            assert!(g.iter().all(is_harrop));
            assert!(g.contains(&Formula::and(f(want), f("P_B_2_0"))), "{x}");
        }
    }

    #[test]
    fn strengthened_delta_is_satisfied_by_the_run() {
        for m in [TmSpec::m1(), TmSpec::parity()] {
            for n in 1..=2 {
                let e = TmEncoding::new(&m, n);
                let en = spd_enumerate(&e.delta_big);
                for x in m.inputs_of_length(n) {
                    let k = e.input_to_choices(&x).unwrap();
                    let g = strengthen(&e.delta_big, &en, &k).unwrap();
                    let truth = e.run_assignment(&m.simulate(&x).unwrap());
                    assert!(g.iter().all(|h| is_harrop(h) && h.evaluate(&|a| truth.contains(a))));
                }
            }
        }
    }

    #[test]
    fn size_is_polynomial_shape() {
        let m = TmSpec::m1();
        let sizes: Vec<usize> = (1..=3).map(|n| TmEncoding::new(&m, n).size()).collect();
        assert!(sizes.windows(2).all(|w| w[0] < w[1]));
        assert!(sizes[2] < 16 * sizes[0]);
    }
}

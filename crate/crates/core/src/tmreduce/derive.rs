//! A derivation of `Δ ⇒ acc ∨ rej` of size polynomial in the input length.
//!
//! Intermediate results are bound with `(x ⊃ G) x`, so each `α_t` is proved once
//! and reused as a hypothesis by the next step.

use crate::deduction::{ex_falso, NjDerivation};
use crate::syntax::{Cedent, Formula};

use super::encode::{InitialBlock, Junction, TmEncoding};
use super::machine::Symbol;

/// `ctx ⇒ G` from `ctx ⇒ x` and `ctx ∪ {x} ⇒ G`.
fn let_in(ctx: &Cedent, x: &Formula, ext: NjDerivation, body: NjDerivation) -> NjDerivation {
    NjDerivation::imp_e(NjDerivation::imp_i(ctx.clone(), x.clone(), body), ext)
}

/// Item `k` of a conjunction list from a derivation of the whole list.
fn project(whole: NjDerivation, j: &Junction, k: usize) -> NjDerivation {
    let mut d = whole;
    for _ in 0..k {
        d = NjDerivation::and_e(1, d);
    }
    if k + 1 < j.len() {
        d = NjDerivation::and_e(0, d);
    }
    d
}

/// The whole disjunction list from a derivation of item `k`.
fn inject(item: NjDerivation, j: &Junction, k: usize) -> NjDerivation {
    let mut d = item;
    if k + 1 < j.len() {
        d = NjDerivation::or_i(0, d, j.tails[k + 1].clone());
    }
    for idx in (0..k).rev() {
        d = NjDerivation::or_i(1, d, j.items[idx].clone());
    }
    d
}

/// Conjunction list from derivations of its items, all over one antecedent.
fn conj_intro(items: Vec<NjDerivation>) -> NjDerivation {
    items.into_iter().rev().reduce(|acc, d| NjDerivation::and_i(d, acc)).expect("nonempty list")
}

/// Case analysis on a disjunction list; `branch(k, ctx)` must derive the goal from `ctx ∋ items[k]`.
fn case_split(
    ctx: &Cedent,
    major: NjDerivation,
    j: &Junction,
    branch: &mut dyn FnMut(usize, &Cedent) -> NjDerivation,
) -> NjDerivation {
    fn level(
        ctx: &Cedent,
        major: NjDerivation,
        j: &Junction,
        at: usize,
        branch: &mut dyn FnMut(usize, &Cedent) -> NjDerivation,
    ) -> NjDerivation {
        let c0 = ctx.with(&j.items[at]);
        let m0 = branch(at, &c0);
        let c1 = ctx.with(&j.tails[at + 1]);
        let m1 = if at + 2 == j.len() {
            branch(at + 1, &c1)
        } else {
            let ax = NjDerivation::ax(c1.clone(), j.tails[at + 1].clone());
            level(&c1, ax, j, at + 1, branch)
        };
        NjDerivation::or_e(major, m0, m1)
    }
    if j.len() == 1 {
        let c = ctx.with(&j.items[0]);
        let body = branch(0, &c);
        return let_in(ctx, &j.items[0], major, body);
    }
    level(ctx, major, j, 0, branch)
}

struct Builder<'a> {
    e: &'a TmEncoding,
    /// `cells[t][i-1]` is `D_{i,t}`.
    cells: Vec<Vec<Junction>>,
    /// `alphas[t]` is `α_t`.
    alphas: Vec<Junction>,
}

impl<'a> Builder<'a> {
    fn new(e: &'a TmEncoding) -> Builder<'a> {
        let cells: Vec<Vec<Junction>> =
            (0..=e.ell).map(|t| (1..=e.ell).map(|i| e.cell_disjunction(i, t)).collect()).collect();
        let alphas = cells.iter().map(|row| Junction::conj(row.iter().map(|d| d.formula().clone()).collect())).collect();
        Builder { e, cells, alphas }
    }

    fn sym_index(&self, s: Symbol) -> usize {
        self.e.machine.symbol_index(s)
    }

    /// `ctx ⇒ P(B,0,t)` or `ctx ⇒ P(B,ℓ+1,t)` from `β`.
    fn boundary(&self, ctx: &Cedent, t: usize, right: bool) -> NjDerivation {
        let pair = project(NjDerivation::ax(ctx.clone(), self.e.beta.formula().clone()), &self.e.beta, t);
        NjDerivation::and_e(right as usize, pair)
    }

    /// `ctx ⇒ D_{i,t}` from `α_t ∈ ctx`.
    fn cell(&self, ctx: &Cedent, i: usize, t: usize) -> NjDerivation {
        project(NjDerivation::ax(ctx.clone(), self.alphas[t].formula().clone()), &self.alphas[t], i - 1)
    }

    /// `Δ ⇒ α_0` by cases on each `⊕` block of `δ0`.
    fn initial(&self, ctx: &Cedent) -> NjDerivation {
        let e = self.e;
        let mut parts = Vec::with_capacity(e.ell);
        for (k, block) in e.initial_blocks.iter().enumerate() {
            let i = k + 1;
            let target = &self.cells[0][k];
            let item = project(NjDerivation::ax(ctx.clone(), e.initial.formula().clone()), &e.initial, k);
            let d = match block {
                InitialBlock::Blank(_) => inject(item, target, self.sym_index(Symbol::BLANK)),
                InitialBlock::Choice(x) => case_split(ctx, item, &x.disjuncts, &mut |j, c| {
                    let a = e.machine.input[j];
                    let sym = if i == 1 { Symbol::Head(e.machine.start, a) } else { Symbol::Tape(a) };
                    let hyp = NjDerivation::ax(c.clone(), x.disjuncts.items[j].clone());
                    let atom = match &x.parts[j] {
                        Some(conj) => project(hyp, conj, 0),
                        None => hyp,
                    };
                    inject(atom, target, self.sym_index(sym))
                }),
            };
            parts.push(d);
        }
        conj_intro(parts)
    }

    /// `ctx ⇒ D_{i,t+1}` with `α_t ∈ ctx`, by cases on the cells `i-1`, `i`, `i+1` at time `t`.
    fn position(&self, ctx: &Cedent, t: usize, i: usize) -> NjDerivation {
        let e = self.e;
        let ell = e.ell;
        let rule = &e.steps[t];
        let target = &self.cells[t + 1][i - 1];
        let blk = &rule.positions.items[i - 1];
        let by_a = &rule.by_a[i - 1];

        let c1 = ctx.with(blk);
        let mid = &self.cells[t][i - 1];
        let c2 = c1.with(mid.formula());
        let c3 = if i < ell { c2.with(self.cells[t][i].formula()) } else { c2.clone() };

        let blank = self.sym_index(Symbol::BLANK);
        let on_a = |a: usize, ca: &Cedent| -> NjDerivation {
            let blk_a = &rule.by_b[i - 1][a];
            let ca2 = ca.with(blk_a.formula());
            let ext_a = project(NjDerivation::ax(ca.clone(), blk.clone()), by_a, a);
            let b_major = NjDerivation::ax(ca2.clone(), mid.formula().clone());
            let body_a = case_split(&ca2, b_major, mid, &mut |b, cb| {
                let blk_ab = &rule.by_c[i - 1][a][b];
                let cb2 = cb.with(blk_ab.formula());
                let ext_b = project(NjDerivation::ax(cb.clone(), blk_a.formula().clone()), blk_a, b);
                let mut leaf = |c: usize, cc: &Cedent| -> NjDerivation {
                    let imp = project(NjDerivation::ax(cc.clone(), blk_ab.formula().clone()), blk_ab, c);
                    let (sa, sb, sc) = (e.symbols[a], e.symbols[b], e.symbols[c]);
                    let ha = if i == 1 {
                        self.boundary(cc, t, false)
                    } else {
                        NjDerivation::ax(cc.clone(), e.atom(sa, i - 1, t).clone())
                    };
                    let hb = NjDerivation::ax(cc.clone(), e.atom(sb, i, t).clone());
                    let hc = if i == ell {
                        self.boundary(cc, t, true)
                    } else {
                        NjDerivation::ax(cc.clone(), e.atom(sc, i + 1, t).clone())
                    };
                    let prem = NjDerivation::and_i(ha, NjDerivation::and_i(hb, hc));
                    let out = NjDerivation::imp_e(imp, prem);
                    inject(out, target, self.sym_index(e.machine.apply(sa, sb, sc)))
                };
                let body_b = if i < ell {
                    let right = &self.cells[t][i];
                    let c_major = NjDerivation::ax(cb2.clone(), right.formula().clone());
                    case_split(&cb2, c_major, right, &mut leaf)
                } else {
                    leaf(blank, &cb2)
                };
                let_in(cb, blk_ab.formula(), ext_b, body_b)
            });
            let_in(ca, blk_a.formula(), ext_a, body_a)
        };

        let body3 = if i > 1 {
            let left = &self.cells[t][i - 2];
            case_split(&c3, self.cell(&c3, i - 1, t), left, &mut |a, ca| on_a(a, ca))
        } else {
            on_a(blank, &c3)
        };
        let body2 = if i < ell { let_in(&c2, self.cells[t][i].formula(), self.cell(&c2, i + 1, t), body3) } else { body3 };
        let body1 = let_in(&c1, mid.formula(), self.cell(&c1, i, t), body2);
        let ext = project(NjDerivation::ax(ctx.clone(), rule.positions.formula().clone()), &rule.positions, i - 1);
        let_in(ctx, blk, ext, body1)
    }

    /// `ctx ⇒ α_{t+1}` with `α_t ∈ ctx`.
    fn step(&self, ctx: &Cedent, t: usize) -> NjDerivation {
        conj_intro((1..=self.e.ell).map(|i| self.position(ctx, t, i)).collect())
    }

    /// `ctx ⇒ acc ∨ rej` with `α_ℓ ∈ ctx`, refuting every other symbol at position 1 with `γ`.
    fn finish(&self, ctx: &Cedent) -> NjDerivation {
        let e = self.e;
        let goal = e.goal();
        let d1 = &self.cells[e.ell][0];
        case_split(ctx, self.cell(ctx, 1, e.ell), d1, &mut |k, c| {
            let s = e.symbols[k];
            let atom = e.atom(s, 1, e.ell);
            if s == e.machine.accept_symbol() {
                NjDerivation::or_i(0, NjDerivation::ax(c.clone(), atom.clone()), e.rej.clone())
            } else if s == e.machine.reject_symbol() {
                NjDerivation::or_i(1, NjDerivation::ax(c.clone(), atom.clone()), e.acc.clone())
            } else {
                let idx = e.gamma_symbols.iter().position(|&g| g == s).expect("non-final symbol");
                let neg = project(NjDerivation::ax(c.clone(), e.gamma_excl.formula().clone()), &e.gamma_excl, idx);
                let bot = NjDerivation::imp_e(neg, NjDerivation::ax(c.clone(), atom.clone()));
                ex_falso(&bot, &goal)
            }
        })
    }

    fn from_time(&self, ctx: &Cedent, t: usize) -> NjDerivation {
        if t == self.e.ell {
            return self.finish(ctx);
        }
        let next = self.alphas[t + 1].formula();
        let inner = ctx.with(next);
        let body = self.from_time(&inner, t + 1);
        let_in(ctx, next, self.step(ctx, t), body)
    }

    fn build(&self) -> NjDerivation {
        let ctx = &self.e.delta_big;
        let a0 = self.alphas[0].formula();
        let inner = ctx.with(a0);
        let body = self.from_time(&inner, 0);
        let_in(ctx, a0, self.initial(ctx), body)
    }
}

/// `Δ ⇒ P((s_a,B),1,ℓ) ∨ P((s_r,B),1,ℓ)`.
pub fn build_dp_derivation(e: &TmEncoding) -> NjDerivation {
    Builder::new(e).build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deduction::{check_derivation, Rule};
    use crate::syntax::tests::f;
    use crate::syntax::Sequent;
    use crate::tmreduce::TmSpec;

    fn uses_hypothesis(d: &NjDerivation, h: &Formula) -> bool {
        let mut stack = vec![d];
        while let Some(x) = stack.pop() {
            if x.rule() == Rule::Ax && x.succedent() == h {
                return true;
            }
            stack.extend(x.premises());
        }
        false
    }

    #[test]
    fn list_helpers() {
        let ctx = Cedent::singleton(f("a & (b & c)"));
        let j = Junction::conj(vec![f("a"), f("b"), f("c")]);
        for k in 0..3 {
            let d = project(NjDerivation::ax(ctx.clone(), j.formula().clone()), &j, k);
            assert_eq!(d.succedent(), &j.items[k]);
            assert!(check_derivation(&d).is_ok());
        }
        let dj = Junction::disj(vec![f("a"), f("b"), f("c")]);
        let c = Cedent::singleton(f("b"));
        let d = inject(NjDerivation::ax(c.clone(), f("b")), &dj, 1);
        assert_eq!(d.conclusion(), &Sequent::new(c, f("a | (b | c)")));
        assert!(check_derivation(&d).is_ok());
        let c = Cedent::singleton(f("a | (b | c)"));
        let d = case_split(&c, NjDerivation::ax(c.clone(), dj.formula().clone()), &dj, &mut |k, cx| {
            inject(NjDerivation::ax(cx.clone(), dj.items[k].clone()), &Junction::disj(vec![f("c"), f("b"), f("a")]), 2 - k)
        });
        assert_eq!(d.succedent(), &f("c | (b | a)"));
        assert!(check_derivation(&d).is_ok());
    }

    #[test]
    fn m1_n1_derivation_checks() {
        let e = TmEncoding::new(&TmSpec::m1(), 1);
        let d = build_dp_derivation(&e);
        assert_eq!(d.conclusion(), &Sequent::new(e.delta_big.clone(), f("P_sa_B_1_2 | P_sr_B_1_2")));
        check_derivation(&d).unwrap();
        assert!(!uses_hypothesis(&d, &e.alpha_neg));
        assert!(uses_hypothesis(&d, e.gamma_formula()));
    }

    #[test]
    fn parity_n2_derivation_checks() {
        let e = TmEncoding::new(&TmSpec::parity(), 2);
        let d = build_dp_derivation(&e);
        assert_eq!(d.antecedent(), &e.delta_big);
        check_derivation(&d).unwrap();
    }
}

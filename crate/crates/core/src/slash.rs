//! The feasible slash relation `S : Γ | α` and the i.d.a. base set.

use std::collections::{BTreeSet, HashMap};

use crate::deduction::NjDerivation;
use crate::horn::IdChecker;
use crate::syntax::{analysis_set, Cedent, Formula, Kind, Sequent};

/// Outcome of one slash evaluation with the verdict of every subformula visited.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlashJudgment {
    pub context: Cedent,
    pub formula: Formula,
    pub holds: bool,
    /// `(subformula, verdict)` in completion order; the last entry is the root.
    pub trace: Vec<(Formula, bool)>,
}

/// Evaluates `S : Γ | α` against a fixed base `S`. Results are memoized per `(Γ, α)`.
pub struct SlashEvaluator {
    checker: IdChecker,
    memo: HashMap<(Cedent, Formula), bool>,
    trace: Vec<(Formula, bool)>,
}

impl SlashEvaluator {
    pub fn new<'a>(base: impl IntoIterator<Item = &'a Sequent>) -> SlashEvaluator {
        SlashEvaluator { checker: IdChecker::new(base), memo: HashMap::new(), trace: Vec::new() }
    }

    pub fn checker(&self) -> &IdChecker {
        &self.checker
    }

    /// Whether some subsequent of `context ⇒ f` is immediately derivable from the base.
    pub fn immediately_derivable(&self, context: &Cedent, f: &Formula) -> bool {
        self.checker.check(&Sequent::new(context.clone(), f.clone())).is_some()
    }

    pub fn eval(&mut self, context: &Cedent, f: &Formula) -> bool {
        let key = (context.clone(), f.clone());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let holds = self.immediately_derivable(context, f)
            && match f.kind() {
                Kind::Atom(_) | Kind::Bottom => true,
                Kind::Imp(b, c) => !self.eval(context, b) || self.eval(context, c),
                Kind::And(a, b) => self.eval(context, a) && self.eval(context, b),
                Kind::Or(a, b) => self.eval(context, a) || self.eval(context, b),
            };
        self.memo.insert(key, holds);
        self.trace.push((f.clone(), holds));
        holds
    }

    /// `S : Γ | Δ`: every member of `delta`.
    pub fn eval_cedent(&mut self, context: &Cedent, delta: &Cedent) -> bool {
        delta.iter().all(|g| self.eval(context, g))
    }

    pub fn judge(&mut self, context: &Cedent, f: &Formula) -> SlashJudgment {
        self.trace.clear();
        self.memo.clear();
        let holds = self.eval(context, f);
        SlashJudgment { context: context.clone(), formula: f.clone(), holds, trace: std::mem::take(&mut self.trace) }
    }
}

pub fn slash_eval(base: &BTreeSet<Sequent>, context: &Cedent, f: &Formula) -> bool {
    SlashEvaluator::new(base).eval(context, f)
}

/// `sequents(d)` plus `Γ0 ⇒ γ` and `C(γ)` for each `γ ∈ Γ0`, where `Γ0` is the conclusion antecedent.
pub fn build_ida_base(d: &NjDerivation) -> BTreeSet<Sequent> {
    let mut out = d.sequents();
    let gamma0 = d.antecedent();
    for g in gamma0.iter() {
        out.insert(Sequent::new(gamma0.clone(), g.clone()));
        out.extend(analysis_set(g));
    }
    out
}

/// Sequents of `d` whose slash implication `S:Γ0|Γ ⇒ S:Γ0|α` fails, with `Γ0` the conclusion antecedent.
pub fn soundness_violations(d: &NjDerivation, base: &BTreeSet<Sequent>) -> Vec<Sequent> {
    let gamma0 = d.antecedent().clone();
    let mut ev = SlashEvaluator::new(base);
    d.sequents()
        .into_iter()
        .filter(|s| ev.eval_cedent(&gamma0, &s.antecedent) && !ev.eval(&gamma0, &s.succedent))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deduction::tests::d;
    use crate::horn::id_check;
    use crate::syntax::is_harrop;
    use crate::syntax::tests::{arb_formula, ced, f, s};
    use proptest::prelude::*;

    fn set(items: &[&str]) -> BTreeSet<Sequent> {
        items.iter().map(|x| s(x)).collect()
    }

    #[test]
    fn slash_examples() {
        assert!(slash_eval(&set(&["=> p"]), &Cedent::empty(), &f("p")));
        assert!(!slash_eval(&set(&["=> p"]), &Cedent::empty(), &f("p | q")));
        assert!(slash_eval(&set(&["=> p -> q"]), &Cedent::empty(), &f("p -> q")));
        assert!(!slash_eval(&set(&["=> p -> q", "=> p"]), &Cedent::empty(), &f("p -> q")));
        assert!(slash_eval(&set(&["=> p -> q", "=> p", "p, p -> q => q"]), &Cedent::empty(), &f("p -> q")));
        let base = set(&["=> p | q", "=> q"]);
        assert!(slash_eval(&base, &Cedent::empty(), &f("p | q")));
        let base = set(&["=> p & q", "p & q => p"]);
        assert!(!slash_eval(&base, &Cedent::empty(), &f("p & q")));
        let base = set(&["=> p & q", "p & q => p", "p & q => q"]);
        assert!(slash_eval(&base, &Cedent::empty(), &f("p & q")));
    }

    #[test]
    fn cedent_slash_is_conjunctive() {
        let base = set(&["=> p", "=> q"]);
        let mut ev = SlashEvaluator::new(&base);
        assert!(ev.eval_cedent(&Cedent::empty(), &ced(&["p", "q"])));
        assert!(!ev.eval_cedent(&Cedent::empty(), &ced(&["p", "r"])));
        assert!(ev.eval_cedent(&Cedent::empty(), &Cedent::empty()));
    }

    #[test]
    fn judgment_trace_ends_at_root() {
        let base = set(&["=> p", "=> p | q"]);
        let j = SlashEvaluator::new(&base).judge(&Cedent::empty(), &f("p | q"));
        assert!(j.holds);
        assert_eq!(j.trace.last().unwrap(), &(f("p | q"), true));
        assert!(j.trace.contains(&(f("p"), true)));
    }

    #[test]
    fn ida_base_examples() {
        assert_eq!(build_ida_base(&d(r#"(ax "p => p")"#)), set(&["p => p"]));
        let b = build_ida_base(&d(r#"(andE0 "p & q => p" (ax "p & q => p & q"))"#));
        assert!(b.contains(&s("p & q => p")) && b.contains(&s("p & q => q")));
        let b = build_ida_base(&d(r#"(ax "p -> q => p -> q")"#));
        assert!(b.contains(&s("p, p -> q => q")));
    }

    #[test]
    fn soundness_on_examples() {
        let x = crate::deduction::tests::swap_or();
        assert!(soundness_violations(&x, &build_ida_base(&x)).is_empty());
        assert!(soundness_violations(&x, &x.sequents()).is_empty());
    }

    proptest! {
        #[test]
        fn slash_implies_id(a in arb_formula(3, 3), b in arb_formula(3, 2)) {
            let base: BTreeSet<Sequent> = analysis_set(&a).into_iter()
                .chain([Sequent::new(Cedent::empty(), a.clone())])
                .collect();
            let mut ev = SlashEvaluator::new(&base);
            for g in [&a, &b] {
                if ev.eval(&Cedent::empty(), g) {
                    prop_assert!(id_check(&base, &Sequent::new(Cedent::empty(), g.clone())).is_some());
                }
            }
        }

        #[test]
        fn harrop_completeness(raw in arb_formula(3, 4), extra in arb_formula(3, 2)) {
            /// Replaces strictly positive disjunctions by implications.
            fn harropize(f: &Formula) -> Formula {
                match f.kind() {
                    Kind::Or(a, b) | Kind::Imp(a, b) => Formula::imp(a.clone(), harropize(b)),
                    Kind::And(a, b) => Formula::and(harropize(a), harropize(b)),
                    _ => f.clone(),
                }
            }
            let a = harropize(&raw);
            prop_assert!(is_harrop(&a));
            let ctx = Cedent::singleton(extra.clone());
            let mut base = analysis_set(&a);
            base.insert(Sequent::new(ctx.clone(), a.clone()));
            if id_check(&base, &Sequent::new(ctx.clone(), a.clone())).is_some() {
                prop_assert!(slash_eval(&base, &ctx, &a));
            }
        }
    }
}

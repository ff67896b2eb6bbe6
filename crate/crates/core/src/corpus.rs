//! Derivation corpora and seeded random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::deduction::{check_derivation, parse_derivation, NjDerivation};
use crate::oracle::{prove, DEFAULT_CAP};
use crate::syntax::{is_harrop, spd_enumerate, Cedent, Formula, Sequent};

const HANDWRITTEN: &[(&str, &str)] = &[
    ("or_intro", include_str!("../corpus/or_intro.njp")),
    ("conj_elim", include_str!("../corpus/conj_elim.njp")),
    ("modus_ponens", include_str!("../corpus/modus_ponens.njp")),
    ("disjunctive_premise", include_str!("../corpus/disjunctive_premise.njp")),
    ("conj_detour", include_str!("../corpus/conj_detour.njp")),
    ("impl_detour", include_str!("../corpus/impl_detour.njp")),
    ("disj_detour", include_str!("../corpus/disj_detour.njp")),
    ("bottom_context", include_str!("../corpus/bottom_context.njp")),
    ("ex_falso", include_str!("../corpus/ex_falso.njp")),
    ("conj_of_imp", include_str!("../corpus/conj_of_imp.njp")),
    ("pair_goal", include_str!("../corpus/pair_goal.njp")),
    ("imp_goal", include_str!("../corpus/imp_goal.njp")),
];

pub const DEFAULT_SEED: u64 = 20;
pub const DEFAULT_GENERATED: usize = 40;

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub derivation: NjDerivation,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The bundled hand-written derivations.
pub fn handwritten() -> Vec<CorpusEntry> {
    HANDWRITTEN
        .iter()
        .map(|(name, text)| CorpusEntry {
            name: name.to_string(),
            derivation: parse_derivation(text).expect("bundled derivation parses"),
        })
        .collect()
}

/// Hand-written entries followed by `count` generated ones.
pub fn standard(seed: u64, count: usize) -> Vec<CorpusEntry> {
    let mut out = handwritten();
    out.extend(generated(seed, count));
    out
}

fn atom(rng: &mut impl Rng, atoms: usize) -> Formula {
    const NAMES: [&str; 6] = ["p", "q", "r", "s", "u", "v"];
    Formula::atom(NAMES[rng.gen_range(0..atoms.min(NAMES.len()))])
}

/// Any formula of depth at most `depth`.
pub fn random_formula(rng: &mut impl Rng, atoms: usize, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.08) { Formula::bottom() } else { atom(rng, atoms) };
    }
    let a = random_formula(rng, atoms, depth - 1);
    let b = random_formula(rng, atoms, depth - 1);
    match rng.gen_range(0..3) {
        0 => Formula::and(a, b),
        1 => Formula::or(a, b),
        _ => Formula::imp(a, b),
    }
}

/// A Harrop formula: disjunctions only inside implication antecedents.
pub fn random_harrop(rng: &mut impl Rng, atoms: usize, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.05) { Formula::bottom() } else { atom(rng, atoms) };
    }
    if rng.gen_bool(0.5) {
        Formula::and(random_harrop(rng, atoms, depth - 1), random_harrop(rng, atoms, depth - 1))
    } else {
        Formula::imp(random_formula(rng, atoms, depth - 1), random_harrop(rng, atoms, depth - 1))
    }
}

pub fn random_harrop_cedent(rng: &mut impl Rng, atoms: usize, depth: usize, max_len: usize) -> Cedent {
    let len = rng.gen_range(1..=max_len);
    (0..len).map(|_| random_harrop(rng, atoms, depth)).collect()
}

/// Strictly positive subformulas reachable through `∧` and the right of `⊃`.
fn positive_parts(f: &Formula, out: &mut Vec<Formula>) {
    out.push(f.clone());
    if let Some((a, b)) = f.as_and() {
        positive_parts(a, out);
        positive_parts(b, out);
    } else if let Some((_, b)) = f.as_imp() {
        positive_parts(b, out);
    } else if let Some((a, b)) = f.as_or() {
        positive_parts(a, out);
        positive_parts(b, out);
    }
}

/// A disjunctive goal likely to follow from `ctx`: one side drawn from its positive parts.
fn random_goal(rng: &mut impl Rng, ctx: &Cedent, atoms: usize) -> Formula {
    let mut parts = Vec::new();
    for g in ctx.iter() {
        positive_parts(g, &mut parts);
    }
    let pick = parts.choose(rng).cloned().unwrap_or_else(|| atom(rng, atoms));
    let other = random_formula(rng, atoms, 1);
    if rng.gen_bool(0.5) {
        Formula::or(pick, other)
    } else {
        Formula::or(other, pick)
    }
}

/// Wraps the subderivation at a random node in a conjunction, implication or disjunction detour.
pub fn inject_detour(rng: &mut impl Rng, d: &NjDerivation) -> NjDerivation {
    let mut paths = Vec::new();
    let mut stack = vec![(Vec::new(), d)];
    while let Some((p, x)) = stack.pop() {
        for (i, c) in x.premises().iter().enumerate() {
            let mut q = p.clone();
            q.push(i);
            stack.push((q, c));
        }
        paths.push(p);
    }
    paths.sort();
    let path = paths.choose(rng).expect("at least the root").clone();
    let sub = d.at(&path).expect("path from the tree").clone();
    let ctx = sub.antecedent().clone();
    let a = sub.succedent().clone();
    let inner = ctx.with(&a);
    let wrapped = match rng.gen_range(0..3) {
        0 => NjDerivation::and_e(0, NjDerivation::and_i(sub.clone(), sub)),
        1 => NjDerivation::imp_e(NjDerivation::imp_i(ctx, a.clone(), NjDerivation::ax(inner, a)), sub),
        _ => {
            let hyp = NjDerivation::ax(inner, a.clone());
            NjDerivation::or_e(NjDerivation::or_i(0, sub, a), hyp.clone(), hyp)
        }
    };
    d.replace_at(&path, wrapped).expect("path from the tree")
}

/// Oracle-proved derivations of `Γ ⇒ α0 ∨ α1` with Harrop `Γ`, about half with detours.
pub fn generated(seed: u64, count: usize) -> Vec<CorpusEntry> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < 100_000, "generator found too few provable instances");
        let ctx = random_harrop_cedent(&mut rng, 4, 3, 3);
        let goal = random_goal(&mut rng, &ctx, 4);
        let Ok(Some(mut d)) = prove(&Sequent::new(ctx, goal), DEFAULT_CAP) else {
            continue;
        };
        for _ in 0..rng.gen_range(0..=2) {
            d = inject_detour(&mut rng, &d);
        }
        debug_assert!(check_derivation(&d).is_ok());
        out.push(CorpusEntry { name: format!("gen{:03}", out.len()), derivation: d });
    }
    out
}

/// Derivations whose antecedent has between one and `max_disjunctions` strictly positive disjunctions.
pub fn choice_instances(seed: u64, count: usize, max_disjunctions: usize) -> Vec<NjDerivation> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < 100_000, "generator found too few provable instances");
        let len = rng.gen_range(1..=3);
        let ctx: Cedent = (0..len).map(|_| random_formula(&mut rng, 3, 3)).collect();
        let n = spd_enumerate(&ctx).count();
        if n == 0 || n > max_disjunctions || ctx.iter().all(is_harrop) {
            continue;
        }
        let goal = random_goal(&mut rng, &ctx, 3);
        if goal.as_or().is_none() {
            continue;
        }
        if let Ok(Some(d)) = prove(&Sequent::new(ctx, goal), DEFAULT_CAP) {
            out.push(d);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::find_harrop_maximal;

    #[test]
    fn handwritten_entries_check() {
        let h = handwritten();
        assert_eq!(h.len(), 12);
        for e in &h {
            check_derivation(&e.derivation).unwrap_or_else(|err| panic!("{}: {err}", e.name));
            assert!(e.derivation.antecedent().iter().all(is_harrop), "{}", e.name);
            assert!(e.derivation.succedent().as_or().is_some(), "{}", e.name);
        }
        let detour = h.iter().find(|e| e.name == "conj_detour").unwrap();
        assert!(find_harrop_maximal(&detour.derivation).is_some());
    }

    #[test]
    fn generation_is_seeded() {
        let a = generated(7, 5);
        let b = generated(7, 5);
        assert_eq!(a.len(), 5);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.derivation, y.derivation);
            check_derivation(&x.derivation).unwrap();
            assert!(x.derivation.antecedent().iter().all(is_harrop));
        }
    }

    #[test]
    fn detours_keep_the_conclusion() {
        let mut r = rng(3);
        for e in handwritten() {
            let d = inject_detour(&mut r, &e.derivation);
            assert_eq!(d.conclusion(), e.derivation.conclusion());
            check_derivation(&d).unwrap();
            assert!(d.node_count() > e.derivation.node_count());
        }
    }

    #[test]
    fn random_harrop_is_harrop() {
        let mut r = rng(1);
        for _ in 0..200 {
            assert!(is_harrop(&random_harrop(&mut r, 3, 4)));
        }
    }

    #[test]
    fn choice_instances_have_disjunctions() {
        for d in choice_instances(5, 4, 3) {
            let n = spd_enumerate(d.antecedent()).count();
            assert!((1..=3).contains(&n));
            check_derivation(&d).unwrap();
        }
    }
}

//! Harrop maximal formulas, their contracta and Harrop normalization.

use thiserror::Error;

use crate::deduction::{graft, is_ex_falso_gadget, NjDerivation, Rule};
use crate::horn::IdChecker;
use crate::syntax::{is_harrop, Cedent, Sequent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RedexKind {
    Disj,
    Conj,
    Impl,
}

/// An elimination whose major premise is introduced right above it, under a Harrop antecedent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RedexSite {
    pub path: Vec<usize>,
    pub kind: RedexKind,
}

pub fn is_harrop_cedent(c: &Cedent) -> bool {
    c.iter().all(is_harrop)
}

/// Kind of redex rooted at `d`, if any. The ex falso pattern is not treated as a redex.
pub fn redex_kind(d: &NjDerivation) -> Option<RedexKind> {
    let major = d.premises().first()?.rule();
    let kind = match (d.rule(), major) {
        (Rule::OrE, Rule::OrI0 | Rule::OrI1) => RedexKind::Disj,
        (Rule::AndE0 | Rule::AndE1, Rule::AndI) => RedexKind::Conj,
        (Rule::ImpE, Rule::ImpI) => RedexKind::Impl,
        _ => return None,
    };
    if !is_harrop_cedent(d.antecedent()) || is_ex_falso_gadget(d) {
        return None;
    }
    Some(kind)
}

/// The leftmost-topmost Harrop maximal site, in preorder.
pub fn find_harrop_maximal(d: &NjDerivation) -> Option<RedexSite> {
    let mut stack: Vec<(&NjDerivation, Vec<usize>)> = vec![(d, Vec::new())];
    while let Some((n, path)) = stack.pop() {
        if let Some(kind) = redex_kind(n) {
            return Some(RedexSite { path, kind });
        }
        for (i, p) in n.premises().iter().enumerate().rev() {
            let mut q = path.clone();
            q.push(i);
            stack.push((p, q));
        }
    }
    None
}

/// Every Harrop maximal site, in preorder.
pub fn all_harrop_maximal(d: &NjDerivation) -> Vec<RedexSite> {
    fn go(d: &NjDerivation, path: &mut Vec<usize>, out: &mut Vec<RedexSite>) {
        if let Some(kind) = redex_kind(d) {
            out.push(RedexSite { path: path.clone(), kind });
        }
        for (i, p) in d.premises().iter().enumerate() {
            path.push(i);
            go(p, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(d, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("no redex of kind {kind:?} at {path:?}")]
    InvalidSite { path: Vec<usize>, kind: RedexKind },
    #[error("fuel exhausted after {steps} contractions")]
    FuelExhausted { steps: usize, partial: Box<NjDerivation> },
}

/// The contractum of the redex rooted at `d`.
fn contract_here(d: &NjDerivation, kind: RedexKind) -> Option<NjDerivation> {
    let major = &d.premises()[0];
    match kind {
        RedexKind::Conj => {
            let side = usize::from(d.rule() == Rule::AndE1);
            Some(major.premises()[side].clone())
        }
        RedexKind::Impl => graft(&d.premises()[1], &major.premises()[0]).ok(),
        RedexKind::Disj => {
            let side = usize::from(major.rule() == Rule::OrI1);
            graft(&major.premises()[0], &d.premises()[1 + side]).ok()
        }
    }
}

pub fn contract(d: &NjDerivation, site: &RedexSite) -> Result<NjDerivation, NormalizeError> {
    let invalid = || NormalizeError::InvalidSite { path: site.path.clone(), kind: site.kind };
    let node = d.at(&site.path).ok_or_else(invalid)?;
    if redex_kind(node) != Some(site.kind) {
        return Err(invalid());
    }
    let replacement = contract_here(node, site.kind).ok_or_else(invalid)?;
    debug_assert!(replacement.conclusion() == node.conclusion());
    d.replace_at(&site.path, replacement).ok_or_else(invalid)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub derivation: NjDerivation,
    pub steps: usize,
}

/// Contracts leftmost-topmost sites until none is left, at most `fuel` times.
pub fn harrop_normalize(d: &NjDerivation, fuel: usize) -> Result<Normalized, NormalizeError> {
    let mut cur = d.clone();
    let mut steps = 0;
    while let Some(site) = find_harrop_maximal(&cur) {
        if steps == fuel {
            return Err(NormalizeError::FuelExhausted { steps, partial: Box::new(cur) });
        }
        cur = contract(&cur, &site)?;
        steps += 1;
    }
    Ok(Normalized { derivation: cur, steps })
}

/// The fuel used by the diagnostics: `10·|d|²` contractions.
pub fn default_fuel(d: &NjDerivation) -> usize {
    let n = d.node_count();
    10 * n * n
}

/// Sequents of `after` that are not immediately derivable from the sequents of `before`.
pub fn non_id_sequents(before: &NjDerivation, after: &NjDerivation) -> Vec<Sequent> {
    let checker = IdChecker::new(&before.sequents());
    after.sequents().into_iter().filter(|s| checker.check(s).is_none()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntroEndingError {
    #[error("derivation still has a Harrop maximal formula at {0:?}")]
    NotNormal(Vec<usize>),
    #[error("antecedent is not Harrop")]
    AntecedentNotHarrop,
    #[error("antecedent contains falsum")]
    BottomInAntecedent,
    #[error("succedent is Harrop")]
    SuccedentHarrop,
}

/// Whether a Harrop normal derivation with Harrop antecedent and non-Harrop succedent ends with an introduction.
pub fn check_intro_ending(d: &NjDerivation) -> Result<bool, IntroEndingError> {
    if let Some(site) = find_harrop_maximal(d) {
        return Err(IntroEndingError::NotNormal(site.path));
    }
    if !is_harrop_cedent(d.antecedent()) {
        return Err(IntroEndingError::AntecedentNotHarrop);
    }
    if d.antecedent().contains(&crate::syntax::Formula::bottom()) {
        return Err(IntroEndingError::BottomInAntecedent);
    }
    if is_harrop(d.succedent()) {
        return Err(IntroEndingError::SuccedentHarrop);
    }
    Ok(d.rule().is_introduction())
}

/// Harrop maximal-free check and id-preservation report for one normalization run.
#[derive(Clone, Debug)]
pub struct NormalizationReport {
    pub steps: usize,
    pub normal: bool,
    pub non_id: Vec<Sequent>,
    pub intro_ending: Option<bool>,
}

pub fn normalization_report(d: &NjDerivation, fuel: usize) -> Result<NormalizationReport, NormalizeError> {
    let n = harrop_normalize(d, fuel)?;
    let non_id = non_id_sequents(d, &n.derivation);
    let intro_ending = check_intro_ending(&n.derivation).ok();
    Ok(NormalizationReport { steps: n.steps, normal: find_harrop_maximal(&n.derivation).is_none(), non_id, intro_ending })
}

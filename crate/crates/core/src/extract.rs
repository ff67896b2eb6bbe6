//! Disjunction-property witnesses: the Buss–Mints route, the slash route and
//! the choice-vector generalization.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::deduction::{check_derivation, derive_dk, ex_falso, CheckError, NjDerivation, SurgeryError};
use crate::horn::{validate_cut_deduction, CutDeduction, IdChecker};
use crate::slash::build_ida_base;
use crate::syntax::{is_harrop, spd_enumerate, ChoiceVector, Formula, Sequent, StrengthenError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Method {
    Bm,
    Slash,
    Choice(ChoiceVector),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Bm => write!(f, "bm"),
            Method::Slash => write!(f, "slash"),
            Method::Choice(k) => write!(f, "choice({k})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Cut(Arc<CutDeduction>),
    /// Used only when `⊥` is in the antecedent.
    Derivation(NjDerivation),
}

impl Certificate {
    pub fn conclusion(&self) -> &Sequent {
        match self {
            Certificate::Cut(c) => c.conclusion(),
            Certificate::Derivation(d) => d.conclusion(),
        }
    }

    /// Text form: a cut-deduction listing or a derivation file.
    pub fn to_text(&self) -> String {
        match self {
            Certificate::Cut(c) => c.to_certificate(),
            Certificate::Derivation(d) => format!("{d}\n"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractionResult {
    pub index: usize,
    pub certificate: Certificate,
    pub base_used: BTreeSet<Sequent>,
    pub method: Method,
    /// `Γ ⇒ α_index` for the antecedent `Γ` the extraction ran on.
    pub target: Sequent,
}

impl ExtractionResult {
    pub fn validate(&self) -> bool {
        match &self.certificate {
            Certificate::Cut(c) => validate_cut_deduction(c, &self.base_used, &self.target),
            Certificate::Derivation(d) => d.conclusion() == &self.target && check_derivation(d).is_ok(),
        }
    }

    /// The sequent the certificate proves: a subsequent of `target`.
    pub fn extracted(&self) -> &Sequent {
        self.certificate.conclusion()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("derivation does not check: {0}")]
    Invalid(#[from] CheckError),
    #[error("antecedent member {0} is not Harrop")]
    NonHarropAntecedent(Formula),
    #[error("succedent {0} is not a disjunction")]
    NotDisjunction(Formula),
    #[error("neither disjunct is immediately derivable from the base set")]
    BoundednessViolation,
    #[error(transparent)]
    Strengthen(#[from] StrengthenError),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
}

impl ExtractError {
    /// Exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExtractError::BoundednessViolation => 3,
            _ => 2,
        }
    }
}

fn preconditions(d: &NjDerivation) -> Result<(Formula, Formula), ExtractError> {
    check_derivation(d)?;
    if let Some(g) = d.antecedent().iter().find(|g| !is_harrop(g)) {
        return Err(ExtractError::NonHarropAntecedent(g.clone()));
    }
    match d.succedent().as_or() {
        Some((a, b)) => Ok((a.clone(), b.clone())),
        None => Err(ExtractError::NotDisjunction(d.succedent().clone())),
    }
}

fn run(d: &NjDerivation, base: BTreeSet<Sequent>, method: Method) -> Result<ExtractionResult, ExtractError> {
    let (a0, a1) = preconditions(d)?;
    let gamma = d.antecedent().clone();
    if gamma.contains(&Formula::bottom()) {
        let ax = NjDerivation::ax(gamma.clone(), Formula::bottom());
        let cert = ex_falso(&ax, &a0);
        return Ok(ExtractionResult {
            index: 0,
            target: Sequent::new(gamma, a0),
            certificate: Certificate::Derivation(cert),
            base_used: base,
            method,
        });
    }
    let checker = IdChecker::new(&base);
    for (index, alpha) in [(0, a0), (1, a1)] {
        let target = Sequent::new(gamma.clone(), alpha);
        if let Some(cd) = checker.check(&target) {
            return Ok(ExtractionResult { index, certificate: Certificate::Cut(cd), base_used: base, method, target });
        }
    }
    Err(ExtractError::BoundednessViolation)
}

/// Tries `Γ ⇒ α0` then `Γ ⇒ α1` against the sequents of `d`.
pub fn extract_bm(d: &NjDerivation) -> Result<ExtractionResult, ExtractError> {
    run(d, d.sequents(), Method::Bm)
}

/// As [`extract_bm`] over the i.d.a. base of `d`.
pub fn extract_slash(d: &NjDerivation) -> Result<ExtractionResult, ExtractError> {
    run(d, build_ida_base(d), Method::Slash)
}

/// Strengthens the antecedent by `k`, rebuilds the derivation and extracts from it.
pub fn extract_choice(d: &NjDerivation, k: &ChoiceVector) -> Result<ExtractionResult, ExtractError> {
    let e = spd_enumerate(d.antecedent());
    if e.count() != k.len() {
        return Err(StrengthenError::LengthMismatch { expected: e.count(), found: k.len() }.into());
    }
    let dk = derive_dk(d, &e, k)?;
    run(&dk, dk.sequents(), Method::Choice(k.clone()))
}

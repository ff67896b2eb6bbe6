//! Propositional formulas, cedents and sequents.
//!
//! Formulas are immutable, reference counted trees with a cached structural
//! hash, so cloning is cheap and equality checks usually stop at the hash.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

/// A propositional formula over `⊥ ∧ ∨ ⊃`. Negation is `f ⊃ ⊥`.
#[derive(Clone)]
pub struct Formula(Arc<Node>);

struct Node {
    kind: Kind,
    hash: u64,
    size: usize,
}

/// The outermost constructor of a formula.
#[derive(PartialEq, Eq)]
pub enum Kind {
    Atom(Arc<str>),
    Bottom,
    And(Formula, Formula),
    Or(Formula, Formula),
    Imp(Formula, Formula),
}

fn mix(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn combine(tag: u64, a: u64, b: u64) -> u64 {
    mix(tag ^ mix(a.wrapping_add(0x9e37_79b9_7f4a_7c15)).rotate_left(17) ^ mix(b).rotate_left(41))
}

fn hash_name(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in name.bytes() {
        h ^= u64::from(byte);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    mix(h)
}

impl Formula {
    fn from_kind(kind: Kind) -> Formula {
        let (hash, size) = match &kind {
            Kind::Atom(name) => (combine(1, hash_name(name), 0), 1),
            Kind::Bottom => (combine(2, 0, 0), 1),
            Kind::And(a, b) => (combine(3, a.0.hash, b.0.hash), 1 + a.size() + b.size()),
            Kind::Or(a, b) => (combine(4, a.0.hash, b.0.hash), 1 + a.size() + b.size()),
            Kind::Imp(a, b) => (combine(5, a.0.hash, b.0.hash), 1 + a.size() + b.size()),
        };
        Formula(Arc::new(Node { kind, hash, size }))
    }

    /// Panics if `name` is not an identifier; use [`parse_formula`] for untrusted text.
    pub fn atom(name: &str) -> Formula {
        assert!(is_identifier(name), "invalid atom name {name:?}");
        Formula::from_kind(Kind::Atom(Arc::from(name)))
    }

    pub fn bottom() -> Formula {
        Formula::from_kind(Kind::Bottom)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::from_kind(Kind::And(a, b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::from_kind(Kind::Or(a, b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::from_kind(Kind::Imp(a, b))
    }

    pub fn not(a: Formula) -> Formula {
        Formula::imp(a, Formula::bottom())
    }

    /// Right-nested conjunction; `None` for an empty list.
    pub fn and_all(items: Vec<Formula>) -> Option<Formula> {
        items.into_iter().rev().reduce(|acc, f| Formula::and(f, acc))
    }

    /// Right-nested disjunction; `None` for an empty list.
    pub fn or_all(items: Vec<Formula>) -> Option<Formula> {
        items.into_iter().rev().reduce(|acc, f| Formula::or(f, acc))
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// Number of nodes in the formula tree.
    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn structural_hash(&self) -> u64 {
        self.0.hash
    }

    pub fn ptr_eq(&self, other: &Formula) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn is_atom(&self) -> bool {
        matches!(self.kind(), Kind::Atom(_))
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self.kind(), Kind::Bottom)
    }

    pub fn atom_name(&self) -> Option<&str> {
        match self.kind() {
            Kind::Atom(name) => Some(name),
            _ => None,
        }
    }

    pub fn as_and(&self) -> Option<(&Formula, &Formula)> {
        match self.kind() {
            Kind::And(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_or(&self) -> Option<(&Formula, &Formula)> {
        match self.kind() {
            Kind::Or(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_imp(&self) -> Option<(&Formula, &Formula)> {
        match self.kind() {
            Kind::Imp(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// The two children of a binary node.
    pub fn children(&self) -> Option<(&Formula, &Formula)> {
        match self.kind() {
            Kind::And(a, b) | Kind::Or(a, b) | Kind::Imp(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// Rebuilds a binary node of the same kind with new children.
    fn with_children(&self, a: Formula, b: Formula) -> Formula {
        match self.kind() {
            Kind::And(..) => Formula::and(a, b),
            Kind::Or(..) => Formula::or(a, b),
            Kind::Imp(..) => Formula::imp(a, b),
            _ => self.clone(),
        }
    }

    /// Classical truth value under an assignment of the atoms.
    pub fn evaluate(&self, value: &dyn Fn(&str) -> bool) -> bool {
        match self.kind() {
            Kind::Atom(name) => value(name),
            Kind::Bottom => false,
            Kind::And(a, b) => a.evaluate(value) && b.evaluate(value),
            Kind::Or(a, b) => a.evaluate(value) || b.evaluate(value),
            Kind::Imp(a, b) => !a.evaluate(value) || b.evaluate(value),
        }
    }

    /// Atom names occurring in the formula.
    pub fn atoms(&self, out: &mut BTreeSet<String>) {
        match self.kind() {
            Kind::Atom(name) => {
                out.insert(name.to_string());
            }
            Kind::Bottom => {}
            Kind::And(a, b) | Kind::Or(a, b) | Kind::Imp(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }

    /// Subformula at a path, if the path resolves.
    pub fn subformula(&self, steps: &[Step]) -> Option<&Formula> {
        let mut cur = self;
        for step in steps {
            let (a, b) = cur.children()?;
            cur = match step {
                Step::Left => a,
                Step::Right => b,
            };
        }
        Some(cur)
    }

    fn precedence(&self) -> u8 {
        match self.kind() {
            Kind::Atom(_) | Kind::Bottom => 5,
            Kind::Imp(_, b) if b.is_bottom() => 4,
            Kind::And(..) => 3,
            Kind::Or(..) => 2,
            Kind::Imp(..) => 1,
        }
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Formula) -> bool {
        self.ptr_eq(other)
            || (self.0.hash == other.0.hash && self.0.size == other.0.size && self.0.kind == other.0.kind)
    }
}

impl Eq for Formula {}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl Ord for Formula {
    /// A total order keyed on the structural hash. It is deterministic but not
    /// alphabetical; use [`Cedent::canonical`] for the printed order.
    fn cmp(&self, other: &Formula) -> Ordering {
        if self.ptr_eq(other) {
            return Ordering::Equal;
        }
        self.0
            .hash
            .cmp(&other.0.hash)
            .then(self.0.size.cmp(&other.0.size))
            .then_with(|| cmp_kind(self.kind(), other.kind()))
    }
}

impl PartialOrd for Formula {
    fn partial_cmp(&self, other: &Formula) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn cmp_kind(a: &Kind, b: &Kind) -> Ordering {
    fn tag(k: &Kind) -> u8 {
        match k {
            Kind::Atom(_) => 0,
            Kind::Bottom => 1,
            Kind::And(..) => 2,
            Kind::Or(..) => 3,
            Kind::Imp(..) => 4,
        }
    }
    match (a, b) {
        (Kind::Atom(x), Kind::Atom(y)) => x.cmp(y),
        (Kind::And(a1, b1), Kind::And(a2, b2))
        | (Kind::Or(a1, b1), Kind::Or(a2, b2))
        | (Kind::Imp(a1, b1), Kind::Imp(a2, b2)) => a1.cmp(a2).then_with(|| b1.cmp(b2)),
        _ => tag(a).cmp(&tag(b)),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn wrap(x: &Formula, parens: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if parens {
                write!(f, "(")?;
                go(x, f)?;
                write!(f, ")")
            } else {
                go(x, f)
            }
        }
        fn go(x: &Formula, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match x.kind() {
                Kind::Atom(name) => write!(f, "{name}"),
                Kind::Bottom => write!(f, "_|_"),
                Kind::Imp(a, b) if b.is_bottom() => {
                    write!(f, "~")?;
                    wrap(a, a.precedence() < 4, f)
                }
                Kind::And(a, b) => {
                    wrap(a, a.precedence() <= 3, f)?;
                    write!(f, " & ")?;
                    wrap(b, b.precedence() < 3, f)
                }
                Kind::Or(a, b) => {
                    wrap(a, a.precedence() <= 2, f)?;
                    write!(f, " | ")?;
                    wrap(b, b.precedence() < 2, f)
                }
                Kind::Imp(a, b) => {
                    wrap(a, a.precedence() <= 1, f)?;
                    write!(f, " -> ")?;
                    go(b, f)
                }
            }
        }
        go(self, f)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// True iff no strictly positive occurrence is a disjunction.
pub fn is_harrop(f: &Formula) -> bool {
    match f.kind() {
        Kind::Atom(_) | Kind::Bottom => true,
        Kind::Or(..) => false,
        Kind::And(a, b) => is_harrop(a) && is_harrop(b),
        Kind::Imp(_, b) => is_harrop(b),
    }
}

/// Direction token of an occurrence path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    Left,
    Right,
}

/// An occurrence of a subformula inside a member of a cedent.
///
/// `formula_index` refers to the canonical (printed, lexicographic) listing.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccurrencePath {
    pub formula_index: usize,
    pub steps: Vec<Step>,
}

impl fmt::Display for OccurrencePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.formula_index)?;
        if self.steps.is_empty() {
            return write!(f, "root");
        }
        for s in &self.steps {
            write!(f, "{}", if *s == Step::Left { 'L' } else { 'R' })?;
        }
        Ok(())
    }
}

/// Strictly positive occurrences of `f` in preorder (outer before inner, left before right).
pub fn strictly_positive_occurrences(f: &Formula) -> Vec<OccurrencePath> {
    fn go(f: &Formula, path: &mut Vec<Step>, out: &mut Vec<OccurrencePath>) {
        out.push(OccurrencePath { formula_index: 0, steps: path.clone() });
        match f.kind() {
            Kind::And(a, b) | Kind::Or(a, b) => {
                path.push(Step::Left);
                go(a, path, out);
                path.pop();
                path.push(Step::Right);
                go(b, path, out);
                path.pop();
            }
            Kind::Imp(_, b) => {
                path.push(Step::Right);
                go(b, path, out);
                path.pop();
            }
            Kind::Atom(_) | Kind::Bottom => {}
        }
    }
    let mut out = Vec::new();
    go(f, &mut Vec::new(), &mut out);
    out
}

/// A finite set of formulas.
#[derive(Clone)]
pub struct Cedent(Arc<CedentData>);

struct CedentData {
    items: Vec<Formula>,
    hash: u64,
}

impl Cedent {
    fn from_sorted(items: Vec<Formula>) -> Cedent {
        let hash = items.iter().fold(0x51_7cc1_b727_220a_u64, |h, f| combine(7, h, f.structural_hash()));
        Cedent(Arc::new(CedentData { items, hash }))
    }

    pub fn empty() -> Cedent {
        Cedent::from_sorted(Vec::new())
    }

    pub fn singleton(f: Formula) -> Cedent {
        Cedent::from_sorted(vec![f])
    }

    pub fn len(&self) -> usize {
        self.0.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.items.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Formula> {
        self.0.items.iter()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.0.items.binary_search(f).is_ok()
    }

    pub fn ptr_eq(&self, other: &Cedent) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Address of the shared storage; stable while any clone is alive.
    pub fn ptr_key(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn with(&self, f: &Formula) -> Cedent {
        match self.0.items.binary_search(f) {
            Ok(_) => self.clone(),
            Err(pos) => {
                let mut items = Vec::with_capacity(self.len() + 1);
                items.extend_from_slice(&self.0.items[..pos]);
                items.push(f.clone());
                items.extend_from_slice(&self.0.items[pos..]);
                Cedent::from_sorted(items)
            }
        }
    }

    pub fn without(&self, f: &Formula) -> Cedent {
        match self.0.items.binary_search(f) {
            Err(_) => self.clone(),
            Ok(pos) => {
                let mut items = self.0.items.clone();
                items.remove(pos);
                Cedent::from_sorted(items)
            }
        }
    }

    pub fn union(&self, other: &Cedent) -> Cedent {
        if other.is_empty() || self.ptr_eq(other) {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        let (a, b) = (&self.0.items, &other.0.items);
        let mut items = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    items.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    items.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    items.push(a[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        items.extend_from_slice(&a[i..]);
        items.extend_from_slice(&b[j..]);
        if items.len() == a.len() {
            return self.clone();
        }
        Cedent::from_sorted(items)
    }

    pub fn is_subset(&self, other: &Cedent) -> bool {
        if self.ptr_eq(other) {
            return true;
        }
        let b = &other.0.items;
        let mut j = 0;
        for f in &self.0.items {
            while j < b.len() && b[j] < *f {
                j += 1;
            }
            if j == b.len() || b[j] != *f {
                return false;
            }
            j += 1;
        }
        true
    }

    /// True iff `self = base ∪ {extra}` with `extra` possibly already in `base`.
    pub fn is_extension(&self, base: &Cedent, extra: &Formula) -> bool {
        let a = &self.0.items;
        let b = &base.0.items;
        if a.len() != b.len() && a.len() != b.len() + 1 {
            return false;
        }
        if !self.contains(extra) {
            return false;
        }
        let (mut i, mut j) = (0, 0);
        while i < a.len() {
            if j < b.len() && a[i] == b[j] {
                i += 1;
                j += 1;
            } else if a[i] == *extra {
                i += 1;
            } else {
                return false;
            }
        }
        j == b.len()
    }

    /// Members sorted by their printed form: the canonical listing.
    pub fn canonical(&self) -> Vec<Formula> {
        let mut keyed: Vec<(String, Formula)> = self.iter().map(|f| (f.to_string(), f.clone())).collect();
        keyed.sort_by(|x, y| x.0.cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
        keyed.into_iter().map(|(_, f)| f).collect()
    }

    /// Sum of member sizes.
    pub fn size(&self) -> usize {
        self.iter().map(Formula::size).sum()
    }
}

impl FromIterator<Formula> for Cedent {
    fn from_iter<I: IntoIterator<Item = Formula>>(iter: I) -> Cedent {
        let mut items: Vec<Formula> = iter.into_iter().collect();
        items.sort();
        items.dedup();
        Cedent::from_sorted(items)
    }
}

impl PartialEq for Cedent {
    fn eq(&self, other: &Cedent) -> bool {
        self.ptr_eq(other) || (self.0.hash == other.0.hash && self.0.items == other.0.items)
    }
}

impl Eq for Cedent {}

impl Hash for Cedent {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl Ord for Cedent {
    fn cmp(&self, other: &Cedent) -> Ordering {
        if self.ptr_eq(other) {
            return Ordering::Equal;
        }
        self.0.hash.cmp(&other.0.hash).then_with(|| self.0.items.cmp(&other.0.items))
    }
}

impl PartialOrd for Cedent {
    fn partial_cmp(&self, other: &Cedent) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cedent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut printed: Vec<String> = self.iter().map(Formula::to_string).collect();
        printed.sort();
        write!(f, "{}", printed.join(", "))
    }
}

impl fmt::Debug for Cedent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

/// `antecedent ⇒ succedent`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequent {
    pub antecedent: Cedent,
    pub succedent: Formula,
}

impl Sequent {
    pub fn new(antecedent: Cedent, succedent: Formula) -> Sequent {
        Sequent { antecedent, succedent }
    }

    /// `self` is a subsequent of `other`: same succedent, smaller antecedent.
    pub fn is_subsequent_of(&self, other: &Sequent) -> bool {
        self.succedent == other.succedent && self.antecedent.is_subset(&other.antecedent)
    }

    pub fn size(&self) -> usize {
        self.antecedent.size() + self.succedent.size()
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.antecedent.is_empty() {
            write!(f, "=> {}", self.succedent)
        } else {
            write!(f, "{} => {}", self.antecedent, self.succedent)
        }
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Bottom,
    Not,
    And,
    Or,
    Imp,
    LParen,
    RParen,
    Comma,
    Turnstile,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = if text[i..].starts_with("_|_") {
            i += 3;
            Tok::Bottom
        } else if text[i..].starts_with("->") {
            i += 2;
            Tok::Imp
        } else if text[i..].starts_with("=>") {
            i += 2;
            Tok::Turnstile
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            Tok::Ident(text[start..i].to_string())
        } else {
            i += 1;
            match c {
                b'~' => Tok::Not,
                b'&' => Tok::And,
                b'|' => Tok::Or,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                _ => {
                    return Err(ParseError {
                        pos: start,
                        message: format!("unexpected character {:?}", c as char),
                    })
                }
            }
        };
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, message: &str) -> Result<T, ParseError> {
        Err(ParseError { pos: self.offset(), message: message.to_string() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let left = self.or()?;
        if self.eat(&Tok::Imp) {
            let right = self.imp()?;
            return Ok(Formula::imp(left, right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let left = self.and()?;
        if self.eat(&Tok::Or) {
            let right = self.or()?;
            return Ok(Formula::or(left, right));
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let left = self.unary()?;
        if self.eat(&Tok::And) {
            let right = self.and()?;
            return Ok(Formula::and(left, right));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Bottom) => {
                self.pos += 1;
                Ok(Formula::bottom())
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(Formula::atom(&name))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.imp()?;
                if !self.eat(&Tok::RParen) {
                    return self.error("expected ')'");
                }
                Ok(f)
            }
            Some(_) => self.error("expected a formula"),
            None => self.error("unexpected end of input"),
        }
    }
}

fn parser(text: &str) -> Result<Parser, ParseError> {
    Ok(Parser { toks: tokenize(text)?, pos: 0, end: text.len() })
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = parser(text)?;
    let f = p.imp()?;
    if p.peek().is_some() {
        return p.error("trailing input");
    }
    Ok(f)
}

/// Parses `g1, g2, ...`; the empty string is the empty cedent.
pub fn parse_cedent(text: &str) -> Result<Cedent, ParseError> {
    let mut p = parser(text)?;
    let mut out = Vec::new();
    if p.peek().is_none() {
        return Ok(Cedent::empty());
    }
    loop {
        out.push(p.imp()?);
        if p.eat(&Tok::Comma) {
            continue;
        }
        if p.peek().is_some() {
            return p.error("expected ','");
        }
        return Ok(out.into_iter().collect());
    }
}

/// Parses `g1, g2, ... => f`.
pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let mut p = parser(text)?;
    let mut ante = Vec::new();
    if !p.eat(&Tok::Turnstile) {
        loop {
            ante.push(p.imp()?);
            if p.eat(&Tok::Comma) {
                continue;
            }
            if p.eat(&Tok::Turnstile) {
                break;
            }
            return p.error("expected ',' or '=>'");
        }
    }
    let succ = p.imp()?;
    if p.peek().is_some() {
        return p.error("trailing input");
    }
    Ok(Sequent::new(ante.into_iter().collect(), succ))
}

/// Strictly positive disjunction occurrences of a cedent, outer occurrences first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpdEnumeration {
    /// Canonical listing the occurrences index into.
    pub basis: Vec<Formula>,
    pub occurrences: Vec<OccurrencePath>,
}

impl SpdEnumeration {
    pub fn count(&self) -> usize {
        self.occurrences.len()
    }

    /// Occurrences inside member `formula_index`, renumbered to index 0.
    pub fn restrict(&self, formula_index: usize) -> SpdEnumeration {
        SpdEnumeration {
            basis: vec![self.basis[formula_index].clone()],
            occurrences: self
                .occurrences
                .iter()
                .filter(|o| o.formula_index == formula_index)
                .map(|o| OccurrencePath { formula_index: 0, steps: o.steps.clone() })
                .collect(),
        }
    }
}

pub fn spd_enumerate(g: &Cedent) -> SpdEnumeration {
    let basis = g.canonical();
    let mut occurrences = Vec::new();
    for (idx, f) in basis.iter().enumerate() {
        for occ in strictly_positive_occurrences(f) {
            if f.subformula(&occ.steps).is_some_and(|s| s.as_or().is_some()) {
                occurrences.push(OccurrencePath { formula_index: idx, steps: occ.steps });
            }
        }
    }
    SpdEnumeration { basis, occurrences }
}

/// One bit per enumerated disjunction; bit `j` selects the disjunct of occurrence `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChoiceVector {
    pub bits: Vec<bool>,
}

impl ChoiceVector {
    pub fn new(bits: Vec<bool>) -> ChoiceVector {
        ChoiceVector { bits }
    }

    /// Bit `j` is bit `j` of `k`.
    pub fn from_number(k: u64, len: usize) -> ChoiceVector {
        ChoiceVector { bits: (0..len).map(|j| j < 64 && (k >> j) & 1 == 1).collect() }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl std::str::FromStr for ChoiceVector {
    type Err = ParseError;

    /// A string of `0`/`1`, bit 0 first.
    fn from_str(s: &str) -> Result<ChoiceVector, ParseError> {
        let mut bits = Vec::new();
        for (pos, c) in s.chars().enumerate() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(ParseError { pos, message: format!("expected 0 or 1, found {c:?}") }),
            }
        }
        Ok(ChoiceVector { bits })
    }
}

impl fmt::Display for ChoiceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{}", if *b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrengthenError {
    #[error("choice vector has {found} bits, enumeration has {expected} occurrences")]
    LengthMismatch { expected: usize, found: usize },
    #[error("enumeration does not match the cedent")]
    Inconsistent,
}

/// Per-formula choices: path of an enumerated disjunction to the chosen side.
pub(crate) type PathChoices = HashMap<Vec<Step>, bool>;

pub(crate) fn choices_for(
    e: &SpdEnumeration,
    k: &ChoiceVector,
) -> Result<Vec<PathChoices>, StrengthenError> {
    if k.len() != e.count() {
        return Err(StrengthenError::LengthMismatch { expected: e.count(), found: k.len() });
    }
    let mut per: Vec<PathChoices> = vec![HashMap::new(); e.basis.len()];
    for (occ, bit) in e.occurrences.iter().zip(&k.bits) {
        let f = e.basis.get(occ.formula_index).ok_or(StrengthenError::Inconsistent)?;
        if f.subformula(&occ.steps).and_then(Formula::as_or).is_none() {
            return Err(StrengthenError::Inconsistent);
        }
        per[occ.formula_index].insert(occ.steps.clone(), *bit);
    }
    Ok(per)
}

/// `f(k)`: replaces chosen disjunctions top-down; choices under a dropped disjunct are vacuous.
pub(crate) fn strengthen_formula(f: &Formula, choices: &PathChoices) -> Formula {
    fn go(f: &Formula, path: &mut Vec<Step>, choices: &PathChoices) -> Formula {
        if choices.is_empty() {
            return f.clone();
        }
        match f.kind() {
            Kind::Or(a, b) if choices.contains_key(path.as_slice()) => {
                let right = choices[path.as_slice()];
                path.push(if right { Step::Right } else { Step::Left });
                let out = go(if right { b } else { a }, path, choices);
                path.pop();
                out
            }
            Kind::And(a, b) | Kind::Or(a, b) => {
                path.push(Step::Left);
                let na = go(a, path, choices);
                path.pop();
                path.push(Step::Right);
                let nb = go(b, path, choices);
                path.pop();
                if na.ptr_eq(a) && nb.ptr_eq(b) {
                    f.clone()
                } else {
                    f.with_children(na, nb)
                }
            }
            Kind::Imp(a, b) => {
                path.push(Step::Right);
                let nb = go(b, path, choices);
                path.pop();
                if nb.ptr_eq(b) {
                    f.clone()
                } else {
                    Formula::imp(a.clone(), nb)
                }
            }
            Kind::Atom(_) | Kind::Bottom => f.clone(),
        }
    }
    go(f, &mut Vec::new(), choices)
}

/// `Γ(k)`.
pub fn strengthen(g: &Cedent, e: &SpdEnumeration, k: &ChoiceVector) -> Result<Cedent, StrengthenError> {
    let basis = g.canonical();
    if basis != e.basis {
        return Err(StrengthenError::Inconsistent);
    }
    let per = choices_for(e, k)?;
    Ok(basis.iter().zip(&per).map(|(f, c)| strengthen_formula(f, c)).collect())
}

/// The analysis set `C(f)`.
pub fn analysis_set(f: &Formula) -> BTreeSet<Sequent> {
    let mut out = BTreeSet::new();
    let mut cur = vec![f.clone()];
    while let Some(g) = cur.pop() {
        match g.kind() {
            Kind::Imp(a, b) => {
                out.insert(Sequent::new([a.clone(), g.clone()].into_iter().collect(), b.clone()));
                cur.push(b.clone());
            }
            Kind::And(a, b) => {
                let ctx = Cedent::singleton(g.clone());
                out.insert(Sequent::new(ctx.clone(), a.clone()));
                out.insert(Sequent::new(ctx, b.clone()));
                cur.push(a.clone());
                cur.push(b.clone());
            }
            Kind::Atom(_) | Kind::Bottom | Kind::Or(..) => {}
        }
    }
    out
}

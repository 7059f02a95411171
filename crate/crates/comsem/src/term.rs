//! Terms (binary parse trees over an atom alphabet), partial non-associative
//! concatenation, language fragments, and prefix-form encoding of operator
//! expressions.
//!
//! A [`Term`] is either a single atom or the composition `(s.t)` of two
//! terms. Composition is never flattened: `((a.b).c)` and `(a.(b.c))` are
//! distinct trees. A [`LanguageFragment`] is a finite set of terms closed
//! downward under the listed compositions, with an explicit set of allowed
//! pairs making `.` a partial operation.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use indexmap::IndexSet;
use thiserror::Error;

/// The separator between the two children of a composition in surface syntax.
pub const SEPARATOR: char = '.';
/// The reserved end-of-expression marker.
pub const MARKER: char = '$';

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("invalid atom {name:?}: {reason}")]
    InvalidAtom { name: String, reason: String },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown operator {0:?}")]
    UnknownOperator(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FragmentError {
    #[error("atom {0} has no leaf term in the fragment")]
    AtomNotInTerms(Atom),
    #[error("allowed pair ({left}, {right}) refers to a term outside the fragment")]
    PairOutsideFragment { left: Term, right: Term },
    #[error("composition ({left}.{right}) is allowed but its result is not listed as a term")]
    CompositionResultMissing { left: Term, right: Term },
    #[error("term {0} does not decompose into an allowed pair")]
    TermNotClosed(Term),
    #[error("leaf {0} uses an atom outside the fragment alphabet")]
    UnknownAtom(Term),
    #[error("undefined composition: ({left}.{right}) is not an allowed pair")]
    UndefinedComposition { left: Term, right: Term },
}

/// An element of the alphabet.
///
/// Names are non-empty and exclude the separator, the marker, brackets and
/// whitespace, so every term has an unambiguous bracketed rendering.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(String);

impl Atom {
    pub fn new(name: impl Into<String>) -> Result<Self, TermError> {
        let name = name.into();
        if name.is_empty() {
            return Err(TermError::InvalidAtom {
                name,
                reason: "empty name".into(),
            });
        }
        for ch in name.chars() {
            let reason = if ch == SEPARATOR {
                "contains the separator '.'"
            } else if ch == MARKER {
                "contains the reserved marker '$'"
            } else if ch == '(' || ch == ')' {
                "contains a bracket"
            } else if ch.is_whitespace() || ch.is_control() {
                "contains whitespace or a control character"
            } else {
                continue;
            };
            return Err(TermError::InvalidAtom {
                name,
                reason: reason.into(),
            });
        }
        Ok(Atom(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Atom {
    type Err = TermError;

    fn from_str(s: &str) -> Result<Self, TermError> {
        Atom::new(s)
    }
}

impl serde::Serialize for Atom {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> serde::Deserialize<'de> for Atom {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A non-associatively bracketed tree over atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Leaf(Atom),
    Node(Arc<Term>, Arc<Term>),
}

impl Term {
    pub fn leaf(atom: Atom) -> Self {
        Term::Leaf(atom)
    }

    /// Raw tree construction. Fragment-aware composition lives in
    /// [`LanguageFragment::concat`].
    pub fn node(left: Term, right: Term) -> Self {
        Term::Node(Arc::new(left), Arc::new(right))
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Term::Leaf(_))
    }

    pub fn children(&self) -> Option<(&Term, &Term)> {
        match self {
            Term::Leaf(_) => None,
            Term::Node(l, r) => Some((l, r)),
        }
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        fn walk<'t>(t: &'t Term, out: &mut Vec<&'t Atom>) {
            match t {
                Term::Leaf(a) => out.push(a),
                Term::Node(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    /// Render as a fully bracketed dotted string, e.g. `((a.b).c)`.
    /// Round-trips through [`Term::from_str`].
    pub fn render(&self) -> String {
        let mut s = String::new();
        fn walk(t: &Term, s: &mut String) {
            match t {
                Term::Leaf(a) => s.push_str(a.name()),
                Term::Node(l, r) => {
                    s.push('(');
                    walk(l, s);
                    s.push(SEPARATOR);
                    walk(r, s);
                    s.push(')');
                }
            }
        }
        walk(self, &mut s);
        s
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for Term {
    type Err = TermError;

    fn from_str(s: &str) -> Result<Self, TermError> {
        parse_term(s)
    }
}

// Terms serialize as their surface syntax: the rendering is injective and
// round-trips, and it keeps files human-readable.
impl serde::Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.render())
    }
}

impl<'de> serde::Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parse a fully bracketed dotted string, e.g. `(high.seas)` or `((a.b).c)`.
pub fn parse_term(spec: &str) -> Result<Term, TermError> {
    let bytes = spec.as_bytes();
    let (term, rest) = parse_at(bytes, 0)?;
    if rest != bytes.len() {
        return Err(TermError::Parse {
            pos: rest,
            msg: "trailing input after a complete term".into(),
        });
    }
    Ok(term)
}

fn parse_at(bytes: &[u8], pos: usize) -> Result<(Term, usize), TermError> {
    match bytes.get(pos) {
        None => Err(TermError::Parse {
            pos,
            msg: "expected a term, found end of input".into(),
        }),
        Some(b'(') => {
            let (left, after_left) = parse_at(bytes, pos + 1)?;
            if bytes.get(after_left) != Some(&(SEPARATOR as u8)) {
                return Err(TermError::Parse {
                    pos: after_left,
                    msg: format!("expected {SEPARATOR:?} between the parts of a composition"),
                });
            }
            let (right, after_right) = parse_at(bytes, after_left + 1)?;
            if bytes.get(after_right) != Some(&b')') {
                return Err(TermError::Parse {
                    pos: after_right,
                    msg: "expected ')' closing a composition".into(),
                });
            }
            Ok((Term::node(left, right), after_right + 1))
        }
        Some(_) => parse_atom_at(bytes, pos),
    }
}

fn parse_atom_at(bytes: &[u8], pos: usize) -> Result<(Term, usize), TermError> {
    let s = std::str::from_utf8(bytes).expect("input was a str");
    let mut end = pos;
    for (i, ch) in s[pos..].char_indices() {
        if matches!(ch, '(' | ')') || ch == SEPARATOR {
            break;
        }
        if ch == MARKER || ch.is_whitespace() || ch.is_control() {
            return Err(TermError::Parse {
                pos: pos + i,
                msg: format!("reserved character {ch:?} in atom"),
            });
        }
        end = pos + i + ch.len_utf8();
    }
    if end == pos {
        return Err(TermError::Parse {
            pos,
            msg: "empty atom".into(),
        });
    }
    let atom = Atom::new(&s[pos..end]).map_err(|e| TermError::Parse {
        pos,
        msg: e.to_string(),
    })?;
    Ok((Term::Leaf(atom), end))
}

/// A term extended with the end-of-expression marker: `body.$`.
///
/// The marker appears exactly once, in final position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DollarTerm {
    body: Term,
}

impl DollarTerm {
    pub fn new(body: Term) -> Self {
        DollarTerm { body }
    }

    pub fn body(&self) -> &Term {
        &self.body
    }
}

impl fmt::Display for DollarTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}{}{})", self.body, SEPARATOR, MARKER)
    }
}

/// A finite language: an alphabet, a set of terms containing every atom's
/// leaf, and the set of pairs on which concatenation is defined.
///
/// Term order is insertion order and is the enumeration `t(0), t(1), ...`
/// used by tables and streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageFragment {
    atoms: IndexSet<Atom>,
    terms: IndexSet<Term>,
    allowed_pairs: IndexSet<(Term, Term)>,
}

impl LanguageFragment {
    /// Build from explicit parts, validating every fragment invariant.
    pub fn from_parts(
        atoms: impl IntoIterator<Item = Atom>,
        terms: impl IntoIterator<Item = Term>,
        allowed_pairs: impl IntoIterator<Item = (Term, Term)>,
    ) -> Result<Self, FragmentError> {
        let atoms: IndexSet<Atom> = atoms.into_iter().collect();
        let terms: IndexSet<Term> = terms.into_iter().collect();
        let allowed_pairs: IndexSet<(Term, Term)> = allowed_pairs.into_iter().collect();

        for atom in &atoms {
            if !terms.contains(&Term::Leaf(atom.clone())) {
                return Err(FragmentError::AtomNotInTerms(atom.clone()));
            }
        }
        for (left, right) in &allowed_pairs {
            if !terms.contains(left) || !terms.contains(right) {
                return Err(FragmentError::PairOutsideFragment {
                    left: left.clone(),
                    right: right.clone(),
                });
            }
            if !terms.contains(&Term::node(left.clone(), right.clone())) {
                return Err(FragmentError::CompositionResultMissing {
                    left: left.clone(),
                    right: right.clone(),
                });
            }
        }
        for term in &terms {
            match term {
                Term::Leaf(a) => {
                    if !atoms.contains(a) {
                        return Err(FragmentError::UnknownAtom(term.clone()));
                    }
                }
                Term::Node(l, r) => {
                    if !allowed_pairs.contains(&((**l).clone(), (**r).clone())) {
                        return Err(FragmentError::TermNotClosed(term.clone()));
                    }
                }
            }
        }
        Ok(LanguageFragment {
            atoms,
            terms,
            allowed_pairs,
        })
    }

    pub fn builder() -> FragmentBuilder {
        FragmentBuilder::default()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter()
    }

    /// Terms in enumeration order.
    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.terms.iter()
    }

    pub fn allowed_pairs(&self) -> impl Iterator<Item = &(Term, Term)> {
        self.allowed_pairs.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn pair_count(&self) -> usize {
        self.allowed_pairs.len()
    }

    pub fn contains(&self, term: &Term) -> bool {
        self.terms.contains(term)
    }

    /// Index of a term in the enumeration.
    pub fn index_of(&self, term: &Term) -> Option<usize> {
        self.terms.get_index_of(term)
    }

    pub fn term_at(&self, index: usize) -> Option<&Term> {
        self.terms.get_index(index)
    }

    pub fn pair_allowed(&self, left: &Term, right: &Term) -> bool {
        // Membership check without cloning into a fresh tuple.
        self.allowed_pairs
            .contains(&(left.clone(), right.clone()))
    }

    /// The partial concatenation: `node(s, t)` when `(s, t)` is an allowed
    /// pair, an undefined-composition error otherwise.
    pub fn concat(&self, left: &Term, right: &Term) -> Result<Term, FragmentError> {
        if !self.pair_allowed(left, right) {
            return Err(FragmentError::UndefinedComposition {
                left: left.clone(),
                right: right.clone(),
            });
        }
        let composed = Term::node(left.clone(), right.clone());
        // By the closure invariant the composed term is already listed;
        // return the stored copy so subtrees stay shared.
        Ok(self
            .terms
            .get(&composed)
            .cloned()
            .expect("validated fragment lists every allowed composition"))
    }
}

/// Incremental construction of a fragment that is closed by construction:
/// atoms enter first, and each allowed pair appends its composition.
#[derive(Debug, Default, Clone)]
pub struct FragmentBuilder {
    atoms: IndexSet<Atom>,
    terms: IndexSet<Term>,
    allowed_pairs: IndexSet<(Term, Term)>,
}

impl FragmentBuilder {
    pub fn atom(mut self, atom: Atom) -> Self {
        self.terms.insert(Term::Leaf(atom.clone()));
        self.atoms.insert(atom);
        self
    }

    pub fn atoms(mut self, atoms: impl IntoIterator<Item = Atom>) -> Self {
        for a in atoms {
            self = self.atom(a);
        }
        self
    }

    /// Allow the pair `(left, right)` and add its composition to the terms.
    /// Both sides must already be present.
    pub fn pair(mut self, left: &Term, right: &Term) -> Result<Self, FragmentError> {
        if !self.terms.contains(left) || !self.terms.contains(right) {
            return Err(FragmentError::PairOutsideFragment {
                left: left.clone(),
                right: right.clone(),
            });
        }
        let composed = Term::node(left.clone(), right.clone());
        self.allowed_pairs.insert((left.clone(), right.clone()));
        self.terms.insert(composed);
        Ok(self)
    }

    pub fn build(self) -> LanguageFragment {
        LanguageFragment {
            atoms: self.atoms,
            terms: self.terms,
            allowed_pairs: self.allowed_pairs,
        }
    }
}

/// An expression over atoms and named binary operators, before prefix
/// encoding. Operators are themselves atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpExpr {
    Var(Atom),
    Binary(Atom, Box<OpExpr>, Box<OpExpr>),
}

impl OpExpr {
    pub fn var(name: &str) -> Result<Self, TermError> {
        Ok(OpExpr::Var(Atom::new(name)?))
    }

    pub fn binary(op: &str, left: OpExpr, right: OpExpr) -> Result<Self, TermError> {
        Ok(OpExpr::Binary(Atom::new(op)?, Box::new(left), Box::new(right)))
    }
}

/// Encode an operator expression as a prefix term.
///
/// The application of `op` to `x` then `y` becomes `op.(x.y)`, that is
/// `node(leaf(op), node(x, y))`, so `a+(b&c)` renders as the right-nested
/// chain `(+.(a.(&.(b.c))))`. The operand pair is kept as a subterm, which
/// makes each operand's encoding a subterm of the whole.
pub fn to_prefix_form(expr: &OpExpr, operators: &BTreeSet<Atom>) -> Result<Term, TermError> {
    match expr {
        OpExpr::Var(a) => {
            if operators.contains(a) {
                return Err(TermError::UnknownOperator(format!(
                    "operator {a} used as a variable"
                )));
            }
            Ok(Term::Leaf(a.clone()))
        }
        OpExpr::Binary(op, left, right) => {
            if !operators.contains(op) {
                return Err(TermError::UnknownOperator(op.name().to_string()));
            }
            let left = to_prefix_form(left, operators)?;
            let right = to_prefix_form(right, operators)?;
            Ok(Term::node(Term::Leaf(op.clone()), Term::node(left, right)))
        }
    }
}

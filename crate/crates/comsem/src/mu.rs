//! The compositional encoding of an arbitrary meaning assignment.
//!
//! Given a fragment and any total assignment `m`, [`encode`] produces a
//! session whose values `mu(s)` behave as the functions
//!
//! ```text
//! mu(s) = { <s, m(s)> } ∪ { <mu(t), mu(s.t)> : (s, t) an allowed pair }
//! ```
//!
//! so that `mu(s.t) = mu(s)(mu(t))` and `mu(s)(s) = m(s)`. The values are
//! represented intensionally as a tag plus an application rule: the circular
//! set object is never built, but every equation observable at finite depth
//! is checked by [`verify_homomorphism`] and materialized by
//! [`materialize_table`]. The marker variant instead decodes uniformly at an
//! end-of-expression marker: `mu(s)($) = m(s)`.
//!
//! Sessions are immutable after construction and application is pure, so
//! values can be shared across threads freely.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::meaning::{MeaningAssignment, MeaningSource, MeaningValue};
use crate::report::{VerificationReport, Violation};
use crate::term::{DollarTerm, LanguageFragment, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingVariant {
    /// Decode at the expression itself: `mu(s)(s) = m(s)`.
    Plain,
    /// Decode at the end-of-expression marker: `mu(s)($) = m(s)`.
    Dollar,
}

impl fmt::Display for EncodingVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncodingVariant::Plain => f.write_str("plain"),
            EncodingVariant::Dollar => f.write_str("dollar"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("meaning assignment is missing {} term(s): {}", .0.len(), render_terms(.0))]
    MissingMeanings(Vec<Term>),
}

fn render_terms(terms: &[Term]) -> String {
    terms
        .iter()
        .map(|t| t.render())
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ApplyError {
    #[error("undefined application: {function} has no value at {argument}")]
    Undefined { function: String, argument: String },
    #[error("values from different encoding sessions cannot interact")]
    SessionMismatch,
    #[error("the marker is not part of the plain encoding")]
    MarkerInPlain,
    #[error("the marker value is only usable as an argument, not as a function")]
    MarkerNotApplicable,
    #[error("term {0} is outside the encoded fragment")]
    OutsideFragment(Term),
}

static NEXT_SESSION_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug)]
struct SessionInner {
    id: u64,
    label: String,
    fragment: LanguageFragment,
    assignment: MeaningAssignment,
    variant: EncodingVariant,
}

/// One encoded system `(fragment, m, variant)`. Cheap to clone.
#[derive(Debug, Clone)]
pub struct EncodingSession {
    inner: Arc<SessionInner>,
}

/// Construct the encoding. Fails if `m` misses any fragment term; nothing
/// about the relation between `m(s.t)` and `(m(s), m(t))` is ever inspected.
pub fn encode(
    fragment: LanguageFragment,
    assignment: MeaningAssignment,
    variant: EncodingVariant,
) -> Result<EncodingSession, EncodeError> {
    encode_labeled(fragment, assignment, variant, "fragment")
}

/// [`encode`] with a label carried into reports.
pub fn encode_labeled(
    fragment: LanguageFragment,
    assignment: MeaningAssignment,
    variant: EncodingVariant,
    label: impl Into<String>,
) -> Result<EncodingSession, EncodeError> {
    let missing: Vec<Term> = fragment
        .terms()
        .filter(|t| assignment.get(t).is_none())
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(EncodeError::MissingMeanings(missing));
    }
    Ok(EncodingSession {
        inner: Arc::new(SessionInner {
            id: NEXT_SESSION_ID.fetch_add(1, Ordering::Relaxed),
            label: label.into(),
            fragment,
            assignment,
            variant,
        }),
    })
}

impl EncodingSession {
    pub fn fragment(&self) -> &LanguageFragment {
        &self.inner.fragment
    }

    pub fn variant(&self) -> EncodingVariant {
        self.inner.variant
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    pub fn meaning(&self, term: &Term) -> Option<&MeaningValue> {
        self.inner.assignment.get(term)
    }

    /// The encoded value `mu(s)` for a fragment term.
    pub fn mu(&self, term: &Term) -> Result<MuValue, ApplyError> {
        if !self.inner.fragment.contains(term) {
            return Err(ApplyError::OutsideFragment(term.clone()));
        }
        Ok(MuValue {
            session: self.clone(),
            tag: MuTag::Term(term.clone()),
        })
    }

    /// The marker value `mu($) = $`. Only the marker variant has it.
    pub fn mu_marker(&self) -> Result<MuValue, ApplyError> {
        match self.inner.variant {
            EncodingVariant::Plain => Err(ApplyError::MarkerInPlain),
            EncodingVariant::Dollar => Ok(MuValue {
                session: self.clone(),
                tag: MuTag::Marker,
            }),
        }
    }

    /// `mu(s.$) = m(s)`: the marker-extended part of the encoding's graph.
    pub fn dollar_meaning(&self, term: &DollarTerm) -> Result<MeaningValue, ApplyError> {
        match self.inner.variant {
            EncodingVariant::Plain => Err(ApplyError::MarkerInPlain),
            EncodingVariant::Dollar => {
                if !self.inner.fragment.contains(term.body()) {
                    return Err(ApplyError::OutsideFragment(term.body().clone()));
                }
                Ok(self
                    .inner
                    .assignment
                    .get(term.body())
                    .expect("assignment total on fragment")
                    .clone())
            }
        }
    }

    fn same_session(&self, other: &EncodingSession) -> bool {
        self.inner.id == other.inner.id
    }
}

/// The tag identifying an encoded value within its session.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MuTag {
    Term(Term),
    Marker,
}

/// An encoded value `mu(s)` (or the marker `mu($)`): a tag plus the
/// application rule of its session. Values from different sessions never
/// compare equal, even with equal tags.
#[derive(Debug, Clone)]
pub struct MuValue {
    session: EncodingSession,
    tag: MuTag,
}

impl PartialEq for MuValue {
    fn eq(&self, other: &Self) -> bool {
        self.session.same_session(&other.session) && self.tag == other.tag
    }
}

impl Eq for MuValue {}

impl fmt::Display for MuValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.tag {
            MuTag::Term(t) => write!(f, "mu({t})"),
            MuTag::Marker => write!(f, "mu($)"),
        }
    }
}

/// An argument position for application: a raw term, an encoded value, or
/// the bare marker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApplyArg {
    Raw(Term),
    Mu(MuValue),
    Marker,
}

impl fmt::Display for ApplyArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApplyArg::Raw(t) => write!(f, "{t}"),
            ApplyArg::Mu(v) => write!(f, "{v}"),
            ApplyArg::Marker => f.write_str("$"),
        }
    }
}

/// The result of an application: either a decoded meaning or another
/// encoded value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Applied {
    Meaning(MeaningValue),
    Mu(MuValue),
}

impl fmt::Display for Applied {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Applied::Meaning(m) => write!(f, "{m}"),
            Applied::Mu(v) => write!(f, "{v}"),
        }
    }
}

impl MuValue {
    pub fn tag(&self) -> &MuTag {
        &self.tag
    }

    pub fn session(&self) -> &EncodingSession {
        &self.session
    }

    /// Look up the pair of `mu(tag)` at `arg`.
    ///
    /// Plain: the raw tag term decodes to its meaning, an encoded value
    /// composes when the pair is allowed. Marker: the marker (bare or as
    /// the value `mu($) = $`) decodes to the meaning, composition as above.
    /// Everything else is undefined, exactly as the partial table is.
    pub fn apply(&self, arg: &ApplyArg) -> Result<Applied, ApplyError> {
        let inner = &self.session.inner;
        let subject = match &self.tag {
            MuTag::Marker => return Err(ApplyError::MarkerNotApplicable),
            MuTag::Term(t) => t,
        };
        let meaning = || -> MeaningValue {
            inner
                .assignment
                .get(subject)
                .expect("assignment total on fragment")
                .clone()
        };
        match (inner.variant, arg) {
            (EncodingVariant::Plain, ApplyArg::Marker) => Err(ApplyError::MarkerInPlain),
            (EncodingVariant::Plain, ApplyArg::Raw(t)) => {
                if t == subject {
                    Ok(Applied::Meaning(meaning()))
                } else {
                    Err(self.undefined(arg))
                }
            }
            (EncodingVariant::Dollar, ApplyArg::Marker) => Ok(Applied::Meaning(meaning())),
            (EncodingVariant::Dollar, ApplyArg::Raw(_)) => Err(self.undefined(arg)),
            (_, ApplyArg::Mu(g)) => {
                if !self.session.same_session(&g.session) {
                    return Err(ApplyError::SessionMismatch);
                }
                match &g.tag {
                    MuTag::Marker => Ok(Applied::Meaning(meaning())),
                    MuTag::Term(t) => {
                        if inner.fragment.pair_allowed(subject, t) {
                            let composed = inner
                                .fragment
                                .concat(subject, t)
                                .expect("pair just checked");
                            Ok(Applied::Mu(MuValue {
                                session: self.session.clone(),
                                tag: MuTag::Term(composed),
                            }))
                        } else {
                            Err(self.undefined(arg))
                        }
                    }
                }
            }
        }
    }

    fn undefined(&self, arg: &ApplyArg) -> ApplyError {
        ApplyError::Undefined {
            function: self.to_string(),
            argument: arg.to_string(),
        }
    }
}

// ---------------------------------------------------------------------------
// Exhaustive verification of the defining equations
// ---------------------------------------------------------------------------

enum Check {
    /// Plain decoding: `mu(s)(s) = m(s)`.
    Base(Term),
    /// Homomorphism: `mu(s)(mu(t)) = mu(s.t)`.
    Hom(Term, Term),
    /// Marker decoding: `mu(s)($) = m(s)`.
    DollarApply(Term),
    /// Marker bookkeeping: `mu(s)(mu($)) = m(s)` via `mu($) = $`.
    DollarMarker(Term),
    /// Graph extension: `mu(s.$) = m(s)`.
    DollarGraph(Term),
}

fn checks_for(session: &EncodingSession) -> Vec<Check> {
    let frag = session.fragment();
    let mut checks = Vec::new();
    for s in frag.terms() {
        match session.variant() {
            EncodingVariant::Plain => checks.push(Check::Base(s.clone())),
            EncodingVariant::Dollar => {
                checks.push(Check::DollarApply(s.clone()));
                checks.push(Check::DollarMarker(s.clone()));
                checks.push(Check::DollarGraph(s.clone()));
            }
        }
    }
    for (s, t) in frag.allowed_pairs() {
        checks.push(Check::Hom(s.clone(), t.clone()));
    }
    checks
}

fn run_check(session: &EncodingSession, check: &Check) -> Option<Violation> {
    let violation = |equation: String, left: String, right: String| Violation {
        equation,
        left,
        right,
    };
    let expect_meaning = |equation: String, got: Result<Applied, ApplyError>, s: &Term| {
        let want = session.meaning(s).expect("assignment total").clone();
        match got {
            Ok(Applied::Meaning(m)) if m == want => None,
            Ok(other) => Some(violation(equation, other.to_string(), want.to_string())),
            Err(e) => Some(violation(equation, format!("error: {e}"), want.to_string())),
        }
    };
    match check {
        Check::Base(s) => {
            let f = session.mu(s).expect("term in fragment");
            expect_meaning(
                format!("mu({s})({s}) = m({s})"),
                f.apply(&ApplyArg::Raw(s.clone())),
                s,
            )
        }
        Check::DollarApply(s) => {
            let f = session.mu(s).expect("term in fragment");
            expect_meaning(format!("mu({s})($) = m({s})"), f.apply(&ApplyArg::Marker), s)
        }
        Check::DollarMarker(s) => {
            let f = session.mu(s).expect("term in fragment");
            let marker = session.mu_marker().expect("dollar session");
            expect_meaning(
                format!("mu({s})(mu($)) = m({s})"),
                f.apply(&ApplyArg::Mu(marker)),
                s,
            )
        }
        Check::DollarGraph(s) => {
            let equation = format!("mu(({s}.$)) = m({s})");
            let want = session.meaning(s).expect("assignment total").clone();
            match session.dollar_meaning(&DollarTerm::new(s.clone())) {
                Ok(m) if m == want => None,
                Ok(other) => Some(violation(equation, other.to_string(), want.to_string())),
                Err(e) => Some(violation(equation, format!("error: {e}"), want.to_string())),
            }
        }
        Check::Hom(s, t) => {
            let equation = format!("mu(({s}.{t})) = mu({s})(mu({t}))");
            let f = session.mu(s).expect("term in fragment");
            let g = session.mu(t).expect("term in fragment");
            let composed = session
                .fragment()
                .concat(s, t)
                .expect("allowed pair listed");
            let want = session.mu(&composed).expect("composition in fragment");
            match f.apply(&ApplyArg::Mu(g)) {
                Ok(Applied::Mu(v)) if v == want => None,
                Ok(other) => Some(violation(equation, other.to_string(), want.to_string())),
                Err(e) => Some(violation(equation, format!("error: {e}"), want.to_string())),
            }
        }
    }
}

/// Check both defining equations over the whole fragment. Violations are
/// report content, not errors; the construction guarantees there are none.
pub fn verify_homomorphism(session: &EncodingSession) -> VerificationReport {
    let checks = checks_for(session);
    #[cfg(feature = "parallel")]
    let violations: Vec<Violation> = checks
        .par_iter()
        .filter_map(|c| run_check(session, c))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let violations: Vec<Violation> = checks
        .iter()
        .filter_map(|c| run_check(session, c))
        .collect();
    report_from(session, violations)
}

/// Sequential [`verify_homomorphism`], kept callable for comparison.
pub fn verify_homomorphism_seq(session: &EncodingSession) -> VerificationReport {
    let violations: Vec<Violation> = checks_for(session)
        .iter()
        .filter_map(|c| run_check(session, c))
        .collect();
    report_from(session, violations)
}

fn report_from(session: &EncodingSession, violations: Vec<Violation>) -> VerificationReport {
    VerificationReport::new(
        session.label().to_string(),
        session.variant(),
        session.fragment().term_count(),
        session.fragment().pair_count(),
        violations,
    )
}

// ---------------------------------------------------------------------------
// The explicit table
// ---------------------------------------------------------------------------

/// The key of a row's first pair: the subject term itself (plain) or the
/// marker (dollar).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseKey {
    Term(Term),
    Marker,
}

impl fmt::Display for BaseKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseKey::Term(t) => write!(f, "{t}"),
            BaseKey::Marker => f.write_str("$"),
        }
    }
}

/// One composition pair `<mu(arg), mu(result)>` of a row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuPair {
    pub arg: Term,
    pub result: Term,
}

/// The equation for one `mu(t(a))`: the base pair first, then one pair per
/// allowed right argument in enumeration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuRow {
    pub subject: Term,
    pub base_key: BaseKey,
    pub base_value: MeaningValue,
    pub entries: Vec<MuPair>,
}

/// The whole system of equations, rows in enumeration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuTable {
    pub variant: EncodingVariant,
    pub rows: Vec<MuRow>,
}

/// Write out the full table of the encoding: one row per term, each the
/// finite graph of `mu(t(a))`.
pub fn materialize_table(session: &EncodingSession) -> MuTable {
    let frag = session.fragment();
    let rows = frag
        .terms()
        .map(|subject| {
            let base_key = match session.variant() {
                EncodingVariant::Plain => BaseKey::Term(subject.clone()),
                EncodingVariant::Dollar => BaseKey::Marker,
            };
            let base_value = session.meaning(subject).expect("assignment total").clone();
            let entries = frag
                .terms()
                .filter(|arg| frag.pair_allowed(subject, arg))
                .map(|arg| MuPair {
                    arg: arg.clone(),
                    result: frag.concat(subject, arg).expect("pair allowed"),
                })
                .collect();
            MuRow {
                subject: subject.clone(),
                base_key,
                base_value,
                entries,
            }
        })
        .collect();
    MuTable {
        variant: session.variant(),
        rows,
    }
}

// ---------------------------------------------------------------------------
// Effective enumeration
// ---------------------------------------------------------------------------

/// An enumerable, possibly unbounded, composition-closed language:
/// `term_at` plays the printer of terms, `composable` the partiality test.
pub trait TermStream {
    fn term_at(&self, index: usize) -> Option<Term>;
    fn composable(&self, left: &Term, right: &Term) -> bool;

    /// An index past which no further composable right argument for `left`
    /// can appear, when the stream knows one. Lets entry lookup reject an
    /// out-of-range pair index instead of scanning an infinite stream.
    fn scan_bound(&self, _left: &Term) -> Option<usize> {
        None
    }
}

impl TermStream for LanguageFragment {
    fn term_at(&self, index: usize) -> Option<Term> {
        LanguageFragment::term_at(self, index).cloned()
    }

    fn composable(&self, left: &Term, right: &Term) -> bool {
        self.pair_allowed(left, right)
    }

    fn scan_bound(&self, _left: &Term) -> Option<usize> {
        Some(self.term_count())
    }
}

/// The full closure of an alphabet under composition, enumerated by leaf
/// count and then by construction order. Every pair is composable.
#[derive(Debug, Clone)]
pub struct ClosureStream {
    atoms: Vec<crate::term::Atom>,
}

impl ClosureStream {
    pub fn new(atoms: impl IntoIterator<Item = crate::term::Atom>) -> Self {
        ClosureStream {
            atoms: atoms.into_iter().collect(),
        }
    }

    fn terms_with_leaves(&self, leaves: usize) -> Vec<Term> {
        if leaves == 1 {
            return self.atoms.iter().cloned().map(Term::Leaf).collect();
        }
        let mut out = Vec::new();
        for split in 1..leaves {
            for l in self.terms_with_leaves(split) {
                for r in self.terms_with_leaves(leaves - split) {
                    out.push(Term::node(l.clone(), r));
                }
            }
        }
        out
    }
}

impl TermStream for ClosureStream {
    fn term_at(&self, index: usize) -> Option<Term> {
        if self.atoms.is_empty() {
            return None;
        }
        let mut remaining = index;
        let mut leaves = 1;
        loop {
            let block = self.terms_with_leaves(leaves);
            if remaining < block.len() {
                return Some(block[remaining].clone());
            }
            remaining -= block.len();
            leaves += 1;
        }
    }

    fn composable(&self, _left: &Term, _right: &Term) -> bool {
        true
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("{what} index {index} is out of range")]
    OutOfRange { what: &'static str, index: usize },
    #[error("no meaning available for {0}")]
    MeaningUnavailable(Term),
}

/// One entry of the explicit table, produced lazily.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableEntry {
    Base {
        subject: Term,
        key: BaseKey,
        meaning: MeaningValue,
    },
    Composition {
        subject: Term,
        arg: Term,
        result: Term,
    },
}

/// The `pair`-th entry of the `row`-th equation, computed from the stream
/// and the on-demand meanings alone. Pair 0 is the base pair; pair `n` is
/// the `n`-th composition, scanning right arguments in stream order. No
/// other row is forced, and composition entries evaluate no meanings.
pub fn enumerate_table(
    stream: &dyn TermStream,
    meanings: &dyn MeaningSource,
    variant: EncodingVariant,
    row: usize,
    pair: usize,
) -> Result<TableEntry, EnumerateError> {
    let subject = stream
        .term_at(row)
        .ok_or(EnumerateError::OutOfRange { what: "row", index: row })?;
    if pair == 0 {
        let meaning = meanings
            .meaning_of(&subject)
            .ok_or_else(|| EnumerateError::MeaningUnavailable(subject.clone()))?;
        let key = match variant {
            EncodingVariant::Plain => BaseKey::Term(subject.clone()),
            EncodingVariant::Dollar => BaseKey::Marker,
        };
        return Ok(TableEntry::Base {
            subject,
            key,
            meaning,
        });
    }
    let bound = stream.scan_bound(&subject);
    let mut seen = 0usize;
    let mut beta = 0usize;
    loop {
        if bound.is_some_and(|b| beta >= b) {
            return Err(EnumerateError::OutOfRange { what: "pair", index: pair });
        }
        let arg = stream
            .term_at(beta)
            .ok_or(EnumerateError::OutOfRange { what: "pair", index: pair })?;
        if stream.composable(&subject, &arg) {
            seen += 1;
            if seen == pair {
                let result = Term::node(subject.clone(), arg.clone());
                return Ok(TableEntry::Composition {
                    subject,
                    arg,
                    result,
                });
            }
        }
        beta += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Atom;

    fn atom(s: &str) -> Atom {
        Atom::new(s).unwrap()
    }

    fn leaf(s: &str) -> Term {
        Term::Leaf(atom(s))
    }

    fn single_atom_session(variant: EncodingVariant) -> EncodingSession {
        let frag = LanguageFragment::builder().atom(atom("a")).build();
        let m = MeaningAssignment::new().with(leaf("a"), MeaningValue::int(7));
        encode(frag, m, variant).unwrap()
    }

    #[test]
    fn base_pair_decodes_plain() {
        let session = single_atom_session(EncodingVariant::Plain);
        let f = session.mu(&leaf("a")).unwrap();
        assert_eq!(
            f.apply(&ApplyArg::Raw(leaf("a"))).unwrap(),
            Applied::Meaning(MeaningValue::int(7))
        );
    }

    #[test]
    fn raw_term_mismatch_is_undefined() {
        let frag = LanguageFragment::builder()
            .atoms([atom("a"), atom("b")])
            .build();
        let m = MeaningAssignment::new()
            .with(leaf("a"), MeaningValue::int(1))
            .with(leaf("b"), MeaningValue::int(2));
        let session = encode(frag, m, EncodingVariant::Plain).unwrap();
        let f = session.mu(&leaf("a")).unwrap();
        assert!(matches!(
            f.apply(&ApplyArg::Raw(leaf("b"))),
            Err(ApplyError::Undefined { .. })
        ));
    }

    #[test]
    fn composition_outside_pairs_is_undefined() {
        let frag = LanguageFragment::builder()
            .atoms([atom("a"), atom("b")])
            .build();
        let m = MeaningAssignment::new()
            .with(leaf("a"), MeaningValue::int(1))
            .with(leaf("b"), MeaningValue::int(2));
        let session = encode(frag, m, EncodingVariant::Plain).unwrap();
        let f = session.mu(&leaf("a")).unwrap();
        let g = session.mu(&leaf("b")).unwrap();
        assert!(matches!(
            f.apply(&ApplyArg::Mu(g)),
            Err(ApplyError::Undefined { .. })
        ));
    }

    #[test]
    fn encode_reports_missing_meanings() {
        let frag = LanguageFragment::builder()
            .atoms([atom("a"), atom("b")])
            .build();
        let m = MeaningAssignment::new().with(leaf("a"), MeaningValue::int(1));
        match encode(frag, m, EncodingVariant::Plain) {
            Err(EncodeError::MissingMeanings(missing)) => {
                assert_eq!(missing, vec![leaf("b")]);
            }
            other => panic!("expected missing meanings, got {other:?}"),
        }
    }

    #[test]
    fn sessions_do_not_mix() {
        let s1 = single_atom_session(EncodingVariant::Plain);
        let s2 = single_atom_session(EncodingVariant::Plain);
        let f1 = s1.mu(&leaf("a")).unwrap();
        let f2 = s2.mu(&leaf("a")).unwrap();
        assert_ne!(f1, f2);
        assert!(matches!(
            f1.apply(&ApplyArg::Mu(f2)),
            Err(ApplyError::SessionMismatch)
        ));
    }

    #[test]
    fn marker_rules() {
        let plain = single_atom_session(EncodingVariant::Plain);
        let f = plain.mu(&leaf("a")).unwrap();
        assert!(matches!(
            f.apply(&ApplyArg::Marker),
            Err(ApplyError::MarkerInPlain)
        ));
        assert!(plain.mu_marker().is_err());

        let dollar = single_atom_session(EncodingVariant::Dollar);
        let f = dollar.mu(&leaf("a")).unwrap();
        assert_eq!(
            f.apply(&ApplyArg::Marker).unwrap(),
            Applied::Meaning(MeaningValue::int(7))
        );
        let marker = dollar.mu_marker().unwrap();
        assert_eq!(
            f.apply(&ApplyArg::Mu(marker.clone())).unwrap(),
            Applied::Meaning(MeaningValue::int(7))
        );
        // The marker is an argument, never a function.
        assert!(matches!(
            marker.apply(&ApplyArg::Marker),
            Err(ApplyError::MarkerNotApplicable)
        ));
        assert_eq!(
            dollar
                .dollar_meaning(&DollarTerm::new(leaf("a")))
                .unwrap(),
            MeaningValue::int(7)
        );
    }

    #[test]
    fn self_pair_table_row() {
        let a = leaf("a");
        let frag = LanguageFragment::builder()
            .atom(atom("a"))
            .pair(&a, &a)
            .unwrap()
            .build();
        let aa = Term::node(a.clone(), a.clone());
        let m = MeaningAssignment::new()
            .with(a.clone(), MeaningValue::int(1))
            .with(aa.clone(), MeaningValue::int(2));
        let session = encode(frag, m, EncodingVariant::Plain).unwrap();
        let table = materialize_table(&session);
        assert_eq!(table.rows[0].subject, a);
        assert_eq!(table.rows[0].base_key, BaseKey::Term(a.clone()));
        assert_eq!(table.rows[0].base_value, MeaningValue::int(1));
        assert_eq!(
            table.rows[0].entries,
            vec![MuPair {
                arg: a.clone(),
                result: aa.clone()
            }]
        );
        // The composed row is a base pair plus nothing: (a.a) composes no further.
        assert_eq!(table.rows[1].subject, aa);
        assert!(table.rows[1].entries.is_empty());
    }

    #[test]
    fn atoms_only_verification_is_vacuous_but_checks_bases() {
        let frag = LanguageFragment::builder()
            .atoms([atom("x"), atom("y")])
            .build();
        let m = MeaningAssignment::new()
            .with(leaf("x"), MeaningValue::Bool(true))
            .with(leaf("y"), MeaningValue::sym("thing", []));
        let session = encode(frag, m, EncodingVariant::Plain).unwrap();
        let report = verify_homomorphism(&session);
        assert!(report.passed());
        assert_eq!(report.terms_checked, 2);
        assert_eq!(report.pairs_checked, 0);
    }

    #[test]
    fn seq_and_default_verification_agree() {
        let session = single_atom_session(EncodingVariant::Dollar);
        let a = verify_homomorphism(&session);
        let b = verify_homomorphism_seq(&session);
        assert_eq!(a, b);
    }

    #[test]
    fn closure_stream_enumerates_all_bracketings() {
        let stream = ClosureStream::new([atom("a"), atom("b")]);
        // 1 leaf: a, b. 2 leaves: 4 nodes. 3 leaves: 2 shapes x 8 = 16.
        assert_eq!(stream.term_at(0), Some(leaf("a")));
        assert_eq!(stream.term_at(1), Some(leaf("b")));
        assert_eq!(
            stream.term_at(2),
            Some(Term::node(leaf("a"), leaf("a")))
        );
        let t21 = stream.term_at(21).unwrap();
        assert_eq!(t21.leaves().len(), 3);
        assert!(stream.composable(&leaf("a"), &t21));
    }

    #[test]
    fn enumerate_out_of_range_on_finite_stream() {
        let frag = LanguageFragment::builder().atom(atom("a")).build();
        let m = MeaningAssignment::new().with(leaf("a"), MeaningValue::int(7));
        let err = enumerate_table(&frag, &m, EncodingVariant::Plain, 0, 5).unwrap_err();
        assert_eq!(err, EnumerateError::OutOfRange { what: "pair", index: 5 });
        let err = enumerate_table(&frag, &m, EncodingVariant::Plain, 3, 0).unwrap_err();
        assert_eq!(err, EnumerateError::OutOfRange { what: "row", index: 3 });
    }
}

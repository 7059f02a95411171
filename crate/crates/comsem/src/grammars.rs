//! The worked example systems: two base-10 numeral grammars with their
//! semantics, the Boolean coordination language in prefix form, and the
//! idiom lexicon.
//!
//! The numeral grammars differ only in recursion direction — `N <- N D`
//! builds a left spine, `N <- D N` a right spine — but only the first
//! admits a degree-1 compositional semantics for the intended base-10
//! values. The right-spine grammar instead fits the "backwards" semantics
//! `value(D N) = 10 * value(N) + value(D)`, which reads the digit string
//! reversed.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use num::bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::meaning::{MeaningAssignment, MeaningSource, MeaningValue};
use crate::mu::TermStream;
use crate::systematicity::SamplePoint;
use crate::term::{Atom, LanguageFragment, OpExpr, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("numeral is empty")]
    EmptyNumeral,
    #[error("invalid digit {ch:?} at position {pos}")]
    NonDigit { ch: char, pos: usize },
    #[error("variable {0} is not bound in the environment")]
    UnboundVariable(Atom),
    #[error("{0} is not a Boolean expression")]
    NotBooleanExpression(String),
    #[error("{0} is not in operator prefix form")]
    NotPrefixForm(String),
    #[error("infix parse error at byte {pos}: {msg}")]
    InfixParse { pos: usize, msg: String },
}

// ---------------------------------------------------------------------------
// Numeral grammars
// ---------------------------------------------------------------------------

/// The two numeral grammars: left-recursive `N <- N D` and right-recursive
/// `N <- D N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumeralGrammar {
    Nd,
    Dn,
}

impl fmt::Display for NumeralGrammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumeralGrammar::Nd => f.write_str("nd"),
            NumeralGrammar::Dn => f.write_str("dn"),
        }
    }
}

/// A parsed numeral: the digit sequence and the unique tree the grammar
/// assigns to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumeralParse {
    grammar: NumeralGrammar,
    digits: Vec<u8>,
    tree: Term,
}

pub fn digit_atom(d: u8) -> Atom {
    debug_assert!(d < 10);
    Atom::new(d.to_string()).expect("digit names are valid atoms")
}

/// Parse a digit string. Both grammars are unambiguous, so this just builds
/// the spine directly; leading zeros are part of both languages.
pub fn parse_numeral(s: &str, grammar: NumeralGrammar) -> Result<NumeralParse, GrammarError> {
    if s.is_empty() {
        return Err(GrammarError::EmptyNumeral);
    }
    let mut digits = Vec::with_capacity(s.len());
    for (pos, ch) in s.char_indices() {
        match ch.to_digit(10) {
            Some(d) => digits.push(d as u8),
            None => return Err(GrammarError::NonDigit { ch, pos }),
        }
    }
    let tree = match grammar {
        NumeralGrammar::Nd => {
            let mut t = Term::Leaf(digit_atom(digits[0]));
            for &d in &digits[1..] {
                t = Term::node(t, Term::Leaf(digit_atom(d)));
            }
            t
        }
        NumeralGrammar::Dn => {
            let mut t = Term::Leaf(digit_atom(digits[digits.len() - 1]));
            for &d in digits[..digits.len() - 1].iter().rev() {
                t = Term::node(Term::Leaf(digit_atom(d)), t);
            }
            t
        }
    };
    Ok(NumeralParse {
        grammar,
        digits,
        tree,
    })
}

impl NumeralParse {
    pub fn grammar(&self) -> NumeralGrammar {
        self.grammar
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn tree(&self) -> &Term {
        &self.tree
    }

    pub fn digit_string(&self) -> String {
        self.digits.iter().map(|d| (b'0' + d) as char).collect()
    }
}

/// Base-10 value of a digt sequence.
pub fn digits_value(digits: &[u8]) -> BigInt {
    let mut acc = BigInt::from(0);
    for &d in digits {
        acc = acc * 10 + d;
    }
    acc
}

/// The intended semantics: the base-10 value of the digit string, the same
/// for both grammars.
pub fn intended_value(p: &NumeralParse) -> BigInt {
    digits_value(&p.digits)
}

/// The alternate right-spine semantics `value(D N) = 10 * value(N) +
/// value(D)`: the value of the reversed digit string.
pub fn backwards_value(p: &NumeralParse) -> BigInt {
    assert_eq!(
        p.grammar,
        NumeralGrammar::Dn,
        "the backwards semantics is defined over the right-spine grammar"
    );
    let reversed: Vec<u8> = p.digits.iter().rev().copied().collect();
    digits_value(&reversed)
}

fn leaf_digit(t: &Term) -> Option<u8> {
    match t {
        Term::Leaf(a) if a.name().len() == 1 => a.name().bytes().next().and_then(|b| {
            if b.is_ascii_digit() {
                Some(b - b'0')
            } else {
                None
            }
        }),
        _ => None,
    }
}

fn tree_digits(t: &Term, grammar: NumeralGrammar) -> Option<Vec<u8>> {
    let mut digits = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::Leaf(_) => {
                let d = leaf_digit(cur)?;
                match grammar {
                    NumeralGrammar::Nd => {
                        digits.push(d);
                        digits.reverse();
                    }
                    NumeralGrammar::Dn => digits.push(d),
                }
                return Some(digits);
            }
            Term::Node(l, r) => match grammar {
                // Left spine: the right child of every node is a digit.
                NumeralGrammar::Nd => {
                    digits.push(leaf_digit(r)?);
                    cur = l;
                }
                // Right spine: the left child of every node is a digit.
                NumeralGrammar::Dn => {
                    digits.push(leaf_digit(l)?);
                    cur = r;
                }
            },
        }
    }
}

/// Whether a term is a well-formed numeral tree of the given grammar.
pub fn is_numeral_tree(t: &Term, grammar: NumeralGrammar) -> bool {
    tree_digits(t, grammar).is_some()
}

/// All digit strings of the given length in lexicographic (= numeric,
/// zero-padded) order. Length 0 yields nothing.
pub fn numeral_strings(len: usize) -> impl Iterator<Item = String> {
    let count = if len == 0 { 0 } else { 10usize.pow(len as u32) };
    (0..count).map(move |i| format!("{i:0len$}"))
}

/// The numeral language as an unbounded enumeration: all digit strings by
/// length, then numerically. Composition follows the grammar's production:
/// `N <- N D` composes any numeral with a digit, `N <- D N` a digit with
/// any numeral.
#[derive(Debug, Clone, Copy)]
pub struct NumeralStream {
    pub grammar: NumeralGrammar,
}

impl TermStream for NumeralStream {
    fn term_at(&self, index: usize) -> Option<Term> {
        let mut remaining = index;
        let mut len = 1usize;
        let mut block = 10usize;
        loop {
            if remaining < block {
                let s = format!("{remaining:0len$}");
                return Some(parse_numeral(&s, self.grammar).expect("digits").tree);
            }
            remaining -= block;
            len += 1;
            block = block.checked_mul(10)?;
        }
    }

    fn composable(&self, left: &Term, right: &Term) -> bool {
        match self.grammar {
            NumeralGrammar::Nd => {
                leaf_digit(right).is_some() && is_numeral_tree(left, NumeralGrammar::Nd)
            }
            NumeralGrammar::Dn => {
                leaf_digit(left).is_some() && is_numeral_tree(right, NumeralGrammar::Dn)
            }
        }
    }

    fn scan_bound(&self, left: &Term) -> Option<usize> {
        match self.grammar {
            // Right arguments are single digits, all within the first block.
            NumeralGrammar::Nd => {
                if is_numeral_tree(left, NumeralGrammar::Nd) {
                    Some(10)
                } else {
                    Some(0)
                }
            }
            // A digit composes with every numeral; anything else with none.
            NumeralGrammar::Dn => {
                if leaf_digit(left).is_some() {
                    None
                } else {
                    Some(0)
                }
            }
        }
    }
}

/// Meaning source assigning every numeral tree its base-10 value. Works for
/// either grammar: the value reads off the leaves alone.
#[derive(Debug, Clone, Copy)]
pub struct IntendedNumeralMeanings;

impl MeaningSource for IntendedNumeralMeanings {
    fn meaning_of(&self, term: &Term) -> Option<MeaningValue> {
        let digits: Option<Vec<u8>> = term.leaves().iter().map(|a| {
            let t = Term::Leaf((*a).clone());
            leaf_digit(&t)
        }).collect();
        Some(MeaningValue::Int(digits_value(&digits?)))
    }
}

/// Meaning source assigning every numeral tree the value of its reversed
/// digit string.
#[derive(Debug, Clone, Copy)]
pub struct BackwardsNumeralMeanings;

impl MeaningSource for BackwardsNumeralMeanings {
    fn meaning_of(&self, term: &Term) -> Option<MeaningValue> {
        let digits: Option<Vec<u8>> = term.leaves().iter().map(|a| {
            let t = Term::Leaf((*a).clone());
            leaf_digit(&t)
        }).collect();
        let mut digits = digits?;
        digits.reverse();
        Some(MeaningValue::Int(digits_value(&digits)))
    }
}

// ---------------------------------------------------------------------------
// Sample generators for the fitting procedures
// ---------------------------------------------------------------------------

fn int_sample(args: &[&BigInt], target: &BigInt, label: String) -> SamplePoint {
    SamplePoint {
        args: args.iter().map(|v| MeaningValue::Int((*v).clone())).collect(),
        target: MeaningValue::Int(target.clone()),
        label: Some(label),
    }
}

/// One sample per numeral of length 2..=max_len (lexicographic within each
/// length), from the top split of the left-spine parse: args are the values
/// of the prefix numeral and the final digit, the target the whole value.
pub fn nd_samples(max_len: usize) -> Vec<SamplePoint> {
    let mut out = Vec::new();
    for len in 2..=max_len {
        for s in numeral_strings(len) {
            let p = parse_numeral(&s, NumeralGrammar::Nd).expect("digits");
            let digits = p.digits();
            let x = digits_value(&digits[..len - 1]);
            let y = BigInt::from(digits[len - 1]);
            out.push(int_sample(&[&x, &y], &digits_value(digits), s));
        }
    }
    out
}

/// Same numerals split per the right-spine parse: args are the leading
/// digit's value and the value of the remaining numeral, the target the
/// whole value. No bivariate polynomial fits these for unbounded length —
/// the target depends on the remainder's digit count.
pub fn dn_samples(max_len: usize) -> Vec<SamplePoint> {
    let mut out = Vec::new();
    for len in 2..=max_len {
        for s in numeral_strings(len) {
            let p = parse_numeral(&s, NumeralGrammar::Dn).expect("digits");
            let digits = p.digits();
            let x = BigInt::from(digits[0]);
            let y = digits_value(&digits[1..]);
            out.push(int_sample(&[&x, &y], &digits_value(digits), s));
        }
    }
    out
}

/// Right-spine splits with the backwards semantics on both arguments and
/// target; these do satisfy `target = 10 * y + x` uniformly.
pub fn backwards_samples(max_len: usize) -> Vec<SamplePoint> {
    let mut out = Vec::new();
    for len in 2..=max_len {
        for s in numeral_strings(len) {
            let digits = parse_numeral(&s, NumeralGrammar::Dn).expect("digits");
            let digits = digits.digits();
            let x = BigInt::from(digits[0]);
            let rest_reversed: Vec<u8> = digits[1..].iter().rev().copied().collect();
            let y = digits_value(&rest_reversed);
            let whole_reversed: Vec<u8> = digits.iter().rev().copied().collect();
            out.push(int_sample(&[&x, &y], &digits_value(&whole_reversed), s));
        }
    }
    out
}

/// Sample grids witnessing that no degree-`degree` bivariate polynomial
/// matches the right-spine splits of the intended values.
///
/// For each remainder length `L` in `1..=degree+1` the grid takes leading
/// digits `1..=degree+1` crossed with remainder values `0..=degree`
/// (zero-padded to length `L`). A degree-`degree` polynomial agreeing with
/// `10^L * x + y` on a `(degree+1) x (degree+1)` grid equals it identically,
/// and no polynomial equals two of these at once — so the grids for two
/// remainder lengths are already jointly unsatisfiable. The leading digits
/// are nonzero, keeping every grid numeral inside its length's decimal
/// interval.
pub fn dn_refutation_samples(degree: usize) -> Vec<SamplePoint> {
    assert!((1..=8).contains(&degree), "grid needs degree+1 distinct nonzero digits");
    let mut out = Vec::new();
    for rest_len in 1..=degree + 1 {
        for lead in 1..=degree + 1 {
            for rest_value in 0..=degree {
                let s = format!("{lead}{rest_value:0rest_len$}");
                let x = BigInt::from(lead);
                let y = BigInt::from(rest_value);
                let target = digits_value(
                    &s.bytes().map(|b| b - b'0').collect::<Vec<u8>>(),
                );
                out.push(int_sample(&[&x, &y], &target, s));
            }
        }
    }
    out
}

/// The control grids for the left-spine splits over the same lengths; every
/// sample satisfies `target = 10 * x + y`, so every degree fits.
pub fn nd_control_samples(degree: usize) -> Vec<SamplePoint> {
    assert!((1..=8).contains(&degree));
    let mut out = Vec::new();
    for prefix_len in 1..=degree + 1 {
        for prefix_value in 0..=degree {
            for last in 0..=degree {
                let s = format!("{prefix_value:0prefix_len$}{last}");
                let x = BigInt::from(prefix_value);
                let y = BigInt::from(last);
                let target = x.clone() * 10 + y.clone();
                out.push(int_sample(&[&x, &y], &target, s));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Boolean coordination
// ---------------------------------------------------------------------------

/// A total map from variable atoms to truth values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoolAssignment(BTreeMap<Atom, bool>);

impl BoolAssignment {
    pub fn new() -> Self {
        BoolAssignment(BTreeMap::new())
    }

    /// The standard three-variable environment.
    pub fn abc(a: bool, b: bool, c: bool) -> Self {
        let mut env = BoolAssignment::new();
        env.set(var("a"), a);
        env.set(var("b"), b);
        env.set(var("c"), c);
        env
    }

    pub fn set(&mut self, atom: Atom, value: bool) {
        self.0.insert(atom, value);
    }

    pub fn get(&self, atom: &Atom) -> Option<bool> {
        self.0.get(atom).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, bool)> {
        self.0.iter().map(|(a, v)| (a, *v))
    }

    /// Render as `a=1,b=0,c=1`.
    pub fn label(&self) -> String {
        self.0
            .iter()
            .map(|(a, v)| format!("{a}={}", u8::from(*v)))
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl FromIterator<(Atom, bool)> for BoolAssignment {
    fn from_iter<I: IntoIterator<Item = (Atom, bool)>>(iter: I) -> Self {
        BoolAssignment(iter.into_iter().collect())
    }
}

/// How the whole coordination expression is read. `Natural` evaluates the
/// expression as written; `Twisted` assigns `x+(y&z)` the value of
/// `(x+y)&z` while keeping atomic variables and the one-operator
/// expressions `x+y`, `y&z` at their ordinary values. Outside those shapes
/// the twisted reading is deliberately undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordSemantics {
    Natural,
    Twisted,
}

const OR: &str = "+";
const AND: &str = "&";

fn var(name: &str) -> Atom {
    Atom::new(name).expect("fixed names are valid atoms")
}

/// The operator alphabet `{+, &}`.
pub fn coordination_operators() -> BTreeSet<Atom> {
    [var(OR), var(AND)].into_iter().collect()
}

fn is_operator(a: &Atom) -> bool {
    a.name() == OR || a.name() == AND
}

fn apply_op(op: &Atom, l: bool, r: bool) -> bool {
    match op.name() {
        OR => l || r,
        AND => l && r,
        _ => unreachable!("checked by is_operator"),
    }
}

/// Decode a prefix-form term back into an operator expression:
/// `(op.(x.y))` becomes `op(x, y)`.
fn decode_prefix(term: &Term) -> Result<OpExpr, GrammarError> {
    match term {
        Term::Leaf(a) => {
            if is_operator(a) {
                Err(GrammarError::NotBooleanExpression(term.render()))
            } else {
                Ok(OpExpr::Var(a.clone()))
            }
        }
        Term::Node(head, args) => match (head.as_ref(), args.as_ref()) {
            (Term::Leaf(op), Term::Node(l, r)) if is_operator(op) => Ok(OpExpr::Binary(
                op.clone(),
                Box::new(decode_prefix(l)?),
                Box::new(decode_prefix(r)?),
            )),
            _ => Err(GrammarError::NotPrefixForm(term.render())),
        },
    }
}

fn eval_natural(expr: &OpExpr, env: &BoolAssignment) -> Result<bool, GrammarError> {
    match expr {
        OpExpr::Var(a) => env
            .get(a)
            .ok_or_else(|| GrammarError::UnboundVariable(a.clone())),
        OpExpr::Binary(op, l, r) => Ok(apply_op(
            op,
            eval_natural(l, env)?,
            eval_natural(r, env)?,
        )),
    }
}

fn eval_twisted(expr: &OpExpr, env: &BoolAssignment) -> Result<bool, GrammarError> {
    let lookup = |a: &Atom| {
        env.get(a)
            .ok_or_else(|| GrammarError::UnboundVariable(a.clone()))
    };
    match expr {
        OpExpr::Var(a) => lookup(a),
        OpExpr::Binary(op, l, r) => match (l.as_ref(), r.as_ref()) {
            (OpExpr::Var(x), OpExpr::Var(y)) => Ok(apply_op(op, lookup(x)?, lookup(y)?)),
            // x+(y&z) is read as (x+y)&z.
            (OpExpr::Var(x), OpExpr::Binary(inner, y, z))
                if op.name() == OR && inner.name() == AND =>
            {
                match (y.as_ref(), z.as_ref()) {
                    (OpExpr::Var(y), OpExpr::Var(z)) => {
                        Ok((lookup(x)? || lookup(y)?) && lookup(z)?)
                    }
                    _ => Err(GrammarError::NotBooleanExpression(
                        "twisted reading undefined beyond one nesting level".into(),
                    )),
                }
            }
            _ => Err(GrammarError::NotBooleanExpression(
                "twisted reading undefined for this shape".into(),
            )),
        },
    }
}

/// Evaluate a coordination expression given in prefix form.
pub fn eval_coordination(
    expr: &Term,
    env: &BoolAssignment,
    semantics: CoordSemantics,
) -> Result<bool, GrammarError> {
    let decoded = decode_prefix(expr)?;
    match semantics {
        CoordSemantics::Natural => eval_natural(&decoded, env),
        CoordSemantics::Twisted => eval_twisted(&decoded, env),
    }
}

/// Parse an infix Boolean expression such as `a+(b&c)`. Mixed operators
/// must be parenthesized; there is no precedence.
pub fn parse_infix_bool(s: &str) -> Result<OpExpr, GrammarError> {
    let mut p = InfixParser {
        input: s.as_bytes(),
        pos: 0,
    };
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos != p.input.len() {
        return Err(GrammarError::InfixParse {
            pos: p.pos,
            msg: "trailing input".into(),
        });
    }
    Ok(expr)
}

/// Parse a flat dotted prefix string such as `+.a.&.b.c`: each operator
/// consumes the next two expressions.
pub fn parse_dotted_prefix(
    s: &str,
    operators: &BTreeSet<Atom>,
) -> Result<OpExpr, GrammarError> {
    let mut tokens = Vec::new();
    for piece in s.split(crate::term::SEPARATOR) {
        let atom = Atom::new(piece).map_err(|e| GrammarError::InfixParse {
            pos: 0,
            msg: e.to_string(),
        })?;
        tokens.push(atom);
    }
    let mut iter = tokens.into_iter();
    let expr = read_prefix(&mut iter, operators)?;
    if iter.next().is_some() {
        return Err(GrammarError::InfixParse {
            pos: s.len(),
            msg: "trailing tokens after a complete expression".into(),
        });
    }
    Ok(expr)
}

fn read_prefix(
    tokens: &mut impl Iterator<Item = Atom>,
    operators: &BTreeSet<Atom>,
) -> Result<OpExpr, GrammarError> {
    let tok = tokens.next().ok_or(GrammarError::InfixParse {
        pos: 0,
        msg: "expression ended early".into(),
    })?;
    if operators.contains(&tok) {
        let l = read_prefix(tokens, operators)?;
        let r = read_prefix(tokens, operators)?;
        Ok(OpExpr::Binary(tok, Box::new(l), Box::new(r)))
    } else {
        Ok(OpExpr::Var(tok))
    }
}

struct InfixParser<'a> {
    input: &'a [u8],
    pos: usize,
}

impl InfixParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expr(&mut self) -> Result<OpExpr, GrammarError> {
        let first = self.operand()?;
        self.skip_ws();
        if let Some(op) = self.peek_op() {
            self.pos += 1;
            let second = self.operand()?;
            self.skip_ws();
            if self.peek_op().is_some() {
                return Err(GrammarError::InfixParse {
                    pos: self.pos,
                    msg: "mixed operators need parentheses".into(),
                });
            }
            return Ok(OpExpr::Binary(var(op), Box::new(first), Box::new(second)));
        }
        Ok(first)
    }

    fn peek_op(&self) -> Option<&'static str> {
        match self.input.get(self.pos) {
            Some(b'+') => Some(OR),
            Some(b'&') => Some(AND),
            _ => None,
        }
    }

    fn operand(&mut self) -> Result<OpExpr, GrammarError> {
        self.skip_ws();
        match self.input.get(self.pos) {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if self.input.get(self.pos) != Some(&b')') {
                    return Err(GrammarError::InfixParse {
                        pos: self.pos,
                        msg: "expected ')'".into(),
                    });
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) => {
                let start = self.pos;
                while let Some(&b) = self.input.get(self.pos) {
                    if b == b'+' || b == b'&' || b == b'(' || b == b')' || b.is_ascii_whitespace()
                    {
                        break;
                    }
                    self.pos += 1;
                }
                if self.pos == start {
                    return Err(GrammarError::InfixParse {
                        pos: start,
                        msg: "expected a variable".into(),
                    });
                }
                let name = std::str::from_utf8(&self.input[start..self.pos]).map_err(|_| {
                    GrammarError::InfixParse {
                        pos: start,
                        msg: "variable is not UTF-8".into(),
                    }
                })?;
                let atom = Atom::new(name).map_err(|e| GrammarError::InfixParse {
                    pos: start,
                    msg: e.to_string(),
                })?;
                Ok(OpExpr::Var(atom))
            }
            None => Err(GrammarError::InfixParse {
                pos: self.pos,
                msg: "expression ended early".into(),
            }),
        }
    }
}

// ---------------------------------------------------------------------------
// Bundled fragments and assignments
// ---------------------------------------------------------------------------

/// The five-term idiom lexicon: `wall`, `seas`, `high`, `(high.wall)`,
/// `(high.seas)`, with `high` composing with both nouns.
pub fn idiom_fragment() -> LanguageFragment {
    let wall = Term::Leaf(var("wall"));
    let seas = Term::Leaf(var("seas"));
    let high = Term::Leaf(var("high"));
    LanguageFragment::builder()
        .atoms([var("wall"), var("seas"), var("high")])
        .pair(&high, &wall)
        .expect("fresh terms")
        .pair(&high, &seas)
        .expect("fresh terms")
        .build()
}

/// The meanings making the idiom lexicon's point: the compound meanings
/// are given case by case — `(high.wall)` is the ordinary `high(m(wall))`,
/// `(high.seas)` is the idiomatic `open(m(sea))` — and the encoding
/// swallows both without complaint.
pub fn idiom_assignment() -> MeaningAssignment {
    let m = |name: &str| MeaningValue::sym(&format!("m({name})"), []);
    MeaningAssignment::new()
        .with(Term::Leaf(var("wall")), m("wall"))
        .with(Term::Leaf(var("seas")), m("seas"))
        .with(Term::Leaf(var("high")), m("high"))
        .with(
            Term::node(Term::Leaf(var("high")), Term::Leaf(var("wall"))),
            MeaningValue::sym("high", [m("wall")]),
        )
        .with(
            Term::node(Term::Leaf(var("high")), Term::Leaf(var("seas"))),
            MeaningValue::sym("open", [m("sea")]),
        )
}

fn coordination_terms() -> (Term, Term, Term, Term, Term, Term, Term, Term, Term) {
    let a = Term::Leaf(var("a"));
    let b = Term::Leaf(var("b"));
    let c = Term::Leaf(var("c"));
    let plus = Term::Leaf(var(OR));
    let amp = Term::Leaf(var(AND));
    let bc = Term::node(b.clone(), c.clone());
    let and_bc = Term::node(amp.clone(), bc.clone());
    let a_and_bc = Term::node(a.clone(), and_bc.clone());
    let full = Term::node(plus.clone(), a_and_bc.clone());
    (a, b, c, plus, amp, bc, and_bc, a_and_bc, full)
}

/// The nine-term coordination language: `a`, `b`, `c`, `+`, `&`, and the
/// prefix-form spine of `a+(b&c)` with its intermediate stages `(b.c)`,
/// `&.b.c`, and `a.&.b.c`.
pub fn coordination_fragment() -> LanguageFragment {
    let (a, b, c, plus, amp, bc, and_bc, a_and_bc, _full) = coordination_terms();
    LanguageFragment::builder()
        .atoms([var("a"), var("b"), var("c"), var(OR), var(AND)])
        .pair(&b, &c)
        .expect("fresh terms")
        .pair(&amp, &bc)
        .expect("fresh terms")
        .pair(&a, &and_bc)
        .expect("fresh terms")
        .pair(&plus, &a_and_bc)
        .expect("fresh terms")
        .build()
}

/// The coordination language extended with `(a.b)` and `+.a.b`, the
/// "for completeness" additions that exercise an extra pair in the row
/// for `+`.
pub fn coordination_fragment_extended() -> LanguageFragment {
    let (a, b, c, plus, amp, bc, and_bc, a_and_bc, _full) = coordination_terms();
    let ab = Term::node(a.clone(), b.clone());
    LanguageFragment::builder()
        .atoms([var("a"), var("b"), var("c"), var(OR), var(AND)])
        .pair(&b, &c)
        .expect("fresh terms")
        .pair(&amp, &bc)
        .expect("fresh terms")
        .pair(&a, &and_bc)
        .expect("fresh terms")
        .pair(&plus, &a_and_bc)
        .expect("fresh terms")
        .pair(&a, &b)
        .expect("fresh terms")
        .pair(&plus, &ab)
        .expect("fresh terms")
        .build()
}

/// Meanings for the coordination language (and its extension) at one truth
/// assignment: variables get their truth values, operators opaque symbols,
/// operator-less pairs argument tuples, operator applications truth values,
/// and the whole expression the reading picked by `semantics`.
pub fn coordination_assignment(
    env: &BoolAssignment,
    semantics: CoordSemantics,
) -> Result<MeaningAssignment, GrammarError> {
    let need = |name: &str| {
        env.get(&var(name))
            .ok_or_else(|| GrammarError::UnboundVariable(var(name)))
    };
    let va = need("a")?;
    let vb = need("b")?;
    let vc = need("c")?;
    let (a, b, c, plus, amp, bc, and_bc, a_and_bc, full) = coordination_terms();
    let ab = Term::node(a.clone(), b.clone());
    let plus_ab = Term::node(plus.clone(), ab.clone());
    let whole = match semantics {
        CoordSemantics::Natural => va || (vb && vc),
        CoordSemantics::Twisted => (va || vb) && vc,
    };
    Ok(MeaningAssignment::new()
        .with(a, MeaningValue::Bool(va))
        .with(b, MeaningValue::Bool(vb))
        .with(c, MeaningValue::Bool(vc))
        .with(plus, MeaningValue::sym("m(+)", []))
        .with(amp, MeaningValue::sym("m(&)", []))
        .with(
            bc,
            MeaningValue::tuple([MeaningValue::Bool(vb), MeaningValue::Bool(vc)]),
        )
        .with(and_bc, MeaningValue::Bool(vb && vc))
        .with(
            a_and_bc,
            MeaningValue::tuple([MeaningValue::Bool(va), MeaningValue::Bool(vb && vc)]),
        )
        .with(full, MeaningValue::Bool(whole))
        .with(
            ab,
            MeaningValue::tuple([MeaningValue::Bool(va), MeaningValue::Bool(vb)]),
        )
        .with(plus_ab, MeaningValue::Bool(va || vb)))
}

/// All eight truth assignments in descending truth-table order for
/// `(a, b, c)`, projected for the dependence question: can the whole
/// expression's twisted value be a function of `(m(a), m(b&c))`?
pub fn coordination_dependence_samples(semantics: CoordSemantics) -> Vec<SamplePoint> {
    let mut out = Vec::new();
    for a in [true, false] {
        for b in [true, false] {
            for c in [true, false] {
                let env = BoolAssignment::abc(a, b, c);
                let whole = match semantics {
                    CoordSemantics::Natural => a || (b && c),
                    CoordSemantics::Twisted => (a || b) && c,
                };
                out.push(SamplePoint {
                    args: vec![MeaningValue::Bool(a), MeaningValue::Bool(b && c)],
                    target: MeaningValue::Bool(whole),
                    label: Some(env.label()),
                });
            }
        }
    }
    out
}

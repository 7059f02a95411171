//! Cross-module properties: the encoding laws under random languages and
//! random meanings, eager/lazy table agreement, and independent oracles for
//! the numeral semantics.

use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use num::BigInt;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use comsem::grammars::{
    coordination_assignment, coordination_fragment_extended, idiom_assignment, idiom_fragment,
    parse_numeral, BoolAssignment, CoordSemantics, NumeralGrammar,
};
use comsem::meaning::{MeaningAssignment, MeaningSource, MeaningValue};
use comsem::mu::{
    encode, enumerate_table, materialize_table, verify_homomorphism, ApplyArg, Applied, BaseKey,
    EncodingSession, EncodingVariant, EnumerateError, MuTable, TableEntry,
};
use comsem::random::{random_assignment, random_fragment};
use comsem::term::{DollarTerm, LanguageFragment, Term};

fn bundled_sessions() -> Vec<EncodingSession> {
    let env = BoolAssignment::abc(true, false, true);
    vec![
        encode(
            idiom_fragment(),
            idiom_assignment(),
            EncodingVariant::Plain,
        )
        .unwrap(),
        encode(
            coordination_fragment_extended(),
            coordination_assignment(&env, CoordSemantics::Twisted).unwrap(),
            EncodingVariant::Dollar,
        )
        .unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The construction is claimed for any language and any assignment;
    /// every seeded random instance must verify with zero violations.
    #[test]
    fn encoding_laws_hold_for_random_languages(seed: u64, dollar: bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fragment = random_fragment(&mut rng, 16);
        let assignment = random_assignment(&mut rng, &fragment);
        let variant = if dollar {
            EncodingVariant::Dollar
        } else {
            EncodingVariant::Plain
        };
        let report = verify_homomorphism(&encode(fragment, assignment, variant).unwrap());
        prop_assert!(report.passed(), "violations: {:?}", report.violations);
    }

    /// The encoder never reads any relation between composite and part
    /// meanings, so shuffling which term gets which value cannot break it.
    #[test]
    fn permuted_meanings_still_encode(seed: u64) {
        let fragment = coordination_fragment_extended();
        let env = BoolAssignment::abc(true, true, false);
        let base = coordination_assignment(&env, CoordSemantics::Natural).unwrap();
        let mut values = base.values();
        values.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let shuffled = base.with_values(values);
        for variant in [EncodingVariant::Plain, EncodingVariant::Dollar] {
            let report =
                verify_homomorphism(&encode(fragment.clone(), shuffled.clone(), variant).unwrap());
            prop_assert!(report.passed(), "violations: {:?}", report.violations);
        }
    }

    /// Left-spine split of the intended value: the last digit is the units
    /// digit of the whole.
    #[test]
    fn nd_recurrence(s in "[0-9]{2,6}") {
        let whole = parse_numeral(&s, NumeralGrammar::Nd).unwrap();
        let prefix = parse_numeral(&s[..s.len() - 1], NumeralGrammar::Nd).unwrap();
        let last = s.as_bytes()[s.len() - 1] - b'0';
        prop_assert_eq!(
            comsem::grammars::intended_value(&whole),
            comsem::grammars::intended_value(&prefix) * 10 + BigInt::from(last)
        );
    }

    /// Right-spine split: the leading digit is scaled by ten to the length
    /// of the remainder — the non-polynomial dependence.
    #[test]
    fn dn_recurrence(s in "[0-9]{2,6}") {
        let whole = parse_numeral(&s, NumeralGrammar::Dn).unwrap();
        let rest = parse_numeral(&s[1..], NumeralGrammar::Dn).unwrap();
        let lead = s.as_bytes()[0] - b'0';
        let scale = BigInt::from(10).pow((s.len() - 1) as u32);
        prop_assert_eq!(
            comsem::grammars::intended_value(&whole),
            BigInt::from(lead) * scale + comsem::grammars::intended_value(&rest)
        );
    }
}

/// The backwards semantics equals reading the digit string reversed — the
/// oracle recomputes it by actual string reversal, over 1000 random
/// numerals.
#[test]
fn backwards_value_matches_string_reverse_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBAC);
    for _ in 0..1000 {
        let len = rand::Rng::random_range(&mut rng, 1..=12usize);
        let s: String = (0..len)
            .map(|_| char::from(b'0' + rand::Rng::random_range(&mut rng, 0..10u8)))
            .collect();
        let parse = parse_numeral(&s, NumeralGrammar::Dn).unwrap();
        let reversed: String = s.chars().rev().collect();
        let oracle = BigInt::from_str(&reversed).unwrap();
        assert_eq!(
            comsem::grammars::backwards_value(&parse),
            oracle,
            "numeral {s}"
        );
    }
}

fn check_table_matches_lazy(session: &EncodingSession, table: &MuTable) {
    for row in &table.rows {
        let subject_mu = session.mu(&row.subject).unwrap();
        let base_arg = match &row.base_key {
            BaseKey::Term(t) => ApplyArg::Raw(t.clone()),
            BaseKey::Marker => ApplyArg::Marker,
        };
        assert_eq!(
            subject_mu.apply(&base_arg).unwrap(),
            Applied::Meaning(row.base_value.clone()),
            "base pair of {}",
            row.subject
        );
        for pair in &row.entries {
            let arg_mu = session.mu(&pair.arg).unwrap();
            let expected = session.mu(&pair.result).unwrap();
            assert_eq!(
                subject_mu.apply(&ApplyArg::Mu(arg_mu)).unwrap(),
                Applied::Mu(expected),
                "composition ({}.{})",
                row.subject,
                pair.arg
            );
        }
    }
}

#[test]
fn materialized_tables_agree_with_lazy_application() {
    for session in bundled_sessions() {
        check_table_matches_lazy(&session, &materialize_table(&session));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..25 {
        let fragment = random_fragment(&mut rng, 14);
        let assignment = random_assignment(&mut rng, &fragment);
        for variant in [EncodingVariant::Plain, EncodingVariant::Dollar] {
            let session = encode(fragment.clone(), assignment.clone(), variant).unwrap();
            check_table_matches_lazy(&session, &materialize_table(&session));
        }
    }
}

#[test]
fn enumerate_agrees_with_materialize_everywhere() {
    for session in bundled_sessions() {
        let fragment = session.fragment();
        let assignment = |t: &Term| session.meaning(t).cloned();
        let table = materialize_table(&session);
        for (alpha, row) in table.rows.iter().enumerate() {
            let base = enumerate_table(fragment, &assignment, session.variant(), alpha, 0)
                .expect("base entry in range");
            assert_eq!(
                base,
                TableEntry::Base {
                    subject: row.subject.clone(),
                    key: row.base_key.clone(),
                    meaning: row.base_value.clone(),
                }
            );
            for (n, pair) in row.entries.iter().enumerate() {
                let entry =
                    enumerate_table(fragment, &assignment, session.variant(), alpha, n + 1)
                        .expect("pair entry in range");
                assert_eq!(
                    entry,
                    TableEntry::Composition {
                        subject: row.subject.clone(),
                        arg: pair.arg.clone(),
                        result: pair.result.clone(),
                    }
                );
            }
            let past_end = enumerate_table(
                fragment,
                &assignment,
                session.variant(),
                alpha,
                row.entries.len() + 1,
            );
            assert!(matches!(past_end, Err(EnumerateError::OutOfRange { .. })));
        }
        let past_rows = enumerate_table(
            fragment,
            &assignment,
            session.variant(),
            table.rows.len(),
            0,
        );
        assert!(matches!(past_rows, Err(EnumerateError::OutOfRange { .. })));
    }
}

/// A meaning source that counts how often it is consulted.
struct CountingSource<'a> {
    inner: &'a MeaningAssignment,
    calls: AtomicUsize,
}

impl MeaningSource for CountingSource<'_> {
    fn meaning_of(&self, term: &Term) -> Option<MeaningValue> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.meaning_of(term)
    }
}

/// Reading entry (α, n) must not force meanings outside row α: the base
/// entry evaluates exactly its own meaning, composition entries none.
#[test]
fn enumerate_is_lazy_in_meaning_evaluations() {
    for session in bundled_sessions() {
        let fragment = session.fragment();
        let mut assignment = MeaningAssignment::new();
        for term in fragment.terms() {
            assignment.assign(term.clone(), session.meaning(term).unwrap().clone());
        }
        let table = materialize_table(&session);
        for (alpha, row) in table.rows.iter().enumerate() {
            let source = CountingSource {
                inner: &assignment,
                calls: AtomicUsize::new(0),
            };
            enumerate_table(fragment, &source, session.variant(), alpha, 0).unwrap();
            assert_eq!(
                source.calls.load(Ordering::Relaxed),
                1,
                "base entry of row {alpha} must evaluate exactly one meaning"
            );
            if !row.entries.is_empty() {
                let source = CountingSource {
                    inner: &assignment,
                    calls: AtomicUsize::new(0),
                };
                enumerate_table(fragment, &source, session.variant(), alpha, 1).unwrap();
                assert_eq!(
                    source.calls.load(Ordering::Relaxed),
                    0,
                    "composition entries name encodings; they evaluate no meanings"
                );
            }
        }
    }
}

/// Extensional equality of the rows' μ-sets, computed by refinement:
/// start from "base pairs and entry counts agree" and repeatedly strike
/// pairs whose composition entries cannot be matched up under the current
/// relation (arguments and results compared extensionally in turn), until
/// a fixpoint. Rows can mention each other cyclically through argument
/// positions, so refinement rather than structural recursion.
fn extensional_equality(table: &MuTable, frag: &LanguageFragment) -> Vec<Vec<bool>> {
    let n = table.rows.len();
    let row_of = |t: &Term| frag.index_of(t).unwrap();
    let mut eq: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let (a, b) = (&table.rows[i], &table.rows[j]);
                    a.base_key == b.base_key
                        && a.base_value == b.base_value
                        && a.entries.len() == b.entries.len()
                })
                .collect()
        })
        .collect();
    loop {
        let prev = eq.clone();
        let matched = |x: &comsem::mu::MuPair, y: &comsem::mu::MuPair| {
            prev[row_of(&x.arg)][row_of(&y.arg)] && prev[row_of(&x.result)][row_of(&y.result)]
        };
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if !prev[i][j] {
                    continue;
                }
                let (a, b) = (&table.rows[i], &table.rows[j]);
                let still = a
                    .entries
                    .iter()
                    .all(|x| b.entries.iter().any(|y| matched(x, y)))
                    && b.entries.iter().all(|y| a.entries.iter().any(|x| matched(x, y)));
                if !still {
                    eq[i][j] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return eq;
        }
    }
}

/// In the plain variant every row keeps its own raw term as base key, so
/// distinct terms get extensionally distinct encodings even when their
/// meanings collide — and tag equality coincides with extensional equality.
#[test]
fn plain_encodings_are_injective_even_with_colliding_meanings() {
    let mut sessions = vec![encode(
        idiom_fragment(),
        idiom_assignment(),
        EncodingVariant::Plain,
    )
    .unwrap()];
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..20 {
        let fragment = random_fragment(&mut rng, 12);
        // Constant meanings: maximal collisions.
        let mut constant = MeaningAssignment::new();
        for term in fragment.terms() {
            constant.assign(term.clone(), MeaningValue::int(0));
        }
        sessions.push(encode(fragment.clone(), constant, EncodingVariant::Plain).unwrap());
        let assignment = random_assignment(&mut rng, &fragment);
        sessions.push(encode(fragment, assignment, EncodingVariant::Plain).unwrap());
    }
    for session in sessions {
        let fragment = session.fragment();
        let table = materialize_table(&session);
        let n = table.rows.len();
        let mut base_keys: Vec<&BaseKey> = table.rows.iter().map(|r| &r.base_key).collect();
        base_keys.sort_by_key(|k| format!("{k:?}"));
        base_keys.dedup();
        assert_eq!(base_keys.len(), n, "raw-term base keys must be distinct");
        let eq = extensional_equality(&table, fragment);
        for (i, row) in eq.iter().enumerate() {
            for (j, &same) in row.iter().enumerate() {
                assert_eq!(
                    same,
                    i == j,
                    "tag equality and extensional equality must coincide ({i}, {j})"
                );
            }
        }
    }
}

/// The marker bookkeeping of the `$` variant: `mu(s.$)` decodes `m(s)` for
/// every term, and the marker value behaves as the decoding argument.
#[test]
fn dollar_graph_extension_decodes_every_term() {
    let env = BoolAssignment::abc(false, true, true);
    let session = encode(
        coordination_fragment_extended(),
        coordination_assignment(&env, CoordSemantics::Natural).unwrap(),
        EncodingVariant::Dollar,
    )
    .unwrap();
    let marker = session.mu_marker().unwrap();
    for term in session.fragment().terms() {
        let expected = session.meaning(term).unwrap().clone();
        let dollar = DollarTerm::new(term.clone());
        assert_eq!(session.dollar_meaning(&dollar).unwrap(), expected);
        assert_eq!(
            session
                .mu(term)
                .unwrap()
                .apply(&ApplyArg::Mu(marker.clone()))
                .unwrap(),
            Applied::Meaning(expected)
        );
    }
}

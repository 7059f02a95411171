//! Seeded random fragments and assignments.
//!
//! The encoding construction is claimed for *every* finite language and
//! *every* meaning assignment, so the strongest cheap evidence is volume:
//! generate many fragments, re-assign meanings many times each, and verify
//! the defining equations on all of them. Everything here is driven by a
//! seeded ChaCha stream, so a batch is reproducible from its seed alone.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::meaning::{MeaningAssignment, MeaningValue};
use crate::mu::{encode_labeled, verify_homomorphism_seq, EncodingVariant};
use crate::term::{Atom, LanguageFragment, Term};

const ATOM_NAMES: [&str; 5] = ["a", "b", "c", "d", "e"];

/// Grow a random fragment: a few atoms, then repeated random compositions
/// of already-present terms until a random target size (at most
/// `max_terms`) is reached. Closed and valid by construction.
pub fn random_fragment(rng: &mut impl Rng, max_terms: usize) -> LanguageFragment {
    assert!(max_terms >= 1, "a fragment has at least one term");
    let atom_count = rng.random_range(1..=max_terms.min(ATOM_NAMES.len()));
    let mut builder = LanguageFragment::builder();
    let mut terms: Vec<Term> = Vec::with_capacity(max_terms);
    for name in ATOM_NAMES.iter().take(atom_count) {
        let atom = Atom::new(*name).expect("fixed alphabetic names are valid atoms");
        terms.push(Term::leaf(atom.clone()));
        builder = builder.atom(atom);
    }
    let target = rng.random_range(atom_count..=max_terms);
    let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
    // Small fragments can exhaust their unused pairs; give up after a
    // bounded run of collisions rather than insisting on the target.
    let mut stalled = 0;
    while terms.len() < target && stalled < 64 {
        let left = rng.random_range(0..terms.len());
        let right = rng.random_range(0..terms.len());
        if !used.insert((left, right)) {
            stalled += 1;
            continue;
        }
        stalled = 0;
        let (l, r) = (terms[left].clone(), terms[right].clone());
        builder = builder.pair(&l, &r).expect("operands are present");
        terms.push(Term::node(l, r));
    }
    builder.build()
}

/// One random meaning value, drawn across all value kinds. Collisions
/// between terms are allowed deliberately: the construction must survive
/// non-injective assignments.
pub fn random_value(rng: &mut impl Rng) -> MeaningValue {
    match rng.random_range(0..5u8) {
        0 => MeaningValue::int(rng.random_range(-999..=999i64)),
        1 => MeaningValue::rat(rng.random_range(-99..=99i64), rng.random_range(1..=9i64)),
        2 => MeaningValue::Bool(rng.random()),
        3 => MeaningValue::sym(&format!("s{}", rng.random_range(0..7u8)), []),
        _ => MeaningValue::tuple([
            MeaningValue::int(rng.random_range(0..10u8)),
            MeaningValue::Bool(rng.random()),
        ]),
    }
}

/// A fresh assignment giving every term of the fragment a random value.
pub fn random_assignment(rng: &mut impl Rng, fragment: &LanguageFragment) -> MeaningAssignment {
    let mut out = MeaningAssignment::new();
    for term in fragment.terms() {
        out.assign(term.clone(), random_value(rng));
    }
    out
}

/// Aggregate outcome of a randomized verification batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchOutcome {
    pub fragments: usize,
    pub verifications: usize,
    pub terms_checked: usize,
    pub pairs_checked: usize,
    pub violations: usize,
}

impl BatchOutcome {
    pub fn all_passed(&self) -> bool {
        self.violations == 0
    }
}

fn batch_jobs(
    seed: u64,
    fragments: usize,
    max_terms: usize,
    assignments_per: usize,
) -> Vec<(LanguageFragment, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::with_capacity(fragments * assignments_per);
    for _ in 0..fragments {
        let fragment = random_fragment(&mut rng, max_terms);
        for _ in 0..assignments_per {
            // Every job re-seeds its own stream, so results are identical
            // whether jobs run in sequence or in parallel.
            jobs.push((fragment.clone(), rng.random()));
        }
    }
    jobs
}

fn run_batch_job(
    (fragment, assignment_seed): &(LanguageFragment, u64),
    variant: EncodingVariant,
) -> (usize, usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(*assignment_seed);
    let assignment = random_assignment(&mut rng, fragment);
    let session = encode_labeled(
        fragment.clone(),
        assignment,
        variant,
        format!("random:{assignment_seed:016x}"),
    )
    .expect("random assignments cover every term");
    // Fragments this small are cheaper to verify in one go; the batch
    // parallelizes across jobs, not inside them.
    let report = verify_homomorphism_seq(&session);
    (
        report.terms_checked,
        report.pairs_checked,
        report.violations.len(),
    )
}

fn collect_outcome(
    fragments: usize,
    tallies: impl Iterator<Item = (usize, usize, usize)>,
) -> BatchOutcome {
    let mut outcome = BatchOutcome {
        fragments,
        verifications: 0,
        terms_checked: 0,
        pairs_checked: 0,
        violations: 0,
    };
    for (terms, pairs, violations) in tallies {
        outcome.verifications += 1;
        outcome.terms_checked += terms;
        outcome.pairs_checked += pairs;
        outcome.violations += violations;
    }
    outcome
}

/// Generate `fragments` random fragments of at most `max_terms` terms,
/// re-assign meanings `assignments_per` times each, and verify the defining
/// equations of every resulting encoding. Fully determined by `seed`.
pub fn verify_random_batch(
    seed: u64,
    fragments: usize,
    max_terms: usize,
    assignments_per: usize,
    variant: EncodingVariant,
) -> BatchOutcome {
    let jobs = batch_jobs(seed, fragments, max_terms, assignments_per);
    #[cfg(feature = "parallel")]
    let tallies: Vec<_> = jobs
        .par_iter()
        .map(|job| run_batch_job(job, variant))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let tallies: Vec<_> = jobs
        .iter()
        .map(|job| run_batch_job(job, variant))
        .collect();
    collect_outcome(fragments, tallies.into_iter())
}

/// Sequential [`verify_random_batch`], kept callable for comparison.
pub fn verify_random_batch_seq(
    seed: u64,
    fragments: usize,
    max_terms: usize,
    assignments_per: usize,
    variant: EncodingVariant,
) -> BatchOutcome {
    let jobs = batch_jobs(seed, fragments, max_terms, assignments_per);
    let tallies = jobs.iter().map(|job| run_batch_job(job, variant));
    collect_outcome(fragments, tallies)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fragments_respect_the_size_bound_and_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let fragment = random_fragment(&mut rng, 20);
            assert!(fragment.term_count() >= 1);
            assert!(fragment.term_count() <= 20);
            // Round-tripping through the checked constructor re-validates
            // closure, pair membership, and atom coverage.
            let rebuilt = LanguageFragment::from_parts(
                fragment.atoms().cloned(),
                fragment.terms().cloned(),
                fragment.allowed_pairs().cloned(),
            );
            assert!(rebuilt.is_ok(), "{:?}", rebuilt.err());
        }
    }

    #[test]
    fn generation_is_reproducible_from_the_seed() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            assert_eq!(random_fragment(&mut a, 12), random_fragment(&mut b, 12));
        }
    }

    #[test]
    fn assignments_cover_every_term() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fragment = random_fragment(&mut rng, 15);
        let assignment = random_assignment(&mut rng, &fragment);
        assert_eq!(assignment.len(), fragment.term_count());
    }

    #[test]
    fn batches_pass_and_match_their_sequential_run() {
        for variant in [EncodingVariant::Plain, EncodingVariant::Dollar] {
            let par = verify_random_batch(42, 8, 12, 3, variant);
            let seq = verify_random_batch_seq(42, 8, 12, 3, variant);
            assert_eq!(par, seq);
            assert_eq!(par.verifications, 24);
            assert!(par.all_passed());
            assert!(par.terms_checked > 0);
        }
    }
}

//! Replayable evidence bundles.
//!
//! A bundle packages everything one run produced — verification reports,
//! explicit tables, fitting certificates — together with a description of
//! the job that ran and a digest of the input it ran on. Serialization is
//! canonical: the same job on the same input yields byte-identical bundles.
//! [`replay_bundle`] re-executes the recorded job against a fresh copy of
//! the input, confirms every recorded item reproduces, and independently
//! re-verifies every contained certificate, so a bundle is checkable
//! evidence rather than a log.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::files::{FileError, LanguageSpec, SamplesFile};
use crate::grammars::NumeralGrammar;
use crate::mu::{
    encode_labeled, enumerate_table, materialize_table, verify_homomorphism, EncodeError,
    EncodingVariant, EnumerateError, MuTable, TableEntry,
};
use crate::report::{canonical_bytes, digest_hex, VerificationReport};
use crate::systematicity::{
    check_functional_dependence, degree_sample_grid, fit_polynomial, fit_polynomial_with_budget,
    refute_polynomial_all_degrees, verify_certificate, Certificate, DegreeCertificate, FitError,
    FitOutcome, FunctionClass, SamplePoint,
};

/// Version stamp recorded in every bundle.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// The job a bundle records; replay re-executes exactly this description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JobSpec {
    /// Encode a language spec and verify the defining equations,
    /// optionally materializing the full table.
    Encode {
        variant: EncodingVariant,
        with_table: bool,
    },
    /// Fit a function of the given class to a sample file.
    Fit {
        class: FunctionClass,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        budget: Option<usize>,
    },
    /// Decide polynomial expressibility per degree `1..=max_degree` over a
    /// numeral grammar's canonical sample grids.
    RefuteDn {
        grammar: NumeralGrammar,
        max_degree: usize,
    },
    /// Look up one entry of the encoding's equation table.
    Enumerate {
        variant: EncodingVariant,
        row: usize,
        pair: usize,
    },
}

/// One recorded result, in execution order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BundleItem {
    Report(VerificationReport),
    Table(MuTable),
    Outcome(FitOutcome),
    Degree(DegreeCertificate),
    Entry(TableEntry),
}

/// A run's results plus enough context to re-check them offline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub tool_version: String,
    pub input_digest: String,
    pub job: JobSpec,
    pub items: Vec<BundleItem>,
}

impl ReportBundle {
    /// Every certificate contained anywhere in the bundle, in order.
    pub fn certificates(&self) -> impl Iterator<Item = &Certificate> {
        self.items.iter().filter_map(|item| match item {
            BundleItem::Outcome(outcome) => outcome.certificate(),
            BundleItem::Degree(dc) => Some(&dc.certificate),
            _ => None,
        })
    }

    /// Whether every recorded item reports success: reports pass, fit
    /// outcomes are decided as fitted, refutations are refutations.
    pub fn all_passed(&self) -> bool {
        self.items.iter().all(|item| match item {
            BundleItem::Report(r) => r.passed(),
            BundleItem::Outcome(FitOutcome::Decided(c)) => c.is_fitted(),
            BundleItem::Outcome(FitOutcome::Underdetermined { .. }) => false,
            BundleItem::Degree(dc) => !dc.certificate.is_fitted(),
            BundleItem::Table(_) | BundleItem::Entry(_) => true,
        })
    }
}

/// The input a job runs against. Refutation jobs generate their own
/// samples, so they replay from the job description alone (`None`).
#[derive(Debug, Clone, Copy)]
pub enum JobInput<'a> {
    Language(&'a LanguageSpec),
    Samples(&'a SamplesFile),
    None,
}

impl JobInput<'_> {
    fn digest(&self, job: &JobSpec) -> String {
        match self {
            JobInput::Language(spec) => spec.digest(),
            JobInput::Samples(file) => file.digest(),
            // Input-less jobs are pinned by their own description.
            JobInput::None => digest_hex(&canonical_bytes(job)),
        }
    }

    fn describe(&self) -> &'static str {
        match self {
            JobInput::Language(_) => "language spec",
            JobInput::Samples(_) => "samples",
            JobInput::None => "none",
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    File(#[from] FileError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    #[error("this job runs on a {needed} input, but {got} was provided")]
    WrongInput {
        needed: &'static str,
        got: &'static str,
    },
}

fn expect_language<'a>(input: JobInput<'a>) -> Result<&'a LanguageSpec, RunError> {
    match input {
        JobInput::Language(spec) => Ok(spec),
        other => Err(RunError::WrongInput {
            needed: "language spec",
            got: other.describe(),
        }),
    }
}

fn expect_samples<'a>(input: JobInput<'a>) -> Result<&'a SamplesFile, RunError> {
    match input {
        JobInput::Samples(file) => Ok(file),
        other => Err(RunError::WrongInput {
            needed: "samples",
            got: other.describe(),
        }),
    }
}

/// Dispatch one fit request to the matching operation.
pub fn run_fit(
    class: FunctionClass,
    budget: Option<usize>,
    samples: &[SamplePoint],
) -> Result<FitOutcome, FitError> {
    match class {
        FunctionClass::PolyTwoVar { max_degree } => match budget {
            Some(b) => fit_polynomial_with_budget(samples, max_degree, b),
            None => fit_polynomial(samples, max_degree),
        },
        FunctionClass::BoolFunOfProjections { arity } => {
            for (index, sample) in samples.iter().enumerate() {
                if sample.args.len() != arity {
                    return Err(FitError::Arity {
                        index,
                        got: sample.args.len(),
                        want: arity,
                    });
                }
            }
            Ok(FitOutcome::Decided(check_functional_dependence(samples)?))
        }
    }
}

fn run_job(job: &JobSpec, input: JobInput<'_>) -> Result<Vec<BundleItem>, RunError> {
    match job {
        JobSpec::Encode {
            variant,
            with_table,
        } => {
            let spec = expect_language(input)?;
            let label = format!("spec:{}", &input.digest(job)[..12]);
            let session = encode_labeled(spec.to_fragment()?, spec.assignment(), *variant, label)?;
            let mut items = vec![BundleItem::Report(verify_homomorphism(&session))];
            if *with_table {
                items.push(BundleItem::Table(materialize_table(&session)));
            }
            Ok(items)
        }
        JobSpec::Fit { class, budget } => {
            let file = expect_samples(input)?;
            let outcome = run_fit(*class, *budget, &file.samples)?;
            Ok(vec![BundleItem::Outcome(outcome)])
        }
        JobSpec::RefuteDn {
            grammar,
            max_degree,
        } => {
            let certs = refute_polynomial_all_degrees(*grammar, *max_degree)?;
            Ok(certs.into_iter().map(BundleItem::Degree).collect())
        }
        JobSpec::Enumerate { variant, row, pair } => {
            let spec = expect_language(input)?;
            let fragment = spec.to_fragment()?;
            let assignment = spec.assignment();
            let entry = enumerate_table(&fragment, &assignment, *variant, *row, *pair)?;
            Ok(vec![BundleItem::Entry(entry)])
        }
    }
}

/// Run a job and package its results.
pub fn make_bundle(job: JobSpec, input: JobInput<'_>) -> Result<ReportBundle, RunError> {
    let input_digest = input.digest(&job);
    let items = run_job(&job, input)?;
    Ok(ReportBundle {
        tool_version: TOOL_VERSION.into(),
        input_digest,
        job,
        items,
    })
}

/// Canonical byte form; deterministic and round-trippable.
pub fn serialize_bundle(bundle: &ReportBundle) -> Vec<u8> {
    canonical_bytes(bundle)
}

pub fn deserialize_bundle(bytes: &[u8]) -> Result<ReportBundle, serde_json::Error> {
    serde_json::from_slice(bytes)
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("input digest mismatch: bundle records {recorded}, provided input hashes to {actual}")]
    DigestMismatch { recorded: String, actual: String },
    #[error("cannot re-run bundled job: {0}")]
    Run(#[from] RunError),
}

/// Re-execute a bundle's job against the given input and confirm every
/// recorded result reproduces.
///
/// The input must hash to the bundle's recorded digest (anything else is an
/// error, not a `false`). Returns `true` iff the fresh run produces the
/// recorded items exactly and every contained certificate independently
/// passes verification against the samples it speaks about.
pub fn replay_bundle(bundle: &ReportBundle, input: JobInput<'_>) -> Result<bool, ReplayError> {
    let actual = input.digest(&bundle.job);
    if actual != bundle.input_digest {
        return Err(ReplayError::DigestMismatch {
            recorded: bundle.input_digest.clone(),
            actual,
        });
    }
    let fresh = run_job(&bundle.job, input)?;
    if fresh != bundle.items {
        return Ok(false);
    }
    for item in &bundle.items {
        let (certificate, samples) = match (item, &bundle.job) {
            (BundleItem::Outcome(outcome), _) => match outcome.certificate() {
                Some(c) => {
                    let file = expect_samples(input)?;
                    (c, file.samples.clone())
                }
                None => continue,
            },
            (BundleItem::Degree(dc), JobSpec::RefuteDn { grammar, .. }) => {
                (&dc.certificate, degree_sample_grid(*grammar, dc.degree))
            }
            _ => continue,
        };
        // Evidence that fails, or cannot even be matched to its samples,
        // does not reproduce.
        if !verify_certificate(certificate, &samples).unwrap_or(false) {
            return Ok(false);
        }
    }
    Ok(true)
}

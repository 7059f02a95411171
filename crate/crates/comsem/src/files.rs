//! On-disk input formats: language specs and sample files.
//!
//! Both formats are JSON with a fixed shape. Terms appear as their dotted
//! surface syntax (`"(high.seas)"`), meanings as the canonical value
//! encoding, so files stay diffable and hand-editable. Parsing goes through
//! the same constructors the library uses internally, which means a file
//! that loads is already a valid fragment/sample set.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::meaning::{MeaningAssignment, MeaningValue};
use crate::mu::EncodingVariant;
use crate::report::{canonical_bytes, digest_hex};
use crate::systematicity::{FunctionClass, SamplePoint};
use crate::term::{Atom, FragmentError, LanguageFragment, Term};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed {what} file: {source}")]
    Malformed {
        what: &'static str,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Fragment(#[from] FragmentError),
}

/// A language and its meaning assignment, as stored on disk.
///
/// `atoms`, `terms`, and `pairs` describe the fragment; `meanings` must
/// cover every listed term; `variant` selects which decoding convention
/// the encoder should verify against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageSpec {
    pub atoms: Vec<Atom>,
    pub terms: Vec<Term>,
    pub pairs: Vec<(Term, Term)>,
    pub meanings: BTreeMap<Term, MeaningValue>,
    pub variant: EncodingVariant,
}

impl LanguageSpec {
    pub fn parse(text: &str) -> Result<Self, FileError> {
        serde_json::from_str(text).map_err(|source| FileError::Malformed {
            what: "language spec",
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FileError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Build the fragment this spec describes, checking closure and
    /// pair-membership invariants.
    pub fn to_fragment(&self) -> Result<LanguageFragment, FileError> {
        Ok(LanguageFragment::from_parts(
            self.atoms.iter().cloned(),
            self.terms.iter().cloned(),
            self.pairs.iter().cloned(),
        )?)
    }

    pub fn assignment(&self) -> MeaningAssignment {
        let mut out = MeaningAssignment::new();
        for (term, value) in &self.meanings {
            out.assign(term.clone(), value.clone());
        }
        out
    }

    /// Content hash of the canonical byte form; the identity replay checks.
    pub fn digest(&self) -> String {
        digest_hex(&canonical_bytes(self))
    }

    /// Round-trip helper: a spec capturing an existing fragment/assignment.
    pub fn from_fragment(
        fragment: &LanguageFragment,
        assignment: &MeaningAssignment,
        variant: EncodingVariant,
    ) -> Self {
        LanguageSpec {
            atoms: fragment.atoms().cloned().collect(),
            terms: fragment.terms().cloned().collect(),
            pairs: fragment.allowed_pairs().cloned().collect(),
            meanings: assignment
                .iter()
                .map(|(t, v)| (t.clone(), v.clone()))
                .collect(),
            variant,
        }
    }
}

impl fmt::Display for LanguageSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} variant, {} atoms, {} terms, {} pairs",
            self.variant,
            self.atoms.len(),
            self.terms.len(),
            self.pairs.len()
        )
    }
}

/// A sample set for function fitting, as stored on disk.
///
/// The optional `class` records which function class the samples were
/// prepared for; command-line flags may override it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplesFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<FunctionClass>,
    pub samples: Vec<SamplePoint>,
}

impl SamplesFile {
    pub fn parse(text: &str) -> Result<Self, FileError> {
        serde_json::from_str(text).map_err(|source| FileError::Malformed {
            what: "samples",
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FileError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn digest(&self) -> String {
        digest_hex(&canonical_bytes(self))
    }
}

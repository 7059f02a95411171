//! Reports, canonical serialization, and replayable result bundles.
//!
//! Everything a run produces — verification reports, explicit tables,
//! fitting certificates — can be serialized to a canonical byte form:
//! the same inputs yield byte-identical output across runs and platforms.
//! A [`ReportBundle`] packages results together with a digest of the inputs
//! that produced them, so a consumer can re-check every claim offline.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::mu::EncodingVariant;

/// One failed equation, rendered. Left is what the encoding produced,
/// right is what the defining equation demands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub equation: String,
    pub left: String,
    pub right: String,
}

/// The outcome of exhaustively checking the defining equations of one
/// encoding session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub subject: String,
    pub variant: EncodingVariant,
    pub terms_checked: usize,
    pub pairs_checked: usize,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn new(
        subject: String,
        variant: EncodingVariant,
        terms_checked: usize,
        pairs_checked: usize,
        violations: Vec<Violation>,
    ) -> Self {
        VerificationReport {
            subject,
            variant,
            terms_checked,
            pairs_checked,
            violations,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Serialize to the canonical byte form: compact JSON with map keys in
/// sorted order (all map-shaped data in this crate lives in `BTreeMap`s)
/// and all exact numbers rendered as decimal strings.
pub fn canonical_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    serde_json::to_vec(value).expect("report types serialize infallibly")
}

/// Hex SHA-256 of a canonical byte form.
pub fn digest_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    let mut hex = String::with_capacity(out.len() * 2);
    for b in out {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

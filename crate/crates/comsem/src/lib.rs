//! Compositional encodings for arbitrary finite languages, and exact
//! deciders for class-restricted ("systematic") compositionality.
//!
//! The library has two halves that meet in a shared evidence format.
//!
//! The first half ([`mu`]) builds, for *any* finite set of expressions with
//! *any* meaning assignment, a semantics that is compositional by
//! construction: each expression `s` is sent to a function `μ(s)` that maps
//! the expression itself (or a reserved `$` marker, in the variant) back to
//! its assigned meaning, and maps `μ(t)` to `μ(s.t)` for every composable
//! partner `t`. Concatenation of expressions is then realized by function
//! application, whatever the meanings are. [`mu::verify_homomorphism`]
//! checks every defining equation exhaustively; [`mu::materialize_table`]
//! and [`mu::enumerate_table`] expose the graph of each `μ(s)` as data,
//! eagerly or one entry at a time over infinite term streams.
//!
//! The second half ([`systematicity`]) asks the sharper question: can
//! composition be implemented by a *fixed function from a restricted
//! class* — a bivariate polynomial over exact rationals, or any function at
//! all of chosen Boolean projections? Fitting runs over exact arithmetic
//! and returns replayable evidence either way: a fitted function, an
//! inconsistency witness (two samples with equal arguments and different
//! targets), or an infeasibility witness (a minimal sample subset whose
//! interpolation conditions contradict). [`grammars`] supplies the worked
//! languages these questions are interesting for: left- and right-spine
//! positional numerals and a small coordination language with a "natural"
//! and a deliberately "twisted" reading.
//!
//! [`bundle`] packages either kind of run into a canonical, byte-stable
//! [`bundle::ReportBundle`] that records the input digest and replays
//! offline; [`files`] defines the on-disk spec and sample formats;
//! [`random`] drives seeded high-volume verification batches.
//!
//! # Example
//!
//! ```
//! use comsem::meaning::MeaningValue;
//! use comsem::mu::{encode, verify_homomorphism, ApplyArg, Applied, EncodingVariant};
//! use comsem::term::{Atom, LanguageFragment, Term};
//!
//! // A two-expression language: "ab" decomposes as a.b and means 3.
//! let a = Term::leaf(Atom::new("a")?);
//! let b = Term::leaf(Atom::new("b")?);
//! let fragment = LanguageFragment::builder()
//!     .atom(Atom::new("a")?)
//!     .atom(Atom::new("b")?)
//!     .pair(&a, &b)?
//!     .build();
//! let assignment = comsem::meaning::MeaningAssignment::new()
//!     .with(a.clone(), MeaningValue::int(1))
//!     .with(b.clone(), MeaningValue::int(2))
//!     .with(Term::node(a.clone(), b.clone()), MeaningValue::int(3));
//!
//! let session = encode(fragment, assignment, EncodingVariant::Plain)?;
//! assert!(verify_homomorphism(&session).passed());
//!
//! // μ(a) applied to μ(b) is μ(a.b), whose base pair recovers m(a.b).
//! let mu_ab = session.mu(&a)?.apply(&ApplyArg::Mu(session.mu(&b)?))?;
//! if let Applied::Mu(f) = mu_ab {
//!     let ab = Term::node(a, b);
//!     assert_eq!(
//!         f.apply(&ApplyArg::Raw(ab))?,
//!         Applied::Meaning(MeaningValue::int(3)),
//!     );
//! }
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod bundle;
pub mod files;
pub mod grammars;
pub mod linalg;
pub mod meaning;
pub mod mu;
pub mod random;
pub mod report;
pub mod systematicity;
pub mod term;

pub use bundle::{
    deserialize_bundle, make_bundle, replay_bundle, serialize_bundle, BundleItem, JobInput,
    JobSpec, ReportBundle,
};
pub use files::{LanguageSpec, SamplesFile};
pub use meaning::{MeaningAssignment, MeaningValue};
pub use mu::{encode, verify_homomorphism, EncodingSession, EncodingVariant};
pub use report::VerificationReport;
pub use systematicity::{
    check_functional_dependence, fit_polynomial, fit_polynomial_with_budget,
    refute_polynomial_all_degrees, verify_certificate, Certificate, FitOutcome, FittedFunction,
    FunctionClass, SamplePoint,
};
pub use term::{Atom, LanguageFragment, Term};

//! Deciding class-restricted compositionality.
//!
//! Unrestricted encodings exist for any meaning assignment, so the
//! interesting question is whether the meaning of a whole can be a function
//! *from a restricted class* of the meanings of its parts. This module
//! decides that question for two classes — bivariate polynomials of bounded
//! total degree over exact rationals, and arbitrary Boolean functions of
//! projected arguments — and always hands back evidence: a fitted function
//! that reproduces every sample, or a replayable refutation witness.
//!
//! All arithmetic is exact; there are no tolerances anywhere.

use std::fmt;

use num::{BigRational, One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::grammars::{dn_refutation_samples, nd_control_samples, NumeralGrammar};
use crate::linalg::{Eliminator, Solution};
use crate::meaning::MeaningValue;

/// The function classes a semantics can be restricted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionClass {
    /// Bivariate polynomials `p(x, y)` of bounded total degree with exact
    /// rational coefficients.
    PolyTwoVar { max_degree: usize },
    /// Any function at all of the projected Boolean arguments; fitting
    /// means functional dependence, nothing more.
    BoolFunOfProjections { arity: usize },
}

/// One observation: the parts' meanings and the whole's meaning.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub args: Vec<MeaningValue>,
    pub target: MeaningValue,
    /// Where the observation came from (a numeral, a truth assignment).
    /// Carried through into witnesses; not semantically load-bearing.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<String>,
}

impl fmt::Display for SamplePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ") -> {}", self.target)?;
        if let Some(label) = &self.label {
            write!(f, " [{label}]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FitError {
    #[error("no samples given")]
    NoSamples,
    #[error("sample {index} has {got} argument(s), expected {want}")]
    Arity {
        index: usize,
        got: usize,
        want: usize,
    },
    #[error("sample {index} is not rational-valued in position {position}")]
    NotRational { index: usize, position: usize },
    #[error("sample {index} is not Boolean-valued in position {position}")]
    NotBoolean { index: usize, position: usize },
    #[error("budget {budget} exceeds the {available} available samples")]
    BudgetTooLarge { budget: usize, available: usize },
    #[error("checked degree {0} outside the supported range 1..=8")]
    DegreeOutOfRange(usize),
    #[error("refutation grid for degree {0} is underdetermined; grid construction is broken")]
    GridUnderdetermined(usize),
}

// ---------------------------------------------------------------------------
// The bivariate polynomial class
// ---------------------------------------------------------------------------

/// Exponent pairs `(i, j)` with `i + j <= degree`, graded lexicographic with
/// `x` before `y` and the highest total degree first. Degree 1 gives
/// `[x, y, 1]`, so a fitted affine function reads off as
/// `(x-coefficient, y-coefficient, constant)`.
pub fn monomial_basis(degree: usize) -> Vec<(u32, u32)> {
    let mut basis = Vec::new();
    for total in (0..=degree as u32).rev() {
        for i in (0..=total).rev() {
            basis.push((i, total - i));
        }
    }
    basis
}

fn monomial_row(x: &BigRational, y: &BigRational, degree: usize) -> Vec<BigRational> {
    let mut x_pows = vec![BigRational::one()];
    let mut y_pows = vec![BigRational::one()];
    for k in 1..=degree {
        x_pows.push(&x_pows[k - 1] * x);
        y_pows.push(&y_pows[k - 1] * y);
    }
    monomial_basis(degree)
        .into_iter()
        .map(|(i, j)| &x_pows[i as usize] * &y_pows[j as usize])
        .collect()
}

/// Evaluate a polynomial given as dense coefficients over
/// [`monomial_basis`]`(degree)`.
pub fn eval_poly2(
    coefficients: &[BigRational],
    degree: usize,
    x: &BigRational,
    y: &BigRational,
) -> BigRational {
    let row = monomial_row(x, y, degree);
    assert_eq!(coefficients.len(), row.len(), "coefficient count mismatch");
    coefficients
        .iter()
        .zip(row)
        .map(|(c, m)| c * m)
        .fold(BigRational::zero(), |acc, t| acc + t)
}

/// A fitted member of a function class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FittedFunction {
    Polynomial {
        degree: usize,
        #[serde(with = "crate::meaning::rational_pairs")]
        coefficients: Vec<BigRational>,
    },
    TruthTable {
        arity: usize,
        rows: Vec<TruthRow>,
    },
}

impl FittedFunction {
    /// For polynomials: whether every coefficient is a natural number, the
    /// ring the intended numeral semantics actually lives in. Rational or
    /// negative coefficients still fit, but land outside that model.
    /// Truth tables have no notion of naturality.
    pub fn natural_coefficients(&self) -> Option<bool> {
        match self {
            FittedFunction::Polynomial { coefficients, .. } => Some(
                coefficients
                    .iter()
                    .all(|c| c.denom().is_one() && c.numer().sign() != num::bigint::Sign::Minus),
            ),
            FittedFunction::TruthTable { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthRow {
    pub args: Vec<bool>,
    pub value: bool,
}

impl fmt::Display for FittedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FittedFunction::Polynomial {
                degree,
                coefficients,
            } => {
                let mut wrote = false;
                for ((i, j), c) in monomial_basis(*degree).into_iter().zip(coefficients) {
                    if c.is_zero() {
                        continue;
                    }
                    if wrote {
                        write!(f, " + ")?;
                    }
                    let mono = match (i, j) {
                        (0, 0) => String::new(),
                        _ => {
                            let xs = match i {
                                0 => String::new(),
                                1 => "x".into(),
                                _ => format!("x^{i}"),
                            };
                            let ys = match j {
                                0 => String::new(),
                                1 => "y".into(),
                                _ => format!("y^{j}"),
                            };
                            match (xs.is_empty(), ys.is_empty()) {
                                (false, false) => format!("{xs}*{ys}"),
                                (false, true) => xs,
                                (true, false) => ys,
                                (true, true) => unreachable!(),
                            }
                        }
                    };
                    let c_str = if c.denom().is_one() {
                        c.numer().to_string()
                    } else {
                        format!("{}/{}", c.numer(), c.denom())
                    };
                    if mono.is_empty() {
                        write!(f, "{c_str}")?;
                    } else if c.is_one() {
                        write!(f, "{mono}")?;
                    } else {
                        write!(f, "{c_str}*{mono}")?;
                    }
                    wrote = true;
                }
                if !wrote {
                    write!(f, "0")?;
                }
                Ok(())
            }
            FittedFunction::TruthTable { arity, rows } => {
                write!(f, "truth table on {arity} argument(s): ")?;
                for (i, row) in rows.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    let args: Vec<String> =
                        row.args.iter().map(|b| u8::from(*b).to_string()).collect();
                    write!(f, "({}) -> {}", args.join(","), u8::from(row.value))?;
                }
                Ok(())
            }
        }
    }
}

/// The evidence a decision returns. Every variant replays through
/// [`verify_certificate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// A class member reproducing every target exactly.
    Fitted { function: FittedFunction },
    /// Two samples with equal arguments and different targets: no function
    /// of the arguments fits, regardless of class.
    RefutedByInconsistency {
        first: SamplePoint,
        second: SamplePoint,
    },
    /// A sample subset whose interpolation constraints cannot be met at the
    /// recorded degree bound. When `held_out` is set, the witness
    /// constraints do determine one interpolant — which the held-out sample
    /// then violates.
    RefutedByInfeasibility {
        degree: usize,
        witness: Vec<SamplePoint>,
        held_out: Option<SamplePoint>,
    },
}

impl Certificate {
    pub fn is_fitted(&self) -> bool {
        matches!(self, Certificate::Fitted { .. })
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Fitted { function } => write!(f, "fitted: {function}"),
            Certificate::RefutedByInconsistency { first, second } => {
                write!(f, "refuted: {first} and {second} share arguments")
            }
            Certificate::RefutedByInfeasibility {
                degree,
                witness,
                held_out,
            } => match held_out {
                Some(h) => write!(
                    f,
                    "refuted at degree {degree}: the interpolant through {} witness sample(s) misses {h}",
                    witness.len()
                ),
                None => write!(
                    f,
                    "refuted at degree {degree}: {} sample(s) are jointly uninterpolable",
                    witness.len()
                ),
            },
        }
    }
}

/// A decision, or the report that the samples pin down nothing yet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
// Certificates dwarf the dimension report, but outcomes are produced once
// per run, never collected in bulk, so boxing would only add noise.
#[allow(clippy::large_enum_variant)]
pub enum FitOutcome {
    Decided(Certificate),
    /// The constraints are satisfiable but leave `free_dimension` coefficient
    /// directions open; no representative is picked.
    Underdetermined { free_dimension: usize },
}

impl FitOutcome {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            FitOutcome::Decided(c) => Some(c),
            FitOutcome::Underdetermined { .. } => None,
        }
    }
}

fn sample_xy(sample: &SamplePoint, index: usize) -> Result<(BigRational, BigRational), FitError> {
    if sample.args.len() != 2 {
        return Err(FitError::Arity {
            index,
            got: sample.args.len(),
            want: 2,
        });
    }
    let x = sample.args[0]
        .as_rational()
        .ok_or(FitError::NotRational { index, position: 0 })?;
    let y = sample.args[1]
        .as_rational()
        .ok_or(FitError::NotRational { index, position: 1 })?;
    Ok((x, y))
}

fn sample_target(sample: &SamplePoint, index: usize) -> Result<BigRational, FitError> {
    sample.target.as_rational().ok_or(FitError::NotRational {
        index,
        position: sample.args.len(),
    })
}

/// Fit a bivariate polynomial of total degree at most `max_degree` through
/// every sample, by exact elimination over the monomial basis. Returns the
/// unique fitted polynomial, a replayable infeasibility witness, or an
/// under-determination report when many polynomials fit.
pub fn fit_polynomial(samples: &[SamplePoint], max_degree: usize) -> Result<FitOutcome, FitError> {
    if samples.is_empty() {
        return Err(FitError::NoSamples);
    }
    let basis_len = monomial_basis(max_degree).len();
    let mut elim = Eliminator::new(basis_len);
    for (index, sample) in samples.iter().enumerate() {
        let (x, y) = sample_xy(sample, index)?;
        let target = sample_target(sample, index)?;
        elim.add_row(&monomial_row(&x, &y, max_degree), &target);
    }
    Ok(match elim.solve() {
        Solution::Unique(coefficients) => FitOutcome::Decided(Certificate::Fitted {
            function: FittedFunction::Polynomial {
                degree: max_degree,
                coefficients,
            },
        }),
        Solution::Underdetermined { free_dimension, .. } => {
            FitOutcome::Underdetermined { free_dimension }
        }
        Solution::Infeasible { witness_rows } => {
            FitOutcome::Decided(Certificate::RefutedByInfeasibility {
                degree: max_degree,
                witness: witness_rows.iter().map(|&i| samples[i].clone()).collect(),
                held_out: None,
            })
        }
    })
}

/// Fit using only `point_budget` samples: scan in input order, keeping each
/// sample whose constraint is independent of those already kept (and, once
/// nothing independent remains, the earliest leftovers up to the budget).
/// If the kept constraints determine a unique interpolant, check it against
/// every sample; the first miss becomes the held-out refutation witness.
pub fn fit_polynomial_with_budget(
    samples: &[SamplePoint],
    max_degree: usize,
    point_budget: usize,
) -> Result<FitOutcome, FitError> {
    if samples.is_empty() {
        return Err(FitError::NoSamples);
    }
    if point_budget > samples.len() {
        return Err(FitError::BudgetTooLarge {
            budget: point_budget,
            available: samples.len(),
        });
    }
    let basis_len = monomial_basis(max_degree).len();
    let rows: Vec<(Vec<BigRational>, BigRational)> = samples
        .iter()
        .enumerate()
        .map(|(index, sample)| {
            let (x, y) = sample_xy(sample, index)?;
            let target = sample_target(sample, index)?;
            Ok((monomial_row(&x, &y, max_degree), target))
        })
        .collect::<Result<_, FitError>>()?;

    // Greedy deterministic selection on the coefficient matrix alone.
    let mut probe = Eliminator::new(basis_len);
    let zero = BigRational::zero();
    let mut chosen: Vec<usize> = Vec::new();
    for (i, (coeffs, _)) in rows.iter().enumerate() {
        if chosen.len() == point_budget {
            break;
        }
        if probe.add_row(coeffs, &zero) {
            chosen.push(i);
        }
    }
    let mut next = 0;
    while chosen.len() < point_budget {
        if !chosen.contains(&next) {
            chosen.push(next);
        }
        next += 1;
    }
    chosen.sort_unstable();

    let mut elim = Eliminator::new(basis_len);
    for &i in &chosen {
        elim.add_row(&rows[i].0, &rows[i].1);
    }
    let witness = |chosen: &[usize]| -> Vec<SamplePoint> {
        chosen.iter().map(|&i| samples[i].clone()).collect()
    };
    Ok(match elim.solve() {
        Solution::Underdetermined { free_dimension, .. } => {
            FitOutcome::Underdetermined { free_dimension }
        }
        Solution::Infeasible { witness_rows } => {
            let witness = witness_rows.iter().map(|&i| samples[chosen[i]].clone()).collect();
            FitOutcome::Decided(Certificate::RefutedByInfeasibility {
                degree: max_degree,
                witness,
                held_out: None,
            })
        }
        Solution::Unique(coefficients) => {
            let miss = samples.iter().enumerate().find(|(index, sample)| {
                let (x, y) = sample_xy(sample, *index).expect("validated above");
                let target = sample_target(sample, *index).expect("validated above");
                eval_poly2(&coefficients, max_degree, &x, &y) != target
            });
            match miss {
                Some((_, held_out)) => {
                    FitOutcome::Decided(Certificate::RefutedByInfeasibility {
                        degree: max_degree,
                        witness: witness(&chosen),
                        held_out: Some(held_out.clone()),
                    })
                }
                None => FitOutcome::Decided(Certificate::Fitted {
                    function: FittedFunction::Polynomial {
                        degree: max_degree,
                        coefficients,
                    },
                }),
            }
        }
    })
}

// ---------------------------------------------------------------------------
// Functional dependence over Boolean projections
// ---------------------------------------------------------------------------

fn sample_bools(sample: &SamplePoint, index: usize) -> Result<(Vec<bool>, bool), FitError> {
    let args = sample
        .args
        .iter()
        .enumerate()
        .map(|(position, v)| v.as_bool().ok_or(FitError::NotBoolean { index, position }))
        .collect::<Result<Vec<bool>, _>>()?;
    let target = sample.target.as_bool().ok_or(FitError::NotBoolean {
        index,
        position: sample.args.len(),
    })?;
    Ok((args, target))
}

/// Decide whether the targets are any function at all of the argument
/// tuples. Fits a truth table over the observed tuples, or returns the
/// first clashing pair — presented with the true-target sample first.
pub fn check_functional_dependence(samples: &[SamplePoint]) -> Result<Certificate, FitError> {
    if samples.is_empty() {
        return Err(FitError::NoSamples);
    }
    let arity = samples[0].args.len();
    let mut observed: std::collections::BTreeMap<Vec<bool>, (usize, bool)> =
        std::collections::BTreeMap::new();
    for (index, sample) in samples.iter().enumerate() {
        let (args, target) = sample_bools(sample, index)?;
        if args.len() != arity {
            return Err(FitError::Arity {
                index,
                got: args.len(),
                want: arity,
            });
        }
        match observed.get(&args) {
            None => {
                observed.insert(args, (index, target));
            }
            Some(&(prior_index, prior_target)) => {
                if prior_target != target {
                    let (true_idx, false_idx) = if target {
                        (index, prior_index)
                    } else {
                        (prior_index, index)
                    };
                    return Ok(Certificate::RefutedByInconsistency {
                        first: samples[true_idx].clone(),
                        second: samples[false_idx].clone(),
                    });
                }
            }
        }
    }
    let rows = observed
        .into_iter()
        .map(|(args, (_, value))| TruthRow { args, value })
        .collect();
    Ok(Certificate::Fitted {
        function: FittedFunction::TruthTable { arity, rows },
    })
}

// ---------------------------------------------------------------------------
// Degree-by-degree refutation for the right-spine numeral semantics
// ---------------------------------------------------------------------------

/// One degree's decision from the refutation driver.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeCertificate {
    pub degree: usize,
    pub certificate: Certificate,
}

/// The canonical sample grid each degree is decided against: tensor grids of
/// intended values under the chosen spine.
pub fn degree_sample_grid(grammar: NumeralGrammar, degree: usize) -> Vec<SamplePoint> {
    match grammar {
        NumeralGrammar::Dn => dn_refutation_samples(degree),
        NumeralGrammar::Nd => nd_control_samples(degree),
    }
}

fn refute_one_degree(grammar: NumeralGrammar, degree: usize) -> Result<DegreeCertificate, FitError> {
    let samples = degree_sample_grid(grammar, degree);
    match fit_polynomial(&samples, degree)? {
        FitOutcome::Decided(certificate) => Ok(DegreeCertificate {
            degree,
            certificate,
        }),
        FitOutcome::Underdetermined { .. } => Err(FitError::GridUnderdetermined(degree)),
    }
}

/// Decide each degree `1..=max_checked_degree` against the grammar's
/// intended-value splits on the canonical sample grids: the right-spine
/// grammar refutes every degree, the left-spine control fits every degree.
pub fn refute_polynomial_all_degrees(
    grammar: NumeralGrammar,
    max_checked_degree: usize,
) -> Result<Vec<DegreeCertificate>, FitError> {
    if !(1..=8).contains(&max_checked_degree) {
        return Err(FitError::DegreeOutOfRange(max_checked_degree));
    }
    #[cfg(feature = "parallel")]
    {
        (1..=max_checked_degree)
            .into_par_iter()
            .map(|d| refute_one_degree(grammar, d))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        refute_polynomial_all_degrees_seq(grammar, max_checked_degree)
    }
}

/// Sequential [`refute_polynomial_all_degrees`], kept callable for
/// comparison.
pub fn refute_polynomial_all_degrees_seq(
    grammar: NumeralGrammar,
    max_checked_degree: usize,
) -> Result<Vec<DegreeCertificate>, FitError> {
    if !(1..=8).contains(&max_checked_degree) {
        return Err(FitError::DegreeOutOfRange(max_checked_degree));
    }
    (1..=max_checked_degree)
        .map(|d| refute_one_degree(grammar, d))
        .collect()
}

// ---------------------------------------------------------------------------
// Certificate replay
// ---------------------------------------------------------------------------

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("certificate references a sample not in the sample set: {0}")]
    UnknownSample(String),
    #[error("samples do not match the certificate's class: {0}")]
    BadSamples(#[from] FitError),
}

fn contains_sample(samples: &[SamplePoint], wanted: &SamplePoint) -> bool {
    samples.iter().any(|s| s == wanted)
}

/// Replay a certificate against the samples it was produced for: re-check
/// the fitted function on every sample, or re-derive the refutation from
/// the witness alone. Returns whether the evidence still holds; tampered
/// evidence yields `false`, evidence about different samples an error.
pub fn verify_certificate(
    certificate: &Certificate,
    samples: &[SamplePoint],
) -> Result<bool, VerifyError> {
    match certificate {
        Certificate::Fitted {
            function:
                FittedFunction::Polynomial {
                    degree,
                    coefficients,
                },
        } => {
            if coefficients.len() != monomial_basis(*degree).len() {
                return Ok(false);
            }
            for (index, sample) in samples.iter().enumerate() {
                let (x, y) = sample_xy(sample, index)?;
                let target = sample_target(sample, index)?;
                if eval_poly2(coefficients, *degree, &x, &y) != target {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Certificate::Fitted {
            function: FittedFunction::TruthTable { arity, rows },
        } => {
            let mut table = std::collections::BTreeMap::new();
            for row in rows {
                if row.args.len() != *arity {
                    return Ok(false);
                }
                if table.insert(row.args.clone(), row.value) == Some(!row.value) {
                    return Ok(false); // contradictory table
                }
            }
            for (index, sample) in samples.iter().enumerate() {
                let (args, target) = sample_bools(sample, index)?;
                if table.get(&args) != Some(&target) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Certificate::RefutedByInconsistency { first, second } => {
            for point in [first, second] {
                if !contains_sample(samples, point) {
                    return Err(VerifyError::UnknownSample(point.to_string()));
                }
            }
            Ok(first.args == second.args && first.target != second.target)
        }
        Certificate::RefutedByInfeasibility {
            degree,
            witness,
            held_out,
        } => {
            for point in witness.iter().chain(held_out.as_ref()) {
                if !contains_sample(samples, point) {
                    return Err(VerifyError::UnknownSample(point.to_string()));
                }
            }
            let basis_len = monomial_basis(*degree).len();
            let mut elim = Eliminator::new(basis_len);
            for (index, sample) in witness.iter().enumerate() {
                let (x, y) = sample_xy(sample, index)?;
                let target = sample_target(sample, index)?;
                elim.add_row(&monomial_row(&x, &y, *degree), &target);
            }
            match (elim.solve(), held_out) {
                (Solution::Infeasible { .. }, None) => Ok(true),
                (Solution::Unique(coefficients), Some(h)) => {
                    let (x, y) = sample_xy(h, 0)?;
                    let target = sample_target(h, 0)?;
                    Ok(eval_poly2(&coefficients, *degree, &x, &y) != target)
                }
                _ => Ok(false),
            }
        }
    }
}

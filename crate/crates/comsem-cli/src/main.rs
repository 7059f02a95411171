//! Command-line driver.
//!
//! `encode` builds the compositional encoding of a language spec and checks
//! every defining equation; `fit` decides whether a restricted function
//! class realizes a sample set; `refute-dn` decides per-degree polynomial
//! composition for positional numerals; `enumerate` prints single equation
//! table entries; `replay` re-checks a previously written bundle.
//!
//! Exit codes: 0 = pass/fitted, 1 = failed/refuted/out-of-range,
//! 2 = invalid input, 3 = I/O or resource limit.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};

use comsem::bundle::{
    deserialize_bundle, make_bundle, replay_bundle, serialize_bundle, BundleItem, JobInput,
    JobSpec, ReplayError, ReportBundle, RunError,
};
use comsem::files::{FileError, LanguageSpec, SamplesFile};
use comsem::grammars::{IntendedNumeralMeanings, NumeralGrammar, NumeralStream};
use comsem::mu::{
    enumerate_table, BaseKey, EncodingVariant, EnumerateError, MuRow, MuTable, TableEntry,
};
use comsem::report::{canonical_bytes, VerificationReport};
use comsem::systematicity::{
    degree_sample_grid, verify_certificate, Certificate, FitError, FitOutcome, FunctionClass,
};

#[derive(Parser)]
#[command(name = "comsem", version, about = "Compositional encodings and systematicity checks")]
struct Cli {
    /// Output style on standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Also write the machine-readable output to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Plain,
    Dollar,
}

impl From<VariantArg> for EncodingVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Plain => EncodingVariant::Plain,
            VariantArg::Dollar => EncodingVariant::Dollar,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GrammarArg {
    /// Left-spine numerals: "472" parses as ((4.7).2).
    Nd,
    /// Right-spine numerals: "472" parses as (4.(7.2)).
    Dn,
}

impl From<GrammarArg> for NumeralGrammar {
    fn from(g: GrammarArg) -> Self {
        match g {
            GrammarArg::Nd => NumeralGrammar::Nd,
            GrammarArg::Dn => NumeralGrammar::Dn,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    /// Bivariate polynomials over exact rationals.
    Poly2,
    /// Arbitrary Boolean functions of the sample arguments.
    Boolfun,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a language spec and verify every defining equation.
    Encode {
        /// Path to a language spec file.
        spec: PathBuf,
        /// Override the spec's encoding variant.
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        /// Materialize the full equation table into the bundle.
        #[arg(long)]
        table: bool,
    },
    /// Fit a restricted function class to a sample file.
    Fit {
        /// Path to a samples file.
        samples: PathBuf,
        /// Function class; defaults to the one recorded in the file.
        #[arg(long, value_enum)]
        class: Option<ClassArg>,
        /// Maximum polynomial degree (poly2 only).
        #[arg(long)]
        degree: Option<usize>,
        /// Fit from only this many deterministically chosen samples.
        #[arg(long)]
        budget: Option<usize>,
        /// Argument count (boolfun only); defaults to the samples' arity.
        #[arg(long)]
        arity: Option<usize>,
    },
    /// Decide polynomial composition per degree over a numeral grammar.
    #[command(name = "refute-dn")]
    RefuteDn {
        /// Check every degree from 1 up to this bound (at most 8).
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
        /// Which spine to sample; `nd` is the always-fitting control.
        #[arg(long, value_enum, default_value_t = GrammarArg::Dn)]
        grammar: GrammarArg,
    },
    /// Print one entry of an encoding's equation table.
    Enumerate {
        #[command(flatten)]
        source: EnumerateSource,
        /// Which expression's equation to read (enumeration order).
        #[arg(long)]
        row: usize,
        /// Which value pair of that equation; 0 is the base pair.
        #[arg(long)]
        pair: usize,
        /// Encoding variant (defaults to the spec's, or plain for streams).
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
    },
    /// Re-run a bundle's job and confirm its recorded results reproduce.
    Replay {
        /// Path to a bundle written by encode, fit, or refute-dn.
        bundle: PathBuf,
        /// The language spec the bundle was produced from.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// The samples file the bundle was produced from.
        #[arg(long)]
        samples: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct EnumerateSource {
    /// Path to a language spec file.
    spec: Option<PathBuf>,
    /// A built-in infinite term stream: numerals under either spine.
    #[arg(long, value_enum)]
    stream: Option<GrammarArg>,
}

/// A command's result: what to print, what to write, how to exit.
struct Outcome {
    exit: u8,
    human: String,
    machine: Vec<u8>,
}

/// A failure with a definite exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn invalid(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: 2,
            error: error.into(),
        }
    }

    fn io(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: 3,
            error: error.into(),
        }
    }
}

/// File problems split by kind: unreadable files are I/O failures, files
/// that read but don't parse are invalid input.
fn file_failure(e: FileError) -> Failure {
    match e {
        FileError::Io { .. } => Failure::io(e),
        _ => Failure::invalid(e),
    }
}

fn run_failure(e: RunError) -> Failure {
    match e {
        RunError::File(inner) => file_failure(inner),
        other => Failure::invalid(other),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (format, out) = (cli.format, cli.out.clone());
    match dispatch(cli.command) {
        Ok(outcome) => {
            if let Some(path) = out {
                if let Err(e) = std::fs::write(&path, &outcome.machine) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(3);
                }
            }
            match format {
                Format::Human => println!("{}", outcome.human),
                Format::Machine => {
                    println!("{}", String::from_utf8_lossy(&outcome.machine))
                }
            }
            ExitCode::from(outcome.exit)
        }
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}

fn dispatch(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Encode {
            spec,
            variant,
            table,
        } => cmd_encode(&spec, variant, table),
        Command::Fit {
            samples,
            class,
            degree,
            budget,
            arity,
        } => cmd_fit(&samples, class, degree, budget, arity),
        Command::RefuteDn {
            max_degree,
            grammar,
        } => cmd_refute_dn(max_degree, grammar.into()),
        Command::Enumerate {
            source,
            row,
            pair,
            variant,
        } => cmd_enumerate(source, row, pair, variant),
        Command::Replay {
            bundle,
            spec,
            samples,
        } => cmd_replay(&bundle, spec.as_deref(), samples.as_deref()),
    }
}

fn cmd_encode(
    path: &std::path::Path,
    variant: Option<VariantArg>,
    table: bool,
) -> Result<Outcome, Failure> {
    let spec = LanguageSpec::load(path).map_err(file_failure)?;
    let variant = variant.map(EncodingVariant::from).unwrap_or(spec.variant);
    let job = JobSpec::Encode {
        variant,
        with_table: table,
    };
    let bundle = make_bundle(job, JobInput::Language(&spec)).map_err(run_failure)?;
    let mut human = String::new();
    for item in &bundle.items {
        match item {
            BundleItem::Report(report) => human.push_str(&render_report(report)),
            BundleItem::Table(table) => human.push_str(&render_table(table)),
            _ => {}
        }
    }
    Ok(Outcome {
        exit: if bundle.all_passed() { 0 } else { 1 },
        human,
        machine: serialize_bundle(&bundle),
    })
}

fn effective_class(
    file: &SamplesFile,
    class: Option<ClassArg>,
    degree: Option<usize>,
    arity: Option<usize>,
) -> Result<FunctionClass, Failure> {
    let chosen = match (class, &file.class) {
        (Some(ClassArg::Poly2), _) => {
            let file_degree = match file.class {
                Some(FunctionClass::PolyTwoVar { max_degree }) => Some(max_degree),
                _ => None,
            };
            FunctionClass::PolyTwoVar {
                max_degree: degree.or(file_degree).ok_or_else(|| {
                    Failure::invalid(anyhow!("--class poly2 needs --degree (none in the file)"))
                })?,
            }
        }
        (Some(ClassArg::Boolfun), _) => {
            let file_arity = match file.class {
                Some(FunctionClass::BoolFunOfProjections { arity }) => Some(arity),
                _ => None,
            };
            let fallback = file.samples.first().map(|s| s.args.len());
            FunctionClass::BoolFunOfProjections {
                arity: arity.or(file_arity).or(fallback).ok_or_else(|| {
                    Failure::invalid(anyhow!("--class boolfun needs --arity or nonempty samples"))
                })?,
            }
        }
        (None, Some(from_file)) => {
            let mut class = *from_file;
            if let (FunctionClass::PolyTwoVar { max_degree }, Some(d)) = (&mut class, degree) {
                *max_degree = d;
            }
            class
        }
        (None, None) => {
            return Err(Failure::invalid(anyhow!(
                "no function class: pass --class or record one in the samples file"
            )))
        }
    };
    Ok(chosen)
}

fn cmd_fit(
    path: &std::path::Path,
    class: Option<ClassArg>,
    degree: Option<usize>,
    budget: Option<usize>,
    arity: Option<usize>,
) -> Result<Outcome, Failure> {
    let file = SamplesFile::load(path).map_err(file_failure)?;
    let class = effective_class(&file, class, degree, arity)?;
    if budget.is_some() && matches!(class, FunctionClass::BoolFunOfProjections { .. }) {
        return Err(Failure::invalid(anyhow!(
            "--budget applies to the poly2 class only"
        )));
    }
    let job = JobSpec::Fit { class, budget };
    let bundle = make_bundle(job, JobInput::Samples(&file)).map_err(run_failure)?;
    let outcome = bundle.items.iter().find_map(|item| match item {
        BundleItem::Outcome(o) => Some(o),
        _ => None,
    });
    let (exit, human) = match outcome {
        Some(FitOutcome::Decided(cert)) => {
            let mut line = format!("{} samples: {cert}", file.samples.len());
            if let Certificate::Fitted { function } = cert {
                match function.natural_coefficients() {
                    Some(true) => line.push_str(" (coefficients are natural numbers)"),
                    Some(false) => line.push_str(" (coefficients leave the naturals)"),
                    None => {}
                }
            }
            (if cert.is_fitted() { 0 } else { 1 }, line)
        }
        Some(FitOutcome::Underdetermined { free_dimension }) => (
            0,
            format!(
                "{} samples: under-determined, solution space has dimension {free_dimension}",
                file.samples.len()
            ),
        ),
        None => (2, "no outcome produced".into()),
    };
    Ok(Outcome {
        exit,
        human,
        machine: serialize_bundle(&bundle),
    })
}

fn cmd_refute_dn(max_degree: usize, grammar: NumeralGrammar) -> Result<Outcome, Failure> {
    if max_degree == 0 {
        return Err(Failure::invalid(anyhow!("--max-degree must be at least 1")));
    }
    let job = JobSpec::RefuteDn {
        grammar,
        max_degree,
    };
    let bundle = match make_bundle(job, JobInput::None) {
        Ok(b) => b,
        // The per-degree grids grow cubically; degrees past the cap are a
        // resource refusal, not a usage error.
        Err(RunError::Fit(e @ FitError::DegreeOutOfRange(_))) => return Err(Failure::io(e)),
        Err(other) => return Err(run_failure(other)),
    };
    let mut human = String::new();
    let mut all_refuted_and_replaying = true;
    for item in &bundle.items {
        let BundleItem::Degree(dc) = item else {
            continue;
        };
        let samples = degree_sample_grid(grammar, dc.degree);
        let replays = verify_certificate(&dc.certificate, &samples).unwrap_or(false);
        let refuted = !dc.certificate.is_fitted();
        all_refuted_and_replaying &= refuted && replays;
        human.push_str(&format!(
            "degree {}: {} [{}]\n",
            dc.degree,
            dc.certificate,
            if replays { "replays" } else { "DOES NOT REPLAY" },
        ));
    }
    human.push_str(if all_refuted_and_replaying {
        "all degrees refuted"
    } else {
        "not refuted at every degree"
    });
    Ok(Outcome {
        exit: if all_refuted_and_replaying { 0 } else { 1 },
        human,
        machine: serialize_bundle(&bundle),
    })
}

fn cmd_enumerate(
    source: EnumerateSource,
    row: usize,
    pair: usize,
    variant: Option<VariantArg>,
) -> Result<Outcome, Failure> {
    let entry = match (&source.spec, source.stream) {
        (Some(path), None) => {
            let spec = LanguageSpec::load(path).map_err(file_failure)?;
            let variant = variant.map(EncodingVariant::from).unwrap_or(spec.variant);
            let fragment = spec.to_fragment().map_err(file_failure)?;
            enumerate_table(&fragment, &spec.assignment(), variant, row, pair)
        }
        (None, Some(grammar)) => {
            let stream = NumeralStream {
                grammar: grammar.into(),
            };
            let variant = variant
                .map(EncodingVariant::from)
                .unwrap_or(EncodingVariant::Plain);
            enumerate_table(&stream, &IntendedNumeralMeanings, variant, row, pair)
        }
        // clap's group makes the source exactly one of the two.
        _ => unreachable!("argument group enforces one source"),
    };
    let entry = match entry {
        Ok(entry) => entry,
        Err(e @ EnumerateError::OutOfRange { .. }) => {
            return Ok(Outcome {
                exit: 1,
                human: format!("out of range: {e}"),
                machine: canonical_bytes(&serde_json::json!({ "error": e.to_string() })),
            })
        }
        Err(e) => return Err(Failure::invalid(e)),
    };
    Ok(Outcome {
        exit: 0,
        human: render_entry(&entry),
        machine: canonical_bytes(&entry),
    })
}

fn cmd_replay(
    bundle_path: &std::path::Path,
    spec: Option<&std::path::Path>,
    samples: Option<&std::path::Path>,
) -> Result<Outcome, Failure> {
    let bytes = std::fs::read(bundle_path).map_err(|e| {
        Failure::io(anyhow!("cannot read {}: {e}", bundle_path.display()))
    })?;
    let bundle: ReportBundle = deserialize_bundle(&bytes).map_err(Failure::invalid)?;
    let loaded_spec = spec.map(LanguageSpec::load).transpose().map_err(file_failure)?;
    let loaded_samples = samples
        .map(SamplesFile::load)
        .transpose()
        .map_err(file_failure)?;
    let input = match (&loaded_spec, &loaded_samples) {
        (Some(_), Some(_)) => {
            return Err(Failure::invalid(anyhow!(
                "pass at most one of --spec and --samples"
            )))
        }
        (Some(s), None) => JobInput::Language(s),
        (None, Some(s)) => JobInput::Samples(s),
        (None, None) => JobInput::None,
    };
    let replayed = match replay_bundle(&bundle, input) {
        Ok(ok) => ok,
        Err(e @ ReplayError::DigestMismatch { .. }) => return Err(Failure::invalid(e)),
        Err(ReplayError::Run(e)) => return Err(run_failure(e)),
    };
    Ok(Outcome {
        exit: if replayed { 0 } else { 1 },
        human: if replayed {
            format!("replay OK: {} item(s) reproduce", bundle.items.len())
        } else {
            "replay FAILED: recorded results do not reproduce".into()
        },
        machine: canonical_bytes(&serde_json::json!({ "replayed": replayed })),
    })
}

fn render_report(report: &VerificationReport) -> String {
    let mut out = format!(
        "{}: {} [{} variant] — {} terms, {} pairs, {} violation(s)\n",
        if report.passed() { "PASS" } else { "FAIL" },
        report.subject,
        report.variant,
        report.terms_checked,
        report.pairs_checked,
        report.violations.len(),
    );
    for v in report.violations.iter().take(10) {
        out.push_str(&format!("  {}: {} != {}\n", v.equation, v.left, v.right));
    }
    if report.violations.len() > 10 {
        out.push_str(&format!("  … and {} more\n", report.violations.len() - 10));
    }
    out
}

fn render_row(row: &MuRow) -> String {
    let mut out = format!("mu({}):\n", row.subject);
    let key = match &row.base_key {
        BaseKey::Term(t) => t.to_string(),
        BaseKey::Marker => "$".into(),
    };
    out.push_str(&format!("  <{key}, {}>\n", row.base_value));
    for pair in &row.entries {
        out.push_str(&format!("  <mu({}), mu({})>\n", pair.arg, pair.result));
    }
    out
}

fn render_table(table: &MuTable) -> String {
    table.rows.iter().map(render_row).collect()
}

fn render_entry(entry: &TableEntry) -> String {
    match entry {
        TableEntry::Base {
            subject,
            key,
            meaning,
        } => {
            let key = match key {
                BaseKey::Term(t) => t.to_string(),
                BaseKey::Marker => "$".into(),
            };
            format!("mu({subject}): <{key}, {meaning}>")
        }
        TableEntry::Composition {
            subject,
            arg,
            result,
        } => format!("mu({subject}): <mu({arg}), mu({result})>"),
    }
}

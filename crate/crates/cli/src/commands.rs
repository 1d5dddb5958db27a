use std::fmt;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use bds_core::decomposition::{self, DecompositionResult, SyncReport};
use bds_core::enumerate::WalkOptions;
use bds_core::extender::{self, ExtenderVerdict, GrpReport};
use bds_core::language::{self, CountSeries, EntropyBracket, LanguageCounts};
use bds_core::periodic::{self, Certification, DiagnosticsReport, EmpiricalMeasure, FullSupportReport, PeriodicOrbit};
use bds_core::rational::{self, Rational};
use bds_core::shift::{self, CanonicalFunction};
use bds_core::{Error, ShiftSpec, ValidationReport, Word};
use serde::Serialize;

use crate::report::{emit_csv, emit_json, sha256_hex, write_file, Canonicalized, Envelope};
use crate::{config, ClassArg, Cli, Command, Format, GlobalOpts};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Done,
    InvalidSpec,
    BudgetExceeded,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Done => 0,
            Status::InvalidSpec => 2,
            Status::BudgetExceeded => 3,
        }
    }
}

/// Unusable shift spec or config; exits with status 2.
#[derive(Debug)]
pub struct InvalidInput(pub String);

impl fmt::Display for InvalidInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InvalidInput {}

pub fn exit_code_for(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<InvalidInput>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::NotCanonical(_)) => 2,
        Some(Error::BudgetExceeded { .. }) => 3,
        _ => 1,
    }
}

pub fn execute(cli: Cli) -> Result<Status> {
    if let Some(threads) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    dispatch(&cli.global, cli.command)
}

pub fn dispatch(global: &GlobalOpts, command: Command) -> Result<Status> {
    match command {
        Command::Validate(a) => validate(global, &a.spec),
        Command::Entropy(a) => entropy(global, &a),
        Command::Count(a) => count(global, &a),
        Command::Decompose(a) => decompose(global, &a),
        Command::PadG(a) => pad_g(global, &a),
        Command::SyncCheck(a) => sync_check(global, &a),
        Command::Periodic(a) => periodic_cmd(global, &a),
        Command::Mme(a) => mme(global, &a),
        Command::Certify(a) => certify(global, &a),
        Command::Extender(a) => extender_cmd(global, &a),
        Command::Canonicalize(a) => canonicalize(global, &a),
        Command::Contain(a) => contain(global, &a),
        Command::Run(a) => config::run(global, &a.config),
    }
}

struct Loaded {
    spec: ShiftSpec,
    sha: String,
}

fn load(path: &Path) -> Result<Loaded> {
    let text = fs::read_to_string(path).map_err(|e| InvalidInput(format!("reading {}: {e}", path.display())))?;
    let function = CanonicalFunction::from_json(&text).map_err(|e| InvalidInput(format!("{}: {e}", path.display())))?;
    let sha = sha256_hex(&function.to_json());
    let spec = ShiftSpec::new(function).map_err(|e| InvalidInput(format!("{}: {e}", path.display())))?;
    Ok(Loaded { spec, sha })
}

fn parse_word(spec: &ShiftSpec, text: &str) -> Result<Word> {
    let word: Word = text.parse().with_context(|| format!("parsing word {text:?}"))?;
    word.check_alphabet(spec.max_letter())?;
    Ok(word)
}

fn knobs<A: Serialize>(args: &A) -> serde_json::Value {
    serde_json::to_value(args).expect("argument structs serialize")
}

/// Loads the shift spec file and, when `canonical` is set, makes sure the shift in use
/// is canonical. Returns `None` after emitting a validation report if that
/// is impossible.
fn setup<A: Serialize>(
    global: &GlobalOpts,
    command: &'static str,
    args: &A,
    path: &Path,
    canonical: bool,
    min_len: usize,
) -> Result<Option<(ShiftSpec, Envelope)>> {
    let Loaded { spec, sha } = load(path)?;
    let mut envelope = Envelope {
        command,
        spec_sha256: sha,
        canonicalized: None,
        knobs: knobs(args),
        timestamp: global.timestamp,
    };
    if !canonical || spec.is_canonical() {
        return Ok(Some((spec, envelope)));
    }
    if global.strict {
        emit_json(global, &envelope.wrap(false, spec.validation()))?;
        eprintln!("error: {}", spec.validation().summary());
        return Ok(None);
    }
    let f = spec.function();
    let n_prime = global
        .canonical_len
        .unwrap_or_else(|| min_len.max(f.table_len() + f.tail_period()));
    let hat = shift::canonicalize(&spec, n_prime)?;
    let hat_sha = sha256_hex(&hat.to_json());
    let hat_spec = ShiftSpec::new(hat)?;
    if !hat_spec.is_canonical() {
        emit_json(global, &envelope.wrap(false, hat_spec.validation()))?;
        eprintln!("error: canonicalized function is {}", hat_spec.validation().summary());
        return Ok(None);
    }
    envelope.canonicalized = Some(Canonicalized {
        n_prime,
        spec_sha256: hat_sha,
        input_validation: spec.validation().clone(),
    });
    Ok(Some((hat_spec, envelope)))
}

macro_rules! setup_or_return {
    ($e:expr) => {
        match $e? {
            Some(pair) => pair,
            None => return Ok(Status::InvalidSpec),
        }
    };
}

#[derive(Serialize)]
struct ValidateResult<'a> {
    canonical: bool,
    summary: String,
    #[serde(with = "rational::serde_str")]
    alpha: Rational,
    max_letter: u8,
    trivial: bool,
    validation: &'a ValidationReport,
}

fn validate(global: &GlobalOpts, path: &Path) -> Result<Status> {
    #[derive(Serialize)]
    struct Knobs<'a> {
        spec: &'a Path,
    }
    let (spec, env) = setup_or_return!(setup(global, "validate", &Knobs { spec: path }, path, false, 0));
    let v = spec.validation();
    let result = ValidateResult {
        canonical: v.canonical,
        summary: v.summary(),
        alpha: spec.alpha(),
        max_letter: spec.max_letter(),
        trivial: spec.is_trivial(),
        validation: v,
    };
    emit_json(global, &env.wrap(false, result))?;
    Ok(if v.canonical { Status::Done } else { Status::InvalidSpec })
}

fn walk_options(budget: Option<usize>) -> WalkOptions {
    WalkOptions {
        budget: budget.map(|b| b as u64),
        ..WalkOptions::default()
    }
}

fn running_upper(series: &CountSeries) -> Vec<f64> {
    let mut best = f64::INFINITY;
    (1..=series.n_max())
        .map(|n| {
            if let Some(g) = series.growth(n) {
                best = best.min(g);
            }
            best
        })
        .collect()
}

#[derive(Serialize)]
struct EntropyResult {
    counts: LanguageCounts,
    bracket: EntropyBracket,
}

#[derive(Serialize)]
struct PartialEntropy {
    budget: u64,
    words: CountSeries,
    upper_series: Vec<f64>,
}

fn entropy(global: &GlobalOpts, args: &crate::EntropyArgs) -> Result<Status> {
    let (spec, env) = setup_or_return!(setup(global, "entropy", args, &args.spec, true, args.n_max));
    match language::count_language(&spec, args.n_max, &walk_options(args.budget)) {
        Ok(counts) => {
            let bracket = language::bracket_from_counts(&counts);
            if global.format == Format::Csv {
                let rows = (1..=args.n_max)
                    .map(|n| {
                        vec![
                            n.to_string(),
                            counts.words.count(n).to_string(),
                            counts.bad.count(n).to_string(),
                            counts.good.count(n).to_string(),
                            bracket.upper_series[n - 1].to_string(),
                            bracket.lower_series[n - 1].to_string(),
                        ]
                    })
                    .collect();
                emit_csv(global, &ENTROPY_HEADER, rows)?;
            } else {
                emit_json(global, &env.wrap(false, EntropyResult { counts, bracket }))?;
            }
            Ok(Status::Done)
        }
        Err(Error::BudgetExceeded { budget, partial }) => {
            let upper_series = running_upper(&partial);
            if global.format == Format::Csv {
                let rows = (1..=partial.n_max())
                    .map(|n| {
                        vec![
                            n.to_string(),
                            partial.count(n).to_string(),
                            String::new(),
                            String::new(),
                            upper_series[n - 1].to_string(),
                            String::new(),
                        ]
                    })
                    .collect();
                emit_csv(global, &ENTROPY_HEADER, rows)?;
            } else {
                let result = PartialEntropy {
                    budget,
                    words: *partial,
                    upper_series,
                };
                emit_json(global, &env.wrap(true, result))?;
            }
            eprintln!("error: enumeration budget of {budget} nodes exceeded; partial counts written");
            Ok(Status::BudgetExceeded)
        }
        Err(e) => Err(e.into()),
    }
}

const ENTROPY_HEADER: [&str; 6] = ["n", "count_L", "count_B", "count_G", "upper_bound", "lower_bound"];

fn emit_series(global: &GlobalOpts, env: &Envelope, partial: bool, series: &CountSeries) -> Result<()> {
    if global.format == Format::Csv {
        let rows = (1..=series.n_max())
            .map(|n| vec![n.to_string(), series.count(n).to_string()])
            .collect();
        emit_csv(global, &["n", "count"], rows)
    } else {
        emit_json(global, &env.wrap(partial, series))
    }
}

fn count(global: &GlobalOpts, args: &crate::CountArgs) -> Result<Status> {
    let canonical = args.avoid.is_none() && !matches!(args.class, ClassArg::L);
    let (spec, env) = setup_or_return!(setup(global, "count", args, &args.spec, canonical, args.n_max));
    let opts = walk_options(args.budget);
    let outcome = match (&args.avoid, args.class) {
        (Some(w), _) => language::forbid_word_count(&spec, &parse_word(&spec, w)?, args.n_max),
        (None, ClassArg::L) => language::count_words_with(&spec, args.n_max, &opts),
        (None, class) => language::count_language(&spec, args.n_max, &opts).map(|c| match class {
            ClassArg::B => c.bad,
            _ => c.good,
        }),
    };
    match outcome {
        Ok(series) => {
            emit_series(global, &env, false, &series)?;
            Ok(Status::Done)
        }
        Err(Error::BudgetExceeded { budget, partial }) => {
            emit_series(global, &env, true, &partial)?;
            eprintln!("error: enumeration budget of {budget} nodes exceeded; partial counts written");
            Ok(Status::BudgetExceeded)
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct GMembership {
    m: usize,
    member: bool,
    split: Option<DecompositionResult>,
}

#[derive(Serialize)]
struct FreeConcatenation {
    words: Vec<Word>,
    holds: bool,
}

#[derive(Serialize)]
struct DecomposeResult {
    #[serde(skip_serializing_if = "Option::is_none")]
    word: Option<Word>,
    #[serde(skip_serializing_if = "Option::is_none")]
    in_b: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    in_g: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decomposition: Option<DecompositionResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g_m: Option<GMembership>,
    #[serde(skip_serializing_if = "Option::is_none")]
    free_concatenation: Option<FreeConcatenation>,
}

fn decompose(global: &GlobalOpts, args: &crate::DecomposeArgs) -> Result<Status> {
    let min_len = args.word.as_ref().map_or(1, |w| w.len());
    let (spec, env) = setup_or_return!(setup(global, "decompose", args, &args.spec, true, min_len));
    let mut result = DecomposeResult {
        word: None,
        in_b: None,
        in_g: None,
        decomposition: None,
        g_m: None,
        free_concatenation: None,
    };
    if let Some(text) = &args.word {
        let z = parse_word(&spec, text)?;
        result.in_b = Some(decomposition::is_in_b(&spec, &z)?);
        result.in_g = Some(decomposition::is_in_g(&spec, &z)?);
        result.decomposition = Some(decomposition::decompose(&spec, &z)?);
        if let Some(m) = args.m {
            let split = decomposition::split_g_m(&spec, &z, m)?;
            result.g_m = Some(GMembership {
                m,
                member: split.is_some(),
                split,
            });
        }
        result.word = Some(z);
    }
    if let Some(list) = &args.concat {
        let words = list.iter().map(|w| parse_word(&spec, w)).collect::<Result<Vec<_>>>()?;
        let holds = decomposition::check_free_concatenation(&spec, &words)?;
        result.free_concatenation = Some(FreeConcatenation { words, holds });
    }
    emit_json(global, &env.wrap(false, result))?;
    Ok(Status::Done)
}

#[derive(Serialize)]
struct PadResult {
    word: Word,
    m: usize,
    tau: usize,
    padded: Word,
}

fn pad_g(global: &GlobalOpts, args: &crate::PadArgs) -> Result<Status> {
    let (spec, env) = setup_or_return!(setup(global, "pad-g", args, &args.spec, true, args.word.len()));
    let word = parse_word(&spec, &args.word)?;
    let tau = decomposition::tau(&spec, args.m)?;
    let padded = decomposition::pad_to_g(&spec, &word, args.m)?;
    emit_json(
        global,
        &env.wrap(
            false,
            PadResult {
                word,
                m: args.m,
                tau,
                padded,
            },
        ),
    )?;
    Ok(Status::Done)
}

#[derive(Serialize)]
struct SyncResult {
    #[serde(flatten)]
    report: SyncReport,
    note: &'static str,
}

fn sync_check(global: &GlobalOpts, args: &crate::SyncArgs) -> Result<Status> {
    let (spec, env) = setup_or_return!(setup(global, "sync-check", args, &args.spec, false, 0));
    let report = decomposition::sync_check(&spec, args.m, args.horizon);
    let result = SyncResult {
        report,
        note: "a counterexample refutes synchronization of 0^M; its absence is evidence at this horizon only",
    };
    emit_json(global, &env.wrap(false, result))?;
    Ok(Status::Done)
}

#[derive(Serialize)]
struct CertifyOne {
    word: Word,
    horizon: usize,
    exact_horizon: usize,
    certification: Certification,
}

#[derive(Serialize)]
struct SeriesPoint {
    n: usize,
    #[serde(with = "rational::serde_str")]
    measure: Rational,
    measure_decimal: f64,
}

#[derive(Serialize)]
struct CylinderSeries {
    word: Word,
    points: Vec<SeriesPoint>,
}

#[derive(Serialize)]
struct PeriodicResult {
    n: usize,
    per_count: u64,
    orbit_count: usize,
    /// `|Fix(σ^k)|` for `k = 1..=n`.
    fixed_points: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    orbits: Option<Vec<PeriodicOrbit>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certification: Option<CertifyOne>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cylinder_series: Option<CylinderSeries>,
    #[serde(skip_serializing_if = "Option::is_none")]
    full_support: Option<FullSupportReport>,
}

fn periodic_cmd(global: &GlobalOpts, args: &crate::PeriodicArgs) -> Result<Status> {
    let (spec, env) = setup_or_return!(setup(global, "periodic", args, &args.spec, false, 0));
    let points = periodic::enumerate_per(&spec, args.n)?;
    let certification = match &args.certify {
        Some(text) => {
            let word = parse_word(&spec, text)?;
            let exact_horizon = periodic::exact_horizon(&spec, &word);
            let horizon = args.horizon.unwrap_or(exact_horizon);
            let certification = periodic::certify_periodic(&spec, &word, horizon)?;
            Some(CertifyOne {
                word,
                horizon,
                exact_horizon,
                certification,
            })
        }
        None => None,
    };
    let cylinder_series = match (&args.cylinder, &args.ns) {
        (Some(text), Some(ns)) => {
            let word = parse_word(&spec, text)?;
            let points = periodic::cylinder_series(&spec, &word, ns)?
                .into_iter()
                .map(|(n, measure)| SeriesPoint {
                    n,
                    measure_decimal: rational::to_f64(&measure),
                    measure,
                })
                .collect();
            Some(CylinderSeries { word, points })
        }
        _ => None,
    };
    let full_support = args
        .support
        .map(|k| periodic::full_support_check(&spec, args.n, k))
        .transpose()?;
    let result = PeriodicResult {
        n: args.n,
        per_count: points.per_count,
        orbit_count: points.orbits.len(),
        fixed_points: (1..=args.n).map(|k| points.fixed_points(k)).collect(),
        orbits: (!args.no_orbits).then(|| points.orbits.clone()),
        certification,
        cylinder_series,
        full_support,
    };
    emit_json(global, &env.wrap(false, result))?;
    Ok(Status::Done)
}

#[derive(Serialize)]
struct MmeResult {
    measure: EmpiricalMeasure,
    diagnostics: DiagnosticsReport,
}

fn mme(global: &GlobalOpts, args: &crate::MmeArgs) -> Result<Status> {
    let (spec, env) = setup_or_return!(setup(global, "mme", args, &args.spec, true, args.n));
    let measure = periodic::empirical_measure(&spec, args.n, args.cylinders)?;
    let diagnostics = periodic::mme_diagnostics(&spec, &measure)?;
    emit_json(global, &env.wrap(false, MmeResult { measure, diagnostics }))?;
    Ok(Status::Done)
}

fn certify(global: &GlobalOpts, args: &crate::SpecArgs) -> Result<Status> {
    let (spec, env) = setup_or_return!(setup(global, "certify", args, &args.spec, true, 0));
    let report = periodic::certificate_report(&spec)?;
    emit_json(global, &env.wrap(false, report))?;
    Ok(Status::Done)
}

#[derive(Serialize)]
struct ExtenderResult {
    zero_padded: bool,
    #[serde(flatten)]
    verdict: ExtenderVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    grp: Option<GrpReport>,
}

/// `min_{n <= n_max} (1/n) log |L_n|`.
fn entropy_upper_bound(spec: &ShiftSpec, n_max: usize) -> Result<f64> {
    let series = language::count_words(spec, n_max)?;
    Ok(running_upper(&series).last().copied().unwrap_or(f64::INFINITY))
}

fn extender_cmd(global: &GlobalOpts, args: &crate::ExtenderArgs) -> Result<Status> {
    let (spec, env) = setup_or_return!(setup(global, "extender", args, &args.spec, false, 0));
    let v = parse_word(&spec, &args.v)?;
    let w = parse_word(&spec, &args.w)?;
    let radius = args.radius.unwrap_or_else(|| extender::default_radius(&spec, &v, &w));
    let verdict = if args.zero_pad {
        extender::zero_pad_containment(&spec, &v, &w, radius)?
    } else {
        extender::extender_subset(&spec, &v, &w, radius)?
    };
    let grp = if args.grp {
        let target = verdict.w.clone();
        let level = v.len().max(target.len()).max(1);
        let mu = periodic::empirical_measure(&spec, args.mu_n, level)?;
        let h = match args.h_upper {
            Some(h) => h,
            None => entropy_upper_bound(&spec, 20)?,
        };
        Some(extender::grp_inequality_check(&v, &target, &mu, h)?)
    } else {
        None
    };
    let alarm = args.zero_pad && verdict.is_counterexample();
    emit_json(
        global,
        &env.wrap(
            false,
            ExtenderResult {
                zero_padded: args.zero_pad,
                verdict,
                grp,
            },
        ),
    )?;
    if alarm {
        return Err(anyhow!("zero-padding containment produced a counterexample"));
    }
    Ok(Status::Done)
}

#[derive(Serialize)]
struct CanonicalizeResult {
    function: CanonicalFunction,
    spec_sha256: String,
    #[serde(with = "rational::serde_str")]
    alpha: Rational,
    validation: ValidationReport,
    /// Lengths up to which both functions define the same words.
    same_language_up_to: usize,
}

fn canonicalize(global: &GlobalOpts, args: &crate::CanonicalizeArgs) -> Result<Status> {
    let (spec, env) = setup_or_return!(setup(global, "canonicalize", args, &args.spec, false, 0));
    let function = shift::canonicalize(&spec, args.n_prime)?;
    let spec_sha256 = sha256_hex(&function.to_json());
    let hat = ShiftSpec::new(function.clone())?;
    if let Some(path) = &args.spec_out {
        let mut text = function.to_json();
        text.push('\n');
        write_file(path, text.as_bytes())?;
    }
    let result = CanonicalizeResult {
        same_language_up_to: args.n_prime.max(function.table_len()),
        function,
        spec_sha256,
        alpha: hat.alpha(),
        validation: hat.validation().clone(),
    };
    emit_json(global, &env.wrap(false, result))?;
    Ok(Status::Done)
}

#[derive(Serialize)]
struct ContainResult {
    inner: String,
    inner_sha256: String,
    n_max: usize,
    contained: bool,
    witness: Option<Word>,
}

fn contain(global: &GlobalOpts, args: &crate::ContainArgs) -> Result<Status> {
    let (outer, env) = setup_or_return!(setup(global, "contain", args, &args.spec, false, 0));
    let (inner, description, inner_sha) = match (&args.inner, &args.alpha) {
        (Some(path), _) => {
            let loaded = load(path)?;
            (loaded.spec, path.display().to_string(), loaded.sha)
        }
        (None, alpha_text) => {
            let alpha = match alpha_text {
                Some(t) => rational::parse(t).map_err(|e| InvalidInput(format!("alpha: {e}")))?,
                None => outer.alpha(),
            };
            let inner = shift::build_x_alpha(alpha, args.n_max)?;
            let sha = sha256_hex(&inner.function().to_json());
            (inner, format!("X_alpha with alpha = {}", rational::format(&alpha)), sha)
        }
    };
    let witness = shift::containment_witness(&inner, &outer, args.n_max)?;
    let result = ContainResult {
        inner: description,
        inner_sha256: inner_sha,
        n_max: args.n_max,
        contained: witness.is_none(),
        witness,
    };
    emit_json(global, &env.wrap(false, result))?;
    Ok(Status::Done)
}

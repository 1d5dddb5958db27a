//! `bds`: experiments on bounded density shifts.
//!
//! Exit status: 0 on success, 2 when the shift spec is invalid (or not
//! canonical under `--strict`), 3 when an enumeration budget ran out; the
//! partial result is still written. Other failures exit with 1.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "bds", version, about = "Exact experiments on bounded density shifts")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone, Debug, Default)]
pub struct GlobalOpts {
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    pub format: Format,
    /// Add a `timestamp` field (seconds since the Unix epoch) to the report.
    #[arg(long, global = true)]
    pub timestamp: bool,
    /// Worker threads for enumeration.
    #[arg(long, global = true, env = "BDS_THREADS", value_parser = positive)]
    pub threads: Option<usize>,
    /// Exit with status 2 on a non-canonical spec instead of canonicalizing it.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Table length used when a spec has to be canonicalized.
    #[arg(long, global = true, value_parser = positive)]
    pub canonical_len: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check that the function is canonical and report α_f.
    Validate(SpecArgs),
    /// Rigorous entropy bracket from exact L/B/G counts.
    Entropy(EntropyArgs),
    /// Count words of length 1..=n-max in one class.
    Count(CountArgs),
    /// B·G·B factorization, class membership and free concatenation.
    Decompose(DecomposeArgs),
    /// Pad a word of G(M) with zeros into G.
    PadG(PadArgs),
    /// Search for contexts that 0^M fails to synchronize.
    SyncCheck(SyncArgs),
    /// Periodic orbits, cylinder frequencies and support checks.
    Periodic(PeriodicArgs),
    /// Empirical measure μ_n and its letter-frequency diagnostics.
    Mme(MmeArgs),
    /// Intrinsic-ergodicity certificate from α_f.
    Certify(SpecArgs),
    /// Extender-set containment at a finite context radius.
    Extender(ExtenderArgs),
    /// Replace f by the largest admissible window sums.
    Canonicalize(CanonicalizeArgs),
    /// Check that one shift's language lies inside another's.
    Contain(ContainArgs),
    /// Run one command described by a JSON config file.
    Run(RunArgs),
}

pub fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SpecArgs {
    /// Shift spec JSON: {"table": ["1/1", ...], "tail_slope": "1/2"}.
    #[arg(long)]
    pub spec: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct EntropyArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, value_parser = positive)]
    pub n_max: usize,
    /// Maximum number of enumeration nodes.
    #[arg(long, value_parser = positive)]
    pub budget: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
pub enum ClassArg {
    L,
    B,
    G,
}

#[derive(Args, Debug, Serialize)]
pub struct CountArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, value_parser = positive)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value_t = ClassArg::L)]
    pub class: ClassArg,
    /// Count words of L avoiding this word instead.
    #[arg(long, conflicts_with = "class")]
    pub avoid: Option<String>,
    #[arg(long, value_parser = positive)]
    pub budget: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, required_unless_present = "concat")]
    pub word: Option<String>,
    /// Also test membership in G(M).
    #[arg(long)]
    pub m: Option<usize>,
    /// Comma-separated G-words whose concatenation is checked periodically.
    #[arg(long, value_delimiter = ',')]
    pub concat: Option<Vec<String>>,
}

#[derive(Args, Debug, Serialize)]
pub struct PadArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub word: String,
    #[arg(long)]
    pub m: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct SyncArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_parser = positive)]
    pub horizon: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct PeriodicArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Largest least period.
    #[arg(long, value_parser = positive)]
    pub n: usize,
    /// Decide whether this word's periodic repetition lies in the shift.
    #[arg(long)]
    pub certify: Option<String>,
    /// Window horizon for `--certify`; the exact horizon when omitted.
    #[arg(long, value_parser = positive, requires = "certify")]
    pub horizon: Option<usize>,
    /// Report μ_k of this cylinder for every k in `--ns`.
    #[arg(long, requires = "ns")]
    pub cylinder: Option<String>,
    #[arg(long, value_delimiter = ',', value_parser = positive)]
    pub ns: Option<Vec<usize>>,
    /// Check that μ_n charges every word of this length.
    #[arg(long, value_parser = positive)]
    pub support: Option<usize>,
    /// Leave the orbit list out of the report.
    #[arg(long)]
    pub no_orbits: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct MmeArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, value_parser = positive)]
    pub n: usize,
    /// Longest stored cylinder.
    #[arg(long, value_parser = positive, default_value_t = 1)]
    pub cylinders: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct ExtenderArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub v: String,
    #[arg(long)]
    pub w: String,
    /// Longest context on each side; |v| + |w| + min(N, 4) when omitted.
    #[arg(long)]
    pub radius: Option<usize>,
    /// Compare v with 0^|v|·w·0^|v|.
    #[arg(long)]
    pub zero_pad: bool,
    /// Also evaluate the measure inequality with μ_n.
    #[arg(long)]
    pub grp: bool,
    #[arg(long, value_parser = positive, default_value_t = 20)]
    pub mu_n: usize,
    /// Entropy upper bound; min (1/n) log|L_n| over n <= 20 when omitted.
    #[arg(long)]
    pub h_upper: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct CanonicalizeArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, value_parser = positive)]
    pub n_prime: usize,
    /// Also write the canonical function as a spec file.
    #[arg(long)]
    pub spec_out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ContainArgs {
    /// Outer shift.
    #[arg(long)]
    pub spec: PathBuf,
    /// Inner shift spec; X_α with α = α_f of the outer shift when omitted.
    #[arg(long, conflicts_with = "alpha")]
    pub inner: Option<PathBuf>,
    /// Use X_α for this α ("p/q") as the inner shift.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long, value_parser = positive)]
    pub n_max: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match commands::execute(cli) {
        Ok(status) => status.code(),
        Err(err) => {
            eprintln!("error: {err:#}");
            commands::exit_code_for(&err)
        }
    };
    ExitCode::from(code)
}

//! `bds run --config experiment.json`: one command with its knobs in a file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::Parser;
use serde::Deserialize;

use crate::commands::{self, InvalidInput, Status};
use crate::{Cli, Command, GlobalOpts};

/// A single experiment. Paths are relative to the config file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub spec: PathBuf,
    pub command: String,
    pub n_max: Option<usize>,
    pub n: Option<usize>,
    pub horizon: Option<usize>,
    pub radius: Option<usize>,
    pub budget: Option<usize>,
    pub cylinders: Option<usize>,
    pub n_prime: Option<usize>,
    pub mu_n: Option<usize>,
    pub support: Option<usize>,
    pub m: Option<usize>,
    pub class: Option<String>,
    pub word: Option<String>,
    pub v: Option<String>,
    pub w: Option<String>,
    pub avoid: Option<String>,
    pub certify: Option<String>,
    pub cylinder: Option<String>,
    pub alpha: Option<String>,
    pub concat: Option<Vec<String>>,
    pub ns: Option<Vec<usize>>,
    pub inner: Option<PathBuf>,
    pub spec_out: Option<PathBuf>,
    pub h_upper: Option<f64>,
    #[serde(default)]
    pub zero_pad: bool,
    #[serde(default)]
    pub grp: bool,
    #[serde(default)]
    pub no_orbits: bool,
    pub output: Option<PathBuf>,
    pub format: Option<String>,
    #[serde(default)]
    pub timestamp: bool,
    #[serde(default)]
    pub strict: bool,
    pub canonical_len: Option<usize>,
}

impl ExperimentConfig {
    /// The equivalent command line, so config runs share every check with
    /// direct invocations.
    pub fn to_args(&self, base: &Path) -> Vec<String> {
        let path = |p: &Path| base.join(p).display().to_string();
        let mut args = vec![
            "bds".to_string(),
            self.command.clone(),
            "--spec".into(),
            path(&self.spec),
        ];
        let mut push = |flag: &str, value: String| {
            args.push(format!("--{flag}"));
            args.push(value);
        };
        let numbers = [
            ("n-max", self.n_max),
            ("n", self.n),
            ("horizon", self.horizon),
            ("radius", self.radius),
            ("budget", self.budget),
            ("cylinders", self.cylinders),
            ("n-prime", self.n_prime),
            ("mu-n", self.mu_n),
            ("support", self.support),
            ("m", self.m),
            ("canonical-len", self.canonical_len),
        ];
        for (flag, value) in numbers {
            if let Some(v) = value {
                push(flag, v.to_string());
            }
        }
        let texts = [
            ("class", &self.class),
            ("word", &self.word),
            ("v", &self.v),
            ("w", &self.w),
            ("avoid", &self.avoid),
            ("certify", &self.certify),
            ("cylinder", &self.cylinder),
            ("alpha", &self.alpha),
            ("format", &self.format),
        ];
        for (flag, value) in texts {
            if let Some(v) = value {
                push(flag, v.clone());
            }
        }
        if let Some(list) = &self.concat {
            push("concat", list.join(","));
        }
        if let Some(list) = &self.ns {
            push("ns", list.iter().map(ToString::to_string).collect::<Vec<_>>().join(","));
        }
        if let Some(h) = self.h_upper {
            push("h-upper", h.to_string());
        }
        for (flag, value) in [
            ("inner", &self.inner),
            ("spec-out", &self.spec_out),
            ("out", &self.output),
        ] {
            if let Some(p) = value {
                push(flag, path(p));
            }
        }
        for (flag, on) in [
            ("zero-pad", self.zero_pad),
            ("grp", self.grp),
            ("no-orbits", self.no_orbits),
            ("timestamp", self.timestamp),
            ("strict", self.strict),
        ] {
            if on {
                args.push(format!("--{flag}"));
            }
        }
        args
    }
}

pub fn load(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| InvalidInput(format!("reading {}: {e}", path.display())))?;
    let config: ExperimentConfig =
        serde_json::from_str(&text).map_err(|e| InvalidInput(format!("{}: {e}", path.display())))?;
    if config.command == "run" {
        return Err(InvalidInput("a config cannot run another config".into()).into());
    }
    Ok(config)
}

pub fn run(outer: &GlobalOpts, path: &Path) -> Result<Status> {
    let config = load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let cli = Cli::try_parse_from(config.to_args(base))
        .map_err(|e| InvalidInput(format!("{}: {}", path.display(), e.render().to_string().trim())))?;
    let mut global = cli.global;
    if global.out.is_none() {
        global.out.clone_from(&outer.out);
    }
    global.timestamp |= outer.timestamp;
    global.strict |= outer.strict;
    if matches!(cli.command, Command::Run(_)) {
        return Err(InvalidInput("a config cannot run another config".into()).into());
    }
    commands::dispatch(&global, cli.command)
}

//! Command-line and config-file parsing into a validated [`RunConfig`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use crate::error::CliError;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "ZDQPT_THREADS";

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    ScanL,
    ScanG,
    ScanZ,
    FindZeros,
    ScanBeta,
    FreeEnergy,
    VerifyPrep,
    VerifyEvolve,
    Complexity,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::ScanL => "scan-l",
            Command::ScanG => "scan-g",
            Command::ScanZ => "scan-z",
            Command::FindZeros => "find-zeros",
            Command::ScanBeta => "scan-beta",
            Command::FreeEnergy => "free-energy",
            Command::VerifyPrep => "verify-prep",
            Command::VerifyEvolve => "verify-evolve",
            Command::Complexity => "complexity",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Truncation setting: a fixed N or the Riemann–Siegel rule ⌊√(t/2π)⌋.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum NSetting {
    Fixed(usize),
    Rs,
}

impl NSetting {
    pub fn parse(text: &str) -> Result<Self, String> {
        let text = text.trim();
        if text.eq_ignore_ascii_case("rs") {
            return Ok(NSetting::Rs);
        }
        let value = if let Some(exp) = text.strip_prefix("2^") {
            let e: u32 = exp.parse().map_err(|_| format!("bad exponent in {text:?}"))?;
            if e >= usize::BITS {
                return Err(format!("{text} does not fit"));
            }
            1usize << e
        } else {
            text.parse().map_err(|_| format!("expected an integer, 2^k or \"rs\", got {text:?}"))?
        };
        if value == 0 {
            return Err("N must be positive".to_string());
        }
        Ok(NSetting::Fixed(value))
    }

    pub fn label(&self) -> String {
        match self {
            NSetting::Fixed(n) => n.to_string(),
            NSetting::Rs => "rs".to_string(),
        }
    }
}

/// Real signal scanned by scan-z and find-zeros.
#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Observable {
    /// Hardy Z main sum 2 Re(e^{iθ} Σ n^{−1/2−it}).
    Main,
    /// Alternating-series estimate of Z(t) at fixed N.
    Eta,
    /// Minima of |L(β,t)|.
    L,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::Main => "main",
            Observable::Eta => "eta",
            Observable::L => "l",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Bisection,
    Secant,
}

#[derive(Parser, Debug)]
#[command(name = "zeta-dqpt", version, about = "Riemann zeros as dynamical quantum phase transitions")]
struct Cli {
    #[arg(value_enum)]
    command: Option<Command>,
    /// Flat key=value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long = "beta-min")]
    beta_min: Option<f64>,
    #[arg(long = "beta-max")]
    beta_max: Option<f64>,
    #[arg(long = "beta-step")]
    beta_step: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    #[arg(long = "t-min")]
    t_min: Option<f64>,
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    #[arg(long = "t-step")]
    t_step: Option<f64>,
    /// Integer, 2^k, or "rs".
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long, value_enum)]
    observable: Option<Observable>,
    #[arg(long, value_enum)]
    method: Option<Method>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

const FILE_KEYS: &[&str] = &[
    "command", "beta", "beta-min", "beta-max", "beta-step", "t", "t-min", "t-max", "t-step", "n", "eps", "xi",
    "delta", "tol", "threshold", "observable", "method", "output", "reference", "threads",
];

/// Parse a flat key=value file; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        let key = key.trim().replace('_', "-");
        if !FILE_KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("config line {}: unknown key {key:?}", i + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub beta: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub beta_step: f64,
    pub t: Option<f64>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub t_step: Option<f64>,
    pub n: Option<NSetting>,
    pub eps: f64,
    pub xi: f64,
    pub delta: f64,
    pub tol: f64,
    pub threshold: Option<f64>,
    pub observable: Observable,
    pub method: Method,
    pub output_path: PathBuf,
    pub reference_path: Option<PathBuf>,
    pub threads: Option<usize>,
}

fn file_value<T: std::str::FromStr>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    match file.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("config key {key}: cannot parse {v:?}"))),
    }
}

fn file_enum<T: ValueEnum>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    match file.get(key) {
        None => Ok(None),
        Some(v) => T::from_str(v, true)
            .map(Some)
            .map_err(|_| CliError::Usage(format!("config key {key}: unknown value {v:?}"))),
    }
}

/// Parse argv (including the program name) and an optional config file
/// named by `--config`.
pub fn parse_config<I, S>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::Clap)?;
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
            parse_config_file(&text)?
        }
        None => BTreeMap::new(),
    };
    merge(cli, &file)
}

macro_rules! pick {
    ($cli:expr, $file:expr, $field:ident, $key:literal) => {
        match $cli.$field {
            Some(v) => Some(v),
            None => file_value($file, $key)?,
        }
    };
}

fn merge(cli: Cli, file: &BTreeMap<String, String>) -> Result<RunConfig, CliError> {
    let command = match cli.command {
        Some(c) => c,
        None => file_enum(file, "command")?.ok_or_else(|| CliError::Usage("missing command".to_string()))?,
    };
    let n_text = cli.n.clone().or_else(|| file.get("n").cloned());
    let n = n_text.map(|s| NSetting::parse(&s)).transpose().map_err(CliError::Usage)?;
    let observable = match cli.observable {
        Some(o) => o,
        None => file_enum(file, "observable")?.unwrap_or(Observable::Main),
    };
    let method = match cli.method {
        Some(m) => m,
        None => file_enum(file, "method")?.unwrap_or(Method::Bisection),
    };
    let output = cli
        .output
        .clone()
        .or_else(|| file.get("output").map(PathBuf::from))
        .unwrap_or_else(|| default_output(command));
    let reference = cli.reference.clone().or_else(|| file.get("reference").map(PathBuf::from));
    let env_threads = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?,
        ),
        Err(_) => None,
    };
    let threads = pick!(cli, file, threads, "threads").or(env_threads);
    let config = RunConfig {
        command,
        beta: pick!(cli, file, beta, "beta").unwrap_or(0.5),
        beta_min: pick!(cli, file, beta_min, "beta-min").unwrap_or(0.1),
        beta_max: pick!(cli, file, beta_max, "beta-max").unwrap_or(0.9),
        beta_step: pick!(cli, file, beta_step, "beta-step").unwrap_or(0.05),
        t: pick!(cli, file, t, "t"),
        t_min: pick!(cli, file, t_min, "t-min"),
        t_max: pick!(cli, file, t_max, "t-max"),
        t_step: pick!(cli, file, t_step, "t-step"),
        n,
        eps: pick!(cli, file, eps, "eps").unwrap_or(1e-3),
        xi: pick!(cli, file, xi, "xi").unwrap_or(1e-6),
        delta: pick!(cli, file, delta, "delta").unwrap_or(0.01),
        tol: pick!(cli, file, tol, "tol").unwrap_or(1e-6),
        threshold: pick!(cli, file, threshold, "threshold"),
        observable,
        method,
        output_path: output,
        reference_path: reference,
        threads,
    };
    validate(&config)?;
    Ok(config)
}

fn default_output(command: Command) -> PathBuf {
    match command {
        Command::Complexity => PathBuf::from("complexity.json"),
        c => PathBuf::from(format!("{}.csv", c.name())),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn need<T: Copy>(value: Option<T>, flag: &str, command: Command) -> Result<T, CliError> {
    value.ok_or_else(|| usage(format!("{command} requires --{flag}")))
}

fn positive(value: f64, flag: &str) -> Result<(), CliError> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(usage(format!("--{flag} must be positive, got {value}")));
    }
    Ok(())
}

fn validate(c: &RunConfig) -> Result<(), CliError> {
    for (v, name) in [(c.eps, "eps"), (c.xi, "xi"), (c.delta, "delta"), (c.tol, "tol")] {
        positive(v, name)?;
    }
    if let Some(th) = c.threshold {
        positive(th, "threshold")?;
    }
    if c.threads == Some(0) {
        return Err(usage("--threads must be at least 1"));
    }
    if !c.beta.is_finite() {
        return Err(usage("--beta must be finite"));
    }
    if let Some(step) = c.t_step {
        positive(step, "t-step")?;
    }
    positive(c.beta_step, "beta-step")?;
    if !(c.beta_max >= c.beta_min) {
        return Err(usage("beta range is empty"));
    }
    match c.command {
        Command::ScanL | Command::ScanG | Command::ScanZ | Command::FindZeros => {
            let lo = need(c.t_min, "t-min", c.command)?;
            let hi = need(c.t_max, "t-max", c.command)?;
            if !(hi > lo) {
                return Err(usage(format!("t range [{lo}, {hi}] is empty")));
            }
            if c.command != Command::FindZeros {
                need(c.t_step, "t-step", c.command)?;
                need(c.n, "n", c.command)?;
            }
        }
        Command::ScanBeta | Command::FreeEnergy => {
            need(c.t, "t", c.command)?;
            need(c.n, "n", c.command)?;
        }
        Command::VerifyPrep => {
            if !matches!(need(c.n, "n", c.command)?, NSetting::Fixed(_)) {
                return Err(usage("verify-prep needs an integer --n"));
            }
        }
        Command::VerifyEvolve => {
            if !matches!(need(c.n, "n", c.command)?, NSetting::Fixed(_)) {
                return Err(usage("verify-evolve needs an integer --n"));
            }
            need(c.t, "t", c.command)?;
        }
        Command::Complexity => {
            need(c.t, "t", c.command)?;
        }
    }
    Ok(())
}

/// Resolve the worker count for the pool: explicit setting or all cores.
pub fn thread_count(config: &RunConfig) -> usize {
    config
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    output.with_extension("json")
}

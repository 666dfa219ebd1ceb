//! Command-line front end: constant tables, flow sweeps and inequality audits.
//!
//! Settings are resolved in three layers: built-in defaults, an optional
//! config file of flat dotted keys (`grid.n_points = 4096`), then flags.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::constants::{
    a_constant, gamma_function, optimal_diffusion, sharp_young_constant, Regime, YoungTriple,
};
use crate::grid::{Grid, GridFunction};
use crate::heat::{Spacing, TimeGrid};
use crate::verify::{
    blachman_lemma_check, entropy_power_concavity_check, epi_check, random_density_on, random_pair_on,
    young_check, young_flow_check, DensityFamily, FlowOptions, Tolerances, VerificationReport,
};

/// Exit status when every check passed.
pub const EXIT_OK: u8 = 0;
/// Exit status when at least one check failed.
pub const EXIT_CHECK_FAILED: u8 = 1;
/// Exit status for invalid configuration.
pub const EXIT_CONFIG: u8 = 2;
/// Exit status for numerical errors such as truncation.
pub const EXIT_NUMERICAL: u8 = 3;

/// Triples tabulated by `constants` when no `--p/--q` is given.
pub const DEFAULT_TABLE: [(f64, f64); 6] = [
    (4.0 / 3.0, 4.0 / 3.0),
    (1.5, 1.2),
    (1.2, 1.5),
    (2.0, 1.5),
    (0.75, 0.75),
    (0.8, 0.6),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CommandKind {
    Constants,
    Sweep,
    Audit,
    Lemma,
    Epi,
    Concavity,
}

impl CommandKind {
    fn name(self) -> &'static str {
        match self {
            CommandKind::Constants => "constants",
            CommandKind::Sweep => "sweep",
            CommandKind::Audit => "audit",
            CommandKind::Lemma => "lemma",
            CommandKind::Epi => "epi",
            CommandKind::Concavity => "concavity",
        }
    }

    fn parse(s: &str) -> Option<CommandKind> {
        <CommandKind as ValueEnum>::from_str(s, true).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeConfig {
    pub t_min: f64,
    pub t_max: f64,
    /// `None` keeps the ratio `1.25` of the default grid.
    pub steps: Option<usize>,
    pub spacing: Spacing,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    /// `(p, q)`; `r` is derived.
    pub triple: Option<(f64, f64)>,
    pub regime: Option<Regime>,
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub seeds: Vec<u64>,
    pub input_paths: Vec<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub tolerances: Tolerances,
    /// `(a, b, r)` of the generalized Blachman inequality.
    pub lemma: Option<(f64, f64, f64)>,
    pub t_limit: f64,
    pub timestamp: bool,
}

impl ExperimentConfig {
    pub fn new(command: CommandKind) -> ExperimentConfig {
        let g = Grid::default();
        ExperimentConfig {
            command,
            triple: None,
            regime: None,
            grid: GridConfig {
                x_min: g.x_min(),
                x_max: g.x_max(),
                n_points: g.n_points(),
            },
            time: TimeConfig {
                t_min: TimeGrid::DEFAULT_T_MIN,
                t_max: TimeGrid::DEFAULT_T_MAX,
                steps: None,
                spacing: Spacing::Geometric,
            },
            seeds: vec![1],
            input_paths: Vec::new(),
            output_path: None,
            tolerances: Tolerances::default(),
            lemma: None,
            t_limit: FlowOptions::default().t_limit,
            timestamp: true,
        }
    }

    /// Checks command-specific requirements and builds the numerical objects.
    pub fn validate(&self) -> Result<Validated, ConfigError> {
        let field = |f: &str, m: String| ConfigError::field(f, m);
        let grid = Grid::new(self.grid.x_min, self.grid.x_max, self.grid.n_points)
            .map_err(|e| field("grid", e.to_string()))?;
        let times = match (self.time.spacing, self.time.steps) {
            (Spacing::Geometric, None) => TimeGrid::geometric(self.time.t_min, TimeGrid::DEFAULT_RATIO, self.time.t_max),
            (Spacing::Geometric, Some(n)) => TimeGrid::geometric_steps(self.time.t_min, self.time.t_max, n),
            (Spacing::Linear, n) => TimeGrid::linear(self.time.t_min, self.time.t_max, n.unwrap_or(50)),
        }
        .map_err(|e| field("time", e.to_string()))?;
        let triple = match self.triple {
            Some((p, q)) => {
                let t = YoungTriple::new(p, q).map_err(|e| field("triple", e.to_string()))?;
                if let Some(reg) = self.regime {
                    if reg != t.regime() {
                        return Err(field(
                            "regime",
                            format!("({p}, {q}) is a {} triple, not {reg}", t.regime()),
                        ));
                    }
                }
                Some(t)
            }
            None => None,
        };
        let needs_triple = matches!(self.command, CommandKind::Sweep | CommandKind::Audit);
        if needs_triple && triple.is_none() {
            return Err(field("triple", format!("`{}` requires --p and --q", self.command.name())));
        }
        if self.command == CommandKind::Lemma && self.lemma.is_none() {
            return Err(field("lemma", "`lemma` requires --a, --b and --r".into()));
        }
        if self.seeds.is_empty() && self.input_paths.is_empty() && self.command != CommandKind::Constants {
            return Err(field("seeds", "no seeds and no inputs".into()));
        }
        let wanted = match self.command {
            CommandKind::Constants => 0,
            CommandKind::Concavity => 1,
            _ => 2,
        };
        if !self.input_paths.is_empty() && self.input_paths.len() != wanted {
            return Err(field(
                "input_paths",
                format!("`{}` takes {wanted} input files, got {}", self.command.name(), self.input_paths.len()),
            ));
        }
        if !(self.t_limit > 0.0 && self.t_limit.is_finite()) {
            return Err(field("t_limit", format!("must be > 0, got {}", self.t_limit)));
        }
        Ok(Validated { grid, times, triple })
    }

    /// `key = value` lines describing every effective setting.
    pub fn echo(&self) -> Vec<String> {
        let mut lines = vec![format!("command = {}", self.command.name())];
        if let Some((p, q)) = self.triple {
            lines.push(format!("triple.p = {p}"));
            lines.push(format!("triple.q = {q}"));
            if let Ok(t) = YoungTriple::new(p, q) {
                lines.push(format!("triple.r = {}", t.r()));
                lines.push(format!("regime = {}", t.regime()));
            }
        } else if let Some(reg) = self.regime {
            lines.push(format!("regime = {reg}"));
        }
        lines.push(format!("grid.x_min = {}", self.grid.x_min));
        lines.push(format!("grid.x_max = {}", self.grid.x_max));
        lines.push(format!("grid.n_points = {}", self.grid.n_points));
        lines.push(format!("time.t_min = {}", self.time.t_min));
        lines.push(format!("time.t_max = {}", self.time.t_max));
        if let Some(n) = self.time.steps {
            lines.push(format!("time.steps = {n}"));
        }
        let spacing = match self.time.spacing {
            Spacing::Geometric => "geometric",
            Spacing::Linear => "linear",
        };
        lines.push(format!("time.spacing = {spacing}"));
        lines.push(format!("time.t_limit = {}", self.t_limit));
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        lines.push(format!("seeds = {}", seeds.join(",")));
        if !self.input_paths.is_empty() {
            let paths: Vec<String> = self.input_paths.iter().map(|p| p.display().to_string()).collect();
            lines.push(format!("input_paths = {}", paths.join(",")));
        }
        if let Some((a, b, r)) = self.lemma {
            lines.push(format!("lemma.a = {a}"));
            lines.push(format!("lemma.b = {b}"));
            lines.push(format!("lemma.r = {r}"));
        }
        for (k, v) in self.tolerances.entries() {
            lines.push(format!("tol.{k} = {v:e}"));
        }
        lines
    }

    fn header(&self) -> String {
        let mut out = String::new();
        if self.timestamp {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            let _ = writeln!(out, "# generated_unix = {secs}");
        }
        for line in self.echo() {
            let _ = writeln!(out, "# {line}");
        }
        out
    }
}

/// Numerical objects derived from a valid [`ExperimentConfig`].
#[derive(Debug, Clone)]
pub struct Validated {
    pub grid: Grid,
    pub times: TimeGrid,
    pub triple: Option<YoungTriple>,
}

/// Invalid configuration, with the offending field and config-file line when known.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{}{field}: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn field(field: &str, message: String) -> ConfigError {
        ConfigError {
            line: None,
            field: field.into(),
            message,
        }
    }

    fn at(line: usize, field: &str, message: String) -> ConfigError {
        ConfigError {
            line: Some(line),
            field: field.into(),
            message,
        }
    }
}

/// Parses `1..20`, `3,5,8` or mixtures such as `1..4,10`. Ranges are inclusive.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let lo: u64 = a.trim().parse().map_err(|_| format!("bad seed range `{part}`"))?;
            let hi: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| format!("bad seed range `{part}`"))?;
            if hi < lo {
                return Err(format!("empty seed range `{part}`"));
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| format!("bad seed `{part}`"))?);
        }
    }
    if out.is_empty() {
        return Err("no seeds given".into());
    }
    Ok(out)
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse::<f64>()
        .map_err(|_| ConfigError::at(line, key, format!("expected a number, got `{v}`")))
}

/// Reads `key = value` lines into `config`. Blank lines and `#` comments are skipped.
pub fn apply_config_str(config: &mut ExperimentConfig, text: &str) -> Result<(), ConfigError> {
    let mut seen = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| ConfigError::at(line, body, "expected `key = value`".into()))?;
        let (key, value) = (key.trim(), value.trim());
        if let Some(first) = seen.insert(key.to_string(), line) {
            return Err(ConfigError::at(line, key, format!("duplicate key (first set on line {first})")));
        }
        let num = |v: &str| parse_f64(line, key, v);
        match key {
            "command" => {
                config.command = CommandKind::parse(value)
                    .ok_or_else(|| ConfigError::at(line, key, format!("unknown command `{value}`")))?
            }
            "triple.p" => {
                let q = config.triple.map_or(f64::NAN, |t| t.1);
                config.triple = Some((num(value)?, q));
            }
            "triple.q" => {
                let p = config.triple.map_or(f64::NAN, |t| t.0);
                config.triple = Some((p, num(value)?));
            }
            "triple.r" => {
                return Err(ConfigError::at(line, key, "r is derived from p and q; remove this key".into()))
            }
            "regime" => {
                config.regime = Some(value.parse().map_err(|e: crate::Error| ConfigError::at(line, key, e.to_string()))?)
            }
            "grid.x_min" => config.grid.x_min = num(value)?,
            "grid.x_max" => config.grid.x_max = num(value)?,
            "grid.n_points" => {
                config.grid.n_points = value
                    .parse()
                    .map_err(|_| ConfigError::at(line, key, format!("expected an integer, got `{value}`")))?
            }
            "time.t_min" => config.time.t_min = num(value)?,
            "time.t_max" => config.time.t_max = num(value)?,
            "time.t_limit" => config.t_limit = num(value)?,
            "time.steps" => {
                config.time.steps = Some(
                    value
                        .parse()
                        .map_err(|_| ConfigError::at(line, key, format!("expected an integer, got `{value}`")))?,
                )
            }
            "time.spacing" => {
                config.time.spacing = match value {
                    "geometric" => Spacing::Geometric,
                    "linear" => Spacing::Linear,
                    other => {
                        return Err(ConfigError::at(line, key, format!("expected geometric or linear, got `{other}`")))
                    }
                }
            }
            "seeds" => config.seeds = parse_seeds(value).map_err(|m| ConfigError::at(line, key, m))?,
            "input_paths" => {
                config.input_paths = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(PathBuf::from)
                    .collect()
            }
            "output_path" => config.output_path = Some(PathBuf::from(value)),
            "timestamp" => {
                config.timestamp = value
                    .parse()
                    .map_err(|_| ConfigError::at(line, key, format!("expected true or false, got `{value}`")))?
            }
            "lemma.a" | "lemma.b" | "lemma.r" => {
                let (mut a, mut b, mut r) = config.lemma.unwrap_or((f64::NAN, f64::NAN, f64::NAN));
                let x = num(value)?;
                match key {
                    "lemma.a" => a = x,
                    "lemma.b" => b = x,
                    _ => r = x,
                }
                config.lemma = Some((a, b, r));
            }
            k if k.starts_with("tol.") => config
                .tolerances
                .set(&k[4..], num(value)?)
                .map_err(|e| ConfigError::at(line, key, e.to_string()))?,
            other => return Err(ConfigError::at(line, other, "unknown key".into())),
        }
    }
    if let Some((p, q)) = config.triple {
        if p.is_nan() || q.is_nan() {
            let missing = if p.is_nan() { "triple.p" } else { "triple.q" };
            return Err(ConfigError::field(missing, "both triple.p and triple.q are required".into()));
        }
    }
    if let Some((a, b, r)) = config.lemma {
        if a.is_nan() || b.is_nan() || r.is_nan() {
            return Err(ConfigError::field("lemma", "lemma.a, lemma.b and lemma.r go together".into()));
        }
    }
    Ok(())
}

#[derive(Debug, Parser)]
#[command(name = "heatflow", version, about = "Sharp constants, heat-flow monotonicity sweeps and inequality audits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of duals, A constants, sharp constant, optimal pair and Γ at the optimum.
    Constants(Flags),
    /// Young flow traces for seeded or given pairs, written as CSV.
    Sweep(Flags),
    /// Sharp Young inequality on seeded or given pairs.
    Audit(Flags),
    /// Generalized Blachman inequality.
    Lemma(Flags),
    /// Entropy power inequality.
    Epi(Flags),
    /// Concavity of the entropy power along the heat flow.
    Concavity(Flags),
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    /// Config file of `key = value` lines; flags override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, value_parser = ["direct", "reverse"])]
    pub regime: Option<String>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], allow_negative_numbers = true)]
    pub domain: Option<Vec<f64>>,
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub t_steps: Option<usize>,
    #[arg(long, value_parser = ["geometric", "linear"])]
    pub spacing: Option<String>,
    /// Time at which rescaled limits are read.
    #[arg(long)]
    pub t_limit: Option<f64>,
    /// Seeds such as `7`, `1..20` or `1,4,9`.
    #[arg(long, visible_alias = "seed", value_name = "SEEDS")]
    pub seeds: Option<String>,
    /// CSV input (`x,value`); repeat for two functions.
    #[arg(long, value_name = "PATH")]
    pub input: Vec<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Tolerance override, e.g. `--tol mono=1e-9`.
    #[arg(long, value_name = "KEY=VAL")]
    pub tol: Vec<String>,
    /// Omit the timestamp line from output headers.
    #[arg(long)]
    pub no_timestamp: bool,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
}

impl Command {
    fn parts(&self) -> (CommandKind, &Flags) {
        match self {
            Command::Constants(f) => (CommandKind::Constants, f),
            Command::Sweep(f) => (CommandKind::Sweep, f),
            Command::Audit(f) => (CommandKind::Audit, f),
            Command::Lemma(f) => (CommandKind::Lemma, f),
            Command::Epi(f) => (CommandKind::Epi, f),
            Command::Concavity(f) => (CommandKind::Concavity, f),
        }
    }
}

/// Defaults, then the config file, then flags.
pub fn resolve(command: &Command) -> Result<ExperimentConfig, ConfigError> {
    let (kind, flags) = command.parts();
    let mut config = ExperimentConfig::new(kind);
    if let Some(path) = &flags.config {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError::field("config", format!("cannot read {}: {e}", path.display())))?;
        apply_config_str(&mut config, &text)?;
        if config.command != kind {
            return Err(ConfigError::field(
                "command",
                format!("config file is for `{}`, invoked as `{}`", config.command.name(), kind.name()),
            ));
        }
    }
    match (flags.p, flags.q) {
        (Some(p), Some(q)) => config.triple = Some((p, q)),
        (None, None) => {}
        (Some(p), None) => match config.triple {
            Some((_, q)) => config.triple = Some((p, q)),
            None => return Err(ConfigError::field("q", "--p needs --q".into())),
        },
        (None, Some(q)) => match config.triple {
            Some((p, _)) => config.triple = Some((p, q)),
            None => return Err(ConfigError::field("p", "--q needs --p".into())),
        },
    }
    if let Some(reg) = &flags.regime {
        config.regime = Some(reg.parse().map_err(|e: crate::Error| ConfigError::field("regime", e.to_string()))?);
    }
    if let Some(n) = flags.grid_points {
        config.grid.n_points = n;
    }
    if let Some(d) = &flags.domain {
        config.grid.x_min = d[0];
        config.grid.x_max = d[1];
    }
    if let Some(t) = flags.t_min {
        config.time.t_min = t;
    }
    if let Some(t) = flags.t_max {
        config.time.t_max = t;
    }
    if let Some(n) = flags.t_steps {
        config.time.steps = Some(n);
    }
    if let Some(s) = &flags.spacing {
        config.time.spacing = if s == "linear" { Spacing::Linear } else { Spacing::Geometric };
    }
    if let Some(t) = flags.t_limit {
        config.t_limit = t;
    }
    if let Some(s) = &flags.seeds {
        config.seeds = parse_seeds(s).map_err(|m| ConfigError::field("seeds", m))?;
    }
    if !flags.input.is_empty() {
        config.input_paths = flags.input.clone();
    }
    if let Some(o) = &flags.output {
        config.output_path = Some(o.clone());
    }
    for kv in &flags.tol {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| ConfigError::field("tol", format!("expected KEY=VAL, got `{kv}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| ConfigError::field("tol", format!("`{kv}` has a non-numeric value")))?;
        config
            .tolerances
            .set(k.trim(), v)
            .map_err(|e| ConfigError::field("tol", e.to_string()))?;
    }
    if flags.no_timestamp {
        config.timestamp = false;
    }
    if flags.a.is_some() || flags.b.is_some() || flags.r.is_some() {
        let (a0, b0, r0) = config.lemma.unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        let lemma = (flags.a.unwrap_or(a0), flags.b.unwrap_or(b0), flags.r.unwrap_or(r0));
        if lemma.0.is_nan() || lemma.1.is_nan() || lemma.2.is_nan() {
            return Err(ConfigError::field("lemma", "--a, --b and --r go together".into()));
        }
        config.lemma = Some(lemma);
    }
    Ok(config)
}

/// Formats `x` with 12 significant digits, switching to exponent form outside `[1e-4, 1e12)`.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..12).contains(&mag) {
        format!("{:.*}", (11 - mag) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub reports: Vec<VerificationReport>,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }

    pub fn exit_code(&self) -> u8 {
        if self.passed() {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }
}

/// Why a run stopped.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Numerical(#[from] crate::Error),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), crate::Error> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Renders the constants table.
pub fn constants_table(config: &ExperimentConfig, triples: &[YoungTriple]) -> String {
    let mut out = config.header();
    let cols = [
        "p", "q", "r", "p_dual", "q_dual", "r_dual", "A_p", "A_q", "A_r_dual", "sharp", "alpha", "beta", "gamma_opt",
    ];
    let _ = writeln!(out, "{}", cols.map(|c| format!("{c:>20}")).join(""));
    for t in triples {
        let pair = optimal_diffusion(t);
        let a = |m: f64| a_constant(m).unwrap_or(f64::NAN);
        let row = [
            t.p(),
            t.q(),
            t.r(),
            t.p_dual(),
            t.q_dual(),
            t.r_dual(),
            a(t.p()),
            a(t.q()),
            a(t.r_dual()),
            sharp_young_constant(t, 1),
            pair.alpha,
            pair.beta,
            gamma_function(pair.alpha, pair.beta, t),
        ];
        let _ = writeln!(out, "{}", row.map(|x| format!("{:>20}", sig12(x))).join(""));
    }
    out
}

fn load_inputs(config: &ExperimentConfig) -> Result<Vec<GridFunction>, crate::Error> {
    config.input_paths.iter().map(GridFunction::read_csv).collect()
}

/// Either the given input files (one work item) or one item per seed.
enum Work {
    Inputs(Vec<GridFunction>),
    Seed(u64),
}

fn work_items(config: &ExperimentConfig) -> Result<Vec<Work>, crate::Error> {
    if config.input_paths.is_empty() {
        Ok(config.seeds.iter().map(|&s| Work::Seed(s)).collect())
    } else {
        Ok(vec![Work::Inputs(load_inputs(config)?)])
    }
}

fn pair_for(work: &Work, grid: &Grid) -> Result<(GridFunction, GridFunction), crate::Error> {
    match work {
        Work::Inputs(fs) => Ok((fs[0].clone(), fs[1].clone())),
        Work::Seed(s) => random_pair_on(grid, *s),
    }
}

fn seeded_path(base: &Path, seed: u64) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}_seed{seed}.{}", ext.to_string_lossy()),
        None => format!("{stem}_seed{seed}"),
    };
    base.with_file_name(name)
}

/// Runs one validated configuration, writing its artifacts.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let v = config.validate()?;
    let tol = config.tolerances;
    let opts = FlowOptions {
        tolerances: tol,
        t_limit: config.t_limit,
    };
    let out_path = config.output_path.as_deref();
    match config.command {
        CommandKind::Constants => {
            let triples = match v.triple {
                Some(t) => vec![t],
                None => DEFAULT_TABLE
                    .iter()
                    .map(|&(p, q)| YoungTriple::new(p, q).expect("default triples are valid"))
                    .collect(),
            };
            write_output(out_path, &constants_table(config, &triples))?;
            Ok(RunOutcome {
                reports: Vec::new(),
                files: out_path.map(Path::to_path_buf).into_iter().collect(),
            })
        }
        CommandKind::Sweep => {
            let triple = v.triple.expect("validated");
            let pair = optimal_diffusion(&triple);
            let items = work_items(config)?;
            let checks: Vec<_> = items
                .par_iter()
                .map(|w| {
                    let (u, v0) = pair_for(w, &v.grid)?;
                    young_flow_check(&u, &v0, &triple, &pair, &v.times, &opts)
                })
                .collect::<Result<_, _>>()?;
            let base = config.output_path.clone().unwrap_or_else(|| PathBuf::from("trace.csv"));
            let mut files = Vec::new();
            let mut reports = Vec::new();
            let header = config.header();
            for (w, check) in items.iter().zip(checks) {
                let path = match w {
                    Work::Seed(s) if items.len() > 1 => seeded_path(&base, *s),
                    _ => base.clone(),
                };
                let mut buf = header.clone().into_bytes();
                check.trace.write_csv_to(&mut buf)?;
                fs::write(&path, buf).map_err(crate::Error::from)?;
                files.push(path);
                reports.extend(check.reports);
            }
            let jsonl: String = reports.iter().map(|r| r.to_json_line() + "\n").collect();
            std::io::stdout().write_all(jsonl.as_bytes()).map_err(crate::Error::from)?;
            Ok(RunOutcome { reports, files })
        }
        CommandKind::Audit | CommandKind::Lemma | CommandKind::Epi | CommandKind::Concavity => {
            let items = work_items(config)?;
            let batches: Vec<Vec<VerificationReport>> = items
                .par_iter()
                .map(|w| -> Result<Vec<VerificationReport>, crate::Error> {
                    match config.command {
                        CommandKind::Audit => {
                            let (f, g) = pair_for(w, &v.grid)?;
                            Ok(vec![young_check(&f, &g, &v.triple.expect("validated"), &tol)?])
                        }
                        CommandKind::Lemma => {
                            let (f, g) = pair_for(w, &v.grid)?;
                            let (a, b, r) = config.lemma.expect("validated");
                            Ok(vec![blachman_lemma_check(&f, &g, a, b, r, &tol)?])
                        }
                        CommandKind::Epi => {
                            let (f, g) = pair_for(w, &v.grid)?;
                            Ok(vec![epi_check(&f, &g, &tol)?])
                        }
                        _ => {
                            let f = match w {
                                Work::Inputs(fs) => fs[0].clone(),
                                Work::Seed(s) => {
                                    random_density_on(&v.grid, *s, DensityFamily::ALL[(*s % 3) as usize])?
                                }
                            };
                            Ok(entropy_power_concavity_check(&f, &v.times, &opts)?.reports)
                        }
                    }
                })
                .collect::<Result<_, _>>()?;
            let reports: Vec<VerificationReport> = batches.into_iter().flatten().collect();
            let mut text = config.header();
            for r in &reports {
                text.push_str(&r.to_json_line());
                text.push('\n');
            }
            write_output(out_path, &text)?;
            Ok(RunOutcome {
                reports,
                files: out_path.map(Path::to_path_buf).into_iter().collect(),
            })
        }
    }
}

/// Parses `args`, runs, and maps the outcome to an exit status.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK });
        }
    };
    let result = resolve(&cli.command).map_err(RunError::from).and_then(|c| run(&c));
    match result {
        Ok(outcome) => {
            for r in outcome.reports.iter().filter(|r| !r.passed) {
                log::warn!("{} failed: margin {:e} < -{:e}", r.check_name, r.margin, r.tolerance);
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! Run configuration: a flat `key=value` format with optional per-command
//! sections.
//!
//! ```text
//! # shared by every command
//! gamma = 0.05
//! kappa = 100
//!
//! [sweep-scaling]
//! s_grid = 0.5:0.25:5.0
//! kappa_list = 25, 50, 100, 200
//! ```
//!
//! Keys before the first section apply to every command; keys inside
//! `[name]` only apply when `name` is the selected command. Several pairs may
//! share a line separated by commas (`command=simulate, gamma=0.05`); a comma
//! piece without `=` continues the previous value, so lists need no quoting.
//! Lists are comma separated or written as an inclusive range `start:step:stop`.

use std::fmt;
use std::path::PathBuf;

use crate::bitflip::LogicalState;
use crate::experiments::{
    self, SimulationConfig, DEFAULT_COOLING_SCALE, DEFAULT_GAMMA, DEFAULT_HORIZON, DEFAULT_KAPPA,
};
use crate::lindblad::DEFAULT_OUTPUT_POINTS;
use crate::zeno::ZenoConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    SweepScaling,
    SweepSurface,
    Zeno,
    Verify,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::Simulate,
        Command::SweepScaling,
        Command::SweepSurface,
        Command::Zeno,
        Command::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::SweepScaling => "sweep-scaling",
            Command::SweepSurface => "sweep-surface",
            Command::Zeno => "zeno",
            Command::Verify => "verify",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| ConfigError::InvalidCommand(s.to_string()))
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn command_list() -> String {
    Command::ALL.map(Command::name).join(", ")
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("`{key}` expects {expected}, got `{value}`")]
    TypeMismatch {
        key: String,
        expected: &'static str,
        value: String,
    },
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("invalid command `{0}`; expected one of: {list}", list = command_list())]
    InvalidCommand(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("line {line}: cannot parse `{text}`")]
    Syntax { line: usize, text: String },
}

/// Fully validated run description.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub gamma: f64,
    pub kappa: f64,
    /// Cooling rate; defaults to `2.5 * kappa`.
    pub lambda: f64,
    /// Integration horizon `T`.
    pub horizon: f64,
    pub alpha: f64,
    pub beta: f64,
    pub errors_on_ancillas: bool,
    pub step_hint: Option<f64>,
    pub output_points: usize,
    pub s_grid: Vec<f64>,
    pub kappa_list: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    pub kappa_grid: Vec<f64>,
    pub epsilon: f64,
    pub zeno_time: f64,
    pub cycles: Vec<usize>,
    pub n_env: usize,
    pub env_state: usize,
    /// Output directory for CSVs; `None` means the current directory.
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults for every key except `command`.
    pub fn defaults(command: Command) -> Self {
        let zeno = ZenoConfig::default();
        Self {
            command,
            gamma: DEFAULT_GAMMA,
            kappa: DEFAULT_KAPPA,
            lambda: DEFAULT_COOLING_SCALE * DEFAULT_KAPPA,
            horizon: DEFAULT_HORIZON,
            alpha: 1.0,
            beta: 0.0,
            errors_on_ancillas: false,
            step_hint: None,
            output_points: DEFAULT_OUTPUT_POINTS,
            s_grid: experiments::default_s_grid(),
            kappa_list: experiments::default_kappa_list(),
            gamma_grid: experiments::default_gamma_grid(),
            kappa_grid: experiments::default_kappa_grid(),
            epsilon: zeno.coupling,
            zeno_time: zeno.total_time,
            cycles: vec![8, 16, 32, 64],
            n_env: zeno.n_env,
            env_state: zeno.env_state,
            out: None,
        }
    }

    pub fn logical_state(&self) -> crate::Result<LogicalState> {
        LogicalState::real(self.alpha, self.beta)
    }

    pub fn simulation(&self) -> crate::Result<SimulationConfig> {
        let mut cfg = SimulationConfig::with_lambda(self.gamma, self.kappa, self.lambda);
        cfg.horizon = self.horizon;
        cfg.psi0 = self.logical_state()?;
        cfg.errors_on_ancillas = self.errors_on_ancillas;
        cfg.step_hint = self.step_hint;
        cfg.output_points = self.output_points;
        Ok(cfg)
    }

    /// One Zeno configuration per entry of `cycles`.
    pub fn zeno_configs(&self) -> crate::Result<Vec<ZenoConfig>> {
        let psi0 = self.logical_state()?;
        Ok(self
            .cycles
            .iter()
            .map(|&cycles| ZenoConfig {
                n_env: self.n_env,
                coupling: self.epsilon,
                total_time: self.zeno_time,
                cycles,
                psi0,
                env_state: self.env_state,
                ..ZenoConfig::default()
            })
            .collect())
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |msg: String| Err(ConfigError::Invalid(msg));
        for (name, v) in [
            ("gamma", self.gamma),
            ("kappa", self.kappa),
            ("lambda", self.lambda),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return invalid(format!("{name} must be a finite rate >= 0, got {v}"));
            }
        }
        for (name, grid) in [
            ("s_grid", &self.s_grid),
            ("kappa_list", &self.kappa_list),
            ("gamma_grid", &self.gamma_grid),
            ("kappa_grid", &self.kappa_grid),
        ] {
            if grid.is_empty() {
                return invalid(format!("{name} must not be empty"));
            }
            if let Some(v) = grid.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
                return invalid(format!("{name} entries must be finite and >= 0, got {v}"));
            }
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return invalid(format!("T must be positive, got {}", self.horizon));
        }
        if let Some(h) = self.step_hint {
            if !(h > 0.0 && h.is_finite()) {
                return invalid(format!("step_hint must be positive, got {h}"));
            }
        }
        if self.output_points == 0 {
            return invalid("output_points must be >= 1".into());
        }
        if let Err(e) = self.logical_state() {
            return invalid(format!("initial amplitudes: {e}"));
        }
        if !self.epsilon.is_finite() {
            return invalid(format!("epsilon must be finite, got {}", self.epsilon));
        }
        if !(self.zeno_time > 0.0 && self.zeno_time.is_finite()) {
            return invalid(format!(
                "zeno_time must be positive, got {}",
                self.zeno_time
            ));
        }
        if self.cycles.is_empty() || self.cycles.contains(&0) {
            return invalid("cycles must be a nonempty list of positive integers".into());
        }
        if self.n_env == 0 {
            return invalid("n_env must be >= 1".into());
        }
        if self.env_state >= 1 << self.n_env {
            return invalid(format!(
                "env_state {} out of range for {} environment qubits",
                self.env_state, self.n_env
            ));
        }
        Ok(())
    }
}

const KEYS: [&str; 20] = [
    "command",
    "gamma",
    "kappa",
    "lambda",
    "T",
    "alpha",
    "beta",
    "errors_on_ancillas",
    "step_hint",
    "output_points",
    "s_grid",
    "kappa_list",
    "gamma_grid",
    "kappa_grid",
    "epsilon",
    "zeno_time",
    "cycles",
    "n_env",
    "env_state",
    "out",
];

struct Entry {
    section: Option<Command>,
    key: String,
    value: String,
}

fn split_pairs(line: &str, line_no: usize) -> Result<Vec<(String, String)>, ConfigError> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for piece in line.split(',') {
        match piece.split_once('=') {
            Some((k, v)) => pairs.push((k.trim().to_string(), v.trim().to_string())),
            None => match pairs.last_mut() {
                Some((_, v)) => {
                    v.push(',');
                    v.push_str(piece.trim());
                }
                None => {
                    return Err(ConfigError::Syntax {
                        line: line_no,
                        text: line.to_string(),
                    })
                }
            },
        }
    }
    Ok(pairs)
}

fn lex_file(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut entries = Vec::new();
    let mut section = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                line: idx + 1,
                text: raw.to_string(),
            })?;
            section = Some(Command::parse(name.trim())?);
            continue;
        }
        for (key, value) in split_pairs(line, idx + 1)? {
            entries.push(Entry {
                section,
                key,
                value,
            });
        }
    }
    Ok(entries)
}

fn mismatch(key: &str, expected: &'static str, value: &str) -> ConfigError {
    ConfigError::TypeMismatch {
        key: key.to_string(),
        expected,
        value: value.to_string(),
    }
}

fn parse_real(key: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| !v.is_nan())
        .ok_or_else(|| mismatch(key, "a real number", value))
}

fn parse_count(key: &str, value: &str) -> Result<usize, ConfigError> {
    value
        .trim()
        .parse::<usize>()
        .map_err(|_| mismatch(key, "a non-negative integer", value))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.trim() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(mismatch(key, "a boolean", value)),
    }
}

fn parse_real_list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    let value = value.trim();
    let parts: Vec<&str> = value.split(':').collect();
    if parts.len() == 3 {
        let [start, step, stop] = [parts[0], parts[1], parts[2]].map(|p| parse_real(key, p));
        let (start, step, stop) = (start?, step?, stop?);
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(mismatch(
                key,
                "a range start:step:stop with step > 0",
                value,
            ));
        }
        return Ok(experiments::uniform_grid(start, step, stop));
    }
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|p| parse_real(key, p).map_err(|_| mismatch(key, "a list of real numbers", value)))
        .collect()
}

fn parse_count_list(key: &str, value: &str) -> Result<Vec<usize>, ConfigError> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|p| {
            parse_count(key, p).map_err(|_| mismatch(key, "a list of non-negative integers", value))
        })
        .collect()
}

fn assign(cfg: &mut RunConfig, key: &str, value: &str) -> Result<(), ConfigError> {
    match key {
        "command" => cfg.command = Command::parse(value)?,
        "gamma" => cfg.gamma = parse_real(key, value)?,
        "kappa" => cfg.kappa = parse_real(key, value)?,
        "lambda" => cfg.lambda = parse_real(key, value)?,
        "T" => cfg.horizon = parse_real(key, value)?,
        "alpha" => cfg.alpha = parse_real(key, value)?,
        "beta" => cfg.beta = parse_real(key, value)?,
        "errors_on_ancillas" => cfg.errors_on_ancillas = parse_bool(key, value)?,
        "step_hint" => cfg.step_hint = Some(parse_real(key, value)?),
        "output_points" => cfg.output_points = parse_count(key, value)?,
        "s_grid" => cfg.s_grid = parse_real_list(key, value)?,
        "kappa_list" => cfg.kappa_list = parse_real_list(key, value)?,
        "gamma_grid" => cfg.gamma_grid = parse_real_list(key, value)?,
        "kappa_grid" => cfg.kappa_grid = parse_real_list(key, value)?,
        "epsilon" => cfg.epsilon = parse_real(key, value)?,
        "zeno_time" => cfg.zeno_time = parse_real(key, value)?,
        "cycles" => cfg.cycles = parse_count_list(key, value)?,
        "n_env" => cfg.n_env = parse_count(key, value)?,
        "env_state" => cfg.env_state = parse_count(key, value)?,
        "out" => cfg.out = Some(PathBuf::from(value.trim())),
        _ => return Err(ConfigError::UnknownKey(key.to_string())),
    }
    Ok(())
}

/// Parse an optional config file plus `key=value` overrides (later wins).
///
/// Only `command` is required; everything else falls back to the library
/// defaults, with `lambda = 2.5 * kappa` unless `lambda` is given.
pub fn parse_config(
    file_text: Option<&str>,
    overrides: &[String],
) -> Result<RunConfig, ConfigError> {
    let mut entries = match file_text {
        Some(text) => lex_file(text)?,
        None => Vec::new(),
    };
    for (i, o) in overrides.iter().enumerate() {
        let (key, value) = o.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            text: o.clone(),
        })?;
        entries.push(Entry {
            section: None,
            key: key.trim().to_string(),
            value: value.trim().to_string(),
        });
    }
    if let Some(e) = entries.iter().find(|e| !KEYS.contains(&e.key.as_str())) {
        return Err(ConfigError::UnknownKey(e.key.clone()));
    }

    // The command decides which sections apply, so resolve it first.
    let mut command = None;
    for e in entries.iter().filter(|e| e.key == "command") {
        if e.section.is_some() {
            return Err(ConfigError::Invalid(
                "`command` cannot be set inside a section".into(),
            ));
        }
        command = Some(Command::parse(&e.value)?);
    }
    let command = command.ok_or(ConfigError::MissingKey("command"))?;

    let mut cfg = RunConfig::defaults(command);
    let mut lambda_given = false;
    for e in entries
        .iter()
        .filter(|e| e.section.is_none() || e.section == Some(command))
    {
        assign(&mut cfg, &e.key, &e.value)?;
        lambda_given |= e.key == "lambda";
    }
    if !lambda_given {
        cfg.lambda = DEFAULT_COOLING_SCALE * cfg.kappa;
    }
    cfg.validate()?;
    Ok(cfg)
}

//! Flat `key = value` configuration with command-line overrides.
//!
//! ```text
//! # comment
//! path_loss_exponent = 4
//! desired = kms:kappa=1,mu=2,m=1,sigma_db=4
//! ```
//!
//! Every key has a `--kebab-case` flag that wins over the file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use pppcov_core::coverage::NetworkConfig;
use pppcov_core::fading::{DoubleShadowedParams, DEFAULT_GHQ_ORDER};
use pppcov_core::interference::{parse_desired, parse_model, FadingModel};
use pppcov_core::mathkit::MAX_RULE_ORDER;
use pppcov_core::simulator::{SimConfig, DEFAULT_WINDOW_FACTOR, MIN_WINDOW_FACTOR};

use crate::error::CliError;

pub const KEYS: &[&str] = &[
    "density",
    "path_loss_exponent",
    "tx_power",
    "desired",
    "interferer",
    "ghq_order",
    "theta_db",
    "theta_db_start",
    "theta_db_stop",
    "theta_db_step",
    "check",
    "mc",
    "realizations",
    "window_radius_factor",
    "seed",
    "workers",
    "h_min",
    "h_max",
    "points",
    "exact",
    "quick",
    "output",
    "format",
];

pub const DEFAULT_DESIRED: &str = "kms:kappa=1,mu=2,m=1,sigma_db=4";
pub const THREADS_ENV: &str = "PPPCOV_THREADS";

#[derive(Debug, Clone)]
pub enum Origin {
    File { path: PathBuf, line: usize },
    Flag(&'static str),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File { path, line } => write!(f, "{}:{line}", path.display()),
            Origin::Flag(key) => write!(f, "--{}", key.replace('_', "-")),
        }
    }
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    origin: Origin,
}

/// Unvalidated settings with the place each one came from.
#[derive(Debug, Default)]
pub struct RawConfig {
    entries: BTreeMap<&'static str, Entry>,
}

fn known_key(key: &str) -> Option<&'static str> {
    KEYS.iter().copied().find(|k| *k == key)
}

impl RawConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let origin = Origin::File {
                path: path.to_path_buf(),
                line: i + 1,
            };
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("{origin}: expected 'key = value', got '{line}'"))
            })?;
            let key = key.trim();
            let known = known_key(key)
                .ok_or_else(|| CliError::Config(format!("{origin}: unknown key '{key}'")))?;
            if let Some(prev) = raw.entries.get(known) {
                return Err(CliError::Config(format!(
                    "{origin}: '{key}' already set at {}",
                    prev.origin
                )));
            }
            raw.entries.insert(
                known,
                Entry {
                    value: value.trim().to_string(),
                    origin,
                },
            );
        }
        Ok(raw)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, path)
    }

    /// Overrides `key` with a command-line value.
    pub fn set_flag(&mut self, key: &'static str, value: String) {
        debug_assert!(known_key(key).is_some(), "{key}");
        self.entries.insert(
            key,
            Entry {
                value,
                origin: Origin::Flag(key),
            },
        );
    }

    fn error(&self, key: &'static str, msg: impl fmt::Display) -> CliError {
        match self.entries.get(key) {
            Some(e) => CliError::Config(format!("{}: {msg}", e.origin)),
            None => CliError::Config(format!("{key}: {msg}")),
        }
    }

    fn get<T: FromStr>(&self, key: &'static str) -> Result<Option<T>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(Some)
                .map_err(|_| self.error(key, format!("cannot parse {key} = '{}'", e.value))),
        }
    }

    fn get_or<T: FromStr>(&self, key: &'static str, default: T) -> Result<T, CliError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn flag(&self, key: &'static str) -> Result<bool, CliError> {
        match self.entries.get(key).map(|e| e.value.to_ascii_lowercase()) {
            None => Ok(false),
            Some(v) => match v.as_str() {
                "true" | "yes" | "1" | "on" => Ok(true),
                "false" | "no" | "0" | "off" => Ok(false),
                _ => Err(self.error(key, format!("expected a boolean, got '{v}'"))),
            },
        }
    }

    fn require(&self, key: &'static str, ok: bool, msg: impl fmt::Display) -> Result<(), CliError> {
        if ok {
            Ok(())
        } else {
            Err(self.error(key, msg))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Fully validated run settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub net: NetworkConfig,
    pub desired: DoubleShadowedParams,
    pub interferer: Arc<dyn FadingModel>,
    pub ghq_order: usize,
    pub thetas_db: Vec<f64>,
    pub check: bool,
    pub mc: bool,
    pub sim: SimConfig,
    pub h_grid: (f64, f64, usize),
    pub exact: bool,
    pub quick: bool,
    pub output: Option<PathBuf>,
    pub format: Format,
}

/// start, start + step, ... up to stop (inclusive, with a small slack).
pub fn theta_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| start + k as f64 * step).collect()
}

/// Worker cap from the environment, if set.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got '{v}'"
            ))),
        },
    }
}

impl RunConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, CliError> {
        let density: f64 = raw.get_or("density", 1e-7)?;
        raw.require(
            "density",
            density > 0.0 && density.is_finite(),
            format!("density must be > 0, got {density}"),
        )?;
        let alpha: f64 = raw.get_or("path_loss_exponent", 4.0)?;
        raw.require(
            "path_loss_exponent",
            alpha > 2.0 && alpha.is_finite(),
            format!("path_loss_exponent must exceed 2, got {alpha}"),
        )?;
        let power: f64 = raw.get_or("tx_power", 1.0)?;
        raw.require(
            "tx_power",
            power > 0.0 && power.is_finite(),
            format!("tx_power must be > 0, got {power}"),
        )?;
        let net = NetworkConfig::new(density, alpha, power)?;

        let desired_spec: String = raw.get_or("desired", DEFAULT_DESIRED.to_string())?;
        let desired = parse_desired(&desired_spec).map_err(|e| raw.error("desired", e))?;
        let interferer_spec: String = raw.get_or("interferer", "rayleigh".to_string())?;
        let interferer = parse_model(&interferer_spec).map_err(|e| raw.error("interferer", e))?;

        let ghq_order: usize = raw.get_or("ghq_order", DEFAULT_GHQ_ORDER)?;
        raw.require(
            "ghq_order",
            (1..=MAX_RULE_ORDER).contains(&ghq_order),
            format!("ghq_order must be in 1..={MAX_RULE_ORDER}, got {ghq_order}"),
        )?;

        let thetas_db = match raw.get::<f64>("theta_db")? {
            Some(t) => {
                raw.require("theta_db", t.is_finite(), "theta_db must be finite")?;
                vec![t]
            }
            None => {
                let start: f64 = raw.get_or("theta_db_start", -10.0)?;
                let stop: f64 = raw.get_or("theta_db_stop", 20.0)?;
                let step: f64 = raw.get_or("theta_db_step", 1.0)?;
                raw.require(
                    "theta_db_step",
                    step > 0.0 && step.is_finite(),
                    format!("theta_db_step must be > 0, got {step}"),
                )?;
                raw.require(
                    "theta_db_start",
                    start.is_finite() && stop.is_finite() && start <= stop,
                    format!("theta_db_start ({start}) must not exceed theta_db_stop ({stop})"),
                )?;
                theta_grid(start, stop, step)
            }
        };

        let realizations: u64 = raw.get_or("realizations", 100_000)?;
        raw.require(
            "realizations",
            realizations >= 1,
            "realizations must be >= 1",
        )?;
        let factor: f64 = raw.get_or("window_radius_factor", DEFAULT_WINDOW_FACTOR)?;
        raw.require(
            "window_radius_factor",
            factor >= MIN_WINDOW_FACTOR && factor.is_finite(),
            format!("window_radius_factor must be >= {MIN_WINDOW_FACTOR}, got {factor}"),
        )?;
        let seed: u64 = raw.get_or("seed", 1)?;
        let available = std::thread::available_parallelism().map_or(1, |n| n.get());
        let mut workers: usize = raw.get_or("workers", available)?;
        raw.require("workers", workers >= 1, "workers must be >= 1")?;
        if let Some(cap) = thread_cap()? {
            workers = workers.min(cap);
        }
        let sim = SimConfig::new(realizations, factor, seed, workers)?;

        let h_min: f64 = raw.get_or("h_min", 0.01)?;
        let h_max: f64 = raw.get_or("h_max", 20.0)?;
        let points: usize = raw.get_or("points", 400)?;
        raw.require(
            "h_min",
            h_min >= 0.0 && h_min < h_max && h_max.is_finite(),
            format!("need 0 <= h_min < h_max, got {h_min}, {h_max}"),
        )?;
        raw.require(
            "points",
            points >= 2,
            format!("points must be >= 2, got {points}"),
        )?;
        let exact = raw.flag("exact")?;
        raw.require(
            "h_min",
            !(exact && h_min == 0.0),
            "the exact density needs h_min > 0",
        )?;

        let format = match raw
            .get_or("format", "csv".to_string())?
            .to_ascii_lowercase()
            .as_str()
        {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => {
                return Err(raw.error(
                    "format",
                    format!("format must be csv or json, got '{other}'"),
                ))
            }
        };

        Ok(Self {
            net,
            desired,
            interferer,
            ghq_order,
            thetas_db,
            check: raw.flag("check")?,
            mc: raw.flag("mc")?,
            sim,
            h_grid: (h_min, h_max, points),
            exact,
            quick: raw.flag("quick")?,
            output: raw.get::<String>("output")?.map(PathBuf::from),
            format,
        })
    }
}

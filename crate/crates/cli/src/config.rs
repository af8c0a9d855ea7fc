//! Scenario files.
//!
//! TOML with flat keys; `mc.trials` and `mc.seed` may be written dotted or
//! as an `[mc]` table. See `examples/scenario.toml` for an annotated file.

use std::fs;
use std::path::{Path, PathBuf};

use onc_core::scenario::{DEFAULT_SEED, DEFAULT_TRIALS};
use onc_core::{NoiseMode, ScenarioConfig, SirSpec};
use toml::{Table, Value};

use crate::error::CliError;

const TOP_KEYS: [&str; 6] = [
    "k_interferers",
    "rate_bits",
    "sir_db",
    "mode",
    "snr_db",
    "mc",
];
const MC_KEYS: [&str; 2] = ["trials", "seed"];
const LINK_KEYS: [&str; 3] = ["bs_rs", "bs_u1", "rs_u1"];

/// A validated scenario plus where its seed came from.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub scenario: ScenarioConfig,
    pub seed_defaulted: bool,
    pub path: PathBuf,
}

impl LoadedConfig {
    /// `# key=value` metadata shared by every CSV the CLI writes.
    pub fn metadata(&self) -> Vec<(&'static str, String)> {
        let s = &self.scenario;
        vec![
            ("generator", format!("onc {}", env!("CARGO_PKG_VERSION"))),
            ("seed", s.seed.to_string()),
            (
                "seed_source",
                if self.seed_defaulted {
                    "default"
                } else {
                    "config"
                }
                .to_string(),
            ),
            ("trials", s.trials.to_string()),
            ("mode", s.noise.to_string()),
            ("k_interferers", s.k_interferers.to_string()),
        ]
    }
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text, path)
}

pub fn parse_config(text: &str, path: &Path) -> Result<LoadedConfig, CliError> {
    let err = |msg: String| CliError::Config {
        path: path.to_path_buf(),
        msg,
    };
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| err(e.to_string()))?;

    for key in table.keys() {
        if !TOP_KEYS.contains(&key.as_str()) {
            return Err(err(format!("unknown key `{key}`")));
        }
    }

    let k = match table.get("k_interferers") {
        None => return Err(err("missing key `k_interferers`".into())),
        Some(Value::Integer(k)) if *k >= 1 => *k as usize,
        Some(v) => {
            return Err(err(format!(
                "`k_interferers` must be a positive integer, got {v}"
            )))
        }
    };
    let rate_bits = match table.get("rate_bits") {
        None => return Err(err("missing key `rate_bits`".into())),
        Some(v) => {
            number(v).ok_or_else(|| err(format!("`rate_bits` must be a number, got {v}")))?
        }
    };
    let sir = match table.get("sir_db") {
        None => return Err(err("missing key `sir_db`".into())),
        Some(Value::Table(links)) => per_link(links).map_err(err)?,
        Some(v) => SirSpec::Equal(
            number(v).ok_or_else(|| err(format!("`sir_db` must be a number or table, got {v}")))?,
        ),
    };

    let mode = match table.get("mode") {
        None => "interference-limited",
        Some(Value::String(m)) => m.as_str(),
        Some(v) => return Err(err(format!("`mode` must be a string, got {v}"))),
    };
    let snr_db = table
        .get("snr_db")
        .map(|v| number(v).ok_or_else(|| err(format!("`snr_db` must be a number, got {v}"))))
        .transpose()?;
    let noise = match (mode, snr_db) {
        ("interference-limited", _) => NoiseMode::InterferenceLimited,
        ("finite-snr", Some(db)) => NoiseMode::finite_snr_db(db),
        ("finite-snr", None) => {
            return Err(err("`snr_db` is required when mode = \"finite-snr\"".into()))
        }
        (other, _) => {
            return Err(err(format!(
                "`mode` must be \"interference-limited\" or \"finite-snr\", got \"{other}\""
            )))
        }
    };

    let empty = Table::new();
    let mc = match table.get("mc") {
        None => &empty,
        Some(Value::Table(t)) => t,
        Some(v) => return Err(err(format!("`mc` must be a table, got {v}"))),
    };
    for key in mc.keys() {
        if !MC_KEYS.contains(&key.as_str()) {
            return Err(err(format!("unknown key `mc.{key}`")));
        }
    }
    let trials = match mc.get("trials") {
        None => DEFAULT_TRIALS,
        Some(Value::Integer(n)) if *n >= 1 => *n as u64,
        Some(v) => {
            return Err(err(format!(
                "`mc.trials` must be a positive integer, got {v}"
            )))
        }
    };
    let (seed, seed_defaulted) = match mc.get("seed") {
        None => (DEFAULT_SEED, true),
        Some(Value::Integer(n)) if *n >= 0 => (*n as u64, false),
        Some(v) => {
            return Err(err(format!(
                "`mc.seed` must be a non-negative integer, got {v}"
            )))
        }
    };

    let scenario = ScenarioConfig {
        k_interferers: k,
        rate_bits,
        sir,
        noise,
        trials,
        seed,
    }
    .validated()
    .map_err(|e| err(e.to_string()))?;
    Ok(LoadedConfig {
        scenario,
        seed_defaulted,
        path: path.to_path_buf(),
    })
}

fn number(v: &Value) -> Option<f64> {
    match v {
        Value::Integer(i) => Some(*i as f64),
        Value::Float(f) => Some(*f),
        _ => None,
    }
}

fn per_link(links: &Table) -> Result<SirSpec, String> {
    for key in links.keys() {
        if !LINK_KEYS.contains(&key.as_str()) {
            return Err(format!("unknown key `sir_db.{key}`"));
        }
    }
    let vector = |name: &str| -> Result<Vec<f64>, String> {
        match links.get(name) {
            None => Err(format!("missing key `sir_db.{name}`")),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    number(v).ok_or_else(|| format!("`sir_db.{name}` must hold numbers, got {v}"))
                })
                .collect(),
            Some(v) => Err(format!("`sir_db.{name}` must be an array, got {v}")),
        }
    };
    Ok(SirSpec::PerLink {
        bs_rs: vector("bs_rs")?,
        bs_u1: vector("bs_u1")?,
        rs_u1: vector("rs_u1")?,
    })
}

//! Flat `key = value` configuration and typed parsing of CLI values.

use std::collections::BTreeMap;

use ctcsim_core::{state_from_bloch, BlochVector, DaviesParams, DensityOperator, Grid, PureState};

use crate::CliError;

pub const KEYS: &[&str] = &[
    "p", "A", "G", "omega", "t", "state", "circuit", "input", "resource", "trials", "seed", "out",
    "precision", "rank_tol",
];

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_PRECISION: usize = 15;
pub const SEED_ENV: &str = "CTCSIM_SEED";

/// Raw settings: config-file entries overlaid by command-line flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Parses `key = value` lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("config line {}: expected key = value", n + 1)))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(CliError::usage(format!("config line {}: unknown key '{key}'", n + 1)));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {path}: {e}")))?;
        Self::parse(&text)
    }

    /// Sets `key` when `value` is present, overriding any file entry.
    pub fn overlay(&mut self, key: &str, value: Option<&str>) {
        if let Some(v) = value {
            self.values.insert(key.to_string(), v.to_string());
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn real(&self, key: &str, default: f64) -> Result<f64, CliError> {
        self.get(key).map_or(Ok(default), |v| parse_real(key, v))
    }

    pub fn grid(&self, key: &str, default: f64) -> Result<Grid, CliError> {
        self.get(key).map_or(Ok(Grid::fixed(default)), |v| parse_grid(key, v))
    }

    /// Davies parameters; unspecified values give the identity channel.
    pub fn params(&self) -> Result<DaviesParams, CliError> {
        Ok(DaviesParams::new(
            self.real("p", 0.0)?,
            self.real("A", 0.0)?,
            self.real("G", 0.0)?,
            self.real("omega", 1.0)?,
            self.real("t", 0.0)?,
        )?)
    }

    pub fn state(&self, key: &str, default: &str) -> Result<DensityOperator, CliError> {
        parse_state(self.get(key).unwrap_or(default))
    }

    /// Flag or file value, then the environment, then the default.
    pub fn seed(&self) -> Result<u64, CliError> {
        if let Some(v) = self.get("seed") {
            return parse_seed(v);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => parse_seed(&v),
            Err(_) => Ok(DEFAULT_SEED),
        }
    }

    pub fn precision(&self) -> Result<usize, CliError> {
        let p = match self.get("precision") {
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| CliError::usage(format!("precision: cannot parse '{v}'")))?,
            None => DEFAULT_PRECISION,
        };
        if !(6..=17).contains(&p) {
            return Err(CliError::usage(format!("precision must be in [6, 17], got {p}")));
        }
        Ok(p)
    }

    pub fn trials(&self, default: usize) -> Result<usize, CliError> {
        let n = match self.get("trials") {
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| CliError::usage(format!("trials: cannot parse '{v}'")))?,
            None => default,
        };
        if n == 0 {
            return Err(CliError::usage("trials must be at least 1"));
        }
        Ok(n)
    }
}

fn parse_seed(v: &str) -> Result<u64, CliError> {
    v.trim()
        .parse::<u64>()
        .map_err(|_| CliError::usage(format!("seed: cannot parse '{v}'")))
}

pub fn parse_real(key: &str, v: &str) -> Result<f64, CliError> {
    let x = v
        .trim()
        .parse::<f64>()
        .map_err(|_| CliError::usage(format!("{key}: cannot parse '{v}' as a number")))?;
    if !x.is_finite() {
        return Err(CliError::usage(format!("{key}: value must be finite")));
    }
    Ok(x)
}

/// `0`, `1`, `plus`, `minus`, or a Bloch triple `x,y,z`.
pub fn parse_state(v: &str) -> Result<DensityOperator, CliError> {
    let named = match v.trim() {
        "0" => Some(PureState::zero()),
        "1" => Some(PureState::one()),
        "plus" | "+" => Some(PureState::plus()),
        "minus" | "-" => Some(PureState::minus()),
        _ => None,
    };
    if let Some(psi) = named {
        return Ok(psi.density());
    }
    let parts: Vec<&str> = v.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::usage(format!(
            "state '{v}': expected 0, 1, plus, minus or a Bloch triple x,y,z"
        )));
    }
    let mut r = [0.0; 3];
    for (slot, part) in r.iter_mut().zip(parts) {
        *slot = parse_real("state", part)?;
    }
    Ok(state_from_bloch(BlochVector(r))?)
}

/// A single value, a list `a,b,c`, or an inclusive range `start:stop:count`.
pub fn parse_grid(key: &str, v: &str) -> Result<Grid, CliError> {
    let v = v.trim();
    if v.contains(':') {
        let parts: Vec<&str> = v.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::usage(format!("{key}: range must be start:stop:count")));
        }
        let count = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::usage(format!("{key}: cannot parse count '{}'", parts[2])))?;
        return Ok(Grid::Range {
            start: parse_real(key, parts[0])?,
            stop: parse_real(key, parts[1])?,
            count,
        });
    }
    let values = v.split(',').map(|x| parse_real(key, x)).collect::<Result<Vec<_>, _>>()?;
    Ok(Grid::Values(values))
}

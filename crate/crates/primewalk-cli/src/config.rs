//! Experiment configuration: defaults, `key=value` files and flag overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// A malformed flag, config line or value. Maps to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

/// Every recognised key, in echo order.
pub const KEYS: [&str; 14] =
    ["N", "H0", "H", "K", "ell", "k", "seed", "iters", "tol", "mask", "schedule", "w", "out", "suite"];

/// Parameters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: u64,
    pub h0: u64,
    pub h: u64,
    pub big_k: f64,
    pub ell: u32,
    pub k: u32,
    pub seed: u64,
    /// Lanczos iteration cap.
    pub iters: usize,
    /// Lanczos residual tolerance.
    pub tol: f64,
    /// Apply the `ω`/`Y_ℓ` mask before probing.
    pub mask: bool,
    /// Chowla schedule, strictly increasing.
    pub schedule: Vec<u64>,
    /// Window parameter for the windowed Chowla sum.
    pub w: Option<f64>,
    pub out: Option<String>,
    pub suite: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 1024,
            h0: 11,
            h: 60,
            big_k: 2.0,
            ell: 3,
            k: 2,
            seed: 1,
            iters: 300,
            tol: 1e-10,
            mask: true,
            schedule: vec![1_000, 10_000, 100_000, 1_000_000],
            w: None,
            out: None,
            suite: None,
        }
    }
}

/// Accepts plain integers and integral scientific notation such as `1e7`.
fn parse_u64(key: &str, v: &str) -> Result<u64, UsageError> {
    if let Ok(x) = v.parse::<u64>() {
        return Ok(x);
    }
    match v.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 => Ok(x as u64),
        _ => usage(format!("{key}: expected a non-negative integer, got {v:?}")),
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64, UsageError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => usage(format!("{key}: expected a number, got {v:?}")),
    }
}

fn parse_u32(key: &str, v: &str) -> Result<u32, UsageError> {
    let x = parse_u64(key, v)?;
    u32::try_from(x).or_else(|_| usage(format!("{key}: {v} is too large")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, UsageError> {
    match v {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => usage(format!("{key}: expected true or false, got {v:?}")),
    }
}

/// Comma-separated, strictly increasing, every point at least 3.
pub fn parse_schedule(v: &str) -> Result<Vec<u64>, UsageError> {
    let xs = v.split(',').map(|t| parse_u64("schedule", t.trim())).collect::<Result<Vec<_>, _>>()?;
    if xs.is_empty() || xs.iter().any(|&x| x < 3) {
        return usage(format!("schedule: every point must be >= 3, got {v:?}"));
    }
    if xs.windows(2).any(|p| p[0] >= p[1]) {
        return usage(format!("schedule: points must be strictly increasing, got {v:?}"));
    }
    Ok(xs)
}

impl ExperimentConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), UsageError> {
        let v = value.trim();
        match key {
            "N" => self.n = parse_u64(key, v)?,
            "H0" => self.h0 = parse_u64(key, v)?,
            "H" => self.h = parse_u64(key, v)?,
            "K" => self.big_k = parse_f64(key, v)?,
            "ell" => self.ell = parse_u32(key, v)?,
            "k" => self.k = parse_u32(key, v)?,
            "seed" => self.seed = parse_u64(key, v)?,
            "iters" => self.iters = parse_u64(key, v)? as usize,
            "tol" => self.tol = parse_f64(key, v)?,
            "mask" => self.mask = parse_bool(key, v)?,
            "schedule" => self.schedule = parse_schedule(v)?,
            "w" => self.w = Some(parse_f64(key, v)?),
            "out" => self.out = Some(v.to_string()),
            "suite" => self.suite = Some(v.to_string()),
            _ => return usage(format!("unknown key {key:?}; known keys: {}", KEYS.join(", "))),
        }
        Ok(())
    }

    /// Applies a `key=value` file. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<(), UsageError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return usage(format!("config line {}: expected key=value, got {raw:?}", i + 1));
            };
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), UsageError> {
        let text =
            std::fs::read_to_string(path).or_else(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    /// Effective values as `key=value` strings, one per recognised key.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("N".into(), self.n.to_string());
        m.insert("H0".into(), self.h0.to_string());
        m.insert("H".into(), self.h.to_string());
        m.insert("K".into(), self.big_k.to_string());
        m.insert("ell".into(), self.ell.to_string());
        m.insert("k".into(), self.k.to_string());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("iters".into(), self.iters.to_string());
        m.insert("tol".into(), self.tol.to_string());
        m.insert("mask".into(), self.mask.to_string());
        let sched: Vec<String> = self.schedule.iter().map(u64::to_string).collect();
        m.insert("schedule".into(), sched.join(","));
        m.insert("w".into(), self.w.map_or_else(String::new, |w| w.to_string()));
        m.insert("out".into(), self.out.clone().unwrap_or_default());
        m.insert("suite".into(), self.suite.clone().unwrap_or_default());
        m
    }

    /// Same as [`echo`](Self::echo), as a config file that reproduces the run.
    pub fn to_text(&self) -> String {
        self.echo().into_iter().filter(|(_, v)| !v.is_empty()).map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

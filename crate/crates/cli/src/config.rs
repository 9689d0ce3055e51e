//! Flat `key=value` configuration documents.
//!
//! Pairs are separated by whitespace or newlines; `#` starts a comment.
//! Windows are written `start,end`. Absent keys take the preset defaults.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use dipcone::config::default_sites;
use dipcone::{FieldSign, Interval, Preset, SimConfig};
use thiserror::Error;

/// Every key a configuration document may contain.
pub const KEYS: [&str; 12] = [
    "preset",
    "n_sites",
    "alpha",
    "c_m",
    "dt",
    "t_end",
    "snapshot_stride",
    "contour_level",
    "field_sign",
    "fit_window_early",
    "fit_window_linear",
    "fine_start_dt",
];

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key=value`, found `{token}`")]
    Malformed { line: usize, token: String },

    #[error("line {line}: unknown key `{key}` (allowed: {})", KEYS.join(", "))]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: key `{key}` given more than once")]
    Duplicate { line: usize, key: String },

    #[error("`{key}`: {reason}")]
    InvalidValue { key: String, reason: String },

    #[error(transparent)]
    Invalid(#[from] dipcone::Error),
}

/// Raw key-value pairs of a document, checked for unknown and repeated keys.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigDoc {
    values: BTreeMap<&'static str, String>,
}

/// Splits a line into `key=value` tokens, tolerating spaces around `=`.
fn tokens(line: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut glue = false;
    for word in line.split_whitespace() {
        match out.last_mut() {
            Some(prev) if glue || word.starts_with('=') => prev.push_str(word),
            _ => out.push(word.to_string()),
        }
        glue = word.ends_with('=');
    }
    out
}

impl ConfigDoc {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            for token in tokens(content) {
                let (key, value) = match token.split_once('=') {
                    Some((k, v)) if !k.is_empty() && !v.is_empty() => (k, v),
                    _ => return Err(ConfigError::Malformed { line, token }),
                };
                let key = KEYS
                    .iter()
                    .copied()
                    .find(|k| *k == key)
                    .ok_or_else(|| ConfigError::UnknownKey { line, key: key.to_string() })?;
                if values.insert(key, value.to_string()).is_some() {
                    return Err(ConfigError::Duplicate { line, key: key.to_string() });
                }
            }
        }
        Ok(ConfigDoc { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Builds and validates a [`SimConfig`]. `preset_override` replaces the
    /// document's preset; `n_sites` then defaults to the overriding preset's
    /// length unless the document sets it.
    pub fn build(&self, preset_override: Option<Preset>) -> Result<SimConfig, ConfigError> {
        let preset = match preset_override {
            Some(p) => p,
            None => self.get("preset").map(parse_preset).transpose()?.unwrap_or(Preset::HighEnergy),
        };
        if preset == Preset::Custom {
            return Err(invalid("preset", "CUSTOM has no initial state in a configuration file; use the library API"));
        }
        let mut cfg = SimConfig::for_preset(preset);
        cfg.n_sites = self.parsed("n_sites", parse_usize)?.unwrap_or_else(|| default_sites(preset));
        if let Some(v) = self.parsed("alpha", parse_f64)? {
            cfg.alpha = v;
        }
        if let Some(v) = self.parsed("c_m", parse_f64)? {
            cfg.c_m = v;
        }
        if let Some(v) = self.parsed("dt", parse_f64)? {
            cfg.dt = v;
        }
        if let Some(v) = self.parsed("t_end", parse_f64)? {
            cfg.t_end = v;
        }
        if let Some(v) = self.parsed("snapshot_stride", parse_usize)? {
            cfg.snapshot_stride = v;
        }
        if let Some(v) = self.parsed("contour_level", parse_f64)? {
            cfg.contour_level = v;
        }
        if let Some(v) = self.parsed("field_sign", parse_sign)? {
            cfg.field_sign = v;
        }
        cfg.fit_window_early = self.parsed("fit_window_early", parse_window)?;
        cfg.fit_window_linear = self.parsed("fit_window_linear", parse_window)?;
        cfg.fine_start_dt = self.parsed("fine_start_dt", parse_optional_f64)?.flatten();
        cfg.validate()?;
        Ok(cfg)
    }

    fn parsed<T>(&self, key: &str, parse: fn(&str) -> Result<T, String>) -> Result<Option<T>, ConfigError> {
        self.get(key)
            .map(|v| parse(v).map_err(|reason| invalid(key, reason)))
            .transpose()
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<SimConfig, ConfigError> {
    ConfigDoc::parse(text)?.build(None)
}

/// Writes a configuration back in document form; `parse_config` reads it back
/// to an equal value.
pub fn render_config(cfg: &SimConfig) -> String {
    let mut out = String::new();
    let sign = match cfg.field_sign {
        FieldSign::Positive => "+1",
        FieldSign::Negative => "-1",
    };
    let _ = writeln!(out, "preset={}", cfg.preset);
    let _ = writeln!(out, "n_sites={}", cfg.n_sites);
    let _ = writeln!(out, "alpha={:?}", cfg.alpha);
    let _ = writeln!(out, "c_m={:?}", cfg.c_m);
    let _ = writeln!(out, "dt={:?}", cfg.dt);
    let _ = writeln!(out, "t_end={:?}", cfg.t_end);
    let _ = writeln!(out, "snapshot_stride={}", cfg.snapshot_stride);
    let _ = writeln!(out, "contour_level={:?}", cfg.contour_level);
    let _ = writeln!(out, "field_sign={sign}");
    if let Some(w) = cfg.fit_window_early {
        let _ = writeln!(out, "fit_window_early={:?},{:?}", w.start, w.end);
    }
    if let Some(w) = cfg.fit_window_linear {
        let _ = writeln!(out, "fit_window_linear={:?},{:?}", w.start, w.end);
    }
    if let Some(f) = cfg.fine_start_dt {
        let _ = writeln!(out, "fine_start_dt={f:?}");
    }
    out
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue { key: key.to_string(), reason: reason.into() }
}

fn parse_preset(v: &str) -> Result<Preset, ConfigError> {
    Preset::from_name(v).ok_or_else(|| invalid("preset", format!("unknown preset `{v}` (HIGH_ENERGY, GROUND_STATE, SUPP, CUSTOM)")))
}

fn parse_f64(v: &str) -> Result<f64, String> {
    v.parse::<f64>().map_err(|_| format!("`{v}` is not a real number"))
}

fn parse_usize(v: &str) -> Result<usize, String> {
    v.parse::<usize>().map_err(|_| format!("`{v}` is not a non-negative integer"))
}

fn parse_optional_f64(v: &str) -> Result<Option<f64>, String> {
    if v.eq_ignore_ascii_case("none") {
        Ok(None)
    } else {
        parse_f64(v).map(Some)
    }
}

fn parse_sign(v: &str) -> Result<FieldSign, String> {
    match v {
        "+1" | "1" | "+" => Ok(FieldSign::Positive),
        "-1" | "-" => Ok(FieldSign::Negative),
        _ => Err(format!("`{v}` must be +1 or -1")),
    }
}

fn parse_window(v: &str) -> Result<Interval, String> {
    let inner = v.trim_start_matches('[').trim_end_matches(']');
    let (a, b) = inner.split_once(',').ok_or_else(|| format!("`{v}` must be written start,end"))?;
    Ok(Interval::new(parse_f64(a)?, parse_f64(b)?))
}

//! `key = value` configuration files. `[section]` headers are accepted and
//! ignored, `#` and `;` start comments, values may be quoted.

use std::collections::BTreeMap;
use std::str::FromStr;

pub const KNOWN_KEYS: &[&str] = &[
    "mode",
    "source_dir",
    "endpoint",
    "cache_dir",
    "images_per_word",
    "rate_limit",
    "extra_query",
    "timeout_secs",
    "user_agent",
    "max_in_flight",
    "parser",
    "seed",
    "threads",
    "out",
    "std",
    "bins",
    "references",
    "dims",
    "rounds",
    "depth",
    "learning_rate",
];

fn unquote(v: &str) -> Option<&str> {
    for q in ['"', '\''] {
        if let Some(inner) = v.strip_prefix(q) {
            return inner.strip_suffix(q);
        }
    }
    None
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("line {}: expected key = value", i + 1));
        };
        let key = k.trim().to_ascii_lowercase().replace('-', "_");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(format!("line {}: unknown key {key:?}", i + 1));
        }
        let v = v.trim();
        let value = match unquote(v) {
            Some(inner) => inner.to_string(),
            None if v.starts_with(['"', '\'']) => return Err(format!("line {}: unterminated quote", i + 1)),
            None => v.split(" #").next().unwrap_or("").trim_end().to_string(),
        };
        out.insert(key, value);
    }
    Ok(out)
}

/// Config values plus a record of every setting a command resolved.
#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    pub snapshot: BTreeMap<String, String>,
}

impl Settings {
    pub fn new(file: BTreeMap<String, String>) -> Self {
        Self { file, snapshot: BTreeMap::new() }
    }

    /// Flag value, else config value, else `None`; parse failures are
    /// reported with the key name.
    pub fn lookup<T: FromStr + ToString>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, String> {
        let v = match flag {
            Some(v) => Some(v),
            None => match self.file.get(key) {
                Some(s) => Some(s.parse::<T>().map_err(|_| format!("invalid value {s:?} for {key}"))?),
                None => None,
            },
        };
        if let Some(v) = &v {
            self.snapshot.insert(key.to_string(), v.to_string());
        }
        Ok(v)
    }

    pub fn resolve<T: FromStr + ToString>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, String> {
        let v = self.lookup(key, flag)?.unwrap_or(default);
        self.snapshot.insert(key.to_string(), v.to_string());
        Ok(v)
    }
}

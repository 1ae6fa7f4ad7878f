//! Flat `key = value` run configuration files.
//!
//! One setting per line; `#` starts a comment; a key may repeat to build a
//! list (`noise = 0` then `noise = 0.1`). Keys use the long flag names with
//! `-` or `_`, e.g. `train-fraction = 0.7`.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvConfig {
    entries: BTreeMap<String, Vec<String>>,
}

fn normalize_key(k: &str) -> String {
    k.trim().to_ascii_lowercase().replace('_', "-")
}

impl KvConfig {
    pub fn parse(text: &str) -> Result<KvConfig> {
        let mut entries: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", n + 1))?;
            let key = normalize_key(k);
            if key.is_empty() {
                bail!("line {}: empty key", n + 1);
            }
            entries.entry(key).or_default().push(v.trim().to_owned());
        }
        Ok(KvConfig { entries })
    }

    pub fn load(path: &Path) -> Result<KvConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        KvConfig::parse(&text).with_context(|| path.display().to_string())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Last value given for `key`.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.get(&normalize_key(key)).and_then(|v| v.last()) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| anyhow!("config key `{key}`: cannot parse {raw:?}: {e}")),
        }
    }

    /// Every value given for `key`, in file order. Comma-separated values are split.
    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Vec<T>>
    where
        T::Err: std::fmt::Display,
    {
        let mut out = Vec::new();
        for raw in self.entries.get(&normalize_key(key)).into_iter().flatten() {
            for part in raw.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                out.push(
                    part.parse()
                        .map_err(|e| anyhow!("config key `{key}`: cannot parse {part:?}: {e}"))?,
                );
            }
        }
        Ok(out)
    }
}

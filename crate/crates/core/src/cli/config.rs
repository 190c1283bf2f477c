use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

/// Keys accepted in a config file.
pub const KEYS: &[&str] = &[
    "n",
    "k",
    "epsilon",
    "h",
    "beta",
    "trials",
    "seed",
    "delta",
    "barrier",
    "gamma",
    "from",
    "to",
    "n_max",
    "max_steps",
    "trajectories",
    "mode",
    "full",
    "grid",
    "budget",
    "out_dir",
    "format",
    "threads",
];

/// A flat `key = value` file. Blank lines and lines starting with `#` are
/// ignored; later keys override earlier ones.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::Parse(format!("line {}: unknown key {key:?}", lineno + 1)));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// The flag value if given, else the parsed file value.
    pub fn pick<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|_| Error::Parse(format!("config key {key}: cannot parse {v:?}"))))
            .transpose()
    }

    pub fn flag(&self, flag: bool, key: &str) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        match self.get(key) {
            None => Ok(false),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(Error::Parse(format!("config key {key}: expected a boolean, got {v:?}"))),
        }
    }
}

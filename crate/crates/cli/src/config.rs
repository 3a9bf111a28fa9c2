//! `key=value` config files and resolution: defaults, then the file, then
//! flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};

use crate::UsageError;

/// Parsed config file. Blank lines and `#` comments are skipped; keys use
/// the flag names with `-` or `_` interchangeably.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
    path: Option<PathBuf>,
}

fn normalize_key(k: &str) -> String {
    k.trim().replace('-', "_")
}

impl ConfigFile {
    pub fn parse(text: &str, path: Option<&Path>) -> Result<Self> {
        let mut values = BTreeMap::new();
        let at = |line: usize| match path {
            Some(p) => format!("{}:{line}", p.display()),
            None => format!("line {line}"),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(UsageError(format!("{}: expected key=value, got `{line}`", at(i + 1))).into());
            };
            values.insert(normalize_key(k), v.trim().to_string());
        }
        Ok(ConfigFile { values, path: path.map(Path::to_path_buf) })
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(ConfigFile::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| UsageError(format!("config file {}: {e}", p.display())))?;
                Self::parse(&text, Some(p))
            }
        }
    }

    /// Rejects keys outside `known`, so typos do not silently fall back to
    /// defaults.
    pub fn check_keys(&self, known: &[&str]) -> Result<()> {
        match self.values.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(UsageError(format!("unknown config key `{k}` (known: {})", known.join(", "))).into()),
            None => Ok(()),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Flag value if given, else the file's value, else `default`.
    pub fn resolve<T: FromStr>(&self, key: &str, flag: Option<T>, default: impl FnOnce() -> T) -> Result<T>
    where
        T::Err: Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.values.get(key) {
            Some(s) => s.parse::<T>().map_err(|e| {
                let file = self.path.as_ref().map(|p| format!(" in {}", p.display())).unwrap_or_default();
                UsageError(format!("config key `{key}`{file}: `{s}`: {e}")).into()
            }),
            None => Ok(default()),
        }
    }

    /// Like [`Self::resolve`] without a default.
    pub fn require<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<T>
    where
        T::Err: Display,
    {
        if flag.is_none() && !self.values.contains_key(key) {
            return Err(UsageError(format!("`--{}` is required (flag or config key)", key.replace('_', "-"))).into());
        }
        self.resolve(key, flag, || unreachable!("value present"))
    }
}

/// Comma-separated list that parses from a flag or a config value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommaList<T>(pub Vec<T>);

impl<T: FromStr> FromStr for CommaList<T>
where
    T::Err: Display,
{
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',').map(|t| t.trim().parse::<T>().map_err(|e| format!("`{t}`: {e}"))).collect::<std::result::Result<_, _>>().map(CommaList)
    }
}

impl<T: Display> Display for CommaList<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(T::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// Resolved configuration as ordered `key=value` lines, re-readable as a
/// config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResolvedConfig(pub Vec<(String, String)>);

impl ResolvedConfig {
    pub fn push(&mut self, key: &str, value: impl Display) {
        self.0.push((key.to_string(), value.to_string()));
    }

    pub fn to_text(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).with_context(|| format!("writing {}", path.display()))
    }
}

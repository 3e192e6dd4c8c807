//! Flat key=value run configuration. Command-line flags override file
//! values; all randomness flows from the single `seed` key.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Settings, CliError> {
        let mut values = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::input(format!("config {}: {e}", path.display())))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    CliError::input(format!(
                        "config {}: line {}: expected key=value",
                        path.display(),
                        lineno + 1
                    ))
                })?;
                values.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Settings { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Flag value if present, else the config value.
    pub fn path(&self, flag: Option<&PathBuf>, key: &str) -> Option<PathBuf> {
        flag.cloned().or_else(|| self.get(key).map(PathBuf::from))
    }

    pub fn string(&self, flag: Option<&String>, key: &str) -> Option<String> {
        flag.cloned().or_else(|| self.get(key).map(str::to_string))
    }

    pub fn required_path(&self, flag: Option<&PathBuf>, key: &str) -> Result<PathBuf, CliError> {
        self.path(flag, key)
            .ok_or_else(|| CliError::usage(format!("missing --{} (or config key {key})", key.replace('_', "-"))))
    }

    pub fn required_string(&self, flag: Option<&String>, key: &str) -> Result<String, CliError> {
        self.string(flag, key)
            .ok_or_else(|| CliError::usage(format!("missing --{} (or config key {key})", key.replace('_', "-"))))
    }

    pub fn parse_or<T: std::str::FromStr>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.get(key) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|e| CliError::usage(format!("config key {key}={raw:?}: {e}"))),
        }
    }
}

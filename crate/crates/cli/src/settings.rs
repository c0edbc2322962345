//! Flat key=value settings files.
//!
//! Keys mirror the long flag names of the active subcommand. A value given
//! on the command line always wins over the file, and keys the command
//! never looked at are reported on stderr so a typo does not vanish
//! silently. Lines starting with `#` are comments; a value may be wrapped
//! in single or double quotes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use conet::{Error, Result};

#[derive(Debug)]
pub struct Settings {
    values: BTreeMap<String, String>,
    used: BTreeSet<String>,
}

impl Settings {
    pub fn empty() -> Self {
        Settings { values: BTreeMap::new(), used: BTreeSet::new() }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::config(format!("cannot read settings file {}: {e}", path.display()))
        })?;
        let mut values = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(format!(
                    "{}:{}: expected `key = value`, got `{line}`",
                    path.display(),
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            let mut value = value.trim();
            for quote in ['"', '\''] {
                if value.len() >= 2 && value.starts_with(quote) && value.ends_with(quote) {
                    value = &value[1..value.len() - 1];
                    break;
                }
            }
            values.insert(key, value.to_string());
        }
        Ok(Settings { values, used: BTreeSet::new() })
    }

    /// Looks a key up and parses it; `None` when absent. Marks the key as
    /// consumed either way.
    pub fn get<T>(&mut self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.used.insert(key.to_string());
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                Error::config(format!("config key `{key}`: cannot parse `{raw}`: {e}"))
            }),
        }
    }

    /// Warns about keys the command never consumed.
    pub fn warn_unused(&self) {
        for key in self.values.keys() {
            if !self.used.contains(key) {
                eprintln!("warning: config key `{key}` was not used by this command");
            }
        }
    }
}

/// Flag value if given, else the settings file, else the default.
pub fn pick<T>(flag: Option<T>, settings: &mut Settings, key: &str, default: T) -> Result<T>
where
    T: FromStr,
    T::Err: Display,
{
    match flag {
        Some(v) => {
            settings.get::<T>(key).ok();
            Ok(v)
        }
        None => Ok(settings.get(key)?.unwrap_or(default)),
    }
}

/// Like [`pick`] for parameters that stay optional.
pub fn pick_opt<T>(flag: Option<T>, settings: &mut Settings, key: &str) -> Result<Option<T>>
where
    T: FromStr,
    T::Err: Display,
{
    match flag {
        Some(v) => {
            settings.get::<T>(key).ok();
            Ok(Some(v))
        }
        None => settings.get(key),
    }
}

//! `--config` file handling: any long flag can come from a key-value file,
//! with explicit command-line flags taking precedence.

use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use sparsedepth::{io::read_kv, Error, Result};

pub struct Cfg {
    pairs: Vec<(String, String)>,
}

impl Cfg {
    /// Loads the file if given; a missing `--config` flag is an empty map.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let pairs = match path {
            Some(p) => read_kv(p)?,
            None => Vec::new(),
        };
        Ok(Self { pairs })
    }

    /// Typed lookup; the last occurrence of a key wins.
    pub fn get<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.pairs.iter().rev().find(|(k, _)| k == key) {
            None => Ok(None),
            Some((_, raw)) => raw.parse().map(Some).map_err(|e: T::Err| {
                Error::InvalidInput(format!("config key `{key}`: cannot parse `{raw}`: {e}"))
            }),
        }
    }
}

/// Command line wins; the config file fills gaps.
pub fn resolve<T>(cli: Option<T>, cfg: &Cfg, key: &str) -> Result<Option<T>>
where
    T: FromStr,
    T::Err: Display,
{
    match cli {
        Some(v) => Ok(Some(v)),
        None => cfg.get(key),
    }
}

/// A flag that must be present on the command line or in the config file.
pub fn require<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidInput(format!("missing required flag --{flag}")))
}

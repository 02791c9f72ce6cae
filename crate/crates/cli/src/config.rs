//! Flat `key=value` settings: config file first, command-line flags on top.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Display};
use std::path::Path;
use std::str::FromStr;

/// A configuration or usage problem. Maps to exit code 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Origin {
    File,
    Flag,
}

#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, (String, Origin)>,
    used: RefCell<BTreeSet<String>>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

impl Settings {
    pub fn parse_file(text: &str) -> anyhow::Result<Self> {
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(usage(format!("config line {}: expected key=value, got {line:?}", i + 1)));
            };
            let key = normalize(key);
            if key.is_empty() {
                return Err(usage(format!("config line {}: empty key", i + 1)));
            }
            if s.values.insert(key.clone(), (value.trim().to_string(), Origin::File)).is_some() {
                return Err(usage(format!("config line {}: `{key}` given twice", i + 1)));
            }
        }
        Ok(s)
    }

    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        match path {
            None => Ok(Settings::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| usage(format!("cannot read config {}: {e}", p.display())))?;
                Self::parse_file(&text)
            }
        }
    }

    /// Overrides `key` with a command-line value when one was given.
    pub fn flag<T: Display>(&mut self, key: &str, value: Option<T>) {
        if let Some(v) = value {
            self.values.insert(normalize(key), (v.to_string(), Origin::Flag));
        }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.used.borrow_mut().insert(key.to_string());
        self.values.get(key).map(|(v, _)| v.as_str())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> anyhow::Result<Option<T>>
    where
        T::Err: Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| usage(format!("invalid value for `{key}`: {v:?}: {e}"))),
        }
    }

    pub fn or<T: FromStr>(&self, key: &str, default: T) -> anyhow::Result<T>
    where
        T::Err: Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> anyhow::Result<T>
    where
        T::Err: Display,
    {
        self.get(key)?.ok_or_else(|| usage(format!("missing required setting `{key}`")))
    }

    /// Comma-separated list; `None` when absent.
    pub fn list<T: FromStr>(&self, key: &str) -> anyhow::Result<Option<Vec<T>>>
    where
        T::Err: Display,
    {
        let Some(v) = self.raw(key) else { return Ok(None) };
        let items = v
            .split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(|x| x.parse::<T>().map_err(|e| usage(format!("invalid entry {x:?} in `{key}`: {e}"))))
            .collect::<anyhow::Result<Vec<T>>>()?;
        if items.is_empty() {
            return Err(usage(format!("`{key}` is an empty list")));
        }
        Ok(Some(items))
    }

    /// Rejects config-file keys the command never asked for.
    pub fn reject_unknown(&self) -> anyhow::Result<()> {
        let used = self.used.borrow();
        let unknown: Vec<&str> = self
            .values
            .iter()
            .filter(|(k, (_, o))| *o == Origin::File && !used.contains(*k))
            .map(|(k, _)| k.as_str())
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(usage(format!("unknown config key(s) for this command: {}", unknown.join(", "))))
        }
    }
}

/// `value` must lie in `[lo, hi]`.
pub fn in_range<T: PartialOrd + Display + Copy>(key: &str, value: T, lo: T, hi: T) -> anyhow::Result<T> {
    if value < lo || value > hi {
        Err(usage(format!("`{key}` = {value} is outside [{lo}, {hi}]")))
    } else {
        Ok(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let mut s = Settings::parse_file("# comment\nk = 3\nn_list=1,2\n\n").unwrap();
        s.flag("k", Some(5));
        assert_eq!(s.require::<u64>("k").unwrap(), 5);
        assert_eq!(s.list::<u64>("n-list").unwrap().unwrap(), vec![1, 2]);
        s.reject_unknown().unwrap();
    }

    #[test]
    fn field_level_errors() {
        let s = Settings::parse_file("k=x\nbogus=1").unwrap();
        let e = s.require::<u64>("k").unwrap_err().to_string();
        assert!(e.contains("`k`"), "{e}");
        assert!(s.reject_unknown().unwrap_err().to_string().contains("bogus"));
        assert!(Settings::parse_file("novalue").is_err());
        assert!(Settings::parse_file("a=1\na=2").is_err());
    }
}

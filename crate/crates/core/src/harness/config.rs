//! Flat `key = value` experiment configs with `#` comments and strict keys.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
    lines: BTreeMap<String, usize>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Config {
                    line: n + 1,
                    msg: format!("expected key = value, got {line:?}"),
                });
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(Error::Config { line: n + 1, msg: "empty key".into() });
            }
            if cfg.entries.contains_key(k) {
                return Err(Error::Config {
                    line: n + 1,
                    msg: format!("duplicate key {k:?}"),
                });
            }
            cfg.entries.insert(k.to_string(), v.to_string());
            cfg.lines.insert(k.to_string(), n + 1);
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Sets or overrides a key (command-line flags).
    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    fn line(&self, key: &str) -> usize {
        self.lines.get(key).copied().unwrap_or(0)
    }

    /// Rejects any key not in `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for k in self.entries.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::Config {
                    line: self.line(k),
                    msg: format!("unknown key {k:?}"),
                });
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::Config {
            line: 0,
            msg: format!("missing key {key:?}"),
        })
    }

    pub fn parse_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| Error::Config {
                line: self.line(key),
                msg: format!("cannot parse {key} = {v:?}"),
            }),
        }
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parse_opt(key)?.unwrap_or(default))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim().parse().map_err(|_| Error::Config {
                        line: self.line(key),
                        msg: format!("cannot parse list item {s:?} of {key}"),
                    })
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    /// Canonical text form, sorted by key.
    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments() {
        let c = Config::parse("# header\nmode = stability\n\nscheme=SBDF2  # trailing\n").unwrap();
        assert_eq!(c.get("mode"), Some("stability"));
        assert_eq!(c.get("scheme"), Some("SBDF2"));
        assert_eq!(c.to_text(), "mode = stability\nscheme = SBDF2\n");
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        let c = Config::parse("mode = mcm\nbogus = 1\n").unwrap();
        match c.check_keys(&["mode"]) {
            Err(Error::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(Config::parse("novalue\n").is_err());
        assert!(Config::parse("a = 1\na = 2\n").is_err());
    }

    #[test]
    fn typed_access() {
        let c = Config::parse("dt = 0.5\nsizes = 1, 2,3\nbad = x\n").unwrap();
        assert_eq!(c.parse_or("dt", 1.0).unwrap(), 0.5);
        assert_eq!(c.parse_or("missing", 7usize).unwrap(), 7);
        assert_eq!(c.list::<usize>("sizes").unwrap(), Some(vec![1, 2, 3]));
        assert!(c.parse_opt::<f64>("bad").is_err());
    }
}

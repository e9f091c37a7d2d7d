//! Flat `key = value` config files with `#` comments.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key = value", lineno + 1)))?;
            let key = key.trim().replace('-', "_");
            if key.is_empty() {
                return Err(usage(format!("config line {}: empty key", lineno + 1)));
            }
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(usage(format!("config line {}: duplicate key {key}", lineno + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: Option<&Path>) -> Result<Self, UsageError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| usage(format!("cannot read config {}: {e}", p.display())))?;
                Self::parse(&text)
            }
        }
    }

    /// Rejects keys that the command does not understand.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), UsageError> {
        match self.entries.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(usage(format!("unknown config key: {k}"))),
            None => Ok(()),
        }
    }

    /// The command-line value if given, otherwise the parsed file value.
    pub fn pick<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, UsageError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| usage(format!("config key {key}: cannot parse {v:?}"))),
        }
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }
}

/// Comma-separated list of element counts.
pub fn parse_n_list(s: &str) -> Result<Vec<usize>, UsageError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| usage(format!("bad element count {t:?}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blanks() {
        let c = ConfigFile::parse("# run\nn = 7\n\nscheme=fe # inline\nds-max = 0.25\n").unwrap();
        assert_eq!(c.pick::<usize>("n", None).unwrap(), Some(7));
        assert_eq!(c.pick::<String>("scheme", None).unwrap().as_deref(), Some("fe"));
        assert_eq!(c.pick::<f64>("ds_max", None).unwrap(), Some(0.25));
        assert_eq!(c.pick("n", Some(9usize)).unwrap(), Some(9));
    }

    #[test]
    fn rejects_malformed() {
        assert!(ConfigFile::parse("n 7").is_err());
        assert!(ConfigFile::parse("n = 1\nn = 2").is_err());
        let c = ConfigFile::parse("n = x").unwrap();
        assert!(c.pick::<usize>("n", None).is_err());
        let c = ConfigFile::parse("bogus = 1").unwrap();
        assert!(c.check_keys(&["n"]).is_err());
    }

    #[test]
    fn n_list() {
        assert_eq!(parse_n_list("3, 5,7").unwrap(), vec![3, 5, 7]);
        assert!(parse_n_list("3,a").is_err());
    }
}

//! Sectioned key=value configuration files.
//!
//! ```text
//! # comment
//! [system]
//! k = 3
//! m = 2
//! alpha = 0.2
//! accounting = power_level
//!
//! [experiment]
//! p_grid = 1e4:1e12:9
//! trials = 500
//! seed = 7
//!
//! [output]
//! path = rates.csv
//! format = csv
//! ```
//!
//! Unknown sections or keys are rejected by name; flags override any value
//! given here.

use crate::spec::CliError;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

const KNOWN_KEYS: &[&str] = &[
    "system.k",
    "system.m",
    "system.alpha",
    "system.accounting",
    "experiment.p_grid",
    "experiment.trials",
    "experiment.seed",
    "experiment.outer",
    "experiment.k_list",
    "experiment.alpha_grid",
    "output.path",
    "output.format",
];

impl ConfigFile {
    pub fn parse(text: &str) -> Result<ConfigFile, CliError> {
        let mut section = String::new();
        let mut values = BTreeMap::new();
        for raw in text.lines() {
            let line = match raw.split_once('#') {
                Some((before, _)) => before.trim(),
                None => raw.trim(),
            };
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_string();
                if !["system", "experiment", "output"].contains(&section.as_str()) {
                    return Err(CliError::UnknownKey(format!("[{section}]")));
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| CliError::Malformed {
                field: section.clone(),
                value: line.to_string(),
            })?;
            let full = format!("{section}.{}", key.trim());
            if !KNOWN_KEYS.contains(&full.as_str()) {
                return Err(CliError::UnknownKey(full));
            }
            values.insert(full, value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &std::path::Path) -> Result<ConfigFile, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        ConfigFile::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(text) => text.parse::<T>().map(Some).map_err(|_| CliError::Malformed {
                field: key.to_string(),
                value: text.to_string(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_comments_and_values() {
        let text = "\
# header comment
[system]
k = 3        # trailing comment
alpha = 0.3

[experiment]
p_grid = 1e4:1e12:9
seed = 42
";
        let cfg = ConfigFile::parse(text).unwrap();
        assert_eq!(cfg.get("system.k"), Some("3"));
        assert_eq!(cfg.get("system.alpha"), Some("0.3"));
        assert_eq!(cfg.get("experiment.p_grid"), Some("1e4:1e12:9"));
        assert_eq!(cfg.parsed::<u64>("experiment.seed").unwrap(), Some(42));
    }

    #[test]
    fn rejects_unknown_keys_by_name() {
        let err = ConfigFile::parse("[system]\nk = 3\nfoo = 1\n").unwrap_err();
        assert_eq!(err, CliError::UnknownKey("system.foo".into()));
        let err = ConfigFile::parse("[nope]\n").unwrap_err();
        assert_eq!(err, CliError::UnknownKey("[nope]".into()));
    }

    #[test]
    fn rejects_bare_lines() {
        assert!(ConfigFile::parse("[system]\nnot a pair\n").is_err());
    }
}

//! Flat `key = value` run-config files.
//!
//! `#` starts a comment (whole line or trailing). Unknown keys are
//! rejected. Relative paths resolve against the data root: the `data_dir`
//! key, else the `SNCSE_DATA_DIR` environment variable, else the directory
//! holding the config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{read_to_string, Error, Result};

pub const DATA_DIR_ENV: &str = "SNCSE_DATA_DIR";

/// Every key a config file may set.
pub const KEYS: &[&str] = &[
    "data_dir",
    "corpus",
    "negations",
    "sts_dir",
    "dev_subtasks",
    "test_subtasks",
    "dev_split",
    "test_split",
    "out_dir",
    "loss_mode",
    "alpha",
    "beta",
    "lambda",
    "tau",
    "batch_size",
    "dropout",
    "lr",
    "seed",
    "epochs",
    "max_steps",
    "eval_interval",
    "warmup_steps",
    "clip_norm",
    "keep_mlp",
    "dim",
    "heads",
    "layers",
    "ffn_dim",
    "beta1",
    "beta2",
    "eps",
    "weight_decay",
    "min_freq",
    "threads",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    /// Directory relative paths resolve against when no data root is set.
    pub base: Option<PathBuf>,
    values: BTreeMap<String, (String, usize)>,
    source: String,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let mut c = Self::parse(&read_to_string(path)?, &path.display().to_string())?;
        c.base = path.parent().map(|p| if p.as_os_str().is_empty() { PathBuf::from(".") } else { p.to_path_buf() });
        Ok(c)
    }

    /// `source` names the text in error messages.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Config(format!("{}:{}: expected key = value", source, i + 1)));
            };
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(Error::Config(format!("{}:{}: unknown key '{}'", source, i + 1, k)));
            }
            if values.insert(k.to_string(), (v.trim().to_string(), i + 1)).is_some() {
                return Err(Error::Config(format!("{}:{}: duplicate key '{}'", source, i + 1, k)));
            }
        }
        Ok(Self { base: None, values, source: source.into() })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        debug_assert!(KEYS.contains(&key), "unlisted config key {}", key);
        self.values.get(key).map(|(v, _)| v.as_str())
    }

    /// Typed lookup; `None` when the key is absent.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("{}:{}: cannot parse {} = {:?}", self.source, line, key, v))),
        }
    }

    pub fn get_list(&self, key: &str) -> Option<Vec<String>> {
        self.raw(key).map(split_list)
    }

    /// The directory relative paths resolve against.
    pub fn data_root(&self) -> Option<PathBuf> {
        if let Some(d) = self.raw("data_dir") {
            let d = PathBuf::from(d);
            return Some(match (&self.base, d.is_relative()) {
                (Some(b), true) => b.join(d),
                _ => d,
            });
        }
        if let Some(env) = std::env::var_os(DATA_DIR_ENV).filter(|v| !v.is_empty()) {
            return Some(PathBuf::from(env));
        }
        self.base.clone()
    }

    /// A path-valued key resolved against the data root.
    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.raw(key).map(|v| resolve(self.data_root().as_deref(), Path::new(v)))
    }
}

pub fn resolve(root: Option<&Path>, p: &Path) -> PathBuf {
    match root {
        Some(r) if p.is_relative() => r.join(p),
        _ => p.to_path_buf(),
    }
}

/// Comma-separated list with blanks dropped.
pub fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect()
}

/// Parses a comma-separated list of numbers.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    split_list(s)
        .iter()
        .map(|x| x.parse().map_err(|_| Error::Config(format!("cannot parse {:?} as a number", x))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_types() {
        let c = ConfigFile::parse("# run\nalpha = 0.2  # trailing\nseed=7\n\ndev_subtasks = a, b\n", "t").unwrap();
        assert_eq!(c.get::<f64>("alpha").unwrap(), Some(0.2));
        assert_eq!(c.get::<u64>("seed").unwrap(), Some(7));
        assert_eq!(c.get::<f64>("beta").unwrap(), None);
        assert_eq!(c.get_list("dev_subtasks").unwrap(), vec!["a", "b"]);
    }

    #[test]
    fn errors_name_the_line() {
        let e = ConfigFile::parse("alpha = 1\nbogus = 2\n", "f.conf").unwrap_err().to_string();
        assert!(e.contains("f.conf:2") && e.contains("bogus"), "{}", e);
        let e = ConfigFile::parse("alpha\n", "f.conf").unwrap_err().to_string();
        assert!(e.contains("f.conf:1"), "{}", e);
        let c = ConfigFile::parse("alpha = x\n", "f.conf").unwrap();
        assert!(c.get::<f64>("alpha").is_err());
        assert!(ConfigFile::parse("seed = 1\nseed = 2\n", "f").is_err());
    }

    #[test]
    fn relative_paths_use_data_dir() {
        let mut c = ConfigFile::parse("data_dir = d\ncorpus = c.txt\nsts_dir = /abs\n", "t").unwrap();
        c.base = Some(PathBuf::from("/cfg"));
        assert_eq!(c.path("corpus").unwrap(), PathBuf::from("/cfg/d/c.txt"));
        assert_eq!(c.path("sts_dir").unwrap(), PathBuf::from("/abs"));
    }

    #[test]
    fn lists() {
        assert_eq!(parse_f64_list("0, 0.1,0.2").unwrap(), vec![0.0, 0.1, 0.2]);
        assert!(parse_f64_list("0,x").is_err());
    }
}

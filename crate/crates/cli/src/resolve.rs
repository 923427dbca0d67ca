//! Parameter resolution: command-line flag, then config file, then default.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Flag,
    Config,
    Env,
    Default,
}

impl Source {
    fn as_str(self) -> &'static str {
        match self {
            Source::Flag => "flag",
            Source::Config => "config",
            Source::Env => "env",
            Source::Default => "default",
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", i + 1)))?;
        let k = k.trim().replace('_', "-");
        if k.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", i + 1)));
        }
        if out.insert(k.clone(), v.trim().to_string()).is_some() {
            return Err(CliError::Usage(format!("config line {}: duplicate key `{k}`", i + 1)));
        }
    }
    Ok(out)
}

#[derive(Debug, Default)]
pub struct Resolver {
    config: BTreeMap<String, String>,
    resolved: Vec<(String, String, Source)>,
}

impl Resolver {
    pub fn new(config_path: Option<&Path>) -> Result<Self, CliError> {
        let config = match config_path {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        Ok(Resolver { config, resolved: Vec::new() })
    }

    fn from_config<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.config.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config value `{key} = {v}` is not valid"))),
        }
    }

    fn record(&mut self, key: &str, value: String, source: Source) {
        self.resolved.push((key.to_string(), value, source));
    }

    pub fn get<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError> {
        let (v, src) = match flag {
            Some(v) => (v, Source::Flag),
            None => match self.from_config(key)? {
                Some(v) => (v, Source::Config),
                None => (default, Source::Default),
            },
        };
        self.record(key, v.to_string(), src);
        Ok(v)
    }

    /// Like [`Resolver::get`] with an environment variable between config and default.
    pub fn get_with_env<T: FromStr + Display>(
        &mut self,
        key: &str,
        flag: Option<T>,
        env: &str,
        default: T,
    ) -> Result<T, CliError> {
        if flag.is_none() && !self.config.contains_key(key) {
            if let Ok(v) = std::env::var(env) {
                let parsed = v
                    .parse()
                    .map_err(|_| CliError::Usage(format!("environment {env}={v} is not valid")))?;
                self.record(key, v, Source::Env);
                return Ok(parsed);
            }
        }
        self.get(key, flag, default)
    }

    /// An optional value that has no default; absent values are not echoed.
    pub fn get_opt<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError> {
        let (v, src) = match flag {
            Some(v) => (Some(v), Source::Flag),
            None => (self.from_config(key)?, Source::Config),
        };
        if let Some(x) = &v {
            self.record(key, x.to_string(), src);
        }
        Ok(v)
    }

    /// A pair given as two flag values or as `a b` / `a, b` in the config.
    pub fn get_pair(&mut self, key: &str, flag: Option<Vec<f64>>, default: (f64, f64)) -> Result<(f64, f64), CliError> {
        let (v, src) = match flag {
            Some(v) => ((v[0], v[1]), Source::Flag),
            None => match self.config.get(key) {
                Some(s) => {
                    let parts: Vec<f64> = s
                        .split(|c: char| c == ',' || c.is_whitespace())
                        .filter(|p| !p.is_empty())
                        .map(|p| p.parse())
                        .collect::<Result<_, _>>()
                        .map_err(|_| CliError::Usage(format!("config value `{key} = {s}` is not a pair")))?;
                    if parts.len() != 2 {
                        return Err(CliError::Usage(format!("config value `{key} = {s}` is not a pair")));
                    }
                    ((parts[0], parts[1]), Source::Config)
                }
                None => (default, Source::Default),
            },
        };
        self.record(key, format!("{} {}", v.0, v.1), src);
        Ok(v)
    }

    /// Config keys never requested by the running command.
    pub fn unused_keys(&self) -> Vec<&str> {
        self.config
            .keys()
            .filter(|k| !self.resolved.iter().any(|r| &r.0 == *k))
            .map(|k| k.as_str())
            .collect()
    }

    #[cfg(test)]
    pub fn resolved(&self) -> &[(String, String, Source)] {
        &self.resolved
    }

    /// `key=value` pairs for output headers.
    pub fn echo_pairs(&self) -> Vec<(String, String)> {
        self.resolved.iter().map(|(k, v, _)| (k.clone(), v.clone())).collect()
    }

    pub fn echo_lines(&self) -> Vec<String> {
        self.resolved
            .iter()
            .map(|(k, v, s)| format!("{k} = {v} ({})", s.as_str()))
            .collect()
    }
}

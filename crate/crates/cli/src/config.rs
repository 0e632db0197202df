//! `key=value` config files merged under explicit flags.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::Path;

use gammatime::{Error, Result};

pub const SEED_ENV: &str = "GAMMATIME_SEED";
pub const DEFAULT_SEED: u64 = 0;

/// Flat `key=value` pairs; blank lines and `#` comments are skipped.
pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
        map.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(map)
}

/// Path given by `--config`, if any.
pub fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

fn has_flag(argv: &[OsString], key: &str) -> bool {
    let flag = format!("--{key}");
    let prefix = format!("--{key}=");
    argv.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&prefix)
    })
}

/// Appends `--key value` for config entries without an explicit flag. The
/// seed is resolved separately so the environment can sit between the two.
pub fn merge(mut argv: Vec<OsString>, config: &BTreeMap<String, String>) -> Vec<OsString> {
    let extra: Vec<OsString> = config
        .iter()
        .filter(|(k, _)| k.as_str() != "seed" && !has_flag(&argv, k))
        .map(|(k, v)| OsString::from(format!("--{k}={v}")))
        .collect();
    argv.extend(extra);
    argv
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedSource {
    Flag,
    Env,
    Config,
    Default,
}

impl SeedSource {
    pub fn name(&self) -> &'static str {
        match self {
            SeedSource::Flag => "flag",
            SeedSource::Env => "env",
            SeedSource::Config => "config",
            SeedSource::Default => "default",
        }
    }
}

fn parse_seed(s: &str, origin: &str) -> Result<u64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{origin}: seed must be an unsigned 64-bit integer, got '{s}'")))
}

/// `--seed`, then `GAMMATIME_SEED`, then the config file, then the default.
pub fn resolve_seed(flag: Option<u64>, config: &BTreeMap<String, String>) -> Result<(u64, SeedSource)> {
    if let Some(s) = flag {
        return Ok((s, SeedSource::Flag));
    }
    if let Ok(s) = std::env::var(SEED_ENV) {
        return Ok((parse_seed(&s, SEED_ENV)?, SeedSource::Env));
    }
    if let Some(s) = config.get("seed") {
        return Ok((parse_seed(s, "config")?, SeedSource::Config));
    }
    Ok((DEFAULT_SEED, SeedSource::Default))
}

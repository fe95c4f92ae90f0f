//! `key = value` scenario files. Keys are the long flag names without the
//! leading dashes; `#` starts a comment.

use std::collections::BTreeMap;
use std::path::Path;

use shockfan::Error;

pub const KEYS: &[&str] = &[
    "gamma", "b-tilde", "eps", "grid", "beta0", "chi", "format", "out", "sweep-b", "xi-range",
    "beta-range", "beta-prime-max",
];

pub fn parse(text: &str) -> Result<BTreeMap<String, String>, Error> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Usage(format!("config line {}: expected key = value", n + 1)));
        };
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::Usage(format!("config line {}: unknown key '{}'", n + 1, k.trim())));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

pub fn load(path: &Path) -> Result<BTreeMap<String, String>, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse(&text)
}

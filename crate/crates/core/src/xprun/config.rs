use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

/// Parses flat `key = value` lines. `#` starts a comment; blank lines are
/// ignored; a repeated key is an error.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || k.contains(char::is_whitespace) {
            return Err(Error::Parse(format!("line {}: bad key {k:?}", i + 1)));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::Parse(format!("line {}: duplicate key {k:?}", i + 1)));
        }
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blanks() {
        let c = parse_config("# header\n\nn = 16  # grid size\np=2\n  eps = 1/n\n").unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c["n"], "16");
        assert_eq!(c["p"], "2");
        assert_eq!(c["eps"], "1/n");
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_config("n 16").is_err());
        assert!(parse_config("n = 1\nn = 2").is_err());
        assert!(parse_config(" = 3").is_err());
    }
}

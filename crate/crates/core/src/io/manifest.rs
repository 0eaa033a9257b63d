use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{content_lines, parse_f64, read_text};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ManifestEntry {
    /// Resolved against the manifest's directory when relative.
    pub path: PathBuf,
    pub label: String,
    pub weight: Option<f64>,
}

/// `path,label[,weight]` per line with `#` comments.
pub fn parse_manifest(path: &Path, text: &str) -> Result<Vec<ManifestEntry>> {
    let base = path.parent().unwrap_or(Path::new(""));
    let mut out = Vec::new();
    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split(',').map(str::trim).collect();
        if !(2..=3).contains(&fields.len()) || fields[0].is_empty() {
            return Err(Error::parse(path, line, "expected path,label[,weight]"));
        }
        let weight = match fields.get(2) {
            Some(w) => Some(parse_f64(path, line, w)?),
            None => None,
        };
        out.push(ManifestEntry {
            path: base.join(fields[0]),
            label: fields[1].to_string(),
            weight,
        });
    }
    if out.is_empty() {
        return Err(Error::parse(path, 0, "manifest lists no shapes"));
    }
    Ok(out)
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    parse_manifest(path, &read_text(path)?)
}

/// Entries with paths written as given (callers pass paths relative to the
/// manifest's directory).
pub fn format_manifest(entries: &[(String, String)]) -> String {
    let mut out = String::from("# path,label\n");
    for (p, l) in entries {
        let _ = writeln!(out, "{p},{l}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_entries() {
        let m = parse_manifest(Path::new("data/list.csv"), "# c\na.dat,root\nb.dat, tip ,0.5\n").unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].path, Path::new("data/a.dat"));
        assert_eq!(m[1].label, "tip");
        assert_eq!(m[1].weight, Some(0.5));
        assert!(parse_manifest(Path::new("x"), "a.dat\n").is_err());
        assert!(parse_manifest(Path::new("x"), "# nothing\n").is_err());
    }
}

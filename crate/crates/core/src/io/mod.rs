//! Text formats and atomic file output.

mod blade_file;
mod coeffs;
mod landmarks;
mod manifest;
mod model_file;
mod obj;
mod svg;

pub use blade_file::{parse_blade_file, read_blade_file, write_blade_file};
pub use coeffs::{format_nominals, parse_nominals, read_nominals};
pub use landmarks::{format_landmarks, format_points3, parse_landmarks, read_landmarks, write_landmarks};
pub use manifest::{format_manifest, parse_manifest, read_manifest, ManifestEntry};
pub use model_file::{format_model, parse_model, read_model, write_model};
pub use obj::format_obj;
pub use svg::{loglog_svg, Series};

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Writes `contents` to a temporary file beside `path`, then renames it into
/// place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

pub(crate) fn parse_f64(path: &Path, line: usize, tok: &str) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::parse(path, line, format!("expected a number, got {tok:?}")))?;
    if !v.is_finite() {
        return Err(Error::parse(path, line, format!("non-finite value {tok:?}")));
    }
    Ok(v)
}

/// Non-empty lines with `#` comments stripped, paired with 1-based line
/// numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02e23, f64::MIN_POSITIVE, 0.0, -0.0, 123456789.12345679] {
            let back: f64 = fmt_f64(v).parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}

//! Blade definition files.
//!
//! ```text
//! span_length <L>
//! station <eta> <landmark file> [m <m11> <m12> <m21> <m22>] [b <x> <y>]
//! bend <eta> <x> <y> <z>
//! ```
//!
//! Landmark paths are relative to the definition file.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Matrix2, Vector2, Vector3};

use super::{content_lines, fmt_f64, parse_f64, read_landmarks, read_text, write_atomic, write_landmarks};
use crate::blade::{BladeDefinition, Station};
use crate::error::{Error, Result};

pub fn parse_blade_file(path: &Path, text: &str) -> Result<BladeDefinition> {
    let base = path.parent().unwrap_or(Path::new(""));
    let mut stations = Vec::new();
    let mut bend = Vec::new();
    let mut span_length = None;
    for (line, content) in content_lines(text) {
        let toks: Vec<&str> = content.split_whitespace().collect();
        let num = |i: usize| -> Result<f64> {
            let t = toks
                .get(i)
                .ok_or_else(|| Error::parse(path, line, format!("missing field {} in {:?}", i, toks[0])))?;
            parse_f64(path, line, t)
        };
        match toks[0] {
            "span_length" if toks.len() == 2 => span_length = Some(num(1)?),
            "bend" if toks.len() == 5 => bend.push((num(1)?, Vector3::new(num(2)?, num(3)?, num(4)?))),
            "station" if toks.len() >= 3 => {
                let eta = num(1)?;
                let (_, shape) = read_landmarks(&base.join(toks[2]))?;
                let mut st = Station::new(eta, shape);
                let mut i = 3;
                while i < toks.len() {
                    match toks[i] {
                        "m" => {
                            st.m = Some(Matrix2::new(num(i + 1)?, num(i + 2)?, num(i + 3)?, num(i + 4)?));
                            i += 5;
                        }
                        "b" => {
                            st.b = Some(Vector2::new(num(i + 1)?, num(i + 2)?));
                            i += 3;
                        }
                        other => return Err(Error::parse(path, line, format!("unexpected station field {other:?}"))),
                    }
                }
                stations.push(st);
            }
            other => return Err(Error::parse(path, line, format!("unrecognized line starting with {other:?}"))),
        }
    }
    if stations.len() < 2 {
        return Err(Error::parse(path, 0, "a blade needs at least 2 stations"));
    }
    Ok(BladeDefinition {
        stations,
        span_length: span_length.unwrap_or(1.0),
        bend,
    })
}

pub fn read_blade_file(path: &Path) -> Result<BladeDefinition> {
    parse_blade_file(path, &read_text(path)?)
}

/// Writes each station to `station_KK.dat` beside `path`, then the definition.
pub fn write_blade_file(path: &Path, def: &BladeDefinition) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut out = format!("span_length {}\n", fmt_f64(def.span_length));
    for (k, st) in def.stations.iter().enumerate() {
        let file = format!("station_{k:02}.dat");
        write_landmarks(&dir.join(&file), st.shape.points(), None)?;
        let _ = write!(out, "station {} {file}", fmt_f64(st.eta));
        if let Some(m) = st.m {
            let _ = write!(
                out,
                " m {} {} {} {}",
                fmt_f64(m[(0, 0)]),
                fmt_f64(m[(0, 1)]),
                fmt_f64(m[(1, 0)]),
                fmt_f64(m[(1, 1)])
            );
        }
        if let Some(b) = st.b {
            let _ = write!(out, " b {} {}", fmt_f64(b[0]), fmt_f64(b[1]));
        }
        out.push('\n');
    }
    for (eta, p) in &def.bend {
        let _ = writeln!(out, "bend {} {} {} {}", fmt_f64(*eta), fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(p[2]));
    }
    write_atomic(path, out.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blade::synthetic_blade;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("blade.txt");
        let mut def = synthetic_blade(3, 21).unwrap();
        def.stations[1].m = Some(Matrix2::new(1.0, 0.5, 0.0, 2.0));
        def.stations[2].b = Some(Vector2::new(0.25, -1.0));
        def.bend = vec![(0.0, Vector3::zeros()), (1.0, Vector3::new(1.0, 0.0, 100.0))];
        write_blade_file(&path, &def).unwrap();
        assert_eq!(read_blade_file(&path).unwrap(), def);
    }

    #[test]
    fn errors() {
        let p = Path::new("blade.txt");
        assert!(matches!(parse_blade_file(p, "wing 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(parse_blade_file(p, "span_length 3\n").is_err());
    }
}

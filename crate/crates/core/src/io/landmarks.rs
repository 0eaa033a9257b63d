use std::fmt::Write as _;
use std::path::Path;

use nalgebra::MatrixXx3;

use super::{content_lines, fmt_f64, parse_f64, read_text, write_atomic};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::shape::LandmarkShape;

/// One `x y` pair per line; `#` starts a comment; an optional first line
/// that is not a coordinate pair is taken as the shape's name.
pub fn parse_landmarks(path: &Path, text: &str) -> Result<(Option<String>, LandmarkShape)> {
    let mut name = None;
    let mut xy = Vec::new();
    for (k, (line, content)) in content_lines(text).enumerate() {
        let toks: Vec<&str> = content.split_whitespace().collect();
        let numeric = toks.len() == 2 && toks.iter().all(|t| t.parse::<f64>().is_ok());
        if k == 0 && !numeric {
            name = Some(content.to_string());
            continue;
        }
        if toks.len() != 2 {
            return Err(Error::parse(path, line, format!("expected 2 coordinates, found {}", toks.len())));
        }
        xy.push((parse_f64(path, line, toks[0])?, parse_f64(path, line, toks[1])?));
    }
    let shape = LandmarkShape::from_xy(&xy).map_err(|e| Error::parse(path, 0, e.to_string()))?;
    Ok((name, shape))
}

pub fn read_landmarks(path: &Path) -> Result<(Option<String>, LandmarkShape)> {
    parse_landmarks(path, &read_text(path)?)
}

pub fn format_landmarks(points: &Mat, name: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(n) = name {
        out.push_str(n);
        out.push('\n');
    }
    for row in points.row_iter() {
        let _ = writeln!(out, "{} {}", fmt_f64(row[0]), fmt_f64(row[1]));
    }
    out
}

pub fn format_points3(points: &MatrixXx3<f64>) -> String {
    let mut out = String::new();
    for row in points.row_iter() {
        let _ = writeln!(out, "{} {} {}", fmt_f64(row[0]), fmt_f64(row[1]), fmt_f64(row[2]));
    }
    out
}

pub fn write_landmarks(path: &Path, points: &Mat, name: Option<&str>) -> Result<()> {
    write_atomic(path, format_landmarks(points, name).as_bytes())
}

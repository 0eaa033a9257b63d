use std::fmt::Write as _;
use std::path::Path;

use super::{content_lines, fmt_f64, parse_f64, read_text};
use crate::cst::{CstCoeffs, CST_COEFFS};
use crate::error::{Error, Result};

/// `label u1 … u9 l1 … l9` per line.
pub fn parse_nominals(path: &Path, text: &str) -> Result<Vec<(String, CstCoeffs)>> {
    let mut out = Vec::new();
    for (line, content) in content_lines(text) {
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.len() != 1 + 2 * CST_COEFFS {
            return Err(Error::parse(
                path,
                line,
                format!("expected a label and {} coefficients", 2 * CST_COEFFS),
            ));
        }
        let mut c = CstCoeffs {
            upper: [0.0; CST_COEFFS],
            lower: [0.0; CST_COEFFS],
        };
        for i in 0..CST_COEFFS {
            c.upper[i] = parse_f64(path, line, toks[1 + i])?;
            c.lower[i] = parse_f64(path, line, toks[1 + CST_COEFFS + i])?;
        }
        out.push((toks[0].to_string(), c));
    }
    Ok(out)
}

pub fn read_nominals(path: &Path) -> Result<Vec<(String, CstCoeffs)>> {
    parse_nominals(path, &read_text(path)?)
}

pub fn format_nominals(entries: &[(String, CstCoeffs)]) -> String {
    let mut out = String::new();
    for (label, c) in entries {
        let vals: Vec<String> = c.upper.iter().chain(&c.lower).map(|v| fmt_f64(*v)).collect();
        let _ = writeln!(out, "{label} {}", vals.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cst::nominal_family;

    #[test]
    fn round_trip() {
        let fam = nominal_family(4);
        let p = Path::new("n.txt");
        assert_eq!(parse_nominals(p, &format_nominals(&fam)).unwrap(), fam);
        assert!(parse_nominals(p, "a 1 2 3\n").is_err());
    }
}

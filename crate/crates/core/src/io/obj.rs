use std::fmt::Write as _;

use super::fmt_f64;
use crate::blade::Wireframe;

/// Wavefront OBJ: vertices section by section, then quads joining landmark
/// `i` and `i + 1` of adjacent sections.
pub fn format_obj(wf: &Wireframe) -> String {
    let mut out = String::new();
    let n = wf.n();
    for s in &wf.sections {
        for row in s.points.row_iter() {
            let _ = writeln!(out, "v {} {} {}", fmt_f64(row[0]), fmt_f64(row[1]), fmt_f64(row[2]));
        }
    }
    for j in 0..wf.sections.len().saturating_sub(1) {
        for i in 0..n.saturating_sub(1) {
            let a = j * n + i + 1;
            let _ = writeln!(out, "f {} {} {} {}", a, a + 1, a + n + 1, a + n);
        }
    }
    out
}

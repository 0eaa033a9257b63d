use nalgebra::Vector2;

use super::{BladeDefinition, Station};
use crate::cst::{cst_airfoil, family_coeffs, CstSampling};
use crate::error::Result;
use crate::shape::LandmarkShape;
use crate::standardize::l4_matrix;

pub const SYNTHETIC_SPAN: f64 = 100.0;

/// Root-to-tip blade of CST sections following the nominal family (thickness
/// 0.32 → 0.16, camber 0 → 0.2), chord `5(1 − 0.7η)`, twist `15°(1 − η)²`, with a small
/// drifting offset.
pub fn synthetic_blade(stations: usize, n_c: usize) -> Result<BladeDefinition> {
    let out = (0..stations)
        .map(|k| {
            let eta = if stations > 1 { k as f64 / (stations - 1) as f64 } else { 0.0 };
            let section = cst_airfoil(&family_coeffs(0.32 - 0.16 * eta, 0.2 * eta), n_c, CstSampling::Cosine)?;
            let chord = 5.0 * (1.0 - 0.7 * eta);
            let twist = 15f64.to_radians() * (1.0 - eta).powi(2);
            let m = l4_matrix([chord, 1.0, 1.0, twist])?;
            let b = Vector2::new(-0.3 * chord, 0.2 * eta);
            let mut pts = section.points() * m;
            for mut row in pts.row_iter_mut() {
                row[0] += b[0];
                row[1] += b[1];
            }
            Ok(Station::new(eta, LandmarkShape::new(pts)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BladeDefinition {
        stations: out,
        span_length: SYNTHETIC_SPAN,
        bend: Vec::new(),
    })
}

use nalgebra::{Matrix3, MatrixXx3, Vector3};
use rayon::prelude::*;

use super::BladeModel;
use crate::error::{Error, Result};
use crate::spline::Spline;

/// Spline through bend-axis knots, one coordinate at a time.
#[derive(Clone, Debug)]
pub struct BendCurve {
    coords: [Spline; 3],
}

impl BendCurve {
    pub fn fit(knots: &[(f64, Vector3<f64>)]) -> Result<Self> {
        let eta: Vec<f64> = knots.iter().map(|k| k.0).collect();
        let axis = |i: usize| Spline::affine_schedule(&eta, &knots.iter().map(|k| k.1[i]).collect::<Vec<_>>());
        Ok(Self {
            coords: [axis(0)?, axis(1)?, axis(2)?],
        })
    }

    pub fn point(&self, eta: f64) -> Vector3<f64> {
        Vector3::new(self.coords[0].eval(eta), self.coords[1].eval(eta), self.coords[2].eval(eta))
    }

    pub fn tangent(&self, eta: f64) -> Result<Vector3<f64>> {
        let d = Vector3::new(
            self.coords[0].derivative(eta),
            self.coords[1].derivative(eta),
            self.coords[2].derivative(eta),
        );
        let norm = d.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Contract(format!("bend curve has zero tangent at eta {eta}")));
        }
        Ok(d / norm)
    }
}

/// Rotation taking `e_z` to the unit vector `t` (Rodrigues).
pub(crate) fn align_z(t: &Vector3<f64>) -> Matrix3<f64> {
    let ez = Vector3::z();
    let v = ez.cross(t);
    let c = ez.dot(t);
    if c <= -1.0 + 1e-15 {
        return Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0));
    }
    let k = v.cross_matrix();
    Matrix3::identity() + k + k * k / (1.0 + c)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Section3 {
    pub eta: f64,
    /// `n × 3` landmark coordinates.
    pub points: MatrixXx3<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Wireframe {
    pub sections: Vec<Section3>,
}

impl Wireframe {
    pub fn n(&self) -> usize {
        self.sections.first().map_or(0, |s| s.points.nrows())
    }
}

/// `count` equally spaced positions across the blade span.
pub fn uniform_etas(model: &BladeModel, count: usize) -> Vec<f64> {
    let (lo, hi) = model.span();
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| {
                if i + 1 == count {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

/// Places sections in 3D. Straight axis: `z = η·span_length`. With a bend
/// curve, each section is centered on the curve with its plane normal along
/// the curve tangent.
pub fn emit_wireframe(model: &BladeModel, etas: &[f64], bend: Option<&BendCurve>) -> Result<Wireframe> {
    for w in etas.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Ordering(format!(
                "wireframe positions must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
    }
    let sections = etas
        .par_iter()
        .map(|&eta| {
            let xy = model.evaluate_points(eta)?;
            let n = xy.nrows();
            let mut points = MatrixXx3::zeros(n);
            match bend {
                None => {
                    let z = eta * model.span_length;
                    for i in 0..n {
                        points[(i, 0)] = xy[(i, 0)];
                        points[(i, 1)] = xy[(i, 1)];
                        points[(i, 2)] = z;
                    }
                }
                Some(curve) => {
                    let origin = curve.point(eta);
                    let r = align_z(&curve.tangent(eta)?);
                    for i in 0..n {
                        let p = origin + r * Vector3::new(xy[(i, 0)], xy[(i, 1)], 0.0);
                        points.row_mut(i).copy_from(&p.transpose());
                    }
                }
            }
            Ok(Section3 { eta, points })
        })
        .collect::<Result<_>>()?;
    Ok(Wireframe { sections })
}

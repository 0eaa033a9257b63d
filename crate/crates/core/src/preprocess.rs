//! Landmark refinement: spline the shape over normalized cumulative chord
//! length and resample it at a chosen parameter distribution.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::shape::{cumulative_lengths, self_intersects, LandmarkShape};
use crate::spline::Spline;

pub const DEFAULT_REFINEMENT: usize = 401;

/// Seam turning angle below which a closed curve is treated as smooth.
const SMOOTH_SEAM_ANGLE: f64 = std::f64::consts::FRAC_PI_4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SplineKind {
    /// Periodic cubic for closed shapes with a smooth seam, natural cubic
    /// otherwise (sharp trailing edges are a corner, not a seam).
    #[default]
    Auto,
    Natural,
    Periodic,
    Pchip,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Sampling {
    #[default]
    UniformArclength,
    /// `sᵢ = (1 − cos(π i/(n−1)))/2`, clustering landmarks at both ends.
    Cosine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PreprocessConfig {
    pub n: usize,
    pub spline: SplineKind,
    pub sampling: Sampling,
    pub check_intersection: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            n: DEFAULT_REFINEMENT,
            spline: SplineKind::Auto,
            sampling: Sampling::UniformArclength,
            check_intersection: true,
        }
    }
}

pub fn sample_parameters(n: usize, sampling: Sampling) -> Vec<f64> {
    let last = (n - 1) as f64;
    let mut s: Vec<f64> = match sampling {
        Sampling::UniformArclength => (0..n).map(|i| i as f64 / last).collect(),
        Sampling::Cosine => (0..n)
            .map(|i| 0.5 * (1.0 - (std::f64::consts::PI * i as f64 / last).cos()))
            .collect(),
    };
    s[0] = 0.0;
    s[n - 1] = 1.0;
    s
}

fn seam_is_smooth(points: &Mat) -> bool {
    let n = points.nrows();
    let incoming = points.row(n - 1) - points.row(n - 2);
    let outgoing = points.row(1) - points.row(0);
    let cos = incoming.dot(&outgoing) / (incoming.norm() * outgoing.norm());
    cos.clamp(-1.0, 1.0).acos() < SMOOTH_SEAM_ANGLE
}

/// The spline variant actually used for a shape under `kind`.
pub fn resolve_spline(shape: &LandmarkShape, kind: SplineKind) -> SplineKind {
    match kind {
        SplineKind::Auto => {
            if shape.is_closed() && shape.n() >= 4 && crate::shape::endpoints_coincide(shape.points())
                && seam_is_smooth(shape.points())
            {
                SplineKind::Periodic
            } else {
                SplineKind::Natural
            }
        }
        k => k,
    }
}

/// Coordinate splines of a shape over its cumulative chord-length parameter.
pub struct CurveSpline {
    sx: Spline,
    sy: Spline,
}

impl CurveSpline {
    pub fn fit(shape: &LandmarkShape, kind: SplineKind) -> Result<Self> {
        let pts = shape.points();
        let s = cumulative_lengths(pts)?;
        let xs: Vec<f64> = pts.column(0).iter().copied().collect();
        let ys: Vec<f64> = pts.column(1).iter().copied().collect();
        let build = match resolve_spline(shape, kind) {
            SplineKind::Periodic => {
                if !crate::shape::endpoints_coincide(pts) {
                    return Err(Error::InvalidArgument(
                        "periodic spline needs a closed shape whose last landmark repeats the first"
                            .into(),
                    ));
                }
                Spline::periodic
            }
            SplineKind::Pchip => Spline::pchip,
            _ => Spline::natural,
        };
        Ok(Self {
            sx: build(&s, &xs)?,
            sy: build(&s, &ys)?,
        })
    }

    pub fn eval(&self, params: &[f64]) -> Mat {
        let mut out = Mat::zeros(params.len());
        for (i, &t) in params.iter().enumerate() {
            out[(i, 0)] = self.sx.eval(t);
            out[(i, 1)] = self.sy.eval(t);
        }
        out
    }
}

/// Resamples a shape at explicit parameter values in `[0, 1]`.
pub fn refine_at(shape: &LandmarkShape, kind: SplineKind, params: &[f64]) -> Result<LandmarkShape> {
    let curve = CurveSpline::fit(shape, kind)?;
    let mut pts = curve.eval(params);
    let closed = shape.is_closed() && crate::shape::endpoints_coincide(shape.points());
    if closed && params.first() == Some(&0.0) && params.last() == Some(&1.0) {
        // keep the closing repeat exact
        let n = pts.nrows();
        let first = pts.row(0).clone_owned();
        pts.row_mut(n - 1).copy_from(&first);
    }
    LandmarkShape::with_closed(pts, shape.is_closed())
}

/// Fixed n-refinement of a shape.
pub fn refine(shape: &LandmarkShape, cfg: &PreprocessConfig) -> Result<LandmarkShape> {
    if cfg.n < 3 {
        return Err(Error::InvalidArgument(format!(
            "refinement count must be at least 3, got {}",
            cfg.n
        )));
    }
    let params = sample_parameters(cfg.n, cfg.sampling);
    let out = refine_at(shape, cfg.spline, &params)?;
    if cfg.check_intersection && self_intersects(&out) {
        return Err(Error::SelfIntersection);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::landmark_gauge;
    use std::f64::consts::PI;

    fn circle(n: usize) -> LandmarkShape {
        let xy: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / (n - 1) as f64;
                (t.cos(), t.sin())
            })
            .collect();
        let mut shape = LandmarkShape::from_xy(&xy).unwrap().into_points();
        let first = shape.row(0).clone_owned();
        shape.row_mut(n - 1).copy_from(&first);
        LandmarkShape::new(shape).unwrap()
    }

    #[test]
    fn parameters() {
        assert_eq!(sample_parameters(3, Sampling::UniformArclength), vec![0.0, 0.5, 1.0]);
        let c = sample_parameters(5, Sampling::Cosine);
        assert!((c[2] - 0.5).abs() < 1e-15);
        assert!(c[1] < 0.25);
    }

    #[test]
    fn refining_at_own_parameters_is_identity() {
        let shape = LandmarkShape::from_xy(&[(0.0, 0.0), (1.0, 0.2), (2.0, 1.0), (2.5, 2.0), (2.0, 3.0)]).unwrap();
        let s = cumulative_lengths(shape.points()).unwrap();
        for kind in [SplineKind::Natural, SplineKind::Pchip] {
            let out = refine_at(&shape, kind, &s).unwrap();
            assert!((out.points() - shape.points()).norm() < 1e-12);
        }
    }

    #[test]
    fn dense_circle_refinement() {
        let shape = circle(64);
        assert_eq!(resolve_spline(&shape, SplineKind::Auto), SplineKind::Periodic);
        let out = refine(&shape, &PreprocessConfig::default()).unwrap();
        assert_eq!(out.n(), 401);
        assert!(out.is_closed());
        let dev = out
            .points()
            .row_iter()
            .map(|r| (r.norm() - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(dev <= 1e-4, "max radial deviation {dev:e}");
        let g = landmark_gauge(out.points());
        assert!((g.max - g.mean) / g.mean < 1e-2);
    }

    #[test]
    fn sharp_seam_uses_natural() {
        let shape = LandmarkShape::from_xy(&[(1.0, 0.0), (0.5, 0.1), (0.0, 0.0), (0.5, -0.1), (1.0, 0.0)]).unwrap();
        assert_eq!(resolve_spline(&shape, SplineKind::Auto), SplineKind::Natural);
    }

    #[test]
    fn duplicate_landmarks_fail() {
        let shape = LandmarkShape::from_xy(&[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 1.0)]).unwrap();
        assert!(matches!(
            refine(&shape, &PreprocessConfig::default()),
            Err(Error::DegenerateSegment { index: 1 })
        ));
    }
}

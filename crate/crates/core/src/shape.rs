//! Planar landmark shapes and validity guards.

use nalgebra::{RowVector2, Vector2};
use robust::{orient2d, Coord};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// Relative tolerance (to the shape's extent) for detecting a closed polyline.
const CLOSURE_TOL: f64 = 1e-12;
/// Smallest admissible `σ₂/σ₁` of the centered landmarks.
pub const RANK_TOL: f64 = 1e-10;

/// An ordered n×2 landmark matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct LandmarkShape {
    points: Mat,
    closed: bool,
}

impl LandmarkShape {
    /// Builds a shape, marking it closed when the first and last landmarks
    /// coincide.
    pub fn new(points: Mat) -> Result<Self> {
        let closed = points.nrows() >= 2 && endpoints_coincide(&points);
        Self::with_closed(points, closed)
    }

    pub fn with_closed(points: Mat, closed: bool) -> Result<Self> {
        if points.nrows() < 3 {
            return Err(Error::InvalidArgument(format!(
                "a shape needs at least 3 landmarks, got {}",
                points.nrows()
            )));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite landmark coordinate".into()));
        }
        let ratio = rank_ratio(&points);
        if !(ratio > RANK_TOL) {
            return Err(Error::RankDeficient { ratio });
        }
        Ok(Self { points, closed })
    }

    pub fn from_xy(xy: &[(f64, f64)]) -> Result<Self> {
        let flat: Vec<f64> = xy.iter().flat_map(|&(x, y)| [x, y]).collect();
        Self::new(Mat::from_row_slice(&flat))
    }

    pub fn points(&self) -> &Mat {
        &self.points
    }

    pub fn into_points(self) -> Mat {
        self.points
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn centroid(&self) -> Vector2<f64> {
        column_mean(&self.points)
    }
}

pub(crate) fn endpoints_coincide(points: &Mat) -> bool {
    let n = points.nrows();
    let extent = points.abs().max().max(f64::MIN_POSITIVE);
    (points.row(0) - points.row(n - 1)).norm() <= CLOSURE_TOL * extent
}

pub(crate) fn column_mean(points: &Mat) -> Vector2<f64> {
    let n = points.nrows() as f64;
    Vector2::new(points.column(0).sum() / n, points.column(1).sum() / n)
}

pub(crate) fn centered(points: &Mat) -> (Mat, Vector2<f64>) {
    let b = column_mean(points);
    let row = RowVector2::new(b[0], b[1]);
    let mut c = points.clone();
    for mut r in c.row_iter_mut() {
        r -= row;
    }
    (c, b)
}

/// `σ₂/σ₁` of the centered landmark matrix (0 when everything coincides).
pub fn rank_ratio(points: &Mat) -> f64 {
    let (c, _) = centered(points);
    let sigma = linalg::thin_svd(&c).sigma;
    if sigma[0] > 0.0 {
        sigma[1] / sigma[0]
    } else {
        0.0
    }
}

/// Normalized cumulative chord lengths `s₁ = 0, …, sₙ = 1`.
pub fn cumulative_lengths(points: &Mat) -> Result<Vec<f64>> {
    let n = points.nrows();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least 2 landmarks".into()));
    }
    let mut s = Vec::with_capacity(n);
    s.push(0.0);
    let mut total = 0.0;
    for i in 0..n - 1 {
        let h = (points.row(i + 1) - points.row(i)).norm();
        if !(h > 0.0) {
            return Err(Error::DegenerateSegment { index: i });
        }
        total += h;
        s.push(total);
    }
    for v in s.iter_mut() {
        *v /= total;
    }
    s[n - 1] = 1.0;
    Ok(s)
}

/// Largest and mean Euclidean gap between consecutive landmarks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gauge {
    pub max: f64,
    pub mean: f64,
}

pub fn landmark_gauge(points: &Mat) -> Gauge {
    let n = points.nrows();
    let gaps: Vec<f64> = (0..n.saturating_sub(1))
        .map(|i| (points.row(i + 1) - points.row(i)).norm())
        .collect();
    let max = gaps.iter().copied().fold(0.0, f64::max);
    let mean = if gaps.is_empty() {
        0.0
    } else {
        gaps.iter().sum::<f64>() / gaps.len() as f64
    };
    Gauge { max, mean }
}

fn coord(points: &Mat, i: usize) -> Coord<f64> {
    Coord {
        x: points[(i, 0)],
        y: points[(i, 1)],
    }
}

fn on_segment(p: Coord<f64>, q: Coord<f64>, r: Coord<f64>) -> bool {
    // r collinear with p-q: inside the closed bounding box means on the segment
    r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
}

/// Whether closed segments `p1-p2` and `q1-q2` share any point, decided with
/// exact orientation predicates.
pub fn segments_touch(p1: Coord<f64>, p2: Coord<f64>, q1: Coord<f64>, q2: Coord<f64>) -> bool {
    let d1 = orient2d(q1, q2, p1);
    let d2 = orient2d(q1, q2, p2);
    let d3 = orient2d(p1, p2, q1);
    let d4 = orient2d(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Whether any two non-adjacent segments of the polyline touch.
///
/// Closed shapes whose last landmark repeats the first are treated as a loop
/// over the stored segments; closed shapes without the repeat get an extra
/// closing segment. Touching and collinear overlaps count as intersections.
pub fn self_intersects(shape: &LandmarkShape) -> bool {
    let pts = shape.points();
    let n = pts.nrows();
    let mut segs: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    let looped = shape.is_closed();
    if looped && !endpoints_coincide(pts) {
        segs.push((n - 1, 0));
    }
    let m = segs.len();
    let boxes: Vec<[f64; 4]> = segs
        .iter()
        .map(|&(a, b)| {
            [
                pts[(a, 0)].min(pts[(b, 0)]),
                pts[(a, 0)].max(pts[(b, 0)]),
                pts[(a, 1)].min(pts[(b, 1)]),
                pts[(a, 1)].max(pts[(b, 1)]),
            ]
        })
        .collect();
    for i in 0..m {
        for j in i + 2..m {
            if looped && i == 0 && j == m - 1 {
                continue;
            }
            let (a, b) = (&boxes[i], &boxes[j]);
            if a[1] < b[0] || b[1] < a[0] || a[3] < b[2] || b[3] < a[2] {
                continue;
            }
            let (p1, p2) = segs[i];
            let (q1, q2) = segs[j];
            if segments_touch(coord(pts, p1), coord(pts, p2), coord(pts, q1), coord(pts, q2)) {
                return true;
            }
        }
    }
    false
}

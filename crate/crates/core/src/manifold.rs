//! A common interface over the three manifolds so that the Karcher mean and
//! PGA are written once.

use nalgebra::DVector;

use crate::error::Result;
use crate::grassmann::{self, GrassmannMetric, GrassmannPoint};
use crate::linalg::Mat;
use crate::product::{self, ProductPoint, ProductTangent};
use crate::spd::{self, SpdMatrix, SpdTangent};

pub trait Manifold: Sync {
    type Point: Clone + Send + Sync;
    type Tangent: Clone + Send + Sync;

    fn exp(&self, base: &Self::Point, v: &Self::Tangent) -> Result<Self::Point>;
    fn log(&self, base: &Self::Point, target: &Self::Point) -> Result<Self::Tangent>;
    fn zero(&self, base: &Self::Point) -> Self::Tangent;
    fn add(&self, a: &Self::Tangent, b: &Self::Tangent) -> Self::Tangent;
    fn scale(&self, a: &Self::Tangent, s: f64) -> Self::Tangent;
    /// Frobenius norm of the tangent matrix (or matrices).
    fn norm(&self, v: &Self::Tangent) -> f64 {
        self.vectorize(v).norm()
    }
    fn vec_dim(&self, base: &Self::Point) -> usize;
    /// Column-stacking vectorization, isometric for the Frobenius inner product.
    fn vectorize(&self, v: &Self::Tangent) -> DVector<f64>;
    fn unvectorize(&self, base: &Self::Point, coords: &[f64]) -> Self::Tangent;
    fn distance(&self, a: &Self::Point, b: &Self::Point) -> f64;
    /// Magnitude against which tangent sizes are judged negligible.
    fn point_scale(&self, _p: &Self::Point) -> f64 {
        1.0
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Grassmann;

#[derive(Clone, Copy, Debug, Default)]
pub struct Spd;

#[derive(Clone, Copy, Debug, Default)]
pub struct Product;

impl Manifold for Grassmann {
    type Point = GrassmannPoint;
    type Tangent = Mat;

    fn exp(&self, base: &GrassmannPoint, v: &Mat) -> Result<GrassmannPoint> {
        grassmann::exp(base, v)
    }
    fn log(&self, base: &GrassmannPoint, target: &GrassmannPoint) -> Result<Mat> {
        grassmann::log(base, target)
    }
    fn zero(&self, base: &GrassmannPoint) -> Mat {
        Mat::zeros(base.n())
    }
    fn add(&self, a: &Mat, b: &Mat) -> Mat {
        a + b
    }
    fn scale(&self, a: &Mat, s: f64) -> Mat {
        a * s
    }
    fn norm(&self, v: &Mat) -> f64 {
        v.norm()
    }
    fn vec_dim(&self, base: &GrassmannPoint) -> usize {
        2 * base.n()
    }
    fn vectorize(&self, v: &Mat) -> DVector<f64> {
        DVector::from_column_slice(v.as_slice())
    }
    fn unvectorize(&self, base: &GrassmannPoint, coords: &[f64]) -> Mat {
        Mat::from_column_slice(&coords[..2 * base.n()])
    }
    fn distance(&self, a: &GrassmannPoint, b: &GrassmannPoint) -> f64 {
        grassmann::distance(a, b, GrassmannMetric::Frobenius)
    }
}

impl Manifold for Spd {
    type Point = SpdMatrix;
    type Tangent = SpdTangent;

    fn exp(&self, base: &SpdMatrix, v: &SpdTangent) -> Result<SpdMatrix> {
        spd::exp(base, v)
    }
    fn log(&self, base: &SpdMatrix, target: &SpdMatrix) -> Result<SpdTangent> {
        Ok(spd::log(base, target))
    }
    fn zero(&self, _: &SpdMatrix) -> SpdTangent {
        SpdTangent::zeros()
    }
    fn add(&self, a: &SpdTangent, b: &SpdTangent) -> SpdTangent {
        a + b
    }
    fn scale(&self, a: &SpdTangent, s: f64) -> SpdTangent {
        a * s
    }
    fn norm(&self, v: &SpdTangent) -> f64 {
        v.norm()
    }
    fn vec_dim(&self, _: &SpdMatrix) -> usize {
        3
    }
    fn vectorize(&self, v: &SpdTangent) -> DVector<f64> {
        DVector::from_column_slice(spd::vectorize(v).as_slice())
    }
    fn unvectorize(&self, _: &SpdMatrix, coords: &[f64]) -> SpdTangent {
        spd::unvectorize(coords)
    }
    fn distance(&self, a: &SpdMatrix, b: &SpdMatrix) -> f64 {
        spd::distance(a, b)
    }
    fn point_scale(&self, p: &SpdMatrix) -> f64 {
        p.matrix().norm()
    }
}

impl Manifold for Product {
    type Point = ProductPoint;
    type Tangent = ProductTangent;

    fn exp(&self, base: &ProductPoint, v: &ProductTangent) -> Result<ProductPoint> {
        product::exp(base, v)
    }
    fn log(&self, base: &ProductPoint, target: &ProductPoint) -> Result<ProductTangent> {
        product::log(base, target)
    }
    fn zero(&self, base: &ProductPoint) -> ProductTangent {
        ProductTangent::zero(base.g.n())
    }
    fn add(&self, a: &ProductTangent, b: &ProductTangent) -> ProductTangent {
        ProductTangent {
            g: &a.g + &b.g,
            p: a.p + b.p,
        }
    }
    fn scale(&self, a: &ProductTangent, s: f64) -> ProductTangent {
        ProductTangent {
            g: &a.g * s,
            p: a.p * s,
        }
    }
    fn vec_dim(&self, base: &ProductPoint) -> usize {
        2 * base.g.n() + 3
    }
    fn vectorize(&self, v: &ProductTangent) -> DVector<f64> {
        let mut out = DVector::zeros(v.g.len() + 3);
        out.rows_mut(0, v.g.len()).copy_from_slice(v.g.as_slice());
        out.rows_mut(v.g.len(), 3).copy_from(&spd::vectorize(&v.p));
        out
    }
    fn unvectorize(&self, base: &ProductPoint, coords: &[f64]) -> ProductTangent {
        let k = 2 * base.g.n();
        ProductTangent {
            g: Mat::from_column_slice(&coords[..k]),
            p: spd::unvectorize(&coords[k..k + 3]),
        }
    }
    fn distance(&self, a: &ProductPoint, b: &ProductPoint) -> f64 {
        product::distance(a, b, GrassmannMetric::Frobenius)
    }
    fn point_scale(&self, p: &ProductPoint) -> f64 {
        p.p.matrix().norm().max(1.0)
    }
}

//! G(n, 2) × S²₊₊ with componentwise geodesics.

use crate::error::Result;
use crate::grassmann::{self, GrassmannMetric, GrassmannPoint};
use crate::linalg::Mat;
use crate::spd::{self, SpdMatrix, SpdTangent};

#[derive(Clone, Debug, PartialEq)]
pub struct ProductPoint {
    pub g: GrassmannPoint,
    pub p: SpdMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductTangent {
    pub g: Mat,
    pub p: SpdTangent,
}

impl ProductTangent {
    pub fn zero(n: usize) -> Self {
        Self {
            g: Mat::zeros(n),
            p: SpdTangent::zeros(),
        }
    }
}

pub fn exp(base: &ProductPoint, v: &ProductTangent) -> Result<ProductPoint> {
    Ok(ProductPoint {
        g: grassmann::exp(&base.g, &v.g)?,
        p: spd::exp(&base.p, &v.p)?,
    })
}

pub fn log(base: &ProductPoint, target: &ProductPoint) -> Result<ProductTangent> {
    Ok(ProductTangent {
        g: grassmann::log(&base.g, &target.g)?,
        p: spd::log(&base.p, &target.p),
    })
}

/// `sqrt(d_G² + d_SPD²)`.
pub fn distance(a: &ProductPoint, b: &ProductPoint, metric: GrassmannMetric) -> f64 {
    grassmann::distance(&a.g, &b.g, metric).hypot(spd::distance(&a.p, &b.p))
}

/// Transport along the geodesic from `x` to `y`, landing at `y`'s representative.
pub fn transport_to(x: &ProductPoint, y: &ProductPoint, v: &ProductTangent) -> Result<ProductTangent> {
    Ok(ProductTangent {
        g: grassmann::transport_to(&x.g, &y.g, &v.g)?,
        p: spd::transport(&x.p, &y.p, &v.p)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix2;

    fn sample() -> (ProductPoint, ProductPoint) {
        let a = Mat::from_row_slice(&[1.0, 0.2, -0.3, 1.0, 0.5, -0.4, -1.2, -0.8, 0.0, 0.0]);
        let b = Mat::from_row_slice(&[0.9, 0.1, -0.2, 1.1, 0.6, -0.5, -1.3, -0.7, 0.1, 0.0]);
        (
            ProductPoint {
                g: GrassmannPoint::from_basis(&a).unwrap(),
                p: SpdMatrix::new(Matrix2::new(2.0, 0.3, 0.3, 1.0)).unwrap(),
            },
            ProductPoint {
                g: GrassmannPoint::from_basis(&b).unwrap(),
                p: SpdMatrix::new(Matrix2::new(1.0, -0.2, -0.2, 3.0)).unwrap(),
            },
        )
    }

    #[test]
    fn zero_tangent_is_identity() {
        let (x, _) = sample();
        let y = exp(&x, &ProductTangent::zero(5)).unwrap();
        assert!((y.g.rep() - x.g.rep()).norm() < 1e-15);
        assert!((y.p.matrix() - x.p.matrix()).norm() < 1e-14);
    }

    #[test]
    fn distance_reduces_to_grassmann_for_equal_spd() {
        let (x, mut y) = sample();
        y.p = x.p;
        let d = distance(&x, &y, GrassmannMetric::Frobenius);
        assert!((d - grassmann::distance(&x.g, &y.g, GrassmannMetric::Frobenius)).abs() < 1e-15);
    }

    #[test]
    fn round_trip() {
        let (x, y) = sample();
        let back = exp(&x, &log(&x, &y).unwrap()).unwrap();
        assert!(distance(&back, &y, GrassmannMetric::Frobenius) < 1e-10);
        let v = log(&x, &y).unwrap();
        let moved = transport_to(&x, &y, &v).unwrap();
        let back = transport_to(&y, &x, &moved).unwrap();
        assert!((back.g - v.g).norm() < 1e-10 && (back.p - v.p).norm() < 1e-10);
    }
}

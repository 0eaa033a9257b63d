//! Landmark-affine standardization `X = X̃·M + 1·bᵀ`.

use nalgebra::{Matrix2, RowVector2, Vector2};

use crate::error::{Error, Result};
use crate::grassmann::{self, GrassmannMetric, GrassmannPoint};
use crate::linalg::{self, Mat};
use crate::shape::{centered, LandmarkShape, RANK_TOL};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Variant {
    /// Left singular vectors as representative, `M = ΣVᵀ`.
    #[default]
    Gl2,
    /// Polar representative `UVᵀ`, `M = VΣVᵀ` symmetric positive definite.
    Polar,
}

/// Invertible linear part plus translation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineFactor {
    pub m: Matrix2<f64>,
    pub b: Vector2<f64>,
}

impl AffineFactor {
    pub fn new(m: Matrix2<f64>, b: Vector2<f64>) -> Result<Self> {
        if !(m.determinant().abs() > 1e-12) {
            return Err(Error::Singular(format!(
                "affine factor has determinant {:e}",
                m.determinant()
            )));
        }
        Ok(Self { m, b })
    }

    pub fn identity() -> Self {
        Self {
            m: Matrix2::identity(),
            b: Vector2::zeros(),
        }
    }

    /// `rep·m + 1·bᵀ`.
    pub fn apply(&self, rep: &Mat) -> Mat {
        let mut out = rep * self.m;
        let row = RowVector2::new(self.b[0], self.b[1]);
        for mut r in out.row_iter_mut() {
            r += row;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparableShape {
    pub grass: GrassmannPoint,
    pub affine: AffineFactor,
    pub variant: Variant,
}

/// `ℓ₁·diag(ℓ₂, ℓ₃)·[[cos ℓ₄, sin ℓ₄], [−sin ℓ₄, cos ℓ₄]]`.
pub fn l4_matrix(l: [f64; 4]) -> Result<Matrix2<f64>> {
    let scale = l[0] * l[1] * l[2];
    if !(scale != 0.0 && scale.is_finite() && l[3].is_finite()) {
        return Err(Error::Singular(format!(
            "scale parameters {}, {}, {} give a singular matrix",
            l[0], l[1], l[2]
        )));
    }
    let (s, c) = l[3].sin_cos();
    Ok(Matrix2::new(l[0] * l[1], 0.0, 0.0, l[0] * l[2]) * Matrix2::new(c, s, -s, c))
}

pub fn la_standardize(shape: &LandmarkShape, variant: Variant) -> Result<SeparableShape> {
    la_standardize_points(shape.points(), variant)
}

pub fn la_standardize_points(points: &Mat, variant: Variant) -> Result<SeparableShape> {
    if points.nrows() < 3 {
        return Err(Error::InvalidArgument(format!(
            "a shape needs at least 3 landmarks, got {}",
            points.nrows()
        )));
    }
    let (c, b) = centered(points);
    let svd = linalg::thin_svd(&c);
    let ratio = if svd.sigma[0] > 0.0 { svd.sigma[1] / svd.sigma[0] } else { 0.0 };
    if !(ratio > RANK_TOL) {
        return Err(Error::RankDeficient { ratio });
    }
    let sigma = Matrix2::from_diagonal(&svd.sigma);
    let (rep, m) = match variant {
        Variant::Gl2 => (svd.u.clone(), sigma * svd.v.transpose()),
        Variant::Polar => (
            &svd.u * svd.v.transpose(),
            linalg::symmetrize(&(svd.v * sigma * svd.v.transpose())),
        ),
    };
    Ok(SeparableShape {
        grass: GrassmannPoint::new(rep)?,
        affine: AffineFactor { m, b },
        variant,
    })
}

pub fn reconstruct_points(sep: &SeparableShape) -> Mat {
    sep.affine.apply(sep.grass.rep())
}

pub fn reconstruct(sep: &SeparableShape) -> Result<LandmarkShape> {
    LandmarkShape::new(reconstruct_points(sep))
}

/// Re-standardizing a representative leaves its subspace unchanged.
pub fn idempotence_check(shape: &LandmarkShape) -> Result<bool> {
    let once = la_standardize(shape, Variant::Gl2)?;
    let twice = la_standardize_points(once.grass.rep(), Variant::Gl2)?;
    Ok(grassmann::distance(&once.grass, &twice.grass, GrassmannMetric::Frobenius) <= 1e-10)
}

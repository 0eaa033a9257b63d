//! Generative shape model: PGA over LA-standardized representatives, with an
//! optional SPD factor model for the affine part.

use nalgebra::{DMatrix, DVector, Matrix2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grassmann::{self, GrassmannMetric, GrassmannPoint};
use crate::linalg::Mat;
use crate::manifold::{Grassmann, Spd};
use crate::shape::LandmarkShape;
use crate::spd::SpdMatrix;
use crate::standardize::{la_standardize, AffineFactor, Variant};
use crate::stats::{mean_scale, sample_domain, KarcherOptions, MeanScale, MeanScaleKind, Pga, PgaOptions, SampleDomain};

pub const DEFAULT_GRASSMANN_RANK: usize = 4;
pub const SPD_RANK: usize = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ModelKind {
    /// Undulations only; shapes are generated with a fixed mean scale.
    #[default]
    Grassmann,
    /// Undulations plus an SPD factor model of the linear scale.
    Product,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    pub kind: ModelKind,
    pub rank: usize,
    pub karcher: KarcherOptions,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            kind: ModelKind::Grassmann,
            rank: DEFAULT_GRASSMANN_RANK,
            karcher: KarcherOptions::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ShapeModel {
    pub grass: Pga<Grassmann>,
    pub spd: Option<Pga<Spd>>,
    pub mean_scale: MeanScale,
    /// Domain of the concatenated coefficient vectors (Grassmann, then SPD).
    pub domain: SampleDomain,
    /// Largest Grassmann distance from the mean to a training shape.
    pub training_radius: f64,
}

/// Linear scale used when turning a generated representative into a shape.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum ScaleChoice {
    /// Mean scale for Grassmann models, the generated SPD factor for product
    /// models.
    #[default]
    Model,
    Fixed(Matrix2<f64>),
}

impl ShapeModel {
    pub fn fit(shapes: &[LandmarkShape], opts: &FitOptions) -> Result<Self> {
        if shapes.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "fitting needs at least 2 shapes, got {}",
                shapes.len()
            )));
        }
        let n = shapes[0].n();
        if let Some(k) = shapes.iter().position(|s| s.n() != n) {
            return Err(Error::InvalidArgument(format!(
                "shape {k} has {} landmarks, expected {n}",
                shapes[k].n()
            )));
        }
        let seps: Vec<_> = shapes
            .par_iter()
            .map(|s| la_standardize(s, Variant::Polar))
            .collect::<Result<_>>()?;
        let reps: Vec<GrassmannPoint> = seps.iter().map(|s| s.grass.clone()).collect();
        let factors: Vec<Matrix2<f64>> = seps.iter().map(|s| s.affine.m).collect();

        let grass = Pga::fit(
            Grassmann,
            &reps,
            &PgaOptions {
                rank: opts.rank,
                karcher: opts.karcher,
            },
        )?;
        let (spd, scale) = match opts.kind {
            ModelKind::Grassmann => (None, mean_scale(&factors, MeanScaleKind::ExtrinsicGl2)?),
            ModelKind::Product => {
                let spds: Vec<SpdMatrix> = factors.iter().map(|m| SpdMatrix::new(*m)).collect::<Result<_>>()?;
                let rank = SPD_RANK.min(spds.len() - 1);
                let pga = Pga::fit(
                    Spd,
                    &spds,
                    &PgaOptions {
                        rank,
                        karcher: opts.karcher,
                    },
                )?;
                let scale = MeanScale {
                    m_bar: *pga.mean.matrix(),
                    kind: MeanScaleKind::IntrinsicSpd,
                };
                (Some(pga), scale)
            }
        };
        let training_radius = reps
            .par_iter()
            .map(|r| grassmann::distance(&grass.mean, r, GrassmannMetric::Frobenius))
            .collect::<Vec<_>>()
            .into_iter()
            .fold(0.0, f64::max);
        let mut model = Self {
            grass,
            spd,
            mean_scale: scale,
            domain: sample_domain(&DMatrix::zeros(0, 0)),
            training_radius,
        };
        model.domain = sample_domain(&model.coords());
        Ok(model)
    }

    pub fn kind(&self) -> ModelKind {
        if self.spd.is_some() {
            ModelKind::Product
        } else {
            ModelKind::Grassmann
        }
    }

    pub fn n(&self) -> usize {
        self.grass.mean.n()
    }

    pub fn grass_rank(&self) -> usize {
        self.grass.rank()
    }

    /// Total number of coefficients accepted by [`generate`](Self::generate).
    pub fn n_coeffs(&self) -> usize {
        self.grass.rank() + self.spd.as_ref().map_or(0, |p| p.rank())
    }

    /// Concatenated normal coordinates, one column per training shape.
    pub fn coords(&self) -> DMatrix<f64> {
        match &self.spd {
            None => self.grass.coords.clone(),
            Some(spd) => {
                let (r, s) = (self.grass.rank(), spd.rank());
                let mut out = DMatrix::zeros(r + s, self.grass.n_samples());
                out.rows_mut(0, r).copy_from(&self.grass.coords);
                out.rows_mut(r, s).copy_from(&spd.coords);
                out
            }
        }
    }

    fn split<'a>(&self, coeffs: &'a [f64]) -> Result<(&'a [f64], &'a [f64])> {
        if coeffs.len() != self.n_coeffs() {
            return Err(Error::InvalidArgument(format!(
                "model takes {} coefficients, got {}",
                self.n_coeffs(),
                coeffs.len()
            )));
        }
        Ok(coeffs.split_at(self.grass.rank()))
    }

    /// Representative (and SPD factor, for product models) at `coeffs`.
    pub fn generate(&self, coeffs: &[f64]) -> Result<(GrassmannPoint, Option<SpdMatrix>)> {
        let (g, s) = self.split(coeffs)?;
        let rep = self.grass.generate(g)?;
        let p = match &self.spd {
            Some(spd) => Some(spd.generate(s)?),
            None => None,
        };
        Ok((rep, p))
    }

    /// Grassmann tangent `vec⁻¹(U_r t)` at the mean for the leading `r`
    /// coefficients.
    pub fn tangent(&self, grass_coeffs: &[f64]) -> Result<Mat> {
        self.grass.tangent(grass_coeffs)
    }

    pub fn generate_shape(&self, coeffs: &[f64], scale: ScaleChoice) -> Result<LandmarkShape> {
        let (rep, p) = self.generate(coeffs)?;
        let m = match (scale, p) {
            (ScaleChoice::Fixed(m), _) => m,
            (ScaleChoice::Model, Some(p)) => *p.matrix(),
            (ScaleChoice::Model, None) => self.mean_scale.m_bar,
        };
        let affine = AffineFactor::new(m, nalgebra::Vector2::zeros())?;
        LandmarkShape::new(affine.apply(rep.rep()))
    }

    /// Coefficient vectors of `sweeps` corner-to-corner sweeps through the
    /// training box, `count` samples each, drawn from `seed`.
    pub fn corner_sweeps(&self, seed: u64, sweeps: usize, count: usize) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..sweeps)
            .flat_map(|_| self.domain.corner_sweep(&mut rng, count))
            .map(|v| v.iter().copied().collect())
            .collect()
    }

    pub fn embed(&self, shape: &LandmarkShape) -> Result<DVector<f64>> {
        let sep = la_standardize(shape, Variant::Polar)?;
        let t = self.grass.embed(&sep.grass)?;
        match &self.spd {
            None => Ok(t),
            Some(spd) => {
                let l = spd.embed(&SpdMatrix::new(sep.affine.m)?)?;
                Ok(DVector::from_iterator(t.len() + l.len(), t.iter().chain(l.iter()).copied()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cst::{cst_airfoil, family_coeffs, perturb_coeffs, CstSampling};
    use crate::shape::self_intersects;

    fn ensemble(count: usize) -> Vec<LandmarkShape> {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        (0..count)
            .map(|k| {
                let s = (k % 4) as f64 / 3.0;
                let nominal = family_coeffs(0.35 - 0.15 * s, 0.2 * s);
                let c = perturb_coeffs(&mut rng, &nominal, 0.2, (0.0, 0.45));
                cst_airfoil(&c, 81, CstSampling::Cosine).unwrap()
            })
            .collect()
    }

    #[test]
    fn grassmann_model() {
        let shapes = ensemble(24);
        let model = ShapeModel::fit(&shapes, &FitOptions::default()).unwrap();
        assert_eq!(model.kind(), ModelKind::Grassmann);
        assert_eq!(model.n_coeffs(), 4);
        let mean = model.generate_shape(&[0.0; 4], ScaleChoice::Model).unwrap();
        assert!(!self_intersects(&mean));
        for col in model.coords().column_iter() {
            assert!(model.domain.contains(&col.clone_owned()));
        }
        assert!(model.training_radius > 0.0);
        assert!(model.generate(&[0.0; 3]).is_err());
    }

    #[test]
    fn product_model() {
        let shapes = ensemble(16);
        let opts = FitOptions {
            kind: ModelKind::Product,
            ..FitOptions::default()
        };
        let model = ShapeModel::fit(&shapes, &opts).unwrap();
        assert_eq!(model.n_coeffs(), 7);
        let coords = model.coords();
        let t: Vec<f64> = coords.column(2).iter().copied().collect();
        let e = model.embed(&model.generate_shape(&t, ScaleChoice::Model).unwrap()).unwrap();
        assert!((e.rows(4, 3) - coords.column(2).rows(4, 3)).norm() < 1e-8);
    }

    #[test]
    fn identical_shapes_have_zero_variance() {
        let shape = ensemble(1).remove(0);
        let shapes = vec![shape.clone(), shape.clone(), shape];
        assert!(matches!(
            ShapeModel::fit(&shapes, &FitOptions { rank: 1, ..FitOptions::default() }),
            Err(Error::ZeroVariance)
        ));
    }
}

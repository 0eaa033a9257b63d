use nalgebra::{DVector, Matrix2};
use rayon::prelude::*;

use super::{build_blade, BladeDefinition, BladeModel, Station};
use crate::error::{Error, Result};
use crate::grassmann::{self, GrassmannMetric};
use crate::linalg::Mat;
use crate::manifold::Manifold;
use crate::model::ShapeModel;
use crate::shape::LandmarkShape;
use crate::standardize::AffineFactor;

/// Linear factor composed with each deformed station representative.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum DeformScale {
    /// Keep every station's own factor.
    #[default]
    Stations,
    /// The shape model's mean scale `M̄` at every station.
    Mean,
    Fixed(Matrix2<f64>),
}

#[derive(Clone, Debug)]
pub struct DeformReport {
    /// `‖Δ‖_F` at the Karcher mean.
    pub tangent_norm: f64,
    /// `‖τΔ‖_F` at each station.
    pub transported_norms: Vec<f64>,
    /// Normal coordinates of each transported tangent against the transported
    /// principal basis.
    pub station_coords: Vec<DVector<f64>>,
    /// Grassmann distance from the Karcher mean to each station.
    pub station_distances: Vec<f64>,
    /// Stations farther from the mean than any training shape.
    pub outside_training: Vec<usize>,
}

/// Applies the deformation `Δ = vec⁻¹(U_r·coeffs)` at every station by
/// transporting it from the Karcher mean and exponentiating there, then
/// rebuilds the blade with the original build options. A zero deformation
/// with station scales returns the blade unchanged.
pub fn consistent_deform(
    blade: &BladeModel,
    model: &ShapeModel,
    coeffs: &[f64],
    scale: DeformScale,
) -> Result<(BladeModel, DeformReport)> {
    if model.n() != blade.n() {
        return Err(Error::InvalidArgument(format!(
            "shape model has {} landmarks, blade has {}",
            model.n(),
            blade.n()
        )));
    }
    if coeffs.len() != model.grass_rank() {
        return Err(Error::InvalidArgument(format!(
            "deformation takes {} coefficients, got {}",
            model.grass_rank(),
            coeffs.len()
        )));
    }
    let mean = &model.grass.mean;
    let delta = model.tangent(coeffs)?;
    let basis: Vec<Mat> = (0..model.grass_rank())
        .map(|j| model.grass.manifold.unvectorize(mean, model.grass.basis.column(j).as_slice()))
        .collect();

    struct Moved {
        shape: Mat,
        norm: f64,
        coords: DVector<f64>,
        distance: f64,
    }
    let moved: Vec<Moved> = (0..blade.etas.len())
        .into_par_iter()
        .map(|k| {
            let eta = blade.etas[k];
            let rep = &blade.reps[k];
            let gamma = grassmann::transport_to(mean, rep, &delta).map_err(|e| e.at_station(eta))?;
            let coords = basis
                .iter()
                .map(|b| grassmann::transport_to(mean, rep, b).map(|tb| grassmann::inner(&gamma, &tb)))
                .collect::<Result<Vec<f64>>>()
                .map_err(|e| e.at_station(eta))?;
            let deformed = grassmann::exp(rep, &gamma).map_err(|e| e.at_station(eta))?;
            let m = match scale {
                DeformScale::Stations => blade.factors[k],
                DeformScale::Mean => model.mean_scale.m_bar,
                DeformScale::Fixed(m) => m,
            };
            let affine = AffineFactor::new(m, blade.offsets[k]).map_err(|e| e.at_station(eta))?;
            Ok(Moved {
                shape: affine.apply(deformed.rep()),
                norm: gamma.norm(),
                coords: DVector::from_vec(coords),
                distance: grassmann::distance(mean, rep, GrassmannMetric::Frobenius),
            })
        })
        .collect::<Result<_>>()?;

    let outside_training: Vec<usize> = moved
        .iter()
        .enumerate()
        .filter(|(_, m)| m.distance > model.training_radius)
        .map(|(k, _)| k)
        .collect();
    for &k in &outside_training {
        log::warn!(
            "station at eta {} lies {:.3e} from the mean, beyond the training radius {:.3e}",
            blade.etas[k],
            moved[k].distance,
            model.training_radius
        );
    }

    let report = DeformReport {
        tangent_norm: delta.norm(),
        transported_norms: moved.iter().map(|m| m.norm).collect(),
        station_coords: moved.iter().map(|m| m.coords.clone()).collect(),
        station_distances: moved.iter().map(|m| m.distance).collect(),
        outside_training,
    };
    if report.tangent_norm == 0.0 && scale == DeformScale::Stations {
        return Ok((blade.clone(), report));
    }
    let stations = blade
        .etas
        .iter()
        .zip(&moved)
        .map(|(&eta, m)| Ok(Station::new(eta, LandmarkShape::new(m.shape.clone()).map_err(|e| e.at_station(eta))?)))
        .collect::<Result<Vec<_>>>()?;
    let def = BladeDefinition {
        stations,
        span_length: blade.span_length,
        bend: blade.bend.clone(),
    };
    Ok((build_blade(&def, None, &blade.options)?, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blade::{synthetic_blade, BuildOptions};
    use crate::cst::{cst_airfoil, family_coeffs, perturb_coeffs, CstSampling};
    use crate::model::FitOptions;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const N: usize = 81;

    fn ensemble() -> Vec<LandmarkShape> {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        (0..30)
            .map(|k| {
                let s = (k % 5) as f64 / 4.0;
                let c = perturb_coeffs(&mut rng, &family_coeffs(0.40 - 0.22 * s, 0.25 * s), 0.2, (0.0, 0.45));
                cst_airfoil(&c, N, CstSampling::Cosine).unwrap()
            })
            .collect()
    }

    #[test]
    fn zero_coefficients_are_identity() {
        let model = ShapeModel::fit(&ensemble(), &FitOptions::default()).unwrap();
        let blade = build_blade(&synthetic_blade(6, N).unwrap(), None, &BuildOptions::default()).unwrap();
        let (out, report) = consistent_deform(&blade, &model, &[0.0; 4], DeformScale::Stations).unwrap();
        for k in 0..blade.etas.len() {
            let a = blade.station_points(k);
            let b = out.station_points(k);
            assert!((a - b).norm() < 1e-10 * blade.station_points(k).norm().max(1.0));
        }
        assert!(report.transported_norms.iter().all(|n| *n == 0.0));
    }

    #[test]
    fn transported_norms_and_coordinates() {
        let model = ShapeModel::fit(&ensemble(), &FitOptions::default()).unwrap();
        let blade = build_blade(&synthetic_blade(6, N).unwrap(), None, &BuildOptions::default()).unwrap();
        let coeffs = [0.02, -0.01, 0.015, 0.005];
        let (_, report) = consistent_deform(&blade, &model, &coeffs, DeformScale::Stations).unwrap();
        for (norm, c) in report.transported_norms.iter().zip(&report.station_coords) {
            assert!((norm - report.tangent_norm).abs() < 1e-10);
            assert!((c - DVector::from_column_slice(&coeffs)).norm() < 1e-9);
        }
    }

    #[test]
    fn stations_at_the_mean_match_generation() {
        let model = ShapeModel::fit(&ensemble(), &FitOptions::default()).unwrap();
        let mean = model.grass.mean.rep().clone();
        let stations = (0..3)
            .map(|k| {
                let m = Matrix2::new(1.0 + k as f64, 0.3, -0.2, 0.5);
                Station::new(k as f64 * 0.5, LandmarkShape::new(&mean * m).unwrap())
            })
            .collect();
        let blade = build_blade(&BladeDefinition::new(stations), None, &BuildOptions::default()).unwrap();
        let coeffs = [0.03, 0.01, -0.02, 0.0];
        let (out, _) = consistent_deform(&blade, &model, &coeffs, DeformScale::Stations).unwrap();
        let target = model.grass.generate(&coeffs).unwrap();
        for rep in &out.reps {
            assert!(grassmann::distance(rep, &target, GrassmannMetric::Frobenius) < 1e-10);
        }
    }
}

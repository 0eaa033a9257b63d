//! Blade assembly from spanwise sections: piecewise-geodesic interpolation of
//! the Grassmann part, splined affine schedules, and consistent deformations.

mod deform;
mod procrustes;
mod synthetic;
mod wireframe;

pub use deform::{consistent_deform, DeformReport, DeformScale};
pub use procrustes::{cluster_representatives, procrustes_rotation, ClusterDirection};
pub use synthetic::{synthetic_blade, SYNTHETIC_SPAN};
pub use wireframe::{emit_wireframe, uniform_etas, BendCurve, Section3, Wireframe};

use nalgebra::{Matrix2, Vector2, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grassmann::{self, GrassmannMetric, GrassmannPoint};
use crate::linalg::{self, Mat};
use crate::preprocess::{refine, PreprocessConfig};
use crate::shape::LandmarkShape;
use crate::spd::{self, SpdMatrix};
use crate::spline::Spline;
use crate::standardize::{la_standardize, AffineFactor, Variant};

#[derive(Clone, Debug, PartialEq)]
pub struct Station {
    pub eta: f64,
    pub shape: LandmarkShape,
    /// Explicit linear factor acting on the aligned representative.
    pub m: Option<Matrix2<f64>>,
    /// Explicit translation.
    pub b: Option<Vector2<f64>>,
}

impl Station {
    pub fn new(eta: f64, shape: LandmarkShape) -> Self {
        Self {
            eta,
            shape,
            m: None,
            b: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BladeDefinition {
    pub stations: Vec<Station>,
    /// Physical span length; section `η` sits at `z = η·span_length`.
    pub span_length: f64,
    /// Optional bend-axis knots `(η, [x, y, z])`.
    pub bend: Vec<(f64, Vector3<f64>)>,
}

impl BladeDefinition {
    pub fn new(stations: Vec<Station>) -> Self {
        Self {
            stations,
            span_length: 1.0,
            bend: Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.stations.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a blade needs at least 2 stations, got {}",
                self.stations.len()
            )));
        }
        for w in self.stations.windows(2) {
            if !(w[1].eta >= w[0].eta) {
                return Err(Error::Ordering(format!(
                    "station positions must be nondecreasing ({} then {})",
                    w[0].eta, w[1].eta
                )));
            }
        }
        if self.stations.iter().any(|s| !s.eta.is_finite()) {
            return Err(Error::Ordering("non-finite station position".into()));
        }
        if !(self.span_length > 0.0 && self.span_length.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "span length must be positive, got {}",
                self.span_length
            )));
        }
        Ok(())
    }

    /// Drops stations that repeat the previous position with an identical
    /// section; a repeated position with a different section is an error.
    fn merge_repeated(&self) -> Result<Self> {
        let mut stations: Vec<Station> = Vec::with_capacity(self.stations.len());
        for s in &self.stations {
            match stations.last() {
                Some(prev) if prev.eta == s.eta => {
                    if prev != s {
                        return Err(Error::Ordering(format!(
                            "stations repeat position {} with different sections",
                            s.eta
                        )));
                    }
                }
                _ => stations.push(s.clone()),
            }
        }
        if stations.len() < 2 {
            return Err(Error::InvalidArgument("a blade needs at least 2 distinct station positions".into()));
        }
        Ok(Self {
            stations,
            ..self.clone()
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BladeVariant {
    /// Grassmann path plus six entrywise splines of `M̃(η)` and `b(η)`.
    #[default]
    Gl2Schedule,
    /// Grassmann path, SPD path over its own cumulative distances, a
    /// rotation-angle spline and translation splines.
    ProductSpd,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BuildOptions {
    pub variant: BladeVariant,
    pub direction: ClusterDirection,
    /// Restrict clustering to proper rotations. Always on for the product
    /// variant, whose rotation schedule is an angle spline.
    pub strict: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            variant: BladeVariant::Gl2Schedule,
            direction: ClusterDirection::TipToRoot,
            strict: false,
        }
    }
}

#[derive(Clone, Debug)]
enum AffineSchedule {
    Gl2 {
        /// m11, m12, m21, m22.
        m: [Spline; 4],
    },
    Product {
        spds: Vec<SpdMatrix>,
        spd_logs: Vec<Mat2>,
        psi: Spline,
        ell: Vec<f64>,
        angle: Spline,
    },
}

type Mat2 = Matrix2<f64>;

#[derive(Clone, Debug)]
pub struct BladeModel {
    pub variant: BladeVariant,
    pub options: BuildOptions,
    pub etas: Vec<f64>,
    /// Procrustes-aligned representatives.
    pub reps: Vec<GrassmannPoint>,
    /// Right factors applied during clustering.
    pub rotations: Vec<Matrix2<f64>>,
    /// Stations whose clustering factor is a reflection.
    pub reflections: Vec<usize>,
    /// Cumulative Grassmann distances `t_k`.
    pub t: Vec<f64>,
    /// Per-station linear factor acting on the aligned representative.
    pub factors: Vec<Matrix2<f64>>,
    pub offsets: Vec<Vector2<f64>>,
    pub span_length: f64,
    pub bend: Vec<(f64, Vector3<f64>)>,
    logs: Vec<Mat>,
    /// Rotation angle closing the gap between `Exp(Log)` and the next
    /// representative, blended linearly over each interval.
    end_angles: Vec<f64>,
    phi: Spline,
    b: [Spline; 2],
    schedule: AffineSchedule,
}

/// Signed angle of a 2×2 rotation in the `[[c, −s], [s, c]]` convention.
fn rotation_angle(r: &Matrix2<f64>) -> f64 {
    r[(1, 0)].atan2(r[(0, 0)])
}

fn unwrap_angles(raw: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(raw.len());
    for (k, &a) in raw.iter().enumerate() {
        if k == 0 {
            out.push(a);
            continue;
        }
        let prev = out[k - 1];
        let mut v = a;
        while v - prev > std::f64::consts::PI {
            v -= 2.0 * std::f64::consts::PI;
        }
        while v - prev < -std::f64::consts::PI {
            v += 2.0 * std::f64::consts::PI;
        }
        out.push(v);
    }
    out
}

/// Standardizes, clusters and splines a blade definition.
///
/// With `cfg` every station is first refined to `cfg.n` landmarks; without it
/// the stations must already share a landmark count.
pub fn build_blade(def: &BladeDefinition, cfg: Option<&PreprocessConfig>, opts: &BuildOptions) -> Result<BladeModel> {
    def.validate()?;
    let merged = def.merge_repeated()?;
    let def = &merged;
    let shapes: Vec<LandmarkShape> = def
        .stations
        .par_iter()
        .map(|s| match cfg {
            Some(c) => refine(&s.shape, c).map_err(|e| e.at_station(s.eta)),
            None => Ok(s.shape.clone()),
        })
        .collect::<Result<_>>()?;
    let n = shapes[0].n();
    for (s, shape) in def.stations.iter().zip(&shapes) {
        if shape.n() != n {
            return Err(Error::InvalidArgument(format!(
                "station has {} landmarks, expected {n}",
                shape.n()
            ))
            .at_station(s.eta));
        }
    }
    let variant = match opts.variant {
        BladeVariant::Gl2Schedule => Variant::Gl2,
        BladeVariant::ProductSpd => Variant::Polar,
    };
    let seps: Vec<_> = def
        .stations
        .iter()
        .zip(&shapes)
        .map(|(s, shape)| la_standardize(shape, variant).map_err(|e| e.at_station(s.eta)))
        .collect::<Result<_>>()?;
    let raw_reps: Vec<GrassmannPoint> = seps.iter().map(|s| s.grass.clone()).collect();
    let proper = opts.strict || opts.variant == BladeVariant::ProductSpd;
    let (reps, rotations) = cluster_representatives(&raw_reps, opts.direction, proper);
    let reflections: Vec<usize> = rotations
        .iter()
        .enumerate()
        .filter(|(_, r)| r.determinant() < 0.0)
        .map(|(k, _)| k)
        .collect();
    if !reflections.is_empty() {
        log::warn!(
            "Procrustes clustering applied reflections at stations {:?}",
            reflections.iter().map(|&k| def.stations[k].eta).collect::<Vec<_>>()
        );
    }

    // X = X̃ M̃ + b and X̃' = X̃ R give X = X̃' Rᵀ M̃ + b
    let mut factors = Vec::with_capacity(reps.len());
    let mut offsets = Vec::with_capacity(reps.len());
    for ((st, sep), r) in def.stations.iter().zip(&seps).zip(&rotations) {
        factors.push(st.m.unwrap_or(r.transpose() * sep.affine.m));
        offsets.push(st.b.unwrap_or(sep.affine.b));
    }
    for (st, m) in def.stations.iter().zip(&factors) {
        AffineFactor::new(*m, Vector2::zeros()).map_err(|e| e.at_station(st.eta))?;
    }

    let etas: Vec<f64> = def.stations.iter().map(|s| s.eta).collect();
    let k = reps.len();
    let mut logs = Vec::with_capacity(k - 1);
    let mut end_angles = Vec::with_capacity(k - 1);
    let mut t = vec![0.0];
    for i in 0..k - 1 {
        let log = grassmann::log(&reps[i], &reps[i + 1]).map_err(|e| e.at_station(etas[i + 1]))?;
        let landed = grassmann::exp(&reps[i], &log)?;
        let gap = landed.rep().transpose() * reps[i + 1].rep();
        let (u, _, v) = linalg::svd2(&gap);
        let gap = u * v.transpose();
        if gap.determinant() < 0.0 {
            return Err(Error::Contract(format!(
                "adjacent representatives differ by a reflection; \
                 rebuild without strict rotations (between eta {} and {})",
                etas[i],
                etas[i + 1]
            ))
            .at_station(etas[i + 1]));
        }
        end_angles.push(rotation_angle(&gap));
        t.push(t[i] + grassmann::distance(&reps[i], &reps[i + 1], GrassmannMetric::Frobenius));
        logs.push(log);
    }
    let phi = Spline::pchip(&etas, &t)?;
    let b = [
        Spline::affine_schedule(&etas, &offsets.iter().map(|b| b[0]).collect::<Vec<_>>())?,
        Spline::affine_schedule(&etas, &offsets.iter().map(|b| b[1]).collect::<Vec<_>>())?,
    ];
    let schedule = match opts.variant {
        BladeVariant::Gl2Schedule => {
            let entry = |r: usize, c: usize| -> Result<Spline> {
                Spline::affine_schedule(&etas, &factors.iter().map(|m| m[(r, c)]).collect::<Vec<_>>())
            };
            AffineSchedule::Gl2 {
                m: [entry(0, 0)?, entry(0, 1)?, entry(1, 0)?, entry(1, 1)?],
            }
        }
        BladeVariant::ProductSpd => product_schedule(&etas, &factors)?,
    };
    Ok(BladeModel {
        variant: opts.variant,
        options: *opts,
        etas,
        reps,
        rotations,
        reflections,
        t,
        factors,
        offsets,
        span_length: def.span_length,
        bend: def.bend.clone(),
        logs,
        end_angles,
        phi,
        b,
        schedule,
    })
}

/// Splits each factor as `P·R` (SPD times rotation) and splines both parts.
fn product_schedule(etas: &[f64], factors: &[Matrix2<f64>]) -> Result<AffineSchedule> {
    let mut spds = Vec::with_capacity(factors.len());
    let mut angles = Vec::with_capacity(factors.len());
    for (eta, m) in etas.iter().zip(factors) {
        let (u, s, v) = linalg::svd2(m);
        let rot = u * v.transpose();
        if rot.determinant() < 0.0 {
            return Err(Error::Contract(
                "linear factor has negative determinant; the product variant needs a proper rotation".into(),
            )
            .at_station(*eta));
        }
        let p = linalg::symmetrize(&(u * Matrix2::from_diagonal(&s) * u.transpose()));
        spds.push(SpdMatrix::new(p).map_err(|e| e.at_station(*eta))?);
        angles.push(rotation_angle(&rot));
    }
    let mut ell = vec![0.0];
    let mut spd_logs = Vec::with_capacity(spds.len() - 1);
    for i in 0..spds.len() - 1 {
        ell.push(ell[i] + spd::distance(&spds[i], &spds[i + 1]));
        spd_logs.push(spd::log(&spds[i], &spds[i + 1]));
    }
    Ok(AffineSchedule::Product {
        psi: Spline::pchip(etas, &ell)?,
        angle: Spline::affine_schedule(etas, &unwrap_angles(&angles))?,
        spds,
        spd_logs,
        ell,
    })
}

fn normalized(value: f64, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        ((value - lo) / (hi - lo)).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

impl BladeModel {
    pub fn n(&self) -> usize {
        self.reps[0].n()
    }

    pub fn span(&self) -> (f64, f64) {
        (self.etas[0], self.etas[self.etas.len() - 1])
    }

    fn locate(&self, eta: f64) -> Result<usize> {
        let (lo, hi) = self.span();
        if !(eta >= lo && eta <= hi) {
            return Err(Error::OutOfSpan { eta, lo, hi });
        }
        let last = self.etas.len() - 2;
        Ok(self.etas[1..=last].partition_point(|&e| e <= eta))
    }

    /// Interpolated representative `(X̃∘φ)(η)`.
    pub fn representative(&self, eta: f64) -> Result<GrassmannPoint> {
        let k = self.locate(eta)?;
        let t = normalized(self.phi.eval(eta), self.t[k], self.t[k + 1]);
        if t == 0.0 {
            return Ok(self.reps[k].clone());
        }
        let y = grassmann::exp(&self.reps[k], &(&self.logs[k] * t))?;
        Ok(y.rotated(&linalg::rotation(t * self.end_angles[k])))
    }

    /// Linear factor and translation at `η`.
    pub fn affine(&self, eta: f64) -> Result<AffineFactor> {
        let k = self.locate(eta)?;
        let b = Vector2::new(self.b[0].eval(eta), self.b[1].eval(eta));
        let m = match &self.schedule {
            AffineSchedule::Gl2 { m } => Matrix2::new(m[0].eval(eta), m[1].eval(eta), m[2].eval(eta), m[3].eval(eta)),
            AffineSchedule::Product {
                spds,
                spd_logs,
                psi,
                ell,
                angle,
            } => {
                let s = normalized(psi.eval(eta), ell[k], ell[k + 1]);
                let p = if s == 0.0 { spds[k] } else { spd::exp(&spds[k], &(spd_logs[k] * s))? };
                p.matrix() * linalg::rotation(angle.eval(eta))
            }
        };
        Ok(AffineFactor { m, b })
    }

    /// Section landmarks `X(η) = (X̃∘φ)(η)·M(η) + 1·b(η)ᵀ`.
    pub fn evaluate_points(&self, eta: f64) -> Result<Mat> {
        let rep = self.representative(eta)?;
        Ok(self.affine(eta)?.apply(rep.rep()))
    }

    pub fn evaluate(&self, eta: f64) -> Result<LandmarkShape> {
        LandmarkShape::new(self.evaluate_points(eta)?)
    }

    /// Station shape rebuilt from its aligned representative and factors.
    pub fn station_points(&self, k: usize) -> Mat {
        AffineFactor {
            m: self.factors[k],
            b: self.offsets[k],
        }
        .apply(self.reps[k].rep())
    }

    /// Parametrization `φ(η)` of cumulative Grassmann distance.
    pub fn phi(&self, eta: f64) -> f64 {
        self.phi.eval(eta)
    }
}

/// Evaluate a blade at several positions in parallel, preserving order.
pub fn evaluate_many(model: &BladeModel, etas: &[f64]) -> Result<Vec<Mat>> {
    etas.par_iter().map(|&e| model.evaluate_points(e)).collect()
}

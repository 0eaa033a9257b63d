//! Class-shape transformation airfoils and a small synthetic family of
//! nominal sections.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::shape::{self_intersects, LandmarkShape};

/// Bernstein coefficients per surface.
pub const CST_COEFFS: usize = 9;
const ORDER: usize = CST_COEFFS - 1;
/// Class function exponents: round nose, sharp tail.
const N1: f64 = 0.5;
const N2: f64 = 1.0;

/// Coefficient range used for random draws.
pub const DEFAULT_RANGE: (f64, f64) = (0.0, 0.45);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CstSampling {
    /// `x = (1 + cos 2πu)/2` for uniform `u`: clustered at both edges.
    #[default]
    Cosine,
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CstCoeffs {
    pub upper: [f64; CST_COEFFS],
    /// Lower-surface coefficients measure downward thickness, so positive
    /// values on both surfaces give a valid section.
    pub lower: [f64; CST_COEFFS],
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn class(x: f64) -> f64 {
    x.powf(N1) * (1.0 - x).powf(N2)
}

fn bernstein_sum(coeffs: &[f64; CST_COEFFS], x: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| a * binomial(ORDER, i) * x.powi(i as i32) * (1.0 - x).powi((ORDER - i) as i32))
        .sum()
}

pub fn upper_surface(c: &CstCoeffs, x: f64) -> f64 {
    class(x) * bernstein_sum(&c.upper, x)
}

pub fn lower_surface(c: &CstCoeffs, x: f64) -> f64 {
    -class(x) * bernstein_sum(&c.lower, x)
}

/// Traversal parameter `u ∈ [0, 1]` to chordwise position and surface.
fn station(u: f64, sampling: CstSampling) -> (f64, bool) {
    let upper = u <= 0.5;
    let x = match sampling {
        CstSampling::Cosine => 0.5 * (1.0 + (2.0 * std::f64::consts::PI * u).cos()),
        CstSampling::Uniform => {
            if upper {
                1.0 - 2.0 * u
            } else {
                2.0 * u - 1.0
            }
        }
    };
    (x.clamp(0.0, 1.0), upper)
}

/// Airfoil sampled at `n_c` landmarks, trailing edge → upper surface →
/// leading edge → lower surface → trailing edge (the trailing edge appears
/// twice, closing the curve).
pub fn cst_airfoil(c: &CstCoeffs, n_c: usize, sampling: CstSampling) -> Result<LandmarkShape> {
    if n_c < 4 {
        return Err(Error::InvalidArgument(format!(
            "CST airfoil needs at least 4 landmarks, got {n_c}"
        )));
    }
    if c.upper.iter().chain(&c.lower).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite CST coefficient".into()));
    }
    let mut pts = Mat::zeros(n_c);
    let last = (n_c - 1) as f64;
    for i in 0..n_c {
        let u = i as f64 / last;
        let (x, upper) = station(u, sampling);
        pts[(i, 0)] = x;
        pts[(i, 1)] = if upper { upper_surface(c, x) } else { lower_surface(c, x) };
    }
    pts[(0, 0)] = 1.0;
    pts[(0, 1)] = 0.0;
    pts[(n_c - 1, 0)] = 1.0;
    pts[(n_c - 1, 1)] = 0.0;
    LandmarkShape::new(pts)
}

pub fn random_coeffs<R: Rng + ?Sized>(rng: &mut R, range: (f64, f64)) -> CstCoeffs {
    let mut draw = || {
        let mut out = [0.0; CST_COEFFS];
        for v in out.iter_mut() {
            *v = rng.gen_range(range.0..=range.1);
        }
        out
    };
    let upper = draw();
    let lower = draw();
    CstCoeffs { upper, lower }
}

/// Each coefficient scaled by an independent factor in `[1 − frac, 1 + frac]`,
/// then clamped to `range`.
pub fn perturb_coeffs<R: Rng + ?Sized>(rng: &mut R, nominal: &CstCoeffs, frac: f64, range: (f64, f64)) -> CstCoeffs {
    let mut out = *nominal;
    for v in out.upper.iter_mut().chain(out.lower.iter_mut()) {
        let f = if frac > 0.0 { rng.gen_range(-frac..=frac) } else { 0.0 };
        *v = (*v * (1.0 + f)).clamp(range.0, range.1);
    }
    out
}

const BASE: [f64; CST_COEFFS] = [1.0, 0.95, 0.95, 0.95, 0.9, 0.9, 0.85, 0.8, 0.8];
const CAMBER: [f64; CST_COEFFS] = [0.1, 0.15, 0.2, 0.25, 0.25, 0.2, 0.15, 0.1, 0.05];

/// A nominal section with the given thickness-ish scale and camber weight.
pub fn family_coeffs(thickness: f64, camber: f64) -> CstCoeffs {
    let tau = thickness / 0.77;
    let mut upper = [0.0; CST_COEFFS];
    let mut lower = [0.0; CST_COEFFS];
    for i in 0..CST_COEFFS {
        upper[i] = tau * BASE[i] + camber * CAMBER[i];
        lower[i] = tau * BASE[i] - camber * CAMBER[i];
    }
    CstCoeffs { upper, lower }
}

/// Nominal sections from thick/symmetric (root-like) to thin/cambered
/// (tip-like), with class labels. All coefficients lie in [`DEFAULT_RANGE`].
pub fn nominal_family(count: usize) -> Vec<(String, CstCoeffs)> {
    (0..count)
        .map(|k| {
            let s = if count > 1 { k as f64 / (count - 1) as f64 } else { 0.0 };
            let thickness = 0.32 - 0.16 * s;
            let camber = 0.2 * s;
            (format!("nominal{k:02}"), family_coeffs(thickness, camber))
        })
        .collect()
}

/// How [`cst_dataset`] draws coefficients.
#[derive(Clone, Debug, PartialEq)]
pub enum DatasetMode {
    /// Independent uniform draws on `range`.
    Uniform { range: (f64, f64) },
    /// Perturbations of the nominals, taken round-robin.
    Perturb {
        nominals: Vec<(String, CstCoeffs)>,
        frac: f64,
        range: (f64, f64),
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CstSample {
    pub label: String,
    pub coeffs: CstCoeffs,
    pub shape: LandmarkShape,
}

/// Draws per shape before giving up on a valid section.
const MAX_DRAWS: usize = 100;

/// Reproducible synthetic ensemble. Draws that fail the rank or
/// self-intersection guards are redrawn; the number of redraws is returned.
pub fn cst_dataset(
    count: usize,
    mode: &DatasetMode,
    n_c: usize,
    sampling: CstSampling,
    seed: u64,
) -> Result<(Vec<CstSample>, usize)> {
    if let DatasetMode::Perturb { nominals, .. } = mode {
        if nominals.is_empty() {
            return Err(Error::InvalidArgument("perturbation mode needs at least one nominal".into()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut redrawn = 0;
    for k in 0..count {
        let mut accepted = None;
        for _ in 0..MAX_DRAWS {
            let (label, coeffs) = match mode {
                DatasetMode::Uniform { range } => ("random".to_string(), random_coeffs(&mut rng, *range)),
                DatasetMode::Perturb { nominals, frac, range } => {
                    let (label, nominal) = &nominals[k % nominals.len()];
                    (label.clone(), perturb_coeffs(&mut rng, nominal, *frac, *range))
                }
            };
            match cst_airfoil(&coeffs, n_c, sampling) {
                Ok(shape) if !self_intersects(&shape) => {
                    accepted = Some(CstSample { label, coeffs, shape });
                    break;
                }
                _ => redrawn += 1,
            }
        }
        out.push(accepted.ok_or_else(|| {
            Error::InvalidArgument(format!("no valid section after {MAX_DRAWS} draws for shape {k}"))
        })?);
    }
    Ok((out, redrawn))
}

//! Refinement convergence experiment: random CST airfoils sampled sparsely,
//! refined by splines to a dense reference parametrization, and compared with
//! the dense truth.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cst::{cst_airfoil, random_coeffs, CstCoeffs, CstSampling, DEFAULT_RANGE};
use crate::error::{Error, Result};
use crate::grassmann::{self, GrassmannMetric};
use crate::io::fmt_f64;
use crate::linalg::Mat;
use crate::preprocess::{refine_at, SplineKind};
use crate::shape::{cumulative_lengths, landmark_gauge};
use crate::standardize::{la_standardize, Variant};

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceConfig {
    pub trials: usize,
    pub n_ref: usize,
    pub nc_list: Vec<usize>,
    pub seed: u64,
    pub range: (f64, f64),
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            n_ref: 2000,
            nc_list: vec![20, 40, 80, 160, 320],
            seed: 0,
            range: DEFAULT_RANGE,
        }
    }
}

/// Statistics over trials at one sparse landmark count.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n_c: usize,
    /// Trial average of the mean consecutive-landmark gap.
    pub gauge_mean: f64,
    /// Trial average of the largest consecutive-landmark gap.
    pub gauge_max: f64,
    /// `‖X − X*‖_{∞,2}`: mean, median and max over trials.
    pub euclid_mean: f64,
    pub euclid_median: f64,
    pub euclid_max: f64,
    /// Angle-sum Grassmann distance: mean, median and max over trials.
    pub grass_mean: f64,
    pub grass_median: f64,
    pub grass_max: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares log-log slope of mean Grassmann error against max gauge.
    pub slope_grass_max_gauge: f64,
    /// Same against mean gauge.
    pub slope_grass_mean_gauge: f64,
    /// Mean Euclidean error against max gauge.
    pub slope_euclid_max_gauge: f64,
    /// Trials whose draw could not be refined.
    pub skipped: usize,
}

pub const CSV_HEADER: &str =
    "n_c,gauge_mean,gauge_max,euclid_mean,euclid_median,euclid_max,grass_mean,grass_median,grass_max";

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

struct Sample {
    gauge_mean: f64,
    gauge_max: f64,
    euclid: f64,
    grass: f64,
}

fn trial(c: &CstCoeffs, cfg: &ConvergenceConfig) -> Result<Vec<Sample>> {
    let truth = cst_airfoil(c, cfg.n_ref, CstSampling::Cosine)?;
    let params = cumulative_lengths(truth.points())?;
    let truth_grass = la_standardize(&truth, Variant::Gl2)?.grass;
    cfg.nc_list
        .iter()
        .map(|&nc| {
            let sparse = cst_airfoil(c, nc, CstSampling::Cosine)?;
            let gauge = landmark_gauge(sparse.points());
            let refined = refine_at(&sparse, SplineKind::Natural, &params)?;
            let diff: Mat = refined.points() - truth.points();
            let euclid = diff.row_iter().map(|r| r.norm()).fold(0.0, f64::max);
            let g = la_standardize(&refined, Variant::Gl2)?.grass;
            Ok(Sample {
                gauge_mean: gauge.mean,
                gauge_max: gauge.max,
                euclid,
                grass: grassmann::distance(&g, &truth_grass, GrassmannMetric::AngleSum),
            })
        })
        .collect()
}

pub fn run_convergence(cfg: &ConvergenceConfig) -> Result<ConvergenceReport> {
    if cfg.trials == 0 || cfg.nc_list.len() < 2 {
        return Err(Error::InvalidArgument(
            "convergence needs at least one trial and two landmark counts".into(),
        ));
    }
    if cfg.nc_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Ordering("landmark counts must be strictly increasing".into()));
    }
    if cfg.nc_list[0] < 4 || cfg.n_ref < *cfg.nc_list.last().unwrap() {
        return Err(Error::InvalidArgument(
            "landmark counts must be at least 4 and no larger than the reference count".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let draws: Vec<CstCoeffs> = (0..cfg.trials).map(|_| random_coeffs(&mut rng, cfg.range)).collect();
    let results: Vec<Option<Vec<Sample>>> = draws.par_iter().map(|c| trial(c, cfg).ok()).collect();
    let skipped = results.iter().filter(|r| r.is_none()).count();
    let good: Vec<&Vec<Sample>> = results.iter().flatten().collect();
    if good.is_empty() {
        return Err(Error::InvalidArgument("every convergence trial was degenerate".into()));
    }
    let m = good.len() as f64;
    let rows: Vec<ConvergenceRow> = cfg
        .nc_list
        .iter()
        .enumerate()
        .map(|(j, &n_c)| {
            let col = |f: fn(&Sample) -> f64| -> Vec<f64> { good.iter().map(|s| f(&s[j])).collect() };
            let mut eu = col(|s| s.euclid);
            let mut gr = col(|s| s.grass);
            ConvergenceRow {
                n_c,
                gauge_mean: col(|s| s.gauge_mean).iter().sum::<f64>() / m,
                gauge_max: col(|s| s.gauge_max).iter().sum::<f64>() / m,
                euclid_mean: eu.iter().sum::<f64>() / m,
                euclid_max: eu.iter().copied().fold(0.0, f64::max),
                euclid_median: median(&mut eu),
                grass_mean: gr.iter().sum::<f64>() / m,
                grass_max: gr.iter().copied().fold(0.0, f64::max),
                grass_median: median(&mut gr),
            }
        })
        .collect();
    let pick = |f: fn(&ConvergenceRow) -> f64| -> Vec<f64> { rows.iter().map(f).collect() };
    Ok(ConvergenceReport {
        slope_grass_max_gauge: loglog_slope(&pick(|r| r.gauge_max), &pick(|r| r.grass_mean)),
        slope_grass_mean_gauge: loglog_slope(&pick(|r| r.gauge_mean), &pick(|r| r.grass_mean)),
        slope_euclid_max_gauge: loglog_slope(&pick(|r| r.gauge_max), &pick(|r| r.euclid_mean)),
        rows,
        skipped,
    })
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for r in &self.rows {
            let vals = [
                r.gauge_mean,
                r.gauge_max,
                r.euclid_mean,
                r.euclid_median,
                r.euclid_max,
                r.grass_mean,
                r.grass_median,
                r.grass_max,
            ];
            let vals: Vec<String> = vals.iter().map(|v| fmt_f64(*v)).collect();
            let _ = writeln!(out, "{},{}", r.n_c, vals.join(","));
        }
        out
    }

    /// Whether median Grassmann errors never increase with the landmark count.
    pub fn medians_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].grass_median <= w[0].grass_median)
    }
}

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::manifold::Manifold;

pub const DEFAULT_EPSILON: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KarcherOptions {
    pub epsilon: f64,
    pub max_iter: usize,
}

impl Default for KarcherOptions {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Karcher<P> {
    pub mean: P,
    pub iterations: usize,
    /// Norm of the mean tangent at `mean`.
    pub gradient_norm: f64,
}

/// `(1/N) Σ Log_p(p_k)`; logs are computed in parallel and summed in input
/// order.
pub fn mean_log<M: Manifold>(m: &M, base: &M::Point, points: &[M::Point]) -> Result<M::Tangent> {
    let logs: Vec<M::Tangent> = points
        .par_iter()
        .map(|q| m.log(base, q))
        .collect::<Result<_>>()?;
    let mut sum = m.zero(base);
    for v in &logs {
        sum = m.add(&sum, v);
    }
    Ok(m.scale(&sum, 1.0 / points.len() as f64))
}

/// Fixed-point iteration for the intrinsic mean, started at the first point.
///
/// The gradient is tested before each step, so the returned point always
/// satisfies `‖mean tangent‖ < epsilon`.
pub fn karcher_mean<M: Manifold>(m: &M, points: &[M::Point], opts: &KarcherOptions) -> Result<Karcher<M::Point>> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("Karcher mean of an empty set".into()));
    }
    if !(opts.epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "convergence threshold must be positive, got {}",
            opts.epsilon
        )));
    }
    let mut p = points[0].clone();
    let mut iterations = 0;
    loop {
        let v = mean_log(m, &p, points)?;
        let g = m.norm(&v);
        if g < opts.epsilon {
            return Ok(Karcher {
                mean: p,
                iterations,
                gradient_norm: g,
            });
        }
        if iterations == opts.max_iter {
            return Err(Error::NonConvergence {
                iterations,
                gradient_norm: g,
            });
        }
        p = m.exp(&p, &v)?;
        iterations += 1;
    }
}

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::manifold::Manifold;

use super::karcher::{karcher_mean, KarcherOptions};

/// Components below this fraction of a basis column's largest entry are
/// ignored when fixing its sign.
const SIGN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PgaOptions {
    pub rank: usize,
    pub karcher: KarcherOptions,
}

/// Principal geodesic analysis about the Karcher mean.
#[derive(Clone, Debug)]
pub struct Pga<M: Manifold> {
    pub manifold: M,
    pub mean: M::Point,
    /// `dim × r`, orthonormal columns of vectorized tangent directions.
    pub basis: DMatrix<f64>,
    /// Squared singular values of the scaled lifted data, descending.
    pub eigenvalues: Vec<f64>,
    /// `(1/(N−1)) Σ ‖Log(p_k)‖²`, the sum of all eigenvalues.
    pub total_variance: f64,
    /// `r × N` normal coordinates, one column per sample.
    pub coords: DMatrix<f64>,
    pub epsilon: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
}

/// Eigenpairs of `Δ Δᵀ`, descending, computed from whichever of `Δ` (SVD) or
/// `Δ Δᵀ` (symmetric eigensolver) is smaller.
fn principal_directions(delta: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let (dim, n) = delta.shape();
    let (vectors, values) = if n <= dim {
        let svd = delta.clone().svd(true, false);
        let u = svd.u.expect("left singular vectors requested");
        let vals: Vec<f64> = svd.singular_values.iter().map(|s| s * s).collect();
        (u, vals)
    } else {
        let eig = SymmetricEigen::new(delta * delta.transpose());
        let vals: Vec<f64> = eig.eigenvalues.iter().map(|v| v.max(0.0)).collect();
        (eig.eigenvectors, vals)
    };
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut basis = DMatrix::zeros(dim, order.len());
    let mut sorted = Vec::with_capacity(order.len());
    for (j, &k) in order.iter().enumerate() {
        let mut col = vectors.column(k).clone_owned();
        let scale = col.amax();
        if let Some(first) = col.iter().find(|x| x.abs() > SIGN_TOL * scale) {
            if *first < 0.0 {
                col.neg_mut();
            }
        }
        basis.set_column(j, &col);
        sorted.push(values[k]);
    }
    (basis, sorted)
}

impl<M: Manifold + Clone> Pga<M> {
    pub fn fit(manifold: M, points: &[M::Point], opts: &PgaOptions) -> Result<Self> {
        let n_samples = points.len();
        if n_samples < 2 {
            return Err(Error::InvalidArgument(format!(
                "PGA needs at least 2 samples, got {n_samples}"
            )));
        }
        let karcher = karcher_mean(&manifold, points, &opts.karcher)?;
        let mean = karcher.mean;
        let dim = manifold.vec_dim(&mean);
        let max_rank = (n_samples - 1).min(dim);
        if opts.rank == 0 || opts.rank > max_rank {
            return Err(Error::InvalidArgument(format!(
                "rank {} outside 1..={max_rank}",
                opts.rank
            )));
        }
        let lifted: Vec<DVector<f64>> = points
            .par_iter()
            .map(|q| manifold.log(&mean, q).map(|v| manifold.vectorize(&v)))
            .collect::<Result<_>>()?;
        let mut data = DMatrix::zeros(dim, n_samples);
        for (k, v) in lifted.iter().enumerate() {
            data.set_column(k, v);
        }
        let scaled = &data / ((n_samples - 1) as f64).sqrt();
        let total_variance = scaled.norm_squared();
        let reference = manifold.point_scale(&mean);
        if !(total_variance.sqrt() > 1e-12 * reference) {
            return Err(Error::ZeroVariance);
        }
        let (full_basis, values) = principal_directions(&scaled);
        let basis = full_basis.columns(0, opts.rank).clone_owned();
        let coords = basis.transpose() * &data;
        Ok(Self {
            manifold,
            mean,
            basis,
            eigenvalues: values[..opts.rank].to_vec(),
            total_variance,
            coords,
            epsilon: opts.karcher.epsilon,
            iterations: karcher.iterations,
            gradient_norm: karcher.gradient_norm,
        })
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn n_samples(&self) -> usize {
        self.coords.ncols()
    }

    /// `vec⁻¹(U_r t)` at the mean.
    pub fn tangent(&self, coeffs: &[f64]) -> Result<M::Tangent> {
        if coeffs.len() != self.rank() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                self.rank(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        let v = &self.basis * DVector::from_column_slice(coeffs);
        Ok(self.manifold.unvectorize(&self.mean, v.as_slice()))
    }

    pub fn generate(&self, coeffs: &[f64]) -> Result<M::Point> {
        self.manifold.exp(&self.mean, &self.tangent(coeffs)?)
    }

    pub fn embed(&self, point: &M::Point) -> Result<DVector<f64>> {
        let v = self.manifold.log(&self.mean, point)?;
        Ok(self.basis.transpose() * self.manifold.vectorize(&v))
    }
}

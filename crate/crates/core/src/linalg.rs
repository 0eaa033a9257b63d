//! Small dense kernels specialised to n×2 and 2×2 matrices.
//!
//! Everything here works on fixed column count 2, so decompositions are
//! closed-form (symmetric 2×2 eigenproblems) or a couple of Jacobi sweeps
//! (thin SVD of an n×2 matrix).

use nalgebra::{Matrix2, MatrixXx2, Vector2};

/// An n×2 real matrix: landmark coordinates, Stiefel representatives, tangents.
pub type Mat = MatrixXx2<f64>;

/// Components below this fraction of the column's largest entry are treated
/// as zero when fixing singular-vector signs.
const SIGN_TOL: f64 = 1e-12;

/// Thin SVD `A = U · diag(sigma) · Vᵀ` of an n×2 matrix.
///
/// Singular values are sorted descending and each column of `u` has its first
/// nonzero component positive (the matching column of `v` is flipped along).
#[derive(Clone, Debug)]
pub struct ThinSvd {
    pub u: Mat,
    pub sigma: Vector2<f64>,
    pub v: Matrix2<f64>,
}

impl ThinSvd {
    pub fn reconstruct(&self) -> Mat {
        &self.u * Matrix2::from_diagonal(&self.sigma) * self.v.transpose()
    }
}

/// One-sided (Hestenes) Jacobi SVD of an n×2 matrix.
pub fn thin_svd(a: &Mat) -> ThinSvd {
    let n = a.nrows();
    let mut w = a.clone();
    let mut v = Matrix2::<f64>::identity();

    for _ in 0..16 {
        let alpha = w.column(0).norm_squared();
        let beta = w.column(1).norm_squared();
        let gamma = w.column(0).dot(&w.column(1));
        if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
            break;
        }
        let zeta = (beta - alpha) / (2.0 * gamma);
        let t = if zeta.abs() > 1e150 {
            0.5 / zeta
        } else {
            zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
        };
        let c = 1.0 / (1.0 + t * t).sqrt();
        let s = c * t;
        for i in 0..n {
            let (x, y) = (w[(i, 0)], w[(i, 1)]);
            w[(i, 0)] = c * x - s * y;
            w[(i, 1)] = s * x + c * y;
        }
        for i in 0..2 {
            let (x, y) = (v[(i, 0)], v[(i, 1)]);
            v[(i, 0)] = c * x - s * y;
            v[(i, 1)] = s * x + c * y;
        }
    }

    let mut sigma = Vector2::new(w.column(0).norm(), w.column(1).norm());
    if sigma[1] > sigma[0] {
        w.swap_columns(0, 1);
        v.swap_columns(0, 1);
        sigma.swap_rows(0, 1);
    }

    let mut u = Mat::zeros(n);
    for j in 0..2 {
        if sigma[j] > 0.0 {
            let col = w.column(j) / sigma[j];
            u.set_column(j, &col);
        }
    }
    if sigma[0] == 0.0 {
        u.set_column(0, &unit_complement(&u, 0));
    }
    if sigma[1] == 0.0 {
        u.set_column(1, &unit_complement(&u, 1));
    }

    for j in 0..2 {
        if first_significant_is_negative(u.column(j).iter().copied()) {
            u.column_mut(j).neg_mut();
            v.column_mut(j).neg_mut();
        }
    }
    ThinSvd { u, sigma, v }
}

/// A unit vector orthogonal to the columns of `u` preceding `col`.
fn unit_complement(u: &Mat, col: usize) -> nalgebra::DVector<f64> {
    let n = u.nrows();
    let prev: Vec<_> = (0..col).map(|j| u.column(j).clone_owned()).collect();
    // try coordinate axes in order of least overlap with the previous column
    let mut order: Vec<usize> = (0..n).collect();
    if let Some(p) = prev.first() {
        order.sort_by(|&i, &j| p[i].abs().total_cmp(&p[j].abs()));
    }
    for i in order {
        let mut e = nalgebra::DVector::<f64>::zeros(n);
        e[i] = 1.0;
        for p in &prev {
            let d = p.dot(&e);
            e.axpy(-d, p, 1.0);
        }
        let norm = e.norm();
        if norm > 0.5 {
            return e / norm;
        }
    }
    unreachable!("n >= 2 always admits a complement")
}

fn first_significant_is_negative(col: impl Iterator<Item = f64> + Clone) -> bool {
    let scale = col.clone().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return false;
    }
    col.into_iter()
        .find(|x| x.abs() > SIGN_TOL * scale)
        .is_some_and(|x| x < 0.0)
}

/// Singular values of a 2×2 matrix, descending.
pub fn singular_values2(m: &Matrix2<f64>) -> Vector2<f64> {
    thin_svd(&to_mat(m)).sigma
}

/// Full SVD of a 2×2 matrix: `m = u · diag(sigma) · vᵀ`.
pub fn svd2(m: &Matrix2<f64>) -> (Matrix2<f64>, Vector2<f64>, Matrix2<f64>) {
    let svd = thin_svd(&to_mat(m));
    let u = Matrix2::new(svd.u[(0, 0)], svd.u[(0, 1)], svd.u[(1, 0)], svd.u[(1, 1)]);
    (u, svd.sigma, svd.v)
}

fn to_mat(m: &Matrix2<f64>) -> Mat {
    Mat::from_row_slice(&[m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]])
}

/// Eigendecomposition of a symmetric 2×2 matrix, eigenvalues descending.
///
/// Only the upper triangle is read. Returns `(values, vectors)` with the
/// eigenvectors as the columns of a rotation matrix.
pub fn sym2_eigen(m: &Matrix2<f64>) -> (Vector2<f64>, Matrix2<f64>) {
    let (a, b, c) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
    let mean = 0.5 * (a + c);
    let radius = (0.5 * (a - c)).hypot(b);
    let values = Vector2::new(mean + radius, mean - radius);
    if b == 0.0 {
        return if a >= c {
            (values, Matrix2::identity())
        } else {
            (values, Matrix2::new(0.0, -1.0, 1.0, 0.0))
        };
    }
    let theta = 0.5 * (2.0 * b).atan2(a - c);
    let (sn, cs) = theta.sin_cos();
    (values, Matrix2::new(cs, -sn, sn, cs))
}

/// Applies a scalar function to the eigenvalues of a symmetric 2×2 matrix.
pub fn sym2_apply(m: &Matrix2<f64>, f: impl Fn(f64) -> f64) -> Matrix2<f64> {
    let (vals, q) = sym2_eigen(m);
    let d = Matrix2::from_diagonal(&vals.map(f));
    symmetrize(&(q * d * q.transpose()))
}

pub fn symmetrize(m: &Matrix2<f64>) -> Matrix2<f64> {
    let off = 0.5 * (m[(0, 1)] + m[(1, 0)]);
    Matrix2::new(m[(0, 0)], off, off, m[(1, 1)])
}

pub fn rotation(angle: f64) -> Matrix2<f64> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Closest matrix with orthonormal columns, `A (AᵀA)^{-1/2}`.
///
/// Used as a single polar projection step after geodesic updates.
pub fn polar_orthonormalize(a: &Mat) -> Mat {
    let gram = a.transpose() * a;
    a * sym2_apply(&gram, |x| 1.0 / x.sqrt())
}

/// `‖AᵀA − I‖_F`.
pub fn orthonormality_error(a: &Mat) -> f64 {
    (a.transpose() * a - Matrix2::identity()).norm()
}

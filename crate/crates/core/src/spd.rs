//! The manifold of 2×2 symmetric positive definite matrices with the
//! affine-invariant metric `g_P(S₁, S₂) = tr(P⁻¹S₁P⁻¹S₂)`.

use nalgebra::{Matrix2, Vector3};

use crate::error::{Error, Result};
use crate::linalg::{sym2_apply, sym2_eigen, symmetrize};

/// Symmetric 2×2 tangent matrix.
pub type SpdTangent = Matrix2<f64>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpdMatrix {
    p: Matrix2<f64>,
}

impl SpdMatrix {
    /// Accepts `p` if it is symmetric up to rounding and positive definite.
    pub fn new(p: Matrix2<f64>) -> Result<Self> {
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::NotSpd("non-finite entries".into()));
        }
        let asym = (p[(0, 1)] - p[(1, 0)]).abs();
        if asym > 1e-12 * p.norm().max(1.0) {
            return Err(Error::NotSpd(format!("asymmetry {asym:e}")));
        }
        let p = symmetrize(&p);
        let (vals, _) = sym2_eigen(&p);
        if !(vals[1] > 0.0) {
            return Err(Error::NotSpd(format!(
                "eigenvalues {:e}, {:e}",
                vals[0], vals[1]
            )));
        }
        Ok(Self { p })
    }

    pub fn identity() -> Self {
        Self { p: Matrix2::identity() }
    }

    pub fn diag(a: f64, b: f64) -> Result<Self> {
        Self::new(Matrix2::new(a, 0.0, 0.0, b))
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.p
    }

    fn sqrt(&self) -> Matrix2<f64> {
        sym2_apply(&self.p, f64::sqrt)
    }

    fn inv_sqrt(&self) -> Matrix2<f64> {
        sym2_apply(&self.p, |x| 1.0 / x.sqrt())
    }

    pub fn inverse(&self) -> Matrix2<f64> {
        sym2_apply(&self.p, |x| 1.0 / x)
    }
}

fn check_symmetric(s: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    let asym = (s[(0, 1)] - s[(1, 0)]).abs();
    if asym > 1e-12 * s.norm().max(1.0) || s.iter().any(|x| !x.is_finite()) {
        return Err(Error::Contract(format!("SPD tangent is not symmetric ({asym:e})")));
    }
    Ok(symmetrize(s))
}

pub fn exp(p: &SpdMatrix, s: &SpdTangent) -> Result<SpdMatrix> {
    let s = check_symmetric(s)?;
    let (root, inv_root) = (p.sqrt(), p.inv_sqrt());
    let inner = symmetrize(&(inv_root * s * inv_root));
    let out = root * sym2_apply(&inner, f64::exp) * root;
    SpdMatrix::new(symmetrize(&out))
}

pub fn log(p: &SpdMatrix, d: &SpdMatrix) -> SpdTangent {
    let (root, inv_root) = (p.sqrt(), p.inv_sqrt());
    let inner = symmetrize(&(inv_root * d.p * inv_root));
    symmetrize(&(root * sym2_apply(&inner, f64::ln) * root))
}

pub fn distance(p: &SpdMatrix, d: &SpdMatrix) -> f64 {
    let inv_root = p.inv_sqrt();
    let inner = symmetrize(&(inv_root * d.p * inv_root));
    let (vals, _) = sym2_eigen(&inner);
    vals.map(f64::ln).norm()
}

/// Parallel translation of `s` from `p` to `d` along their geodesic,
/// `E·S·Eᵀ` with `E = (D P⁻¹)^{1/2}`.
pub fn transport(p: &SpdMatrix, d: &SpdMatrix, s: &SpdTangent) -> Result<SpdTangent> {
    let s = check_symmetric(s)?;
    let (root, inv_root) = (p.sqrt(), p.inv_sqrt());
    let inner = symmetrize(&(inv_root * d.p * inv_root));
    let e = root * sym2_apply(&inner, f64::sqrt) * inv_root;
    Ok(symmetrize(&(e * s * e.transpose())))
}

/// Affine-invariant inner product at `p`.
pub fn inner(p: &SpdMatrix, a: &SpdTangent, b: &SpdTangent) -> f64 {
    let inv = p.inverse();
    (inv * a * inv * b).trace()
}

/// `(s₁₁, √2·s₁₂, s₂₂)`: isometric with the Frobenius inner product.
pub fn vectorize(s: &SpdTangent) -> Vector3<f64> {
    Vector3::new(s[(0, 0)], std::f64::consts::SQRT_2 * s[(0, 1)], s[(1, 1)])
}

pub fn unvectorize(v: &[f64]) -> SpdTangent {
    let off = v[1] / std::f64::consts::SQRT_2;
    Matrix2::new(v[0], off, off, v[2])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_spd(seed: u64) -> SpdMatrix {
        let mut s = seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let a = Matrix2::new(next(), next(), next(), next());
        SpdMatrix::new(symmetrize(&(a * a.transpose() + Matrix2::identity() * 0.3))).unwrap()
    }

    #[test]
    fn commuting_cases() {
        let out = exp(&SpdMatrix::identity(), &Matrix2::new(1.0, 0.0, 0.0, -0.5)).unwrap();
        assert!((out.matrix() - Matrix2::new(1f64.exp(), 0.0, 0.0, (-0.5f64).exp())).norm() < 1e-15);

        let p = random_spd(1);
        assert!((exp(&p, &Matrix2::zeros()).unwrap().matrix() - p.matrix()).norm() < 1e-14);
        assert!(log(&p, &p).norm() < 1e-14);

        let d = SpdMatrix::diag(4.0, 1.0).unwrap();
        let l = log(&SpdMatrix::identity(), &d);
        assert!((l - Matrix2::new(4f64.ln(), 0.0, 0.0, 0.0)).norm() < 1e-15);

        // P^{1/2} log(P^{-1}) P^{1/2} = diag(2,1) diag(-ln 4, 0) diag(2,1)
        let l = log(&d, &SpdMatrix::identity());
        assert!((l - Matrix2::new(-8.0 * 2f64.ln(), 0.0, 0.0, 0.0)).norm() < 1e-14);
        assert!((exp(&d, &l).unwrap().matrix() - Matrix2::identity()).norm() < 1e-14);
    }

    #[test]
    fn distance_cases() {
        let i = SpdMatrix::identity();
        assert_eq!(distance(&i, &i), 0.0);
        let d = SpdMatrix::diag(4.0, 1.0).unwrap();
        assert!((distance(&i, &d) - 2.0 * 2f64.ln()).abs() < 1e-15);
        let e2 = 2f64.exp();
        let d = SpdMatrix::diag(e2, e2).unwrap();
        assert!((distance(&i, &d) - 2.0 * 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn round_trip_symmetry_and_congruence() {
        for seed in 0..20 {
            let p = random_spd(seed);
            let d = random_spd(seed + 100);
            let back = exp(&p, &log(&p, &d)).unwrap();
            assert!((back.matrix() - d.matrix()).norm() < 1e-12 * d.matrix().norm());
            let (a, b) = (distance(&p, &d), distance(&d, &p));
            assert!((a - b).abs() < 1e-12);
            // distance equals the Riemannian norm of the log
            assert!((inner(&p, &log(&p, &d), &log(&p, &d)).sqrt() - a).abs() < 1e-11);

            let m = random_spd(seed + 200).matrix() + Matrix2::new(0.0, 0.4, -0.2, 0.0);
            let pc = SpdMatrix::new(symmetrize(&(m.transpose() * p.matrix() * m))).unwrap();
            let dc = SpdMatrix::new(symmetrize(&(m.transpose() * d.matrix() * m))).unwrap();
            assert!((distance(&pc, &dc) - a).abs() <= 1e-9 * a.max(1e-300));
        }
    }

    #[test]
    fn transport_cases() {
        let i = SpdMatrix::identity();
        let s = Matrix2::new(1.0, 0.0, 0.0, 0.0);
        let d = SpdMatrix::diag(4.0, 1.0).unwrap();
        assert!((transport(&i, &d, &s).unwrap() - Matrix2::new(4.0, 0.0, 0.0, 0.0)).norm() < 1e-14);
        let p = random_spd(3);
        let s = Matrix2::new(0.3, -0.2, -0.2, 1.1);
        assert!((transport(&p, &p, &s).unwrap() - s).norm() < 1e-14);

        for seed in 0..20 {
            let p = random_spd(seed);
            let d = random_spd(seed + 50);
            let s1 = random_spd(seed + 7).matrix() - Matrix2::identity();
            let s2 = random_spd(seed + 9).matrix() * 0.5;
            let t1 = transport(&p, &d, &s1).unwrap();
            let t2 = transport(&p, &d, &s2).unwrap();
            assert!((inner(&d, &t1, &t2) - inner(&p, &s1, &s2)).abs() < 1e-10);
            let back = transport(&d, &p, &t1).unwrap();
            assert!((back - s1).norm() < 1e-10);
        }
    }

    #[test]
    fn vectorization_is_isometric() {
        let a = Matrix2::new(1.0, 2.0, 2.0, -3.0);
        let b = Matrix2::new(0.5, -1.0, -1.0, 4.0);
        assert!((vectorize(&a).dot(&vectorize(&b)) - a.dot(&b)).abs() < 1e-14);
        assert_eq!(unvectorize(vectorize(&a).as_slice()), a);
    }

    #[test]
    fn rejects_invalid() {
        assert!(SpdMatrix::new(Matrix2::new(1.0, 0.0, 0.0, -1.0)).is_err());
        assert!(SpdMatrix::new(Matrix2::new(1.0, 0.5, 0.0, 1.0)).is_err());
        assert!(exp(&SpdMatrix::identity(), &Matrix2::new(0.0, 1.0, 0.0, 0.0)).is_err());
    }
}

//! Geometry of the Grassmannian G(n, 2) through Stiefel representatives.
//!
//! A point is an n×2 matrix with orthonormal columns standing for its column
//! span. Tangent vectors are n×2 matrices in the horizontal space at the
//! representative (`repᵀ·Δ = 0`).

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// Orthonormality tolerance enforced by [`GrassmannPoint::new`].
pub const ORTHONORMAL_TOL: f64 = 1e-12;
/// Horizontality tolerance (relative to `max(1, ‖Δ‖)`).
pub const HORIZONTAL_TOL: f64 = 1e-10;
/// Condition number of `XᵀY` above which the logarithm refuses to proceed.
pub const CUT_LOCUS_CONDITION: f64 = 1e12;

/// Stiefel representative of a 2-plane in ℝⁿ.
#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannPoint {
    rep: Mat,
}

/// Horizontal tangent matrix at some representative.
pub type GrassmannTangent = Mat;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GrassmannMetric {
    /// `sqrt(θ₁² + θ₂²)`, the geodesic distance.
    #[default]
    Frobenius,
    /// `θ₁ + θ₂`.
    AngleSum,
}

impl GrassmannPoint {
    pub fn new(rep: Mat) -> Result<Self> {
        if rep.nrows() < 3 {
            return Err(Error::Contract(format!(
                "Grassmann representative needs n >= 3 rows, got {}",
                rep.nrows()
            )));
        }
        if rep.iter().any(|x| !x.is_finite()) {
            return Err(Error::Contract("non-finite representative".into()));
        }
        let err = linalg::orthonormality_error(&rep);
        if err > ORTHONORMAL_TOL {
            return Err(Error::Contract(format!(
                "representative columns not orthonormal (error {err:e})"
            )));
        }
        Ok(Self { rep })
    }

    /// Orthonormalizes an arbitrary full-rank n×2 matrix by polar projection.
    pub fn from_basis(basis: &Mat) -> Result<Self> {
        let svd = linalg::thin_svd(basis);
        if !(svd.sigma[1] > 1e-10 * svd.sigma[0]) {
            return Err(Error::RankDeficient {
                ratio: if svd.sigma[0] > 0.0 { svd.sigma[1] / svd.sigma[0] } else { 0.0 },
            });
        }
        Self::new(&svd.u * svd.v.transpose())
    }

    pub(crate) fn from_unchecked(rep: Mat) -> Self {
        Self { rep }
    }

    pub fn rep(&self) -> &Mat {
        &self.rep
    }

    pub fn into_rep(self) -> Mat {
        self.rep
    }

    pub fn n(&self) -> usize {
        self.rep.nrows()
    }

    /// Same subspace, representative multiplied on the right by `o`.
    pub fn rotated(&self, o: &Matrix2<f64>) -> Self {
        Self::from_unchecked(&self.rep * o)
    }
}

fn check_same_n(a: &GrassmannPoint, b_rows: usize) -> Result<()> {
    if a.n() != b_rows {
        return Err(Error::Contract(format!(
            "landmark counts differ ({} vs {})",
            a.n(),
            b_rows
        )));
    }
    Ok(())
}

pub fn check_horizontal(base: &GrassmannPoint, delta: &Mat) -> Result<()> {
    check_same_n(base, delta.nrows())?;
    let off = (base.rep.transpose() * delta).norm();
    if !(off <= HORIZONTAL_TOL * delta.norm().max(1.0)) {
        return Err(Error::Contract(format!(
            "tangent is not horizontal (‖XᵀΔ‖ = {off:e})"
        )));
    }
    Ok(())
}

/// Removes the vertical component `X·XᵀΔ`.
pub fn project_horizontal(base: &GrassmannPoint, delta: &Mat) -> Mat {
    delta - &base.rep * (base.rep.transpose() * delta)
}

pub fn exp(base: &GrassmannPoint, delta: &Mat) -> Result<GrassmannPoint> {
    check_horizontal(base, delta)?;
    let delta = project_horizontal(base, delta);
    let svd = linalg::thin_svd(&delta);
    let cos = Matrix2::from_diagonal(&svd.sigma.map(f64::cos));
    let sin = Matrix2::from_diagonal(&svd.sigma.map(f64::sin));
    let vt = svd.v.transpose();
    let y = &base.rep * (svd.v * cos * vt) + &svd.u * (sin * vt);
    Ok(GrassmannPoint::from_unchecked(linalg::polar_orthonormalize(&y)))
}

pub fn log(base: &GrassmannPoint, target: &GrassmannPoint) -> Result<Mat> {
    check_same_n(base, target.n())?;
    let q = base.rep.transpose() * &target.rep;
    let sv = linalg::singular_values2(&q);
    let condition = if sv[1] > 0.0 { sv[0] / sv[1] } else { f64::INFINITY };
    if !(condition <= CUT_LOCUS_CONDITION) {
        return Err(Error::OutsideNeighborhood { condition });
    }
    let q_inv = q
        .try_inverse()
        .ok_or(Error::OutsideNeighborhood { condition: f64::INFINITY })?;
    let w = &target.rep * q_inv;
    let w = project_horizontal(base, &w);
    let svd = linalg::thin_svd(&w);
    let angles = Matrix2::from_diagonal(&svd.sigma.map(f64::atan));
    Ok(&svd.u * angles * svd.v.transpose())
}

/// Principal angles between the spans of `a` and `b`, largest first.
///
/// Cosines come from the singular values of `aᵀb`, sines from those of
/// `b − a(aᵀb)`; each angle is taken from whichever is better conditioned.
pub fn principal_angles(a: &GrassmannPoint, b: &GrassmannPoint) -> Vector2<f64> {
    let cross = a.rep.transpose() * &b.rep;
    let cos = linalg::singular_values2(&cross).map(|c| c.clamp(0.0, 1.0));
    let residual = &b.rep - &a.rep * cross;
    let sin = linalg::thin_svd(&residual).sigma.map(|s| s.clamp(0.0, 1.0));
    // cos sorted descending pairs with the smallest angle; sin descending
    // pairs with the largest
    Vector2::new(sin[0].atan2(cos[1]), sin[1].atan2(cos[0]))
}

pub fn distance(a: &GrassmannPoint, b: &GrassmannPoint, metric: GrassmannMetric) -> f64 {
    let theta = principal_angles(a, b);
    match metric {
        GrassmannMetric::Frobenius => theta.norm(),
        GrassmannMetric::AngleSum => theta[0] + theta[1],
    }
}

/// Parallel transport of `payload` along `t ↦ Exp(base, t·dir)`.
///
/// The result is horizontal at the representative returned by
/// `exp(base, t·dir)`.
pub fn transport(base: &GrassmannPoint, dir: &Mat, t: f64, payload: &Mat) -> Result<Mat> {
    check_horizontal(base, dir)?;
    check_horizontal(base, payload)?;
    let svd = linalg::thin_svd(&project_horizontal(base, dir));
    let ts = svd.sigma * t;
    let neg_sin = Matrix2::from_diagonal(&ts.map(|x| -x.sin()));
    let cos_m1 = Matrix2::from_diagonal(&ts.map(|x| x.cos() - 1.0));
    let coeff = &svd.u.transpose() * payload;
    let correction = &base.rep * (svd.v * neg_sin) + &svd.u * cos_m1;
    Ok(payload + correction * coeff)
}

/// Endpoint transport `τ(Γ; X, Y)`: along the geodesic from `x` toward `y`,
/// expressed at the representative `Exp(x, Log(x, y))`.
pub fn transport_between(x: &GrassmannPoint, y: &GrassmannPoint, payload: &Mat) -> Result<Mat> {
    let dir = log(x, y)?;
    transport(x, &dir, 1.0, payload)
}

/// Endpoint transport re-expressed at `y`'s own representative.
///
/// `Exp(x, Log(x, y))` spans the same plane as `y` but may differ from it by a
/// 2×2 orthogonal factor `O`; the tangent is carried across by the same factor.
pub fn transport_to(x: &GrassmannPoint, y: &GrassmannPoint, payload: &Mat) -> Result<Mat> {
    let dir = log(x, y)?;
    let landed = exp(x, &dir)?;
    let moved = transport(x, &dir, 1.0, payload)?;
    let o = landed.rep.transpose() * &y.rep;
    Ok(project_horizontal(y, &(moved * o)))
}

/// Frobenius inner product `tr(AᵀB)`.
pub fn inner(a: &Mat, b: &Mat) -> f64 {
    a.dot(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn axes(n: usize, i: usize, j: usize) -> GrassmannPoint {
        let mut m = Mat::zeros(n);
        m[(i, 0)] = 1.0;
        m[(j, 1)] = 1.0;
        GrassmannPoint::new(m).unwrap()
    }

    struct Lcg(u64);
    impl Lcg {
        fn next(&mut self) -> f64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((self.0 >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        }
        fn mat(&mut self, n: usize) -> Mat {
            Mat::from_fn(n, |_, _| self.next())
        }
        fn point(&mut self, n: usize) -> GrassmannPoint {
            GrassmannPoint::from_basis(&self.mat(n)).unwrap()
        }
        fn tangent(&mut self, base: &GrassmannPoint, norm: f64) -> Mat {
            let d = project_horizontal(base, &self.mat(base.n()));
            let scale = norm / d.norm();
            d * scale
        }
    }

    /// Y'' = -Y (Y'ᵀY') integrated jointly with the transport equation
    /// Γ' = -Y (Y'ᵀΓ), classical RK4.
    fn integrate(x: &Mat, v: &Mat, g: &Mat, steps: usize) -> (Mat, Mat) {
        let h = 1.0 / steps as f64;
        let f = |y: &Mat, yd: &Mat, gm: &Mat| {
            let acc = -(y * (yd.transpose() * yd));
            let gd = -(y * (yd.transpose() * gm));
            (yd.clone(), acc, gd)
        };
        let (mut y, mut yd, mut gm) = (x.clone(), v.clone(), g.clone());
        for _ in 0..steps {
            let k1 = f(&y, &yd, &gm);
            let k2 = f(&(&y + &k1.0 * (h / 2.0)), &(&yd + &k1.1 * (h / 2.0)), &(&gm + &k1.2 * (h / 2.0)));
            let k3 = f(&(&y + &k2.0 * (h / 2.0)), &(&yd + &k2.1 * (h / 2.0)), &(&gm + &k2.2 * (h / 2.0)));
            let k4 = f(&(&y + &k3.0 * h), &(&yd + &k3.1 * h), &(&gm + &k3.2 * h));
            y += (&k1.0 + &k2.0 * 2.0 + &k3.0 * 2.0 + &k4.0) * (h / 6.0);
            yd += (&k1.1 + &k2.1 * 2.0 + &k3.1 * 2.0 + &k4.1) * (h / 6.0);
            gm += (&k1.2 + &k2.2 * 2.0 + &k3.2 * 2.0 + &k4.2) * (h / 6.0);
        }
        (y, gm)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let mut rng = Lcg(1);
        let x = rng.point(6);
        let y = exp(&x, &Mat::zeros(6)).unwrap();
        assert!((y.rep() - x.rep()).norm() < 1e-15);
    }

    #[test]
    fn exp_quarter_turn_in_r4() {
        let x = axes(4, 0, 1);
        let mut d = Mat::zeros(4);
        d[(2, 1)] = FRAC_PI_4;
        let y = exp(&x, &d).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut expected = Mat::zeros(4);
        expected[(0, 0)] = 1.0;
        expected[(1, 1)] = s;
        expected[(2, 1)] = s;
        let expected = GrassmannPoint::new(expected).unwrap();
        assert!(distance(&y, &expected, GrassmannMetric::Frobenius) < 1e-14);

        let (ode, _) = integrate(x.rep(), &d, &Mat::zeros(4), 400);
        let ode = GrassmannPoint::from_basis(&ode).unwrap();
        assert!(distance(&y, &ode, GrassmannMetric::Frobenius) < 1e-9);
    }

    #[test]
    fn exp_matches_geodesic_ode() {
        let mut rng = Lcg(7);
        for _ in 0..5 {
            let x = rng.point(20);
            let d = rng.tangent(&x, 1.2);
            let y = exp(&x, &d).unwrap();
            let (ode, _) = integrate(x.rep(), &d, &Mat::zeros(20), 500);
            let ode = GrassmannPoint::from_basis(&ode).unwrap();
            assert!(distance(&y, &ode, GrassmannMetric::Frobenius) < 1e-8);
        }
    }

    #[test]
    fn exp_rejects_vertical_tangent() {
        let x = axes(4, 0, 1);
        let err = exp(&x, x.rep()).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn log_cases() {
        let x = axes(4, 0, 1);
        assert!(log(&x, &x).unwrap().norm() < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut y = Mat::zeros(4);
        y[(0, 0)] = 1.0;
        y[(1, 1)] = s;
        y[(2, 1)] = s;
        let d = log(&x, &GrassmannPoint::new(y).unwrap()).unwrap();
        let sv = linalg::thin_svd(&d).sigma;
        assert!((sv[0] - FRAC_PI_4).abs() < 1e-14 && sv[1].abs() < 1e-14);

        let err = log(&x, &axes(4, 0, 2)).unwrap_err();
        assert!(matches!(err, Error::OutsideNeighborhood { .. }));
    }

    #[test]
    fn distances() {
        let x = axes(4, 0, 1);
        assert_eq!(distance(&x, &x, GrassmannMetric::Frobenius), 0.0);
        let y = axes(4, 0, 2);
        for m in [GrassmannMetric::Frobenius, GrassmannMetric::AngleSum] {
            assert!((distance(&x, &y, m) - FRAC_PI_2).abs() < 1e-15);
        }
        let z = axes(4, 2, 3);
        assert!((distance(&x, &z, GrassmannMetric::Frobenius) - PI / 2f64.sqrt()).abs() < 1e-15);
        assert!((distance(&x, &z, GrassmannMetric::AngleSum) - PI).abs() < 1e-15);
    }

    #[test]
    fn distance_of_identical_subspaces_is_tiny() {
        let mut rng = Lcg(3);
        let x = rng.point(50);
        let o = linalg::rotation(0.7);
        assert!(distance(&x, &x.rotated(&o), GrassmannMetric::AngleSum) < 1e-14);
    }

    #[test]
    fn round_trip_and_geodesic_property() {
        let mut rng = Lcg(11);
        for _ in 0..10 {
            let x = rng.point(12);
            let d = rng.tangent(&x, 0.8);
            let y = exp(&x, &d).unwrap();
            let back = log(&x, &y).unwrap();
            assert!((back - &d).norm() < 1e-12);
            for t in [0.25, 0.5, 1.0] {
                let yt = exp(&x, &(&d * t)).unwrap();
                let dist = distance(&x, &yt, GrassmannMetric::Frobenius);
                assert!((dist - t * 0.8).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn transport_matches_ode_and_preserves_inner_products() {
        let mut rng = Lcg(5);
        for _ in 0..5 {
            let x = rng.point(10);
            let d = rng.tangent(&x, 1.0);
            let g1 = rng.tangent(&x, 0.7);
            let g2 = rng.tangent(&x, 1.3);
            let t1 = transport(&x, &d, 1.0, &g1).unwrap();
            let t2 = transport(&x, &d, 1.0, &g2).unwrap();
            assert!((inner(&t1, &t2) - inner(&g1, &g2)).abs() < 1e-12);

            let y = exp(&x, &d).unwrap();
            check_horizontal(&y, &t1).unwrap();

            let (_, ode) = integrate(x.rep(), &d, &g1, 500);
            assert!((ode - &t1).norm() < 1e-8);
        }
    }

    #[test]
    fn transport_of_velocity_and_zero_time() {
        let mut rng = Lcg(9);
        let x = rng.point(8);
        let d = rng.tangent(&x, 0.9);
        let g = rng.tangent(&x, 0.4);
        assert!((transport(&x, &d, 0.0, &g).unwrap() - &g).norm() < 1e-15);
        let moved = transport(&x, &d, 1.0, &d).unwrap();
        let a = linalg::thin_svd(&moved).sigma;
        let b = linalg::thin_svd(&d).sigma;
        assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn back_trace_returns_payload() {
        let mut rng = Lcg(13);
        for _ in 0..10 {
            let x = rng.point(15);
            let y = exp(&x, &rng.tangent(&x, 1.0)).unwrap().rotated(&linalg::rotation(1.1));
            let g = rng.tangent(&x, 0.5);
            let there = transport_to(&x, &y, &g).unwrap();
            check_horizontal(&y, &there).unwrap();
            let back = transport_to(&y, &x, &there).unwrap();
            assert!((back - g).norm() < 1e-12);
        }
    }

    #[test]
    fn point_validation() {
        assert!(GrassmannPoint::new(Mat::zeros(2)).is_err());
        assert!(GrassmannPoint::new(Mat::from_element(4, 1.0)).is_err());
        assert!(matches!(
            GrassmannPoint::from_basis(&Mat::from_element(4, 1.0)),
            Err(Error::RankDeficient { .. })
        ));
    }
}

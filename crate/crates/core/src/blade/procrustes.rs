//! Orthogonal Procrustes alignment of Stiefel representatives.

use nalgebra::Matrix2;

use crate::grassmann::GrassmannPoint;
use crate::linalg::{self, Mat};

/// `argmin_R ‖a − b·R‖_F` over O(2), or over SO(2) when `proper` is set.
pub fn procrustes_rotation(a: &Mat, b: &Mat, proper: bool) -> Matrix2<f64> {
    let (u, _, v) = linalg::svd2(&(b.transpose() * a));
    let r = u * v.transpose();
    if proper && r.determinant() < 0.0 {
        // flip the direction of the smallest singular value
        let d = Matrix2::new(1.0, 0.0, 0.0, -1.0);
        u * d * v.transpose()
    } else {
        r
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ClusterDirection {
    /// Align station k−1 to station k for k = N..2.
    #[default]
    TipToRoot,
    RootToTip,
}

/// Aligned representatives and the right factors `R_k` with
/// `aligned_k = reps_k · R_k`.
pub fn cluster_representatives(
    reps: &[GrassmannPoint],
    direction: ClusterDirection,
    proper: bool,
) -> (Vec<GrassmannPoint>, Vec<Matrix2<f64>>) {
    let n = reps.len();
    let mut aligned = reps.to_vec();
    let mut rotations = vec![Matrix2::identity(); n];
    if n < 2 {
        return (aligned, rotations);
    }
    let order: Vec<(usize, usize)> = match direction {
        ClusterDirection::TipToRoot => (1..n).rev().map(|k| (k, k - 1)).collect(),
        ClusterDirection::RootToTip => (1..n).map(|k| (k - 1, k)).collect(),
    };
    for (anchor, moving) in order {
        let r = procrustes_rotation(aligned[anchor].rep(), aligned[moving].rep(), proper);
        aligned[moving] = aligned[moving].rotated(&r);
        rotations[moving] = r;
    }
    (aligned, rotations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{distance, GrassmannMetric};

    fn rep(seed: f64) -> GrassmannPoint {
        GrassmannPoint::from_basis(&Mat::from_fn(8, |i, j| ((i * 5 + j * 2) as f64 * 0.3 + seed).sin())).unwrap()
    }

    #[test]
    fn recovers_rotation() {
        let x = rep(0.2);
        assert!((procrustes_rotation(x.rep(), x.rep(), false) - Matrix2::identity()).norm() < 1e-14);
        let r = linalg::rotation(0.8);
        let xr = x.rep() * r;
        assert!((procrustes_rotation(&xr, x.rep(), false) - r).norm() < 1e-12);
    }

    #[test]
    fn never_increases_mismatch() {
        for k in 0..10 {
            let a = rep(k as f64);
            let b = rep(k as f64 + 0.4);
            for proper in [false, true] {
                let r = procrustes_rotation(a.rep(), b.rep(), proper);
                assert!((a.rep() - b.rep() * r).norm() <= (a.rep() - b.rep()).norm() + 1e-14);
                if proper {
                    assert!(r.determinant() > 0.0);
                }
            }
        }
    }

    #[test]
    fn clustering() {
        let reps: Vec<_> = (0..4).map(|k| rep(0.1 * k as f64)).collect();
        let (aligned, rots) = cluster_representatives(&reps, ClusterDirection::TipToRoot, false);
        // already aligned sequence: nothing moves a second time
        let (again, rots2) = cluster_representatives(&aligned, ClusterDirection::TipToRoot, false);
        for r in &rots2 {
            assert!((r - Matrix2::identity()).norm() < 1e-12);
        }
        for (a, b) in aligned.iter().zip(&again) {
            assert!((a.rep() - b.rep()).norm() < 1e-12);
        }
        for (k, (a, r)) in aligned.iter().zip(&rots).enumerate() {
            assert!(distance(a, &reps[k], GrassmannMetric::Frobenius) < 1e-12);
            assert!((reps[k].rep() * r - a.rep()).norm() < 1e-14);
        }
        let before: f64 = reps.windows(2).map(|w| (w[1].rep() - w[0].rep()).norm()).sum();
        let after: f64 = aligned.windows(2).map(|w| (w[1].rep() - w[0].rep()).norm()).sum();
        assert!(after <= before + 1e-12);

        let mut rotated = reps.clone();
        rotated[2] = aligned[2].rotated(&linalg::rotation(1.3));
        let mut input = aligned.clone();
        input[2] = rotated[2].clone();
        let (_, rots) = cluster_representatives(&input, ClusterDirection::TipToRoot, false);
        assert!((rots[2] - linalg::rotation(1.3).transpose()).norm() < 1e-10);
    }
}

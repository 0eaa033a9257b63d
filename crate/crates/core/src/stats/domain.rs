use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Bounding box and smallest origin-centered ball of normal coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleDomain {
    pub lo: DVector<f64>,
    pub hi: DVector<f64>,
    pub radius: f64,
}

impl SampleDomain {
    pub fn contains(&self, t: &DVector<f64>) -> bool {
        t.len() == self.lo.len() && t.iter().zip(self.lo.iter().zip(self.hi.iter())).all(|(v, (l, h))| *v >= *l && *v <= *h)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// `count` evenly spaced points on the segment from a random box corner
    /// to the opposite corner, endpoints included.
    pub fn corner_sweep<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<DVector<f64>> {
        let start = DVector::from_fn(self.dim(), |i, _| if rng.gen_bool(0.5) { self.lo[i] } else { self.hi[i] });
        let end = DVector::from_fn(self.dim(), |i, _| self.lo[i] + self.hi[i] - start[i]);
        (0..count)
            .map(|k| {
                let t = if count > 1 { k as f64 / (count - 1) as f64 } else { 0.5 };
                &start * (1.0 - t) + &end * t
            })
            .collect()
    }
}

/// Domain of coordinates stored one sample per column.
pub fn sample_domain(coords: &DMatrix<f64>) -> SampleDomain {
    let r = coords.nrows();
    if coords.ncols() == 0 {
        return SampleDomain {
            lo: DVector::zeros(r),
            hi: DVector::zeros(r),
            radius: 0.0,
        };
    }
    let lo = DVector::from_fn(r, |i, _| coords.row(i).min());
    let hi = DVector::from_fn(r, |i, _| coords.row(i).max());
    let radius = coords.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    SampleDomain { lo, hi, radius }
}

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::manifold::Spd;
use crate::spd::SpdMatrix;

use super::karcher::{karcher_mean, KarcherOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeanScaleKind {
    /// Entrywise average of the linear factors.
    ExtrinsicGl2,
    /// Karcher mean of SPD factors under the affine-invariant metric.
    IntrinsicSpd,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanScale {
    pub m_bar: Matrix2<f64>,
    pub kind: MeanScaleKind,
}

/// Determinant magnitude below which an averaged scale counts as singular.
const SINGULAR_DET: f64 = 1e-12;

pub fn mean_scale(factors: &[Matrix2<f64>], kind: MeanScaleKind) -> Result<MeanScale> {
    if factors.is_empty() {
        return Err(Error::InvalidArgument("mean scale of an empty set".into()));
    }
    let m_bar = match kind {
        MeanScaleKind::ExtrinsicGl2 => {
            let sum = factors.iter().fold(Matrix2::zeros(), |acc, m| acc + m);
            let avg = sum / factors.len() as f64;
            let scale = factors.iter().map(|m| m.determinant().abs()).fold(0.0, f64::max);
            if !(avg.determinant().abs() > SINGULAR_DET * scale.max(1.0)) {
                return Err(Error::Singular(format!(
                    "extrinsic mean scale is singular (determinant {:e})",
                    avg.determinant()
                )));
            }
            avg
        }
        MeanScaleKind::IntrinsicSpd => {
            let spds: Vec<SpdMatrix> = factors.iter().map(|m| SpdMatrix::new(*m)).collect::<Result<_>>()?;
            *karcher_mean(&Spd, &spds, &KarcherOptions::default())?.mean.matrix()
        }
    };
    Ok(MeanScale { m_bar, kind })
}

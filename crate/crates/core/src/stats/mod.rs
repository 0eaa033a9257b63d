//! Riemannian statistics: intrinsic means, principal geodesic analysis, mean
//! scales and sampling domains.

mod domain;
mod karcher;
mod pga;
mod scale;

pub use domain::{sample_domain, SampleDomain};
pub use karcher::{karcher_mean, mean_log, Karcher, KarcherOptions};
pub use pga::{Pga, PgaOptions};
pub use scale::{mean_scale, MeanScale, MeanScaleKind};

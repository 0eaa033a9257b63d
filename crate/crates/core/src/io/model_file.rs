//! Plain-text model format: a header line followed by named records.
//!
//! ```text
//! shapetensor-model 1
//! kind grassmann
//! scalar <name> <value>
//! int <name> <value>
//! text <name> <value>
//! matrix <name> <rows> <cols>
//! <one line per row>
//! ```
//!
//! Floats use the shortest representation that parses back exactly, so a
//! saved model loads back bit-identically.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector, Matrix2};

use super::{fmt_f64, parse_f64, read_text, write_atomic};
use crate::error::{Error, Result};
use crate::grassmann::GrassmannPoint;
use crate::linalg::Mat;
use crate::manifold::{Grassmann, Manifold, Spd};
use crate::model::ShapeModel;
use crate::spd::SpdMatrix;
use crate::stats::{MeanScale, MeanScaleKind, Pga, SampleDomain};

const HEADER: &str = "shapetensor-model 1";

struct Writer(String);

impl Writer {
    fn scalar(&mut self, name: &str, v: f64) {
        let _ = writeln!(self.0, "scalar {name} {}", fmt_f64(v));
    }
    fn int(&mut self, name: &str, v: usize) {
        let _ = writeln!(self.0, "int {name} {v}");
    }
    fn text(&mut self, name: &str, v: &str) {
        let _ = writeln!(self.0, "text {name} {v}");
    }
    fn matrix(&mut self, name: &str, rows: usize, cols: usize, at: impl Fn(usize, usize) -> f64) {
        let _ = writeln!(self.0, "matrix {name} {rows} {cols}");
        for i in 0..rows {
            let row: Vec<String> = (0..cols).map(|j| fmt_f64(at(i, j))).collect();
            let _ = writeln!(self.0, "{}", row.join(" "));
        }
    }
    fn dmatrix(&mut self, name: &str, m: &DMatrix<f64>) {
        self.matrix(name, m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    }
    fn vector(&mut self, name: &str, v: &[f64]) {
        self.matrix(name, 1, v.len(), |_, j| v[j]);
    }
    fn pga<M: Manifold>(&mut self, prefix: &str, pga: &Pga<M>, mean: &DMatrix<f64>) {
        self.dmatrix(&format!("{prefix}.mean"), mean);
        self.dmatrix(&format!("{prefix}.basis"), &pga.basis);
        self.vector(&format!("{prefix}.eigenvalues"), &pga.eigenvalues);
        self.scalar(&format!("{prefix}.total_variance"), pga.total_variance);
        self.dmatrix(&format!("{prefix}.coords"), &pga.coords);
        self.scalar(&format!("{prefix}.epsilon"), pga.epsilon);
        self.int(&format!("{prefix}.iterations"), pga.iterations);
        self.scalar(&format!("{prefix}.gradient_norm"), pga.gradient_norm);
    }
}

fn to_dmatrix<R: nalgebra::Dim, C: nalgebra::Dim, S: nalgebra::RawStorage<f64, R, C>>(
    m: &nalgebra::Matrix<f64, R, C, S>,
) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn format_model(model: &ShapeModel) -> String {
    let mut w = Writer(format!("{HEADER}\n"));
    w.text(
        "kind",
        match model.spd {
            None => "grassmann",
            Some(_) => "product",
        },
    );
    w.pga("grass", &model.grass, &to_dmatrix(model.grass.mean.rep()));
    if let Some(spd) = &model.spd {
        w.pga("spd", spd, &to_dmatrix(spd.mean.matrix()));
    }
    w.dmatrix("mean_scale", &to_dmatrix(&model.mean_scale.m_bar));
    w.text(
        "mean_scale.kind",
        match model.mean_scale.kind {
            MeanScaleKind::ExtrinsicGl2 => "extrinsic-gl2",
            MeanScaleKind::IntrinsicSpd => "intrinsic-spd",
        },
    );
    w.vector("domain.lo", model.domain.lo.as_slice());
    w.vector("domain.hi", model.domain.hi.as_slice());
    w.scalar("domain.radius", model.domain.radius);
    w.scalar("training_radius", model.training_radius);
    w.0
}

enum Record {
    Scalar(f64),
    Int(usize),
    Text(String),
    Matrix(DMatrix<f64>),
}

struct Records<'a> {
    path: &'a Path,
    map: HashMap<String, Record>,
}

impl Records<'_> {
    fn missing(&self, name: &str) -> Error {
        Error::parse(self.path, 0, format!("missing or mistyped record {name:?}"))
    }
    fn scalar(&self, name: &str) -> Result<f64> {
        match self.map.get(name) {
            Some(Record::Scalar(v)) => Ok(*v),
            _ => Err(self.missing(name)),
        }
    }
    fn int(&self, name: &str) -> Result<usize> {
        match self.map.get(name) {
            Some(Record::Int(v)) => Ok(*v),
            _ => Err(self.missing(name)),
        }
    }
    fn text(&self, name: &str) -> Result<&str> {
        match self.map.get(name) {
            Some(Record::Text(v)) => Ok(v),
            _ => Err(self.missing(name)),
        }
    }
    fn matrix(&self, name: &str) -> Result<&DMatrix<f64>> {
        match self.map.get(name) {
            Some(Record::Matrix(v)) => Ok(v),
            _ => Err(self.missing(name)),
        }
    }
    fn vector(&self, name: &str) -> Result<Vec<f64>> {
        let m = self.matrix(name)?;
        if m.nrows() != 1 {
            return Err(self.missing(name));
        }
        Ok(m.iter().copied().collect())
    }
    fn matrix2(&self, name: &str) -> Result<Matrix2<f64>> {
        let m = self.matrix(name)?;
        if m.shape() != (2, 2) {
            return Err(Error::parse(self.path, 0, format!("{name} must be 2x2")));
        }
        Ok(Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]))
    }
    fn pga<M: Manifold>(&self, manifold: M, prefix: &str, mean: M::Point) -> Result<Pga<M>> {
        let get = |s: &str| format!("{prefix}.{s}");
        let basis = self.matrix(&get("basis"))?.clone();
        let coords = self.matrix(&get("coords"))?.clone();
        let eigenvalues = self.vector(&get("eigenvalues"))?;
        if basis.ncols() != eigenvalues.len() || coords.nrows() != basis.ncols() || basis.nrows() != manifold.vec_dim(&mean)
        {
            return Err(Error::parse(self.path, 0, format!("inconsistent {prefix} dimensions")));
        }
        Ok(Pga {
            manifold,
            mean,
            basis,
            eigenvalues,
            total_variance: self.scalar(&get("total_variance"))?,
            coords,
            epsilon: self.scalar(&get("epsilon"))?,
            iterations: self.int(&get("iterations"))?,
            gradient_norm: self.scalar(&get("gradient_norm"))?,
        })
    }
}

fn parse_records<'a>(path: &'a Path, text: &str) -> Result<Records<'a>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, h)) if h == HEADER => {}
        _ => return Err(Error::parse(path, 1, format!("expected header {HEADER:?}"))),
    }
    let mut map = HashMap::new();
    while let Some((line, content)) = lines.next() {
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let bad = || Error::parse(path, line, format!("malformed record {content:?}"));
        if toks.len() < 3 {
            return Err(bad());
        }
        let name = toks[1].to_string();
        let record = match toks[0] {
            "scalar" if toks.len() == 3 => Record::Scalar(parse_f64(path, line, toks[2])?),
            "int" if toks.len() == 3 => Record::Int(toks[2].parse().map_err(|_| bad())?),
            "text" => Record::Text(toks[2..].join(" ")),
            "matrix" if toks.len() == 4 => {
                let rows: usize = toks[2].parse().map_err(|_| bad())?;
                let cols: usize = toks[3].parse().map_err(|_| bad())?;
                let mut m = DMatrix::zeros(rows, cols);
                for i in 0..rows {
                    let (l, row) = lines
                        .next()
                        .ok_or_else(|| Error::parse(path, line, format!("matrix {name} truncated")))?;
                    let vals: Vec<&str> = row.split_whitespace().collect();
                    if vals.len() != cols {
                        return Err(Error::parse(path, l, format!("expected {cols} values, found {}", vals.len())));
                    }
                    for (j, v) in vals.iter().enumerate() {
                        m[(i, j)] = parse_f64(path, l, v)?;
                    }
                }
                Record::Matrix(m)
            }
            _ => return Err(bad()),
        };
        if map.insert(name.clone(), record).is_some() {
            return Err(Error::parse(path, line, format!("duplicate record {name:?}")));
        }
    }
    Ok(Records { path, map })
}

pub fn parse_model(path: &Path, text: &str) -> Result<ShapeModel> {
    let r = parse_records(path, text)?;
    let wrap = |e: Error| Error::parse(path, 0, e.to_string());
    let grass_mean = r.matrix("grass.mean")?;
    if grass_mean.ncols() != 2 {
        return Err(Error::parse(path, 0, "grass.mean must have 2 columns"));
    }
    let mean = GrassmannPoint::new(Mat::from_fn(grass_mean.nrows(), |i, j| grass_mean[(i, j)])).map_err(wrap)?;
    let grass = r.pga(Grassmann, "grass", mean)?;
    let spd = match r.text("kind")? {
        "grassmann" => None,
        "product" => {
            let mean = SpdMatrix::new(r.matrix2("spd.mean")?).map_err(wrap)?;
            Some(r.pga(Spd, "spd", mean)?)
        }
        other => return Err(Error::parse(path, 0, format!("unknown model kind {other:?}"))),
    };
    let kind = match r.text("mean_scale.kind")? {
        "extrinsic-gl2" => MeanScaleKind::ExtrinsicGl2,
        "intrinsic-spd" => MeanScaleKind::IntrinsicSpd,
        other => return Err(Error::parse(path, 0, format!("unknown mean scale kind {other:?}"))),
    };
    let domain = SampleDomain {
        lo: DVector::from_vec(r.vector("domain.lo")?),
        hi: DVector::from_vec(r.vector("domain.hi")?),
        radius: r.scalar("domain.radius")?,
    };
    Ok(ShapeModel {
        grass,
        spd,
        mean_scale: MeanScale {
            m_bar: r.matrix2("mean_scale")?,
            kind,
        },
        domain,
        training_radius: r.scalar("training_radius")?,
    })
}

pub fn read_model(path: &Path) -> Result<ShapeModel> {
    parse_model(path, &read_text(path)?)
}

pub fn write_model(path: &Path, model: &ShapeModel) -> Result<()> {
    write_atomic(path, format_model(model).as_bytes())
}

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Matrix2;
use rayon::prelude::*;

use shapetensor::blade::{
    build_blade, consistent_deform, emit_wireframe, synthetic_blade, uniform_etas, BendCurve, BladeModel,
    BladeVariant, BuildOptions, ClusterDirection, DeformScale, Wireframe,
};
use shapetensor::convergence::{run_convergence, ConvergenceConfig, CSV_HEADER};
use shapetensor::cst::{cst_dataset, nominal_family, CstSampling, DatasetMode};
use shapetensor::grassmann::{self, GrassmannMetric};
use shapetensor::io::{
    fmt_f64, format_landmarks, format_manifest, format_nominals, format_obj, format_points3, loglog_svg, read_blade_file,
    read_landmarks, read_manifest, read_model, read_nominals, write_atomic, write_blade_file, write_landmarks,
    write_model, Series,
};
use shapetensor::model::{FitOptions, ModelKind, ScaleChoice, ShapeModel};
use shapetensor::preprocess::{refine, PreprocessConfig, Sampling, SplineKind};
use shapetensor::shape::{landmark_gauge, self_intersects, LandmarkShape};
use shapetensor::spd::{self, SpdMatrix};
use shapetensor::standardize::{l4_matrix, la_standardize, Variant};
use shapetensor::stats::KarcherOptions;
use shapetensor::Error;

/// Separable shape tensors for airfoil landmark shapes and blades.
///
/// Exit codes: 0 success, 2 input error, 3 numerical non-convergence,
/// 4 guard failure in strict mode.
#[derive(Parser)]
#[command(name = "shapetensor", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Refine every shape in a manifest to a common landmark count.
    ///
    /// Writes one landmark file per input, `manifest.csv`, and `gauges.csv`
    /// with columns `file,label,gauge_mean,gauge_max`.
    Preprocess(PreprocessArgs),
    /// Fit a generative shape model.
    ///
    /// Besides the model file, writes `<stem>_eigenvalues.csv`
    /// (`index,eigenvalue,fraction`) and `<stem>_coords.csv`
    /// (`file,label,t1,...`) next to it.
    Fit(FitArgs),
    /// Generate shapes from a model.
    ///
    /// Writes `sample_KKKK.dat` files and `samples.csv` with columns
    /// `file,self_intersects,t1,...`.
    Sample(SampleArgs),
    /// Distance between two landmark files.
    Dist(DistArgs),
    /// Blade assembly, evaluation, deformation and wireframes.
    #[command(subcommand)]
    Blade(BladeCommand),
    /// Refinement convergence experiment on random CST airfoils.
    ///
    /// Writes `convergence.csv` with columns n_c, gauge_mean, gauge_max,
    /// euclid_mean, euclid_median, euclid_max, grass_mean, grass_median,
    /// grass_max (trial statistics per landmark count) and `convergence.svg`.
    Convergence(ConvergenceArgs),
    /// Generate a synthetic CST airfoil dataset with a manifest.
    ///
    /// Writes `shape_KKKK.dat` files, `manifest.csv` and `coeffs.txt`
    /// (`label u1..u9 l1..l9`).
    CstGen(CstGenArgs),
    /// Write a synthetic blade definition with its station files.
    SynthBlade(SynthBladeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SplineArg {
    Auto,
    Natural,
    Periodic,
    Pchip,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplingArg {
    Uniform,
    Cosine,
}

#[derive(Args)]
struct PreprocessArgs {
    /// Manifest of `path,label[,weight]` lines.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = shapetensor::preprocess::DEFAULT_REFINEMENT)]
    n: usize,
    #[arg(long, value_enum, default_value_t = SplineArg::Auto)]
    spline: SplineArg,
    #[arg(long, value_enum, default_value_t = SamplingArg::Uniform)]
    sampling: SamplingArg,
    /// Skip the self-intersection guard on refined shapes.
    #[arg(long)]
    no_guard: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ManifoldArg {
    Grassmann,
    Product,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = ManifoldArg::Grassmann)]
    manifold: ManifoldArg,
    #[arg(long, default_value_t = shapetensor::model::DEFAULT_GRASSMANN_RANK)]
    rank: usize,
    #[arg(long, default_value_t = shapetensor::stats::KarcherOptions::default().epsilon)]
    epsilon: f64,
    #[arg(long, default_value_t = shapetensor::stats::KarcherOptions::default().max_iter)]
    max_iter: usize,
    /// Refine shapes to this many landmarks before fitting.
    #[arg(long)]
    refine: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    model: PathBuf,
    /// Comma-separated coefficients.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "sweep")]
    coeffs: Option<String>,
    /// Sweep mode; `corner-to-corner` is the only mode.
    #[arg(long)]
    sweep: Option<String>,
    /// Samples per sweep.
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// Number of sweeps.
    #[arg(long, default_value_t = 1)]
    sweeps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `model` (generated SPD factor or mean scale), `mean`, or
    /// `l4:l1,l2,l3,l4`.
    #[arg(long, default_value = "model")]
    scale: String,
    /// Exit with code 4 when any sample fails the self-intersection guard.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Frobenius,
    AngleSum,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    Grassmann,
    Spd,
    Euclidean,
}

#[derive(Args)]
struct DistArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, value_enum, default_value_t = MetricArg::Frobenius)]
    metric: MetricArg,
    #[arg(long, value_enum, default_value_t = SpaceArg::Grassmann)]
    space: SpaceArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Gl2,
    Product,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    TipToRoot,
    RootToTip,
}

#[derive(Args)]
struct BladeArgs {
    /// Blade definition file.
    #[arg(long)]
    blade: PathBuf,
    #[arg(long, value_enum, default_value_t = VariantArg::Gl2)]
    variant: VariantArg,
    #[arg(long, value_enum, default_value_t = DirectionArg::TipToRoot)]
    direction: DirectionArg,
    /// Restrict clustering to rotations; reflection mismatches exit with 4.
    #[arg(long)]
    strict: bool,
    /// Refine stations to this many landmarks first.
    #[arg(long)]
    refine: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WireFormat {
    Obj,
    Sections,
}

#[derive(Args)]
struct WireArgs {
    #[arg(long, default_value_t = 100)]
    sections: usize,
    #[arg(long, value_enum, default_value_t = WireFormat::Obj)]
    format: WireFormat,
    /// OBJ file, or directory for per-section files.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum BladeCommand {
    /// Build a blade and write its knot table
    /// (`eta,t,r11,r12,r21,r22,m11,m12,m21,m22,b1,b2`).
    Build {
        #[command(flatten)]
        blade: BladeArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate one section.
    Eval {
        #[command(flatten)]
        blade: BladeArgs,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Deform every station by the same model coefficients and emit the
    /// deformed wireframe.
    Deform {
        #[command(flatten)]
        blade: BladeArgs,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        /// `stations`, `mean`, or `l4:l1,l2,l3,l4`.
        #[arg(long, default_value = "stations")]
        scale: String,
        #[command(flatten)]
        wire: WireArgs,
    },
    /// Emit a wireframe of evenly spaced sections.
    Wireframe {
        #[command(flatten)]
        blade: BladeArgs,
        #[command(flatten)]
        wire: WireArgs,
    },
}

#[derive(Args)]
struct ConvergenceArgs {
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 2000)]
    n_ref: usize,
    #[arg(long, default_value = "20,40,80,160,320")]
    nc_list: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CstGenArgs {
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Coefficient box `lo:hi`.
    #[arg(long, default_value = "0:0.45")]
    coeff_range: String,
    #[arg(long, default_value_t = 200)]
    nc: usize,
    #[arg(long, value_enum, default_value_t = SamplingArg::Cosine)]
    sampling: SamplingArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Perturb nominal sections by up to this fraction instead of drawing
    /// uniformly.
    #[arg(long)]
    perturb: Option<f64>,
    /// Nominal coefficient file (`label u1..u9 l1..l9`); defaults to a
    /// built-in family.
    #[arg(long)]
    nominals: Option<PathBuf>,
    /// Size of the built-in nominal family.
    #[arg(long, default_value_t = 16)]
    nominal_count: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthBladeArgs {
    #[arg(long, default_value_t = 10)]
    stations: usize,
    #[arg(long, default_value_t = 201)]
    nc: usize,
    /// Definition file; station files are written beside it.
    #[arg(long)]
    out: PathBuf,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.root() {
            Error::NonConvergence { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| input_error(format!("invalid number {t:?}")))
        })
        .collect()
}

fn parse_l4(arg: &str) -> CliResult<Option<Matrix2<f64>>> {
    match arg.strip_prefix("l4:") {
        None => Ok(None),
        Some(rest) => {
            let v = parse_list(rest)?;
            if v.len() != 4 {
                return Err(input_error("l4 scale takes four values"));
            }
            Ok(Some(l4_matrix([v[0], v[1], v[2], v[3]])?))
        }
    }
}

fn ensure_dir(dir: &Path) -> CliResult {
    fs::create_dir_all(dir).map_err(|e| input_error(format!("{}: {e}", dir.display())))
}

fn timed<T>(what: &str, f: impl FnOnce() -> CliResult<T>) -> CliResult<T> {
    let start = Instant::now();
    let out = f();
    eprintln!("{what}: {:.3} s", start.elapsed().as_secs_f64());
    out
}

fn write_text(path: &Path, text: &str) -> CliResult {
    ensure_parent(path)?;
    Ok(write_atomic(path, text.as_bytes())?)
}

fn ensure_parent(path: &Path) -> CliResult {
    match path.parent().filter(|d| !d.as_os_str().is_empty()) {
        Some(dir) => ensure_dir(dir),
        None => Ok(()),
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "shape".into(), |s| s.to_string_lossy().into_owned())
}

fn load_manifest_shapes(input: &Path) -> CliResult<Vec<(PathBuf, String, LandmarkShape)>> {
    let entries = read_manifest(input)?;
    let loaded: Vec<_> = entries
        .par_iter()
        .map(|e| read_landmarks(&e.path).map(|(_, s)| (e.path.clone(), e.label.clone(), s)))
        .collect();
    let mut out = Vec::with_capacity(loaded.len());
    let mut errors = Vec::new();
    for r in loaded {
        match r {
            Ok(v) => out.push(v),
            Err(e) => errors.push(e.to_string()),
        }
    }
    if !errors.is_empty() {
        return Err(input_error(errors.join("\n")));
    }
    Ok(out)
}

fn preprocess(a: PreprocessArgs) -> CliResult {
    let cfg = PreprocessConfig {
        n: a.n,
        spline: match a.spline {
            SplineArg::Auto => SplineKind::Auto,
            SplineArg::Natural => SplineKind::Natural,
            SplineArg::Periodic => SplineKind::Periodic,
            SplineArg::Pchip => SplineKind::Pchip,
        },
        sampling: match a.sampling {
            SamplingArg::Uniform => Sampling::UniformArclength,
            SamplingArg::Cosine => Sampling::Cosine,
        },
        check_intersection: !a.no_guard,
    };
    let entries = read_manifest(&a.input)?;
    ensure_dir(&a.out)?;
    let results: Vec<Result<(String, String, String), String>> = timed("preprocess", || {
        Ok(entries
            .par_iter()
            .enumerate()
            .map(|(k, e)| {
                let (name, shape) = read_landmarks(&e.path).map_err(|err| err.to_string())?;
                let refined = refine(&shape, &cfg).map_err(|err| format!("{}: {err}", e.path.display()))?;
                let file = format!("{:04}_{}.dat", k, stem(&e.path));
                write_landmarks(&a.out.join(&file), refined.points(), name.as_deref()).map_err(|err| err.to_string())?;
                let g = landmark_gauge(refined.points());
                Ok((file, e.label.clone(), format!("{},{}", fmt_f64(g.mean), fmt_f64(g.max))))
            })
            .collect())
    })?;
    let mut manifest = Vec::new();
    let mut gauges = String::from("file,label,gauge_mean,gauge_max\n");
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok((file, label, g)) => {
                let _ = writeln!(gauges, "{file},{label},{g}");
                manifest.push((file, label));
            }
            Err(e) => errors.push(e),
        }
    }
    write_text(&a.out.join("manifest.csv"), &format_manifest(&manifest))?;
    write_text(&a.out.join("gauges.csv"), &gauges)?;
    println!("refined {} of {} shapes", manifest.len(), entries.len());
    if !errors.is_empty() {
        return Err(input_error(errors.join("\n")));
    }
    Ok(())
}

fn fit(a: FitArgs) -> CliResult {
    let loaded = load_manifest_shapes(&a.input)?;
    let shapes: Vec<LandmarkShape> = match a.refine {
        None => loaded.iter().map(|(_, _, s)| s.clone()).collect(),
        Some(n) => {
            let cfg = PreprocessConfig {
                n,
                ..PreprocessConfig::default()
            };
            loaded
                .par_iter()
                .map(|(p, _, s)| refine(s, &cfg).map_err(|e| input_error(format!("{}: {e}", p.display()))))
                .collect::<CliResult<_>>()?
        }
    };
    let opts = FitOptions {
        kind: match a.manifold {
            ManifoldArg::Grassmann => ModelKind::Grassmann,
            ManifoldArg::Product => ModelKind::Product,
        },
        rank: a.rank,
        karcher: KarcherOptions {
            epsilon: a.epsilon,
            max_iter: a.max_iter,
        },
    };
    let model = timed("fit", || Ok(ShapeModel::fit(&shapes, &opts)?))?;
    ensure_parent(&a.out)?;
    write_model(&a.out, &model)?;
    let dir = a.out.parent().unwrap_or(Path::new(""));
    let base = stem(&a.out);
    let mut eig = String::from("index,eigenvalue,fraction\n");
    for (i, v) in model.grass.eigenvalues.iter().enumerate() {
        let _ = writeln!(eig, "{},{},{}", i + 1, fmt_f64(*v), fmt_f64(v / model.grass.total_variance));
    }
    write_text(&dir.join(format!("{base}_eigenvalues.csv")), &eig)?;
    let coords = model.coords();
    let mut csv = String::from("file,label");
    for j in 0..coords.nrows() {
        let _ = write!(csv, ",t{}", j + 1);
    }
    csv.push('\n');
    for (k, (p, label, _)) in loaded.iter().enumerate() {
        let vals: Vec<String> = coords.column(k).iter().map(|v| fmt_f64(*v)).collect();
        let _ = writeln!(csv, "{},{label},{}", p.display(), vals.join(","));
    }
    write_text(&dir.join(format!("{base}_coords.csv")), &csv)?;
    println!(
        "fitted {} shapes: {} coefficients, Karcher iterations {}, gradient norm {:e}",
        shapes.len(),
        model.n_coeffs(),
        model.grass.iterations,
        model.grass.gradient_norm
    );
    Ok(())
}

fn sample(a: SampleArgs) -> CliResult {
    let model = read_model(&a.model)?;
    let coeff_sets: Vec<Vec<f64>> = match (&a.coeffs, &a.sweep) {
        (Some(c), None) => vec![parse_list(c)?],
        (None, Some(mode)) if mode == "corner-to-corner" => model.corner_sweeps(a.seed, a.sweeps, a.count),
        (None, Some(mode)) => return Err(input_error(format!("unknown sweep mode {mode:?}"))),
        _ => return Err(input_error("give either --coeffs or --sweep")),
    };
    let scale = match a.scale.as_str() {
        "model" => ScaleChoice::Model,
        "mean" => ScaleChoice::Fixed(model.mean_scale.m_bar),
        other => match parse_l4(other)? {
            Some(m) => ScaleChoice::Fixed(m),
            None => return Err(input_error(format!("unknown scale {other:?}"))),
        },
    };
    ensure_dir(&a.out)?;
    let shapes: Vec<LandmarkShape> = timed("sample", || {
        coeff_sets
            .par_iter()
            .map(|c| Ok(model.generate_shape(c, scale)?))
            .collect::<CliResult<_>>()
    })?;
    let mut csv = String::from("file,self_intersects");
    for j in 0..model.n_coeffs() {
        let _ = write!(csv, ",t{}", j + 1);
    }
    csv.push('\n');
    let mut failures = 0;
    for (k, (shape, c)) in shapes.iter().zip(&coeff_sets).enumerate() {
        let file = format!("sample_{k:04}.dat");
        write_landmarks(&a.out.join(&file), shape.points(), None)?;
        let bad = self_intersects(shape);
        failures += usize::from(bad);
        let vals: Vec<String> = c.iter().map(|v| fmt_f64(*v)).collect();
        let _ = writeln!(csv, "{file},{bad},{}", vals.join(","));
    }
    write_text(&a.out.join("samples.csv"), &csv)?;
    println!("generated {} shapes, {failures} failed the self-intersection guard", shapes.len());
    if failures > 0 && a.strict {
        return Err(Failure {
            code: 4,
            message: format!("{failures} generated shapes self-intersect"),
        });
    }
    Ok(())
}

fn dist(a: DistArgs) -> CliResult {
    let (_, x) = read_landmarks(&a.a)?;
    let (_, y) = read_landmarks(&a.b)?;
    if x.n() != y.n() {
        return Err(input_error(format!("landmark counts differ: {} and {}", x.n(), y.n())));
    }
    let d = match a.space {
        SpaceArg::Euclidean => (x.points() - y.points()).norm(),
        SpaceArg::Grassmann => {
            let metric = match a.metric {
                MetricArg::Frobenius => GrassmannMetric::Frobenius,
                MetricArg::AngleSum => GrassmannMetric::AngleSum,
            };
            let gx = la_standardize(&x, Variant::Gl2)?.grass;
            let gy = la_standardize(&y, Variant::Gl2)?.grass;
            grassmann::distance(&gx, &gy, metric)
        }
        SpaceArg::Spd => {
            let px = SpdMatrix::new(la_standardize(&x, Variant::Polar)?.affine.m)?;
            let py = SpdMatrix::new(la_standardize(&y, Variant::Polar)?.affine.m)?;
            spd::distance(&px, &py)
        }
    };
    println!("{}", fmt_f64(d));
    Ok(())
}

fn build_from_args(b: &BladeArgs) -> CliResult<BladeModel> {
    let def = read_blade_file(&b.blade)?;
    let opts = BuildOptions {
        variant: match b.variant {
            VariantArg::Gl2 => BladeVariant::Gl2Schedule,
            VariantArg::Product => BladeVariant::ProductSpd,
        },
        direction: match b.direction {
            DirectionArg::TipToRoot => ClusterDirection::TipToRoot,
            DirectionArg::RootToTip => ClusterDirection::RootToTip,
        },
        strict: b.strict,
    };
    let cfg = b.refine.map(|n| PreprocessConfig {
        n,
        ..PreprocessConfig::default()
    });
    timed("blade build", || {
        build_blade(&def, cfg.as_ref(), &opts).map_err(|e| {
            let strict_failure = b.strict && matches!(e.root(), Error::Contract(_));
            let mut f = Failure::from(e);
            if strict_failure {
                f.code = 4;
            }
            f
        })
    })
}

fn write_wireframe(model: &BladeModel, wire: &WireArgs) -> CliResult<Wireframe> {
    let etas = uniform_etas(model, wire.sections);
    let bend = if model.bend.is_empty() {
        None
    } else {
        Some(BendCurve::fit(&model.bend)?)
    };
    let wf = timed("wireframe", || Ok(emit_wireframe(model, &etas, bend.as_ref())?))?;
    match wire.format {
        WireFormat::Obj => write_text(&wire.out, &format_obj(&wf))?,
        WireFormat::Sections => {
            ensure_dir(&wire.out)?;
            let mut index = String::from("file,eta\n");
            for (k, s) in wf.sections.iter().enumerate() {
                let file = format!("section_{k:04}.xyz");
                write_text(&wire.out.join(&file), &format_points3(&s.points))?;
                let _ = writeln!(index, "{file},{}", fmt_f64(s.eta));
            }
            write_text(&wire.out.join("sections.csv"), &index)?;
        }
    }
    println!("wrote {} sections of {} landmarks", wf.sections.len(), wf.n());
    Ok(wf)
}

fn blade(cmd: BladeCommand) -> CliResult {
    match cmd {
        BladeCommand::Build { blade, out } => {
            let model = build_from_args(&blade)?;
            let mut csv = String::from("eta,t,r11,r12,r21,r22,m11,m12,m21,m22,b1,b2\n");
            for k in 0..model.etas.len() {
                let r = model.rotations[k];
                let m = model.factors[k];
                let b = model.offsets[k];
                let vals = [
                    model.etas[k],
                    model.t[k],
                    r[(0, 0)],
                    r[(0, 1)],
                    r[(1, 0)],
                    r[(1, 1)],
                    m[(0, 0)],
                    m[(0, 1)],
                    m[(1, 0)],
                    m[(1, 1)],
                    b[0],
                    b[1],
                ];
                let vals: Vec<String> = vals.iter().map(|v| fmt_f64(*v)).collect();
                let _ = writeln!(csv, "{}", vals.join(","));
            }
            write_text(&out, &csv)?;
            if !model.reflections.is_empty() {
                eprintln!("reflections applied at stations {:?}", model.reflections);
            }
            println!("built blade with {} stations of {} landmarks", model.etas.len(), model.n());
            Ok(())
        }
        BladeCommand::Eval { blade, eta, out } => {
            let model = build_from_args(&blade)?;
            let pts = model.evaluate_points(eta)?;
            write_text(&out, &format_landmarks(&pts, None))?;
            Ok(())
        }
        BladeCommand::Wireframe { blade, wire } => {
            let model = build_from_args(&blade)?;
            write_wireframe(&model, &wire)?;
            Ok(())
        }
        BladeCommand::Deform {
            blade,
            model,
            coeffs,
            scale,
            wire,
        } => {
            let bm = build_from_args(&blade)?;
            let shape_model = read_model(&model)?;
            let coeffs = parse_list(&coeffs)?;
            let scale = match scale.as_str() {
                "stations" => DeformScale::Stations,
                "mean" => DeformScale::Mean,
                other => match parse_l4(other)? {
                    Some(m) => DeformScale::Fixed(m),
                    None => return Err(input_error(format!("unknown scale {other:?}"))),
                },
            };
            let (deformed, report) = timed("deform", || Ok(consistent_deform(&bm, &shape_model, &coeffs, scale)?))?;
            eprintln!(
                "tangent norm {:e}; transported norms {:?}",
                report.tangent_norm, report.transported_norms
            );
            write_wireframe(&deformed, &wire)?;
            Ok(())
        }
    }
}

fn convergence(a: ConvergenceArgs) -> CliResult {
    let nc_list = parse_list(&a.nc_list)?
        .into_iter()
        .map(|v| {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(input_error(format!("invalid landmark count {v}")))
            }
        })
        .collect::<CliResult<Vec<_>>>()?;
    let cfg = ConvergenceConfig {
        trials: a.trials,
        n_ref: a.n_ref,
        nc_list,
        seed: a.seed,
        ..ConvergenceConfig::default()
    };
    let report = timed("convergence", || Ok(run_convergence(&cfg)?))?;
    ensure_dir(&a.out)?;
    write_text(&a.out.join("convergence.csv"), &report.to_csv())?;
    let series = |label: &'static str, f: fn(&shapetensor::convergence::ConvergenceRow) -> (f64, f64)| Series {
        label,
        points: report.rows.iter().map(f).collect(),
    };
    let svg = loglog_svg(
        "Refinement convergence",
        "landmark gauge (max gap)",
        "error",
        &[
            series("Grassmann angle-sum, mean", |r| (r.gauge_max, r.grass_mean)),
            series("Grassmann angle-sum, max", |r| (r.gauge_max, r.grass_max)),
            series("Euclidean, mean", |r| (r.gauge_max, r.euclid_mean)),
        ],
    );
    write_text(&a.out.join("convergence.svg"), &svg)?;
    println!("{CSV_HEADER}");
    print!("{}", report.to_csv().lines().skip(1).map(|l| format!("{l}\n")).collect::<String>());
    println!(
        "slope (Grassmann vs max gauge) {:.4}; (Grassmann vs mean gauge) {:.4}; (Euclidean vs max gauge) {:.4}; skipped {}",
        report.slope_grass_max_gauge, report.slope_grass_mean_gauge, report.slope_euclid_max_gauge, report.skipped
    );
    Ok(())
}

fn cst_gen(a: CstGenArgs) -> CliResult {
    let range = match a.coeff_range.split_once(':') {
        Some((lo, hi)) => {
            let lo: f64 = lo.trim().parse().map_err(|_| input_error("invalid --coeff-range"))?;
            let hi: f64 = hi.trim().parse().map_err(|_| input_error("invalid --coeff-range"))?;
            if !(lo <= hi && lo.is_finite() && hi.is_finite()) {
                return Err(input_error("invalid --coeff-range"));
            }
            (lo, hi)
        }
        None => return Err(input_error("--coeff-range takes lo:hi")),
    };
    let mode = match a.perturb {
        None => DatasetMode::Uniform { range },
        Some(frac) => {
            if !(0.0..=1.0).contains(&frac) {
                return Err(input_error("--perturb must lie in [0, 1]"));
            }
            let nominals = match &a.nominals {
                Some(p) => read_nominals(p)?,
                None => nominal_family(a.nominal_count),
            };
            DatasetMode::Perturb { nominals, frac, range }
        }
    };
    let sampling = match a.sampling {
        SamplingArg::Cosine => CstSampling::Cosine,
        SamplingArg::Uniform => CstSampling::Uniform,
    };
    let (samples, redrawn) = timed("cst-gen", || Ok(cst_dataset(a.count, &mode, a.nc, sampling, a.seed)?))?;
    ensure_dir(&a.out)?;
    let mut manifest = Vec::new();
    let mut coeffs = Vec::new();
    for (k, s) in samples.iter().enumerate() {
        let file = format!("shape_{k:04}.dat");
        write_landmarks(&a.out.join(&file), s.shape.points(), None)?;
        manifest.push((file.clone(), s.label.clone()));
        coeffs.push((format!("{file}:{}", s.label), s.coeffs));
    }
    write_text(&a.out.join("manifest.csv"), &format_manifest(&manifest))?;
    write_text(&a.out.join("coeffs.txt"), &format_nominals(&coeffs))?;
    println!("generated {} shapes ({redrawn} redrawn)", samples.len());
    Ok(())
}

fn synth_blade(a: SynthBladeArgs) -> CliResult {
    ensure_parent(&a.out)?;
    let def = synthetic_blade(a.stations, a.nc)?;
    write_blade_file(&a.out, &def)?;
    println!("wrote {} stations", def.stations.len());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Preprocess(a) => preprocess(a),
        Command::Fit(a) => fit(a),
        Command::Sample(a) => sample(a),
        Command::Dist(a) => dist(a),
        Command::Blade(c) => blade(c),
        Command::Convergence(a) => convergence(a),
        Command::CstGen(a) => cst_gen(a),
        Command::SynthBlade(a) => synth_blade(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

//! The `surfdenoise` command line.
//!
//! Exit codes: 0 on success, 2 on argument errors (one line on stderr),
//! 1 on processing errors.

use std::ffi::OsString;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::Value;
use surfdenoise_core::bench::{
    add_mesh_noise, compare, compare_clouds, make_shape, perturb_points, MetricsReport, ShapeKind,
};
use surfdenoise_core::cloud::{estimate_normals_pca, orient_toward, PointCloud};
use surfdenoise_core::filter::{FilterSpec, MeshMethod, SpatialSigma, SpatialWeight};
use surfdenoise_core::mesh::{NeighborhoodMode, NeighborhoodSpec};
use surfdenoise_core::point_filter::{
    filter_point_normals, update_point_positions, PointFilterSpec, PointMethod, PointNeighborhood, PointSigma,
};
use surfdenoise_core::vertex_update::denoise_two_stage;
use surfdenoise_core::{Kernel, KernelKind, TriMesh};

use crate::error::Error;
use crate::io::{self, Format};
use crate::report::{csv_header, csv_row, write_kernel_table, write_report_json};
use crate::specfile::{parse_spec, AnySpec};

const ANGLE_NOTE: &str = "Angle-based methods (belyaev-ohtake, yadav-box-2017, tasdizen-diffusion, \
li-bilateral, yadav-vnvt) take --sigma in degrees (degrees per unit length for belyaev-ohtake); \
all others take a distance between unit normals. Kernels ignore constant factors, so absolute \
weights are not comparable across kernels.";

#[derive(Debug, Parser)]
#[command(
    name = "surfdenoise",
    version,
    about = "Feature-preserving mesh and point-cloud denoising"
)]
struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Write a synthetic shape as OBJ.
    MakeShape(MakeShapeArgs),
    /// Displace vertices (or points) along random directions.
    AddNoise(AddNoiseArgs),
    /// Filter normals, then move vertices (or points) to match them.
    #[command(after_help = ANGLE_NOTE)]
    Denoise(DenoiseArgs),
    /// Compare a candidate with its ground truth.
    Metrics(MetricsArgs),
    /// Sample rho, psi and g of a kernel to CSV.
    KernelTable(KernelTableArgs),
    /// Noise a synthetic shape and run every requested method on it.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
struct ShapeArgs {
    /// cube, plane, icosphere or fandisk-like.
    #[arg(long = "shape", alias = "preset", value_parser = parse_shape_name)]
    shape: String,
    /// Grid size (cube, plane) or subdivision level (icosphere, fandisk-like).
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
}

#[derive(Debug, Args)]
struct MakeShapeArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct AddNoiseArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, short)]
    output: PathBuf,
    /// Noise standard deviation as a multiple of the mean edge length
    /// (mean neighbor spacing for point clouds).
    #[arg(long)]
    sigma_factor: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct DenoiseArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, short)]
    output: PathBuf,
    #[arg(long, value_parser = parse_method_name, required_unless_present = "spec")]
    method: Option<String>,
    /// Read the filter from a `key = value` spec file instead of flags.
    #[arg(long, conflicts_with_all = [
        "method", "sigma", "sigma_d", "kernel", "box_floor", "neighborhood", "radius", "k",
        "exclude_self", "iters", "lambda", "guidance_threshold",
    ])]
    spec: Option<PathBuf>,
    /// Range scale; defaults to the method's calibrated value.
    #[arg(long)]
    sigma: Option<f64>,
    /// Spatial scale: auto, auto-global or a length.
    #[arg(long)]
    sigma_d: Option<String>,
    /// Replace the method's kernel (generic methods and gradient-descent).
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long)]
    box_floor: Option<f64>,
    /// shared-vertex, shared-edge or radius for meshes; knn or radius for clouds.
    #[arg(long)]
    neighborhood: Option<String>,
    #[arg(long)]
    radius: Option<f64>,
    /// Neighbor count for point clouds.
    #[arg(long)]
    k: Option<usize>,
    /// Leave each face out of its own neighborhood.
    #[arg(long)]
    exclude_self: bool,
    /// Normal filtering iterations.
    #[arg(long)]
    iters: Option<usize>,
    /// Vertex (point position) update iterations.
    #[arg(long)]
    vertex_iters: Option<usize>,
    /// Vertex update step.
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    /// Step of gradient-descent.
    #[arg(long)]
    lambda: Option<f64>,
    /// Guidance cutoff angle in degrees (zhang-guided).
    #[arg(long)]
    guidance_threshold: Option<f64>,
    /// Neighbors used for PCA normals when the cloud has none.
    #[arg(long, default_value_t = 10)]
    pca_k: usize,
    /// Flip estimated normals to agree with the ground-truth normals.
    #[arg(long, requires = "ground_truth")]
    orient_to_truth: bool,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, requires = "report")]
    ground_truth: Option<PathBuf>,
    /// Dihedral angle in degrees above which an edge is a feature.
    #[arg(long, default_value_t = 70.0)]
    feature_threshold: f64,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    candidate: PathBuf,
    #[arg(long, default_value_t = 70.0)]
    feature_threshold: f64,
    /// JSON report path; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct KernelTableArgs {
    #[arg(long)]
    kernel: String,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long)]
    box_floor: Option<f64>,
    #[arg(long, default_value_t = 4.0)]
    xmax: f64,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, alias = "output", short)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    /// Noise as a multiple of the mean edge length.
    #[arg(long, default_value_t = 0.3)]
    noise: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// `all` or a comma-separated list of mesh methods.
    #[arg(long, default_value = "all")]
    methods: String,
    #[arg(long, default_value_t = 20)]
    iters: usize,
    #[arg(long, default_value_t = 30)]
    vertex_iters: usize,
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    #[arg(long, default_value_t = 70.0)]
    feature_threshold: f64,
    /// Also write the noisy input and every denoised mesh as OBJ.
    #[arg(long)]
    save_meshes: bool,
    /// Output directory.
    #[arg(long, short)]
    out: PathBuf,
}

enum Failure {
    Usage(String),
    Processing(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Processing(e)
    }
}

impl From<surfdenoise_core::Error> for Failure {
    fn from(e: surfdenoise_core::Error) -> Self {
        Failure::Processing(e.into())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Processing(e.into())
    }
}

type CliResult<T> = Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Usage(msg.into()))
}

fn method_list() -> String {
    MeshMethod::ALL
        .iter()
        .map(|m| m.name())
        .chain(PointMethod::ALL.iter().map(|m| m.name()))
        .collect::<Vec<_>>()
        .join(", ")
}

fn parse_method_name(s: &str) -> Result<String, String> {
    if MeshMethod::from_name(s).is_some() || PointMethod::from_name(s).is_some() {
        Ok(s.to_string())
    } else {
        Err(format!("unknown method `{s}`; valid methods: {}", method_list()))
    }
}

const SHAPES: [&str; 4] = ["cube", "plane", "icosphere", "fandisk-like"];

fn parse_shape_name(s: &str) -> Result<String, String> {
    if SHAPES.contains(&s) {
        Ok(s.to_string())
    } else {
        Err(format!("unknown shape `{s}`; valid shapes: {}", SHAPES.join(", ")))
    }
}

fn shape_kind(a: &ShapeArgs) -> ShapeKind {
    match a.shape.as_str() {
        "cube" => ShapeKind::Cube(a.resolution.unwrap_or(10)),
        "plane" => ShapeKind::Plane(a.resolution.unwrap_or(10)),
        "icosphere" => ShapeKind::Icosphere(a.resolution.unwrap_or(3)),
        _ => ShapeKind::FandiskLike(a.resolution.unwrap_or(3)),
    }
}

fn build_shape(a: &ShapeArgs) -> CliResult<TriMesh> {
    make_shape(shape_kind(a), a.scale).map_err(|e| Failure::Usage(e.to_string()))
}

fn parse_kernel(name: &str) -> CliResult<KernelKind> {
    KernelKind::from_name(name).map_or_else(
        || {
            let all: Vec<&str> = KernelKind::ALL.iter().map(|k| k.name()).collect();
            usage(format!("unknown kernel `{name}`; valid kernels: {}", all.join(", ")))
        },
        Ok,
    )
}

fn is_cloud(path: &Path) -> CliResult<bool> {
    Format::from_path(path)
        .map(|f| f == Format::Xyz)
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<fs::File>) -> crate::error::Result<()>) -> CliResult<()> {
    let file = fs::File::create(path).map_err(|e| Error::from(e).in_file(path))?;
    let mut w = BufWriter::new(file);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

fn mesh_spec(a: &DenoiseArgs, method: MeshMethod) -> CliResult<FilterSpec> {
    let bad = |e: surfdenoise_core::Error| Failure::Usage(e.to_string());
    let sigma = match a.sigma {
        Some(s) if method.uses_angle() => s.to_radians(),
        Some(s) => s,
        None => method.default_sigma(),
    };
    let mut spec = FilterSpec::preset(method, sigma).map_err(bad)?;
    if let Some(k) = &a.kernel {
        let kind = parse_kernel(k)?;
        spec.range_kernel = Kernel::new(kind, sigma).map_err(bad)?;
    }
    if let Some(floor) = a.box_floor {
        if spec.range_kernel.kind() != KernelKind::Box {
            return usage("--box-floor applies only to the box kernel");
        }
        spec.range_kernel = Kernel::boxed(sigma, floor).map_err(bad)?;
    }
    let mode = match a.neighborhood.as_deref() {
        None => spec.neighborhood.mode,
        Some("shared-vertex") => NeighborhoodMode::SharedVertexRing,
        Some("shared-edge") => NeighborhoodMode::SharedEdgeRing,
        Some("radius") => match a.radius {
            Some(r) => NeighborhoodMode::CentroidRadius(r),
            None => return usage("--neighborhood radius needs --radius"),
        },
        Some(other) => {
            return usage(format!(
                "unknown mesh neighborhood `{other}`; valid: shared-vertex, shared-edge, radius"
            ))
        }
    };
    spec.neighborhood = NeighborhoodSpec::new(mode, !a.exclude_self);
    if let Some(s) = &a.sigma_d {
        spec.spatial_sigma = match s.as_str() {
            "auto" => SpatialSigma::Auto,
            "auto-global" => SpatialSigma::AutoGlobal,
            v => match v.parse::<f64>() {
                Ok(x) => SpatialSigma::Fixed(x),
                Err(_) => return usage(format!("bad --sigma-d `{v}`; expected auto, auto-global or a number")),
            },
        };
        if spec.spatial != SpatialWeight::Gaussian {
            eprintln!("note: --sigma-d has no effect on {}", method.name());
        }
    }
    if let Some(n) = a.iters {
        spec.iterations = n;
    }
    if let Some(l) = a.lambda {
        spec.step_lambda = l;
    }
    if let Some(t) = a.guidance_threshold {
        spec.guidance_threshold = t.to_radians();
    }
    spec.validate().map_err(bad)?;
    Ok(spec)
}

fn point_spec(a: &DenoiseArgs, method: PointMethod) -> CliResult<PointFilterSpec> {
    let mut spec = PointFilterSpec::preset(method);
    if let Some(s) = a.sigma {
        spec.sigma = PointSigma::Fixed(if method.uses_angle() { s.to_radians() } else { s });
    }
    if let Some(s) = &a.sigma_d {
        spec.sigma_d = match s.as_str() {
            "auto" => PointSigma::Auto,
            v => match v.parse::<f64>() {
                Ok(x) => PointSigma::Fixed(x),
                Err(_) => return usage(format!("bad --sigma-d `{v}`; expected auto or a number")),
            },
        };
    }
    spec.neighborhood = match a.neighborhood.as_deref() {
        None | Some("knn") => match (a.k, a.neighborhood.is_none(), a.radius) {
            (_, true, Some(r)) => PointNeighborhood::Radius(r),
            (Some(k), _, _) => PointNeighborhood::Knn(k),
            (None, _, _) => spec.neighborhood,
        },
        Some("radius") => match a.radius {
            Some(r) => PointNeighborhood::Radius(r),
            None => return usage("--neighborhood radius needs --radius"),
        },
        Some(other) => return usage(format!("unknown point neighborhood `{other}`; valid: knn, radius")),
    };
    if let Some(n) = a.iters {
        spec.iterations = n;
    }
    spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(spec)
}

fn save_report(path: &Path, report: &MetricsReport, extra: &[(&str, Value)]) -> CliResult<()> {
    write_file(path, |w| write_report_json(report, extra, w))
}

fn spec_from_file(path: &Path) -> CliResult<AnySpec> {
    let text = fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
    parse_spec(&text).map_err(|e| Failure::Usage(e.in_file(path).to_string()))
}

fn denoise(a: &DenoiseArgs) -> CliResult<()> {
    let cloud = is_cloud(&a.input)?;
    let from_file = a.spec.as_deref().map(spec_from_file).transpose()?;
    let name = match from_file {
        Some(AnySpec::Mesh(s)) => s.method.name(),
        Some(AnySpec::Point(s)) => s.method.name(),
        None => a.method.as_deref().unwrap_or_default(),
    };
    if cloud {
        let Some(method) = PointMethod::from_name(name) else {
            return usage(format!(
                "method `{name}` works on meshes; point-cloud methods: {}",
                PointMethod::ALL.iter().map(|m| m.name()).collect::<Vec<_>>().join(", ")
            ));
        };
        let spec = match from_file {
            Some(AnySpec::Point(s)) => s,
            _ => point_spec(a, method)?,
        };
        return denoise_cloud(a, spec);
    }
    let Some(method) = MeshMethod::from_name(name) else {
        return usage(format!(
            "method `{name}` works on point clouds (.xyz); mesh methods: {}",
            MeshMethod::ALL.iter().map(|m| m.name()).collect::<Vec<_>>().join(", ")
        ));
    };
    let spec = match from_file {
        Some(AnySpec::Mesh(s)) => s,
        _ => mesh_spec(a, method)?,
    };
    let mesh = io::load_mesh(&a.input)?;
    let out = denoise_two_stage(&mesh, &spec, a.vertex_iters.unwrap_or(30), a.step)?;
    io::save_mesh(&out.mesh, &a.output)?;
    if let Some(path) = &a.report {
        let truth = match &a.ground_truth {
            Some(g) => io::load_mesh(g)?,
            None => mesh.clone(),
        };
        let mut r = compare(&truth, &out.mesh, a.feature_threshold)?;
        r.warnings = out.warnings;
        save_report(path, &r, &[("method", Value::from(method.name()))])?;
    }
    Ok(())
}

fn denoise_cloud(a: &DenoiseArgs, spec: PointFilterSpec) -> CliResult<()> {
    let method = spec.method;
    let mut cloud = io::load_cloud(&a.input)?;
    let truth = a.ground_truth.as_deref().map(io::load_cloud).transpose()?;
    if cloud.normals().is_none() {
        let mut n = estimate_normals_pca(&cloud, a.pca_k)?;
        if a.orient_to_truth {
            let reference = truth
                .as_ref()
                .and_then(|t| t.normals())
                .ok_or_else(|| Error::Invalid("ground truth has no normals to orient toward".into()))?;
            orient_toward(&mut n, reference)?;
        }
        cloud.set_normals(n)?;
    }
    let filtered = filter_point_normals(&cloud, &spec)?;
    let mut pos_spec = spec;
    pos_spec.iterations = a.vertex_iters.unwrap_or(10);
    let (points, position_warnings) = update_point_positions(&cloud, &filtered.normals, &pos_spec)?;
    let mut warnings = filtered.warnings;
    warnings.merge(position_warnings);
    let result = PointCloud::with_normals(points, filtered.normals)?;
    io::save_cloud(&result, &a.output)?;
    if let Some(path) = &a.report {
        let t = truth.as_ref().unwrap_or(&cloud);
        let tn = t
            .normals()
            .ok_or_else(|| Error::Invalid("ground truth has no normals".into()))?;
        let mut r = compare_clouds(t.points(), tn, result.points(), result.normals().unwrap_or_default())?;
        r.warnings = warnings;
        save_report(path, &r, &[("method", Value::from(method.name()))])?;
    }
    Ok(())
}

fn add_noise(a: &AddNoiseArgs) -> CliResult<()> {
    if !(a.sigma_factor >= 0.0 && a.sigma_factor.is_finite()) {
        return usage(format!("--sigma-factor must be non-negative, got {}", a.sigma_factor));
    }
    if is_cloud(&a.input)? {
        let cloud = io::load_cloud(&a.input)?;
        let points = perturb_points(cloud.points(), a.sigma_factor * cloud.mean_spacing(), a.seed)?;
        let noisy = match cloud.normals() {
            Some(n) => PointCloud::with_normals(points, n.to_vec())?,
            None => PointCloud::new(points),
        };
        io::save_cloud(&noisy, &a.output)?;
    } else {
        let mesh = io::load_mesh(&a.input)?;
        io::save_mesh(&add_mesh_noise(&mesh, a.sigma_factor, a.seed)?, &a.output)?;
    }
    Ok(())
}

fn metrics(a: &MetricsArgs) -> CliResult<()> {
    let report = if is_cloud(&a.truth)? {
        let t = io::load_cloud(&a.truth)?;
        let c = io::load_cloud(&a.candidate)?;
        let (Some(tn), Some(cn)) = (t.normals(), c.normals()) else {
            return Err(Error::Invalid("point-cloud metrics need normals in both files".into()).into());
        };
        compare_clouds(t.points(), tn, c.points(), cn)?
    } else {
        compare(
            &io::load_mesh(&a.truth)?,
            &io::load_mesh(&a.candidate)?,
            a.feature_threshold,
        )?
    };
    match &a.output {
        Some(p) => save_report(p, &report, &[]),
        None => {
            let mut out = std::io::stdout().lock();
            write_report_json(&report, &[], &mut out)?;
            Ok(())
        }
    }
}

fn kernel_table(a: &KernelTableArgs) -> CliResult<()> {
    let kind = parse_kernel(&a.kernel)?;
    let bad = |e: surfdenoise_core::Error| Failure::Usage(e.to_string());
    let kernel = match a.box_floor {
        Some(f) if kind == KernelKind::Box => Kernel::boxed(a.sigma, f).map_err(bad)?,
        Some(_) => return usage("--box-floor applies only to the box kernel"),
        None => Kernel::new(kind, a.sigma).map_err(bad)?,
    };
    let table = kernel.sample_table(a.xmax, a.n).map_err(bad)?;
    write_file(&a.out, |w| write_kernel_table(&table, w))
}

fn experiment_methods(list: &str) -> CliResult<Vec<MeshMethod>> {
    if list == "all" {
        return Ok(MeshMethod::ALL.to_vec());
    }
    list.split(',')
        .map(|s| {
            let s = s.trim();
            MeshMethod::from_name(s).ok_or_else(|| {
                Failure::Usage(format!(
                    "unknown mesh method `{s}`; valid methods: {}",
                    MeshMethod::ALL.iter().map(|m| m.name()).collect::<Vec<_>>().join(", ")
                ))
            })
        })
        .collect()
}

fn experiment(a: &ExperimentArgs) -> CliResult<()> {
    let methods = experiment_methods(&a.methods)?;
    if !(a.noise >= 0.0 && a.noise.is_finite()) {
        return usage(format!("--noise must be non-negative, got {}", a.noise));
    }
    if a.iters == 0 {
        return usage("--iters must be positive");
    }
    let truth = build_shape(&a.shape)?;
    let noisy = add_mesh_noise(&truth, a.noise, a.seed)?;
    fs::create_dir_all(&a.out).map_err(|e| Error::from(e).in_file(&a.out))?;
    let context = |m: &str, sigma: Option<f64>| -> Vec<(&'static str, Value)> {
        let mut v = vec![
            ("method", Value::from(m)),
            ("shape", Value::from(a.shape.shape.as_str())),
            ("noise", Value::from(a.noise)),
            ("seed", Value::from(a.seed)),
        ];
        if let Some(s) = sigma {
            v.push(("sigma", Value::from(s)));
        }
        v
    };
    let baseline = compare(&truth, &noisy, a.feature_threshold)?;
    save_report(&a.out.join("noisy.json"), &baseline, &context("noisy", None))?;
    if a.save_meshes {
        io::save_mesh(&truth, &a.out.join("truth.obj"))?;
        io::save_mesh(&noisy, &a.out.join("noisy.obj"))?;
    }
    let mut rows = vec![csv_header(&["method", "sigma"])];
    for method in methods {
        let sigma = method.default_sigma();
        let spec = FilterSpec::preset(method, sigma)?.with_iterations(a.iters)?;
        let out = denoise_two_stage(&noisy, &spec, a.vertex_iters, a.step)?;
        let mut r = compare(&truth, &out.mesh, a.feature_threshold)?;
        r.warnings = out.warnings;
        save_report(
            &a.out.join(format!("{}.json", method.name())),
            &r,
            &context(method.name(), Some(sigma)),
        )?;
        if a.save_meshes {
            io::save_mesh(&out.mesh, &a.out.join(format!("{}.obj", method.name())))?;
        }
        rows.push(csv_row(&[method.name(), &sigma.to_string()], &r));
    }
    write_file(&a.out.join("summary.csv"), |w| {
        for row in &rows {
            writeln!(w, "{row}")?;
        }
        Ok(())
    })
}

fn make_shape_cmd(a: &MakeShapeArgs) -> CliResult<()> {
    let m = build_shape(&a.shape)?;
    io::save_mesh(&m, &a.output)?;
    Ok(())
}

fn dispatch(cmd: &Command) -> CliResult<()> {
    match cmd {
        Command::MakeShape(a) => make_shape_cmd(a),
        Command::AddNoise(a) => add_noise(a),
        Command::Denoise(a) => denoise(a),
        Command::Metrics(a) => metrics(a),
        Command::KernelTable(a) => kernel_table(a),
        Command::Experiment(a) => experiment(a),
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                eprint!("{e}");
                return 2;
            }
            let text = e.render().to_string();
            let line = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("error: bad arguments");
            eprintln!("{line}");
            return 2;
        }
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n as usize).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(Failure::Processing(Error::Invalid(e.to_string()))),
        },
        None => dispatch(&cli.command),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Processing(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

//! The four subcommands. Each validates every argument and the output
//! location before reading data or computing anything.

use std::fs::File;
use std::path::{Path, PathBuf};

use backscatter::dataset::{
    add_noise_with_mode, read_dataset, synthesize_with, write_dataset_to, Band, DataSet, DirectionSet, Method,
    NoiseMode, Polarization, SynthesisOptions,
};
use backscatter::geometry::{Shape, UnitVec, Vec3};
use backscatter::inversion::{
    check_power, indicator, profile_line, read_field_csv, scalar_projection_mode, strip_estimate, write_field_csv,
    IndicatorField, SamplingGrid,
};
use clap::Args;
use serde::Serialize;

use crate::output::{check_writable, write_atomic};
use crate::render::{render_field, RenderOptions};
use crate::{CliError, CliResult};

fn parse<T>(what: &str, s: &str) -> CliResult<T>
where
    T: std::str::FromStr<Err = backscatter::Error>,
{
    s.parse()
        .map_err(|e: backscatter::Error| CliError::usage(format!("--{what} '{s}': {e}")))
}

fn numbers(what: &str, s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::usage(format!("--{what}: bad number '{t}'")))
        })
        .collect()
}

fn vec3(what: &str, s: &str) -> CliResult<Vec3> {
    match numbers(what, s)?.as_slice() {
        [x, y, z] => Ok(Vec3::new(*x, *y, *z)),
        _ => Err(CliError::usage(format!("--{what}: expected x,y,z, got '{s}'"))),
    }
}

fn unit(what: &str, s: &str) -> CliResult<UnitVec> {
    let v = vec3(what, s)?;
    UnitVec::new(v)
        .or_else(|_| UnitVec::normalize(v))
        .map_err(|_| CliError::usage(format!("--{what}: '{s}' has zero length")))
}

fn load_dataset(path: &Path) -> CliResult<DataSet> {
    read_dataset(path).map_err(|e| match e {
        backscatter::Error::Io(io) => CliError::io(path, io),
        e => CliError::usage(format!("{}: {e}", path.display())),
    })
}

fn load_field(path: &Path) -> CliResult<IndicatorField> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_field_csv(file).map_err(|e| match e {
        backscatter::Error::Io(io) => CliError::io(path, io),
        e => CliError::usage(format!("{}: {e}", path.display())),
    })
}

#[derive(Debug, Clone, Args)]
pub struct SynthesizeArgs {
    /// Obstacle, e.g. "ellipsoid:1.0,0.4,0.7" or "ball:0.8@0,0,1.5+ball:0.8@0,0,-1.5".
    #[arg(long)]
    pub shape: String,
    /// circle:<xy|xz|yz>:<n> or sphere:<n>, n even.
    #[arg(long)]
    pub directions: String,
    #[arg(long, default_value_t = 10.0)]
    pub kmin: f64,
    #[arg(long, default_value_t = 20.0)]
    pub kmax: f64,
    #[arg(long, default_value_t = 40)]
    pub nk: usize,
    /// po, analytic or mie.
    #[arg(long, default_value = "po")]
    pub method: String,
    /// Noise level relative to the per-direction maximum amplitude.
    #[arg(long)]
    pub noise: Option<f64>,
    /// ball or sphere.
    #[arg(long, default_value = "ball")]
    pub noise_mode: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// default or rotate:<degrees>.
    #[arg(long, default_value = "default")]
    pub polarization: String,
    /// Mesh edge bound for po; defaults to an eighth of the shortest wavelength.
    #[arg(long)]
    pub max_edge: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

impl SynthesizeArgs {
    pub fn new(shape: &str, directions: &str, method: &str, out: impl Into<PathBuf>) -> Self {
        SynthesizeArgs {
            shape: shape.into(),
            directions: directions.into(),
            kmin: 10.0,
            kmax: 20.0,
            nk: 40,
            method: method.into(),
            noise: None,
            noise_mode: "ball".into(),
            seed: 0,
            polarization: "default".into(),
            max_edge: None,
            out: out.into(),
        }
    }
}

pub fn cmd_synthesize(args: &SynthesizeArgs) -> CliResult<String> {
    let shape: Shape = parse("shape", &args.shape)?;
    let dirs: DirectionSet = parse("directions", &args.directions)?;
    let method: Method = parse("method", &args.method)?;
    let polarization: Polarization = parse("polarization", &args.polarization)?;
    let mode: NoiseMode = parse("noise-mode", &args.noise_mode)?;
    let band = Band::new(args.kmin, args.kmax, args.nk)?;
    if band.k_min >= band.k_max {
        return Err(CliError::usage(format!(
            "--kmin {} must be below --kmax {}",
            args.kmin, args.kmax
        )));
    }
    if let Some(level) = args.noise {
        if !(level.is_finite() && level >= 0.0) {
            return Err(CliError::usage(format!("--noise must be a non-negative level, got {level}")));
        }
    }
    if method == Method::Mie && shape.balls().is_none() {
        return Err(backscatter::Error::UnsupportedShape(format!(
            "the mie method needs balls, got {shape}"
        ))
        .into());
    }
    if let Some(h) = args.max_edge {
        let allowed = band.wavelength_min() / 8.0;
        if !(h > 0.0 && h <= allowed) {
            return Err(CliError::usage(format!(
                "--max-edge {h} must be positive and at most {allowed:.5} (an eighth of the shortest wavelength)"
            )));
        }
    }
    check_writable(&args.out)?;

    let opts = SynthesisOptions {
        polarization,
        po_max_edge: args.max_edge,
    };
    let mut ds = synthesize_with(&shape, &dirs, band, method, &opts)?;
    if let Some(level) = args.noise {
        ds = add_noise_with_mode(&ds, level, args.seed, mode)?;
    }
    write_atomic(&args.out, |w| Ok(write_dataset_to(&ds, w)?))?;
    Ok(format!(
        "{} records ({} directions x {} wave numbers), method {}, band [{}, {}] -> {}",
        ds.len(),
        dirs.len(),
        band.n_k,
        method,
        band.k_min,
        band.k_max,
        args.out.display()
    ))
}

#[derive(Debug, Clone, Args)]
pub struct InvertArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// plane:<axis>=<value>:<a,b[,c,d]>:<n[,m]>, line:<origin>:<dir>:<a,b>:<n> or box:<lo>:<hi>:<n>.
    #[arg(long)]
    pub grid: String,
    /// 0, 0.5 or 1.
    #[arg(long, default_value_t = 0.5)]
    pub power: f64,
    /// Keep only the projection of every field onto this vector.
    #[arg(long)]
    pub project: Option<String>,
    /// CSV field; run metadata goes next to it with a .json extension.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct InvertSidecar<'a> {
    command: &'static str,
    version: &'static str,
    data: String,
    grid: String,
    power: f64,
    band: [f64; 3],
    directions: usize,
    method: String,
    shape: &'a str,
    polarization: &'a str,
    noise: Option<NoiseSidecar>,
    projection: Option<[f64; 3]>,
    points: usize,
    max: f64,
    argmax: Option<[f64; 3]>,
}

#[derive(Debug, Serialize)]
struct NoiseSidecar {
    level: f64,
    mode: String,
    seed: u64,
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

pub fn cmd_invert(args: &InvertArgs) -> CliResult<String> {
    check_power(args.power)?;
    let grid: SamplingGrid = parse("grid", &args.grid)?;
    let project = args.project.as_deref().map(|s| unit("project", s)).transpose()?;
    let sidecar = sidecar_path(&args.out);
    if sidecar == args.out {
        return Err(CliError::usage("--out must not end in .json; the sidecar uses that name"));
    }
    check_writable(&args.out)?;

    let mut ds = load_dataset(&args.data)?;
    if let Some(e) = project {
        ds = scalar_projection_mode(&ds, e)?;
    }
    let field = indicator(&ds, &grid, args.power)?;
    let argmax = field.argmax().map(|i| grid.point(i));
    let prov = ds.provenance();
    let meta = InvertSidecar {
        command: "invert",
        version: env!("CARGO_PKG_VERSION"),
        data: args.data.display().to_string(),
        grid: grid.to_string(),
        power: args.power,
        band: [ds.band().k_min, ds.band().k_max, ds.band().n_k as f64],
        directions: field.directions.len(),
        method: prov.method.to_string(),
        shape: &prov.shape,
        polarization: &prov.polarization,
        noise: prov.noise.map(|n| NoiseSidecar {
            level: n.level,
            mode: n.mode.to_string(),
            seed: n.seed,
        }),
        projection: project.map(|e| e.to_array()),
        points: field.values.len(),
        max: field.max(),
        argmax: argmax.map(|p| p.to_array()),
    };
    write_atomic(&args.out, |w| Ok(write_field_csv(&field, w)?))?;
    write_atomic(&sidecar, |w| {
        serde_json::to_writer_pretty(&mut *w, &meta).map_err(|e| CliError::io(&sidecar, e.into()))?;
        writeln!(w).map_err(|e| CliError::io(&sidecar, e))
    })?;
    Ok(format!(
        "{} points, {} directions, power {}, max {:.6e}{} -> {}",
        field.values.len(),
        field.directions.len(),
        args.power,
        field.max(),
        argmax.map(|p| format!(" at {p}")).unwrap_or_default(),
        args.out.display()
    ))
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Index into the dataset's incident directions, or a vector x,y,z.
    #[arg(long)]
    pub direction: String,
    #[arg(long, default_value_t = backscatter::inversion::DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Line parameter range a,b along the strip normal.
    #[arg(long, default_value = "-6,6", allow_hyphen_values = true)]
    pub extent: String,
    #[arg(long, default_value_t = 1201)]
    pub resolution: usize,
    #[arg(long, default_value = "0,0,0", allow_hyphen_values = true)]
    pub origin: String,
    /// Profile CSV.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn cmd_profile(args: &ProfileArgs) -> CliResult<String> {
    if !(args.threshold > 0.0 && args.threshold < 1.0) {
        return Err(CliError::usage(format!(
            "--threshold must lie in (0, 1), got {}",
            args.threshold
        )));
    }
    let range = match numbers("extent", &args.extent)?.as_slice() {
        [a, b] if a < b => (*a, *b),
        _ => return Err(CliError::usage(format!("--extent must be a,b with a < b, got '{}'", args.extent))),
    };
    if args.resolution < 2 {
        return Err(CliError::usage("--resolution must be at least 2"));
    }
    let origin = vec3("origin", &args.origin)?;
    let index = args.direction.trim().parse::<usize>().ok();
    let vector = match index {
        Some(_) => None,
        None => Some(unit("direction", &args.direction)?),
    };
    check_writable(&args.out)?;

    let ds = load_dataset(&args.data)?;
    let dirs = ds.directions();
    let d = match (index, vector) {
        (Some(i), _) => *dirs.get(i).ok_or_else(|| {
            CliError::usage(format!("--direction {i} out of range; the dataset has {} directions", dirs.len()))
        })?,
        (None, Some(v)) => v,
        (None, None) => unreachable!(),
    };
    let profile = profile_line(&ds, d, origin, range, args.resolution)?;
    let strip = strip_estimate(&profile, args.threshold)?;
    write_atomic(&args.out, |w| Ok(write_field_csv(&profile, w)?))?;
    Ok(format!(
        "strip along {}: [{:.6}, {:.6}] (d = {d}, threshold {}) -> {}",
        strip.normal,
        strip.lo,
        strip.hi,
        args.threshold,
        args.out.display()
    ))
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    /// Field CSV written by invert or profile; must hold a plane grid.
    #[arg(long)]
    pub field: PathBuf,
    /// Output image, .ppm or .png.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub invert_colormap: bool,
    /// Draw the boundary of this shape's cross-section in black.
    #[arg(long)]
    pub overlay_shape: Option<String>,
    /// Pixels per grid node.
    #[arg(long, default_value_t = 1)]
    pub scale: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ImageFormat {
    Ppm,
    #[cfg(feature = "png")]
    Png,
}

fn image_format(path: &Path) -> CliResult<ImageFormat> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase());
    match ext.as_deref() {
        Some("ppm") => Ok(ImageFormat::Ppm),
        #[cfg(feature = "png")]
        Some("png") => Ok(ImageFormat::Png),
        #[cfg(not(feature = "png"))]
        Some("png") => Err(CliError::usage("this build has no PNG support; write a .ppm file")),
        _ => Err(CliError::usage(format!(
            "cannot infer the image format of {}; use .ppm or .png",
            path.display()
        ))),
    }
}

pub fn cmd_render(args: &RenderArgs) -> CliResult<String> {
    let format = image_format(&args.out)?;
    let overlay = args.overlay_shape.as_deref().map(|s| parse::<Shape>("overlay-shape", s)).transpose()?;
    if args.scale == 0 || args.scale > 64 {
        return Err(CliError::usage(format!("--scale must lie in 1..=64, got {}", args.scale)));
    }
    check_writable(&args.out)?;

    let field = load_field(&args.field)?;
    let opts = RenderOptions {
        invert: args.invert_colormap,
        overlay,
        scale: args.scale,
    };
    let image = render_field(&field, &opts)?;
    write_atomic(&args.out, |w| {
        let r = match format {
            ImageFormat::Ppm => image.write_ppm(w),
            #[cfg(feature = "png")]
            ImageFormat::Png => image.write_png(w),
        };
        r.map_err(|e| CliError::io(&args.out, e))
    })?;
    Ok(format!("{}x{} image -> {}", image.width, image.height, args.out.display()))
}

//! Command line surface and the bit-exact PPM and CSV writers.
//!
//! Exit codes: 0 on success, 2 for invalid arguments (including usage
//! errors), 1 for runtime failures. The environment variable
//! `UNICRITICAL_THREADS` caps the worker pool.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::analysis::{self, RasterParams, SweepRow};
use crate::dynamics::{self, second_iterate_modulus, Angle, RealAngle, UnitCircleParam};
use crate::error::{Error, Result};
use crate::exact_angle::{self, classify_exact, in_exceptional_family, RationalAngle, Tag};
use crate::geometry::rotation_symmetry_defect;
use crate::raster::{self, RasterGrid, RasterMode, Window};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "UNICRITICAL_THREADS";

/// Smallest accepted raster side.
pub const MIN_RESOLUTION: usize = 16;

#[derive(Debug, Parser)]
#[command(name = "unicritical", version, about = "Julia sets of z^n + c with c on the unit circle")]
pub struct RunConfig {
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify one (θ, n) pair exactly.
    Classify(ClassifyArgs),
    /// Star table of connectivity for θ = p/(2q).
    Table(TableArgs),
    /// Render a filled Julia set (or its boundary) as a PGM-style P5 image.
    Render(RenderArgs),
    /// Render a Multibrot slice in logarithmic coordinates.
    Multibrot(MultibrotArgs),
    /// Hausdorff distances to the disk and circle over a list of degrees.
    Sweep(SweepArgs),
    /// Rotation-symmetry defect of an extracted Julia set.
    Symmetry(SymmetryArgs),
    /// Equidistribution statistics for an irrational angle.
    Equidist(EquidistArgs),
}

#[derive(Debug, Clone, Args)]
pub struct AngleArgs {
    /// Rational angle in turns, written a/b.
    #[arg(long, conflicts_with = "theta_real")]
    pub theta: Option<String>,
    /// Real angle in turns.
    #[arg(long = "theta-real", allow_hyphen_values = true)]
    pub theta_real: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub angle: AngleArgs,
    #[arg(long)]
    pub n: u64,
    /// Also sample the trapping-disk check at this ε.
    #[arg(long = "trap-epsilon")]
    pub trap_epsilon: Option<f64>,
    /// Sample count for the trapping-disk check.
    #[arg(long = "trap-samples", default_value_t = 10_000)]
    pub trap_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Csv,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Denominator of 2θ.
    #[arg(long)]
    pub q: u64,
    /// Degree range a..b.
    #[arg(long)]
    pub n: String,
    /// Numerator range a..b.
    #[arg(long)]
    pub p: String,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    pub format: TableFormat,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RenderMode {
    /// Pixel-center escape time.
    Filled,
    /// Footprint propagation, for dust-like sets.
    Footprint,
    /// Boundary pixels of the filled set.
    Boundary,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub angle: AngleArgs,
    /// Arbitrary parameter `re,im` instead of an angle on the unit circle.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["theta", "theta_real"])]
    pub c: Option<String>,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 512)]
    pub resolution: usize,
    #[arg(long = "half-width", default_value_t = raster::DEFAULT_HALF_WIDTH)]
    pub half_width: f64,
    #[arg(long = "max-iter", default_value_t = raster::DEFAULT_RASTER_MAX_ITER)]
    pub max_iter: u32,
    /// Escape radius; defaults to max(2, |c| + 1).
    #[arg(long = "escape-radius")]
    pub escape_radius: Option<f64>,
    #[arg(long, value_enum, default_value_t = RenderMode::Filled)]
    pub mode: RenderMode,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct MultibrotArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 512)]
    pub width: usize,
    #[arg(long, default_value_t = 256)]
    pub height: usize,
    #[arg(long = "re-min", default_value_t = -1.0, allow_hyphen_values = true)]
    pub re_min: f64,
    #[arg(long = "re-max", default_value_t = 1.0, allow_hyphen_values = true)]
    pub re_max: f64,
    #[arg(long = "im-min", default_value_t = -0.15, allow_hyphen_values = true)]
    pub im_min: f64,
    #[arg(long = "im-max", default_value_t = 0.15, allow_hyphen_values = true)]
    pub im_max: f64,
    #[arg(long = "max-iter", default_value_t = raster::DEFAULT_RASTER_MAX_ITER)]
    pub max_iter: u32,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Rational angle a/b.
    #[arg(long)]
    pub theta: String,
    /// Degrees: a..b ranges and single values, comma separated.
    #[arg(long)]
    pub n: String,
    #[arg(long, default_value_t = 512)]
    pub resolution: usize,
    #[arg(long = "max-iter", default_value_t = raster::DEFAULT_RASTER_MAX_ITER)]
    pub max_iter: u32,
    #[arg(long = "circle-samples", default_value_t = 4096)]
    pub circle_samples: usize,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SymmetryArgs {
    #[command(flatten)]
    pub angle: AngleArgs,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 1024)]
    pub resolution: usize,
    #[arg(long = "max-iter", default_value_t = raster::DEFAULT_RASTER_MAX_ITER)]
    pub max_iter: u32,
}

#[derive(Debug, Args)]
pub struct EquidistArgs {
    /// Real angle in turns.
    #[arg(long = "theta-real", conflicts_with = "cf", allow_hyphen_values = true)]
    pub theta_real: Option<f64>,
    /// Continued fraction terms, comma separated; `a*k` repeats a term.
    #[arg(long)]
    pub cf: Option<String>,
    /// Number of degrees n = 1..=N.
    #[arg(long = "N", default_value_t = 100_000)]
    pub samples: u64,
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    /// Library errors that reject a parameter value are usage errors.
    fn from(e: Error) -> Self {
        match e {
            Error::ZeroDenominator
            | Error::DegreeTooSmall(_)
            | Error::InvalidWindow(_)
            | Error::UnsafeEscapeRadius { .. }
            | Error::EpsilonTooLarge { .. } => Failure::Usage(e.to_string()),
            e => Failure::Runtime(e),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Usage(msg.into()))
}

/// Runs the command line with process standard streams.
pub fn run(argv: &[String]) -> i32 {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(argv, &mut out, &mut err);
    let _ = std::io::stdout().write_all(&out);
    let _ = std::io::stderr().write_all(&err);
    code
}

/// Runs the command line writing to the given streams.
pub fn run_with(argv: &[String], out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32 {
    let config = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    2
                }
            };
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    match pool.install(|| dispatch(&config, out, err)) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Runtime(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn thread_pool() -> std::result::Result<rayon::ThreadPool, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let threads: usize = value
            .trim()
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {value:?}"))?;
        builder = builder.num_threads(threads);
    }
    builder.build().map_err(|e| e.to_string())
}

fn dispatch(config: &RunConfig, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> CliResult<()> {
    match &config.command {
        Command::Classify(a) => classify(a, config.seed, out, err),
        Command::Table(a) => table(a, out),
        Command::Render(a) => render(a),
        Command::Multibrot(a) => multibrot(a),
        Command::Sweep(a) => sweep(a, out, err),
        Command::Symmetry(a) => symmetry(a, out),
        Command::Equidist(a) => equidist(a, out),
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

fn write_stdout(out: &mut (dyn Write + Send), text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes()).map_err(|e| Failure::Runtime(io_error(Path::new("<stdout>"), e)))
}

fn check_degree(n: u64) -> CliResult<()> {
    if n < 2 {
        return usage(format!("--n must be at least 2, got {n}"));
    }
    Ok(())
}

fn check_resolution(name: &str, r: usize) -> CliResult<()> {
    if r < MIN_RESOLUTION {
        return usage(format!("{name} must be at least {MIN_RESOLUTION}, got {r}"));
    }
    Ok(())
}

fn check_max_iter(m: u32) -> CliResult<()> {
    if m == 0 {
        return usage("--max-iter must be at least 1");
    }
    Ok(())
}

fn parse_rational(text: &str) -> CliResult<RationalAngle> {
    text.parse().map_err(|e: Error| Failure::Usage(format!("invalid angle {text:?}: {e}")))
}

fn parse_angle(args: &AngleArgs) -> CliResult<Angle> {
    match (&args.theta, args.theta_real) {
        (Some(t), None) => Ok(Angle::Rational(parse_rational(t)?)),
        (None, Some(x)) => RealAngle::from_f64(x).map(Angle::Real).map_err(|e| Failure::Usage(e.to_string())),
        _ => usage("exactly one of --theta or --theta-real is required"),
    }
}

/// Parses `a..b` (inclusive) or a single value.
pub fn parse_range(text: &str) -> Result<(u64, u64)> {
    let bad = || Error::InvalidArgument(format!("invalid range {text:?}, expected a..b"));
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let v = text.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Parses a comma separated list of values and `a..b` ranges.
pub fn parse_degree_list(text: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in text.split(',').filter(|p| !p.trim().is_empty()) {
        let (lo, hi) = parse_range(part)?;
        if hi - lo > 1_000_000 {
            return Err(Error::InvalidArgument(format!("range {part:?} is too long")));
        }
        out.extend(lo..=hi);
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument("empty degree list".into()));
    }
    Ok(out)
}

/// Parses continued fraction terms such as `1,2*60`.
pub fn parse_continued_fraction(text: &str) -> Result<Vec<u64>> {
    let bad = |part: &str| Error::InvalidArgument(format!("invalid continued fraction term {part:?}"));
    let mut terms = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('*') {
            Some((a, k)) => {
                let a: u64 = a.trim().parse().map_err(|_| bad(part))?;
                let k: usize = k.trim().parse().map_err(|_| bad(part))?;
                if k > 10_000 {
                    return Err(bad(part));
                }
                terms.extend(std::iter::repeat_n(a, k));
            }
            None => terms.push(part.parse().map_err(|_| bad(part))?),
        }
    }
    Ok(terms)
}

fn classify(args: &ClassifyArgs, seed: u64, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> CliResult<()> {
    let angle = parse_angle(&args.angle)?;
    check_degree(args.n)?;
    if let Some(eps) = args.trap_epsilon {
        if !(eps > 0.0 && eps < 1.0) {
            return usage(format!("--trap-epsilon must lie in (0, 1), got {eps}"));
        }
    }
    let mut text = match angle {
        Angle::Rational(theta) => {
            if theta.is_zero() {
                let _ = writeln!(err, "warning: θ = 0 (c = 1) is excluded by the theorem; no limit claim applies");
            } else if let Some(w) = in_exceptional_family(theta) {
                let _ = writeln!(
                    err,
                    "warning: θ = {theta} is an exceptional angle (p={} q={}); no limit claim applies",
                    w.p, w.q
                );
            }
            classification_line(theta, args.n)?
        }
        Angle::Real(theta) => {
            let f = theta.rotate(args.n - 1);
            let r = second_iterate_modulus(&angle, args.n);
            let tag = if 3.0 * f > 1.0 && 3.0 * f < 2.0 { Tag::Connected } else { Tag::Disconnected };
            format!("{tag} r_n={r} f={f}")
        }
    };
    text.push('\n');
    if let Some(eps) = args.trap_epsilon {
        let report = dynamics::verify_trap(&angle, args.n, eps, args.trap_samples, seed)?;
        text.push_str(&format!(
            "trap regime={:?} radius_ok={} worst={} alternate_radius={} alternate_ok={} samples={}\n",
            report.regime,
            report.invariant_holds,
            report.worst_modulus,
            report.alternate_radius,
            report.alternate_holds,
            report.samples
        ));
    }
    write_stdout(out, &text)
}

/// The one-line classification report printed by `classify`.
pub fn classification_line(theta: RationalAngle, n: u64) -> Result<String> {
    let c = classify_exact(theta, n)?;
    let f = c.fractional_part;
    Ok(match c.tag {
        Tag::OnCircleFixed => {
            let w = c.witness.expect("fixed on-circle cases carry a witness");
            format!("OnCircleFixed f={f} exceptional p={} q={}", w.p, w.q)
        }
        Tag::OnCircleTransient => {
            let verdict = if c.numerically_bounded == Some(true) { "bounded" } else { "escapes" };
            format!("OnCircleTransient f={f} orbit={verdict}")
        }
        tag => {
            let r = second_iterate_modulus(&Angle::Rational(theta), n);
            format!("{tag} r_n={r} f={f}")
        }
    })
}

fn table(args: &TableArgs, out: &mut (dyn Write + Send)) -> CliResult<()> {
    if args.q == 0 {
        return usage("--q must be positive");
    }
    let (n_lo, n_hi) = parse_range(&args.n).map_err(|e| Failure::Usage(e.to_string()))?;
    let (p_lo, p_hi) = parse_range(&args.p).map_err(|e| Failure::Usage(e.to_string()))?;
    check_degree(n_lo)?;
    let table = analysis::star_table(args.q, p_lo..=p_hi, n_lo..=n_hi)?;
    let text = match args.format {
        TableFormat::Text => table.to_text(),
        TableFormat::Csv => table.to_csv(),
    };
    match &args.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Runtime(io_error(path, e))),
        None => write_stdout(out, &text),
    }
}

/// Parses a complex number written `re,im`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let bad = || Error::InvalidArgument(format!("invalid complex number {text:?}, expected re,im"));
    let (re, im) = text.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn render(args: &RenderArgs) -> CliResult<()> {
    let c = match &args.c {
        Some(text) => parse_complex(text).map_err(|e| Failure::Usage(e.to_string()))?,
        None => UnitCircleParam::new(parse_angle(&args.angle)?).c(),
    };
    check_degree(args.n)?;
    check_resolution("--resolution", args.resolution)?;
    check_max_iter(args.max_iter)?;
    if !(args.half_width > 0.0) {
        return usage("--half-width must be positive");
    }
    let window = Window::square(args.half_width, args.resolution).map_err(|e| Failure::Usage(e.to_string()))?;
    let radius = args.escape_radius.unwrap_or_else(|| dynamics::default_escape_radius(c));
    let grid = match args.mode {
        RenderMode::Footprint => raster::footprint_julia_grid(args.n, c, &window, args.max_iter)?,
        RenderMode::Filled => raster::filled_julia_grid(args.n, c, &window, args.max_iter, radius)?,
        RenderMode::Boundary => {
            let filled = raster::filled_julia_grid(args.n, c, &window, args.max_iter, radius)?;
            let mask = raster::boundary_mask(&filled)?;
            RasterGrid::from_mask(window, args.max_iter, mask)?
        }
    };
    emit_ppm(&grid, &args.output)?;
    Ok(())
}

fn multibrot(args: &MultibrotArgs) -> CliResult<()> {
    check_degree(args.n)?;
    check_resolution("--width", args.width)?;
    check_resolution("--height", args.height)?;
    check_max_iter(args.max_iter)?;
    let window = Window::new(args.re_min, args.re_max, args.im_min, args.im_max, args.width, args.height)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let grid = raster::multibrot_log_slice(args.n, &window, args.max_iter)?;
    emit_ppm(&grid, &args.output)?;
    Ok(())
}

fn sweep(args: &SweepArgs, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> CliResult<()> {
    let theta = parse_rational(&args.theta)?;
    let ns = parse_degree_list(&args.n).map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(&n) = ns.iter().min() {
        check_degree(n)?;
    }
    check_resolution("--resolution", args.resolution)?;
    check_max_iter(args.max_iter)?;
    if args.circle_samples < 8 {
        return usage("--circle-samples must be at least 8");
    }
    let params = RasterParams {
        resolution: args.resolution,
        max_iter: args.max_iter,
        circle_samples: args.circle_samples,
        ..RasterParams::default()
    };
    let rows = analysis::convergence_sweep(theta, &ns, &params)?;
    if rows.first().is_some_and(|r| r.excluded_by_theorem) {
        let _ = writeln!(err, "warning: θ = {theta} is excluded by the theorem; rows are reported without a limit claim");
    }
    match &args.output {
        Some(path) => emit_csv(&rows, path)?,
        None => write_stdout(out, &csv_string(&rows))?,
    }
    Ok(())
}

fn symmetry(args: &SymmetryArgs, out: &mut (dyn Write + Send)) -> CliResult<()> {
    let angle = parse_angle(&args.angle)?;
    check_degree(args.n)?;
    check_resolution("--resolution", args.resolution)?;
    check_max_iter(args.max_iter)?;
    let window = Window::default_square(args.resolution)?;
    let c = UnitCircleParam::new(angle).c();
    let radius = dynamics::tight_escape_radius(args.n, c.norm());
    let mut grid = raster::filled_julia_grid(args.n, c, &window, args.max_iter, radius)?;
    if !grid.has_interior() {
        grid = raster::footprint_julia_grid(args.n, c, &window, args.max_iter)?;
    }
    let cloud = raster::boundary_extract(&grid)?;
    let defect = rotation_symmetry_defect(&cloud, args.n)?;
    let diag = window.pixel_diagonal();
    let mode = match grid.mode() {
        RasterMode::Center => "center",
        RasterMode::Footprint => "footprint",
    };
    let text = format!(
        "defect={defect} pixel_diagonal={diag} ratio={} points={} mode={mode}\n",
        defect / diag,
        cloud.len()
    );
    write_stdout(out, &text)
}

fn equidist(args: &EquidistArgs, out: &mut (dyn Write + Send)) -> CliResult<()> {
    let theta = match (args.theta_real, &args.cf) {
        (Some(x), None) => RealAngle::from_f64(x).map_err(|e| Failure::Usage(e.to_string()))?,
        (None, Some(cf)) => {
            let terms = parse_continued_fraction(cf).map_err(|e| Failure::Usage(e.to_string()))?;
            RealAngle::from_continued_fraction(&terms).map_err(|e| Failure::Usage(e.to_string()))?
        }
        _ => return usage("exactly one of --theta-real or --cf is required"),
    };
    if args.samples < 1_000 {
        return usage(format!("--N must be at least 1000, got {}", args.samples));
    }
    let stats = analysis::equidistribution_stats(&theta, args.samples)?;
    let rational = match stats.rational_like {
        Some((p, q)) => format!("{p}/{q}"),
        None => "none".into(),
    };
    let text = format!(
        "theta={} N={} connected_fraction={} sup_cdf_gap={} rational_like={rational} reduction_error={:e}\n",
        theta.value(),
        stats.samples,
        stats.connected_fraction,
        stats.sup_cdf_gap,
        stats.reduction_error
    );
    write_stdout(out, &text)
}

/// P5 bytes: header `P5\n<w> <h>\n255\n`, then one byte per pixel, top row
/// first; bounded pixels are 0 and escaped pixels 255.
pub fn ppm_bytes(grid: &RasterGrid) -> Vec<u8> {
    let w = grid.window();
    let mut bytes = format!("P5\n{} {}\n255\n", w.width(), w.height()).into_bytes();
    bytes.extend(grid.bounded().iter().map(|&b| if b { 0u8 } else { 255u8 }));
    bytes
}

pub fn emit_ppm(grid: &RasterGrid, path: &Path) -> Result<()> {
    fs::write(path, ppm_bytes(grid)).map_err(|e| io_error(path, e))
}

pub const CSV_HEADER: &str = "n,classification,r_n,dist_to_circle,dist_to_disk";

/// Plain decimal with 12 significant digits, no exponent.
pub fn format_sig12(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|ch| *ch != '.').collect();
    let body = if exp >= 11 {
        format!("{digits}{}", "0".repeat((exp - 11) as usize))
    } else if exp >= 0 {
        let point = (exp + 1) as usize;
        format!("{}.{}", &digits[..point], &digits[point..])
    } else {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    };
    format!("{sign}{body}")
}

/// The sweep CSV as a string.
pub fn csv_string(rows: &[SweepRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n,
            r.classification,
            format_sig12(r.r_n),
            format_sig12(r.dist_to_circle),
            format_sig12(r.dist_to_disk)
        ));
    }
    s
}

pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    fs::write(path, csv_string(rows)).map_err(|e| io_error(path, e))
}

/// Parses a sweep CSV. Columns not stored in the file take their defaults:
/// `excluded_by_theorem = false`, `mode = Center`.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::InvalidArgument("missing sweep CSV header".into()));
    }
    lines
        .map(|line| {
            let bad = || Error::InvalidArgument(format!("malformed CSV row {line:?}"));
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(bad());
            }
            let real = |s: &str| s.parse::<f64>().map_err(|_| bad());
            Ok(SweepRow {
                n: fields[0].parse().map_err(|_| bad())?,
                classification: fields[1].parse::<exact_angle::Tag>()?,
                r_n: real(fields[2])?,
                dist_to_circle: real(fields[3])?,
                dist_to_disk: real(fields[4])?,
                excluded_by_theorem: false,
                mode: RasterMode::Center,
            })
        })
        .collect()
}

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lp_lab::carleson::{cm_norm, jn_profile, CarlesonFunctional};
use lp_lab::decompose::{double_overlap_max, double_overlap_profile_1d, lattice_points_near, rect_uncovered_fraction, well_collection};
use lp_lab::geometry::{Direction, Frame, Parallelepiped, Region};
use lp_lab::lab::{
    emit, emit_to, norm_ratio_run, sector_lower_bound_check, sharpness_reports, sharpness_run, AnnulusWidth, Defaults,
    NormRatioReport, PassBand, ScalingReport, SharpnessMetric, SharpnessSetup,
};
use lp_lab::operators::{maximal, sharp_restrict, smooth_convolve, square_function, MaximalSpec, MultiplierProfile};
use lp_lab::tiles::{coefficients, sf_square_function, size, size_decompose, tiles_for_family, CoefficientTable};
use lp_lab::{GridFunction, GridSpec, LabError, Result};

#[derive(Parser)]
#[command(name = "lp-lab", version, about = "Directional square function laboratory")]
struct Cli {
    /// Seed for randomized experiments.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Grid as `n,L`.
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<(usize, f64)>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON overriding the bundled defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fourier restriction `S_ω f` to one member of a family.
    Restrict(RestrictArgs),
    /// Square function `S^Ω f`.
    Sqfn(SqfnArgs),
    /// Directional maximal function.
    Maximal(MaximalArgs),
    /// Well-distributed refinement of a family.
    WellDistribute(WellArgs),
    /// Tile coefficient table of a function.
    Tiles(TilesArgs),
    /// Space–frequency square function of a table.
    Sf(TableArgs),
    /// Size decomposition of a table.
    Decompose(DecomposeArgs),
    /// Carleson functional tools.
    #[command(subcommand)]
    Carleson(CarlesonCommand),
    /// Sector square function scaling experiment.
    Sharpness(SharpnessArgs),
    /// Empirical operator norm ratios.
    NormRatio(NormRatioArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Sharp,
    Smooth,
}

impl Profile {
    fn get(self) -> MultiplierProfile {
        match self {
            Profile::Sharp => MultiplierProfile::sharp(),
            Profile::Smooth => MultiplierProfile::smooth(),
        }
    }
}

#[derive(Args)]
struct RestrictArgs {
    #[arg(long)]
    omega: PathBuf,
    /// Member of the family to restrict to.
    #[arg(long, default_value_t = 0)]
    index: usize,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "sharp")]
    profile: Profile,
}

#[derive(Args)]
struct SqfnArgs {
    #[arg(long)]
    omega: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "sharp")]
    profile: Profile,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Segment,
    Rect,
}

#[derive(Args)]
struct MaximalArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "segment")]
    mode: Mode,
    /// JSON array of direction vectors.
    #[arg(long)]
    directions: PathBuf,
    /// Segment half-lengths.
    #[arg(long, value_delimiter = ',', required = true)]
    lengths: Vec<f64>,
    /// Rect thickness in rect mode; one grid step when absent.
    #[arg(long)]
    thickness: Option<f64>,
}

#[derive(Args)]
struct WellArgs {
    #[arg(long)]
    omega: PathBuf,
    #[arg(long, default_value_t = 24)]
    kmax: usize,
}

#[derive(Args)]
struct TilesArgs {
    #[arg(long)]
    omega: PathBuf,
    /// Spatial window `x0,x1[,y0,y1]`.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    window: Vec<f64>,
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    table: PathBuf,
    /// Family the table's `ω` ids refer to.
    #[arg(long)]
    omega: PathBuf,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    table: TableArgs,
    /// Size bound, or `auto` for the size of the whole table times the
    /// configured factor.
    #[arg(long, default_value = "auto")]
    mu: String,
    /// Input function, for the shadow constant.
    #[arg(long = "in")]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CarlesonCommand {
    /// Estimate of the CM norm.
    CmNorm(LambdaArgs),
    /// John–Nirenberg profile `‖F_U‖_q / |U|^{1/q}`.
    Jn(JnArgs),
}

#[derive(Args)]
struct LambdaArgs {
    #[arg(long)]
    lambda: PathBuf,
    /// JSON array of frames; the standard frame when absent.
    #[arg(long)]
    frames: Option<PathBuf>,
    /// Window parallelepiped bounding dyadic ancestors.
    #[arg(long)]
    window: Option<PathBuf>,
    /// Sampling spacing for measures across frames.
    #[arg(long)]
    spacing: Option<f64>,
}

#[derive(Args)]
struct JnArgs {
    #[command(flatten)]
    lambda: LambdaArgs,
    #[arg(long = "U")]
    u: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    q: Vec<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WidthArg {
    Fixed,
    InverseN,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    NormSq,
    ReverseRatio,
}

#[derive(Args)]
struct SharpnessArgs {
    #[arg(long = "n-list", value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    #[arg(long = "q-list", value_delimiter = ',')]
    q_list: Option<Vec<f64>>,
    #[arg(long = "width-mode", value_enum)]
    width_mode: Option<WidthArg>,
    #[arg(long, value_enum)]
    metric: Option<MetricArg>,
    /// Also report the pointwise sector lower bound.
    #[arg(long = "sector-bound")]
    sector_bound: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    /// The `c` dyadic intervals `[2^k, 2^{k+1})` just below the Nyquist
    /// frequency, for each count `c`.
    Lacunary,
    /// A family from `--omega`.
    File,
}

#[derive(Args)]
struct NormRatioArgs {
    #[arg(long, value_enum, default_value = "lacunary")]
    family: FamilyArg,
    #[arg(long)]
    omega: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "4,8")]
    counts: Vec<usize>,
    #[arg(long, default_value_t = 4.0)]
    q: f64,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 24)]
    kmax: usize,
}

fn parse_grid(s: &str) -> std::result::Result<(usize, f64), String> {
    let (n, l) = s.split_once(',').ok_or("expected n,L")?;
    Ok((n.trim().parse().map_err(|e| format!("{e}"))?, l.trim().parse().map_err(|e| format!("{e}"))?))
}

#[derive(Debug)]
enum Outcome {
    Pass,
    Fail,
}

fn read_family(path: &Path) -> Result<Vec<Parallelepiped>> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn read_one(path: &Path) -> Result<Parallelepiped> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn grid_for(cli: &Cli, d: usize) -> Result<GridSpec> {
    let (n, l) = cli.grid.ok_or_else(|| LabError::Parameter("--grid n,L is required".into()))?;
    GridSpec::new(d, n, l)
}

fn write_text(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_grid(out: &Option<PathBuf>, g: &GridFunction) -> Result<()> {
    write_text(out, &g.to_lpgrid())
}

fn write_reports(out: &Option<PathBuf>, reports: &[ScalingReport]) -> Result<Outcome> {
    let pass = match out {
        Some(p) => emit(reports, p)?,
        None => emit_to(reports, std::io::stdout().lock())?,
    };
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

fn load_lambda(args: &LambdaArgs) -> Result<CarlesonFunctional> {
    let text = std::fs::read_to_string(&args.lambda)?;
    let frames: Vec<Frame> = match &args.frames {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
        None => {
            let fields = text
                .lines()
                .find(|l| !l.trim().is_empty() && !l.trim_start().starts_with("frame"))
                .map_or(4, |l| l.split(',').count());
            vec![Frame::standard(if fields == 6 { 2 } else { 1 })]
        }
    };
    CarlesonFunctional::read_csv(text.as_bytes(), &frames)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let defaults = Defaults::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Restrict(a) => {
            let f = GridFunction::read_lpgrid(&a.input)?;
            let omegas = read_family(&a.omega)?;
            let w = omegas.get(a.index).ok_or_else(|| LabError::Parameter(format!("no member {} in the family", a.index)))?;
            let g = match a.profile {
                Profile::Sharp => sharp_restrict(&f, w)?,
                Profile::Smooth => smooth_convolve(&f, w, a.profile.get())?,
            };
            write_grid(&cli.out, &g)?;
        }
        Command::Sqfn(a) => {
            let f = GridFunction::read_lpgrid(&a.input)?;
            let g = square_function(&f, &read_family(&a.omega)?, a.profile.get())?;
            write_grid(&cli.out, &g)?;
        }
        Command::Maximal(a) => {
            let f = GridFunction::read_lpgrid(&a.input)?;
            let raw: Vec<Vec<f64>> = serde_json::from_str(&std::fs::read_to_string(&a.directions)?)?;
            let dirs = raw.iter().map(|v| Direction::normalized(v)).collect::<Result<Vec<_>>>()?;
            let spec = match a.mode {
                Mode::Segment => MaximalSpec::segment(dirs, a.lengths.clone())?,
                Mode::Rect => MaximalSpec::rect_from_segments(dirs, &a.lengths, a.thickness.unwrap_or(f.spec().spacing()))?,
            };
            write_grid(&cli.out, &maximal(&f, &spec)?)?;
        }
        Command::WellDistribute(a) => {
            let omegas = read_family(&a.omega)?;
            let well = well_collection(&omegas, a.kmax)?;
            for w in &well.warnings {
                eprintln!("warning: {w}");
            }
            let overlap = match omegas.first().map(|w| w.dim()) {
                None => 0,
                Some(1) => {
                    let (lo, hi) = well.rects.iter().map(|r| r.doubled().bounding_box()[0]).fold(
                        (f64::INFINITY, f64::NEG_INFINITY),
                        |(lo, hi), (a, b)| (lo.min(a), hi.max(b)),
                    );
                    double_overlap_profile_1d(&well.rects, lo, hi, 1 << 16)?.into_iter().max().unwrap_or(0) as usize
                }
                Some(_) => {
                    let side = omegas.iter().flat_map(|w| w.sides().iter().map(|s| s.length())).fold(f64::INFINITY, f64::min);
                    double_overlap_max(&well.rects, &lattice_points_near(&well.rects, side / 64.0)).0
                }
            };
            let d = omegas.first().map_or(1, |w| w.dim());
            let deficit = num_traits::ToPrimitive::to_f64(&rect_uncovered_fraction(d, a.kmax)).unwrap_or(f64::NAN);
            write_text(&cli.out, &(serde_json::to_string(&well.rects)? + "\n"))?;
            println!("overlap_max={overlap} deficit={deficit}");
        }
        Command::Tiles(a) => {
            let f = GridFunction::read_lpgrid(&a.input)?;
            let omegas = read_family(&a.omega)?;
            let d = f.spec().dim();
            if a.window.len() != 2 * d {
                return Err(LabError::Parameter(format!("--window needs {} numbers", 2 * d)));
            }
            let bounds: Vec<(f64, f64)> = a.window.chunks(2).map(|c| (c[0], c[1])).collect();
            let window = Region::Box(Parallelepiped::axis_aligned(&bounds)?);
            let table = coefficients(&f, &tiles_for_family(&omegas, &window)?)?;
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            write_text(&cli.out, &String::from_utf8_lossy(&buf))?;
        }
        Command::Sf(a) => {
            let table = load_table(cli, a)?;
            write_grid(&cli.out, &sf_square_function(&table)?)?;
        }
        Command::Decompose(a) => {
            let table = load_table(cli, &a.table)?;
            let mu = match a.mu.as_str() {
                "auto" => size(&table)?.value * defaults.tiles.mu_factor,
                s => s.parse().map_err(|_| LabError::Parameter(format!("bad --mu {s:?}")))?,
            };
            let dec = size_decompose(&table, mu)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["k", "tiles", "mass", "shadow", "size", "threshold"])?;
            for l in &dec.levels {
                w.write_record([
                    l.k.to_string(),
                    l.tiles.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" "),
                    l.mass.to_string(),
                    l.shadow.to_string(),
                    l.size.to_string(),
                    l.threshold(mu).to_string(),
                ])?;
            }
            let nulls = dec.null_tiles.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ");
            w.write_record(["null", nulls.as_str(), "0", "", "", ""])?;
            let text = String::from_utf8(w.into_inner().map_err(|e| LabError::Io(e.into_error()))?)
                .map_err(|e| LabError::Parse(e.to_string()))?;
            write_text(&cli.out, &text)?;
            let holds = dec.levels.iter().all(|l| l.extractions.iter().all(|e| e.mass >= l.threshold(mu) * e.shadow));
            eprintln!("mu={mu} levels={} size_constant={}", dec.levels.len(), dec.size_constant);
            let mut pass = holds;
            if let Some(p) = &a.input {
                let energy = GridFunction::read_lpgrid(p)?.lq_norm(2.0)?.powi(2);
                let c = dec.shadow_constant(energy);
                eprintln!("shadow_constant={c} bound={}", defaults.tiles.shadow_constant);
                pass &= c <= defaults.tiles.shadow_constant;
            }
            return Ok(if pass { Outcome::Pass } else { Outcome::Fail });
        }
        Command::Carleson(CarlesonCommand::CmNorm(a)) => {
            let lambda = load_lambda(a)?;
            let window = a.window.as_deref().map(read_one).transpose()?;
            let est = cm_norm(&lambda, window.as_ref(), a.spacing)?;
            write_text(
                &cli.out,
                &format!(
                    "cm_norm={} lower_bound={} family={:?} witness={:?}\n",
                    est.value, est.lower_bound, est.family, est.witness
                ),
            )?;
        }
        Command::Carleson(CarlesonCommand::Jn(a)) => {
            let lambda = load_lambda(&a.lambda)?;
            let u = read_one(&a.u)?;
            let spec = grid_for(cli, u.dim())?;
            let window = a.lambda.window.as_deref().map(read_one).transpose()?;
            let cm = cm_norm(&lambda, window.as_ref(), a.lambda.spacing)?.value;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["q", "entry", "cm_norm", "ratio", "constant", "pass"])?;
            let mut pass = true;
            for (q, v) in jn_profile(&lambda, &u, &spec, &a.q)? {
                let ratio = if cm > 0.0 { v / cm } else { 0.0 };
                let c = defaults.jn_constant(q);
                let ok = c.is_none_or(|c| ratio <= c);
                pass &= ok;
                w.write_record([
                    q.to_string(),
                    v.to_string(),
                    cm.to_string(),
                    ratio.to_string(),
                    c.map_or(String::new(), |c| c.to_string()),
                    ok.to_string(),
                ])?;
            }
            let text = String::from_utf8(w.into_inner().map_err(|e| LabError::Io(e.into_error()))?)
                .map_err(|e| LabError::Parse(e.to_string()))?;
            write_text(&cli.out, &text)?;
            return Ok(if pass { Outcome::Pass } else { Outcome::Fail });
        }
        Command::Sharpness(a) => {
            let mut d = defaults.sharpness.clone();
            if let Some((n, l)) = cli.grid {
                d.grid_n = n;
                d.grid_period = l;
            }
            if let Some(v) = &a.n_list {
                d.n_list = v.clone();
            }
            if let Some(v) = &a.q_list {
                d.q_list = v.clone();
            }
            if let Some(m) = a.width_mode {
                d.width_mode = match m {
                    WidthArg::Fixed => AnnulusWidth::Fixed,
                    WidthArg::InverseN => AnnulusWidth::InverseN,
                };
            }
            if let Some(m) = a.metric {
                d.metric = match m {
                    MetricArg::NormSq => SharpnessMetric::NormSq,
                    MetricArg::ReverseRatio => SharpnessMetric::ReverseRatio,
                };
            }
            let setup = SharpnessSetup::from_defaults(&d)?;
            let rows = sharpness_run(&setup, &d.n_list, &d.q_list)?;
            let mut reports = sharpness_reports(&rows, d.metric, d.slope_tolerance, d.log_regime_max_ratio);
            if a.sector_bound {
                let mut pts = Vec::new();
                for &n in &d.n_list {
                    let b = sector_lower_bound_check(&setup, n)?;
                    if b.symmetry_defect > defaults.sector_lower_bound.symmetry_tolerance {
                        eprintln!("sector bound for N={n}: quarter-turn defect {}", b.symmetry_defect);
                        return Ok(Outcome::Fail);
                    }
                    pts.push((n as f64, b.value));
                }
                let band = PassBand::Drift { max: defaults.sector_lower_bound.max_drift };
                reports.push(ScalingReport::new("sector_lower_bound", "N", pts, band));
            }
            return write_reports(&cli.out, &reports);
        }
        Command::NormRatio(a) => {
            let trials = a.trials.unwrap_or(defaults.norm_ratio.trials);
            let band = |q: f64| {
                if q == 2.0 {
                    PassBand::AtMost { max: 1.0 + defaults.norm_ratio.l2_contraction_slack }
                } else {
                    PassBand::Drift { max: defaults.norm_ratio.max_drift }
                }
            };
            let report = match a.family {
                FamilyArg::Lacunary => {
                    let spec = match cli.grid {
                        Some((n, l)) => GridSpec::new(1, n, l)?,
                        None => GridSpec::new(1, 1024, 1.0)?,
                    };
                    let top = spec.nyquist().log2().floor() as i32;
                    let mut points = Vec::new();
                    for &c in &a.counts {
                        if c == 0 || c as i32 > top + 30 {
                            return Err(LabError::Parameter(format!("interval count {c} is out of range")));
                        }
                        let omegas = (top - c as i32..top)
                            .map(|k| Parallelepiped::axis_aligned(&[(2f64.powi(k), 2f64.powi(k + 1))]))
                            .collect::<Result<Vec<_>>>()?;
                        if let Some(r) = norm_ratio_run(&omegas, a.q, trials, &spec, cli.seed, a.kmax)? {
                            points.push((c as f64, r));
                        }
                    }
                    NormRatioReport { param_name: "intervals".into(), q: a.q, points }
                }
                FamilyArg::File => {
                    let path = a.omega.as_ref().ok_or_else(|| LabError::Parameter("--omega is required".into()))?;
                    let omegas = read_family(path)?;
                    let d = omegas.first().map_or(1, |w| w.dim());
                    let spec = grid_for(cli, d)?;
                    let points = norm_ratio_run(&omegas, a.q, trials, &spec, cli.seed, a.kmax)?
                        .map(|r| vec![(omegas.len() as f64, r)])
                        .unwrap_or_default();
                    NormRatioReport { param_name: "members".into(), q: a.q, points }
                }
            };
            return write_reports(&cli.out, &report.reports(band(a.q)));
        }
    }
    Ok(Outcome::Pass)
}

fn load_table(cli: &Cli, a: &TableArgs) -> Result<CoefficientTable> {
    let omegas = read_family(&a.omega)?;
    let d = omegas.first().map_or(1, |w| w.dim());
    let spec = grid_for(cli, d)?;
    CoefficientTable::read_csv(std::fs::File::open(&a.table)?, &omegas, spec)
}

fn exit_code(e: &LabError) -> u8 {
    match e {
        LabError::Io(_) | LabError::Csv(_) | LabError::Json(_) | LabError::Parse(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("LP_LAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

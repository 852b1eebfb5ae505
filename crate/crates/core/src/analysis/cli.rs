//! Command-line front end of `timedata-lab`.
//!
//! Exit status is 0 on success, 1 when a model rejects its inputs and 2 for
//! usage errors (unknown subcommand or flag, missing config, malformed list).

use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use super::{build_sheet, emit_csv, parse_csv, write_csv, write_radar_chart, LabConfig, Sheet};
use crate::geomlink::{self, ArcDecomposition, Box3, PlanarMotion, Point2, Rect};
use crate::linkmodel::{self, AmplitudeOverlap, Target, Timestamp};
use crate::memtiming::{self, Carrier, CellMap, ChargeSign, ElectrodeGeometry, QubitState};
use crate::optics::{self, FaradayCell, FiberSpec, IsolationShell, Refraction};
use crate::ptvda::{self, KeyPattern, ProbeConfig, SortInstance};
use crate::relativity::{self, ChargeLedger, PolarPoint, Velocity};
use crate::units::Quantity;

#[derive(Debug, Parser)]
#[command(
    name = "timedata-lab",
    version,
    about = "Comlink latency, memory timing, optics and relativity calculators",
    arg_required_else_help = true
)]
struct Cli {
    /// INI file with [target.<name>] sections and an optional [defaults] section
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Light-travel latency and frequency resolution of a link
    #[command(subcommand)]
    Link(LinkCmd),
    /// Fiber V-number, refraction, Faraday rotation, isolation shell
    #[command(subcommand)]
    Optics(OpticsCmd),
    /// Memory timing, electrode and allocation models
    #[command(subcommand)]
    Mem(MemCmd),
    /// Relativistic timing, coordinates, charge and moire fringes
    #[command(subcommand)]
    Rel(RelCmd),
    /// Parallel sort and its scaling probe
    #[command(subcommand)]
    Sort(SortCmd),
    /// Comlink plane geometry and midpoint integration
    #[command(subcommand)]
    Geom(GeomCmd),
    /// Build the link spreadsheet for every configured target as CSV
    Sheet(SheetArgs),
    /// Draw the link spreadsheet as an SVG radar chart
    Chart(ChartArgs),
}

/// Where a link's distance and range come from: explicit flags or a
/// configured target.
#[derive(Debug, Args)]
struct TargetArgs {
    /// Name of a target in the --config file
    #[arg(long)]
    target: Option<String>,
}

#[derive(Debug, Subcommand)]
enum LinkCmd {
    /// epsilon = progress/100 * range, in light-minutes
    Eps {
        #[arg(long)]
        progress: f64,
        /// Range in light-minutes
        #[arg(long)]
        range: Option<f64>,
        #[command(flatten)]
        from: TargetArgs,
    },
    /// Shift a local HH:MM:SS timestamp back by the light time of epsilon
    Shift {
        #[arg(long)]
        time: String,
        /// epsilon in light-minutes
        #[arg(long)]
        epsilon: f64,
    },
    /// Frequency resolution c*100/(d*p)
    Freq {
        /// Distance in km
        #[arg(long)]
        distance: Option<f64>,
        #[arg(long)]
        progress: f64,
        #[command(flatten)]
        from: TargetArgs,
    },
    /// Displaced frequency resolution c/(d*(1 - p/100))
    Displaced {
        /// Distance in km
        #[arg(long)]
        distance: Option<f64>,
        #[arg(long)]
        progress: f64,
        #[command(flatten)]
        from: TargetArgs,
    },
    /// Check delta_omega * delta_t >= 2*pi
    Uncertainty {
        #[arg(long)]
        domega: f64,
        #[arg(long)]
        dt: f64,
    },
    /// Time-data probability t * delta * |<psi|phi>|^2
    Prob {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        re: f64,
        #[arg(long, default_value_t = 0.0)]
        im: f64,
    },
}

#[derive(Debug, Subcommand)]
enum OpticsCmd {
    /// V-number of a step-index fiber and its single-mode verdict
    Vnumber {
        /// Core radius in metres
        #[arg(long)]
        radius: f64,
        /// Wavelength in metres
        #[arg(long)]
        wavelength: f64,
        #[arg(long)]
        n1: f64,
        #[arg(long)]
        n2: f64,
    },
    /// Refracted angle (radians) or total internal reflection
    Snell {
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        n1: f64,
        #[arg(long)]
        n2: f64,
    },
    /// Faraday rotation zeta = V * B * l
    Faraday {
        /// Verdet constant in rad/(T m)
        #[arg(long)]
        verdet: f64,
        /// Field in tesla
        #[arg(long)]
        field: f64,
        /// Path length in metres
        #[arg(long)]
        path: f64,
    },
    /// Area and volume of a thin cylindrical isolation shell
    Shell {
        #[arg(long)]
        thickness: f64,
        #[arg(long)]
        length: f64,
        #[arg(long)]
        mean_radius: f64,
        #[arg(long)]
        circular_radius: f64,
    },
}

#[derive(Debug, Subcommand)]
enum MemCmd {
    /// Bit frequency a / (b * t)
    Bitfreq {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        t: f64,
    },
    /// Norm of a qubit a|0> + b|1>
    Qubit {
        #[arg(long)]
        a_re: f64,
        #[arg(long, default_value_t = 0.0)]
        a_im: f64,
        #[arg(long)]
        b_re: f64,
        #[arg(long, default_value_t = 0.0)]
        b_im: f64,
    },
    /// Sheet resistance and resistance of an electrode strip
    Sheetres {
        #[arg(long)]
        length: f64,
        #[arg(long)]
        width: f64,
        /// Resistivity in ohm m
        #[arg(long)]
        rho: f64,
        /// Thickness in metres
        #[arg(long)]
        theta: f64,
    },
    /// Transconductance, pooled across the nanotube poles when their deltas are given
    Gm {
        #[arg(long)]
        d_i_ds: f64,
        #[arg(long)]
        d_v_gs: f64,
        #[arg(long, requires_all = ["d_i_cnt2", "d_v_alpha", "d_v_beta"])]
        d_i_cnt1: Option<f64>,
        #[arg(long)]
        d_i_cnt2: Option<f64>,
        #[arg(long)]
        d_v_alpha: Option<f64>,
        #[arg(long)]
        d_v_beta: Option<f64>,
    },
    /// Quantum efficiency collected / storable
    Efficiency {
        #[arg(long)]
        collected: u64,
        #[arg(long)]
        storable: u64,
    },
    /// FIFO allocation of carriers (ids 0, 1, ...) to cells nearest first
    Fifo {
        /// Comma-separated arrival times in seconds
        #[arg(long, value_parser = parse_list::<f64>)]
        arrivals: List<f64>,
        /// Number of cells (defaults to one per carrier)
        #[arg(long)]
        cells: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
enum RelCmd {
    /// Time factor 1/sqrt(1 - beta^2)
    Factor {
        #[arg(long)]
        beta: f64,
    },
    /// Proper time of dt at velocity (vx, vy, vz) in km/s
    Proper {
        #[arg(long)]
        dt: f64,
        #[arg(long, default_value_t = 0.0)]
        vx: f64,
        #[arg(long, default_value_t = 0.0)]
        vy: f64,
        #[arg(long, default_value_t = 0.0)]
        vz: f64,
    },
    /// Simultaneity bound dt * sqrt(1 - 4 beta^2)
    Simul {
        #[arg(long)]
        dt: f64,
        #[arg(long)]
        beta: f64,
    },
    /// Stored proper time |tdot0| * cos(pi/4)
    Tau {
        #[arg(long)]
        tdot: f64,
    },
    /// Polar form of (x, y) and the Jacobian there
    Polar {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
    },
    /// Charge at t2 from Q(t1), inflow and outflow
    Charge {
        #[arg(long)]
        q1: f64,
        #[arg(long)]
        q_in: f64,
        #[arg(long)]
        q_out: f64,
    },
    /// Charge density Q / (2V)
    Density {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        volume: f64,
    },
    /// Moire wavelength from distances and from pitch, with a consistency check
    Moire {
        #[arg(long)]
        x0: f64,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        xp: f64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        dp: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Debug, Subcommand)]
enum SortCmd {
    /// Sort comma-separated integers with p workers
    Run {
        #[arg(long, value_parser = parse_list::<i64>, allow_hyphen_values = true)]
        values: List<i64>,
        #[arg(long, default_value_t = 1)]
        partitions: usize,
    },
    /// Time the parallel sort over several sizes and fit n log n
    Probe {
        #[arg(long, value_parser = parse_list::<usize>)]
        sizes: List<usize>,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 4)]
        partitions: usize,
        #[arg(long, value_enum, default_value_t = Pattern::Uniform)]
        pattern: Pattern,
        #[arg(long, default_value_t = 0x7d5a)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Pattern {
    Uniform,
    Sorted,
    Constant,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Integrand {
    /// f = 1
    One,
    /// f = x + y (+ t)
    Sum,
    /// f = x * y (* t)
    Product,
}

#[derive(Debug, Subcommand)]
enum GeomCmd {
    /// Slope of the segment p1 -> p2
    Slope {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        p1: Point2,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        p2: Point2,
    },
    /// Length of the segment p1 -> p2
    Length {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        p1: Point2,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        p2: Point2,
    },
    /// Shared arc PP' from the AB and B'A' decompositions
    Arc {
        #[arg(long)]
        ab: f64,
        #[arg(long)]
        ap: f64,
        #[arg(long)]
        pb: f64,
        #[arg(long)]
        ba: f64,
        #[arg(long)]
        bp: f64,
        #[arg(long)]
        pa: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Midpoint-rule integral over x, y and optionally t
    Area {
        #[arg(long, value_enum)]
        f: Integrand,
        #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
        x: (f64, f64),
        #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
        y: (f64, f64),
        #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
        t: Option<(f64, f64)>,
        /// Cells per axis
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
    /// log_t(t * t_parallel) and whether it folds to 2
    Timesplit {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        tp: f64,
    },
    /// Velocity and acceleration of a planar displacement
    Kin {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        displacement: Point2,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        sync: Point2,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        tp: f64,
    },
}

#[derive(Debug, Args)]
struct SheetArgs {
    /// Progress values in percent, e.g. 0,8,16,...,96
    #[arg(long, value_parser = parse_progress)]
    progress: ProgressList,
    /// Local time of the observation, overriding [defaults] base_time
    #[arg(long)]
    base_time: Option<String>,
    /// Output CSV path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ChartArgs {
    /// Chart an existing CSV sheet instead of building one from --config
    #[arg(long, conflicts_with_all = ["progress", "base_time"])]
    csv: Option<PathBuf>,
    #[arg(long, value_parser = parse_progress)]
    progress: Option<ProgressList>,
    #[arg(long)]
    base_time: Option<String>,
    /// Output SVG path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
struct ProgressList(Vec<f64>);

/// A comma-separated flag value.
#[derive(Debug, Clone)]
struct List<T>(Vec<T>);

fn split_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: Display,
{
    s.split(',')
        .map(|tok| tok.trim().parse::<T>().map_err(|e| format!("'{}': {e}", tok.trim())))
        .collect()
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<List<T>, String>
where
    T::Err: Display,
{
    split_list(s).map(List)
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    match split_list::<f64>(s)?.as_slice() {
        &[a, b] => Ok((a, b)),
        other => Err(format!("expected two comma-separated numbers, got {}", other.len())),
    }
}

fn parse_point(s: &str) -> Result<Point2, String> {
    parse_pair(s).map(|(x, y)| Point2::new(x, y))
}

fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    parse_pair(s)
}

/// Parses `a,b,c` and arithmetic runs `a,b,...,z` (step b - a, z inclusive).
pub fn expand_progress(s: &str) -> Result<Vec<f64>, String> {
    let tokens: Vec<&str> = s.split(',').map(str::trim).collect();
    let mut out: Vec<f64> = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if tokens[i] == "..." {
            let n = out.len();
            let end: f64 = tokens
                .get(i + 1)
                .ok_or("'...' must be followed by an end value")?
                .parse()
                .map_err(|e| format!("bad end value after '...': {e}"))?;
            if n < 2 {
                return Err("'...' needs two values before it to fix the step".into());
            }
            let (a, step) = (out[n - 2], out[n - 1] - out[n - 2]);
            if !(step > 0.0) || end < out[n - 1] {
                return Err(format!("'...' needs an increasing run ending at or after {}", out[n - 1]));
            }
            let count = ((end - a) / step + 1e-9).floor() as usize;
            out.extend((2..=count).map(|k| a + step * k as f64));
            if out.last() != Some(&end) {
                return Err(format!("{end} is not on the run {a}, {}, ...", a + step));
            }
            i += 2;
        } else {
            out.push(tokens[i].parse().map_err(|e| format!("'{}': {e}", tokens[i]))?);
            i += 1;
        }
    }
    Ok(out)
}

fn parse_progress(s: &str) -> Result<ProgressList, String> {
    expand_progress(s).map(ProgressList)
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Lets every leaf command take values such as `--x -1`.
fn accept_negative_numbers(cmd: clap::Command) -> clap::Command {
    cmd.allow_negative_numbers(true)
        .mut_subcommands(accept_negative_numbers)
}

/// Runs the CLI with process stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI against the given writers and returns the exit status.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match accept_negative_numbers(Cli::command())
        .try_get_matches_from(argv)
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return e.exit_code();
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Domain(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
    }
}

/// Prints `name  value` lines with the values lined up.
fn table(out: &mut dyn Write, rows: &[(&str, String)]) -> Outcome {
    let w = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in rows {
        writeln!(out, "{k:<w$}  {v}")?;
    }
    Ok(())
}

fn load_config(path: Option<&Path>) -> Result<LabConfig, Failure> {
    let path = path.ok_or_else(|| Failure::Usage("this command needs --config <path>".into()))?;
    LabConfig::load(path).map_err(|e| match e {
        super::AnalysisError::Io { .. } => Failure::Usage(e.to_string()),
        other => Failure::Domain(other.to_string()),
    })
}

fn find_target(config: Option<&Path>, from: &TargetArgs) -> Result<Option<Target>, Failure> {
    let Some(name) = &from.target else { return Ok(None) };
    let cfg = load_config(config)?;
    cfg.targets
        .into_iter()
        .find(|t| &t.name == name)
        .map(Some)
        .ok_or_else(|| Failure::Usage(format!("no [target.{name}] in config")))
}

fn pick(flag: Option<f64>, target: Option<f64>, name: &str) -> Result<f64, Failure> {
    match (flag, target) {
        (Some(_), Some(_)) => Err(Failure::Usage(format!("give either --{name} or --target, not both"))),
        (Some(v), None) | (None, Some(v)) => Ok(v),
        (None, None) => Err(Failure::Usage(format!("missing --{name} (or --target with --config)"))),
    }
}

fn base_time(flag: Option<&str>, cfg: &LabConfig) -> Result<Timestamp, Failure> {
    match flag {
        Some(s) => s
            .parse()
            .map_err(|_| Failure::Usage(format!("--base-time '{s}' is not HH:MM:SS"))),
        None => Ok(cfg.base_time_or_default()),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let config = cli.config.as_deref();
    match cli.command {
        Command::Link(c) => link(c, config, out),
        Command::Optics(c) => optics_cmd(c, out),
        Command::Mem(c) => mem(c, out),
        Command::Rel(c) => rel(c, out),
        Command::Sort(c) => sort(c, out, err),
        Command::Geom(c) => geom(c, out),
        Command::Sheet(a) => sheet(a, config, out, err),
        Command::Chart(a) => chart(a, config, out, err),
    }
}

fn link(c: LinkCmd, config: Option<&Path>, out: &mut dyn Write) -> Outcome {
    match c {
        LinkCmd::Eps { progress, range, from } => {
            let t = find_target(config, &from)?;
            let range = pick(range, t.map(|t| t.range().value()), "range")?;
            let eps = linkmodel::epsilon_from_progress(Quantity::percent(progress)?, Quantity::light_minutes(range)?)?;
            writeln!(out, "{:.6} Lm", eps.value())?;
        }
        LinkCmd::Shift { time, epsilon } => {
            let local: Timestamp = time.parse()?;
            writeln!(out, "{}", linkmodel::shift_timestamp(local, Quantity::light_minutes(epsilon)?)?)?;
        }
        LinkCmd::Freq { distance, progress, from } => {
            let t = find_target(config, &from)?;
            let d = pick(distance, t.map(|t| t.distance().value()), "distance")?;
            let r = linkmodel::frequency_resolution(Quantity::km(d)?, Quantity::percent(progress)?)?;
            writeln!(out, "{r}")?;
        }
        LinkCmd::Displaced { distance, progress, from } => {
            let t = find_target(config, &from)?;
            let d = pick(distance, t.map(|t| t.distance().value()), "distance")?;
            let r = linkmodel::displaced_frequency_resolution(Quantity::km(d)?, Quantity::percent(progress)?)?;
            writeln!(out, "{r}")?;
        }
        LinkCmd::Uncertainty { domega, dt } => {
            let ok = linkmodel::uncertainty_satisfied(domega, dt)?;
            table(
                out,
                &[
                    ("product", format!("{:.12}", domega * dt)),
                    ("bound", format!("{:.12}", std::f64::consts::TAU)),
                    ("satisfied", ok.to_string()),
                ],
            )?;
        }
        LinkCmd::Prob { t, delta, re, im } => {
            let overlap = AmplitudeOverlap::new(re, im);
            table(
                out,
                &[
                    ("probability", linkmodel::timedata_probability(t, delta, overlap)?.to_string()),
                    ("bit_product", linkmodel::bit_frequency_product(t, delta, overlap)?.to_string()),
                ],
            )?;
        }
    }
    Ok(())
}

fn optics_cmd(c: OpticsCmd, out: &mut dyn Write) -> Outcome {
    match c {
        OpticsCmd::Vnumber { radius, wavelength, n1, n2 } => {
            let v = optics::v_number(&FiberSpec {
                core_radius_m: radius,
                wavelength_m: wavelength,
                n1,
                n2,
            })?;
            table(
                out,
                &[
                    ("v_number", format!("{v:.6}")),
                    ("cutoff", optics::SINGLE_MODE_CUTOFF.to_string()),
                    ("single_mode", optics::is_single_mode(v).to_string()),
                ],
            )?;
        }
        OpticsCmd::Snell { theta, n1, n2 } => match optics::snell_refracted_angle(theta, n1, n2)? {
            Refraction::Refracted(a) => writeln!(out, "{a:.9} rad")?,
            Refraction::TotalInternalReflection => writeln!(out, "total internal reflection")?,
        },
        OpticsCmd::Faraday { verdet, field, path } => {
            let zeta = optics::faraday_rotation(&FaradayCell {
                verdet_rad_per_t_m: verdet,
                b_field_t: field,
                path_m: path,
            })?;
            writeln!(out, "{zeta} rad")?;
        }
        OpticsCmd::Shell {
            thickness,
            length,
            mean_radius,
            circular_radius,
        } => {
            let (area, volume) = optics::isolation_geometry(&IsolationShell {
                shell_thickness_m: thickness,
                length_m: length,
                mean_radius_m: mean_radius,
                circular_radius_m: circular_radius,
            })?;
            table(out, &[("area_m2", area.to_string()), ("volume_m3", volume.to_string())])?;
        }
    }
    Ok(())
}

fn mem(c: MemCmd, out: &mut dyn Write) -> Outcome {
    match c {
        MemCmd::Bitfreq { a, b, t } => writeln!(out, "{} Hz", memtiming::bit_frequency(a, b, t)?)?,
        MemCmd::Qubit { a_re, a_im, b_re, b_im } => {
            use num_complex::Complex64;
            let q = QubitState::new(Complex64::new(a_re, a_im), Complex64::new(b_re, b_im));
            table(
                out,
                &[
                    ("norm", format!("{:.12}", q.norm())),
                    ("normalised", memtiming::validate_qubit(&q).to_string()),
                ],
            )?;
        }
        MemCmd::Sheetres { length, width, rho, theta } => {
            let g = ElectrodeGeometry::new(length, width, rho, theta)?;
            table(
                out,
                &[
                    ("squares", g.squares().to_string()),
                    ("sheet_ohm_sq", memtiming::sheet_resistance(&g).to_string()),
                    ("resistance_ohm", memtiming::resistance(&g).to_string()),
                ],
            )?;
        }
        MemCmd::Gm {
            d_i_ds,
            d_v_gs,
            d_i_cnt1,
            d_i_cnt2,
            d_v_alpha,
            d_v_beta,
        } => {
            let g1 = memtiming::transconductance_baseline(d_i_ds, d_v_gs)?;
            let mut rows = vec![("g_m1_s", g1.to_string())];
            if let (Some(i1), Some(i2), Some(va), Some(vb)) = (d_i_cnt1, d_i_cnt2, d_v_alpha, d_v_beta) {
                let pooled = memtiming::transconductance_pooled(d_i_ds, i1, i2, d_v_gs, va, vb)?;
                rows.push(("g_m_mean_s", pooled.mean.to_string()));
                rows.push(("dg_m_cnt_s", pooled.cnt_delta(g1).to_string()));
            }
            table(out, &rows)?;
        }
        MemCmd::Efficiency { collected, storable } => {
            writeln!(out, "{}", memtiming::quantum_efficiency(collected, storable)?)?
        }
        MemCmd::Fifo { arrivals: List(arrivals), cells } => {
            let carriers: Vec<Carrier> = arrivals
                .iter()
                .enumerate()
                .map(|(i, &t)| Carrier {
                    id: i as u64,
                    arrival_time_s: t,
                    charge_sign: ChargeSign::Electron,
                })
                .collect();
            let map = CellMap::linear(cells.unwrap_or(carriers.len()));
            let (_, alloc) = memtiming::waterfall_allocate(&carriers, &map)?;
            writeln!(out, "{:<8}  {:<14}  cell", "carrier", "arrival_s")?;
            let mut rows: Vec<_> = alloc.iter().collect();
            rows.sort_by_key(|(_, addr)| **addr);
            for (id, addr) in rows {
                writeln!(out, "{id:<8}  {:<14}  {addr}", arrivals[*id as usize])?;
            }
        }
    }
    Ok(())
}

fn rel(c: RelCmd, out: &mut dyn Write) -> Outcome {
    match c {
        RelCmd::Factor { beta } => writeln!(out, "{}", relativity::time_factor(Velocity::from_beta(beta)?))?,
        RelCmd::Proper { dt, vx, vy, vz } => {
            writeln!(out, "{} s", relativity::proper_time_delta_general(dt, vx, vy, vz)?)?
        }
        RelCmd::Simul { dt, beta } => writeln!(
            out,
            "{} s",
            relativity::proper_time_delta_simultaneity(dt, Velocity::from_beta(beta)?)?
        )?,
        RelCmd::Tau { tdot } => writeln!(out, "{}", relativity::stored_proper_time(tdot))?,
        RelCmd::Polar { x, y } => {
            let p = relativity::polar_from_cartesian(x, y);
            table(
                out,
                &[
                    ("r", p.r.to_string()),
                    ("phi_rad", p.phi.to_string()),
                    ("jacobian", relativity::jacobian_polar(PolarPoint { ..p }).to_string()),
                ],
            )?;
        }
        RelCmd::Charge { q1, q_in, q_out } => {
            let sum = relativity::charge_balance(&ChargeLedger { q_t1: q1, q_in, q_out })?;
            writeln!(out, "{} C", sum.value())?;
        }
        RelCmd::Density { q, volume } => writeln!(out, "{} C/m^3", relativity::charge_density(q, volume)?)?,
        RelCmd::Moire { x0, x, xp, p, dp, tol } => {
            let m = relativity::moire_consistency(x0, x, xp, p, dp, tol)?;
            table(
                out,
                &[
                    ("from_distances", m.from_distances.to_string()),
                    ("from_pitch", m.from_pitch.to_string()),
                    ("order", m.order.to_string()),
                    ("agree", m.agree.to_string()),
                ],
            )?;
        }
    }
    Ok(())
}

fn sort(c: SortCmd, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match c {
        SortCmd::Run { values: List(values), partitions } => {
            let sorted = ptvda::parallel_sort(SortInstance::new(values, partitions)?);
            let text: Vec<String> = sorted.iter().map(i64::to_string).collect();
            writeln!(out, "{}", text.join(","))?;
        }
        SortCmd::Probe {
            sizes: List(sizes),
            trials,
            partitions,
            pattern,
            seed,
        } => {
            let pattern = match pattern {
                Pattern::Uniform => KeyPattern::Uniform,
                Pattern::Sorted => KeyPattern::Sorted,
                Pattern::Constant => KeyPattern::Constant,
            };
            let probe = ptvda::scaling_probe_with(&sizes, trials, ProbeConfig { partitions, pattern, seed })?;
            writeln!(out, "{:>10}  {:>14}", "n", "seconds")?;
            for (n, s) in probe.sizes.iter().zip(&probe.measured) {
                writeln!(out, "{n:>10}  {s:>14.6e}")?;
            }
            let opt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.4}"));
            let fit = probe
                .fitted_model
                .map_or("n/a".to_string(), |(a, b)| format!("{a:.4e} * n ln n + {b:.4e}"));
            table(
                out,
                &[
                    ("fit", fit),
                    ("loglog_slope", opt(probe.loglog_slope)),
                    ("subquadratic", probe.is_subquadratic().map_or("n/a".into(), |b| b.to_string())),
                ],
            )?;
            for w in &probe.warnings {
                writeln!(err, "warning: {w}")?;
            }
        }
    }
    Ok(())
}

fn geom(c: GeomCmd, out: &mut dyn Write) -> Outcome {
    match c {
        GeomCmd::Slope { p1, p2 } => writeln!(out, "{}", geomlink::slope(p1, p2)?)?,
        GeomCmd::Length { p1, p2 } => writeln!(out, "{}", geomlink::segment_length(p1, p2))?,
        GeomCmd::Arc { ab, ap, pb, ba, bp, pa, tol } => {
            let arc = geomlink::shared_arc(
                &ArcDecomposition {
                    total_ab: ab,
                    ap_prime: ap,
                    pb,
                    total_ba: ba,
                    bp_prime: bp,
                    pa_prime: pa,
                },
                tol,
            )?;
            table(
                out,
                &[
                    ("pp_prime", arc.length.to_string()),
                    ("pp_prime_other", arc.other.to_string()),
                    ("consistent", arc.consistent.to_string()),
                ],
            )?;
        }
        GeomCmd::Area { f, x, y, t, n } => {
            let value = match t {
                None => {
                    let g = match f {
                        Integrand::One => |_: f64, _: f64| 1.0,
                        Integrand::Sum => |x: f64, y: f64| x + y,
                        Integrand::Product => |x: f64, y: f64| x * y,
                    };
                    geomlink::riemann_area(g, Rect { x, y }, n, n)?
                }
                Some(t) => {
                    let g = match f {
                        Integrand::One => |_: f64, _: f64, _: f64| 1.0,
                        Integrand::Sum => |x: f64, y: f64, t: f64| x + y + t,
                        Integrand::Product => |x: f64, y: f64, t: f64| x * y * t,
                    };
                    geomlink::triple_integral(g, Box3 { x, y, t }, [n; 3])?
                }
            };
            writeln!(out, "{value}")?;
        }
        GeomCmd::Timesplit { t, tp } => {
            let (value, fold) = geomlink::time_split_check(t, tp)?;
            table(out, &[("log_t", value.to_string()), ("fold", fold.to_string())])?;
        }
        GeomCmd::Kin { displacement, sync, t, tp } => {
            let m = PlanarMotion {
                displacement,
                sync_displacement: sync,
                t,
                t_parallel: tp,
            };
            let k = geomlink::planar_kinematics(&m)?;
            let (ev, ea) = k.recovery_error(&m);
            table(
                out,
                &[
                    ("v", k.v.to_string()),
                    ("a", k.a.to_string()),
                    ("v_sync", k.v_sync.to_string()),
                    ("recovery_v", ev.to_string()),
                    ("recovery_a", ea.to_string()),
                ],
            )?;
        }
    }
    Ok(())
}

fn configured_sheet(
    config: Option<&Path>,
    progress: &ProgressList,
    base: Option<&str>,
) -> Result<Sheet, Failure> {
    let cfg = load_config(config)?;
    if cfg.targets.is_empty() {
        return Err(Failure::Domain("config defines no [target.<name>] sections".into()));
    }
    let base = base_time(base, &cfg)?;
    Ok(build_sheet(&cfg.targets, &progress.0, base)?)
}

fn sheet(a: SheetArgs, config: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let s = configured_sheet(config, &a.progress, a.base_time.as_deref())?;
    match &a.out {
        Some(path) => {
            emit_csv(&s, path)?;
            writeln!(err, "wrote {} records to {}", s.records.len(), path.display())?;
        }
        None => write_csv(&s, out)?,
    }
    Ok(())
}

fn chart(a: ChartArgs, config: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let s = match (&a.csv, &a.progress) {
        (Some(csv), _) => parse_csv(csv)?,
        (None, Some(p)) => configured_sheet(config, p, a.base_time.as_deref())?,
        (None, None) => return Err(Failure::Usage("chart needs --csv <path> or --config with --progress".into())),
    };
    let chart = match &a.out {
        Some(path) => {
            let c = write_radar_chart(&s, path)?;
            writeln!(err, "wrote {} series to {}", c.series, path.display())?;
            c
        }
        None => {
            let c = super::render_radar_chart(&s)?;
            out.write_all(c.svg.as_bytes())?;
            c
        }
    };
    for w in &chart.warnings {
        writeln!(err, "warning: {w}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("timedata-lab").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn progress_runs_expand() {
        let v = expand_progress("0,8,16,...,96").unwrap();
        assert_eq!(v.len(), 13);
        assert_eq!(v[2], 16.0);
        assert_eq!(*v.last().unwrap(), 96.0);
        assert_eq!(expand_progress("1, 2.5,4").unwrap(), [1.0, 2.5, 4.0]);
        assert_eq!(expand_progress("0,10,...,90,99,99.9").unwrap().len(), 12);
        assert!(expand_progress("0,...,96").is_err());
        assert!(expand_progress("0,8,...,95").is_err());
        assert!(expand_progress("0,8,...").is_err());
        assert!(expand_progress("8,0,...,96").is_err());
        assert!(expand_progress("a,b").is_err());
    }

    #[test]
    fn eps_prints_light_minutes() {
        assert_eq!(run_capture(&["link", "eps", "--progress", "16", "--range", "8.3"]), (0, "1.328000 Lm\n".into(), String::new()));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_capture(&[]).0, 2);
        assert_eq!(run_capture(&["warp"]).0, 2);
        assert_eq!(run_capture(&["link", "eps", "--progress", "16", "--range", "8.3", "--bogus"]).0, 2);
        assert_eq!(run_capture(&["--help"]).0, 0);
        // domain: progress out of range
        let (code, _, err) = run_capture(&["link", "eps", "--progress", "120", "--range", "8.3"]);
        assert_eq!(code, 1);
        assert!(err.starts_with("error:"));
        // missing config is a usage problem
        assert_eq!(run_capture(&["sheet", "--progress", "0,8,16"]).0, 2);
        assert_eq!(run_capture(&["link", "eps", "--progress", "16"]).0, 2);
    }

    #[test]
    fn sentinels_and_signals_print() {
        let (code, out, _) = run_capture(&["link", "freq", "--distance", "1.46e8", "--progress", "0"]);
        assert_eq!((code, out.trim()), (0, "#Div/0!"));
        let (_, out, _) = run_capture(&["optics", "snell", "--theta", "1.2", "--n1", "1.5", "--n2", "1.0"]);
        assert_eq!(out.trim(), "total internal reflection");
    }

    #[test]
    fn negative_values_parse() {
        let (code, out, _) = run_capture(&["geom", "slope", "--p1", "-1,-1", "--p2", "1,3"]);
        assert_eq!((code, out.trim()), (0, "2"));
        let (code, out, _) = run_capture(&["sort", "run", "--values", "-3,5,-7,0", "--partitions", "2"]);
        assert_eq!((code, out.trim()), (0, "-7,-3,0,5"));
        let (code, out, _) = run_capture(&["rel", "polar", "--x", "-1", "--y", "0"]);
        assert_eq!(code, 0);
        assert!(out.contains("3.14159"));
    }

    #[test]
    fn subcommand_smoke() {
        for args in [
            &["link", "shift", "--time", "13:35:00", "--epsilon", "1.33"][..],
            &["link", "displaced", "--distance", "1.46e8", "--progress", "96"],
            &["link", "uncertainty", "--domega", "6.283185307179586", "--dt", "1"],
            &["link", "prob", "--t", "2", "--delta", "0.5", "--re", "0.6", "--im", "0.8"],
            &["optics", "vnumber", "--radius", "4.1e-6", "--wavelength", "1.55e-6", "--n1", "1.4475", "--n2", "1.4440"],
            &["optics", "faraday", "--verdet", "3.8", "--field", "0.5", "--path", "0.02"],
            &["optics", "shell", "--thickness", "0.001", "--length", "0.1", "--mean-radius", "0.02", "--circular-radius", "0.02"],
            &["mem", "bitfreq", "--a", "1", "--b", "2", "--t", "1e-9"],
            &["mem", "qubit", "--a-re", "0.6", "--b-re", "0.8"],
            &["mem", "sheetres", "--length", "10", "--width", "2", "--rho", "1e-6", "--theta", "1e-7"],
            &["mem", "gm", "--d-i-ds", "1e-3", "--d-v-gs", "0.5"],
            &["mem", "gm", "--d-i-ds", "1e-3", "--d-v-gs", "0.5", "--d-i-cnt1", "2e-4", "--d-i-cnt2", "1e-4", "--d-v-alpha", "0.1", "--d-v-beta", "0.2"],
            &["mem", "efficiency", "--collected", "3", "--storable", "4"],
            &["mem", "fifo", "--arrivals", "0.3,0.1,0.2"],
            &["rel", "factor", "--beta", "0.6"],
            &["rel", "proper", "--dt", "10", "--vx", "180000"],
            &["rel", "simul", "--dt", "10", "--beta", "0.3"],
            &["rel", "tau", "--tdot", "1"],
            &["rel", "charge", "--q1", "1", "--q-in", "0.5", "--q-out", "0.25"],
            &["rel", "density", "--q", "2", "--volume", "0.5"],
            &["rel", "moire", "--x0", "2", "--x", "3", "--xp", "1.5", "--p", "2", "--dp", "0.5"],
            &["sort", "probe", "--sizes", "1000,2000,4000", "--trials", "3"],
            &["geom", "length", "--p1", "0,0", "--p2", "3,4"],
            &["geom", "arc", "--ab", "10", "--ap", "3", "--pb", "4", "--ba", "10", "--bp", "4", "--pa", "3"],
            &["geom", "area", "--f", "sum", "--x", "0,1", "--y", "0,1"],
            &["geom", "area", "--f", "product", "--x", "0,1", "--y", "0,1", "--t", "0,2", "--n", "20"],
            &["geom", "timesplit", "--t", "3", "--tp", "3"],
            &["geom", "kin", "--displacement", "3,4", "--sync", "1,0", "--t", "2", "--tp", "0.5"],
        ] {
            let (code, out, err) = run_capture(args);
            assert_eq!(code, 0, "{args:?}: {err}");
            assert!(!out.is_empty(), "{args:?}");
        }
    }

    #[test]
    fn fifo_assigns_in_arrival_order() {
        let (_, out, _) = run_capture(&["mem", "fifo", "--arrivals", "0.3,0.1,0.2"]);
        let ids: Vec<&str> = out.lines().skip(1).map(|l| l.split_whitespace().next().unwrap()).collect();
        assert_eq!(ids, ["1", "2", "0"]);
    }
}

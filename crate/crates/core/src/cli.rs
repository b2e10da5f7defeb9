//! Command-line front end.
//!
//! Exit codes: 0 success, 1 bad input or I/O failure, 2 a scientific check
//! failed (symmetry, convergence band, equilibrium count).

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::dynamics::{
    convergence_sweep, successive_ratios, AveragedParams, ConvergenceReport, FullState,
    PhysicalParams, CONVERGENCE_BAND,
};
use crate::error::{Error, Result};
use crate::excitation::{
    check_symmetry, velocity_moments, Excitation, MomentMatrix, SymmetryReport,
};
use crate::portrait::{build_grid, extract_contours, render_svg, LevelContours};
use crate::potential::{
    classify_domain, find_equilibria, gamma_curve, gamma_parameters, label_from_equilibria,
    DomainLabel, Equilibrium,
};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "PENDULUM_VIB_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "pendulum-vib",
    version,
    about = "Averaged dynamics of a spherical pendulum with a vibrating suspension point"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Velocity moments, dimensionless (A, B, C) and the symmetry verdict.
    Moments(MomentsArgs),
    /// Equilibria of the effective potential.
    Equilibria(ParamArgs),
    /// Critical curve as CSV `phi,a_minus_c,b`.
    Curve(CurveArgs),
    /// Domain label (I, II or boundary) for B > 0.
    Domain(ParamArgs),
    /// Phase-portrait grid, contours and SVG.
    Portrait(PortraitArgs),
    /// Full vs averaged dynamics over an epsilon sweep.
    Compare(CompareArgs),
    /// Regenerate curve, domain sweep and one portrait per domain.
    Reproduce(ReproduceArgs),
}

fn parse_phys(s: &str) -> std::result::Result<PhysicalParams, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<std::result::Result<_, _>>()?;
    match parts.as_slice() {
        [m, l, g] => PhysicalParams::new(*m, *l, *g).map_err(|e| e.to_string()),
        _ => Err(format!("expected m,l,g, got {s:?}")),
    }
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long)]
    pub excitation: PathBuf,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub p_alpha: f64,
    #[arg(long, value_parser = parse_phys, default_value = "1,1,1")]
    pub phys: PhysicalParams,
    #[arg(long, default_value_t = crate::excitation::DEFAULT_SYMMETRY_TOL)]
    pub tol: f64,
}

/// Either `--a-minus-c/--b` directly, or an excitation file plus `--p-alpha`.
#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long, allow_negative_numbers = true, conflicts_with = "excitation")]
    pub a_minus_c: Option<f64>,
    #[arg(long, conflicts_with = "excitation")]
    pub b: Option<f64>,
    #[arg(long)]
    pub excitation: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub p_alpha: f64,
    #[arg(long, value_parser = parse_phys, default_value = "1,1,1")]
    pub phys: PhysicalParams,
    #[arg(long, default_value_t = crate::excitation::DEFAULT_SYMMETRY_TOL)]
    pub tol: f64,
    /// Also write the output into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Number of samples on (pi/2 + offset, pi].
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub offset: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PortraitArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = crate::portrait::DEFAULT_RESOLUTION)]
    pub nx: usize,
    #[arg(long, default_value_t = crate::portrait::DEFAULT_RESOLUTION)]
    pub ny: usize,
    #[arg(long)]
    pub p_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub excitation: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.025")]
    pub eps_sweep: Vec<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 2.0)]
    pub phi0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub p_phi0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub p_alpha: f64,
    /// Write report.json and per-epsilon trajectory CSVs here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long, default_value = "reproduce")]
    pub out: PathBuf,
    #[arg(long, default_value_t = crate::portrait::DEFAULT_RESOLUTION)]
    pub nx: usize,
    #[arg(long, default_value_t = crate::portrait::DEFAULT_RESOLUTION)]
    pub ny: usize,
    /// Subdirectory name; defaults to `figures-<today>`.
    #[arg(long)]
    pub tag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentsOutput {
    pub moments: MomentMatrix,
    pub params: AveragedParams,
    pub symmetry: SymmetryReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriaOutput {
    pub params: AveragedParams,
    pub equilibria: Vec<Equilibrium>,
    /// Absent on the `B = 0` edge, where the domain partition does not apply.
    pub domain: Option<DomainLabel>,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InconsistentCount { .. } | Error::NonFinite { .. } => 2,
        _ => 1,
    }
}

fn thread_count() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Parses `args` (program name first) and runs the command, writing results to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count() {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: thread pool: {e}");
            return 1;
        }
    };
    match pool.install(|| dispatch(cli.command, out, err)) {
        Ok(code) => code,
        Err(e) => {
            if let Error::SymmetryViolation(report) = &e {
                if let Ok(json) = serde_json::to_string_pretty(report) {
                    let _ = writeln!(err, "{json}");
                }
            }
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(
    cmd: Command,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> Result<i32> {
    match cmd {
        Command::Moments(a) => cmd_moments(&a, out),
        Command::Equilibria(a) => cmd_equilibria(&a, out),
        Command::Curve(a) => cmd_curve(&a, out),
        Command::Domain(a) => cmd_domain(&a, out),
        Command::Portrait(a) => cmd_portrait(&a, out),
        Command::Compare(a) => cmd_compare(&a, out, err),
        Command::Reproduce(a) => cmd_reproduce(&a, out),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn moments_output(
    e: &Excitation,
    p_alpha: f64,
    phys: &PhysicalParams,
    tol: f64,
) -> Result<MomentsOutput> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let moments = velocity_moments(e);
    Ok(MomentsOutput {
        params: AveragedParams::from_moments(&moments, p_alpha, phys)?,
        symmetry: check_symmetry(&moments, tol),
        moments,
    })
}

pub fn cmd_moments(a: &MomentsArgs, out: &mut dyn Write) -> Result<i32> {
    let e = Excitation::from_json_file(&a.excitation)?;
    let report = moments_output(&e, a.p_alpha, &a.phys, a.tol)?;
    out.write_all(to_json(&report)?.as_bytes())?;
    Ok(if report.symmetry.passed { 0 } else { 2 })
}

fn resolve_params(a: &ParamArgs) -> Result<AveragedParams> {
    match (&a.excitation, a.a_minus_c, a.b) {
        (Some(path), _, _) => {
            let e = Excitation::from_json_file(path)?;
            let m = moments_output(&e, a.p_alpha, &a.phys, a.tol)?;
            if !m.symmetry.passed {
                return Err(Error::SymmetryViolation(m.symmetry));
            }
            Ok(m.params)
        }
        (None, Some(k), Some(b)) => {
            if !k.is_finite() || !(b.is_finite() && b >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "need finite A-C and B >= 0, got {k}, {b}"
                )));
            }
            Ok(AveragedParams::from_difference(k, b))
        }
        _ => Err(Error::InvalidInput(
            "give --a-minus-c and --b, or --excitation".into(),
        )),
    }
}

fn equilibria_output(ap: &AveragedParams) -> Result<EquilibriaOutput> {
    let equilibria = find_equilibria(ap);
    let domain = if ap.b > 0.0 {
        Some(label_from_equilibria(&equilibria)?)
    } else {
        None
    };
    Ok(EquilibriaOutput {
        params: *ap,
        equilibria,
        domain,
    })
}

pub fn cmd_equilibria(a: &ParamArgs, out: &mut dyn Write) -> Result<i32> {
    let ap = resolve_params(a)?;
    let json = to_json(&equilibria_output(&ap)?)?;
    if let Some(dir) = &a.out {
        ensure_dir(dir)?;
        write_file(&dir.join("equilibria.json"), json.as_bytes())?;
    }
    out.write_all(json.as_bytes())?;
    Ok(0)
}

fn curve_csv(samples: usize, offset: f64) -> Result<String> {
    if !(offset > 0.0 && offset < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidInput(format!(
            "offset must lie in (0, pi/2), got {offset}"
        )));
    }
    let mut csv = String::from("phi,a_minus_c,b\n");
    for g in gamma_curve(&gamma_parameters(samples, offset))? {
        csv.push_str(&format!("{},{},{}\n", g.phi, g.a_minus_c, g.b));
    }
    Ok(csv)
}

pub fn cmd_curve(a: &CurveArgs, out: &mut dyn Write) -> Result<i32> {
    let csv = curve_csv(a.samples, a.offset)?;
    if let Some(dir) = &a.out {
        ensure_dir(dir)?;
        write_file(&dir.join("curve.csv"), csv.as_bytes())?;
    }
    out.write_all(csv.as_bytes())?;
    Ok(0)
}

pub fn cmd_domain(a: &ParamArgs, out: &mut dyn Write) -> Result<i32> {
    let ap = resolve_params(a)?;
    let label = classify_domain(&ap)?;
    if let Some(dir) = &a.out {
        ensure_dir(dir)?;
        write_file(&dir.join("domain.txt"), format!("{label}\n").as_bytes())?;
    }
    writeln!(out, "{label}")?;
    Ok(0)
}

/// Writes `grid.csv`, `contours.csv` and `portrait.svg` into `dir`.
fn write_portrait(
    ap: &AveragedParams,
    nx: usize,
    ny: usize,
    p_max: Option<f64>,
    dir: &Path,
) -> Result<EquilibriaOutput> {
    let grid = build_grid(ap, nx, ny, p_max)?;
    let contours = extract_contours(&grid);
    ensure_dir(dir)?;

    let mut buf = Vec::new();
    grid.write_csv(&mut buf)?;
    write_file(&dir.join("grid.csv"), &buf)?;
    buf.clear();
    LevelContours::write_csv(&contours, &mut buf)?;
    write_file(&dir.join("contours.csv"), &buf)?;
    write_file(
        &dir.join("portrait.svg"),
        render_svg(&grid, &contours).as_bytes(),
    )?;

    let domain = if ap.b > 0.0 {
        Some(label_from_equilibria(&grid.equilibria)?)
    } else {
        None
    };
    Ok(EquilibriaOutput {
        params: *ap,
        equilibria: grid.equilibria,
        domain,
    })
}

pub fn cmd_portrait(a: &PortraitArgs, out: &mut dyn Write) -> Result<i32> {
    let ap = resolve_params(&a.params)?;
    let dir = a.params.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let summary = write_portrait(&ap, a.nx, a.ny, a.p_max, &dir)?;
    out.write_all(to_json(&summary)?.as_bytes())?;
    Ok(0)
}

pub fn cmd_compare(a: &CompareArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let e = Excitation::from_json_file(&a.excitation)?;
    if !(a.t_end.is_finite() && a.t_end > 0.0) {
        return Err(Error::InvalidInput(format!(
            "t_end must be positive, got {}",
            a.t_end
        )));
    }
    let initial = FullState::new(a.phi0, a.alpha0, a.p_phi0, a.p_alpha);
    let report = convergence_sweep(&e, &initial, a.t_end, &a.eps_sweep)?;
    let json = to_json(&report)?;

    if let Some(dir) = &a.out {
        ensure_dir(dir)?;
        write_file(&dir.join("report.json"), json.as_bytes())?;
        for &eps in &a.eps_sweep {
            let run =
                crate::dynamics::compare_trajectories(&e.with_epsilon(eps)?, &initial, a.t_end)?;
            for (name, traj) in [("full", &run.full), ("averaged", &run.averaged)] {
                let mut buf = Vec::new();
                crate::dynamics::write_trajectory_csv(&mut buf, traj)?;
                write_file(&dir.join(format!("trajectory_{name}_eps{eps}.csv")), &buf)?;
            }
        }
    }
    out.write_all(json.as_bytes())?;
    writeln!(
        err,
        "phi error ratios {:?}, p_alpha drift ratios {:?}, band [{}, {}]",
        successive_ratios(&report.max_err_phi),
        successive_ratios(&report.p_alpha_drift),
        CONVERGENCE_BAND.0,
        CONVERGENCE_BAND.1
    )?;
    Ok(if convergence_ok(&report) { 0 } else { 2 })
}

pub fn convergence_ok(report: &ConvergenceReport) -> bool {
    report.phi_converges() && report.p_alpha_converges()
}

/// Domain labels on a regular lattice of the `(A - C, B)` plane.
fn domain_sweep_csv() -> Result<String> {
    let ks: Vec<f64> = (0..=60).map(|i| -1.0 + 0.1 * i as f64).collect();
    let bs: Vec<f64> = (1..=50).map(|j| 0.01 * j as f64).collect();
    let rows: Vec<String> = ks
        .par_iter()
        .map(|&k| {
            let mut rows = String::new();
            for &b in &bs {
                let ap = AveragedParams::from_difference(k, b);
                let eqs = find_equilibria(&ap);
                let label = label_from_equilibria(&eqs)?;
                rows.push_str(&format!("{k},{b},{label},{}\n", eqs.len()));
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(
        std::iter::once("a_minus_c,b,domain,equilibria\n".to_string())
            .chain(rows)
            .collect(),
    )
}

pub fn cmd_reproduce(a: &ReproduceArgs, out: &mut dyn Write) -> Result<i32> {
    let tag = a
        .tag
        .clone()
        .unwrap_or_else(|| format!("figures-{}", chrono::Local::now().format("%Y-%m-%d")));
    let dir = a.out.join(tag);
    ensure_dir(&dir)?;
    write_file(&dir.join("curve.csv"), curve_csv(500, 1e-3)?.as_bytes())?;
    write_file(&dir.join("domains.csv"), domain_sweep_csv()?.as_bytes())?;
    let one = write_portrait(
        &AveragedParams::from_difference(0.0, 0.1),
        a.nx,
        a.ny,
        None,
        &dir.join("portrait_I"),
    )?;
    let three = write_portrait(
        &AveragedParams::from_difference(3.5, 0.01),
        a.nx,
        a.ny,
        None,
        &dir.join("portrait_II"),
    )?;
    writeln!(out, "{}", dir.display())?;
    out.write_all(to_json(&[one, three])?.as_bytes())?;
    Ok(0)
}

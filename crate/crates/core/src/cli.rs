//! Command-line front end.
//!
//! Exit codes: 0 pass, 1 usage or input error, 2 diagnostic failure,
//! 3 degenerate solve. Relative output paths are resolved against
//! `CAPCONE_OUT_DIR` when it is set.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::checks::{inversion_check, residual_check};
use crate::cone::{classify_configuration, construct_cap, sign_of_h, CapCase, CircularCone, Cone, HSign};
use crate::error::Error;
use crate::io::{self, RunManifest};
use crate::mesh::{mesh_radial_graph, mesh_spherical_cap};
use crate::reflect::{planar_symmetry_detect, spherical_sweep, SweepOptions, SymmetryOptions, Terminal};
use crate::solver::{solve_with_history, verify_equilibrium, SolverConfig, SolverResult};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_DIAGNOSTIC: u8 = 2;
pub const EXIT_DEGENERATE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "capcone", version, about = "Capillary surfaces in solid cones")]
pub struct Cli {
    /// Read angle arguments in degrees instead of radians.
    #[arg(long, global = true)]
    pub degrees: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Configuration case and sign of H for a contact angle and cone half-angle.
    Classify(AngleArgs),
    /// Spherical cap (or disc) meeting a circular cone at a given angle, as OBJ.
    Construct(ConstructArgs),
    /// Reflection sweep of a mesh in a circular cone.
    Sweep(SweepArgs),
    /// Capillary radial graph of given volume by energy minimization.
    Solve(SolveArgs),
    /// Invariant checks on a mesh.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct AngleArgs {
    /// Contact angle.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Cone half-angle.
    #[arg(long, allow_negative_numbers = true)]
    pub phi: f64,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub angles: AngleArgs,
    /// Distance from the apex to the boundary circle.
    #[arg(long, default_value_t = 1.0)]
    pub distance: f64,
    /// Mesh resolution, `N` or `N_THETAxN_S`.
    #[arg(long, default_value = "32")]
    pub resolution: GridSize,
    /// Output OBJ; the configuration is written beside it as JSON.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Input OBJ.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Cone half-angle.
    #[arg(long)]
    pub phi: f64,
    /// Output report JSON (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run on meshes that are not radial graphs.
    #[arg(long)]
    pub allow_non_graph: bool,
    #[arg(long, default_value_t = SweepOptions::default().ray_samples)]
    pub ray_samples: usize,
    #[arg(long, default_value_t = SweepOptions::default().radius_samples)]
    pub radius_samples: usize,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub angles: AngleArgs,
    /// Drop volume; defaults to the volume of the unit spherical cap over the domain.
    #[arg(long)]
    pub volume: Option<f64>,
    /// Grid, `N` or `N_THETAxN_S`.
    #[arg(long, default_value = "64")]
    pub grid: GridSize,
    #[arg(long, default_value_t = 20_000)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub grad_tolerance: f64,
    /// Output prefix: writes PREFIX.csv, PREFIX.obj, PREFIX_history.csv,
    /// PREFIX.json and PREFIX_equilibrium.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Inversion,
    Residual,
    Symmetry,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Input OBJ.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub check: Check,
    /// Radius of the inversion sphere.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Pass threshold: relative curvature mismatch for `inversion` (default
    /// 0.05), absolute residual for `residual` (default 1e-6), deviation
    /// relative to the mesh extent for `symmetry` (default 1e-6).
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Output report JSON (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `N` or `N_THETAxN_S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridSize {
    pub n_theta: usize,
    pub n_s: usize,
}

impl FromStr for GridSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad grid size {s:?}: {e}"));
        match s.split_once(['x', 'X']) {
            Some((a, b)) => Ok(Self {
                n_theta: parse(a)?,
                n_s: parse(b)?,
            }),
            None => {
                let n = parse(s)?;
                Ok(Self { n_theta: n, n_s: n })
            }
        }
    }
}

impl std::fmt::Display for GridSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.n_theta, self.n_s)
    }
}

/// Outcome of a subcommand: exit code, stdout text.
struct Outcome {
    code: u8,
    stdout: String,
}

impl Outcome {
    fn new(code: u8, stdout: String) -> Self {
        Self { code, stdout }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::DegenerateField(_) => EXIT_DEGENERATE,
        Error::NonConvergence { .. } => EXIT_DIAGNOSTIC,
        _ => EXIT_INPUT,
    }
}

fn out_path(p: &Path) -> PathBuf {
    match std::env::var_os("CAPCONE_OUT_DIR") {
        Some(dir) if p.is_relative() => Path::new(&dir).join(p),
        _ => p.to_path_buf(),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn angle(cli_degrees: bool, x: f64) -> f64 {
    if cli_degrees {
        x * PI / 180.0
    } else {
        x
    }
}

#[derive(Serialize)]
struct Classification {
    case: CapCase,
    #[serde(rename = "H")]
    h: HSign,
}

fn classify(a: &AngleArgs, degrees: bool) -> Result<Outcome, Error> {
    let (gamma, phi) = (angle(degrees, a.gamma), angle(degrees, a.phi));
    let c = Classification {
        case: classify_configuration(gamma, phi)?,
        h: sign_of_h(gamma, phi)?,
    };
    Ok(Outcome::new(EXIT_PASS, serde_json::to_string(&c).expect("serializes") + "\n"))
}

fn construct(a: &ConstructArgs, degrees: bool) -> Result<Outcome, Error> {
    let (gamma, phi) = (angle(degrees, a.angles.gamma), angle(degrees, a.angles.phi));
    let cone = CircularCone::new(phi)?;
    let cap = construct_cap(&cone, gamma, a.distance)?;
    let mesh = mesh_spherical_cap(&cap, a.resolution.n_theta, a.resolution.n_s)?;
    let obj = out_path(&a.out);
    let json = obj.with_extension("json");
    let manifest = RunManifest::new("construct")
        .param("gamma", gamma)
        .param("phi", phi)
        .param("distance", a.distance)
        .param("resolution", a.resolution.to_string())
        .output(&obj)
        .output(&json);
    io::write_obj(&obj, &mesh, &manifest)?;
    io::write_json(&json, &cap, &manifest)?;
    Ok(Outcome::new(EXIT_PASS, io::to_json(&cap)))
}

fn sweep(a: &SweepArgs, degrees: bool) -> Result<Outcome, Error> {
    let phi = angle(degrees, a.phi);
    let cone = Cone::circular(phi)?;
    let mesh = io::read_obj(&a.input)?.mesh;
    let opts = SweepOptions {
        ray_samples: a.ray_samples,
        radius_samples: a.radius_samples,
        require_radial_graph: !a.allow_non_graph,
        ..SweepOptions::default()
    };
    let report = spherical_sweep(&mesh, &cone, &opts)?;
    let code = match report.terminal {
        Terminal::ReachedZero => EXIT_PASS,
        Terminal::Stalled => EXIT_DIAGNOSTIC,
    };
    let text = io::to_json(&report);
    if let Some(out) = &a.out {
        let out = out_path(out);
        let manifest = RunManifest::new("sweep")
            .param("phi", phi)
            .param("options", opts)
            .input(&a.input)
            .output(&out);
        io::write_json(&out, &report, &manifest)?;
    }
    Ok(Outcome::new(code, text))
}

fn write_solution(
    prefix: &Path,
    result: &SolverResult,
    history: &[crate::solver::HistoryRow],
    cone: &Cone,
    manifest: RunManifest,
) -> Result<(), Error> {
    let csv = with_suffix(prefix, ".csv");
    let obj = with_suffix(prefix, ".obj");
    let hist = with_suffix(prefix, "_history.csv");
    let json = with_suffix(prefix, ".json");
    let manifest = manifest.output(&csv).output(&obj).output(&hist).output(&json);
    io::write_field_csv(&csv, &result.field, &manifest)?;
    io::write_obj(&obj, &mesh_radial_graph(&result.field, cone)?, &manifest)?;
    io::write_history_csv(&hist, history, &manifest)?;
    io::write_json(&json, result, &manifest)
}

fn solve(a: &SolveArgs, degrees: bool) -> Result<Outcome, Error> {
    let (gamma, phi) = (angle(degrees, a.angles.gamma), angle(degrees, a.angles.phi));
    let cone = Cone::circular(phi)?;
    let volume = a.volume.unwrap_or(2.0 * PI * (1.0 - phi.cos()) / 3.0);
    let mut config = SolverConfig::new(gamma, volume, a.grid.n_theta, a.grid.n_s);
    config.max_iterations = a.max_iterations;
    config.grad_tolerance = a.grad_tolerance;
    let prefix = out_path(&a.out);
    let manifest = RunManifest::new("solve")
        .param("gamma", gamma)
        .param("phi", phi)
        .param("volume", volume)
        .param("grid", a.grid.to_string())
        .param("maxIterations", a.max_iterations)
        .param("gradTolerance", a.grad_tolerance);
    let (result, history, converged) = match solve_with_history(&config, &cone, None) {
        Ok((r, h)) => (r, h, true),
        Err(Error::NonConvergence { best, .. }) => (*best, Vec::new(), false),
        Err(e) => return Err(e),
    };
    write_solution(&prefix, &result, &history, &cone, manifest.clone())?;
    let report = verify_equilibrium(&result, &cone, gamma)?;
    let eq = with_suffix(&prefix, "_equilibrium.json");
    io::write_json(&eq, &report, &manifest.output(&eq))?;
    let code = if converged && report.sign_agrees {
        EXIT_PASS
    } else {
        EXIT_DIAGNOSTIC
    };
    Ok(Outcome::new(code, io::to_json(&report)))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct VerifyReport<T: Serialize> {
    check: Check,
    passed: bool,
    tolerance: f64,
    #[serde(flatten)]
    details: T,
}

fn verify(a: &VerifyArgs) -> Result<Outcome, Error> {
    let mesh = io::read_obj(&a.input)?.mesh;
    let (passed, text, tolerance) = match a.check {
        Check::Inversion => {
            let tol = a.tolerance.unwrap_or(0.05);
            let c = inversion_check(&mesh, a.radius)?;
            let ok = c.max_relative_error < tol;
            (ok, serde_json::to_value(VerifyReport { check: a.check, passed: ok, tolerance: tol, details: c }), tol)
        }
        Check::Residual => {
            let tol = a.tolerance.unwrap_or(1e-6);
            let c = residual_check(&mesh, a.radius)?;
            let ok = c.max_abs_residual < tol;
            (ok, serde_json::to_value(VerifyReport { check: a.check, passed: ok, tolerance: tol, details: c }), tol)
        }
        Check::Symmetry => {
            let tol = a.tolerance.unwrap_or(SymmetryOptions::default().rel_tol);
            let opts = SymmetryOptions {
                rel_tol: tol,
                ..SymmetryOptions::default()
            };
            let c = planar_symmetry_detect(&mesh, &opts);
            let ok = c.found;
            (ok, serde_json::to_value(VerifyReport { check: a.check, passed: ok, tolerance: tol, details: c }), tol)
        }
    };
    let value = text.expect("reports serialize");
    if let Some(out) = &a.out {
        let out = out_path(out);
        let manifest = RunManifest::new("verify")
            .param("check", a.check)
            .param("radius", a.radius)
            .param("tolerance", tolerance)
            .input(&a.input)
            .output(&out);
        io::write_json(&out, &value, &manifest)?;
    }
    let code = if passed { EXIT_PASS } else { EXIT_DIAGNOSTIC };
    Ok(Outcome::new(code, io::to_json(&value)))
}

/// Runs a parsed command line, printing to stdout/stderr.
pub fn run(cli: &Cli) -> u8 {
    let outcome = match &cli.command {
        Command::Classify(a) => classify(a, cli.degrees),
        Command::Construct(a) => construct(a, cli.degrees),
        Command::Sweep(a) => sweep(a, cli.degrees),
        Command::Solve(a) => solve(a, cli.degrees),
        Command::Verify(a) => verify(a),
    };
    match outcome {
        Ok(o) => {
            print!("{}", o.stdout);
            o.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

/// Entry point of the `capcone` binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(&cli))
}

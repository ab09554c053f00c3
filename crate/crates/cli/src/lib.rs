//! Command-line front end: argument parsing, dispatch to the library and
//! serialization of results as JSON or CSV.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use kreinsl::acceptance;
use kreinsl::bessel::{self, BesselParams};
use kreinsl::krein::{defect_solutions, DefectConfig, ResolventOp, Setting};
use kreinsl::oracle::{self, regular_green, OracleProblem, RegularConditions};
use kreinsl::slcore::{classify_endpoint, BoundaryBasis, Endpoint, Extension, SLProblem};
use kreinsl::ssf::trace_from_ssf;
use kreinsl::{Error, Result};

pub const OUT_DIR_ENV: &str = "KREINSL_OUT_DIR";

/// Angles closer than this to π/2 are taken to be π/2, so that truncated
/// decimal input reaches the Krein–von Neumann case.
pub const HALF_PI_SNAP: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "kreinsl", version, about = "Krein resolvent identities for singular Sturm-Liouville operators")]
pub struct Cli {
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weyl classification of an endpoint.
    Classify(ClassifyArgs),
    /// Trace of the resolvent difference for the Bessel family.
    Trace(TraceArgs),
    /// Spectral shift function on a grid.
    Ssf(SsfArgs),
    /// Negative eigenvalue, predicted and by finite differences.
    Eigen(EigenArgs),
    /// Resolvent kernel at a point.
    Greens(GreensArgs),
    /// Run acceptance criteria.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EndpointArg {
    A,
    B,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Family name, e.g. `bessel:0.5` or `regular-free`.
    #[arg(long, conflicts_with = "problem_file")]
    pub problem: Option<String>,
    /// JSON problem description.
    #[arg(long)]
    pub problem_file: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub endpoint: EndpointArg,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct BesselArgs {
    #[arg(long)]
    pub nu: f64,
    #[arg(long)]
    pub theta: f64,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub bessel: BesselArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub z_re: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub z_im: f64,
    /// Also compute the finite-difference matrix trace (ν = 1/2 only).
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = 1e-3)]
    pub h: f64,
    #[arg(long, default_value_t = 40.0)]
    pub length: f64,
}

#[derive(Debug, Args)]
pub struct SsfArgs {
    #[command(flatten)]
    pub bessel: BesselArgs,
    /// `lo:hi:n`, n equally spaced points including both ends.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EigenArgs {
    #[command(flatten)]
    pub bessel: BesselArgs,
    #[arg(long, default_value_t = 1e-3)]
    pub h: f64,
    #[arg(long, default_value_t = 40.0)]
    pub length: f64,
}

#[derive(Debug, Args)]
pub struct GreensArgs {
    /// Bessel order; omit together with --theta for the regular problem.
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Regular problem −y″ on `a:b`.
    #[arg(long, allow_hyphen_values = true)]
    pub regular: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Coupled condition matrix `r11,r12,r21,r22` with det R = 1.
    #[arg(long, allow_hyphen_values = true)]
    pub coupled: Option<String>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub z_re: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub z_im: f64,
    #[arg(long)]
    pub x: f64,
    #[arg(long)]
    pub y: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Comma-separated criterion ids; all when omitted.
    #[arg(long, value_delimiter = ',')]
    pub criteria: Vec<u8>,
}

/// Complex numbers as `{re, im}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Cx {
    fn from(z: Complex64) -> Self {
        Cx { re: z.re, im: z.im }
    }
}

pub enum Artifact {
    Json(Value),
    Csv(String),
}

impl Artifact {
    fn render(&self) -> String {
        match self {
            Artifact::Json(v) => serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n",
            Artifact::Csv(s) => s.clone(),
        }
    }

    fn extension(&self) -> &'static str {
        match self {
            Artifact::Json(_) => "json",
            Artifact::Csv(_) => "csv",
        }
    }
}

pub fn snap_theta(theta: f64) -> f64 {
    if (theta - FRAC_PI_2).abs() < HALF_PI_SNAP {
        FRAC_PI_2
    } else {
        theta
    }
}

fn params(b: &BesselArgs) -> Result<BesselParams> {
    BesselParams::new(b.nu, snap_theta(b.theta))
}

fn schema(cmd: &str) -> String {
    format!("kreinsl.{cmd}/1")
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types serialize")
}

fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::Usage(format!("grid {text:?} is not lo:hi:n"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect())
}

fn parse_interval(text: &str) -> Result<(f64, f64)> {
    let bad = || Error::Usage(format!("interval {text:?} is not a:b with a < b"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(bad());
    }
    Ok((a, b))
}

fn parse_matrix(text: &str) -> Result<[[f64; 2]; 2]> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Usage(format!("matrix {text:?} is not r11,r12,r21,r22")))?;
    if v.len() != 4 {
        return Err(Error::Usage(format!("matrix {text:?} needs four entries")));
    }
    Ok([[v[0], v[1]], [v[2], v[3]]])
}

fn classify(args: &ClassifyArgs) -> Result<Artifact> {
    let problem = match (&args.problem, &args.problem_file) {
        (Some(name), None) => SLProblem::from_family_name(name)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
            SLProblem::from_json(&text)?
        }
        _ => return Err(Error::Usage("give exactly one of --problem and --problem-file".into())),
    };
    let endpoint = match args.endpoint {
        EndpointArg::A => Endpoint::A,
        EndpointArg::B => Endpoint::B,
    };
    let class = classify_endpoint(&problem, endpoint);
    Ok(Artifact::Json(json!({
        "schema": schema("classify"),
        "problem": to_value(problem.family()),
        "result": to_value(&class),
    })))
}

fn trace(args: &TraceArgs) -> Result<Artifact> {
    let p = params(&args.bessel)?;
    let z = Complex64::new(args.z_re, args.z_im);
    let closed = bessel::trace_diff(&p, z.into())?;
    // the spectral shift route integrates against 1/(λ − z)², so only off the axis
    let via_ssf = if z.im != 0.0 {
        Some(Cx::from(trace_from_ssf(&bessel::spectral_shift(&p)?, z)?))
    } else {
        None
    };
    let mut out = json!({
        "schema": schema("trace"),
        "nu": p.nu,
        "theta": p.theta,
        "z": Cx::from(z),
        "closed_form": Cx::from(closed),
        "from_ssf": via_ssf,
    });
    if args.oracle {
        if p.nu != 0.5 {
            return Err(Error::Regime("the finite-difference trace needs nu = 0.5".into()));
        }
        let rows = oracle::convergence_table(p.theta, z, &[args.h], args.length, closed)?;
        out["oracle"] = json!({
            "h": args.h,
            "length": args.length,
            "value": Cx::from(rows[0].value),
            "abs_error": rows[0].error,
        });
    }
    Ok(Artifact::Json(out))
}

fn ssf(args: &SsfArgs) -> Result<Artifact> {
    let p = params(&args.bessel)?;
    let grid = parse_grid(&args.grid)?;
    let xi = bessel::spectral_shift(&p)?;
    let constants = bessel::ssf_constants(&p)?;
    let case = bessel::ssf_case(&p)?;
    let values: Vec<f64> = grid.iter().map(|&l| xi.evaluate(l)).collect();
    match args.format {
        Format::Json => Ok(Artifact::Json(json!({
            "schema": schema("ssf"),
            "nu": p.nu,
            "theta": p.theta,
            "case": to_value(&case),
            "constants": to_value(&constants),
            "function": to_value(&xi),
            "lambda": grid,
            "xi": values,
        }))),
        Format::Csv => {
            let opt = |v: Option<f64>| v.map_or("none".to_string(), |v| format!("{v}"));
            let mut s = String::new();
            let _ = writeln!(s, "# schema={}", schema("ssf"));
            let _ = writeln!(s, "# nu={} theta={} case={}", p.nu, p.theta, to_value(&case));
            let _ = writeln!(
                s,
                "# e={} lambda_theta_nu={} gamma={}",
                opt(constants.eigenvalue()),
                opt(constants.lambda_theta_nu),
                constants.gamma_const
            );
            s.push_str("lambda,xi\n");
            for (l, v) in grid.iter().zip(&values) {
                let _ = writeln!(s, "{l},{v}");
            }
            Ok(Artifact::Csv(s))
        }
    }
}

fn eigen(args: &EigenArgs) -> Result<Artifact> {
    let p = params(&args.bessel)?;
    let predicted = bessel::ssf_constants(&p)?.eigenvalue();
    let root = bessel::negative_eigenvalue_by_root(&p)?;
    // finite differences cover every θ only at ν = 1/2
    let fd = if p.nu == 0.5 {
        let d = oracle::discretize(&OracleProblem::Bessel { params: p, x_min: 0.0 }, args.h, args.length)?;
        let low = oracle::lowest_eigenvalue(&d)?;
        json!({ "h": args.h, "length": args.length, "lowest": low })
    } else {
        Value::Null
    };
    Ok(Artifact::Json(json!({
        "schema": schema("eigen"),
        "nu": p.nu,
        "theta": p.theta,
        "predicted": predicted,
        "root_of_k": root,
        "oracle": fd,
    })))
}

fn greens(args: &GreensArgs) -> Result<Artifact> {
    let z = Complex64::new(args.z_re, args.z_im);
    if args.x <= 0.0 || args.y <= 0.0 {
        return Err(Error::Parameter("x and y must be positive".into()));
    }
    match (args.nu, args.theta, &args.regular) {
        (Some(nu), Some(theta), None) => {
            let p = BesselParams::new(nu, snap_theta(theta))?;
            let defect = bessel::bessel_defect(p.nu, z.into())?;
            let op = ResolventOp::new(Extension::separated_one_lc(p.theta)?, defect)?;
            let kernel = op.kernel(args.x, args.y)?;
            let reference = kreinsl::krein::greens_kernel(op.defect(), args.x, args.y)?;
            Ok(Artifact::Json(json!({
                "schema": schema("greens"),
                "problem": { "kind": "bessel", "nu": p.nu, "theta": p.theta },
                "z": Cx::from(z),
                "x": args.x,
                "y": args.y,
                "kernel": Cx::from(kernel),
                "reference": Cx::from(reference),
            })))
        }
        (None, None, Some(interval)) => regular_greens(args, interval, z),
        _ => Err(Error::Usage("give --nu and --theta, or --regular a:b".into())),
    }
}

fn regular_greens(args: &GreensArgs, interval: &str, z: Complex64) -> Result<Artifact> {
    let (a, b) = parse_interval(interval)?;
    if !(a < args.x && args.x < b && a < args.y && args.y < b) {
        return Err(Error::Parameter(format!("x and y must lie in ({a}, {b})")));
    }
    let (ext, cond) = match (&args.coupled, args.alpha, args.beta) {
        (Some(m), None, None) => {
            let r = parse_matrix(m)?;
            let eta = args.eta.ok_or_else(|| Error::Usage("--coupled needs --eta".into()))?;
            (Extension::coupled(r, eta)?, RegularConditions::Coupled { r, eta })
        }
        (None, Some(alpha), Some(beta)) => {
            (Extension::separated_two_lc(alpha, beta)?, RegularConditions::Separated { alpha, beta })
        }
        _ => return Err(Error::Usage("give --alpha and --beta, or --coupled with --eta".into())),
    };
    let problem = SLProblem::regular_free(a, b)?;
    let setting = Setting::TwoLc {
        basis_a: BoundaryBasis::regular_free(&problem, Endpoint::A)?,
        basis_b: BoundaryBasis::regular_free(&problem, Endpoint::B)?,
    };
    let defect = defect_solutions(&problem, &setting, z.into(), &DefectConfig::for_problem(&problem))?;
    let op = ResolventOp::new(ext, defect)?;
    let kernel = op.kernel(args.x, args.y)?;
    let direct = regular_green(a, b, &cond, z.into(), args.x, args.y)?;
    Ok(Artifact::Json(json!({
        "schema": schema("greens"),
        "problem": { "kind": "regular", "a": a, "b": b, "extension": to_value(&ext) },
        "z": Cx::from(z),
        "x": args.x,
        "y": args.y,
        "kernel": Cx::from(kernel),
        "direct": Cx::from(direct),
        "abs_difference": (kernel - direct).norm(),
    })))
}

fn verify(args: &VerifyArgs) -> Result<(Artifact, bool)> {
    let ids: Vec<u8> = if args.criteria.is_empty() { (1..=10).collect() } else { args.criteria.clone() };
    let mut results = Vec::new();
    for id in ids {
        results.push(acceptance::run(id)?);
    }
    let passed = results.iter().all(|r| r.passed);
    let value = json!({
        "schema": schema("verify"),
        "passed": passed,
        "results": to_value(&results),
    });
    Ok((Artifact::Json(value), passed))
}

/// Exit status for a library error: 2 for bad input, 3 for numerical failure.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_parameter_error() {
        2
    } else {
        3
    }
}

pub fn error_artifact(e: &Error) -> Artifact {
    Artifact::Json(json!({
        "schema": schema("error"),
        "error": { "kind": e.kind(), "message": e.to_string() },
    }))
}

fn dispatch(cli: &Cli) -> Result<(Artifact, i32)> {
    let done = |a: Artifact| Ok((a, 0));
    match &cli.command {
        Command::Classify(a) => done(classify(a)?),
        Command::Trace(a) => done(trace(a)?),
        Command::Ssf(a) => done(ssf(a)?),
        Command::Eigen(a) => done(eigen(a)?),
        Command::Greens(a) => done(greens(a)?),
        Command::Verify(a) => {
            let (art, passed) = verify(a)?;
            Ok((art, if passed { 0 } else { 1 }))
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Classify(_) => "classify",
        Command::Trace(_) => "trace",
        Command::Ssf(_) => "ssf",
        Command::Eigen(_) => "eigen",
        Command::Greens(_) => "greens",
        Command::Verify(_) => "verify",
    }
}

fn emit(cli: &Cli, artifact: &Artifact, stdout: &mut dyn Write) -> std::io::Result<Option<PathBuf>> {
    let path = match (&cli.output, std::env::var_os(OUT_DIR_ENV)) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => {
            let dir = PathBuf::from(dir);
            std::fs::create_dir_all(&dir)?;
            Some(dir.join(format!("{}.{}", command_name(&cli.command), artifact.extension())))
        }
        (None, None) => None,
    };
    match &path {
        Some(p) => std::fs::write(p, artifact.render())?,
        None => stdout.write_all(artifact.render().as_bytes())?,
    }
    Ok(path)
}

/// Parses `argv` (program name first), runs the command and writes the
/// artifact. Returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return 0;
        }
        Err(e) => {
            let _ = write!(stderr, "{e}");
            let err = Error::Usage(e.kind().to_string());
            let _ = stdout.write_all(error_artifact(&err).render().as_bytes());
            return 2;
        }
    };
    let (artifact, code) = match dispatch(&cli) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "kreinsl: {e}");
            (error_artifact(&e), exit_code(&e))
        }
    };
    match emit(&cli, &artifact, stdout) {
        Ok(Some(p)) => {
            let _ = writeln!(stderr, "wrote {}", p.display());
            code
        }
        Ok(None) => code,
        Err(e) => {
            let _ = writeln!(stderr, "kreinsl: cannot write output: {e}");
            3
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:10:5").unwrap(), vec![0.0, 2.5, 5.0, 7.5, 10.0]);
        assert_eq!(parse_grid("-1:1:1").unwrap(), vec![-1.0]);
        assert!(parse_grid("0:10").is_err());
        assert!(parse_grid("1:0:3").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn theta_snapping() {
        assert_eq!(snap_theta(1.5707963), FRAC_PI_2);
        assert_eq!(snap_theta(1.57), 1.57);
    }

    #[test]
    fn matrices_and_intervals() {
        assert_eq!(parse_matrix("2,0,0.3,0.5").unwrap(), [[2.0, 0.0], [0.3, 0.5]]);
        assert!(parse_matrix("1,2,3").is_err());
        assert_eq!(parse_interval("0:1").unwrap(), (0.0, 1.0));
        assert!(parse_interval("1:0").is_err());
    }

    #[test]
    fn error_codes() {
        assert_eq!(exit_code(&Error::Parameter("x".into())), 2);
        assert_eq!(exit_code(&Error::Convergence("x".into())), 3);
    }
}

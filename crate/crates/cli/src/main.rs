//! `hyperquadric`: principal-curvature tables, contact classification,
//! vector decomposition and the verification suites.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage error.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use hyperquadric::hypersurface::mean_curvature;
use hyperquadric::models::{
    build_frame, classify_with_band, focal_map_kernel, tube_contact_constant, tube_table,
};
use hyperquadric::oracles::{transport_fd_check, tube_shape_from_ode};
use hyperquadric::quadric::{singular_decompose, UNIT_TOL};
use hyperquadric::report::round_sig15;
use hyperquadric::{
    run_suite, Check, ClassificationCase, Error, FocalModel, OdeConfig, PrincipalCurvatureTable,
    Report, SampleKind, SampleStream, Suite, SuiteConfig, TangentVector,
};

/// Inputs within this distance of unit length are accepted as is.
const DECOMPOSE_UNIT_TOL: f64 = 1e-6;
/// Inputs within this distance are renormalized with a warning.
const DECOMPOSE_RENORM_TOL: f64 = 1e-3;
/// Default horosphere band for typed constants, which rarely carry more than
/// seven decimals of sqrt(2). The library default is much tighter.
const CLI_HOROSPHERE_BAND: f64 = 1e-7;
/// ODE shape operators must match the closed forms this closely.
const ODE_TOL: f64 = 1e-7;
const TRANSPORT_TOL: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(
    name = "hyperquadric",
    version,
    about = "Contact hypersurfaces of the complex hyperbolic quadric"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Model {
    QuadricTube,
    RealformTube,
    Horosphere,
}

impl From<Model> for FocalModel {
    fn from(m: Model) -> Self {
        match m {
            Model::QuadricTube => FocalModel::ComplexQuadricHypersurface,
            Model::RealformTube => FocalModel::RealHyperbolicForm,
            Model::Horosphere => FocalModel::Horosphere,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Principal curvatures of a model hypersurface with k, H and alpha*mu.
    Table {
        #[arg(long, value_enum)]
        model: Model,
        /// Tube radius; ignored for the horosphere.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        r: f64,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// The contact hypersurface with constant k.
    Classify {
        #[arg(long, allow_negative_numbers = true)]
        k: f64,
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// Half-width of the horosphere band around sqrt(2) [default: 1e-7].
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Singular decomposition of a unit tangent vector.
    Decompose {
        /// JSON array of [re, im] pairs, e.g. '[[1,0],[0,0],[0,0]]'.
        #[arg(long)]
        vector: String,
        /// Expected length of the vector; inferred when omitted.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Replaces the per-check residual tolerances.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Compare ODE-integrated shape operators with the closed forms and
    /// probe parallel transport by finite differences.
    Oracle {
        #[arg(long, value_enum, default_value_t = Model::QuadricTube)]
        model: Model,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        r: f64,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(2),
            };
        }
    };
    let out = match cli.command {
        Command::Table {
            model,
            r,
            m,
            format,
        } => cmd_table(model.into(), r, m, format),
        Command::Classify { k, m, tol, format } => cmd_classify(k, m, tol, format),
        Command::Decompose { vector, m, format } => cmd_decompose(&vector, m, format),
        Command::Verify {
            suite,
            m,
            seed,
            samples,
            tol,
            step,
            format,
        } => cmd_verify(&suite, m, seed, samples, tol, step, format),
        Command::Oracle {
            model,
            r,
            m,
            seed,
            step,
            tol,
            format,
        } => cmd_oracle(model.into(), r, m, seed, step, tol, format),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("output serializes")
}

fn ode_config(step: Option<f64>) -> Result<OdeConfig, Failure> {
    Ok(match step {
        Some(s) => OdeConfig::with_step(s)?,
        None => OdeConfig::default(),
    })
}

#[derive(Serialize)]
struct TableOutput<'a> {
    model: &'a str,
    r: Option<f64>,
    m: usize,
    alpha: f64,
    lambda: f64,
    mu: f64,
    k: f64,
    mean_curvature: f64,
    alpha_mu: f64,
    table: &'a PrincipalCurvatureTable,
}

fn cmd_table(model: FocalModel, r: f64, m: usize, format: Format) -> CmdResult {
    let table = tube_table(model, r, m)?;
    let k = tube_contact_constant(model, r)?;
    let h = mean_curvature(&build_frame(model, r, m)?).h;
    let out = TableOutput {
        model: model.slug(),
        r: model.is_tube().then_some(r),
        m,
        alpha: round_sig15(table.alpha()),
        lambda: round_sig15(table.lambda()),
        mu: round_sig15(table.mu()),
        k: round_sig15(k),
        mean_curvature: round_sig15(h),
        alpha_mu: round_sig15(table.alpha() * table.mu()),
        table: &table,
    };
    match format {
        Format::Json => println!("{}", json(&out)),
        Format::Table => {
            match out.r {
                Some(r) => println!("{}  r = {r}  m = {m}", out.model),
                None => println!("{}  m = {m}", out.model),
            }
            println!("{:<10} {:>14} {:>6}", "space", "curvature", "mult");
            for e in &table.entries {
                println!(
                    "{:<10} {:>14.9} {:>6}",
                    label(e.label),
                    e.value,
                    e.multiplicity
                );
            }
            println!("k = {k:.9}  H = {h:.9}  alpha*mu = {:.9}", out.alpha_mu);
        }
    }
    Ok(())
}

fn label(l: hyperquadric::EigenLabel) -> &'static str {
    match l {
        hyperquadric::EigenLabel::ReebLine => "xi",
        hyperquadric::EigenLabel::JVMinusN => "J(V-N)",
        hyperquadric::EigenLabel::VMinusN => "V-N",
    }
}

#[derive(Serialize)]
struct ClassifyOutput {
    k: f64,
    m: usize,
    #[serde(flatten)]
    case: ClassificationCase,
    focal_kernel: usize,
}

fn cmd_classify(k: f64, m: usize, tol: Option<f64>, format: Format) -> CmdResult {
    if !(k.is_finite() && k > 0.0) {
        return Err(Failure::Usage(format!(
            "k must be a positive number, got {k}"
        )));
    }
    let case = classify_with_band(k, tol.unwrap_or(CLI_HOROSPHERE_BAND))?;
    let out = ClassifyOutput {
        k,
        m,
        case,
        focal_kernel: focal_map_kernel(&case, m)?,
    };
    match format {
        Format::Json => println!("{}", json(&out)),
        Format::Table => {
            println!("case      {}", case.case_id);
            match case.r {
                Some(r) => println!("r         {r:.9}"),
                None => println!("r         -"),
            }
            println!("alpha     {:.9}", case.alpha);
            println!("lambda    {:.9}", case.lambda);
            println!("mu        {:.9}", case.mu);
            println!("dim ker   {}", out.focal_kernel);
        }
    }
    Ok(())
}

fn parse_vector(text: &str) -> Result<Vec<Complex64>, Failure> {
    let pairs: Vec<[f64; 2]> = serde_json::from_str(text)
        .map_err(|e| Failure::Usage(format!("malformed --vector: {e}")))?;
    if pairs.is_empty() {
        return Err(Failure::Usage("empty --vector".into()));
    }
    if pairs.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Failure::Usage("--vector has non-finite entries".into()));
    }
    Ok(pairs
        .into_iter()
        .map(|[re, im]| Complex64::new(re, im))
        .collect())
}

#[derive(Serialize)]
struct DecomposeOutput {
    m: usize,
    t: f64,
    theta: f64,
    kind: &'static str,
    theta_determined: bool,
    y_determined: bool,
    x: Vec<[f64; 2]>,
    y: Vec<[f64; 2]>,
    reconstruction_residual: f64,
    renormalized: bool,
}

fn pairs(v: &TangentVector) -> Vec<[f64; 2]> {
    v.to_complex()
        .iter()
        .map(|w| [round_sig15(w.re), round_sig15(w.im)])
        .collect()
}

fn cmd_decompose(text: &str, m: Option<usize>, format: Format) -> CmdResult {
    let w = parse_vector(text)?;
    if let Some(m) = m {
        if m != w.len() {
            return Err(Failure::Usage(format!(
                "--m {m} but the vector has {} entries",
                w.len()
            )));
        }
    }
    let mut z = TangentVector::from_complex(&w);
    let off = (z.norm() - 1.0).abs();
    let renormalized = off > DECOMPOSE_UNIT_TOL;
    if off > DECOMPOSE_RENORM_TOL {
        return Err(Failure::Usage(format!(
            "vector is not unit length (norm {})",
            z.norm()
        )));
    }
    if renormalized {
        eprintln!("warning: renormalizing vector of norm {}", z.norm());
        z = z.normalized();
    } else if off > UNIT_TOL {
        z = z.normalized();
    }
    let d = singular_decompose(&z)?;
    let residual = (&d.reconstruct() - &z).norm();
    let out = DecomposeOutput {
        m: z.m(),
        t: round_sig15(d.t),
        theta: round_sig15(d.theta),
        kind: d.kind.label(),
        theta_determined: d.theta_determined,
        y_determined: d.y_determined,
        x: pairs(&d.x),
        y: pairs(&d.y),
        reconstruction_residual: round_sig15(residual),
        renormalized,
    };
    match format {
        Format::Json => println!("{}", json(&out)),
        Format::Table => {
            println!("kind      {}", out.kind);
            println!("t         {:.12}", d.t);
            if d.theta_determined {
                println!("theta     {:.12}", d.theta);
            } else {
                println!("theta     {:.12} (not determined)", d.theta);
            }
            println!("residual  {residual:.3e}");
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    suite: &str,
    m: usize,
    seed: u64,
    samples: usize,
    tol: Option<f64>,
    step: Option<f64>,
    format: Format,
) -> CmdResult {
    let suite: Suite = suite.parse()?;
    let cfg = SuiteConfig {
        m,
        seed,
        samples,
        tol,
        ode: ode_config(step)?,
    };
    let report = run_suite(suite, &cfg)?;
    emit(&report, format)
}

fn emit(report: &Report, format: Format) -> CmdResult {
    match format {
        Format::Json => println!("{}", report.to_json()),
        Format::Table => print!("{}", report.render_table()),
    }
    if report.overall {
        Ok(())
    } else {
        let names: Vec<_> = report.failures().map(|c| c.name.as_str()).collect();
        Err(Failure::Verification(names.join(", ")))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_oracle(
    model: FocalModel,
    r: f64,
    m: usize,
    seed: u64,
    step: Option<f64>,
    tol: Option<f64>,
    format: Format,
) -> CmdResult {
    let cfg = ode_config(step)?;
    let closed = tube_table(model, r, m)?;
    let mut checks = Vec::new();
    if model.is_tube() {
        let ode = tube_shape_from_ode(model, r, m, &cfg)?;
        checks.push(Check::residual(
            format!("{}/table_vs_closed_form", model.slug()),
            ode.table.max_difference(&closed),
            ODE_TOL,
        ));
        checks.push(Check::residual(
            format!("{}/off_diagonal", model.slug()),
            ode.off_diagonal(),
            ODE_TOL,
        ));
    } else {
        eprintln!("note: the horosphere has no focal set; only the transport probe runs");
    }
    let mut stream = SampleStream::new(seed);
    let x = stream.unit_tangent(m, SampleKind::Any);
    let t = if model.is_tube() { r } else { 1.0 };
    let tc = transport_fd_check(&x, t, &cfg)?;
    checks.push(Check::residual(
        "transport/covariant",
        tc.covariant,
        TRANSPORT_TOL,
    ));
    checks.push(Check::residual(
        "transport/metric_drift",
        tc.metric_drift,
        TRANSPORT_TOL,
    ));
    checks.push(Check::residual(
        "transport/j_drift",
        tc.j_drift,
        TRANSPORT_TOL,
    ));
    checks.push(Check::residual(
        "transport/section_rate",
        (tc.q - tc.omega).abs(),
        TRANSPORT_TOL,
    ));
    checks.push(Check::residual(
        "transport/section_residual",
        tc.q_residual,
        TRANSPORT_TOL,
    ));
    if let Some(tol) = tol {
        checks = checks.into_iter().map(|c| c.with_tolerance(tol)).collect();
    }
    emit(&Report::new("oracle", m, seed, checks), format)
}

//! `poincare` command-line front end.
//!
//! Exit status: 0 when every certificate of the run holds, 1 when some
//! certificate fails (the failing records are listed on stderr) or a solver
//! breaks down, 2 on usage errors.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use poincare::bounds::{
    self, sort_certificates, to_csv, to_json_lines, verify_exponential, verify_proposition,
    verify_reduction, verify_slicing_bound, verify_theorem_2d, verify_theorem_batch, BatchConfig,
    BoundCertificate, CertificateKind, Provenance, Tolerances,
};
use poincare::field::{AffineField, PlanarWeight};
use poincare::geometry::ConvexPolygon;
use poincare::ptrig::{pi_p_closed, pi_p_quadrature, wirtinger_bound, PExponent};
use poincare::rayleigh::minimize_quotient;
use poincare::slicing::{decompose, zero_moment_shift};
use poincare::solver::SolverRegistry;
use poincare::weights::{
    random_log_concave, random_smooth_log_concave, WeightFamily, WeightFunction,
};
use poincare::Error;

#[derive(Parser)]
#[command(
    name = "poincare",
    version,
    about = "Sharp weighted Poincaré bounds: 1D eigenvalues, slicing and certificates"
)]
struct Cli {
    /// Write the artifact here instead of stdout.
    #[arg(long, short, global = true, env = "POINCARE_OUTPUT")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// π_p from the closed form, optionally checked by quadrature.
    Pip(PipArgs),
    /// First nontrivial Neumann eigenvalue of a weighted 1D p-Laplacian.
    Eig1d(Eig1dArgs),
    /// Discretized Rayleigh-quotient oracle compared with shooting.
    Oracle1d(Oracle1dArgs),
    /// Certificate batches for the one-dimensional inequality.
    VerifyProp(VerifyPropArgs),
    /// Balanced convex decomposition of a polygon.
    Slice(SliceArgs),
    /// Finite-element certificates of the planar bound.
    #[command(name = "verify-2d")]
    Verify2d(Verify2dArgs),
    /// CSV table from certificate JSON lines.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
    Svg,
}

#[derive(Args)]
struct PipArgs {
    #[arg(long, env = "POINCARE_P")]
    p: f64,
    /// Also evaluate the defining integral by adaptive quadrature.
    #[arg(long)]
    quadrature: bool,
    #[arg(long, env = "POINCARE_TOL", default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, value_enum, default_value = "text", env = "POINCARE_FORMAT")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Constant,
    Exponential,
    LogQuadratic,
    Power,
    /// Seeded random log-concave weight.
    Random,
    /// Seeded random smooth positive log-concave weight.
    RandomSmooth,
}

/// Weight on `[0, L]`: a named family or a JSON file.
#[derive(Args)]
struct WeightArgs {
    #[arg(long, value_enum, default_value = "constant", env = "POINCARE_WEIGHT")]
    weight: Family,
    /// JSON weight `{"family":..,"params":{..},"L":..}`; overrides --weight and --L.
    #[arg(long, env = "POINCARE_WEIGHT_FILE")]
    weight_file: Option<PathBuf>,
    #[arg(long = "L", env = "POINCARE_L", default_value_t = 1.0)]
    length: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    kappa: f64,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.5)]
    m: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = -0.5)]
    x0: f64,
    #[arg(long, env = "POINCARE_SEED", default_value_t = 0)]
    seed: u64,
}

impl WeightArgs {
    fn build(&self) -> Result<WeightFunction, Failure> {
        if let Some(path) = &self.weight_file {
            return read_json(path);
        }
        let l = self.length;
        let w = match self.weight {
            Family::Constant => WeightFunction::constant(l),
            Family::Exponential => WeightFunction::exponential(self.kappa, l),
            Family::LogQuadratic => WeightFunction::new(
                WeightFamily::LogQuadratic {
                    a: self.a,
                    m: self.m,
                },
                l,
            ),
            Family::Power => WeightFunction::new(
                WeightFamily::Power {
                    alpha: self.alpha,
                    x0: self.x0,
                },
                l,
            ),
            Family::Random => random_log_concave(self.seed, l),
            Family::RandomSmooth => random_smooth_log_concave(self.seed, l),
        };
        w.map_err(Failure::from)
    }
}

#[derive(Args)]
struct Eig1dArgs {
    #[command(flatten)]
    weight: WeightArgs,
    #[arg(long, env = "POINCARE_P", default_value_t = 2.0)]
    p: f64,
    /// Registered solver name (shooting, riccati, fem).
    #[arg(long, env = "POINCARE_SOLVER", default_value = "shooting")]
    solver: String,
    #[arg(long, env = "POINCARE_TOL", default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    rel_tol: f64,
    #[arg(long, value_enum, default_value = "text", env = "POINCARE_FORMAT")]
    format: Format,
}

#[derive(Args)]
struct Oracle1dArgs {
    #[command(flatten)]
    weight: WeightArgs,
    #[arg(long, env = "POINCARE_P", default_value_t = 2.0)]
    p: f64,
    #[arg(long, env = "POINCARE_NODES", default_value_t = 2001)]
    nodes: usize,
    #[arg(long, env = "POINCARE_TOL", default_value_t = 1e-10)]
    tol: f64,
    /// Largest accepted relative gap to the shooting eigenvalue.
    #[arg(long, default_value_t = 1e-4)]
    limit: f64,
    /// Include the discrete minimiser in the output.
    #[arg(long)]
    with_function: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    /// Seeded log-concave weights against (π_p/L)^p.
    Proposition,
    /// Exponential weights, shooting against the Riccati length.
    Exponential,
    /// Smooth weights against their exponential comparison weight.
    Reduction,
}

#[derive(Args)]
struct VerifyPropArgs {
    #[arg(long, value_enum, default_value = "proposition")]
    suite: Suite,
    /// Seed list: `a..b` (inclusive), `a..=b`, or comma separated.
    #[arg(long, env = "POINCARE_SEEDS", default_value = "0..199")]
    seeds: String,
    /// Comma-separated exponents.
    #[arg(long, env = "POINCARE_P", default_value = "1.5,2,3")]
    p: String,
    /// Comma-separated κ values for `--suite exponential`.
    #[arg(
        long,
        allow_hyphen_values = true,
        default_value = "-5,-2,-0.5,0,0.5,2,5"
    )]
    kappas: String,
    #[arg(long = "L", env = "POINCARE_L", default_value_t = 1.0)]
    length: f64,
    #[arg(long, env = "POINCARE_TOL", default_value_t = 1e-10)]
    solver_tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    rel_tol: f64,
    #[arg(long, env = "POINCARE_NODES", default_value_t = 2001)]
    oracle_nodes: usize,
    #[arg(long, default_value_t = 1e-4)]
    oracle_limit: f64,
    /// Cross-check every n-th seed at p ≠ 2 as well; 0 disables.
    #[arg(long, default_value_t = 20)]
    subsample: u64,
    #[arg(long, value_enum, default_value = "json", env = "POINCARE_FORMAT")]
    format: Format,
}

/// Convex polygon: `square`, `random:SEED`, `regular:N`, or a JSON file of vertices.
#[derive(Args)]
struct PolygonArgs {
    #[arg(long, env = "POINCARE_POLYGON", default_value = "square")]
    polygon: String,
}

impl PolygonArgs {
    fn build(&self) -> Result<ConvexPolygon, Failure> {
        let spec = self.polygon.as_str();
        if spec == "square" {
            return Ok(ConvexPolygon::unit_square());
        }
        if let Some(s) = spec.strip_prefix("random:") {
            return Ok(ConvexPolygon::random(parse_num(s, "polygon seed")?));
        }
        if let Some(n) = spec.strip_prefix("regular:") {
            return Ok(ConvexPolygon::regular(parse_num(n, "polygon sides")?, 1.0)?);
        }
        read_json(&PathBuf::from(spec))
    }
}

/// Planar weight: `constant`, `random:SEED`, or a JSON file.
#[derive(Args)]
struct PlanarWeightArgs {
    #[arg(
        long = "weight",
        env = "POINCARE_PLANAR_WEIGHT",
        default_value = "constant"
    )]
    planar_weight: String,
}

impl PlanarWeightArgs {
    fn build(&self) -> Result<PlanarWeight, Failure> {
        let spec = self.planar_weight.as_str();
        let w = if spec == "constant" {
            PlanarWeight::Constant { c: 1.0 }
        } else if let Some(s) = spec.strip_prefix("random:") {
            PlanarWeight::random(parse_num(s, "weight seed")?)
        } else {
            read_json(&PathBuf::from(spec))?
        };
        w.validate()?;
        Ok(w)
    }
}

#[derive(Args)]
struct SliceArgs {
    #[command(flatten)]
    polygon: PolygonArgs,
    #[command(flatten)]
    weight: PlanarWeightArgs,
    /// Field u = ux·x + uy·y, shifted to zero moment.
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    ux: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    uy: f64,
    #[arg(long, env = "POINCARE_P", default_value_t = 2.0)]
    p: f64,
    /// Comma-separated slice diameters; the decomposition is emitted for the last.
    #[arg(long, env = "POINCARE_EPSILON", default_value = "0.2")]
    epsilon: String,
    #[arg(long, env = "POINCARE_TOL", default_value_t = 1e-10)]
    tol: f64,
    /// Also solve every slice and certify it (JSON report, exit status).
    #[arg(long)]
    certify: bool,
    #[arg(long, value_enum, default_value = "json", env = "POINCARE_FORMAT")]
    format: Format,
}

#[derive(Args)]
struct Verify2dArgs {
    #[command(flatten)]
    polygon: PolygonArgs,
    #[command(flatten)]
    weight: PlanarWeightArgs,
    /// Seeded random (polygon, weight) pairs instead of --polygon/--weight.
    #[arg(long, env = "POINCARE_SEEDS")]
    seeds: Option<String>,
    #[arg(long, env = "POINCARE_P", default_value_t = 2.0)]
    p: f64,
    #[arg(long, env = "POINCARE_MESH_H", default_value_t = 0.05)]
    mesh_h: f64,
    #[arg(long, env = "POINCARE_TOL", default_value_t = 1e-9)]
    tol: f64,
    /// Discretization allowance subtracted from the bound.
    #[arg(long, default_value_t = 0.0)]
    tol_h: f64,
    #[arg(long, value_enum, default_value = "json", env = "POINCARE_FORMAT")]
    format: Format,
}

#[derive(Args)]
struct ReportArgs {
    /// Certificate JSON-lines files; `-` reads stdin.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

/// Failure mode mapped to the exit status.
enum Failure {
    Usage(String),
    Runtime(String),
    Certificates(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::Domain { .. }
            | Error::Validation(_)
            | Error::Degenerate(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, Failure> {
    s.trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("cannot parse {what} from {s:?}")))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse_num(t, what))
        .collect()
}

/// `a..b` and `a..=b` are both inclusive; otherwise a comma-separated list.
fn parse_seeds(s: &str) -> Result<Vec<u64>, Failure> {
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b): (u64, u64) = (parse_num(a, "seed")?, parse_num(b, "seed")?);
        if b < a {
            return Err(Failure::Usage(format!("empty seed range {s:?}")));
        }
        return Ok((a..=b).collect());
    }
    let seeds: Vec<u64> = s
        .split(',')
        .map(|t| parse_num(t, "seed"))
        .collect::<Result<_, _>>()?;
    if seeds.is_empty() {
        return Err(Failure::Usage("no seeds given".into()));
    }
    Ok(seeds)
}

fn exponent(p: f64) -> Result<PExponent, Failure> {
    Ok(PExponent::new(p)?)
}

fn positive(v: f64, what: &str) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::Usage(format!("{what} must be positive, got {v}")))
    }
}

fn read_text(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
            .map_err(|e| Failure::Usage(format!("reading stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("reading {}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, Failure> {
    let text = read_text(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("parsing {}: {e}", path.display())))
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("outputs serialize");
    s.push('\n');
    s
}

fn unsupported(format: Format, command: &str) -> Failure {
    let name = match format {
        Format::Text => "text",
        Format::Json => "json",
        Format::Csv => "csv",
        Format::Svg => "svg",
    };
    Failure::Usage(format!("{command} does not support --format {name}"))
}

fn check(certs: &[BoundCertificate]) -> Result<(), Failure> {
    let failing: Vec<String> = certs
        .iter()
        .filter(|c| !c.holds())
        .map(|c| {
            let reason = c
                .diagnostics
                .clone()
                .unwrap_or_else(|| match &c.cross_check {
                    Some(x) if !x.pass => format!(
                        "{} cross-check rel. error {:e} > {:e}",
                        x.method, x.rel_error, x.limit
                    ),
                    _ => format!("margin {:?} below bound {}", c.margin, c.bound),
                });
            format!("{}: {reason}", c.label())
        })
        .collect();
    if failing.is_empty() {
        Ok(())
    } else {
        Err(Failure::Certificates(failing))
    }
}

fn certificates_out(
    certs: &[BoundCertificate],
    format: Format,
    command: &str,
) -> Result<String, Failure> {
    match format {
        Format::Json => Ok(to_json_lines(certs)),
        Format::Csv => Ok(to_csv(certs)),
        other => Err(unsupported(other, command)),
    }
}

/// Artifact text and certificates whose status decides the exit code.
type Outcome = (String, Vec<BoundCertificate>);

fn pip(args: &PipArgs) -> Result<Outcome, Failure> {
    let p = exponent(args.p)?;
    let closed = pi_p_closed(p);
    let quad = if args.quadrature {
        Some(pi_p_quadrature(p, positive(args.tol, "tol")?)?)
    } else {
        None
    };
    let text = match args.format {
        Format::Text => match &quad {
            None => format!("{closed}\n"),
            Some(q) => format!(
                "{closed}\nquadrature {} (error estimate {:e})\n",
                q.value, q.error
            ),
        },
        Format::Json => pretty(&json!({
            "p": p.get(),
            "pi_p": closed,
            "quadrature": quad.as_ref().map(|q| q.value),
            "quadrature_error": quad.as_ref().map(|q| q.error),
        })),
        other => return Err(unsupported(other, "pip")),
    };
    Ok((text, Vec::new()))
}

fn eig1d(args: &Eig1dArgs) -> Result<Outcome, Failure> {
    let weight = args.weight.build()?;
    let p = exponent(args.p)?;
    let tol = positive(args.tol, "tol")?;
    let registry = SolverRegistry::default();
    if registry.get(&args.solver).is_none() {
        return Err(Failure::Usage(format!(
            "unknown solver {:?}; known: {}",
            args.solver,
            registry.names().join(", ")
        )));
    }
    let prob = poincare::eigen1d::EigenProblem::new(weight.clone(), p);
    let est = registry.solve(&args.solver, &prob, tol)?;
    let bound = wirtinger_bound(p, weight.length());
    let tolerances = Tolerances {
        rel_tol: args.rel_tol,
        solver_tol: tol,
        discretization: 0.0,
    };
    let provenance = Provenance {
        input: serde_json::to_string(&weight).expect("weights serialize"),
        seed: None,
    };
    let cert = BoundCertificate::new(
        CertificateKind::Proposition1d,
        p.get(),
        weight.length(),
        est.lambda,
        bound,
        tolerances,
        provenance,
    );
    let text = match args.format {
        Format::Text => format!("{}\n", est.lambda),
        Format::Json => pretty(&json!({
            "solver": est.solver,
            "lambda": est.lambda,
            "converged": est.converged,
            "weight": weight,
            "p": p.get(),
            "certificate": cert,
        })),
        other => return Err(unsupported(other, "eig1d")),
    };
    Ok((text, vec![cert]))
}

fn oracle1d(args: &Oracle1dArgs) -> Result<Outcome, Failure> {
    let weight = args.weight.build()?;
    let p = exponent(args.p)?;
    let tol = positive(args.tol, "tol")?;
    let shooting = poincare::eigen1d::first_nontrivial_eigenvalue(
        &poincare::eigen1d::EigenProblem::new(weight.clone(), p),
        tol,
    )?;
    let res = minimize_quotient(&weight, p, args.nodes, tol, args.weight.seed)?;
    let check = bounds::CrossCheck::new(
        &format!("p1_fem_{}", args.nodes),
        res.lambda_h,
        shooting.lambda,
        args.limit,
    );
    let mut cert = BoundCertificate::new(
        CertificateKind::Proposition1d,
        p.get(),
        weight.length(),
        shooting.lambda,
        wirtinger_bound(p, weight.length()),
        Tolerances {
            rel_tol: 1e-6,
            solver_tol: tol,
            discretization: 0.0,
        },
        Provenance {
            input: serde_json::to_string(&weight).expect("weights serialize"),
            seed: Some(args.weight.seed),
        },
    )
    .with_cross_check(check);
    if !res.converged {
        cert.diagnostics = Some("descent stopped before convergence".into());
    }
    let mut out = json!({
        "weight": weight,
        "p": p.get(),
        "nodes": res.n_nodes,
        "lambda_h": res.lambda_h,
        "converged": res.converged,
        "shooting_lambda": shooting.lambda,
        "certificate": cert,
    });
    if args.with_function {
        out["u"] = serde_json::to_value(&res.u).expect("functions serialize");
    }
    Ok((pretty(&out), vec![cert]))
}

fn verify_prop(args: &VerifyPropArgs) -> Result<Outcome, Failure> {
    let ps = parse_list(&args.p, "p")?;
    for &p in &ps {
        exponent(p)?;
    }
    let config = BatchConfig {
        length: positive(args.length, "L")?,
        solver_tol: positive(args.solver_tol, "solver tol")?,
        rel_tol: positive(args.rel_tol, "rel tol")?,
        oracle_nodes: args.oracle_nodes,
        oracle_limit: positive(args.oracle_limit, "oracle limit")?,
        subsample: args.subsample,
        ..BatchConfig::default()
    };
    let certs = match args.suite {
        Suite::Proposition => verify_proposition(&parse_seeds(&args.seeds)?, &ps, &config)?,
        Suite::Exponential => {
            verify_exponential(&parse_list(&args.kappas, "kappa")?, &ps, &config)?
        }
        Suite::Reduction => verify_reduction(&parse_seeds(&args.seeds)?, &ps, &config)?,
    };
    Ok((certificates_out(&certs, args.format, "verify-prop")?, certs))
}

fn slice(args: &SliceArgs) -> Result<Outcome, Failure> {
    let poly = args.polygon.build()?;
    let w = args.weight.build()?;
    let p = exponent(args.p)?;
    let tol = positive(args.tol, "tol")?;
    let eps = parse_list(&args.epsilon, "epsilon")?;
    let Some(&last) = eps.last() else {
        return Err(Failure::Usage("no epsilon given".into()));
    };
    for &e in &eps {
        positive(e, "epsilon")?;
    }
    let u = AffineField {
        a: args.ux,
        b: args.uy,
        c: 0.0,
    };
    if args.certify {
        let report = verify_slicing_bound(&poly, &u, &w, p, &eps, tol, 1e-10)?;
        return match args.format {
            Format::Json => Ok((pretty(&report), report.certificates.clone())),
            Format::Csv => Ok((to_csv(&report.certificates), report.certificates.clone())),
            other => Err(unsupported(other, "slice --certify")),
        };
    }
    let shift = zero_moment_shift(&poly, &u, &w, p)?;
    let shifted = AffineField { c: -shift, ..u };
    let dec = decompose(&poly, &shifted, &w, p, last, tol)?;
    let text = match args.format {
        Format::Json => pretty(&json!({
            "polygon": poly,
            "weight": w,
            "field": shifted,
            "p": p.get(),
            "decomposition": dec,
        })),
        Format::Svg => dec.to_svg(),
        other => return Err(unsupported(other, "slice")),
    };
    Ok((text, Vec::new()))
}

fn verify_2d(args: &Verify2dArgs) -> Result<Outcome, Failure> {
    let p = exponent(args.p)?;
    let mesh_h = positive(args.mesh_h, "mesh h")?;
    let tol = positive(args.tol, "tol")?;
    if !(args.tol_h >= 0.0 && args.tol_h.is_finite()) {
        return Err(Failure::Usage(format!(
            "tol_h must be nonnegative, got {}",
            args.tol_h
        )));
    }
    let mut certs = match &args.seeds {
        Some(s) => verify_theorem_batch(&parse_seeds(s)?, p, mesh_h, tol),
        None => {
            let poly = args.polygon.build()?;
            let w = args.weight.build()?;
            vec![verify_theorem_2d(
                &poly, &w, p, mesh_h, tol, args.tol_h, None,
            )]
        }
    };
    sort_certificates(&mut certs);
    Ok((certificates_out(&certs, args.format, "verify-2d")?, certs))
}

fn report(args: &ReportArgs) -> Result<Outcome, Failure> {
    let mut certs = Vec::new();
    for path in &args.inputs {
        for (i, line) in read_text(path)?.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let c: BoundCertificate = serde_json::from_str(line)
                .map_err(|e| Failure::Usage(format!("{}:{}: {e}", path.display(), i + 1)))?;
            certs.push(c);
        }
    }
    sort_certificates(&mut certs);
    Ok((to_csv(&certs), certs))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let (text, certs) = match &cli.command {
        Command::Pip(a) => pip(a)?,
        Command::Eig1d(a) => eig1d(a)?,
        Command::Oracle1d(a) => oracle1d(a)?,
        Command::VerifyProp(a) => verify_prop(a)?,
        Command::Slice(a) => slice(a)?,
        Command::Verify2d(a) => verify_2d(a)?,
        Command::Report(a) => report(a)?,
    };
    match &cli.output {
        Some(path) => fs::write(path, &text)
            .map_err(|e| Failure::Runtime(format!("writing {}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Runtime(e.to_string()))?;
        }
    }
    check(&certs)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
        Err(Failure::Certificates(failing)) => {
            eprintln!("{} certificate(s) failed:", failing.len());
            for f in failing {
                eprintln!("  {f}");
            }
            ExitCode::FAILURE
        }
    }
}

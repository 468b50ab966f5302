//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation failure or invalid space, 2 orbit not
//! Cauchy / no special limit / orbit truncated, 3 no hypothesis set holds,
//! 4 certificate failed, 64 usage or parse error, 70 internal contradiction.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::axioms::{validate, CheckOptions, Profile, DEFAULT_SEED, DEFAULT_VIOLATION_CAP};
use crate::doc;
use crate::engine::{
    orbit, solve_fixed_point, solve_via_contractive, CertificateKind, CertificateRequest,
    EngineError, SelfMap, SolveConfig,
};
use crate::sequence::{
    check_limit, check_special_limit, estimate_cauchy, special_limit_search, PrefixOptions,
    SequenceError, SequencePrefix,
};
use crate::space::{
    associated_metric, from_partial_metric, table_size, PartialNMetricSpace, SpaceError,
    DEFAULT_TOL,
};
use crate::topology::{
    basis_check, compare_topologies, gap_values, open_ball, radius_grid, separation_class,
    specialization_dot,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_NOT_CAUCHY: i32 = 2;
pub const EXIT_HYPOTHESES: i32 = 3;
pub const EXIT_CERTIFICATE: i32 = 4;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_INTERNAL: i32 = 70;

/// Entry count above which inputs draw a warning and conversions refuse.
pub const DEFAULT_MAX_TABLE: usize = 1_000_000;
pub const MAX_TABLE_ENV: &str = "PNMETRIC_MAX_TABLE";

#[derive(Parser, Debug)]
#[command(name = "pnmetric", version, about = "Finite partial n-metric spaces: validation, topology, fixed points")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// Absolute tolerance for every inequality check.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Orbit step limit (default 10 x number of points).
    #[arg(long, global = true)]
    max_steps: Option<usize>,
    /// Tail window for sequence verdicts (default max(4, M/4)).
    #[arg(long, global = true)]
    window: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ProfileArg {
    #[value(name = "partial_n_metric")]
    PartialNMetric,
    Strong,
    #[value(name = "n_metric")]
    NMetric,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::PartialNMetric => Profile::PartialNMetric,
            ProfileArg::Strong => Profile::Strong,
            ProfileArg::NMetric => Profile::NMetric,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum CertifyArg {
    R,
    Phi,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a space against an axiom profile.
    Validate {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_enum, default_value_t = ProfileArg::PartialNMetric)]
        profile: ProfileArg,
        /// Maximum number of violations listed.
        #[arg(long, default_value_t = DEFAULT_VIOLATION_CAP)]
        cap: usize,
    },
    /// Lift a partial metric to an n-ary space by summing over pairs.
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Topology, associated metric or sequence analysis.
    #[command(group = clap::ArgGroup::new("target").required(true))]
    Analyze {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, group = "target")]
        topology: bool,
        #[arg(long, group = "target")]
        metric: bool,
        /// JSON array of point names, or names separated by spaces.
        #[arg(long, group = "target")]
        sequence: Option<String>,
        /// With --topology, print the specialization preorder as DOT.
        #[arg(long)]
        dot: bool,
        /// Random trials for the ball basis check.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Find a fixed point from the orbit of a start point.
    Solve {
        #[command(flatten)]
        orbit: OrbitArgs,
        /// Use the strong hypothesis sets.
        #[arg(long)]
        strong: bool,
        /// Certify contractivity first and conclude via the contractive cases.
        #[arg(long, value_enum, requires = "r")]
        certify: Option<CertifyArg>,
        #[arg(long, allow_negative_numbers = true)]
        r: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Print the orbit of a start point.
    Orbit {
        #[command(flatten)]
        orbit: OrbitArgs,
    },
}

#[derive(Args, Debug)]
struct OrbitArgs {
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    start: String,
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    format: Format,
}

impl Io<'_> {
    fn emit(&mut self, value: &Value) {
        let text = match self.format {
            Format::Json => doc::render(value),
            Format::Text => text_lines(value),
        };
        let _ = self.out.write_all(text.as_bytes());
    }

    fn fail(&mut self, code: i32, message: impl std::fmt::Display) -> i32 {
        let _ = writeln!(self.err, "error: {message}");
        code
    }

    fn warn(&mut self, message: impl std::fmt::Display) {
        let _ = writeln!(self.err, "warning: {message}");
    }
}

/// Flattens a report to `path = value` lines.
fn text_lines(value: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, v) in m {
                    let p = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&p, v, out);
                }
            }
            Value::Array(items) if items.iter().any(|i| i.is_object() || i.is_array()) => {
                for (i, v) in items.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), v, out);
                }
            }
            Value::String(s) => out.push_str(&format!("{prefix} = {s}\n")),
            other => out.push_str(&format!("{prefix} = {other}\n")),
        }
    }
    let mut out = String::new();
    walk("", value, &mut out);
    out
}

fn max_table() -> usize {
    std::env::var(MAX_TABLE_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_TABLE)
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn load_space(io: &mut Io<'_>, path: &Path) -> Result<PartialNMetricSpace, i32> {
    let text = read(path).map_err(|e| io.fail(EXIT_USAGE, e))?;
    let parsed = doc::parse_space_doc(&text)
        .map_err(|e| io.fail(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    let limit = max_table();
    match table_size(parsed.points.len(), parsed.n) {
        Some(size) if size <= limit => {}
        size => io.warn(format!(
            "{}: table has {} entries, above the limit of {limit} ({MAX_TABLE_ENV})",
            path.display(),
            size.map_or_else(|| "too many".to_owned(), |s| s.to_string()),
        )),
    }
    PartialNMetricSpace::build(
        parsed.points,
        parsed.n,
        parsed.entries.into_iter().map(|e| (e.multiset, e.value)),
    )
    .map_err(|e| io.fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn load_map(io: &mut Io<'_>, space: &PartialNMetricSpace, path: &Path) -> Result<SelfMap, i32> {
    let text = read(path).map_err(|e| io.fail(EXIT_USAGE, e))?;
    doc::load_map(space, &text).map_err(|e| io.fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let mut io = Io {
        out,
        err,
        format: cli.global.format,
    };
    let g = &cli.global;
    if g.tol.is_nan() || g.tol < 0.0 {
        return io.fail(EXIT_USAGE, "--tol must be non-negative");
    }
    if g.max_steps == Some(0) {
        return io.fail(EXIT_USAGE, "--max-steps must be at least 1");
    }
    let result = match &cli.command {
        Command::Validate {
            space,
            profile,
            cap,
        } => cmd_validate(&mut io, g, space, (*profile).into(), *cap),
        Command::Convert { input, n } => cmd_convert(&mut io, g, input, *n),
        Command::Analyze {
            space,
            topology,
            metric,
            sequence,
            dot,
            trials,
        } => {
            if *dot && !*topology {
                return io.fail(EXIT_USAGE, "--dot needs --topology");
            }
            let target = if *topology {
                Target::Topology { dot: *dot, trials: *trials }
            } else if *metric {
                Target::Metric
            } else {
                Target::Sequence(sequence.clone().unwrap_or_default())
            };
            cmd_analyze(&mut io, g, space, target)
        }
        Command::Solve {
            orbit,
            strong,
            certify,
            r,
            lambda,
        } => cmd_solve(&mut io, g, orbit, *strong, *certify, *r, *lambda),
        Command::Orbit { orbit } => cmd_orbit(&mut io, g, orbit),
    };
    result.unwrap_or_else(|code| code)
}

fn cmd_validate(
    io: &mut Io<'_>,
    g: &GlobalOpts,
    path: &Path,
    profile: Profile,
    cap: usize,
) -> Result<i32, i32> {
    let space = load_space(io, path)?;
    let opts = CheckOptions { tol: g.tol, cap };
    let report = validate(&space, profile, &opts);
    io.emit(&doc::validation_json(&space, &report));
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_convert(io: &mut Io<'_>, g: &GlobalOpts, path: &Path, n: usize) -> Result<i32, i32> {
    let text = read(path).map_err(|e| io.fail(EXIT_USAGE, e))?;
    let p = doc::load_partial_metric(&text)
        .map_err(|e| io.fail(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    let limit = max_table();
    match table_size(p.len(), n) {
        Some(size) if size <= limit => {}
        _ => {
            return Err(io.fail(
                EXIT_FAIL,
                format!("output table for {} points at arity {n} exceeds {limit} entries ({MAX_TABLE_ENV})", p.len()),
            ))
        }
    }
    match from_partial_metric(&p, n, true, g.tol) {
        Ok(space) => {
            io.emit(&doc::space_json(&space));
            Ok(EXIT_OK)
        }
        Err(SpaceError::PartialMetricAxiomViolation(v)) => {
            io.emit(&json!({
                "status": "partial_metric_axiom_violation",
                "axiom": v.axiom,
                "points": v.points,
                "lhs": doc::num(v.lhs),
                "rhs": doc::num(v.rhs),
            }));
            Err(io.fail(EXIT_FAIL, "input is not a partial metric"))
        }
        Err(e @ SpaceError::Arity(_)) => Err(io.fail(EXIT_USAGE, e)),
        Err(e) => Err(io.fail(EXIT_FAIL, e)),
    }
}

enum Target {
    Topology { dot: bool, trials: usize },
    Metric,
    Sequence(String),
}

fn require_valid(io: &mut Io<'_>, space: &PartialNMetricSpace, g: &GlobalOpts) -> Result<(), i32> {
    let report = validate(space, Profile::PartialNMetric, &CheckOptions::with_tol(g.tol));
    if report.passed() {
        return Ok(());
    }
    io.emit(&json!({
        "status": "invalid_space",
        "validation": doc::validation_json(space, &report),
    }));
    Err(io.fail(EXIT_FAIL, "space fails the partial_n_metric profile"))
}

fn cmd_analyze(io: &mut Io<'_>, g: &GlobalOpts, path: &Path, target: Target) -> Result<i32, i32> {
    let space = load_space(io, path)?;
    require_valid(io, &space, g)?;
    match target {
        Target::Topology { dot: true, .. } => {
            let _ = io.out.write_all(specialization_dot(&space).as_bytes());
        }
        Target::Topology { dot: false, trials } => {
            let grid = radius_grid(&gap_values(&space));
            let mut balls = Map::new();
            for x in space.points() {
                let mut seen: Vec<Vec<_>> = Vec::new();
                let mut list = Vec::new();
                for &eps in &grid {
                    let b = open_ball(&space, x, eps);
                    if !seen.contains(&b.members) {
                        list.push(json!({
                            "radius": doc::num(eps),
                            "members": doc::names(&space, &b.members),
                        }));
                        seen.push(b.members);
                    }
                }
                balls.insert(doc::name(&space, x), Value::Array(list));
            }
            let comparison = match compare_topologies(&space, g.tol) {
                Ok(c) => doc::comparison_json(&space, &c),
                Err(e) => json!({"skipped": e.to_string()}),
            };
            io.emit(&json!({
                "separation": doc::separation_json(&space, &separation_class(&space)),
                "basis": doc::basis_json(&space, &basis_check(&space, trials, g.seed)),
                "balls": balls,
                "metric_comparison": comparison,
            }));
        }
        Target::Metric => {
            let metric = associated_metric(&space, g.tol).map_err(|e| io.fail(EXIT_FAIL, e))?;
            io.emit(&doc::metric_json(&space, &metric));
        }
        Target::Sequence(text) => {
            let names = doc::parse_sequence(&text).map_err(|e| io.fail(EXIT_USAGE, e))?;
            let seq = SequencePrefix::from_names(&space, &names)
                .map_err(|e| io.fail(EXIT_USAGE, e))?;
            let opts = PrefixOptions {
                window: g.window,
                tol: g.tol,
            };
            let verdict = estimate_cauchy(&seq, &opts).map_err(|e| io.fail(EXIT_USAGE, e))?;
            let mut candidates = Map::new();
            for a in space.points() {
                let limit = check_limit(&seq, a, &opts).map_err(|e| io.fail(EXIT_USAGE, e))?;
                let special = match check_special_limit(&seq, a, &opts) {
                    Ok(s) => json!(s),
                    Err(SequenceError::NotCauchyOnPrefix) => Value::Null,
                    Err(e) => return Err(io.fail(EXIT_USAGE, e)),
                };
                candidates.insert(
                    doc::name(&space, a),
                    json!({"limit": limit, "special_limit": special}),
                );
            }
            let (special, code) = match special_limit_search(&seq, &opts) {
                Ok(found) => (json!(found.map(|p| doc::name(&space, p))), EXIT_OK),
                Err(SequenceError::NotCauchyOnPrefix) => (Value::Null, EXIT_OK),
                Err(SequenceError::UniquenessViolation(found)) => {
                    io.warn("several points pass as special limits; the tolerance may be too loose");
                    (json!(doc::names(&space, &found)), EXIT_INTERNAL)
                }
                Err(e) => return Err(io.fail(EXIT_USAGE, e)),
            };
            io.emit(&json!({
                "sequence": names,
                "tolerance": doc::num(g.tol),
                "cauchy": {
                    "holds_on_prefix": verdict.holds_on_prefix,
                    "r_estimate": verdict.r_estimate.map(doc::num),
                    "window": verdict.window,
                    "residual": doc::num(verdict.residual),
                },
                "candidates": candidates,
                "special_limit": special,
            }));
            return Ok(code);
        }
    }
    Ok(EXIT_OK)
}

fn engine_exit(e: &EngineError) -> i32 {
    match e {
        EngineError::NotCauchy { .. }
        | EngineError::NoSpecialLimit { .. }
        | EngineError::OrbitTruncated { .. } => EXIT_NOT_CAUCHY,
        EngineError::HypothesesUnsatisfied(_) => EXIT_HYPOTHESES,
        EngineError::CertificateFailed(_) => EXIT_CERTIFICATE,
        EngineError::TheoremContradicted { .. } | EngineError::UniquenessViolation(_) => {
            EXIT_INTERNAL
        }
        EngineError::InvalidSpace(_) => EXIT_FAIL,
        EngineError::InvalidLambda(_) | EngineError::Space(_) | EngineError::MapSize { .. } => {
            EXIT_USAGE
        }
    }
}

fn load_orbit_inputs(
    io: &mut Io<'_>,
    args: &OrbitArgs,
) -> Result<(PartialNMetricSpace, SelfMap, crate::space::Point), i32> {
    let space = load_space(io, &args.space)?;
    let map = load_map(io, &space, &args.map)?;
    let start = space
        .point(&args.start)
        .map_err(|e| io.fail(EXIT_USAGE, e))?;
    Ok((space, map, start))
}

fn cmd_solve(
    io: &mut Io<'_>,
    g: &GlobalOpts,
    args: &OrbitArgs,
    strong: bool,
    certify: Option<CertifyArg>,
    r: Option<f64>,
    lambda: Option<f64>,
) -> Result<i32, i32> {
    let (space, map, start) = load_orbit_inputs(io, args)?;
    let config = SolveConfig {
        max_steps: g.max_steps,
        tol: g.tol,
        strong_mode: strong,
    };
    let outcome = match certify {
        None => solve_fixed_point(&space, &map, start, &config),
        Some(kind) => {
            let request = CertificateRequest {
                kind: match kind {
                    CertifyArg::R => CertificateKind::RContractive,
                    CertifyArg::Phi => CertificateKind::PhiContractive,
                },
                r: r.expect("clap enforces --r with --certify"),
                lambda,
            };
            solve_via_contractive(&space, &map, start, &request, &config)
        }
    };
    match outcome {
        Ok(result) => {
            io.emit(&doc::fixed_point_json(&space, &result));
            Ok(EXIT_OK)
        }
        Err(e) => {
            let code = engine_exit(&e);
            if code == EXIT_USAGE {
                return Err(io.fail(code, e));
            }
            io.emit(&doc::engine_error_json(&space, &e));
            Ok(code)
        }
    }
}

fn cmd_orbit(io: &mut Io<'_>, g: &GlobalOpts, args: &OrbitArgs) -> Result<i32, i32> {
    let (space, map, start) = load_orbit_inputs(io, args)?;
    let steps = g.max_steps.unwrap_or(10 * space.len());
    let trace = orbit(&space, &map, start, steps).map_err(|e| io.fail(EXIT_USAGE, e))?;
    io.emit(&doc::orbit_json(&space, &trace));
    Ok(EXIT_OK)
}

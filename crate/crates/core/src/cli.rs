//! Batch command-line front end.
//!
//! Exit codes: 0 success, 1 a `certify` verdict of NOT_GOOD, 2 usage or
//! input error, 3 computation error.

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::algebra::TruncSeries;
use crate::appsys::{kalman_subspaces, scalar_extension, step3_extension, ExtendedSystemSpec, PolyMap, Subspace};
use crate::certify::{certify_with, iterate_ideal, Candidate, CertifyOptions, IdealReport, Status, Verdict};
use crate::expr::{parse_expr, Expr};
use crate::flows::{fast_osc_experiment, flow_endpoint, OscReport, PiecewiseControl};
use crate::liecore::{dynkin_project, is_lie_element, HallBasis};
use crate::rational::{fmt_q, parse_q, Q};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_GOOD: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "goodbrackets", version, about = "Exact certification of good Lie brackets")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report to FILE instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hall basis of Lie(a1..ak) up to a degree.
    Hall {
        #[arg(long)]
        letters: usize,
        #[arg(long)]
        degree: usize,
    },
    /// Dynkin projection of an expression in a0..ak.
    Dynkin {
        #[arg(long)]
        letters: usize,
        #[arg(long)]
        degree: usize,
        expr: String,
    },
    /// Certify a candidate bracket combination.
    Certify {
        #[arg(long)]
        letters: usize,
        #[arg(long)]
        degree: usize,
        /// Accept any positive a0 coefficient instead of exactly 1.
        #[arg(long)]
        cone: bool,
        expr: String,
    },
    /// Flow of a piecewise-constant control, or the fast-oscillation experiment when --eps is given.
    Simulate {
        #[arg(long, default_value_t = 1)]
        letters: usize,
        #[arg(long)]
        degree: usize,
        /// Pieces "duration:u1,u2,...;..." (profile on [0,1] for the experiment).
        #[arg(long)]
        control: String,
        /// Total time of the experiment.
        #[arg(long, default_value = "1")]
        time: String,
        /// Oscillation periods, e.g. 1/8,1/16,1/32.
        #[arg(long, value_delimiter = ',')]
        eps: Vec<String>,
    },
    /// Generalized Kalman chain for x' = f(x) + u, u in U.
    Kalman {
        /// Polynomial map as JSON, inline or a file path.
        #[arg(long)]
        system: String,
        /// Rows spanning U, e.g. "1,0;0,1".
        #[arg(long)]
        subspace: String,
    },
    /// Extended-system templates.
    Extend {
        #[command(subcommand)]
        kind: ExtendKind,
    },
    /// Quotient construction for a generator V.
    Quotient {
        #[arg(long)]
        letters: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        m: usize,
        /// The Lie element V in a1..ak.
        v: String,
        /// Group elements exp(Z) given by Z; the identity when omitted.
        #[arg(long = "z")]
        z: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExtendKind {
    /// Step-3 nilpotent extension with k controls.
    Step3 {
        #[arg(long)]
        k: usize,
    },
    /// Scalar-control extension for psi of degree m.
    Scalar {
        #[arg(long)]
        m: usize,
    },
}

/// Truncation and mode settings shared by the algebraic subcommands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub k: usize,
    pub n: usize,
    pub cone: bool,
    pub format: Format,
    pub eps: Vec<Q>,
}

impl RunConfig {
    pub fn new(k: usize, n: usize, format: Format) -> Result<Self, CliError> {
        if k == 0 || n == 0 {
            return Err(CliError::Usage("--letters and --degree must be at least 1".into()));
        }
        Ok(RunConfig {
            k,
            n,
            cone: false,
            format,
            eps: Vec::new(),
        })
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Compute(_) => EXIT_COMPUTE,
        }
    }
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

/// What a command printed and how it exited.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    body: String,
    code: i32,
}

/// Parses `argv` (including the program name) and runs one command.
pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    match dispatch(&cli) {
        Ok(report) => {
            let mut body = report.body;
            if !body.ends_with('\n') {
                body.push('\n');
            }
            match &cli.out {
                Some(path) => match std::fs::write(path, &body) {
                    Ok(()) => Outcome {
                        code: report.code,
                        stdout: String::new(),
                        stderr: String::new(),
                    },
                    Err(e) => Outcome {
                        code: EXIT_COMPUTE,
                        stdout: String::new(),
                        stderr: format!("error: cannot write {}: {e}\n", path.display()),
                    },
                },
                None => Outcome {
                    code: report.code,
                    stdout: body,
                    stderr: String::new(),
                },
            }
        }
        Err(e) => {
            let (kind, msg) = match &e {
                CliError::Usage(m) => ("usage error", m),
                CliError::Compute(m) => ("computation error", m),
            };
            Outcome {
                code: e.code(),
                stdout: String::new(),
                stderr: format!("{kind}: {msg}\n"),
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    let fmt = cli.format;
    if fmt == Format::Csv && !matches!(&cli.command, Command::Simulate { eps, .. } if !eps.is_empty()) {
        return Err(CliError::Usage(
            "--format csv is only available for simulate with --eps".into(),
        ));
    }
    let ok = |body: String| Ok(Report { body, code: EXIT_OK });
    match &cli.command {
        Command::Hall { letters, degree } => {
            let cfg = RunConfig::new(*letters, *degree, fmt)?;
            let basis = HallBasis::new(cfg.k, cfg.n).map_err(compute)?;
            ok(render(fmt, basis.to_json(), || hall_text(&basis)))
        }
        Command::Dynkin { letters, degree, expr } => {
            let cfg = RunConfig::new(*letters, *degree, fmt)?;
            let x = eval_expr(expr, cfg.k, cfg.n)?;
            let p = dynkin_project(&x).map_err(compute)?;
            let lie = is_lie_element(&x);
            let j = json!({
                "schema": "goodbrackets/dynkin/v1",
                "input": expr,
                "letters": cfg.k,
                "degree": cfg.n,
                "value": x.to_string(),
                "projection": p.to_string(),
                "is_lie": lie,
            });
            ok(render(fmt, j, || {
                format!("value:      {x}\nprojection: {p}\nlie element: {}\n", yes_no(lie))
            }))
        }
        Command::Certify {
            letters,
            degree,
            cone,
            expr,
        } => {
            let mut cfg = RunConfig::new(*letters, *degree, fmt)?;
            cfg.cone = *cone;
            let x = eval_expr(expr, cfg.k, cfg.n)?;
            let cand = Candidate::new(x).map_err(compute)?;
            let verdict = certify_with(&cand, CertifyOptions { cone: cfg.cone }).map_err(compute)?;
            let code = if verdict.status == Status::NotGood {
                EXIT_NOT_GOOD
            } else {
                EXIT_OK
            };
            Ok(Report {
                body: render(fmt, verdict.to_json(expr), || verdict_text(&verdict)),
                code,
            })
        }
        Command::Simulate {
            letters,
            degree,
            control,
            time,
            eps,
        } => {
            let mut cfg = RunConfig::new(*letters, *degree, fmt)?;
            let u = PiecewiseControl::parse(control, cfg.k).map_err(usage)?;
            if eps.is_empty() {
                let r = flow_endpoint(&u, cfg.n).map_err(compute)?;
                let j = json!({
                    "schema": "goodbrackets/flow/v1",
                    "letters": cfg.k,
                    "degree": cfg.n,
                    "control": control,
                    "total_time": fmt_q(&u.total_time()),
                    "endpoint": r.endpoint.to_string(),
                    "logchart": r.logchart.to_string(),
                });
                return ok(render(fmt, j, || {
                    format!("endpoint: {}\nlog:      {}\n", r.endpoint, r.logchart)
                }));
            }
            cfg.eps = eps.iter().map(|s| parse_q(s)).collect::<Result<_, _>>().map_err(usage)?;
            let t = parse_q(time).map_err(usage)?;
            let report = fast_osc_experiment(&u, &t, &cfg.eps, cfg.n).map_err(compute)?;
            ok(match fmt {
                Format::Csv => report.to_csv(),
                _ => render(fmt, report.to_json(), || osc_text(&report)),
            })
        }
        Command::Kalman { system, subspace } => {
            let f = load_polymap(system)?;
            let u = parse_subspace(subspace, f.dim())?;
            let chain = kalman_subspaces(&f, &u).map_err(compute)?;
            let last = chain.last().expect("chain has n entries");
            let j = json!({
                "schema": "goodbrackets/kalman/v1",
                "system": f.to_json(),
                "subspace": u.to_json(),
                "chain": chain.iter().map(Subspace::to_json).collect::<Vec<_>>(),
                "final": last.to_json(),
                "full_rank": last.is_full(),
            });
            ok(render(fmt, j, || {
                let mut s = String::new();
                for (i, v) in chain.iter().enumerate() {
                    let _ = writeln!(s, "V{} (dim {}): {v}", i + 1, v.dim());
                }
                let _ = writeln!(s, "full rank: {}", yes_no(last.is_full()));
                s
            }))
        }
        Command::Extend { kind } => {
            let spec = match kind {
                ExtendKind::Step3 { k } if *k >= 1 => step3_extension(*k),
                ExtendKind::Scalar { m } if *m >= 1 => scalar_extension(*m),
                _ => return Err(CliError::Usage("the extension parameter must be at least 1".into())),
            };
            ok(render(fmt, spec.to_json(), || extend_text(&spec)))
        }
        Command::Quotient {
            letters,
            degree,
            m,
            v,
            z,
        } => {
            let cfg = RunConfig::new(*letters, *degree, fmt)?;
            let vv = eval_expr(v, cfg.k, cfg.n)?;
            let zs: Vec<TruncSeries> = if z.is_empty() {
                vec![TruncSeries::one(cfg.k, cfg.n)]
            } else {
                z.iter()
                    .map(|s| eval_expr(s, cfg.k, cfg.n)?.exp_trunc().map_err(compute))
                    .collect::<Result<_, _>>()?
            };
            let report = iterate_ideal(&vv, *m, &zs).map_err(compute)?;
            ok(render(fmt, report.to_json(), || quotient_text(&report)))
        }
    }
}

fn eval_expr(src: &str, k: usize, n: usize) -> Result<TruncSeries, CliError> {
    let e: Expr = parse_expr(src).map_err(usage)?;
    e.eval(k, n).map_err(compute)
}

fn load_polymap(src: &str) -> Result<PolyMap, CliError> {
    let text = if src.trim_start().starts_with('{') {
        src.to_string()
    } else {
        std::fs::read_to_string(src).map_err(|e| CliError::Usage(format!("cannot read {src}: {e}")))?
    };
    let v: Value = serde_json::from_str(&text).map_err(usage)?;
    PolyMap::from_json(&v).map_err(usage)
}

fn parse_subspace(src: &str, n: usize) -> Result<Subspace, CliError> {
    let rows = src
        .split(';')
        .filter(|r| !r.trim().is_empty())
        .map(|r| r.split(',').map(parse_q).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(usage)?;
    Subspace::span(n, &rows).map_err(usage)
}

fn render(fmt: Format, j: Value, text: impl FnOnce() -> String) -> String {
    match fmt {
        Format::Text => text(),
        _ => serde_json::to_string_pretty(&j).expect("json serializes"),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn hall_text(basis: &HallBasis) -> String {
    let mut s = String::new();
    for e in basis.elements() {
        let _ = writeln!(s, "V{} (degree {}): {}", e.index, e.degree, e.tree);
    }
    let _ = writeln!(s, "counts by degree: {:?}", basis.count_by_degree());
    s
}

fn verdict_text(v: &Verdict) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "status: {}", v.status.as_str());
    if let Some(suff) = v.sufficiency {
        let _ = writeln!(s, "sufficiency: {}", suff.as_str());
    }
    let _ = writeln!(s, "drift coefficient: {}", v.scale);
    if let Some(x) = &v.x {
        let _ = writeln!(s, "L part: {x}");
    }
    if let Some(w) = &v.w {
        let _ = writeln!(s, "drift part: {w}");
    }
    if let crate::certify::Certificate::Moments(data) = &v.certificate {
        let _ = writeln!(s, "phi: {}", data.phi);
        let _ = writeln!(s, "moment matrix:");
        for row in &data.matrix.entries {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "  [{}]", cells.join(", "));
        }
        if let (Some(w), Some(val)) = (&data.psd.witness, &data.psd.value) {
            let cells: Vec<String> = w.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "witness: ({}) with value {val}", cells.join(", "));
        }
    }
    s
}

fn osc_text(r: &OscReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "target V: {}", r.v_target);
    for row in &r.rows {
        let _ = writeln!(
            s,
            "eps {:>8}  steps {:>5}  single {:.3e}  global {:.3e}",
            row.eps.to_string(),
            row.steps,
            crate::rational::to_f64(&row.single_error),
            crate::rational::to_f64(&row.global_error),
        );
    }
    let slope = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.3}"));
    let _ = writeln!(
        s,
        "slope single {}  slope global {}  monotone {}",
        slope(r.slope_single),
        slope(r.slope_global),
        yes_no(r.monotone)
    );
    s
}

fn extend_text(spec: &ExtendedSystemSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} extension ({} controls)", spec.kind, spec.control_count());
    for f in &spec.fields {
        let _ = writeln!(s, "  {} * {} * {}", f.coefficient, f.control, f.display);
    }
    let _ = writeln!(s, "PSD constraint:");
    for row in &spec.constraint.matrix {
        let _ = writeln!(s, "  [{}]", row.join(", "));
    }
    let _ = writeln!(s, "free: {}", spec.free_controls.join(", "));
    s
}

fn quotient_text(r: &IdealReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "generator: {}", r.generator);
    let _ = writeln!(s, "ideal dimension: {}", r.ideal_dim);
    let _ = writeln!(s, "exponential identity (ad form): {}", yes_no(r.ad_identity_holds));
    for d in &r.span_basis {
        let _ = writeln!(s, "direction: {d}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Outcome {
        run_command(std::iter::once("goodbrackets").chain(args.iter().copied()))
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(&["certify", "--letters", "1", "--degree", "3", "a0 - [a1,[a1,a0]]"]).code, 1);
        assert_eq!(run(&["certify", "--letters", "1", "--degree", "3", "a0 + [a1,[a1,a0]]"]).code, 0);
        assert_eq!(run(&["frobnicate"]).code, 2);
        assert_eq!(run(&["hall", "--letters", "2"]).code, 2);
        assert_eq!(run(&["certify", "--letters", "1", "--degree", "3", "[a1"]).code, 2);
        assert_eq!(run(&["certify", "--letters", "1", "--degree", "3", "a0 a1"]).code, 3);
        assert_eq!(run(&["--help"]).code, 0);
    }

    #[test]
    fn hall_report() {
        let o = run(&["hall", "--letters", "2", "--degree", "3"]);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["elements"].as_array().unwrap().len(), 5);
    }

    #[test]
    fn extend_report() {
        let o = run(&["extend", "step3", "--k", "2"]);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["control_count"], 11);
        assert_eq!(run(&["extend", "scalar", "--m", "0"]).code, 2);
    }

    #[test]
    fn csv_only_for_experiments() {
        assert_eq!(run(&["--format", "csv", "hall", "--letters", "1", "--degree", "2"]).code, 2);
        let o = run(&[
            "simulate", "--degree", "3", "--control", "1:1", "--eps", "1/2,1/4", "--format", "csv",
        ]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.starts_with("eps,err_deg1,err_deg2,err_deg3,slope_single,slope_global"));
    }
}

//! `mathdsl`: command-line front end for the mathdsl engines.
//!
//! Exit codes: 0 success or checked, 1 falsified or diverged, 2 usage or
//! parse error, 3 numeric failure.

mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mathdsl_core::complex::{argument_c, modulus_c, to_polar};
use mathdsl_core::expr::{eval_cart, normalize, parse_expr, print_expr, Form};
use mathdsl_core::geometry::{
    apply_geometric, apply_via_complex, parse_point, parse_transform, semantics_equivalent, GeometryError,
};
use mathdsl_core::laplace::{laplace_numeric, GrowthCap, LaplaceError, LaplaceOptions};
use mathdsl_core::lexer::ParseError;
use mathdsl_core::numexpr::parse_real_expr;
use mathdsl_core::proof::{check_proof, parse_proof, Overall, StepStatus};
use mathdsl_core::seq::{check_limit, sup_monotone, LimitVerdict, NWitness, SeqError, Sequence, SupOptions};
use mathdsl_core::series::{compose_ps, deriv_ps, mul_ps, parse_series, powers_eval, PowerSeries, SeriesError};
use serde_json::{json, Value};

use render::{plain, scalar_json, scalar_plain};

#[derive(Parser, Debug)]
#[command(
    name = "mathdsl",
    version,
    about = "Complex numbers, plane transforms, limits, power series and sampled proof checking"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Numeric tolerance.
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = positive)]
    tol: f64,
    /// Term and iteration budget.
    #[arg(long, global = true, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_terms: u64,
    /// Seed for every sampled check.
    #[arg(long, global = true, env = "MATHDSL_SEED")]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Machine,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Complex expressions.
    #[command(subcommand)]
    Complex(ComplexCmd),
    /// Plane transformations.
    #[command(subcommand)]
    Geom(GeomCmd),
    /// Sequences.
    #[command(subcommand)]
    Seq(SeqCmd),
    /// Formal power series.
    #[command(subcommand)]
    Series(SeriesCmd),
    /// Numeric Laplace transform of an expression in `t`.
    Laplace {
        expr: String,
        #[arg(long)]
        s: f64,
        /// Declared growth cap `|f(t)| <= bound * e^(rate t)`.
        #[arg(long, default_value_t = 1.0)]
        growth_bound: f64,
        #[arg(long, default_value_t = 1.0)]
        growth_rate: f64,
        /// Integration horizon; derived from the growth cap by default.
        #[arg(long)]
        t_max: Option<f64>,
    },
    /// Check a calculational proof script.
    Prove {
        file: PathBuf,
        /// Samples per step.
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
    },
}

#[derive(Subcommand, Debug)]
enum ComplexCmd {
    /// Print the canonical form.
    Parse {
        expr: String,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        form: u8,
    },
    /// Evaluate to Cartesian components.
    Eval { expr: String },
    /// Modulus and principal argument.
    Polar { expr: String },
}

#[derive(Subcommand, Debug)]
enum GeomCmd {
    /// Apply a transform to a point, e.g. `geom apply "rotate pi/2" "(1, 0)"`.
    Apply { transform: String, point: String },
    /// Compare the geometric and complex semantics on random points.
    Equiv {
        transform: String,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
    },
}

#[derive(Subcommand, Debug)]
enum SeqCmd {
    /// Check `f -> L` against an N(eps) witness.
    Limit {
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        claim: f64,
        /// Expression in `eps`, rounded up to an index.
        #[arg(long)]
        witness: String,
        #[arg(long, value_delimiter = ',', default_value = "1,0.1,0.01,0.001,0.0001,0.00001,0.000001", value_parser = positive)]
        eps: Vec<f64>,
        /// Indices probed after N(eps) for each eps.
        #[arg(long, default_value_t = 1000)]
        probes: u64,
    },
    /// Supremum of a non-decreasing bounded sequence.
    Sup { expr: String },
}

#[derive(Subcommand, Debug)]
enum SeriesCmd {
    /// Evaluate a series at a point.
    Eval {
        series: String,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
    },
    /// Coefficients of a product.
    Mul {
        a: String,
        b: String,
        #[arg(long, default_value_t = 10)]
        order: u64,
    },
    /// Coefficients of the derivative.
    Deriv {
        a: String,
        #[arg(long, default_value_t = 10)]
        order: u64,
    },
    /// Coefficients of `a(b(x))`; `b` must have zero constant term.
    Compose {
        a: String,
        b: String,
        #[arg(long, default_value_t = 10)]
        order: u64,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(x) => Err(format!("must be positive, got {x}")),
        Err(e) => Err(e.to_string()),
    }
}

/// Result of one command.
struct Report {
    plain: String,
    machine: Value,
    code: u8,
}

impl Report {
    fn ok(plain: String, machine: Value) -> Self {
        Report { plain, machine, code: 0 }
    }

    fn fail(plain: String, machine: Value) -> Self {
        Report { plain, machine, code: 1 }
    }
}

enum Failure {
    /// Bad input: exit 2.
    Usage(String),
    /// Numeric breakdown: exit 3.
    Numeric(String),
}

fn syntax(src: &str, e: &ParseError) -> Failure {
    Failure::Usage(render::parse_error(src, e))
}

fn seq_error(src: &str, e: SeqError) -> Failure {
    match e {
        SeqError::Syntax(p) => syntax(src, &p),
        SeqError::NonFinite { .. } => Failure::Numeric(e.to_string()),
        e => Failure::Usage(e.to_string()),
    }
}

fn series_error(src: &str, e: SeriesError) -> Failure {
    match e {
        SeriesError::Syntax(p) => syntax(src, &p),
        SeriesError::NonZeroConstantTerm | SeriesError::BadTolerance(_) => Failure::Usage(e.to_string()),
        e => Failure::Numeric(e.to_string()),
    }
}

fn geometry_error(src: &str, e: GeometryError) -> Failure {
    match e {
        GeometryError::Syntax(p) => syntax(src, &p),
        e => Failure::Usage(e.to_string()),
    }
}

fn series(src: &str) -> Result<PowerSeries, Failure> {
    parse_series(src).map_err(|e| series_error(src, e))
}

fn coefficients(a: &PowerSeries, order: u64, src: &str) -> Result<Report, Failure> {
    let c = a.prefix(order).map_err(|e| series_error(src, e))?;
    let text = c.iter().map(scalar_plain).collect::<Vec<_>>().join(", ");
    Ok(Report::ok(format!("[{text}]"), Value::Array(c.iter().map(scalar_json).collect())))
}

fn run_complex(cmd: ComplexCmd) -> Result<Report, Failure> {
    let (ComplexCmd::Parse { expr, .. } | ComplexCmd::Eval { expr } | ComplexCmd::Polar { expr }) = &cmd;
    let e = parse_expr(expr).map_err(|err| syntax(expr, &err))?;
    Ok(match cmd {
        ComplexCmd::Parse { form, .. } => {
            let text = print_expr(&e, if form == 1 { Form::Form1 } else { Form::Form2 });
            let n = normalize(&e);
            Report::ok(text.clone(), json!({ "canonical": text, "re": scalar_json(&n.re), "im": scalar_json(&n.im) }))
        }
        ComplexCmd::Eval { .. } => {
            let z = eval_cart(&e);
            Report::ok(
                format!("C({}, {})", scalar_plain(z.re()), scalar_plain(z.im())),
                json!({ "re": scalar_json(z.re()), "im": scalar_json(z.im()), "exact": z.is_exact() }),
            )
        }
        ComplexCmd::Polar { .. } => {
            let z = eval_cart(&e);
            let p = to_polar(&z);
            let arg = argument_c(&z).ok();
            Report::ok(p.to_string(), json!({ "modulus": modulus_c(&z), "argument": arg }))
        }
    })
}

fn run_geom(cmd: GeomCmd, g: &Global) -> Result<Report, Failure> {
    match cmd {
        GeomCmd::Apply { transform, point } => {
            let t = parse_transform(&transform).map_err(|e| geometry_error(&transform, e))?;
            let p = parse_point(&point).map_err(|e| geometry_error(&point, e))?;
            let (a, b) = (apply_geometric(&t, p), apply_via_complex(&t, p));
            if !(a.x.is_finite() && a.y.is_finite()) {
                return Err(Failure::Numeric(format!("result {a} is not finite")));
            }
            Ok(Report::ok(
                format!("({}, {})", plain(a.x), plain(a.y)),
                json!({ "geometric": [a.x, a.y], "complex": [b.x, b.y], "deviation": a.max_abs_diff(&b) }),
            ))
        }
        GeomCmd::Equiv { transform, samples } => {
            let t = parse_transform(&transform).map_err(|e| geometry_error(&transform, e))?;
            let r = semantics_equivalent(&t, samples as usize, g.seed.unwrap_or(0));
            let machine = json!({
                "equivalent": r.equivalent,
                "max_deviation": r.max_deviation,
                "max_scaled_deviation": r.max_scaled_deviation,
                "samples": r.samples,
            });
            let detail = format!("max deviation {:e} over {} points", r.max_deviation, r.samples);
            Ok(if r.equivalent {
                Report::ok(format!("equivalent ({detail})"), machine)
            } else {
                Report::fail(format!("not equivalent ({detail})"), machine)
            })
        }
    }
}

fn run_seq(cmd: SeqCmd, g: &Global) -> Result<Report, Failure> {
    match cmd {
        SeqCmd::Limit { expr, claim, witness, eps, probes } => {
            let f = Sequence::parse(&expr).map_err(|e| seq_error(&expr, e))?;
            let n = NWitness::parse(&witness).map_err(|e| seq_error(&witness, e))?;
            Ok(match check_limit(&f, claim, &n, &eps, probes) {
                LimitVerdict::NotFalsified => Report::ok(
                    format!(
                        "not falsified: |f(n) - {}| < eps for n in N(eps) ..= N(eps) + {probes}, {} values of eps",
                        plain(claim),
                        eps.len()
                    ),
                    json!({ "verdict": "not falsified", "epsilons": eps, "probes": probes }),
                ),
                LimitVerdict::Falsified { eps, index, value } => Report::fail(
                    format!("falsified: eps = {}, n = {index}, f(n) = {}", plain(eps), plain(value)),
                    json!({ "verdict": "falsified", "eps": eps, "index": index, "value": value }),
                ),
            })
        }
        SeqCmd::Sup { expr } => {
            let f = Sequence::parse(&expr).map_err(|e| seq_error(&expr, e))?;
            let opts =
                SupOptions { tol: g.tol, max_iter: usize::try_from(g.max_terms).unwrap_or(usize::MAX), cap: None };
            match sup_monotone(&f, opts) {
                Ok(est) => Ok(Report::ok(
                    format!("{:.6} (monotone, converged)", est.value),
                    json!({ "sup": est.value, "index": est.index, "probes": est.probes, "monotone": true, "converged": true }),
                )),
                Err(
                    e @ (SeqError::NotMonotone { .. } | SeqError::NoConvergence { .. } | SeqError::Unbounded { .. }),
                ) => Ok(Report::fail(format!("no supremum estimate: {e}"), json!({ "error": e.to_string() }))),
                Err(e) => Err(seq_error(&expr, e)),
            }
        }
    }
}

fn run_series(cmd: SeriesCmd, g: &Global) -> Result<Report, Failure> {
    match cmd {
        SeriesCmd::Eval { series: src, x } => {
            let a = series(&src)?;
            let r = powers_eval(&a, x, g.tol, g.max_terms).map_err(|e| series_error(&src, e))?;
            let machine = json!({ "value": r.value, "terms": r.terms_used, "converged": r.converged });
            Ok(if r.converged {
                Report::ok(format!("{} ({} terms, converged)", plain(r.value), r.terms_used), machine)
            } else {
                Report::fail(format!("{} ({} terms, diverged)", plain(r.value), r.terms_used), machine)
            })
        }
        SeriesCmd::Mul { a, b, order } => coefficients(&mul_ps(&series(&a)?, &series(&b)?), order, &a),
        SeriesCmd::Deriv { a, order } => coefficients(&deriv_ps(&series(&a)?), order, &a),
        SeriesCmd::Compose { a, b, order } => {
            let c = compose_ps(&series(&a)?, &series(&b)?, order).map_err(|e| series_error(&b, e))?;
            coefficients(&c, order, &a)
        }
    }
}

fn run_laplace(expr: &str, s: f64, growth: GrowthCap, t_max: Option<f64>, g: &Global) -> Result<Report, Failure> {
    let e = parse_real_expr(expr, &["t"]).map_err(|err| syntax(expr, &err))?;
    let opts = LaplaceOptions { quad_tol: g.tol, t_max, growth, ..LaplaceOptions::default() };
    match laplace_numeric(&|t| e.eval_f64(&[("t", t)]), s, &opts) {
        Ok(v) => Ok(Report::ok(plain(v), json!({ "value": v, "s": s, "quad_tol": g.tol }))),
        Err(err @ (LaplaceError::NonFinite(_) | LaplaceError::NoConvergence { .. })) => {
            Err(Failure::Numeric(err.to_string()))
        }
        Err(err) => Err(Failure::Usage(err.to_string())),
    }
}

fn run_prove(file: &PathBuf, budget: u64, g: &Global) -> Result<Report, Failure> {
    let src = std::fs::read_to_string(file).map_err(|e| Failure::Usage(format!("{}: {e}", file.display())))?;
    let script = parse_proof(&src).map_err(|e| Failure::Usage(format!("{}: {e}", file.display())))?;
    let budget = usize::try_from(budget).unwrap_or(usize::MAX);
    let report = check_proof(&script, budget, g.seed);
    let seed = g.seed.or(script.header.seed).unwrap_or(0);
    let mut lines = Vec::new();
    let mut steps = Vec::new();
    for (i, (step, v)) in script.steps.iter().zip(&report.verdicts).enumerate() {
        lines.push(format!("step {} (line {}, {}): {v}", i + 1, step.line, step.relation));
        let status = match &v.status {
            StepStatus::Checked { rule } => json!({ "status": "checked", "rule": rule }),
            StepStatus::Falsified { counterexample, detail } => {
                json!({ "status": "falsified", "counterexample": counterexample.to_string(), "detail": detail })
            }
            StepStatus::Unsupported { reason } => json!({ "status": "unsupported", "reason": reason }),
        };
        steps.push(json!({ "line": step.line, "relation": step.relation.to_string(), "samples": v.samples_used, "verdict": status }));
    }
    let total = report.verdicts.len();
    let mut summary = format!("{}/{total} steps checked", report.checked());
    for (n, what) in [(report.falsified(), "falsified"), (report.trusted(), "trusted")] {
        if n > 0 {
            summary.push_str(&format!(", {n} {what}"));
        }
    }
    let unsupported = total - report.checked() - report.falsified() - report.trusted();
    if unsupported > 0 {
        summary.push_str(&format!(", {unsupported} unsupported"));
    }
    lines.push(summary);
    lines.push(format!("(checked means not falsified by rule match or {budget} samples, seed {seed})"));
    let overall = match report.overall {
        Overall::Checked => "checked",
        Overall::Falsified => "falsified",
        Overall::Unsupported => "unsupported",
    };
    let machine = json!({
        "overall": overall,
        "checked": report.checked(),
        "falsified": report.falsified(),
        "trusted": report.trusted(),
        "steps": steps,
        "seed": seed,
        "budget": budget,
    });
    let code = if report.falsified() == 0 && unsupported == 0 { 0 } else { 1 };
    Ok(Report { plain: lines.join("\n"), machine, code })
}

fn run(cli: Cli) -> Result<Report, Failure> {
    let g = cli.global;
    match cli.command {
        Command::Complex(cmd) => run_complex(cmd),
        Command::Geom(cmd) => run_geom(cmd, &g),
        Command::Seq(cmd) => run_seq(cmd, &g),
        Command::Series(cmd) => run_series(cmd, &g),
        Command::Laplace { expr, s, growth_bound, growth_rate, t_max } => {
            run_laplace(&expr, s, GrowthCap { bound: growth_bound, rate: growth_rate }, t_max, &g)
        }
        Command::Prove { file, budget } => run_prove(&file, budget, &g),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.global.format;
    match run(cli) {
        Ok(report) => {
            match format {
                Format::Plain => println!("{}", report.plain),
                Format::Machine => println!("{}", report.machine),
            }
            ExitCode::from(report.code)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("numeric failure: {msg}");
            ExitCode::from(3)
        }
    }
}

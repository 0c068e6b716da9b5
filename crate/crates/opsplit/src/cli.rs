//! The command-line surface behind the `opsplit` binary.
//!
//! Three subcommands:
//! * `run` executes one method on a problem described by a TOML config and
//!   writes the iterate trace as CSV;
//! * `verify` replays the method correspondences on deterministic seeded
//!   problems and fails if any discrepancy exceeds its tolerance;
//! * `counterexample` runs alternating projections and Dykstra from the same
//!   start and reports their distinct limits.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 bad input, 3 the inner
//! solver broke down.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::algorithms::{self, Method, StartState, Trace};
use crate::equivalence;
use crate::error::{Error, Result};
use crate::linalg::{DenseOperator, RealVector};
use crate::problems::{self, ProblemBundle, ProblemForm};
use crate::prox::ProxFunction;

#[derive(Parser)]
#[command(name = "opsplit", about = "operator splitting methods and their correspondences")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one method on a configured problem and write its iterate trace.
    Run(RunArgs),
    /// Check the iterate-by-iterate correspondences on seeded problems.
    Verify(VerifyArgs),
    /// Show Dykstra and alternating projections disagreeing in the limit.
    Counterexample(CounterexampleArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML problem description.
    #[arg(long)]
    config: PathBuf,
    /// Override the iteration budget from the config.
    #[arg(long)]
    iters: Option<usize>,
    /// Override the early-stop residual from the config.
    #[arg(long)]
    tol: Option<f64>,
    /// Override the CSV output path from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Checks to run (default: all): dr-admm, pr-admm-int, cp-dr-id,
    /// cp-dr-lift, dykstra-subspace, counterexample.
    checks: Vec<String>,
    /// Iterations per check.
    #[arg(long, default_value_t = 100)]
    iters: usize,
    /// Discrepancy tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Optional CSV report path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seeds to draw problem instances from.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
}

#[derive(Args)]
struct CounterexampleArgs {
    /// Starting first coordinate; must be negative.
    #[arg(long, default_value_t = -2.0)]
    alpha: f64,
    /// Starting second coordinate; needs 0 < beta <= -alpha.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 200)]
    iters: usize,
    /// Optional CSV path for the two iterate traces side by side.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    method: String,
    iters: Option<usize>,
    tol: Option<f64>,
    out: Option<PathBuf>,
    start: Option<StartConfig>,
    problem: ProblemConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StartConfig {
    x0: Option<Vec<f64>>,
    a0: Option<Vec<f64>>,
    u0: Option<Vec<f64>>,
    v0: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemConfig {
    form: String,
    seed: Option<u64>,
    dim_x: Option<usize>,
    dim_y: Option<usize>,
    f: Option<ProxSpec>,
    g: Option<ProxSpec>,
    op: Option<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum ProxSpec {
    Zero { dim: usize },
    HalfSquaredNorm { dim: usize },
    Quadratic { q: Vec<Vec<f64>>, c: Vec<f64> },
    L1 { dim: usize, weight: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Point { point: Vec<f64> },
    Subspace { span: Vec<Vec<f64>> },
    Affine { span: Vec<Vec<f64>>, offset: Vec<f64> },
    Halfspace { normal: Vec<f64>, offset: f64 },
}

impl ProxSpec {
    fn build(&self) -> Result<ProxFunction> {
        let vec = |v: &[f64]| RealVector::from_slice(v);
        let span = |rows: &[Vec<f64>]| -> Result<Vec<RealVector>> {
            rows.iter().map(|r| RealVector::from_slice(r)).collect()
        };
        match self {
            ProxSpec::Zero { dim } => Ok(ProxFunction::zero(*dim)),
            ProxSpec::HalfSquaredNorm { dim } => Ok(ProxFunction::half_squared_norm(*dim)),
            ProxSpec::Quadratic { q, c } => {
                ProxFunction::quadratic(DenseOperator::from_rows(q)?, vec(c)?)
            }
            ProxSpec::L1 { dim, weight } => ProxFunction::l1(*dim, *weight),
            ProxSpec::Box { lo, hi } => ProxFunction::indicator_box(vec(lo)?, vec(hi)?),
            ProxSpec::Point { point } => Ok(ProxFunction::indicator_point(vec(point)?)),
            ProxSpec::Subspace { span: s } => ProxFunction::indicator_subspace(&span(s)?),
            ProxSpec::Affine { span: s, offset } => {
                ProxFunction::indicator_affine(&span(s)?, vec(offset)?)
            }
            ProxSpec::Halfspace { normal, offset } => {
                ProxFunction::indicator_halfspace(vec(normal)?, *offset)
            }
        }
    }
}

impl ProblemConfig {
    fn build(&self) -> Result<ProblemBundle> {
        let form = ProblemForm::parse(&self.form).ok_or_else(|| {
            Error::Config(format!(
                "unknown problem form {:?}; expected composite-l, composite-a or feasibility",
                self.form
            ))
        })?;
        match (&self.f, &self.g) {
            (Some(f), Some(g)) => {
                let f = f.build()?;
                let g = g.build()?;
                let op = match &self.op {
                    Some(rows) => DenseOperator::from_rows(rows)?,
                    None => {
                        if f.dim() != g.dim() {
                            return Err(Error::Config(
                                "an explicit op is required when f and g have different dimensions"
                                    .into(),
                            ));
                        }
                        DenseOperator::identity(f.dim())
                    }
                };
                ProblemBundle::new(form, f, g, op)
            }
            (None, None) => {
                let seed = self.seed.ok_or_else(|| {
                    Error::Config("give either inline f and g or a seed".into())
                })?;
                let dim_x = self.dim_x.unwrap_or(3);
                let dim_y = self.dim_y.unwrap_or(dim_x.min(2));
                problems::make_random_quadratic(seed, dim_x, dim_y, form)
            }
            _ => Err(Error::Config(
                "f and g must be given together (or omitted together with a seed)".into(),
            )),
        }
    }
}

fn start_state(
    method: Method,
    cfg: Option<&StartConfig>,
    bundle: &ProblemBundle,
) -> Result<StartState> {
    let vec = |v: &Option<Vec<f64>>| -> Result<Option<RealVector>> {
        v.as_ref().map(|v| RealVector::from_slice(v)).transpose()
    };
    let (x0, a0, u0, v0) = match cfg {
        Some(c) => (vec(&c.x0)?, vec(&c.a0)?, vec(&c.u0)?, vec(&c.v0)?),
        None => (None, None, None, None),
    };
    let dim_x = bundle.f.dim();
    match method {
        Method::Dr | Method::Pr | Method::Dykstra | Method::Map | Method::Fb => {
            let x0 = x0
                .or_else(|| bundle.start.clone())
                .unwrap_or_else(|| RealVector::zeros(dim_x));
            Ok(StartState::Point(x0))
        }
        Method::Admm | Method::AdmmIntermediate => {
            let a0 = a0.unwrap_or_else(|| RealVector::zeros(dim_x));
            let u0 = u0.unwrap_or_else(|| RealVector::zeros(dim_x));
            Ok(StartState::MultiplierPair { a0, u0 })
        }
        Method::Cp => {
            let u0 = u0.unwrap_or_else(|| RealVector::zeros(dim_x));
            let v0 = v0.unwrap_or_else(|| RealVector::zeros(bundle.g.dim()));
            Ok(StartState::PrimalDualPair { u0, v0 })
        }
    }
}

fn write_trace_csv(path: &PathBuf, trace: &Trace) -> Result<()> {
    let mut out = String::new();
    out.push_str("iter");
    for c in &trace.columns {
        out.push(',');
        out.push_str(c);
    }
    out.push_str(",residual\n");
    for (i, row) in trace.snapshots.iter().enumerate() {
        out.push_str(&i.to_string());
        for v in row {
            out.push_str(&format!(",{v:.16e}"));
        }
        match i.checked_sub(1).and_then(|j| trace.residuals.get(j)) {
            Some(r) => out.push_str(&format!(",{r:.16e}\n")),
            None => out.push_str(",\n"),
        }
    }
    fs::write(path, out)?;
    Ok(())
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config)?;
    let cfg: RunConfig = toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    let method = Method::parse(&cfg.method)
        .ok_or_else(|| Error::Config(format!("unknown method {:?}", cfg.method)))?;
    let bundle = cfg.problem.build()?;
    let start = start_state(method, cfg.start.as_ref(), &bundle)?;

    let iters = args.iters.or(cfg.iters).unwrap_or(100);
    let tol = args.tol.or(cfg.tol).unwrap_or(0.0);
    let trace = algorithms::run(method, &bundle, &start, iters, tol)?;

    let last = trace.snapshots.last().expect("trace holds the start");
    println!(
        "{}: {} steps{}, final state [{}]",
        method.name(),
        trace.steps(),
        if trace.stopped_early {
            " (stopped at tolerance)"
        } else {
            ""
        },
        last.iter()
            .map(|v| format!("{v:.6e}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    if let Some(path) = args.out.as_ref().or(cfg.out.as_ref()) {
        write_trace_csv(path, &trace)?;
        println!("trace written to {}", path.display());
    }
    Ok(())
}

const ALL_CHECKS: [&str; 6] = [
    "dr-admm",
    "pr-admm-int",
    "cp-dr-id",
    "cp-dr-lift",
    "dykstra-subspace",
    "counterexample",
];

struct CheckResult {
    name: String,
    max_discrepancy: f64,
    tolerance: f64,
    pass: bool,
}

fn random_point(seed: u64, dim: usize) -> RealVector {
    use rand::prelude::*;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    RealVector::new((0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect()).expect("finite")
}

fn run_check(name: &str, seeds: u64, iters: usize, tol: f64) -> Result<Vec<CheckResult>> {
    let mut results = Vec::new();
    let mut push = |label: String, report: equivalence::EquivalenceReport| {
        results.push(CheckResult {
            name: label,
            max_discrepancy: report.max_discrepancy,
            tolerance: report.tolerance,
            pass: report.pass,
        });
    };
    match name {
        "dr-admm" => {
            for seed in 0..seeds {
                let bundle =
                    problems::make_random_quadratic(seed, 3, 2, ProblemForm::CompositeL)?;
                let x0 = random_point(seed ^ 0x517c, 3);
                push(
                    format!("dr-admm[seed={seed}]"),
                    equivalence::verify_dr_admm(&bundle, &x0, iters, tol)?,
                );
            }
        }
        "pr-admm-int" => {
            for seed in 0..seeds {
                let bundle =
                    problems::make_random_quadratic(seed, 3, 2, ProblemForm::CompositeL)?;
                let x0 = random_point(seed ^ 0x9a3b, 3);
                push(
                    format!("pr-admm-int[seed={seed}]"),
                    equivalence::verify_pr_admm_intermediate(&bundle, &x0, iters, tol)?,
                );
            }
        }
        "cp-dr-id" => {
            for seed in 0..seeds {
                let bundle =
                    problems::make_random_quadratic(seed, 2, 2, ProblemForm::CompositeA)?;
                let u0 = random_point(seed ^ 0x22d1, 2);
                let v0 = random_point(seed ^ 0x7e40, 2);
                push(
                    format!("cp-dr-id[seed={seed}]"),
                    equivalence::verify_cp_dr_identity_case(
                        &bundle.f, &bundle.g, &u0, &v0, iters, tol,
                    )?,
                );
            }
        }
        "cp-dr-lift" => {
            for seed in 0..seeds {
                let bundle =
                    problems::make_random_quadratic(seed, 2, 2, ProblemForm::CompositeA)?;
                let u0 = random_point(seed ^ 0x3c55, 2);
                let v0 = random_point(seed ^ 0x61b2, 2);
                push(
                    format!("cp-dr-lift[seed={seed}]"),
                    equivalence::verify_cp_lifted_dr(&bundle, &u0, &v0, iters, tol)?,
                );
            }
        }
        "dykstra-subspace" => {
            for seed in 0..seeds {
                let span_u = vec![random_point(seed ^ 0x11, 4), random_point(seed ^ 0x12, 4)];
                let span_v = vec![random_point(seed ^ 0x21, 4), random_point(seed ^ 0x22, 4)];
                let x0 = random_point(seed ^ 0x31, 4);
                push(
                    format!("dykstra-subspace[seed={seed}]"),
                    equivalence::verify_dykstra_subspace_closed_form(
                        &span_u, &span_v, &x0, iters, tol,
                    )?,
                );
            }
        }
        "counterexample" => {
            let outcome = equivalence::dykstra_map_counterexample(-2.0, 1.0, iters.max(50))?;
            let err = (&outcome.map_limit - &outcome.expected_map_limit).norm()
                + (&outcome.dykstra_limit - &outcome.expected_dykstra_limit).norm();
            results.push(CheckResult {
                name: "counterexample[-2,1]".into(),
                max_discrepancy: err,
                tolerance: 1e-6,
                pass: outcome.distinct && err <= 1e-6,
            });
        }
        other => {
            return Err(Error::Config(format!(
                "unknown check {other:?}; available: {}",
                ALL_CHECKS.join(", ")
            )))
        }
    }
    Ok(results)
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool> {
    let checks: Vec<String> = if args.checks.is_empty() {
        ALL_CHECKS.iter().map(|s| s.to_string()).collect()
    } else {
        args.checks.clone()
    };
    let mut all = Vec::new();
    for check in &checks {
        all.extend(run_check(check, args.seeds, args.iters, args.tol)?);
    }
    let mut ok = true;
    for r in &all {
        println!(
            "{:<28} max discrepancy {:.3e} (tol {:.1e}) ... {}",
            r.name,
            r.max_discrepancy,
            r.tolerance,
            if r.pass { "pass" } else { "FAIL" }
        );
        ok &= r.pass;
    }
    if let Some(path) = &args.out {
        let mut f = fs::File::create(path)?;
        writeln!(f, "check,max_discrepancy,tolerance,pass")?;
        for r in &all {
            writeln!(
                f,
                "{},{:.16e},{:.16e},{}",
                r.name, r.max_discrepancy, r.tolerance, r.pass
            )?;
        }
        println!("report written to {}", path.display());
    }
    Ok(ok)
}

fn cmd_counterexample(args: &CounterexampleArgs) -> Result<bool> {
    let outcome = equivalence::dykstra_map_counterexample(args.alpha, args.beta, args.iters)?;
    println!(
        "start ({}, {}) on U = span(1,1), V = lower half-plane",
        args.alpha, args.beta
    );
    println!(
        "alternating projections -> ({:.6}, {:.6})   expected ({:.6}, {:.6})",
        outcome.map_limit[0],
        outcome.map_limit[1],
        outcome.expected_map_limit[0],
        outcome.expected_map_limit[1],
    );
    println!(
        "dykstra                 -> ({:.6}, {:.6})   expected ({:.6}, {:.6})",
        outcome.dykstra_limit[0],
        outcome.dykstra_limit[1],
        outcome.expected_dykstra_limit[0],
        outcome.expected_dykstra_limit[1],
    );
    println!(
        "separation {:.6} ({})",
        outcome.separation,
        if outcome.distinct {
            "the limits differ; Dykstra finds the projection onto the intersection, alternating projections does not"
        } else {
            "the limits coincide"
        }
    );

    if let Some(path) = &args.out {
        let bundle = problems::make_counterexample(args.alpha, args.beta)?;
        let start = StartState::Point(bundle.start.clone().expect("counterexample sets a start"));
        let map = algorithms::run(Method::Map, &bundle, &start, args.iters, -1.0)?;
        let dyk = algorithms::run(Method::Dykstra, &bundle, &start, args.iters, -1.0)?;
        let mut f = fs::File::create(path)?;
        writeln!(f, "iter,map_x0,map_x1,dykstra_x0,dykstra_x1")?;
        for (i, (m, d)) in map.snapshots.iter().zip(&dyk.snapshots).enumerate() {
            writeln!(
                f,
                "{i},{:.16e},{:.16e},{:.16e},{:.16e}",
                m[0], m[1], d[0], d[1]
            )?;
        }
        println!("traces written to {}", path.display());
    }
    Ok(outcome.distinct)
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::InnerSolverFailed { .. }
        | Error::SingularGram { .. }
        | Error::NotPositiveSemidefinite { .. } => 3,
        _ => 2,
    }
}

/// Executes a parsed command line and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Run(args) => cmd_run(args).map(|()| true),
        Command::Verify(args) => cmd_verify(args),
        Command::Counterexample(args) => cmd_counterexample(args),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_cfg(text: &str) -> RunConfig {
        toml::from_str(text).unwrap()
    }

    #[test]
    fn inline_problem_config_builds() {
        let cfg = parse_cfg(
            r#"
method = "dr"
iters = 10

[problem]
form = "composite-l"
f = { kind = "half-squared-norm", dim = 1 }
g = { kind = "half-squared-norm", dim = 1 }

[start]
x0 = [2.0]
"#,
        );
        let bundle = cfg.problem.build().unwrap();
        assert_eq!(bundle.form, ProblemForm::CompositeL);
        assert_eq!(bundle.op.rows(), 1);
    }

    #[test]
    fn seeded_problem_config_builds() {
        let cfg = parse_cfg(
            r#"
method = "admm"

[problem]
form = "composite-l"
seed = 7
dim_x = 3
dim_y = 2
"#,
        );
        let bundle = cfg.problem.build().unwrap();
        assert_eq!(bundle.seed, Some(7));
        assert_eq!(bundle.op.rows(), 3);
    }

    #[test]
    fn bad_method_and_form_are_config_errors() {
        let cfg = parse_cfg(
            r#"
method = "nope"

[problem]
form = "composite-l"
seed = 1
"#,
        );
        assert!(Method::parse(&cfg.method).is_none());

        let cfg = parse_cfg(
            r#"
method = "dr"

[problem]
form = "weird"
seed = 1
"#,
        );
        assert!(matches!(cfg.problem.build(), Err(Error::Config(_))));
    }

    #[test]
    fn run_and_verify_end_to_end() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("cfg.toml");
        let out_path = dir.path().join("trace.csv");
        fs::write(
            &cfg_path,
            r#"
method = "dr"
iters = 5

[problem]
form = "composite-l"
f = { kind = "half-squared-norm", dim = 1 }
g = { kind = "half-squared-norm", dim = 1 }

[start]
x0 = [2.0]
"#,
        )
        .unwrap();
        let code = execute(Cli::parse_from([
            "opsplit",
            "run",
            "--config",
            cfg_path.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
        ]));
        assert_eq!(code, 0);
        let csv = fs::read_to_string(&out_path).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "iter,x0,y0,residual");
        assert!(lines.next().unwrap().starts_with("0,2.0000000000000000e0"));

        let code = execute(Cli::parse_from([
            "opsplit",
            "verify",
            "dr-admm",
            "--seeds",
            "2",
            "--iters",
            "20",
        ]));
        assert_eq!(code, 0);

        let code = execute(Cli::parse_from(["opsplit", "counterexample"]));
        assert_eq!(code, 0);
    }
}

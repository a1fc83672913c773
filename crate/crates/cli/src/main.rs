use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hring::algebra::{eval_expr, verify_ring, verify_ring_on, Definition, EvalMode, ExprTree, Op, RingCheckConfig};
use hring::baire::grid_sample;
use hring::convergence::{compare_def1_def3, error_ratios, grid_convergence};
use hring::json::{function_to_json, interval_to_json, parse_file, scalar_to_json, FunctionFile};
use hring::order::max_deviation;
use hring::piecewise::{is_h_continuous, is_s_continuous, parse_constant, validate_envelopes, EndEnvelope, EnvelopeReport, EqConfig, Side};
use hring::scalar::FLOAT_TOL;
use hring::suite::SuiteConfig;
use hring::{Error, HFunction, Mode, Scalar};

/// Tolerance for def3 comparisons when `--tol` is not given.
const DEF3_TOL: f64 = 1e-3;

#[derive(Parser)]
#[command(name = "hring", version, about = "Ring operations on Hausdorff continuous interval functions")]
struct Cli {
    /// Arithmetic for file values and points.
    #[arg(long, value_enum, global = true, default_value_t = ModeArg::Rational)]
    mode: ModeArg,
    /// Comparison tolerance (default 1e-9, or 1e-3 for order-limit comparisons).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for every pseudo-random choice.
    #[arg(long, global = true, default_value_t = 2024)]
    seed: u64,
    /// Number of sample points for comparisons.
    #[arg(long, global = true, default_value_t = 1000)]
    samples: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Rational,
    Float,
}

#[derive(Subcommand)]
enum Command {
    /// Print "x lo hi" for each point.
    Eval {
        file: PathBuf,
        name: String,
        #[arg(required = true, allow_hyphen_values = true)]
        points: Vec<String>,
    },
    /// Evaluate an expression with the ring operations and print the result as JSON.
    Op {
        file: PathBuf,
        expr: String,
        #[arg(long = "def", default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        definition: u8,
        /// Depth of the approximating sequences for definition 3.
        #[arg(long, default_value_t = 4096)]
        depth: u64,
        /// Compute every applicable definition and fail if they disagree.
        #[arg(long)]
        check_all: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check the ring axioms on a seeded random suite or on the functions of a file.
    VerifyRing {
        #[arg(long, default_value_t = 200)]
        cases: usize,
        /// Use uncompleted pointwise operations.
        #[arg(long)]
        mutant: bool,
        /// Also check that the completion and restriction definitions agree.
        #[arg(long)]
        defs: bool,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Sample a function on the grid x0 + i*h, i < n, as CSV.
    Sample {
        file: PathBuf,
        name: String,
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long)]
        h: String,
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Error of the grid operators against the exact result for each step.
    GridConverge {
        file: PathBuf,
        expr: String,
        /// Comma-separated grid steps.
        #[arg(long, value_delimiter = ',', required = true)]
        h: Vec<String>,
        /// Comma-separated window "lo,hi"; defaults to the domain.
        #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
        window: Option<Vec<String>>,
    },
    /// Compare the order-limit definition against the completion definition.
    CompareDefs {
        file: PathBuf,
        /// Operand names; defaults to the first two functions in the file.
        names: Vec<String>,
        #[arg(long, default_value_t = 4096)]
        depth: u64,
        #[arg(long, value_delimiter = ',', default_value = "plus,times")]
        ops: Vec<OpArg>,
        /// Write the per-point table to this CSV file.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Report continuity classes and check non-evaluated envelopes.
    Validate {
        file: PathBuf,
        #[arg(long, default_value_t = 50)]
        samples_per_decade: usize,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OpArg {
    Plus,
    Times,
}

impl From<OpArg> for Op {
    fn from(o: OpArg) -> Op {
        match o {
            OpArg::Plus => Op::Plus,
            OpArg::Times => Op::Times,
        }
    }
}

enum Failure {
    Lib(Error),
    Io(String),
    /// A check ran and did not pass; the report was already printed.
    Check,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(), Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Format(_) | Error::InvalidInterval { .. } | Error::InvalidFunction(_) => 2,
        Error::Unbound(_) => 3,
        Error::Domain(_) => 4,
        Error::NotHContinuous(_) => 5,
        Error::NotPiecewiseLinear(_) => 6,
        _ => 1,
    }
}

struct Ctx {
    mode: Mode,
    tol: Option<f64>,
    seed: u64,
    samples: usize,
}

impl Ctx {
    fn load(&self, path: &Path) -> Result<FunctionFile, Failure> {
        let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        Ok(parse_file(&text, self.mode)?)
    }

    fn scalar(&self, text: &str) -> Result<Scalar, Failure> {
        Ok(parse_constant(text, self.mode)?)
    }
}

fn emit(text: &str, output: Option<&Path>) -> Outcome {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(v: &Value, output: Option<&Path>) -> Outcome {
    let mut text = serde_json::to_string_pretty(v).expect("JSON values serialize");
    text.push('\n');
    emit(&text, output)
}

fn cmd_eval(ctx: &Ctx, file: &Path, name: &str, points: &[String]) -> Outcome {
    let defs = ctx.load(file)?;
    let f = defs.get(name)?;
    let mut out = String::new();
    for p in points {
        let x = ctx.scalar(p)?;
        let v = f.eval_at(&x)?;
        out.push_str(&format!("{} {} {}\n", x.to_text(), v.lo().to_text(), v.hi().to_text()));
    }
    emit(&out, None)
}

fn definition(number: u8, depth: u64) -> Definition {
    match number {
        1 => Definition::Completion,
        2 => Definition::Restriction,
        _ => Definition::OrderLimit { depth },
    }
}

fn cmd_op(ctx: &Ctx, file: &Path, expr: &str, def: u8, depth: u64, check_all: bool, output: Option<&Path>) -> Outcome {
    let defs = ctx.load(file)?;
    let tree = ExprTree::parse(expr)?;
    let result = eval_expr(&tree, &defs, EvalMode::Ring(definition(def, depth)))?;
    emit_json(&function_to_json(&result), output)?;
    if !check_all {
        return Ok(());
    }
    let eq = EqConfig { tol: ctx.tol.unwrap_or(FLOAT_TOL), seed: ctx.seed, ..EqConfig::default() };
    let reference = eval_expr(&tree, &defs, EvalMode::Ring(Definition::Completion))?;
    let mut problems = Vec::new();
    if let Some(d) = eval_expr(&tree, &defs, EvalMode::Ring(Definition::Restriction))?.first_difference(&reference, &eq) {
        problems.push(format!("definitions 1 and 2 differ: {d}"));
    }
    let all_linear = tree.leaves().iter().all(|n| defs.get(n).is_ok_and(HFunction::is_piecewise_linear));
    if all_linear && defs.envelopes.is_empty() {
        let d3 = eval_expr(&tree, &defs, EvalMode::Ring(Definition::OrderLimit { depth }))?;
        let dev = max_deviation(&reference, &d3, ctx.samples, ctx.seed)?;
        let tol = ctx.tol.unwrap_or(DEF3_TOL);
        if dev > tol {
            problems.push(format!("definitions 1 and 3 differ by {dev:e} > {tol:e}"));
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        for p in problems {
            eprintln!("{p}");
        }
        Err(Failure::Check)
    }
}

fn cmd_verify_ring(ctx: &Ctx, cases: usize, mutant: bool, defs: bool, file: Option<&Path>) -> Outcome {
    let report = match file {
        Some(path) => {
            let loaded = ctx.load(path)?;
            let functions: Vec<HFunction> = loaded.functions.into_iter().map(|(_, f)| f).collect();
            verify_ring_on(&functions, mutant, defs)
        }
        None => verify_ring(&RingCheckConfig {
            suite: SuiteConfig { cases, seed: ctx.seed, ..SuiteConfig::default() },
            mutant,
            compare_definitions: defs,
        }),
    };
    let axioms: serde_json::Map<String, Value> = report
        .axioms
        .iter()
        .map(|a| {
            let entry = json!({
                "passed": a.passed(),
                "checked": a.checked,
                "failures": a.failures,
                "counterexample": a.counterexample,
            });
            (a.name.to_string(), entry)
        })
        .collect();
    let v = json!({
        "cases": report.cases,
        "seed": ctx.seed,
        "mutant": mutant,
        "passed": report.passed(),
        "axioms": axioms,
    });
    emit_json(&v, None)?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn cmd_sample(ctx: &Ctx, file: &Path, name: &str, x0: &str, h: &str, n: usize, output: Option<&Path>) -> Outcome {
    let defs = ctx.load(file)?;
    let f = defs.get(name)?;
    let grid = grid_sample(f, &ctx.scalar(x0)?, &ctx.scalar(h)?, n)?;
    emit(&grid.to_csv(), output)
}

fn cmd_grid_converge(ctx: &Ctx, file: &Path, expr: &str, hs: &[String], window: Option<&[String]>) -> Outcome {
    let defs = ctx.load(file)?;
    let tree = ExprTree::parse(expr)?;
    let exact = eval_expr(&tree, &defs, EvalMode::Ring(Definition::Completion))?;
    let pointwise = eval_expr(&tree, &defs, EvalMode::Pointwise)?;
    let operands: Vec<&HFunction> = tree.leaves().into_iter().map(|n| defs.get(n)).collect::<Result<_, _>>()?;
    let (lo, hi) = match window {
        Some([lo, hi]) => (ctx.scalar(lo)?, ctx.scalar(hi)?),
        Some(_) => return Err(Error::Format("--window takes two values".into()).into()),
        None => exact.domain().window(),
    };
    let hs: Vec<Scalar> = hs.iter().map(|h| ctx.scalar(h)).collect::<Result<_, _>>()?;
    let rows = grid_convergence(&pointwise, &exact, &operands, (&lo, &hi), &hs)?;
    let table: Vec<Value> = rows
        .iter()
        .map(|r| json!({"h": scalar_to_json(&r.h), "max_error": r.max_error, "points": r.points}))
        .collect();
    let v = json!({
        "expr": tree.to_string(),
        "window": [scalar_to_json(&lo), scalar_to_json(&hi)],
        "rows": table,
        "ratios": error_ratios(&rows),
    });
    emit_json(&v, None)
}

fn cmd_compare_defs(ctx: &Ctx, file: &Path, names: &[String], depth: u64, ops: &[OpArg], table: Option<&Path>) -> Outcome {
    let defs = ctx.load(file)?;
    let (f, g) = match names {
        [] if defs.functions.len() >= 2 => (&defs.functions[0].1, &defs.functions[1].1),
        [] => return Err(Error::Format("compare-defs needs two functions".into()).into()),
        [a] => (defs.get(a)?, defs.get(a)?),
        [a, b] => (defs.get(a)?, defs.get(b)?),
        _ => return Err(Error::Format("compare-defs takes at most two names".into()).into()),
    };
    let tol = ctx.tol.unwrap_or(DEF3_TOL);
    let mut csv = String::from("op,x,def1_lo,def1_hi,def3_lo,def3_hi,deviation\n");
    let mut per_op = Vec::new();
    let mut overall: f64 = 0.0;
    for &o in ops {
        let op = Op::from(o);
        let c = compare_def1_def3(op, f, g, depth, ctx.samples, ctx.seed)?;
        for r in &c.rows {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{:e}\n",
                op.symbol(),
                r.x.to_text(),
                r.def1.lo().to_text(),
                r.def1.hi().to_text(),
                r.def3.lo().to_text(),
                r.def3.hi().to_text(),
                r.deviation
            ));
        }
        overall = overall.max(c.max_abs_deviation);
        per_op.push(json!({
            "op": op.symbol(),
            "max_abs_deviation": c.max_abs_deviation,
            "passed": c.max_abs_deviation <= tol,
        }));
    }
    if let Some(p) = table {
        emit(&csv, Some(p))?;
    }
    let passed = overall <= tol;
    let v = json!({
        "depth": depth,
        "tol": tol,
        "max_abs_deviation": overall,
        "passed": passed,
        "ops": per_op,
        "table": table.map(|p| p.display().to_string()),
    });
    emit_json(&v, None)?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn envelope_report_json(report: &EnvelopeReport) -> Value {
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| {
            json!({
                "x": scalar_to_json(&c.x),
                "side": match c.side { Side::Left => "left", Side::Right => "right" },
                "provenance": c.provenance.name(),
                "envelope": interval_to_json(&hring::Interval::hull_of(c.liminf.clone(), c.limsup.clone())),
                "observed": [c.observed_min, c.observed_max],
                "problems": c.problems,
            })
        })
        .collect();
    json!({"passed": report.passed(), "checks": checks})
}

fn cmd_validate(ctx: &Ctx, file: &Path, spd: usize, eps: f64) -> Outcome {
    let defs = ctx.load(file)?;
    let mut passed = true;
    let mut functions = serde_json::Map::new();
    for (name, f) in &defs.functions {
        let report = validate_envelopes(f, spd, eps);
        passed &= report.passed();
        functions.insert(
            name.clone(),
            json!({
                "h_continuous": is_h_continuous(f),
                "s_continuous": is_s_continuous(f),
                "envelopes": envelope_report_json(&report),
            }),
        );
    }
    let bare = FunctionFile { functions: defs.functions.clone(), envelopes: Vec::new() };
    let mut declarations = serde_json::Map::new();
    for decl in &defs.envelopes {
        if declarations.contains_key(&decl.expr) {
            continue;
        }
        let tree = ExprTree::parse(&decl.expr)?;
        let mut p = eval_expr(&tree, &bare, EvalMode::Pointwise)?;
        for d in defs.envelopes.iter().filter(|d| d.expr == decl.expr) {
            p = p.declare_envelope(&d.at, &d.sides, EndEnvelope::declared(d.liminf.clone(), d.limsup.clone()))?;
        }
        let report = validate_envelopes(&p, spd, eps);
        passed &= report.passed();
        declarations.insert(decl.expr.clone(), envelope_report_json(&report));
    }
    let v = json!({"passed": passed, "functions": functions, "declarations": declarations});
    emit_json(&v, None)?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn run(cli: Cli) -> Outcome {
    let ctx = Ctx {
        mode: match cli.mode {
            ModeArg::Rational => Mode::Rational,
            ModeArg::Float => Mode::Float,
        },
        tol: cli.tol,
        seed: cli.seed,
        samples: cli.samples,
    };
    if ctx.tol.is_some_and(|t| !(t > 0.0)) {
        return Err(Error::Format("--tol must be positive".into()).into());
    }
    if ctx.samples == 0 {
        return Err(Error::Format("--samples must be at least 1".into()).into());
    }
    match &cli.command {
        Command::Eval { file, name, points } => cmd_eval(&ctx, file, name, points),
        Command::Op { file, expr, definition, depth, check_all, output } => {
            cmd_op(&ctx, file, expr, *definition, *depth, *check_all, output.as_deref())
        }
        Command::VerifyRing { cases, mutant, defs, file } => cmd_verify_ring(&ctx, *cases, *mutant, *defs, file.as_deref()),
        Command::Sample { file, name, x0, h, n, output } => cmd_sample(&ctx, file, name, x0, h, *n, output.as_deref()),
        Command::GridConverge { file, expr, h, window } => cmd_grid_converge(&ctx, file, expr, h, window.as_deref()),
        Command::CompareDefs { file, names, depth, ops, table } => {
            cmd_compare_defs(&ctx, file, names, *depth, ops, table.as_deref())
        }
        Command::Validate { file, samples_per_decade, eps } => cmd_validate(&ctx, file, *samples_per_decade, *eps),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

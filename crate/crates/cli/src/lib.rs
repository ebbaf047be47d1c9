//! The `redarg` command line: property checks, analysis, erasure, evaluation,
//! differential verification, the brute-force oracle and the benchmark runner.

pub mod bench;

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context as _};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use redarg_core::analysis::{analyze, AnalysisConfig, Method};
use redarg_core::erasure::{erase_trs, erasure_from_analysis, reduced_erasure, ErasedTrs, SyntacticErasure};
use redarg_core::oracle::{brute_force_redundant, differential_verify_erased, EnumBounds, VerifyConfig};
use redarg_core::rewrite::{format_trace, Rewriter, Strategy, DEFAULT_FUEL};
use redarg_core::trs::{parse_trs, PropertyReport, TrsError};
use redarg_core::{EvalOutcome, Trs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_FUEL: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "redarg",
    version,
    about = "Find and erase redundant arguments of rewrite systems"
)]
pub struct Cli {
    /// Treat every input system as terminating.
    #[arg(long, global = true)]
    pub assume_terminating: bool,
    /// Rewrite step budget (default: $REDARG_FUEL, else 10000).
    #[arg(long, global = true)]
    pub fuel: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report structural properties.
    Check {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Detect redundant arguments.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        /// Run only this method; exits 4 when its preconditions fail.
        #[arg(long, value_parser = parse_method)]
        method: Option<Method>,
    },
    /// Erase the redundant arguments (or those given with --rho).
    Erase {
        file: PathBuf,
        /// Also compress: drop trivial and duplicate rules, normalize rhss.
        #[arg(long)]
        reduced: bool,
        /// Appended to the name of every symbol that loses an argument.
        #[arg(long, default_value = "")]
        suffix: String,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
        /// Explicit erasure, e.g. `h:1` or `f:1,2`; repeatable.
        #[arg(long)]
        rho: Vec<String>,
    },
    /// Normalize a ground term.
    Eval {
        file: PathBuf,
        #[arg(short = 'e', long = "expr")]
        expr: String,
        #[arg(long, default_value = "innermost")]
        strategy: Strategy,
        #[arg(long)]
        count_steps: bool,
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Compare evaluation before and after erasure on sampled terms.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        rho: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Search for a counterexample to the redundancy of one argument.
    Oracle {
        file: PathBuf,
        #[arg(short = 'f', long = "symbol")]
        symbol: String,
        #[arg(short = 'i', long = "index")]
        index: usize,
        #[arg(long, default_value_t = 3)]
        ctx_depth: usize,
        #[arg(long, default_value_t = 3)]
        term_depth: usize,
        #[arg(long, default_value_t = 50_000)]
        max_cases: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run the benchmark corpus described by DIR/bench.toml.
    Bench {
        dir: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

fn parse_method(s: &str) -> Result<Method, String> {
    match s {
        "variable" => Ok(Method::Variable),
        "pattern" => Ok(Method::Pattern),
        other => Err(format!("unknown method {other:?} (expected variable or pattern)")),
    }
}

/// Failures carrying their exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl Failure {
    fn new(code: i32, error: anyhow::Error) -> Failure {
        Failure { code, error }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure::new(EXIT_INPUT, error)
    }
}

/// Parses `argv` (including the program name) and runs the command.
/// Documents go to `out`, diagnostics to `err`; returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {:#}", f.error);
            f.code
        }
    }
}

fn default_fuel(cli: &Cli) -> usize {
    cli.fuel
        .or_else(|| std::env::var("REDARG_FUEL").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(DEFAULT_FUEL)
}

pub fn load(path: &Path, assume_terminating: bool) -> anyhow::Result<Trs> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let trs = parse_trs(&text).map_err(|e| describe_parse(path, &e))?;
    Ok(if assume_terminating {
        trs.with_termination_attested(true)
    } else {
        trs
    })
}

fn describe_parse(path: &Path, e: &TrsError) -> anyhow::Error {
    anyhow!("{}: {e}", path.display())
}

/// Reads `f:1,2` style erasure entries.
pub fn parse_rho(specs: &[String], trs: &Trs) -> anyhow::Result<SyntacticErasure> {
    let mut entries = Vec::new();
    for spec in specs {
        let (f, indices) = spec
            .split_once(':')
            .ok_or_else(|| anyhow!("erasure entry {spec:?} is not of the form f:1,2"))?;
        let indices: BTreeSet<usize> = indices
            .split(',')
            .map(|i| {
                i.trim()
                    .parse::<usize>()
                    .map_err(|_| anyhow!("bad index {i:?} in {spec:?}"))
            })
            .collect::<anyhow::Result<_>>()?;
        entries.push((f.trim().to_string(), indices));
    }
    Ok(SyntacticErasure::new(entries, trs.signature())?)
}

fn emit_json(out: &mut dyn Write, doc: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(doc).map_err(|e| Failure::new(EXIT_INPUT, e.into()))?;
    writeln!(out, "{text}").map_err(|e| Failure::new(EXIT_INPUT, e.into()))
}

fn io(e: std::io::Error) -> Failure {
    Failure::new(EXIT_INPUT, e.into())
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let fuel = default_fuel(cli);
    match &cli.command {
        Command::Check { file, json } => {
            let trs = load(file, cli.assume_terminating)?;
            let report = PropertyReport::compute(&trs, fuel);
            if *json {
                emit_json(out, &json!({"command": "check", "file": file, "report": report}))?;
            } else {
                writeln!(out, "{report}").map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Analyze { file, json, method } => {
            let trs = load(file, cli.assume_terminating)?;
            let mut cfg = AnalysisConfig {
                fuel,
                ..AnalysisConfig::default()
            };
            if let Some(m) = method {
                cfg.methods = BTreeSet::from([*m]);
            }
            let analysis = analyze(&trs, &cfg);
            if let Some(m) = method {
                let unmet = match m {
                    Method::Variable => analysis.gates.variable_unmet(),
                    Method::Pattern => analysis.gates.pattern_unmet(),
                };
                if !unmet.is_empty() {
                    for note in &analysis.notes {
                        writeln!(err, "{note}").map_err(io)?;
                    }
                    let names: Vec<String> = unmet.iter().map(|g| g.to_string()).collect();
                    return Err(Failure::new(
                        EXIT_PRECONDITION,
                        anyhow!("precondition unmet: {}", names.join(", ")),
                    ));
                }
            }
            if *json {
                emit_json(out, &json!({"command": "analyze", "file": file, "analysis": analysis}))?;
            } else {
                write!(out, "{analysis}").map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Erase {
            file,
            reduced,
            suffix,
            output,
            rho,
        } => {
            let trs = load(file, cli.assume_terminating)?;
            let rho = erasure_for(&trs, rho, fuel)?;
            let mut erased = erase_trs(&trs, &rho, suffix).map_err(|e| Failure::new(EXIT_INPUT, e.into()))?;
            if *reduced {
                erased = reduced_erasure(&erased, fuel).map_err(|e| Failure::new(EXIT_INPUT, e.into()))?;
                for w in &erased.warnings {
                    writeln!(err, "warning: {w}").map_err(io)?;
                }
            }
            let text = erased.trs.to_string();
            match output {
                Some(path) => {
                    fs::write(path, &text).map_err(io)?;
                    let sidecar = origin_path(path);
                    let doc = json!({"command": "erase", "file": file, "erasure": rho, "origin": erased.origin});
                    let doc = serde_json::to_string_pretty(&doc).map_err(|e| Failure::new(EXIT_INPUT, e.into()))?;
                    fs::write(sidecar, doc + "\n").map_err(io)?;
                }
                None => write!(out, "{text}").map_err(io)?,
            }
            Ok(EXIT_OK)
        }
        Command::Eval {
            file,
            expr,
            strategy,
            count_steps,
            trace,
            json,
        } => {
            let trs = load(file, cli.assume_terminating)?;
            let goal = trs.parse_ground_term(expr).map_err(|e| anyhow!("goal: {e}"))?;
            let rw = Rewriter::new(&trs).with_strategy(*strategy).with_fuel(fuel);
            let (outcome, steps) = rw.normalize_traced(&goal);
            if *json {
                emit_json(
                    out,
                    &json!({"command": "eval", "file": file, "goal": goal, "strategy": strategy, "result": outcome}),
                )?;
            } else {
                if *trace {
                    write!(out, "{}", format_trace(&goal, &steps, &trs)).map_err(io)?;
                }
                writeln!(out, "{}", outcome.term()).map_err(io)?;
                if *count_steps {
                    writeln!(out, "steps: {}", outcome.steps()).map_err(io)?;
                }
            }
            match outcome {
                EvalOutcome::FuelExhausted { steps, .. } => {
                    Err(Failure::new(EXIT_FUEL, anyhow!("fuel exhausted after {steps} steps")))
                }
                EvalOutcome::NormalForm { .. } => {
                    writeln!(err, "note: normal form is not a constructor term").map_err(io)?;
                    Ok(EXIT_OK)
                }
                EvalOutcome::Value { .. } => Ok(EXIT_OK),
            }
        }
        Command::Verify {
            file,
            trials,
            depth,
            seed,
            rho,
            json,
        } => {
            let trs = load(file, cli.assume_terminating)?;
            if let Err(w) = redarg_core::trs::check_left_linear(&trs) {
                return Err(Failure::new(
                    EXIT_PRECONDITION,
                    anyhow!("verification needs a left-linear system ({w})"),
                ));
            }
            let rho = erasure_for(&trs, rho, fuel)?;
            let cfg = VerifyConfig {
                trials: *trials,
                depth: *depth,
                seed: *seed,
                fuel,
            };
            let erased = erased_program(&trs, &rho, fuel)?;
            for w in &erased.warnings {
                writeln!(err, "warning: {w}").map_err(io)?;
            }
            let report = differential_verify_erased(&trs, &erased, &cfg);
            if *json {
                emit_json(out, &json!({"command": "verify", "file": file, "report": report}))?;
            } else {
                write!(out, "{report}").map_err(io)?;
            }
            Ok(if report.passed() { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Oracle {
            file,
            symbol,
            index,
            ctx_depth,
            term_depth,
            max_cases,
            json,
        } => {
            let trs = load(file, cli.assume_terminating)?;
            let bounds = EnumBounds {
                ctx_depth: *ctx_depth,
                term_depth: *term_depth,
                max_cases: *max_cases,
                ..EnumBounds::default()
            };
            let verdict =
                brute_force_redundant(&trs, symbol, *index, &bounds).map_err(|e| Failure::new(EXIT_INPUT, e.into()))?;
            if *json {
                emit_json(
                    out,
                    &json!({"command": "oracle", "file": file, "symbol": symbol, "index": index, "verdict": verdict}),
                )?;
            } else {
                writeln!(out, "{verdict}").map_err(io)?;
            }
            Ok(if verdict.counterexample().is_some() {
                EXIT_NEGATIVE
            } else {
                EXIT_OK
            })
        }
        Command::Bench { dir, json } => {
            let started = Instant::now();
            let report = bench::run_bench(dir, fuel)?;
            if *json {
                emit_json(out, &json!({"command": "bench", "dir": dir, "report": report}))?;
            } else {
                write!(out, "{report}").map_err(io)?;
                writeln!(err, "bench finished in {:.3}s", started.elapsed().as_secs_f64()).map_err(io)?;
            }
            Ok(if report.passed() { EXIT_OK } else { EXIT_NEGATIVE })
        }
    }
}

/// The explicit `--rho` erasure when given, else the analyzer's.
fn erasure_for(trs: &Trs, specs: &[String], fuel: usize) -> Result<SyntacticErasure, Failure> {
    if !specs.is_empty() {
        return Ok(parse_rho(specs, trs)?);
    }
    let cfg = AnalysisConfig {
        fuel,
        ..AnalysisConfig::default()
    };
    let analysis = analyze(trs, &cfg);
    erasure_from_analysis(&analysis.redundant, trs.signature()).map_err(|e| Failure::new(EXIT_INPUT, e.into()))
}

/// The reduced erasure, or the plain one when reduction gave up.
pub fn erased_program(trs: &Trs, rho: &SyntacticErasure, fuel: usize) -> Result<ErasedTrs, Failure> {
    let erased = erase_trs(trs, rho, "").map_err(|e| Failure::new(EXIT_INPUT, e.into()))?;
    reduced_erasure(&erased, fuel).map_err(|e| Failure::new(EXIT_INPUT, e.into()))
}

fn origin_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".origin.json");
    path.with_file_name(name)
}

//! Command-line front end.
//!
//! Everything runs through [`run`], which takes the argument list and two
//! output streams and returns the process exit status, so the commands can
//! be driven in-process.
//!
//! | status | meaning |
//! |---|---|
//! | 0 | correct (or safe, for `oracle`) |
//! | 1 | bug found (or unsafe) |
//! | 2 | bound exhausted |
//! | 3 | usage, parse or configuration error |
//! | 4 | plain and extended modes disagree |

mod record;
mod suite;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::encoder::{
    encode_base_case, encode_forward_condition, encode_halt_sink_check, encode_inductive_step, serialize_smtlib,
};
use crate::engine::{self, EngineConfig, EngineError, Mode, Outcome, TargetRecheck, VerificationReport, WitnessSource};
use crate::frontend::parse_file;
use crate::ir::{Trace, TransitionSystem};
use crate::oracle::{bfs_check, Classification, DEFAULT_STATE_CAP};
use crate::solver::{self, Backend, SatStatus, SolverConfig, SOLVER_ENV};

pub use record::{IterationRecord, RecordProof, RunRecord};
pub use suite::{peak_rss_kb, render_markdown, run_suite, suite, SuiteError, SUITES};

pub const EXIT_CORRECT: i32 = 0;
pub const EXIT_BUG: i32 = 1;
pub const EXIT_BOUND: i32 = 2;
pub const EXIT_ERROR: i32 = 3;
pub const EXIT_DISCREPANCY: i32 = 4;

pub fn exit_code(outcome: Outcome) -> i32 {
    match outcome {
        Outcome::Correct => EXIT_CORRECT,
        Outcome::BugFound => EXIT_BUG,
        Outcome::BoundExhausted => EXIT_BOUND,
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "kindmc",
    version,
    about = "k-induction model checker with bidirectional target search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the properties of a .kts system
    Verify {
        file: PathBuf,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long = "engine", value_enum, default_value_t = EngineChoice::Extended)]
        engine_mode: EngineChoice,
        #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
        output: OutputFormat,
    },
    /// Run plain and extended k-induction side by side
    Compare {
        file: PathBuf,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
        output: OutputFormat,
    },
    /// Run a benchmark suite in both modes
    Bench {
        #[arg(long, default_value = "paper-analogues")]
        suite: String,
        /// Write the JSON records here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the markdown table here instead of standard output
        #[arg(long)]
        markdown: Option<PathBuf>,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Explicit-state breadth-first check (small systems only)
    Oracle {
        file: PathBuf,
        /// Largest number of state bits to explore
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        cap: u32,
        #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
        output: OutputFormat,
    },
    /// Print one encoded query as an SMT-LIB2 script
    Smt {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = QueryChoice::Base)]
        query: QueryChoice,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
}

#[derive(Args, Debug)]
struct EngineArgs {
    #[arg(long, default_value_t = 100)]
    max_k: u32,
    /// `enum`, `external` (command from KINDMC_SOLVER) or `external:<cmd>`
    #[arg(long, default_value = "enum")]
    solver: String,
    #[arg(long, value_enum, default_value_t = RecheckChoice::Same)]
    target_recheck: RecheckChoice,
    /// Per-query limit for external solvers; 0 disables it
    #[arg(long, default_value_t = 0)]
    timeout_ms: u64,
    /// Largest per-step bit count the enumerator searches
    #[arg(long, default_value_t = solver::DEFAULT_ENUM_CAP)]
    enum_cap: u32,
    /// Skip replaying witnesses
    #[arg(long)]
    no_validate: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineChoice {
    Plain,
    Extended,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RecheckChoice {
    Same,
    Next,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Human,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum QueryChoice {
    Base,
    Forward,
    Inductive,
}

impl EngineArgs {
    fn config(&self, mode: Mode) -> Result<EngineConfig, String> {
        let backend = match self.solver.as_str() {
            "enum" => Backend::Enumerator,
            "external" => {
                let cmd = std::env::var(SOLVER_ENV)
                    .map_err(|_| format!("--solver external needs {SOLVER_ENV} to name a solver command"))?;
                Backend::External(cmd.split_whitespace().map(String::from).collect())
            }
            other => match other.strip_prefix("external:") {
                Some(cmd) => Backend::External(cmd.split_whitespace().map(String::from).collect()),
                None => {
                    return Err(format!(
                        "unknown solver `{other}` (expected enum, external or external:<cmd>)"
                    ))
                }
            },
        };
        let cfg = EngineConfig {
            mode,
            max_k: self.max_k,
            target_recheck: match self.target_recheck {
                RecheckChoice::Same => TargetRecheck::SameIteration,
                RecheckChoice::Next => TargetRecheck::NextIteration,
            },
            solver: SolverConfig {
                backend,
                timeout_ms: self.timeout_ms,
                enum_bit_cap: self.enum_cap,
            },
            validate_witness: !self.no_validate,
        };
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{text}");
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        EXIT_ERROR
                    } else {
                        EXIT_CORRECT
                    }
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_ERROR
                }
            };
        }
    };
    let result = match cli.command {
        Command::Verify {
            file,
            engine,
            engine_mode,
            output,
        } => {
            let mode = match engine_mode {
                EngineChoice::Plain => Mode::Plain,
                EngineChoice::Extended => Mode::Extended,
            };
            cmd_verify(&file, &engine, mode, output, out, err)
        }
        Command::Compare { file, engine, output } => cmd_compare(&file, &engine, output, out, err),
        Command::Bench {
            suite,
            out: json_path,
            markdown,
            engine,
        } => cmd_bench(&suite, json_path.as_deref(), markdown.as_deref(), &engine, out, err),
        Command::Oracle { file, cap, output } => cmd_oracle(&file, cap, output, out),
        Command::Smt { file, query, k } => cmd_smt(&file, query, k, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

struct Failure(i32, String);

impl Failure {
    fn usage(msg: impl ToString) -> Self {
        Failure(EXIT_ERROR, msg.to_string())
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Discrepancy { .. } => Failure(EXIT_DISCREPANCY, e.to_string()),
            other => Failure(EXIT_ERROR, other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(EXIT_ERROR, e.to_string())
    }
}

fn load(file: &Path) -> Result<TransitionSystem, Failure> {
    parse_file(file).map_err(|e| Failure::usage(format!("{}: {e}", file.display())))
}

/// Warns when halt states can step to non-halt states, which would make
/// forward-condition proofs unsound.
fn lint_halt(sys: &TransitionSystem, cfg: &SolverConfig, err: &mut dyn Write) {
    if sys.halt().as_const().is_some() {
        return;
    }
    let q = encode_halt_sink_check(sys);
    if let Ok(v) = solver::check(&q, cfg) {
        if v.status == SatStatus::Sat {
            let _ = writeln!(
                err,
                "warning: some halt state has a non-halt successor; forward-condition proofs assume halt states are sinks"
            );
        }
    }
}

fn trace_json(t: &Trace) -> serde_json::Value {
    serde_json::to_value(t).expect("traces serialize")
}

fn report_json(file: &Path, r: &VerificationReport) -> serde_json::Value {
    json!({
        "file": file.display().to_string(),
        "outcome": r.outcome,
        "k": r.final_k,
        "proof_source": r.proof_source,
        "witness_len": r.witness_len(),
        "witness": r.witness.as_ref().map(trace_json),
        "witness_source": r.witness_source,
        "solver_calls": r.solver_calls(),
        "targets_added": r.targets_added(),
        "time_ms": r.time_ms.round() as u64,
        "timestamp": chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        "warnings": r.warnings,
        "iterations": r.iterations,
        "config": r.config,
    })
}

fn describe(sys: &TransitionSystem, r: &VerificationReport) -> String {
    let mut s = match r.outcome {
        Outcome::BugFound => {
            let len = r.witness_len().unwrap_or(0);
            let via = match r.witness_source {
                Some(WitnessSource::Target {
                    target,
                    depth,
                    born_at_k,
                }) => format!(", forward path met target {target} (from k={born_at_k}) at depth {depth}"),
                _ => String::new(),
            };
            let noun = if len == 1 { "state" } else { "states" };
            format!("bug found at k={} (counterexample of {len} {noun}{via})\n", r.final_k)
        }
        Outcome::Correct => format!(
            "correct at k={} by {}\n",
            r.final_k,
            r.proof_source.map_or("?".to_string(), |p| p.to_string())
        ),
        Outcome::BoundExhausted => format!("no verdict up to k={}\n", r.final_k),
    };
    if let Some(w) = &r.witness {
        s.push_str(&w.render(sys));
    }
    for w in &r.warnings {
        s.push_str(&format!("warning: {w}\n"));
    }
    s
}

fn cmd_verify(
    file: &Path,
    args: &EngineArgs,
    mode: Mode,
    output: OutputFormat,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let sys = load(file)?;
    let cfg = args.config(mode).map_err(Failure::usage)?;
    lint_halt(&sys, &cfg.solver, err);
    let report = engine::run(&sys, &cfg)?;
    match output {
        OutputFormat::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&report_json(file, &report)).unwrap()
        )?,
        OutputFormat::Human => {
            writeln!(
                out,
                "{} ({} mode, solver {})",
                file.display(),
                cfg.mode,
                cfg.solver.backend
            )?;
            write!(out, "{}", describe(&sys, &report))?;
        }
    }
    Ok(exit_code(report.outcome))
}

fn cmd_compare(
    file: &Path,
    args: &EngineArgs,
    output: OutputFormat,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let sys = load(file)?;
    let cfg = args.config(Mode::Extended).map_err(Failure::usage)?;
    lint_halt(&sys, &cfg.solver, err);
    let name = file
        .file_stem()
        .map_or("system".into(), |s| s.to_string_lossy().into_owned());
    let c = match engine::compare(&sys, &cfg) {
        Ok(c) => c,
        Err(EngineError::Discrepancy {
            reports,
            plain,
            extended,
        }) => {
            let (p, e) = *reports;
            write_comparison(out, output, &name, &p, &e)?;
            return Err(Failure(
                EXIT_DISCREPANCY,
                format!("plain mode says {plain}, extended mode says {extended}"),
            ));
        }
        Err(e) => return Err(e.into()),
    };
    write_comparison(out, output, &name, &c.plain, &c.extended)?;
    Ok(exit_code(c.extended.outcome))
}

fn write_comparison(
    out: &mut dyn Write,
    output: OutputFormat,
    name: &str,
    plain: &VerificationReport,
    extended: &VerificationReport,
) -> Result<(), Failure> {
    let p = RunRecord::from_report(name, plain);
    let e = RunRecord::from_report(name, extended);
    let delta = p.k as i64 - e.k as i64;
    match output {
        OutputFormat::Json => {
            let doc = json!({
                "plain": p,
                "extended": e,
                "k_delta": delta,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap())?;
        }
        OutputFormat::Human => {
            writeln!(
                out,
                "{:<9} {:<16} {:>4} {:>9} {:>6} {:>8}",
                "mode", "outcome", "k", "time_ms", "calls", "targets"
            )?;
            for r in [&p, &e] {
                writeln!(
                    out,
                    "{:<9} {:<16} {:>4} {:>9} {:>6} {:>8}",
                    r.mode.to_string(),
                    r.outcome.to_string(),
                    r.k,
                    r.time_ms,
                    r.solver_calls,
                    r.targets_added
                )?;
            }
            writeln!(
                out,
                "delta: k {} -> {} ({delta:+}), solver calls {} -> {}, time ratio {:.2}",
                p.k,
                e.k,
                p.solver_calls,
                e.solver_calls,
                extended.time_ms / plain.time_ms.max(1e-9)
            )?;
        }
    }
    Ok(())
}

fn cmd_bench(
    name: &str,
    json_path: Option<&Path>,
    markdown: Option<&Path>,
    args: &EngineArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let specs =
        suite(name).ok_or_else(|| Failure::usage(format!("unknown suite `{name}` (known: {})", SUITES.join(", "))))?;
    let cfg = args.config(Mode::Extended).map_err(Failure::usage)?;
    let records = run_suite(&specs, &cfg).map_err(|e| match e {
        SuiteError::Discrepancy { .. } => Failure(EXIT_DISCREPANCY, e.to_string()),
        SuiteError::Engine { .. } => Failure(EXIT_ERROR, e.to_string()),
    })?;
    if let Some(path) = json_path {
        std::fs::write(path, serde_json::to_string_pretty(&records).unwrap() + "\n")?;
        writeln!(err, "wrote {} records to {}", records.len(), path.display())?;
    }
    let table = render_markdown(&records, peak_rss_kb());
    match markdown {
        Some(path) => std::fs::write(path, table)?,
        None => write!(out, "{table}")?,
    }
    Ok(EXIT_CORRECT)
}

fn cmd_oracle(file: &Path, cap: u32, output: OutputFormat, out: &mut dyn Write) -> Result<i32, Failure> {
    let sys = load(file)?;
    let r = bfs_check(&sys, cap).map_err(Failure::usage)?;
    let (code, line) = match &r.classification {
        Classification::Unsafe(t) => (EXIT_BUG, format!("unsafe, shortest counterexample: {} states", t.len())),
        Classification::SafeWithinExploredSpace => (
            EXIT_CORRECT,
            format!("safe within explored space ({} states)", r.explored),
        ),
    };
    match output {
        OutputFormat::Json => {
            let doc = json!({
                "file": file.display().to_string(),
                "safe": r.shortest().is_none(),
                "shortest_len": r.shortest().map(|t| t.len()),
                "trace": r.shortest().map(trace_json),
                "explored": r.explored,
                "depth": r.depth,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap())?;
        }
        OutputFormat::Human => {
            writeln!(out, "{line}")?;
            if let Some(t) = r.shortest() {
                write!(out, "{}", t.render(&sys))?;
            }
        }
    }
    Ok(code)
}

fn cmd_smt(file: &Path, query: QueryChoice, k: u32, out: &mut dyn Write) -> Result<i32, Failure> {
    let sys = load(file)?;
    if k == 0 {
        return Err(Failure::usage("--k must be at least 1"));
    }
    let q = match query {
        QueryChoice::Base => encode_base_case(&sys, k),
        QueryChoice::Forward => encode_forward_condition(&sys, k),
        QueryChoice::Inductive => encode_inductive_step(&sys, k),
    };
    write!(out, "{}", serialize_smtlib(&q))?;
    Ok(EXIT_CORRECT)
}

//! `frameforge` command-line front end.
//!
//! Exit codes: 0 success, 2 parse or validation failure, 3 I/O failure,
//! 4 model not equivalent, 5 singular system, 6 failing bench cell,
//! 64 usage error. Results go to stdout, diagnostics to stderr.
//! `FRAMEFORGE_TOL` overrides the coordinate tolerance.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use frameforge::codegen::{emit_all, Dialect};
use frameforge::harness::{generate_suite, run_suite, SuiteConfig};
use frameforge::model::{from_json, to_canonical_json};
use frameforge::pipeline::{compile, compile_text};
use frameforge::problem::{parse_problem, Target};
use frameforge::solver::{solve_with, SolveError, SolverOptions, DEFAULT_SAMPLES};
use frameforge::verify::{models_equivalent, parse_script};
use frameforge::{FrameModel, COORD_TOL};

const EXIT_INVALID: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_NOT_EQUIVALENT: u8 = 4;
const EXIT_SINGULAR: u8 = 5;
const EXIT_BENCH_FAILED: u8 = 6;
const EXIT_USAGE: u8 = 64;

const TOL_ENV: &str = "FRAMEFORGE_TOL";
const REPORT_JSON: &str = "bench_report.json";
const REPORT_TABLE: &str = "bench_report.txt";

#[derive(Parser)]
#[command(
    name = "frameforge",
    version,
    about = "Planar frame compiler for OpenSees, SAP2000 and ETABS"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a `.frame` template into analysis scripts.
    Compile {
        input: PathBuf,
        /// Target program; defaults to the template's [TARGET] entry.
        #[arg(long, value_parser = Target::from_str)]
        target: Option<Target>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Also write the IR as `<stem>.frame.json`.
        #[arg(long)]
        emit_ir: bool,
    },
    /// Parse a script back and compare it with an IR file.
    Verify { script: PathBuf, ir: PathBuf },
    /// Solve a `.frame` template or `.frame.json` IR and write the results.
    Solve {
        input: PathBuf,
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLES, value_parser = at_least::<2>)]
        samples: usize,
    },
    /// Run the 20-problem round-trip benchmark.
    Bench {
        /// TOML suite config; defaults are used when omitted.
        config: Option<PathBuf>,
        #[arg(long, default_value = "all", value_parser = Target::from_str)]
        dialects: Target,
        #[arg(long, default_value_t = 1, value_parser = at_least::<1>)]
        repeat: usize,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

fn at_least<const N: usize>(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= N => Ok(n),
        _ => Err(format!("expected an integer >= {N}")),
    }
}

/// Failure carrying its exit code; the message goes to stderr.
struct Failure(u8, String);

type CmdResult = Result<(), Failure>;

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure(EXIT_IO, format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn write(path: &Path, text: &str) -> CmdResult {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn tolerance() -> Result<f64, Failure> {
    match std::env::var(TOL_ENV) {
        Err(_) => Ok(COORD_TOL),
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
            _ => Err(Failure(
                EXIT_USAGE,
                format!("{TOL_ENV} must be a positive number, got `{v}`"),
            )),
        },
    }
}

/// File name up to the first dot: `portal.frame` and `portal.frame.json`
/// both give `portal`.
fn stem(path: &Path) -> String {
    let name = path
        .file_name()
        .map_or_else(String::new, |n| n.to_string_lossy().into_owned());
    match name.split_once('.') {
        Some((s, _)) if !s.is_empty() => s.to_string(),
        _ => name,
    }
}

fn is_ir(path: &Path) -> bool {
    path.to_string_lossy().ends_with(".json")
}

fn load_model(path: &Path, tol: f64) -> Result<FrameModel, Failure> {
    let text = read(path)?;
    if is_ir(path) {
        from_json(&text).map_err(|e| Failure(EXIT_INVALID, e.to_string()))
    } else {
        let compiled =
            compile_text(&text, tol).map_err(|e| Failure(EXIT_INVALID, e.to_string()))?;
        for w in &compiled.warnings {
            eprintln!("{w}");
        }
        Ok(compiled.model)
    }
}

fn cmd_compile(input: &Path, target: Option<Target>, out_dir: &Path, emit_ir: bool) -> CmdResult {
    let tol = tolerance()?;
    let spec = parse_problem(&read(input)?).map_err(|e| Failure(EXIT_INVALID, e.to_string()))?;
    let compiled = compile(&spec, tol).map_err(|e| Failure(EXIT_INVALID, e.to_string()))?;
    for w in &compiled.warnings {
        eprintln!("{w}");
    }
    let target = target.unwrap_or(spec.target);
    let scripts = emit_all(&compiled.model, &target.dialects(), tol)
        .map_err(|e| Failure(EXIT_INVALID, e.to_string()))?;

    fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let stem = stem(input);
    for s in &scripts {
        let path = out_dir.join(format!("{stem}.{}", s.dialect.extension()));
        write(&path, &s.text)?;
        println!("{}", path.display());
    }
    if emit_ir {
        let path = out_dir.join(format!("{stem}.frame.json"));
        write(&path, &to_canonical_json(&compiled.model))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_verify(script: &Path, ir: &Path) -> CmdResult {
    let tol = tolerance()?;
    let ext = script
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_default();
    let dialect = Dialect::from_extension(&ext).ok_or_else(|| {
        Failure(
            EXIT_USAGE,
            format!(
                "{}: cannot infer dialect from extension `{ext}` (expected tcl, s2k or e2k)",
                script.display()
            ),
        )
    })?;
    let script_text = read(script)?;
    let model = from_json(&read(ir)?)
        .map_err(|e| Failure(EXIT_INVALID, format!("{}: {e}", ir.display())))?;
    let parsed = parse_script(dialect, &script_text)
        .map_err(|e| Failure(EXIT_INVALID, format!("{}: {e}", script.display())))?;
    let report = models_equivalent(&model, &parsed, tol);
    print!("{report}");
    if report.equivalent {
        Ok(())
    } else {
        Err(Failure(
            EXIT_NOT_EQUIVALENT,
            format!("{} differs from {}", script.display(), ir.display()),
        ))
    }
}

fn cmd_solve(input: &Path, out: &Path, samples: usize) -> CmdResult {
    let tol = tolerance()?;
    let model = load_model(input, tol)?;
    let state = solve_with(&model, &SolverOptions { samples }).map_err(|e| match e {
        SolveError::InvalidModel(ref diags) => {
            for d in diags {
                eprintln!("{d}");
            }
            Failure(EXIT_INVALID, e.to_string())
        }
        SolveError::Singular { .. } => Failure(EXIT_SINGULAR, e.to_string()),
    })?;
    for w in &state.warnings {
        eprintln!("{w}");
    }
    write(out, &state.to_json())?;
    print!("{}", state.summary());
    Ok(())
}

fn cmd_bench(config: Option<&Path>, dialects: Target, repeat: usize, out_dir: &Path) -> CmdResult {
    let tol = tolerance()?;
    let config = match config {
        Some(p) => SuiteConfig::from_toml(&read(p)?)
            .map_err(|e| Failure(EXIT_INVALID, format!("{}: {e}", p.display())))?,
        None => SuiteConfig::default(),
    };
    let suite = generate_suite(&config).map_err(|e| Failure(EXIT_INVALID, e.to_string()))?;
    let dialects = dialects.dialects();

    let first = run_suite(&suite, &dialects, tol);
    let json = first.to_json();
    for k in 2..=repeat {
        let again = run_suite(&suite, &dialects, tol);
        if again.to_json() != json {
            return Err(Failure(
                EXIT_BENCH_FAILED,
                format!("repeat {k} produced a different report"),
            ));
        }
    }

    fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    write(&out_dir.join(REPORT_JSON), &json)?;
    write(&out_dir.join(REPORT_TABLE), &first.to_table(false))?;
    print!("{}", first.to_table(true));
    if repeat > 1 {
        println!("{repeat} repeats, reports identical");
    }
    if first.all_passed {
        Ok(())
    } else {
        let failed = first.cells.iter().filter(|c| !c.passed()).count();
        for c in first.cells.iter().filter(|c| !c.passed()) {
            eprintln!(
                "{} {}: {}",
                c.problem,
                c.dialect,
                c.failure.as_deref().unwrap_or("failed")
            );
        }
        Err(Failure(
            EXIT_BENCH_FAILED,
            format!("{failed} bench cell(s) failed"),
        ))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Compile {
            input,
            target,
            out_dir,
            emit_ir,
        } => cmd_compile(input, *target, out_dir, *emit_ir),
        Command::Verify { script, ir } => cmd_verify(script, ir),
        Command::Solve {
            input,
            out,
            samples,
        } => cmd_solve(input, out, *samples),
        Command::Bench {
            config,
            dialects,
            repeat,
            out_dir,
        } => cmd_bench(config.as_deref(), *dialects, *repeat, out_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

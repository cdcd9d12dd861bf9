//! `citadel` — run sandboxed guest programs, check IR files for memory
//! bugs, benchmark the hardening arms, and emit the seeded bug corpus.
//!
//! Exit codes are part of the contract:
//!   0  success / no findings
//!   1  guest error, parse failure, or other case failure
//!   2  policy violation or memory budget exceeded
//!   3  `check` found issues
//!   5  bench correctness gate failed
//!   64 usage errors (bad flags, inconsistent policy, missing suite, ...)

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use citadel_core::bench::{self, Arm, BenchError, Suite};
use citadel_core::collections::HardeningMode;
use citadel_core::interp::{execute, parse, RunStatus};
use citadel_core::memcheck::{
    analyze, emit_report, generate_corpus, parse_ir, AnalysisConfig, ReportFormat,
};
use citadel_core::sandbox::{parse_policy_file, Policy, PolicyBuilder, Profile};

const EXIT_OK: u8 = 0;
const EXIT_FAILURE: u8 = 1;
const EXIT_POLICY: u8 = 2;
const EXIT_FINDINGS: u8 = 3;
const EXIT_GATE: u8 = 5;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "citadel",
    about = "Sandboxed interpreter for a restricted Python-like language, with a memory-safety \
             checker and benchmark harness",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProfileArg {
    Enclave,
    Native,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a guest program (.mpy) under a sandbox policy.
    Run {
        /// Guest source file.
        file: PathBuf,
        /// Sandbox profile (ignored if --policy sets one).
        #[arg(long, value_enum)]
        profile: Option<ProfileArg>,
        /// Policy file (key=value lines).
        #[arg(long)]
        policy: Option<PathBuf>,
        /// Heap budget override, in cells.
        #[arg(long)]
        heap_cells: Option<u64>,
        /// Use the baseline (uncounted) collection path. Native only.
        #[arg(long)]
        baseline: bool,
        /// Allow dynamic module loading from the source file's directory.
        /// Native only.
        #[arg(long)]
        allow_dynamic_modules: bool,
    },
    /// Analyze an IR file for memory-safety findings.
    Check {
        /// IR source file.
        ir_file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
    /// Run the benchmark suite across hardening/profile arms.
    Bench {
        /// Suite directory (with suite.json); defaults to the embedded suite.
        #[arg(long)]
        suite: Option<PathBuf>,
        /// Comma-separated arms: native-hardened, native-baseline,
        /// enclave-hardened.
        #[arg(long)]
        arms: Option<String>,
        /// Repetitions per cell (odd, >= 3).
        #[arg(long, default_value_t = 5)]
        reps: usize,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the seeded memory-bug corpus to a directory.
    Corpus {
        /// Target directory.
        #[arg(long)]
        emit: PathBuf,
        /// Write into a non-empty directory.
        #[arg(long)]
        force: bool,
    },
}

fn main() -> ExitCode {
    // Usage problems (unknown flags included) exit 64, not clap's default.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let is_help = matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = err.print();
            return ExitCode::from(if is_help { EXIT_OK } else { EXIT_USAGE });
        }
    };
    let code = match cli.command {
        Command::Run {
            file,
            profile,
            policy,
            heap_cells,
            baseline,
            allow_dynamic_modules,
        } => cmd_run(
            file,
            profile,
            policy,
            heap_cells,
            baseline,
            allow_dynamic_modules,
        ),
        Command::Check { ir_file, format } => cmd_check(ir_file, format),
        Command::Bench {
            suite,
            arms,
            reps,
            out,
        } => cmd_bench(suite, arms, reps, out),
        Command::Corpus { emit, force } => cmd_corpus(emit, force),
    };
    ExitCode::from(code)
}

fn usage_error(message: impl std::fmt::Display) -> u8 {
    eprintln!("citadel: {message}");
    EXIT_USAGE
}

fn failure(message: impl std::fmt::Display) -> u8 {
    eprintln!("citadel: {message}");
    EXIT_FAILURE
}

fn cmd_run(
    file: PathBuf,
    profile: Option<ProfileArg>,
    policy_file: Option<PathBuf>,
    heap_cells: Option<u64>,
    baseline: bool,
    allow_dynamic_modules: bool,
) -> u8 {
    let mut builder: PolicyBuilder = match &policy_file {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(text) => text,
                Err(err) => return usage_error(format!("cannot read {}: {err}", path.display())),
            };
            match parse_policy_file(&text) {
                Ok(policy) => policy.to_builder(),
                Err(err) => return usage_error(err),
            }
        }
        None => {
            let profile = match profile {
                Some(ProfileArg::Native) => Profile::Native,
                // Sandboxed by default.
                Some(ProfileArg::Enclave) | None => Profile::Enclave,
            };
            Policy::builder(profile)
        }
    };
    if policy_file.is_some() && profile.is_some() {
        return usage_error("--profile conflicts with --policy (set profile in the file)");
    }
    if let Some(cells) = heap_cells {
        builder = builder.heap_budget_cells(cells);
    }
    if baseline {
        builder = builder.hardening(HardeningMode::Baseline);
    }
    if allow_dynamic_modules {
        let search = file
            .parent()
            .map(|p| p.to_path_buf())
            .unwrap_or_else(|| PathBuf::from("."));
        builder = builder
            .allow_dynamic_modules(true)
            .module_search_path(vec![search]);
    }
    let policy = match builder.build() {
        Ok(policy) => policy,
        Err(err) => return usage_error(err),
    };

    let source = match std::fs::read_to_string(&file) {
        Ok(source) => source,
        Err(err) => return usage_error(format!("cannot read {}: {err}", file.display())),
    };
    let source_name = file.display().to_string();
    let program = match parse(&source, &source_name) {
        Ok(program) => program,
        Err(err) => return failure(err),
    };

    let result = execute(&program, &policy);
    // Guest output is buffered during the run and relayed afterwards.
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(&result.audit.output);
    let _ = stdout.flush();
    match result.status {
        RunStatus::Ok => EXIT_OK,
        RunStatus::GuestError(err) => {
            eprintln!("{source_name}: {err}");
            EXIT_FAILURE
        }
        RunStatus::PolicyViolation(err) => {
            eprintln!("{source_name}: {err}");
            EXIT_POLICY
        }
        RunStatus::MemoryBudgetExceeded(err) => {
            eprintln!("{source_name}: {err}");
            EXIT_POLICY
        }
        RunStatus::StepLimitExceeded => {
            eprintln!("{source_name}: step limit exceeded");
            EXIT_POLICY
        }
    }
}

fn cmd_check(ir_file: PathBuf, format: FormatArg) -> u8 {
    let source = match std::fs::read_to_string(&ir_file) {
        Ok(source) => source,
        Err(err) => return usage_error(format!("cannot read {}: {err}", ir_file.display())),
    };
    let program = match parse_ir(&source) {
        Ok(program) => program,
        Err(err) => return failure(format!("{}: {err}", ir_file.display())),
    };
    let outcome = match analyze(&program, &AnalysisConfig::default()) {
        Ok(outcome) => outcome,
        Err(err) => return failure(format!("{}: {err}", ir_file.display())),
    };
    let report = emit_report(
        &outcome,
        match format {
            FormatArg::Text => ReportFormat::Text,
            FormatArg::Json => ReportFormat::Json,
        },
    );
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(&report);
    let _ = stdout.flush();
    if outcome.diagnostics.is_empty() {
        EXIT_OK
    } else {
        EXIT_FINDINGS
    }
}

fn cmd_bench(
    suite_dir: Option<PathBuf>,
    arms: Option<String>,
    reps: usize,
    out: Option<PathBuf>,
) -> u8 {
    let suite = match &suite_dir {
        Some(dir) => match Suite::from_dir(dir) {
            Ok(suite) => suite,
            Err(err @ (BenchError::Io(_) | BenchError::EmptySuite | BenchError::Manifest(_))) => {
                return usage_error(err)
            }
            Err(err) => return failure(err),
        },
        None => Suite::embedded_default(),
    };
    let arm_list: Vec<Arm> = match arms {
        None => Arm::DEFAULT_ARMS.to_vec(),
        Some(spec) => {
            let mut list = Vec::new();
            for part in spec.split(',') {
                match Arm::parse(part.trim()) {
                    Ok(arm) => list.push(arm),
                    Err(err) => return usage_error(err),
                }
            }
            list
        }
    };
    let report = match bench::run_suite(&suite, &arm_list, reps) {
        Ok(report) => report,
        Err(err @ (BenchError::BadRepetitions(_) | BenchError::NoArms)) => return usage_error(err),
        Err(err @ BenchError::CorrectnessGateFailed { .. }) => {
            eprintln!("citadel: {err}");
            return EXIT_GATE;
        }
        Err(err) => return failure(err),
    };

    print!("{}", bench::render_table(&report));
    let have = |name: &str| report.arm_names.iter().any(|a| a == name);
    for (a, b, label) in [
        (
            "native-hardened",
            "native-baseline",
            "hardened over baseline",
        ),
        (
            "enclave-hardened",
            "native-hardened",
            "enclave over native",
        ),
    ] {
        if have(a) && have(b) {
            if let Ok(table) = bench::compare_arms(&report, a, b) {
                println!(
                    "overhead {label}: suite median {:+.2}%",
                    table.suite_median_percent
                );
                for (case, pct) in &table.per_case {
                    println!("  {case:<14} {pct:+8.2}%");
                }
            }
        }
    }

    if let Some(path) = out {
        let json = serde_json::to_vec_pretty(&report).expect("report serializes");
        if let Err(err) = std::fs::write(&path, json) {
            return failure(format!("cannot write {}: {err}", path.display()));
        }
        println!("report written to {}", path.display());
    }
    EXIT_OK
}

fn cmd_corpus(emit: PathBuf, force: bool) -> u8 {
    if emit.exists() {
        match std::fs::read_dir(&emit) {
            Ok(mut entries) => {
                if entries.next().is_some() && !force {
                    return usage_error(format!(
                        "{} is not empty (pass --force to write anyway)",
                        emit.display()
                    ));
                }
            }
            Err(err) => return usage_error(format!("cannot read {}: {err}", emit.display())),
        }
    }
    match generate_corpus(&emit) {
        Ok(manifest) => {
            for path in &manifest {
                println!("{}", path.display());
            }
            EXIT_OK
        }
        Err(err) => failure(format!("cannot write corpus: {err}")),
    }
}

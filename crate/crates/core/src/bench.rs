//! Two-arm overhead benchmark harness.
//!
//! Arms pair a sandbox profile with a hardening mode (e.g.
//! `native-hardened` vs `native-baseline`). Before any timing happens,
//! every case must produce the same output digest on every arm *and*
//! match the digest frozen in the suite manifest; timing starts only once
//! that correctness gate passes. Wall time is measured around the whole
//! run with the host monotonic clock, parse time excluded, and the
//! reported figure per cell is the median of N repetitions.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::collections::HardeningMode;
use crate::interp::{execute, parse, Program, RunStatus, SyntaxError};
use crate::sandbox::{Capability, HostAccessLog, Policy, Profile};

/// One profile+hardening pairing to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arm {
    pub profile: Profile,
    pub hardening: HardeningMode,
}

impl Arm {
    pub const NATIVE_HARDENED: Arm = Arm {
        profile: Profile::Native,
        hardening: HardeningMode::Hardened,
    };
    pub const NATIVE_BASELINE: Arm = Arm {
        profile: Profile::Native,
        hardening: HardeningMode::Baseline,
    };
    pub const ENCLAVE_HARDENED: Arm = Arm {
        profile: Profile::Enclave,
        hardening: HardeningMode::Hardened,
    };

    /// The standard three-arm comparison.
    pub const DEFAULT_ARMS: [Arm; 3] = [
        Arm::NATIVE_HARDENED,
        Arm::NATIVE_BASELINE,
        Arm::ENCLAVE_HARDENED,
    ];

    pub fn name(&self) -> String {
        let hardening = match self.hardening {
            HardeningMode::Hardened => "hardened",
            HardeningMode::Baseline => "baseline",
        };
        format!("{}-{}", self.profile, hardening)
    }

    pub fn parse(text: &str) -> Result<Arm, BenchError> {
        match text {
            "native-hardened" => Ok(Arm::NATIVE_HARDENED),
            "native-baseline" => Ok(Arm::NATIVE_BASELINE),
            "enclave-hardened" => Ok(Arm::ENCLAVE_HARDENED),
            other => Err(BenchError::UnknownArm(other.to_string())),
        }
    }

    pub fn policy(&self) -> Policy {
        match self.profile {
            Profile::Enclave => Policy::enclave().build().expect("enclave defaults are valid"),
            Profile::Native => Policy::native()
                .hardening(self.hardening)
                .build()
                .expect("native arm settings are valid"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("suite directory has no cases")]
    EmptySuite,
    #[error("repetitions must be an odd number >= 3, got {0}")]
    BadRepetitions(usize),
    #[error("no arms requested")]
    NoArms,
    #[error("unknown arm `{0}`")]
    UnknownArm(String),
    #[error("suite I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("suite manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("case `{case}` failed to parse: {error}")]
    CaseParse { case: String, error: SyntaxError },
    #[error("case `{case}` did not finish on arm `{arm}`: {status:?}")]
    CaseFailed {
        case: String,
        arm: String,
        status: RunStatus,
    },
    #[error("correctness gate failed for case `{case}`: {detail}")]
    CorrectnessGateFailed { case: String, detail: String },
}

/// Manifest entry as stored in `suite.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestCase {
    pub name: String,
    pub path: String,
    #[serde(default)]
    pub params: serde_json::Value,
    pub expected_digest: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Manifest {
    cases: Vec<ManifestCase>,
}

/// A case with its source loaded.
#[derive(Debug, Clone)]
pub struct LoadedCase {
    pub name: String,
    pub params: serde_json::Value,
    pub expected_digest: String,
    pub source: String,
}

#[derive(Debug, Clone)]
pub struct Suite {
    pub cases: Vec<LoadedCase>,
}

const EMBEDDED_MANIFEST: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../suites/default/suite.json"));
const EMBEDDED_SOURCES: &[(&str, &str)] = &[
    (
        "binary_trees.mpy",
        include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../suites/default/binary_trees.mpy"
        )),
    ),
    (
        "fasta.mpy",
        include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../suites/default/fasta.mpy"
        )),
    ),
    (
        "pidigits.mpy",
        include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../suites/default/pidigits.mpy"
        )),
    ),
    (
        "nbody.mpy",
        include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../suites/default/nbody.mpy"
        )),
    ),
];

impl Suite {
    /// Loads `suite.json` plus the case sources from a directory.
    pub fn from_dir(dir: &Path) -> Result<Suite, BenchError> {
        let manifest_text = std::fs::read_to_string(dir.join("suite.json"))?;
        let manifest: Manifest = serde_json::from_str(&manifest_text)?;
        if manifest.cases.is_empty() {
            return Err(BenchError::EmptySuite);
        }
        let mut cases = Vec::with_capacity(manifest.cases.len());
        for case in manifest.cases {
            let source = std::fs::read_to_string(dir.join(&case.path))?;
            cases.push(LoadedCase {
                name: case.name,
                params: case.params,
                expected_digest: case.expected_digest,
                source,
            });
        }
        Ok(Suite { cases })
    }

    /// The suite shipped inside the crate (same content as
    /// `suites/default/` in the repository).
    pub fn embedded_default() -> Suite {
        let manifest: Manifest =
            serde_json::from_str(EMBEDDED_MANIFEST).expect("embedded manifest is valid");
        let cases = manifest
            .cases
            .into_iter()
            .map(|case| {
                let source = EMBEDDED_SOURCES
                    .iter()
                    .find(|(name, _)| *name == case.path)
                    .map(|(_, text)| (*text).to_string())
                    .expect("embedded source for every manifest case");
                LoadedCase {
                    name: case.name,
                    params: case.params,
                    expected_digest: case.expected_digest,
                    source,
                }
            })
            .collect();
        Suite { cases }
    }
}

pub fn output_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex_encode(&hasher.finalize())
}

fn hex_encode(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Audit counters captured per cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCounters {
    pub bounds_checks_performed: u64,
    pub allocations: u64,
    pub peak_heap_cells: u64,
}

/// One (case, arm) measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellMeasurement {
    pub median_ns: u64,
    pub times_ns: Vec<u64>,
    /// max/min repetition ratio; flaky timers show up here.
    pub spread: f64,
    pub counters: CellCounters,
    pub digest: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseReport {
    pub name: String,
    pub params: serde_json::Value,
    pub expected_digest: String,
    /// Keyed by arm name.
    pub arms: BTreeMap<String, CellMeasurement>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub repetitions: usize,
    pub arm_names: Vec<String>,
    pub cases: Vec<CaseReport>,
}

/// Per-case overhead of one arm over another, from median times.
#[derive(Debug, Clone, Serialize)]
pub struct OverheadTable {
    pub arm_a: String,
    pub arm_b: String,
    /// (case name, overhead percent of a over b)
    pub per_case: Vec<(String, f64)>,
    pub suite_median_percent: f64,
}

pub fn run_suite(suite: &Suite, arms: &[Arm], repetitions: usize) -> Result<BenchReport, BenchError> {
    if repetitions < 3 || repetitions % 2 == 0 {
        return Err(BenchError::BadRepetitions(repetitions));
    }
    if arms.is_empty() {
        return Err(BenchError::NoArms);
    }
    if suite.cases.is_empty() {
        return Err(BenchError::EmptySuite);
    }

    // Parse once; timing excludes parsing.
    let mut programs: Vec<Program> = Vec::with_capacity(suite.cases.len());
    for case in &suite.cases {
        let program = parse(&case.source, &format!("{}.mpy", case.name)).map_err(|error| {
            BenchError::CaseParse {
                case: case.name.clone(),
                error,
            }
        })?;
        programs.push(program);
    }

    let policies: Vec<Policy> = arms.iter().map(Arm::policy).collect();

    // Correctness gate: every arm must reproduce the frozen digest.
    for (case, program) in suite.cases.iter().zip(&programs) {
        let mut digests: Vec<(String, String)> = Vec::new();
        for (arm, policy) in arms.iter().zip(&policies) {
            let result = execute(program, policy);
            if !result.status.is_ok() {
                return Err(BenchError::CaseFailed {
                    case: case.name.clone(),
                    arm: arm.name(),
                    status: result.status,
                });
            }
            digests.push((arm.name(), output_digest(&result.audit.output)));
        }
        for (arm_name, digest) in &digests {
            if *digest != case.expected_digest {
                return Err(BenchError::CorrectnessGateFailed {
                    case: case.name.clone(),
                    detail: format!(
                        "arm {arm_name} produced digest {digest}, manifest expects {}",
                        case.expected_digest
                    ),
                });
            }
        }
    }

    // Timed phase. The clock is a host capability; every profile admits it.
    let mut gate_log = HostAccessLog::new();
    for policy in &policies {
        policy
            .check_host_capability(&mut gate_log, Capability::ClockMonotonic, "bench timer")
            .expect("monotonic clock is always allowed");
    }

    let mut case_reports = Vec::with_capacity(suite.cases.len());
    for (case, program) in suite.cases.iter().zip(&programs) {
        let mut arm_cells = BTreeMap::new();
        for (arm, policy) in arms.iter().zip(&policies) {
            let mut times = Vec::with_capacity(repetitions);
            let mut counters = None;
            let mut digest = None;
            for _ in 0..repetitions {
                let start = Instant::now();
                let result = execute(program, policy);
                let elapsed = start.elapsed().as_nanos() as u64;
                if !result.status.is_ok() {
                    return Err(BenchError::CaseFailed {
                        case: case.name.clone(),
                        arm: arm.name(),
                        status: result.status,
                    });
                }
                let run_digest = output_digest(&result.audit.output);
                let run_counters = CellCounters {
                    bounds_checks_performed: result.audit.bounds_checks_performed,
                    allocations: result.audit.allocations,
                    peak_heap_cells: result.audit.peak_heap_cells,
                };
                if let (Some(d), Some(c)) = (&digest, &counters) {
                    if d != &run_digest || c != &run_counters {
                        return Err(BenchError::CorrectnessGateFailed {
                            case: case.name.clone(),
                            detail: format!(
                                "non-deterministic repetition on arm {}",
                                arm.name()
                            ),
                        });
                    }
                } else {
                    digest = Some(run_digest);
                    counters = Some(run_counters);
                }
                times.push(elapsed);
            }
            let mut sorted = times.clone();
            sorted.sort_unstable();
            let median_ns = sorted[sorted.len() / 2];
            let min = *sorted.first().expect("non-empty") as f64;
            let max = *sorted.last().expect("non-empty") as f64;
            let spread = if min > 0.0 { max / min } else { f64::INFINITY };
            arm_cells.insert(
                arm.name(),
                CellMeasurement {
                    median_ns,
                    times_ns: times,
                    spread,
                    counters: counters.expect("at least one repetition"),
                    digest: digest.expect("at least one repetition"),
                },
            );
        }
        case_reports.push(CaseReport {
            name: case.name.clone(),
            params: case.params.clone(),
            expected_digest: case.expected_digest.clone(),
            arms: arm_cells,
        });
    }

    Ok(BenchReport {
        repetitions,
        arm_names: arms.iter().map(Arm::name).collect(),
        cases: case_reports,
    })
}

/// Convenience wrapper: load the suite from a directory and run it.
pub fn run_suite_dir(
    dir: &Path,
    arms: &[Arm],
    repetitions: usize,
) -> Result<BenchReport, BenchError> {
    run_suite(&Suite::from_dir(dir)?, arms, repetitions)
}

pub fn compare_arms(
    report: &BenchReport,
    arm_a: &str,
    arm_b: &str,
) -> Result<OverheadTable, BenchError> {
    if !report.arm_names.iter().any(|a| a == arm_a) {
        return Err(BenchError::UnknownArm(arm_a.to_string()));
    }
    if !report.arm_names.iter().any(|a| a == arm_b) {
        return Err(BenchError::UnknownArm(arm_b.to_string()));
    }
    let mut per_case = Vec::with_capacity(report.cases.len());
    for case in &report.cases {
        let a = &case.arms[arm_a];
        let b = &case.arms[arm_b];
        let overhead = 100.0 * (a.median_ns as f64 - b.median_ns as f64) / b.median_ns as f64;
        per_case.push((case.name.clone(), overhead));
    }
    let mut overheads: Vec<f64> = per_case.iter().map(|(_, o)| *o).collect();
    overheads.sort_by(|x, y| x.partial_cmp(y).expect("finite overheads"));
    let suite_median_percent = if overheads.is_empty() {
        0.0
    } else {
        overheads[overheads.len() / 2]
    };
    Ok(OverheadTable {
        arm_a: arm_a.to_string(),
        arm_b: arm_b.to_string(),
        per_case,
        suite_median_percent,
    })
}

/// Human-readable summary table.
pub fn render_table(report: &BenchReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<14} {:>6}",
        "case",
        format!("reps={}", report.repetitions)
    ));
    for arm in &report.arm_names {
        out.push_str(&format!(" {arm:>18}"));
    }
    out.push('\n');
    for case in &report.cases {
        out.push_str(&format!("{:<14} {:>6}", case.name, ""));
        for arm in &report.arm_names {
            let cell = &case.arms[arm];
            out.push_str(&format!(
                " {:>13.3} ms ({:>4.2}x)",
                cell.median_ns as f64 / 1e6,
                cell.spread
            ));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_suite() -> Suite {
        let source = "total = 0\nfor i in range(100):\n    total = total + i\nprint(total)\n";
        let digest = {
            let program = parse(source, "t").unwrap();
            let result = execute(&program, &Arm::NATIVE_HARDENED.policy());
            output_digest(&result.audit.output)
        };
        Suite {
            cases: vec![LoadedCase {
                name: "sum".into(),
                params: serde_json::json!({}),
                expected_digest: digest,
                source: source.into(),
            }],
        }
    }

    #[test]
    fn repetitions_must_be_odd_and_at_least_three() {
        let suite = tiny_suite();
        assert!(matches!(
            run_suite(&suite, &Arm::DEFAULT_ARMS, 1),
            Err(BenchError::BadRepetitions(1))
        ));
        assert!(matches!(
            run_suite(&suite, &Arm::DEFAULT_ARMS, 4),
            Err(BenchError::BadRepetitions(4))
        ));
        assert!(run_suite(&suite, &Arm::DEFAULT_ARMS, 3).is_ok());
    }

    #[test]
    fn self_comparison_is_zero_percent() {
        let report = run_suite(&tiny_suite(), &Arm::DEFAULT_ARMS, 3).unwrap();
        let table = compare_arms(&report, "native-hardened", "native-hardened").unwrap();
        assert!(table.per_case.iter().all(|(_, o)| *o == 0.0));
        assert_eq!(table.suite_median_percent, 0.0);
    }

    #[test]
    fn unknown_arm_is_an_error() {
        let report = run_suite(&tiny_suite(), &[Arm::NATIVE_HARDENED], 3).unwrap();
        assert!(matches!(
            compare_arms(&report, "native-hardened", "sgx-turbo"),
            Err(BenchError::UnknownArm(_))
        ));
    }

    #[test]
    fn wrong_digest_trips_the_gate() {
        let mut suite = tiny_suite();
        suite.cases[0].expected_digest = "0".repeat(64);
        let err = run_suite(&suite, &[Arm::NATIVE_HARDENED], 3).unwrap_err();
        assert!(matches!(err, BenchError::CorrectnessGateFailed { .. }));
    }

    #[test]
    fn empty_suite_is_an_error() {
        let suite = Suite { cases: vec![] };
        assert!(matches!(
            run_suite(&suite, &Arm::DEFAULT_ARMS, 3),
            Err(BenchError::EmptySuite)
        ));
    }

    #[test]
    fn embedded_suite_loads_and_names_match_files() {
        let suite = Suite::embedded_default();
        assert_eq!(suite.cases.len(), 4);
        let names: Vec<&str> = suite.cases.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["binary_trees", "fasta", "pidigits", "nbody"]);
    }

    #[test]
    fn arm_names_round_trip() {
        for arm in Arm::DEFAULT_ARMS {
            assert_eq!(Arm::parse(&arm.name()).unwrap(), arm);
        }
        assert!(Arm::parse("enclave-baseline").is_err());
    }
}

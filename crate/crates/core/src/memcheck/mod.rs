//! Memory-safety checker: a forward abstract interpreter over a small
//! imperative IR, targeting the bug classes that matter for runtime code —
//! buffer overflow writes, buffer over-reads, null dereferences, memory
//! leaks, and out-of-range shift exponents.

pub mod analyze;
pub mod corpus;
pub mod ir;
pub mod report;

pub use analyze::{analyze, AnalysisBudgetExceeded, AnalysisConfig, AnalysisOutcome};
pub use corpus::{corpus_file, generate_corpus, CorpusFile, CORPUS};
pub use ir::{parse_ir, IrProgram, IrSyntaxError};
pub use report::{emit_report, Diagnostic, DiagnosticKind, ReportFormat};

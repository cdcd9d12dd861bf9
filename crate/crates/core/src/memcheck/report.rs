//! Diagnostic records and the text/JSON report emitters.

use serde::Serialize;

use super::analyze::AnalysisOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DiagnosticKind {
    BufferOverflowWrite,
    BufferOverRead,
    NullDeref,
    MemoryLeak,
    ShiftOverflow,
}

impl DiagnosticKind {
    pub fn name(&self) -> &'static str {
        match self {
            DiagnosticKind::BufferOverflowWrite => "BufferOverflowWrite",
            DiagnosticKind::BufferOverRead => "BufferOverRead",
            DiagnosticKind::NullDeref => "NullDeref",
            DiagnosticKind::MemoryLeak => "MemoryLeak",
            DiagnosticKind::ShiftOverflow => "ShiftOverflow",
        }
    }
}

impl std::fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub function: String,
    /// Flat instruction index within the function.
    pub instruction: usize,
    /// Source line in the IR file.
    pub line: u32,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    findings: &'a [Diagnostic],
    stats: JsonStats,
}

#[derive(Serialize)]
struct JsonStats {
    functions: usize,
    iterations: u64,
}

/// Renders the outcome. Ordering is already stable (function, instruction,
/// kind) by the time diagnostics get here.
pub fn emit_report(outcome: &AnalysisOutcome, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let report = JsonReport {
                findings: &outcome.diagnostics,
                stats: JsonStats {
                    functions: outcome.functions,
                    iterations: outcome.iterations,
                },
            };
            let mut bytes =
                serde_json::to_vec_pretty(&report).expect("report serialization is infallible");
            bytes.push(b'\n');
            bytes
        }
        ReportFormat::Text => {
            let mut text = String::new();
            if outcome.diagnostics.is_empty() {
                text.push_str("no findings\n");
            } else {
                for d in &outcome.diagnostics {
                    text.push_str(&format!(
                        "{}: {} at {}:{} (line {}): {}\n",
                        d.kind, d.function, d.function, d.instruction, d.line, d.message
                    ));
                }
            }
            text.push_str(&format!(
                "checked {} function(s) in {} iteration(s)\n",
                outcome.functions, outcome.iterations
            ));
            text.into_bytes()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(diags: Vec<Diagnostic>) -> AnalysisOutcome {
        AnalysisOutcome {
            diagnostics: diags,
            iterations: 7,
            functions: 2,
        }
    }

    #[test]
    fn empty_reports() {
        let text = emit_report(&outcome(vec![]), ReportFormat::Text);
        assert!(String::from_utf8(text).unwrap().starts_with("no findings"));

        let json = emit_report(&outcome(vec![]), ReportFormat::Json);
        let value: serde_json::Value = serde_json::from_slice(&json).unwrap();
        assert_eq!(value["findings"].as_array().unwrap().len(), 0);
        assert_eq!(value["stats"]["functions"], 2);
    }

    #[test]
    fn one_finding_carries_all_fields() {
        let diag = Diagnostic {
            kind: DiagnosticKind::NullDeref,
            function: "f".into(),
            instruction: 4,
            line: 9,
            message: "may be null".into(),
        };
        let json = emit_report(&outcome(vec![diag]), ReportFormat::Json);
        let value: serde_json::Value = serde_json::from_slice(&json).unwrap();
        let finding = &value["findings"][0];
        assert_eq!(finding["kind"], "NullDeref");
        assert_eq!(finding["function"], "f");
        assert_eq!(finding["instruction"], 4);
        assert_eq!(finding["line"], 9);
        assert_eq!(finding["message"], "may be null");
    }
}

//! Seeded IR corpus: vulnerable/fixed pairs for the allocator-exponent and
//! codemap-deletion bugs, one synthetic case per bug class, and one clean
//! file. Every file ships with its expected findings so tests can assert
//! both soundness (bugs found) and precision (fixes stay silent).

use std::io::Write as _;
use std::path::{Path, PathBuf};

use super::report::DiagnosticKind;

#[derive(Debug, Clone, Copy)]
pub struct CorpusFile {
    pub name: &'static str,
    pub source: &'static str,
    /// Expected (kind, source line) pairs, in report order.
    pub expected: &'static [(DiagnosticKind, u32)],
}

pub const DTOA_VULN: &str = "\
# Power-of-two size-class allocator without an exponent guard.
fn balloc(k:int) {
entry:
  one = const 1
  x = shl one k
  p = alloc x
  ret p
}
";

pub const DTOA_FIXED: &str = "\
# Power-of-two size-class allocator with the exponent range guard.
fn balloc(k:int) {
entry:
  kmax = const 32
  too_big = cmp lt kmax k
  br too_big reject check_negative
check_negative:
  zero = const 0
  negative = cmp lt k zero
  br negative reject grant
grant:
  one = const 1
  x = shl one k
  p = alloc x
  ret p
reject:
  ret
}
";

pub const CODEMAP_VULN: &str = "\
# Codemap deletion that trusts the ordered-search result unconditionally.
fn codemap_del(addr:int, size:int) {
entry:
  one = const 1
  key_end = add addr size
  search_key = sub key_end one
  node = call skiplist_search(search_key)
  node_key = load node 0
  call skiplist_remove(node_key)
  ret node_key
}
";

pub const CODEMAP_FIXED: &str = "\
# Codemap deletion with the search result guarded before use.
fn codemap_del(addr:int, size:int) {
entry:
  one = const 1
  key_end = add addr size
  search_key = sub key_end one
  node = call skiplist_search(search_key)
  zero = const 0
  missing = cmp eq node zero
  br missing done deref
deref:
  node_key = load node 0
  stale = cmp lt node_key addr
  br stale done remove
remove:
  call skiplist_remove(node_key)
  ret node_key
done:
  ret
}
";

pub const OOB_READ: &str = "\
# Read one element past the end of a 4-element allocation.
fn main() {
  size = const 4
  buffer = alloc size
  index = const 4
  value = load buffer index
  free buffer
  ret value
}
";

pub const OOB_WRITE: &str = "\
# Write past the end of a 4-element allocation.
fn main() {
  size = const 4
  buffer = alloc size
  index = const 5
  store buffer index size
  free buffer
  ret
}
";

pub const NULL_DEREF: &str = "\
# Dereference of a pointer that is definitely null.
fn main() {
  p = const 0
  zero = const 0
  value = load p zero
  ret value
}
";

pub const LEAK: &str = "\
# Allocation that cannot be freed on any path.
fn main() {
  size = const 16
  buffer = alloc size
  zero = const 0
  ret zero
}
";

pub const CLEAN: &str = "\
# In-bounds loop over an 8-element allocation, freed before exit.
fn main() {
entry:
  size = const 8
  buffer = alloc size
  i = const 0
  jmp loop
loop:
  more = cmp lt i size
  br more body finish
body:
  store buffer i i
  one = const 1
  i = add i one
  jmp loop
finish:
  first = load buffer 0
  free buffer
  ret first
}
";

pub const CORPUS: &[CorpusFile] = &[
    CorpusFile {
        name: "dtoa_vuln.ir",
        source: DTOA_VULN,
        expected: &[(DiagnosticKind::ShiftOverflow, 5)],
    },
    CorpusFile {
        name: "dtoa_fixed.ir",
        source: DTOA_FIXED,
        expected: &[],
    },
    CorpusFile {
        name: "codemap_vuln.ir",
        source: CODEMAP_VULN,
        expected: &[(DiagnosticKind::NullDeref, 8)],
    },
    CorpusFile {
        name: "codemap_fixed.ir",
        source: CODEMAP_FIXED,
        expected: &[],
    },
    CorpusFile {
        name: "oob_read.ir",
        source: OOB_READ,
        expected: &[(DiagnosticKind::BufferOverRead, 6)],
    },
    CorpusFile {
        name: "oob_write.ir",
        source: OOB_WRITE,
        expected: &[(DiagnosticKind::BufferOverflowWrite, 6)],
    },
    CorpusFile {
        name: "null.ir",
        source: NULL_DEREF,
        expected: &[(DiagnosticKind::NullDeref, 5)],
    },
    CorpusFile {
        name: "leak.ir",
        source: LEAK,
        expected: &[(DiagnosticKind::MemoryLeak, 4)],
    },
    CorpusFile {
        name: "clean.ir",
        source: CLEAN,
        expected: &[],
    },
];

pub fn corpus_file(name: &str) -> Option<&'static CorpusFile> {
    CORPUS.iter().find(|f| f.name == name)
}

/// Materializes the corpus into `target_dir` and returns the manifest
/// (paths written, in corpus order).
pub fn generate_corpus(target_dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(target_dir)?;
    let mut manifest = Vec::with_capacity(CORPUS.len());
    for file in CORPUS {
        let path = target_dir.join(file.name);
        let mut out = std::fs::File::create(&path)?;
        out.write_all(file.source.as_bytes())?;
        manifest.push(path);
    }
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memcheck::analyze::{analyze, AnalysisConfig};
    use crate::memcheck::ir::parse_ir;

    #[test]
    fn every_corpus_file_parses() {
        for file in CORPUS {
            let program = parse_ir(file.source)
                .unwrap_or_else(|e| panic!("{} failed to parse: {e}", file.name));
            assert_eq!(program.functions.len(), 1, "{}", file.name);
        }
    }

    #[test]
    fn findings_match_the_seeded_expectations_exactly() {
        for file in CORPUS {
            let program = parse_ir(file.source).unwrap();
            let outcome = analyze(&program, &AnalysisConfig::default()).unwrap();
            let got: Vec<(DiagnosticKind, u32)> = outcome
                .diagnostics
                .iter()
                .map(|d| (d.kind, d.line))
                .collect();
            assert_eq!(got, file.expected, "findings mismatch for {}", file.name);
        }
    }

    #[test]
    fn generate_writes_at_least_nine_files() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = generate_corpus(dir.path()).unwrap();
        assert!(manifest.len() >= 9);
        for path in &manifest {
            let text = std::fs::read_to_string(path).unwrap();
            assert!(parse_ir(&text).is_ok(), "{path:?} must parse");
        }
    }
}

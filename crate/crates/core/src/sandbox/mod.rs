//! Enclave-style execution constraints: capability policy, fixed heap
//! budget, and statically resolved embedded modules.
//!
//! A [`Policy`] is immutable once built. The `Enclave` profile pins every
//! host capability to "denied" and the hardened collection path to "on";
//! any attempt to construct a laxer enclave policy is rejected at build
//! time rather than checked during a run.

mod budget;
mod policy_file;

pub use budget::{HeapCharge, HeapLedger, MemoryBudgetExceeded};
pub use policy_file::parse_policy_file;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::collections::HardeningMode;

/// Guest source for the embedded `mathlib` module.
const MATHLIB_SOURCE: &str = include_str!("mathlib.mpy");

/// Default heap budget, in cells. One cell covers one list/map element or
/// one string byte. The budget is fixed at policy construction and never
/// renegotiated during a run.
pub const DEFAULT_HEAP_BUDGET_CELLS: u64 = 1 << 26;

/// Execution profile selecting the capability defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Profile {
    /// All host capabilities denied, hardened collections forced.
    Enclave,
    /// Host I/O permitted; hardening still on unless explicitly disabled.
    Native,
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Enclave => f.write_str("enclave"),
            Profile::Native => f.write_str("native"),
        }
    }
}

/// Host capabilities a guest run may try to exercise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Capability {
    Filesystem,
    Env,
    DynamicLoad,
    Network,
    /// Monotonic clock reads, used by the benchmark harness. Allowed under
    /// every profile; see `check_host_capability`.
    ClockMonotonic,
}

impl Capability {
    pub fn name(&self) -> &'static str {
        match self {
            Capability::Filesystem => "filesystem",
            Capability::Env => "env",
            Capability::DynamicLoad => "dynamic-load",
            Capability::Network => "network",
            Capability::ClockMonotonic => "clock-monotonic",
        }
    }
}

impl fmt::Display for Capability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of a capability check, as recorded in the [`HostAccessLog`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Allowed,
    Denied,
}

/// One capability check observed during a run.
#[derive(Debug, Clone)]
pub struct HostAccessEntry {
    pub capability: Capability,
    pub detail: String,
    pub verdict: Verdict,
}

/// Append-only record of every host-capability check made during a run.
#[derive(Debug, Default, Clone)]
pub struct HostAccessLog {
    entries: Vec<HostAccessEntry>,
}

impl HostAccessLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[HostAccessEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Number of `Allowed` entries for capabilities that must never be
    /// granted under the enclave profile.
    pub fn allowed_restricted_entries(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| {
                e.verdict == Verdict::Allowed
                    && matches!(
                        e.capability,
                        Capability::Filesystem | Capability::Env | Capability::DynamicLoad
                    )
            })
            .count()
    }

    fn record(&mut self, capability: Capability, detail: &str, verdict: Verdict) {
        self.entries.push(HostAccessEntry {
            capability,
            detail: detail.to_string(),
            verdict,
        });
    }
}

/// A module shipped inside the artifact and resolved without touching the
/// host filesystem.
#[derive(Debug, Clone)]
pub enum EmbeddedModule {
    /// Module body written in the guest language.
    GuestSource(Arc<str>),
    /// The compression codec bridge (`compress`/`decompress`), implemented
    /// by the runtime and surfaced to guest code as `zlib_lite`.
    CodecBridge,
}

/// Violation of the capability policy; aborts the guest run.
#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
#[error("policy violation: {capability} denied under {profile} profile ({detail})")]
pub struct PolicyViolation {
    pub capability: Capability,
    pub profile: Profile,
    pub detail: String,
}

/// Errors from policy construction or policy-file parsing.
#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum PolicyError {
    #[error("inconsistent policy: {0}")]
    Inconsistent(String),
    #[error("policy file line {line}: {message}")]
    File { line: usize, message: String },
}

/// Immutable capability profile plus memory budget and embedded-module
/// table. Construct through [`Policy::enclave`] / [`Policy::native`].
#[derive(Debug, Clone)]
pub struct Policy {
    profile: Profile,
    allow_host_io: bool,
    allow_env: bool,
    allow_dynamic_modules: bool,
    heap_budget_cells: u64,
    hardening: HardeningMode,
    embedded_modules: BTreeMap<String, EmbeddedModule>,
    /// Search path for dynamic module loading under the native profile.
    module_search_path: Vec<std::path::PathBuf>,
}

impl Policy {
    /// Builder seeded with the enclave defaults: every host capability
    /// denied, hardening forced on.
    pub fn enclave() -> PolicyBuilder {
        PolicyBuilder {
            profile: Profile::Enclave,
            allow_host_io: false,
            allow_env: false,
            allow_dynamic_modules: false,
            heap_budget_cells: DEFAULT_HEAP_BUDGET_CELLS,
            hardening: HardeningMode::Hardened,
            embedded_modules: default_embedded_modules(),
            module_search_path: Vec::new(),
        }
    }

    /// Builder seeded with the native defaults: host I/O and environment
    /// reads permitted, dynamic module loading off, hardening on.
    pub fn native() -> PolicyBuilder {
        PolicyBuilder {
            profile: Profile::Native,
            allow_host_io: true,
            allow_env: true,
            allow_dynamic_modules: false,
            heap_budget_cells: DEFAULT_HEAP_BUDGET_CELLS,
            hardening: HardeningMode::Hardened,
            embedded_modules: default_embedded_modules(),
            module_search_path: Vec::new(),
        }
    }

    pub fn builder(profile: Profile) -> PolicyBuilder {
        match profile {
            Profile::Enclave => Policy::enclave(),
            Profile::Native => Policy::native(),
        }
    }

    /// A builder seeded with this policy's settings, for applying
    /// overrides on top of a loaded policy file.
    pub fn to_builder(&self) -> PolicyBuilder {
        PolicyBuilder {
            profile: self.profile,
            allow_host_io: self.allow_host_io,
            allow_env: self.allow_env,
            allow_dynamic_modules: self.allow_dynamic_modules,
            heap_budget_cells: self.heap_budget_cells,
            hardening: self.hardening,
            embedded_modules: self.embedded_modules.clone(),
            module_search_path: self.module_search_path.clone(),
        }
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn allow_host_io(&self) -> bool {
        self.allow_host_io
    }

    pub fn allow_env(&self) -> bool {
        self.allow_env
    }

    pub fn allow_dynamic_modules(&self) -> bool {
        self.allow_dynamic_modules
    }

    pub fn heap_budget_cells(&self) -> u64 {
        self.heap_budget_cells
    }

    pub fn hardening(&self) -> HardeningMode {
        self.hardening
    }

    pub fn embedded_module(&self, name: &str) -> Option<&EmbeddedModule> {
        self.embedded_modules.get(name)
    }

    pub fn embedded_module_names(&self) -> impl Iterator<Item = &str> {
        self.embedded_modules.keys().map(|s| s.as_str())
    }

    pub fn module_search_path(&self) -> &[std::path::PathBuf] {
        &self.module_search_path
    }

    /// Checks whether `capability` may be exercised, records the attempt in
    /// `log`, and returns a violation if it may not.
    ///
    /// The verdict table: filesystem and network follow `allow_host_io`,
    /// env follows `allow_env`, dynamic-load follows
    /// `allow_dynamic_modules`. Monotonic clock reads are always allowed —
    /// the harness needs a timer, and a monotonic counter neither reads nor
    /// writes host state.
    pub fn check_host_capability(
        &self,
        log: &mut HostAccessLog,
        capability: Capability,
        detail: &str,
    ) -> Result<(), PolicyViolation> {
        let allowed = match capability {
            Capability::Filesystem | Capability::Network => self.allow_host_io,
            Capability::Env => self.allow_env,
            Capability::DynamicLoad => self.allow_dynamic_modules,
            Capability::ClockMonotonic => true,
        };
        let verdict = if allowed {
            Verdict::Allowed
        } else {
            Verdict::Denied
        };
        log.record(capability, detail, verdict);
        if allowed {
            Ok(())
        } else {
            Err(PolicyViolation {
                capability,
                profile: self.profile,
                detail: detail.to_string(),
            })
        }
    }
}

fn default_embedded_modules() -> BTreeMap<String, EmbeddedModule> {
    let mut table = BTreeMap::new();
    table.insert("zlib_lite".to_string(), EmbeddedModule::CodecBridge);
    table.insert(
        "mathlib".to_string(),
        EmbeddedModule::GuestSource(Arc::from(MATHLIB_SOURCE)),
    );
    table
}

/// Staged policy settings; [`PolicyBuilder::build`] validates them against
/// the profile invariants.
#[derive(Debug, Clone)]
pub struct PolicyBuilder {
    profile: Profile,
    allow_host_io: bool,
    allow_env: bool,
    allow_dynamic_modules: bool,
    heap_budget_cells: u64,
    hardening: HardeningMode,
    embedded_modules: BTreeMap<String, EmbeddedModule>,
    module_search_path: Vec<std::path::PathBuf>,
}

impl PolicyBuilder {
    pub fn allow_host_io(mut self, allow: bool) -> Self {
        self.allow_host_io = allow;
        self
    }

    pub fn allow_env(mut self, allow: bool) -> Self {
        self.allow_env = allow;
        self
    }

    pub fn allow_dynamic_modules(mut self, allow: bool) -> Self {
        self.allow_dynamic_modules = allow;
        self
    }

    pub fn heap_budget_cells(mut self, cells: u64) -> Self {
        self.heap_budget_cells = cells;
        self
    }

    pub fn hardening(mut self, mode: HardeningMode) -> Self {
        self.hardening = mode;
        self
    }

    /// Registers (or replaces) an embedded module written in guest source.
    pub fn embed_module(mut self, name: &str, source: &str) -> Self {
        self.embedded_modules
            .insert(name.to_string(), EmbeddedModule::GuestSource(Arc::from(source)));
        self
    }

    pub fn module_search_path(mut self, paths: Vec<std::path::PathBuf>) -> Self {
        self.module_search_path = paths;
        self
    }

    pub fn build(self) -> Result<Policy, PolicyError> {
        if self.profile == Profile::Enclave {
            if self.allow_host_io {
                return Err(PolicyError::Inconsistent(
                    "enclave profile forbids host I/O".into(),
                ));
            }
            if self.allow_env {
                return Err(PolicyError::Inconsistent(
                    "enclave profile forbids environment access".into(),
                ));
            }
            if self.allow_dynamic_modules {
                return Err(PolicyError::Inconsistent(
                    "enclave profile forbids dynamic module loading".into(),
                ));
            }
            if self.hardening == HardeningMode::Baseline {
                return Err(PolicyError::Inconsistent(
                    "enclave profile forces hardened collections".into(),
                ));
            }
            if !self.module_search_path.is_empty() {
                return Err(PolicyError::Inconsistent(
                    "enclave profile forbids a module search path".into(),
                ));
            }
        }
        Ok(Policy {
            profile: self.profile,
            allow_host_io: self.allow_host_io,
            allow_env: self.allow_env,
            allow_dynamic_modules: self.allow_dynamic_modules,
            heap_budget_cells: self.heap_budget_cells,
            hardening: self.hardening,
            embedded_modules: self.embedded_modules,
            module_search_path: self.module_search_path,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enclave_defaults_deny_everything() {
        let policy = Policy::enclave().build().unwrap();
        assert_eq!(policy.profile(), Profile::Enclave);
        assert!(!policy.allow_host_io());
        assert!(!policy.allow_env());
        assert!(!policy.allow_dynamic_modules());
        assert_eq!(policy.hardening(), HardeningMode::Hardened);
    }

    #[test]
    fn enclave_rejects_host_io_override() {
        let err = Policy::enclave().allow_host_io(true).build().unwrap_err();
        assert!(matches!(err, PolicyError::Inconsistent(_)));
    }

    #[test]
    fn enclave_rejects_baseline_hardening() {
        let err = Policy::enclave()
            .hardening(HardeningMode::Baseline)
            .build()
            .unwrap_err();
        assert!(matches!(err, PolicyError::Inconsistent(_)));
    }

    #[test]
    fn native_baseline_is_valid() {
        let policy = Policy::native()
            .hardening(HardeningMode::Baseline)
            .build()
            .unwrap();
        assert_eq!(policy.hardening(), HardeningMode::Baseline);
    }

    #[test]
    fn capability_verdicts_follow_profile() {
        let enclave = Policy::enclave().build().unwrap();
        let native = Policy::native().build().unwrap();
        let mut log = HostAccessLog::new();

        let err = enclave
            .check_host_capability(&mut log, Capability::Filesystem, "read /etc/passwd")
            .unwrap_err();
        assert_eq!(err.capability, Capability::Filesystem);
        assert_eq!(log.entries().len(), 1);
        assert_eq!(log.entries()[0].verdict, Verdict::Denied);

        native
            .check_host_capability(&mut log, Capability::Filesystem, "read fixture")
            .unwrap();
        assert_eq!(log.entries()[1].verdict, Verdict::Allowed);

        // Monotonic clock is the one concession under enclave.
        enclave
            .check_host_capability(&mut log, Capability::ClockMonotonic, "bench timer")
            .unwrap();
        assert_eq!(log.entries()[2].verdict, Verdict::Allowed);
        assert_eq!(log.allowed_restricted_entries(), 1); // the native fs read
    }

    #[test]
    fn default_embedded_modules_present() {
        let policy = Policy::enclave().build().unwrap();
        assert!(matches!(
            policy.embedded_module("zlib_lite"),
            Some(EmbeddedModule::CodecBridge)
        ));
        assert!(matches!(
            policy.embedded_module("mathlib"),
            Some(EmbeddedModule::GuestSource(_))
        ));
        assert!(policy.embedded_module("os").is_none());
    }
}

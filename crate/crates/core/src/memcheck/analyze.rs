//! Forward abstract interpretation over the IR.
//!
//! Domains: signed-64 intervals with ±∞ sentinels for integers, and a
//! nullness/provenance lattice for addresses with per-allocation-site
//! length intervals. The analysis is intraprocedural; calls havoc their
//! result. Joins widen after a configurable delay, so every input
//! terminates.
//!
//! Flagged conditions:
//!   - `shl` whose shift-amount interval is not within `[0, 63]`
//!   - loads/stores whose index may leave `[0, site length)`, or whose
//!     base may be freed (double frees report as overflow-writes: freeing
//!     updates allocator metadata)
//!   - loads/stores/frees whose base may be null
//!   - allocation sites that can reach `ret` unfreed, unreturned, and
//!     unescaped

use std::collections::{BTreeMap, HashSet, VecDeque};

use super::ir::{BinIrOp, CmpIrOp, Function, InstrKind, IrProgram, Operand, ParamType};
use super::report::{Diagnostic, DiagnosticKind};

const NEG_INF: i128 = i128::MIN;
const POS_INF: i128 = i128::MAX;
const I64_MIN: i128 = i64::MIN as i128;
const I64_MAX: i128 = i64::MAX as i128;

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    /// Joins tolerated per block before widening kicks in.
    pub widening_delay: u32,
    /// Block-visit budget across the whole program.
    pub max_iterations: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            widening_delay: 3,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("analysis budget exceeded after {iterations} block visits (limit {limit})")]
pub struct AnalysisBudgetExceeded {
    pub iterations: u64,
    pub limit: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOutcome {
    pub diagnostics: Vec<Diagnostic>,
    /// Total block visits performed.
    pub iterations: u64,
    pub functions: usize,
}

// ---------------------------------------------------------------------------
// Interval domain

/// Interval over signed 64-bit values; bounds use i128 with infinity
/// sentinels, and finite bounds saturate at the i64 range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub lo: i128,
    pub hi: i128,
}

impl Interval {
    pub const TOP: Interval = Interval {
        lo: NEG_INF,
        hi: POS_INF,
    };

    pub fn singleton(v: i64) -> Self {
        Self {
            lo: v as i128,
            hi: v as i128,
        }
    }

    pub fn range(lo: i128, hi: i128) -> Self {
        Self {
            lo: clamp_bound(lo),
            hi: clamp_bound(hi),
        }
    }

    pub fn is_subset(&self, lo: i128, hi: i128) -> bool {
        self.lo >= lo && self.hi <= hi
    }

    pub fn join(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Standard interval widening: any bound that moved jumps to infinity.
    pub fn widen(&self, newer: &Interval) -> Interval {
        Interval {
            lo: if newer.lo < self.lo { NEG_INF } else { self.lo },
            hi: if newer.hi > self.hi { POS_INF } else { self.hi },
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    fn arithmetic(op: BinIrOp, a: Interval, b: Interval) -> Interval {
        match op {
            BinIrOp::Add => {
                let lo = add_bound(a.lo, b.lo);
                let hi = add_bound(a.hi, b.hi);
                Interval::range(lo, hi)
            }
            BinIrOp::Sub => {
                let lo = add_bound(a.lo, neg_bound(b.hi));
                let hi = add_bound(a.hi, neg_bound(b.lo));
                Interval::range(lo, hi)
            }
            BinIrOp::Mul => {
                if !a.is_finite() || !b.is_finite() {
                    return Interval::TOP;
                }
                let corners = [a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi];
                Interval::range(
                    *corners.iter().min().expect("non-empty"),
                    *corners.iter().max().expect("non-empty"),
                )
            }
            BinIrOp::Shl => {
                // Caller guarantees the shift amount sits in [0, 63].
                if !a.is_finite() || !b.is_finite() {
                    return Interval::TOP;
                }
                let mut lo = POS_INF;
                let mut hi = NEG_INF;
                for value in [a.lo, a.hi] {
                    for shift in [b.lo, b.hi] {
                        let shifted = value << shift;
                        lo = lo.min(shifted);
                        hi = hi.max(shifted);
                    }
                }
                Interval::range(lo, hi)
            }
        }
    }

    fn is_finite(&self) -> bool {
        self.lo != NEG_INF && self.hi != POS_INF
    }
}

fn clamp_bound(v: i128) -> i128 {
    if v == NEG_INF || v == POS_INF {
        v
    } else if v < I64_MIN {
        NEG_INF
    } else if v > I64_MAX {
        POS_INF
    } else {
        v
    }
}

fn add_bound(a: i128, b: i128) -> i128 {
    if a == NEG_INF || b == NEG_INF {
        NEG_INF
    } else if a == POS_INF || b == POS_INF {
        POS_INF
    } else {
        a + b
    }
}

fn neg_bound(a: i128) -> i128 {
    if a == NEG_INF {
        POS_INF
    } else if a == POS_INF {
        NEG_INF
    } else {
        -a
    }
}

// ---------------------------------------------------------------------------
// Address domain

/// Allocation site: flat instruction index of the `alloc`.
pub type SiteId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AddrVal {
    Null,
    /// Definitely a live allocation. `None` means unknown provenance that
    /// has been null-checked (e.g. a call result after a guard).
    NonNull(Option<SiteId>),
    /// Either null or the given site.
    MaybeNull(Option<SiteId>),
    Freed(SiteId),
    /// Unknown, including possibly null or freed provenance we never saw.
    Top,
}

impl AddrVal {
    fn join(&self, other: &AddrVal) -> AddrVal {
        use AddrVal::*;
        if self == other {
            return *self;
        }
        match (*self, *other) {
            (Null, NonNull(s)) | (NonNull(s), Null) => MaybeNull(s),
            (Null, MaybeNull(s)) | (MaybeNull(s), Null) => MaybeNull(s),
            (NonNull(a), NonNull(b)) => NonNull(merge_site(a, b)),
            (MaybeNull(a), MaybeNull(b)) => MaybeNull(merge_site(a, b)),
            (NonNull(a), MaybeNull(b)) | (MaybeNull(b), NonNull(a)) => {
                MaybeNull(merge_site(a, b))
            }
            _ => Top,
        }
    }

    fn may_be_null(&self) -> bool {
        matches!(self, AddrVal::Null | AddrVal::MaybeNull(_) | AddrVal::Top)
    }

    fn site(&self) -> Option<SiteId> {
        match self {
            AddrVal::NonNull(s) | AddrVal::MaybeNull(s) => *s,
            AddrVal::Freed(s) => Some(*s),
            _ => None,
        }
    }
}

fn merge_site(a: Option<SiteId>, b: Option<SiteId>) -> Option<SiteId> {
    match (a, b) {
        (Some(x), Some(y)) if x == y => Some(x),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Per-variable values and program state

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbsVal {
    Int(Interval),
    Addr(AddrVal),
    /// Call results: usable as either an unknown integer or an unknown
    /// address.
    AnyTop,
}

impl AbsVal {
    fn join(&self, other: &AbsVal) -> AbsVal {
        match (self, other) {
            (AbsVal::Int(a), AbsVal::Int(b)) => AbsVal::Int(a.join(b)),
            (AbsVal::Addr(a), AbsVal::Addr(b)) => AbsVal::Addr(a.join(b)),
            _ => AbsVal::AnyTop,
        }
    }

    fn widen(&self, newer: &AbsVal) -> AbsVal {
        match (self, newer) {
            (AbsVal::Int(a), AbsVal::Int(b)) => AbsVal::Int(a.widen(b)),
            _ => self.join(newer),
        }
    }

    fn as_interval(&self) -> Interval {
        match self {
            AbsVal::Int(i) => *i,
            _ => Interval::TOP,
        }
    }

    fn as_addr(&self) -> AddrVal {
        match self {
            AbsVal::Addr(a) => *a,
            // An integer used as an address: definitely-zero is null,
            // possibly-zero may be null, anything else is unknown.
            AbsVal::Int(i) => {
                if i.lo == 0 && i.hi == 0 {
                    AddrVal::Null
                } else {
                    AddrVal::Top
                }
            }
            AbsVal::AnyTop => AddrVal::Top,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct SiteState {
    len: Interval,
    /// Still allocated on some path through this point.
    may_unfreed: bool,
    /// Stored to memory or passed to a call; exempt from leak reporting.
    escaped: bool,
}

impl SiteState {
    fn join(&self, other: &SiteState) -> SiteState {
        SiteState {
            len: self.len.join(&other.len),
            may_unfreed: self.may_unfreed || other.may_unfreed,
            escaped: self.escaped || other.escaped,
        }
    }
}

/// A recorded comparison, used to refine branch successors.
#[derive(Debug, Clone, PartialEq)]
struct CmpFact {
    op: CmpIrOp,
    lhs: Operand,
    rhs: Operand,
}

#[derive(Debug, Clone, PartialEq, Default)]
struct AbsState {
    vars: BTreeMap<String, AbsVal>,
    sites: BTreeMap<SiteId, SiteState>,
    facts: BTreeMap<String, CmpFact>,
}

impl AbsState {
    fn value(&self, operand: &Operand) -> AbsVal {
        match operand {
            Operand::Const(v) => AbsVal::Int(Interval::singleton(*v)),
            Operand::Var(name) => self
                .vars
                .get(name)
                .copied()
                // Reading a never-written variable: treat as unknown.
                .unwrap_or(AbsVal::AnyTop),
        }
    }

    fn set(&mut self, name: &str, value: AbsVal) {
        self.vars.insert(name.to_string(), value);
        self.facts
            .retain(|dest, fact| dest != name && !fact.mentions(name));
    }

    fn join(&self, other: &AbsState) -> AbsState {
        let mut vars = BTreeMap::new();
        for (name, value) in &self.vars {
            match other.vars.get(name) {
                Some(other_value) => {
                    vars.insert(name.clone(), value.join(other_value));
                }
                None => {
                    vars.insert(name.clone(), *value);
                }
            }
        }
        for (name, value) in &other.vars {
            vars.entry(name.clone()).or_insert(*value);
        }
        let mut sites = self.sites.clone();
        for (site, state) in &other.sites {
            sites
                .entry(*site)
                .and_modify(|s| *s = s.join(state))
                .or_insert(*state);
        }
        // Facts survive a join only when identical on both sides.
        let facts = self
            .facts
            .iter()
            .filter(|(name, fact)| other.facts.get(*name) == Some(fact))
            .map(|(name, fact)| (name.clone(), fact.clone()))
            .collect();
        AbsState { vars, sites, facts }
    }

    fn widen(&self, newer: &AbsState) -> AbsState {
        let mut joined = self.join(newer);
        for (name, value) in &mut joined.vars {
            if let (Some(old), Some(new)) = (self.vars.get(name), newer.vars.get(name)) {
                *value = old.widen(new);
            }
        }
        joined
    }

    /// Rebinds every variable carrying `site` to `Freed(site)`.
    fn free_site(&mut self, site: SiteId) {
        for value in self.vars.values_mut() {
            if let AbsVal::Addr(addr) = value {
                if addr.site() == Some(site) && !matches!(addr, AddrVal::Freed(_)) {
                    *addr = AddrVal::Freed(site);
                }
            }
        }
        if let Some(state) = self.sites.get_mut(&site) {
            state.may_unfreed = false;
        }
    }
}

impl CmpFact {
    fn mentions(&self, name: &str) -> bool {
        let is_name = |op: &Operand| matches!(op, Operand::Var(v) if v == name);
        is_name(&self.lhs) || is_name(&self.rhs)
    }
}

// ---------------------------------------------------------------------------
// Analysis driver

pub fn analyze(
    program: &IrProgram,
    config: &AnalysisConfig,
) -> Result<AnalysisOutcome, AnalysisBudgetExceeded> {
    let mut diagnostics = Vec::new();
    let mut iterations = 0u64;
    for function in &program.functions {
        analyze_function(function, config, &mut diagnostics, &mut iterations)?;
    }
    // Stable report order. One finding per (function, instruction, kind).
    diagnostics.sort_by(|a, b| {
        (&a.function, a.instruction, a.kind as u8).cmp(&(&b.function, b.instruction, b.kind as u8))
    });
    diagnostics.dedup_by(|a, b| {
        a.function == b.function && a.instruction == b.instruction && a.kind == b.kind
    });
    Ok(AnalysisOutcome {
        diagnostics,
        iterations,
        functions: program.functions.len(),
    })
}

struct FunctionAnalysis<'f> {
    function: &'f Function,
    /// Flat instruction index of each block start.
    block_offsets: Vec<usize>,
    diagnostics: Vec<Diagnostic>,
    seen: HashSet<(usize, DiagnosticKind)>,
}

/// Successor block indices from the terminator.
fn successors_of(function: &Function, block_idx: usize) -> Vec<usize> {
    match function.blocks[block_idx].instrs.last().map(|i| &i.kind) {
        Some(InstrKind::Br {
            then_label,
            else_label,
            ..
        }) => vec![
            function.block_index[then_label],
            function.block_index[else_label],
        ],
        Some(InstrKind::Jmp { label }) => vec![function.block_index[label]],
        _ => Vec::new(),
    }
}

/// Widening points: targets of retreating edges in a DFS from the entry.
/// Every cycle passes through one, which is what guarantees termination;
/// widening anywhere else would throw away branch refinements for nothing.
fn loop_heads(function: &Function) -> HashSet<usize> {
    let mut heads = HashSet::new();
    let mut visited = vec![false; function.blocks.len()];
    let mut on_stack = vec![false; function.blocks.len()];
    // Iterative DFS with explicit post-visit frames.
    let mut stack: Vec<(usize, bool)> = vec![(0, false)];
    while let Some((block, is_exit)) = stack.pop() {
        if is_exit {
            on_stack[block] = false;
            continue;
        }
        if visited[block] {
            continue;
        }
        visited[block] = true;
        on_stack[block] = true;
        stack.push((block, true));
        for succ in successors_of(function, block) {
            if on_stack[succ] {
                heads.insert(succ);
            } else if !visited[succ] {
                stack.push((succ, false));
            }
        }
    }
    heads
}

fn analyze_function(
    function: &Function,
    config: &AnalysisConfig,
    out: &mut Vec<Diagnostic>,
    iterations: &mut u64,
) -> Result<(), AnalysisBudgetExceeded> {
    let mut offsets = Vec::with_capacity(function.blocks.len());
    let mut next = 0usize;
    for block in &function.blocks {
        offsets.push(next);
        next += block.instrs.len();
    }
    let widening_points = loop_heads(function);

    let mut analysis = FunctionAnalysis {
        function,
        block_offsets: offsets,
        diagnostics: Vec::new(),
        seen: HashSet::new(),
    };

    let mut entry = AbsState::default();
    for (name, ptype) in &function.params {
        let value = match ptype {
            ParamType::Int => AbsVal::Int(Interval::TOP),
            ParamType::Addr => AbsVal::Addr(AddrVal::Top),
        };
        entry.vars.insert(name.clone(), value);
    }

    let block_count = function.blocks.len();
    let mut in_states: Vec<Option<AbsState>> = vec![None; block_count];
    let mut join_counts = vec![0u32; block_count];
    in_states[0] = Some(entry);

    let mut worklist: VecDeque<usize> = VecDeque::new();
    worklist.push_back(0);
    let mut queued = vec![false; block_count];
    queued[0] = true;

    while let Some(block_idx) = worklist.pop_front() {
        queued[block_idx] = false;
        *iterations += 1;
        if *iterations > config.max_iterations {
            return Err(AnalysisBudgetExceeded {
                iterations: *iterations,
                limit: config.max_iterations,
            });
        }
        let state = in_states[block_idx].clone().expect("queued implies state");
        let successors = analysis.transfer_block(block_idx, state);
        for (succ, succ_state) in successors {
            let slot = &mut in_states[succ];
            let merged = match slot {
                None => succ_state,
                Some(existing) => {
                    let joined = existing.join(&succ_state);
                    if joined == *existing {
                        continue;
                    }
                    join_counts[succ] += 1;
                    if widening_points.contains(&succ) && join_counts[succ] > config.widening_delay
                    {
                        existing.widen(&joined)
                    } else {
                        joined
                    }
                }
            };
            if slot.as_ref() == Some(&merged) {
                continue;
            }
            *slot = Some(merged);
            if !queued[succ] {
                queued[succ] = true;
                worklist.push_back(succ);
            }
        }
    }

    out.append(&mut analysis.diagnostics);
    Ok(())
}

impl<'f> FunctionAnalysis<'f> {
    fn flag(
        &mut self,
        kind: DiagnosticKind,
        instr_index: usize,
        line: u32,
        message: impl Into<String>,
    ) {
        if self.seen.insert((instr_index, kind)) {
            self.diagnostics.push(Diagnostic {
                kind,
                function: self.function.name.clone(),
                instruction: instr_index,
                line,
                message: message.into(),
            });
        }
    }

    /// Runs the block's instructions over `state`; returns successor
    /// block indices with their entry states.
    fn transfer_block(&mut self, block_idx: usize, mut state: AbsState) -> Vec<(usize, AbsState)> {
        let block = &self.function.blocks[block_idx];
        let base = self.block_offsets[block_idx];
        for (offset, instr) in block.instrs.iter().enumerate() {
            let index = base + offset;
            let line = instr.line;
            match &instr.kind {
                InstrKind::Const { dest, value } => {
                    state.set(dest, AbsVal::Int(Interval::singleton(*value)));
                }
                InstrKind::Copy { dest, src } => {
                    let value = state.value(src);
                    state.set(dest, value);
                }
                InstrKind::Bin { op, dest, lhs, rhs } => {
                    let a = state.value(lhs).as_interval();
                    let b = state.value(rhs).as_interval();
                    if *op == BinIrOp::Shl && !b.is_subset(0, 63) {
                        self.flag(
                            DiagnosticKind::ShiftOverflow,
                            index,
                            line,
                            format!(
                                "shift amount `{rhs}` may lie outside [0, 63]; `1 << k` style \
                                 expressions overflow for out-of-range exponents"
                            ),
                        );
                        state.set(dest, AbsVal::Int(Interval::TOP));
                    } else {
                        state.set(dest, AbsVal::Int(Interval::arithmetic(*op, a, b)));
                    }
                }
                InstrKind::Cmp { op, dest, lhs, rhs } => {
                    state.set(dest, AbsVal::Int(Interval::range(0, 1)));
                    state.facts.insert(
                        dest.clone(),
                        CmpFact {
                            op: *op,
                            lhs: lhs.clone(),
                            rhs: rhs.clone(),
                        },
                    );
                }
                InstrKind::Alloc { dest, size } => {
                    let requested = state.value(size).as_interval();
                    // Lengths are observable only as non-negative.
                    let len = requested
                        .intersect(&Interval::range(0, POS_INF))
                        .unwrap_or(Interval::singleton(0));
                    state.sites.insert(
                        index,
                        SiteState {
                            len,
                            may_unfreed: true,
                            escaped: false,
                        },
                    );
                    state.set(dest, AbsVal::Addr(AddrVal::NonNull(Some(index))));
                }
                InstrKind::Free { addr } => {
                    let target = state.value(addr).as_addr();
                    if target.may_be_null() {
                        self.flag(
                            DiagnosticKind::NullDeref,
                            index,
                            line,
                            format!("`free {addr}` may free a null pointer"),
                        );
                    }
                    match target {
                        AddrVal::Freed(site) => {
                            self.flag(
                                DiagnosticKind::BufferOverflowWrite,
                                index,
                                line,
                                format!(
                                    "`free {addr}` frees an already-freed allocation \
                                     (allocator metadata write through a dead block)"
                                ),
                            );
                            let _ = site;
                        }
                        AddrVal::NonNull(Some(site)) | AddrVal::MaybeNull(Some(site)) => {
                            state.free_site(site);
                        }
                        _ => {}
                    }
                }
                InstrKind::Load { dest, addr, index: idx } => {
                    self.check_access(&mut state, addr, idx, index, line, false);
                    state.set(dest, AbsVal::AnyTop);
                }
                InstrKind::Store {
                    addr,
                    index: idx,
                    value,
                } => {
                    self.check_access(&mut state, addr, idx, index, line, true);
                    // A stored pointer escapes: something else now holds it.
                    if let AbsVal::Addr(stored) = state.value(value) {
                        if let Some(site) = stored.site() {
                            if let Some(s) = state.sites.get_mut(&site) {
                                s.escaped = true;
                            }
                        }
                    }
                }
                InstrKind::Call { dest, args, .. } => {
                    for arg in args {
                        if let AbsVal::Addr(passed) = state.value(arg) {
                            if let Some(site) = passed.site() {
                                if let Some(s) = state.sites.get_mut(&site) {
                                    s.escaped = true;
                                }
                            }
                        }
                    }
                    if let Some(dest) = dest {
                        state.set(dest, AbsVal::AnyTop);
                    }
                }
                InstrKind::Br {
                    cond,
                    then_label,
                    else_label,
                } => {
                    let then_idx = self.function.block_index[then_label];
                    let else_idx = self.function.block_index[else_label];
                    let fact = match cond {
                        Operand::Var(name) => state.facts.get(name).cloned(),
                        Operand::Const(_) => None,
                    };
                    let mut successors = Vec::new();
                    let then_state = refine(&state, fact.as_ref(), true);
                    let else_state = refine(&state, fact.as_ref(), false);
                    if let Some(s) = then_state {
                        successors.push((then_idx, s));
                    }
                    if let Some(s) = else_state {
                        successors.push((else_idx, s));
                    }
                    return successors;
                }
                InstrKind::Jmp { label } => {
                    let target = self.function.block_index[label];
                    return vec![(target, state)];
                }
                InstrKind::Ret { value } => {
                    let returned_site = value
                        .as_ref()
                        .and_then(|operand| match state.value(operand) {
                            AbsVal::Addr(addr) => addr.site(),
                            _ => None,
                        });
                    let leaked: Vec<SiteId> = state
                        .sites
                        .iter()
                        .filter(|(site, s)| {
                            s.may_unfreed && !s.escaped && Some(**site) != returned_site
                        })
                        .map(|(site, _)| *site)
                        .collect();
                    for site in leaked {
                        let alloc_line = self
                            .function
                            .instruction(site)
                            .map(|i| i.line)
                            .unwrap_or(line);
                        self.flag(
                            DiagnosticKind::MemoryLeak,
                            site,
                            alloc_line,
                            "allocation may reach function exit with no free on this path"
                                .to_string(),
                        );
                    }
                    return Vec::new();
                }
            }
        }
        // Parser guarantees a terminator; defensive empty successor set.
        Vec::new()
    }

    /// Shared load/store validation.
    fn check_access(
        &mut self,
        state: &mut AbsState,
        addr: &Operand,
        index_op: &Operand,
        instr_index: usize,
        line: u32,
        is_write: bool,
    ) {
        let (verb, spatial_kind) = if is_write {
            ("store to", DiagnosticKind::BufferOverflowWrite)
        } else {
            ("load from", DiagnosticKind::BufferOverRead)
        };
        let target = state.value(addr).as_addr();
        if target.may_be_null() {
            self.flag(
                DiagnosticKind::NullDeref,
                instr_index,
                line,
                format!("{verb} `{addr}` may dereference a null pointer"),
            );
        }
        match target {
            AddrVal::Freed(_) => {
                self.flag(
                    spatial_kind,
                    instr_index,
                    line,
                    format!("{verb} `{addr}` uses an allocation that may already be freed"),
                );
            }
            AddrVal::NonNull(Some(site)) | AddrVal::MaybeNull(Some(site)) => {
                let len = state
                    .sites
                    .get(&site)
                    .map(|s| s.len)
                    .unwrap_or(Interval::TOP);
                let index = state.value(index_op).as_interval();
                let len_floor = len.lo.max(0);
                let within = index.lo >= 0 && index.hi < len_floor;
                if !within {
                    self.flag(
                        spatial_kind,
                        instr_index,
                        line,
                        format!(
                            "index `{index_op}` may leave [0, len) for the allocation at \
                             instruction {site}"
                        ),
                    );
                }
            }
            _ => {}
        }
    }
}

/// Applies a branch condition to a copy of the state; `None` means that
/// branch direction is unreachable under the current abstraction.
fn refine(state: &AbsState, fact: Option<&CmpFact>, truth: bool) -> Option<AbsState> {
    let Some(fact) = fact else {
        return Some(state.clone());
    };
    let mut refined = state.clone();

    // Null tests: `cmp eq p 0` with an address operand.
    if fact.op == CmpIrOp::Eq {
        let null_test = match (&fact.lhs, &fact.rhs) {
            (Operand::Var(name), other) | (other, Operand::Var(name)) => {
                let other_zero = matches!(
                    state.value(other),
                    AbsVal::Int(i) if i == Interval::singleton(0)
                );
                let lhs_is_addr = matches!(
                    state.value(&Operand::Var(name.clone())),
                    AbsVal::Addr(_) | AbsVal::AnyTop
                );
                (other_zero && lhs_is_addr).then(|| name.clone())
            }
            (Operand::Const(_), Operand::Const(_)) => None,
        };
        if let Some(name) = null_test {
            let current = state.value(&Operand::Var(name.clone())).as_addr();
            let narrowed = if truth {
                match current {
                    AddrVal::NonNull(_) => return None, // cannot be null here
                    _ => AddrVal::Null,
                }
            } else {
                match current {
                    AddrVal::Null => return None, // definitely null: else-branch dead
                    AddrVal::MaybeNull(site) => AddrVal::NonNull(site),
                    AddrVal::Top => AddrVal::NonNull(None),
                    other => other,
                }
            };
            refined.set(&name, AbsVal::Addr(narrowed));
            return Some(refined);
        }
    }

    // Integer refinement.
    let a = state.value(&fact.lhs).as_interval();
    let b = state.value(&fact.rhs).as_interval();
    let (new_a, new_b) = match (fact.op, truth) {
        // lhs < rhs
        (CmpIrOp::Lt, true) => (
            a.intersect(&Interval::range(NEG_INF, add_bound(b.hi, -1))),
            b.intersect(&Interval::range(add_bound(a.lo, 1), POS_INF)),
        ),
        // lhs >= rhs
        (CmpIrOp::Lt, false) => (
            a.intersect(&Interval::range(b.lo, POS_INF)),
            b.intersect(&Interval::range(NEG_INF, a.hi)),
        ),
        // lhs <= rhs
        (CmpIrOp::Le, true) => (
            a.intersect(&Interval::range(NEG_INF, b.hi)),
            b.intersect(&Interval::range(a.lo, POS_INF)),
        ),
        // lhs > rhs
        (CmpIrOp::Le, false) => (
            a.intersect(&Interval::range(add_bound(b.lo, 1), POS_INF)),
            b.intersect(&Interval::range(NEG_INF, add_bound(a.hi, -1))),
        ),
        (CmpIrOp::Eq, true) => {
            let both = a.intersect(&b);
            (both, both)
        }
        (CmpIrOp::Eq, false) => {
            // Only singleton endpoints can be shaved off soundly.
            let shave = |x: Interval, other: Interval| -> Option<Interval> {
                if other.lo == other.hi {
                    let v = other.lo;
                    if x.lo == v && x.hi == v {
                        return None;
                    }
                    if x.lo == v {
                        return Some(Interval::range(add_bound(v, 1), x.hi));
                    }
                    if x.hi == v {
                        return Some(Interval::range(x.lo, add_bound(v, -1)));
                    }
                }
                Some(x)
            };
            (shave(a, b), shave(b, a))
        }
    };

    match (&fact.lhs, new_a) {
        (Operand::Var(name), Some(interval)) => {
            if matches!(state.value(&fact.lhs), AbsVal::Int(_)) {
                refined.set(name, AbsVal::Int(interval));
            }
        }
        (Operand::Var(_), None) => return None,
        _ => {
            if new_a.is_none() {
                return None;
            }
        }
    }
    match (&fact.rhs, new_b) {
        (Operand::Var(name), Some(interval)) => {
            if matches!(state.value(&fact.rhs), AbsVal::Int(_)) {
                refined.set(name, AbsVal::Int(interval));
            }
        }
        (Operand::Var(_), None) => return None,
        _ => {
            if new_b.is_none() {
                return None;
            }
        }
    }
    Some(refined)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memcheck::ir::parse_ir;

    fn run(source: &str) -> Vec<Diagnostic> {
        let program = parse_ir(source).unwrap();
        analyze(&program, &AnalysisConfig::default())
            .unwrap()
            .diagnostics
    }

    #[test]
    fn join_with_self_is_identity() {
        let i = Interval::range(-5, 40);
        assert_eq!(i.join(&i), i);
        let mut state = AbsState::default();
        state.vars.insert("x".into(), AbsVal::Int(i));
        assert_eq!(state.join(&state), state);
    }

    #[test]
    fn widen_with_self_is_identity() {
        let i = Interval::range(-5, 40);
        assert_eq!(i.widen(&i), i);
        let mut state = AbsState::default();
        state.vars.insert("x".into(), AbsVal::Int(i));
        state.vars.insert("p".into(), AbsVal::Addr(AddrVal::Null));
        assert_eq!(state.widen(&state), state);
    }

    #[test]
    fn widening_jumps_moved_bounds_to_infinity() {
        let old = Interval::range(0, 10);
        let new = Interval::range(0, 11);
        let widened = old.widen(&new);
        assert_eq!(widened.lo, 0);
        assert_eq!(widened.hi, POS_INF);
    }

    #[test]
    fn unguarded_shift_is_flagged() {
        let diags = run("fn f(k:int) {\n  one = const 1\n  x = shl one k\n  ret x\n}\n");
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].kind, DiagnosticKind::ShiftOverflow);
        assert_eq!(diags[0].line, 3);
    }

    #[test]
    fn guarded_shift_is_clean() {
        let source = "\
fn f(k:int) {
entry:
  kmax = const 32
  c1 = cmp lt kmax k
  br c1 bad neg
neg:
  zero = const 0
  c2 = cmp lt k zero
  br c2 bad ok
ok:
  one = const 1
  x = shl one k
  ret x
bad:
  ret
}
";
        assert!(run(source).is_empty());
    }

    #[test]
    fn loop_with_refined_index_is_clean_and_terminates() {
        let source = "\
fn f() {
entry:
  n = const 8
  p = alloc n
  i = const 0
  jmp loop
loop:
  c = cmp lt i n
  br c body done
body:
  store p i i
  one = const 1
  i = add i one
  jmp loop
done:
  free p
  ret
}
";
        assert!(run(source).is_empty());
    }

    #[test]
    fn store_past_end_is_flagged_once() {
        let source = "\
fn f() {
  n = const 4
  p = alloc n
  i = const 4
  store p i n
  free p
  ret
}
";
        let diags = run(source);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].kind, DiagnosticKind::BufferOverflowWrite);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let source = "\
fn f() {
entry:
  i = const 0
  jmp loop
loop:
  one = const 1
  i = add i one
  jmp loop
}
";
        let program = parse_ir(source).unwrap();
        let config = AnalysisConfig {
            widening_delay: 1_000_000, // never widen => loop forever
            max_iterations: 50,
        };
        let error = analyze(&program, &config).unwrap_err();
        assert_eq!(error.limit, 50);
    }

    #[test]
    fn use_after_free_is_flagged() {
        let source = "\
fn f() {
  n = const 4
  p = alloc n
  free p
  zero = const 0
  x = load p zero
  ret x
}
";
        let diags = run(source);
        assert!(diags
            .iter()
            .any(|d| d.kind == DiagnosticKind::BufferOverRead));
    }

    #[test]
    fn double_free_is_flagged_as_overflow_write() {
        let source = "fn f() {\n  n = const 4\n  p = alloc n\n  free p\n  free p\n  ret\n}\n";
        let diags = run(source);
        assert!(diags
            .iter()
            .any(|d| d.kind == DiagnosticKind::BufferOverflowWrite));
    }

    #[test]
    fn returned_allocation_is_not_a_leak() {
        let diags = run("fn f() {\n  n = const 8\n  p = alloc n\n  ret p\n}\n");
        assert!(diags.is_empty());
    }

    #[test]
    fn escaped_allocation_is_not_a_leak() {
        let diags =
            run("fn f() {\n  n = const 8\n  p = alloc n\n  call keep(p)\n  ret\n}\n");
        assert!(diags.is_empty());
    }
}

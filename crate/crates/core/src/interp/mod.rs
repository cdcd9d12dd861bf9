//! Lexer, parser, and tree-walking evaluator for the restricted
//! Python-like guest language.
//!
//! Entry points: [`parse`] turns UTF-8 source into a [`Program`] or a
//! [`SyntaxError`]; [`execute`] runs a program under a [`Policy`] and
//! always returns a [`RunResult`] — guest failures, policy violations, and
//! budget exhaustion are statuses, never host panics. Identical
//! (program, policy) pairs produce byte-identical output and identical
//! audit counters.

pub mod ast;
mod builtins;
pub mod env;
pub mod error;
mod eval;
mod lexer;
mod parser;
pub mod value;

pub use ast::Program;
pub use error::{GuestError, GuestErrorKind};
pub use eval::MAX_CALL_DEPTH;
pub use lexer::SyntaxError;
pub use parser::parse_expression;

use std::rc::Rc;

use crate::interp::env::Frame;
use crate::interp::env::Scope;
use crate::interp::eval::{Evaluator, Stop};
use crate::interp::value::Value;
use crate::sandbox::{HostAccessLog, MemoryBudgetExceeded, Policy, PolicyViolation};

/// Parses guest source. Any byte sequence either yields a program or a
/// syntax error with position — nothing else.
pub fn parse(source: &str, source_name: &str) -> Result<Program, SyntaxError> {
    parser::parse(source, source_name)
}

/// Counters and captured output for one run. Counters only ever grow
/// during a run; `output` is the sole externally visible effect of guest
/// code.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExecutionAudit {
    pub bounds_checks_performed: u64,
    pub allocations: u64,
    pub peak_heap_cells: u64,
    pub output: Vec<u8>,
}

/// Terminal state of a guest run.
#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Ok,
    GuestError(GuestError),
    PolicyViolation(PolicyViolation),
    MemoryBudgetExceeded(MemoryBudgetExceeded),
    /// Only reachable when [`ExecLimits::max_steps`] is set.
    StepLimitExceeded,
}

impl RunStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, RunStatus::Ok)
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub status: RunStatus,
    pub audit: ExecutionAudit,
    pub host_log: HostAccessLog,
}

/// Optional execution limits (used by fuzz harnesses and the browser
/// demo; the CLI runs unlimited).
#[derive(Debug, Clone, Copy, Default)]
pub struct ExecLimits {
    pub max_steps: Option<u64>,
}

/// Runs a parsed program under `policy` to completion or first failure.
pub fn execute(program: &Program, policy: &Policy) -> RunResult {
    execute_with_limits(program, policy, ExecLimits::default())
}

pub fn execute_with_limits(program: &Program, policy: &Policy, limits: ExecLimits) -> RunResult {
    let mut evaluator = Evaluator::new(Rc::new(policy.clone()), limits.max_steps);
    let mut frame = Frame::new(Scope::root());
    let status = match evaluator.run_program(program, &mut frame) {
        Ok(()) => RunStatus::Ok,
        Err(stop) => status_of(stop),
    };
    finish(evaluator, status)
}

fn status_of(stop: Stop) -> RunStatus {
    match stop {
        Stop::Guest(err) => RunStatus::GuestError(err),
        Stop::Budget(err) => RunStatus::MemoryBudgetExceeded(err),
        Stop::Violation(err) => RunStatus::PolicyViolation(err),
        Stop::StepLimit => RunStatus::StepLimitExceeded,
    }
}

fn finish(evaluator: Evaluator, status: RunStatus) -> RunResult {
    let audit = ExecutionAudit {
        bounds_checks_performed: evaluator.bounds.bounds_checks_performed,
        allocations: evaluator.ledger.allocation_count(),
        peak_heap_cells: evaluator.ledger.peak_cells(),
        output: evaluator.output,
    };
    RunResult {
        status,
        audit,
        host_log: evaluator.host_log,
    }
}

/// A persistent evaluation context for expression-level work: parse an
/// expression, evaluate it against the session's environment, inspect the
/// result. Each session is one single-threaded interpreter instance.
pub struct Session {
    evaluator: Evaluator,
    frame: Frame,
}

/// Expression-level failure: either the expression didn't parse, or
/// evaluation stopped.
#[derive(Debug)]
pub enum EvalError {
    Syntax(SyntaxError),
    Stopped(RunStatus),
}

impl std::fmt::Display for EvalError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EvalError::Syntax(err) => write!(f, "{err}"),
            EvalError::Stopped(RunStatus::GuestError(err)) => write!(f, "{err}"),
            EvalError::Stopped(status) => write!(f, "{status:?}"),
        }
    }
}

impl std::error::Error for EvalError {}

impl Session {
    pub fn new(policy: &Policy) -> Self {
        Self {
            evaluator: Evaluator::new(Rc::new(policy.clone()), None),
            frame: Frame::new(Scope::root()),
        }
    }

    /// Evaluates one expression in the session environment.
    pub fn eval_expression(&mut self, expr: &ast::Expr) -> Result<Value, EvalError> {
        self.evaluator
            .eval_expr(expr, &mut self.frame)
            .map_err(|stop| EvalError::Stopped(status_of(stop)))
    }

    /// Parses and evaluates expression source.
    pub fn eval_source(&mut self, source: &str) -> Result<Value, EvalError> {
        let expr = parse_expression(source).map_err(EvalError::Syntax)?;
        self.eval_expression(&expr)
    }

    /// Runs whole statements (definitions persist across calls).
    pub fn run_source(&mut self, source: &str) -> Result<(), EvalError> {
        let program = parse(source, "<session>").map_err(EvalError::Syntax)?;
        self.evaluator
            .run_program(&program, &mut self.frame)
            .map_err(|stop| EvalError::Stopped(status_of(stop)))
    }

    pub fn output(&self) -> &[u8] {
        &self.evaluator.output
    }
}

//! Tree-walking evaluator.
//!
//! All container access is delegated to the collections module; all
//! allocation runs through the heap ledger; all host capabilities run
//! through the policy. Failures are values of [`Stop`] — a guest program
//! cannot abort the host.

use std::collections::HashMap;
use std::rc::Rc;

use crate::collections::{self, BoundsAudit, HardeningMode};
use crate::interp::ast::*;
use crate::interp::builtins;
use crate::interp::env::{Frame, Scope};
use crate::interp::error::{
    import_error, name_error, overflow_error, type_error, GuestError, GuestErrorKind,
};
use crate::interp::parser;
use crate::interp::value::{Builtin, FuncValue, GuestList, GuestStr, MapKey, ModuleValue, Value};
use crate::sandbox::{
    Capability, EmbeddedModule, HeapLedger, HostAccessLog, MemoryBudgetExceeded, Policy,
    PolicyViolation,
};

/// Guest call-frame cap; exceeding it raises a guest `RecursionError`
/// rather than overflowing the host stack.
pub const MAX_CALL_DEPTH: usize = 1000;

/// Why execution stopped early.
#[derive(Debug)]
pub(crate) enum Stop {
    Guest(GuestError),
    Budget(MemoryBudgetExceeded),
    Violation(PolicyViolation),
    StepLimit,
}

impl Stop {
    fn with_line(self, line: u32) -> Self {
        match self {
            Stop::Guest(err) => Stop::Guest(err.at_line(line)),
            other => other,
        }
    }
}

impl From<GuestError> for Stop {
    fn from(err: GuestError) -> Self {
        Stop::Guest(err)
    }
}

impl From<MemoryBudgetExceeded> for Stop {
    fn from(err: MemoryBudgetExceeded) -> Self {
        Stop::Budget(err)
    }
}

impl From<PolicyViolation> for Stop {
    fn from(err: PolicyViolation) -> Self {
        Stop::Violation(err)
    }
}

pub(crate) type EvalResult<T> = Result<T, Stop>;

enum Flow {
    Normal,
    Return(Value),
}

pub(crate) struct Evaluator {
    pub(crate) policy: Rc<Policy>,
    pub(crate) mode: HardeningMode,
    pub(crate) ledger: Rc<HeapLedger>,
    pub(crate) bounds: BoundsAudit,
    pub(crate) output: Vec<u8>,
    pub(crate) host_log: HostAccessLog,
    module_cache: HashMap<Rc<str>, Value>,
    call_depth: usize,
    steps: u64,
    step_limit: u64,
}

impl Evaluator {
    pub(crate) fn new(policy: Rc<Policy>, step_limit: Option<u64>) -> Self {
        let ledger = HeapLedger::new(policy.heap_budget_cells());
        let mode = policy.hardening();
        Self {
            policy,
            mode,
            ledger,
            bounds: BoundsAudit::default(),
            output: Vec::new(),
            host_log: HostAccessLog::new(),
            module_cache: HashMap::new(),
            call_depth: 0,
            steps: 0,
            step_limit: u64::MAX,
        }
        .with_step_limit(step_limit)
    }

    fn with_step_limit(mut self, limit: Option<u64>) -> Self {
        self.step_limit = limit.unwrap_or(u64::MAX);
        self
    }

    pub(crate) fn run_program(&mut self, program: &Program, frame: &mut Frame) -> EvalResult<()> {
        match self.exec_block(&program.body, frame)? {
            Flow::Normal | Flow::Return(_) => Ok(()),
        }
    }

    // -- statements ----------------------------------------------------------

    fn exec_block(&mut self, stmts: &[Stmt], frame: &mut Frame) -> EvalResult<Flow> {
        for stmt in stmts {
            match self.exec_stmt(stmt, frame)? {
                Flow::Normal => {}
                flow @ Flow::Return(_) => return Ok(flow),
            }
        }
        Ok(Flow::Normal)
    }

    fn tick(&mut self) -> EvalResult<()> {
        self.steps += 1;
        if self.steps > self.step_limit {
            return Err(Stop::StepLimit);
        }
        Ok(())
    }

    fn exec_stmt(&mut self, stmt: &Stmt, frame: &mut Frame) -> EvalResult<Flow> {
        self.tick()?;
        let line = stmt.line;
        match &stmt.kind {
            StmtKind::Expr(expr) => {
                self.eval_expr(expr, frame)?;
                Ok(Flow::Normal)
            }
            StmtKind::Assign { target, value } => {
                let value = self.eval_expr(value, frame)?;
                match target {
                    Target::Name(name) => frame.assign(name, value),
                    Target::Index { base, index } => {
                        let base_value = self.eval_expr(base, frame)?;
                        let index_value = self.eval_expr(index, frame)?;
                        self.assign_index(base_value, index_value, value)
                            .map_err(|stop| stop.with_line(line))?;
                    }
                }
                Ok(Flow::Normal)
            }
            StmtKind::Def { name, params, body } => {
                let func = FuncValue {
                    name: name.clone(),
                    params: params.clone(),
                    body: body.clone(),
                    env: frame.scope.clone(),
                    def_line: line,
                };
                frame.assign(name, Value::Func(Rc::new(func)));
                Ok(Flow::Normal)
            }
            StmtKind::Return(value) => {
                let value = match value {
                    Some(expr) => self.eval_expr(expr, frame)?,
                    None => Value::None,
                };
                Ok(Flow::Return(value))
            }
            StmtKind::If { arms, orelse } => {
                for (cond, body) in arms {
                    if self.eval_expr(cond, frame)?.truthy() {
                        return self.exec_block(body, frame);
                    }
                }
                if let Some(body) = orelse {
                    return self.exec_block(body, frame);
                }
                Ok(Flow::Normal)
            }
            StmtKind::While { cond, body } => {
                while self.eval_expr(cond, frame)?.truthy() {
                    self.tick()?;
                    match self.exec_block(body, frame)? {
                        Flow::Normal => {}
                        flow @ Flow::Return(_) => return Ok(flow),
                    }
                }
                Ok(Flow::Normal)
            }
            StmtKind::For {
                var,
                iterable,
                body,
            } => {
                let iterable = self.eval_expr(iterable, frame)?;
                match iterable {
                    Value::List(list) => {
                        let mut i = 0usize;
                        // Live iteration: the body may grow the list.
                        while let Some(item) = list.get(i) {
                            self.tick()?;
                            frame.assign(var, item);
                            match self.exec_block(body, frame)? {
                                Flow::Normal => {}
                                flow @ Flow::Return(_) => return Ok(flow),
                            }
                            i += 1;
                        }
                        Ok(Flow::Normal)
                    }
                    Value::Str(text) => {
                        for i in 0..text.len() {
                            self.tick()?;
                            let byte = text.as_bytes()[i];
                            let ch = GuestStr::new(&self.ledger, &[byte])
                                .map_err(|e| Stop::from(e).with_line(line))?;
                            frame.assign(var, Value::Str(ch));
                            match self.exec_block(body, frame)? {
                                Flow::Normal => {}
                                flow @ Flow::Return(_) => return Ok(flow),
                            }
                        }
                        Ok(Flow::Normal)
                    }
                    other => Err(Stop::from(type_error(format!(
                        "'{}' object is not iterable",
                        other.type_name()
                    )))
                    .with_line(line)),
                }
            }
            StmtKind::Import { module } => {
                let value = self
                    .resolve_import(module)
                    .map_err(|stop| stop.with_line(line))?;
                frame.assign(module, value);
                Ok(Flow::Normal)
            }
            StmtKind::Global { names } => {
                for name in names {
                    frame.global_names.insert(name.clone());
                }
                Ok(Flow::Normal)
            }
            StmtKind::Pass => Ok(Flow::Normal),
        }
    }

    fn assign_index(&mut self, base: Value, index: Value, value: Value) -> EvalResult<()> {
        match base {
            Value::List(list) => {
                let index = expect_int(&index, "list index")?;
                collections::list_set(&list, index, value, self.mode, &mut self.bounds)?;
                Ok(())
            }
            Value::Map(map) => {
                collections::map_set(&map, &index, value, self.mode)??;
                Ok(())
            }
            Value::Str(_) => Err(type_error("'str' does not support item assignment").into()),
            other => Err(type_error(format!(
                "'{}' does not support item assignment",
                other.type_name()
            ))
            .into()),
        }
    }

    // -- imports ------------------------------------------------------------

    /// Static module resolution: embedded table first; the host loader is
    /// reachable only when the policy grants dynamic loading. Parsed and
    /// evaluated once per run, then cached.
    fn resolve_import(&mut self, name: &Rc<str>) -> EvalResult<Value> {
        if let Some(module) = self.module_cache.get(name) {
            return Ok(module.clone());
        }
        let resolved = match self.policy.clone().embedded_module(name) {
            Some(EmbeddedModule::GuestSource(source)) => {
                self.load_guest_module(name, &source.clone())?
            }
            Some(EmbeddedModule::CodecBridge) => {
                let mut table = HashMap::new();
                table.insert(Rc::from("compress"), Value::Builtin(Builtin::ZlibCompress));
                table.insert(
                    Rc::from("decompress"),
                    Value::Builtin(Builtin::ZlibDecompress),
                );
                Value::Module(Rc::new(ModuleValue {
                    name: name.clone(),
                    table: std::cell::RefCell::new(table),
                }))
            }
            None => {
                if !self.policy.allow_dynamic_modules() {
                    // No host probe: unknown names fail without touching
                    // the filesystem or the access log.
                    return Err(import_error(format!("no module named '{name}'")).into());
                }
                let policy = self.policy.clone();
                policy.check_host_capability(
                    &mut self.host_log,
                    Capability::DynamicLoad,
                    &format!("import {name}"),
                )?;
                let mut found = None;
                for dir in policy.module_search_path() {
                    let path = dir.join(format!("{name}.mpy"));
                    if let Ok(source) = std::fs::read_to_string(&path) {
                        found = Some(source);
                        break;
                    }
                }
                let source =
                    found.ok_or_else(|| import_error(format!("no module named '{name}'")))?;
                self.load_guest_module(name, &source)?
            }
        };
        self.module_cache.insert(name.clone(), resolved.clone());
        Ok(resolved)
    }

    fn load_guest_module(&mut self, name: &Rc<str>, source: &str) -> EvalResult<Value> {
        let program = parser::parse(source, &format!("<module {name}>")).map_err(|err| {
            import_error(format!("module '{name}' failed to parse: {}", err.message))
        })?;
        let scope = Scope::root();
        let mut frame = Frame::new(scope.clone());
        self.exec_block(&program.body, &mut frame)?;
        Ok(Value::Module(Rc::new(ModuleValue {
            name: name.clone(),
            table: std::cell::RefCell::new(scope.export()),
        })))
    }

    // -- expressions ----------------------------------------------------------

    pub(crate) fn eval_expr(&mut self, expr: &Expr, frame: &mut Frame) -> EvalResult<Value> {
        let line = expr.line;
        self.eval_expr_inner(expr, frame)
            .map_err(|stop| stop.with_line(line))
    }

    fn eval_expr_inner(&mut self, expr: &Expr, frame: &mut Frame) -> EvalResult<Value> {
        match &expr.kind {
            ExprKind::Int(v) => Ok(Value::Int(*v)),
            ExprKind::Float(v) => Ok(Value::Float(*v)),
            ExprKind::Bool(v) => Ok(Value::Bool(*v)),
            ExprKind::NoneLit => Ok(Value::None),
            ExprKind::Str(bytes) => Ok(Value::Str(GuestStr::new(&self.ledger, bytes)?)),
            ExprKind::Name(name) => match frame.scope.lookup(name) {
                Some(value) => Ok(value),
                None => match Builtin::lookup(name) {
                    Some(b) => Ok(Value::Builtin(b)),
                    None => Err(name_error(format!("name '{name}' is not defined")).into()),
                },
            },
            ExprKind::List(items) => {
                let mut values = Vec::with_capacity(items.len());
                for item in items {
                    values.push(self.eval_expr(item, frame)?);
                }
                Ok(Value::List(GuestList::new(&self.ledger, values)?))
            }
            ExprKind::MapLit(pairs) => {
                let mut entries = Vec::with_capacity(pairs.len());
                for (key_expr, value_expr) in pairs {
                    let key = self.eval_expr(key_expr, frame)?;
                    let value = self.eval_expr(value_expr, frame)?;
                    entries.push((MapKey::from_value(&key)?, value));
                }
                Ok(Value::Map(crate::interp::value::GuestMap::new(
                    &self.ledger,
                    entries,
                )?))
            }
            ExprKind::Unary { op, operand } => {
                let value = self.eval_expr(operand, frame)?;
                self.apply_unary(*op, value)
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let lhs = self.eval_expr(lhs, frame)?;
                let rhs = self.eval_expr(rhs, frame)?;
                self.apply_binary(*op, lhs, rhs)
            }
            ExprKind::BoolOp { op, lhs, rhs } => {
                let lhs = self.eval_expr(lhs, frame)?;
                match (op, lhs.truthy()) {
                    (BoolOp::And, false) | (BoolOp::Or, true) => Ok(lhs),
                    _ => self.eval_expr(rhs, frame),
                }
            }
            ExprKind::Compare { op, lhs, rhs } => {
                let lhs = self.eval_expr(lhs, frame)?;
                let rhs = self.eval_expr(rhs, frame)?;
                self.apply_compare(*op, &lhs, &rhs)
            }
            ExprKind::Index { base, index } => {
                let base = self.eval_expr(base, frame)?;
                let index_value = self.eval_expr(index, frame)?;
                match base {
                    Value::List(list) => {
                        let i = expect_int(&index_value, "list index")?;
                        Ok(collections::list_get(&list, i, self.mode, &mut self.bounds)?)
                    }
                    Value::Str(text) => {
                        let i = expect_int(&index_value, "string index")?;
                        let ch =
                            collections::str_index(&text, i, self.mode, &mut self.bounds, &self.ledger)??;
                        Ok(Value::Str(ch))
                    }
                    Value::Map(map) => Ok(collections::map_get(&map, &index_value, self.mode)?),
                    other => Err(type_error(format!(
                        "'{}' object is not indexable",
                        other.type_name()
                    ))
                    .into()),
                }
            }
            ExprKind::Slice { base, start, stop } => {
                let base = self.eval_expr(base, frame)?;
                let start = match start {
                    Some(e) => Some(expect_int(&self.eval_expr(e, frame)?, "slice start")?),
                    None => None,
                };
                let stop = match stop {
                    Some(e) => Some(expect_int(&self.eval_expr(e, frame)?, "slice stop")?),
                    None => None,
                };
                match base {
                    Value::List(list) => Ok(Value::List(collections::list_slice(
                        &list,
                        start,
                        stop,
                        self.mode,
                        &self.ledger,
                    )?)),
                    Value::Str(text) => Ok(Value::Str(collections::str_slice(
                        &text,
                        start,
                        stop,
                        self.mode,
                        &self.ledger,
                    )?)),
                    other => Err(type_error(format!(
                        "'{}' object is not sliceable",
                        other.type_name()
                    ))
                    .into()),
                }
            }
            ExprKind::Call { callee, args } => {
                if let ExprKind::Attribute { base, attr } = &callee.kind {
                    let receiver = self.eval_expr(base, frame)?;
                    let mut arg_values = Vec::with_capacity(args.len());
                    for arg in args {
                        arg_values.push(self.eval_expr(arg, frame)?);
                    }
                    return self.call_method(receiver, attr, arg_values);
                }
                let callee_value = self.eval_expr(callee, frame)?;
                let mut arg_values = Vec::with_capacity(args.len());
                for arg in args {
                    arg_values.push(self.eval_expr(arg, frame)?);
                }
                self.call_value(callee_value, arg_values)
            }
            ExprKind::Attribute { .. } => {
                // The parser only emits attributes in call position.
                Err(type_error("attribute access outside a call").into())
            }
        }
    }

    fn call_method(&mut self, receiver: Value, attr: &Rc<str>, args: Vec<Value>) -> EvalResult<Value> {
        match receiver {
            Value::Module(module) => {
                let target = module.get(attr).ok_or_else(|| {
                    GuestError::new(
                        GuestErrorKind::AttributeError,
                        format!("module '{}' has no attribute '{attr}'", module.name),
                    )
                })?;
                self.call_value(target, args)
            }
            Value::List(list) => {
                if &**attr != "append" {
                    return Err(GuestError::new(
                        GuestErrorKind::AttributeError,
                        format!("'list' object has no attribute '{attr}'"),
                    )
                    .into());
                }
                if args.len() != 1 {
                    return Err(
                        type_error(format!("append() takes 1 argument, got {}", args.len())).into(),
                    );
                }
                list.push(args.into_iter().next().expect("len checked"))?;
                Ok(Value::None)
            }
            other => Err(GuestError::new(
                GuestErrorKind::AttributeError,
                format!("'{}' object has no attribute '{attr}'", other.type_name()),
            )
            .into()),
        }
    }

    pub(crate) fn call_value(&mut self, callee: Value, args: Vec<Value>) -> EvalResult<Value> {
        match callee {
            Value::Func(func) => self.call_function(func, args),
            Value::Builtin(builtin) => builtins::call(self, builtin, args),
            other => Err(type_error(format!(
                "'{}' object is not callable",
                other.type_name()
            ))
            .into()),
        }
    }

    fn call_function(&mut self, func: Rc<FuncValue>, args: Vec<Value>) -> EvalResult<Value> {
        if args.len() != func.params.len() {
            return Err(type_error(format!(
                "{}() takes {} argument(s), got {}",
                func.name,
                func.params.len(),
                args.len()
            ))
            .into());
        }
        if self.call_depth >= MAX_CALL_DEPTH {
            return Err(GuestError::new(
                GuestErrorKind::RecursionError,
                "maximum recursion depth exceeded",
            )
            .into());
        }
        self.call_depth += 1;
        let scope = func.env.child();
        let mut frame = Frame::new(scope);
        for (param, arg) in func.params.iter().zip(args) {
            frame.scope.define(param.clone(), arg);
        }
        let result = self.exec_block(&func.body, &mut frame);
        self.call_depth -= 1;
        match result? {
            Flow::Return(value) => Ok(value),
            Flow::Normal => Ok(Value::None),
        }
    }

    // -- operators ------------------------------------------------------------

    fn apply_unary(&mut self, op: UnaryOp, value: Value) -> EvalResult<Value> {
        match op {
            UnaryOp::Not => Ok(Value::Bool(!value.truthy())),
            UnaryOp::Neg => match value {
                Value::Int(i) => i
                    .checked_neg()
                    .map(Value::Int)
                    .ok_or_else(|| overflow_error("integer negation overflows").into()),
                Value::Float(f) => Ok(Value::Float(-f)),
                other => Err(type_error(format!(
                    "bad operand type for unary -: '{}'",
                    other.type_name()
                ))
                .into()),
            },
            UnaryOp::Pos => match value {
                Value::Int(_) | Value::Float(_) => Ok(value),
                other => Err(type_error(format!(
                    "bad operand type for unary +: '{}'",
                    other.type_name()
                ))
                .into()),
            },
        }
    }

    fn apply_binary(&mut self, op: BinOp, lhs: Value, rhs: Value) -> EvalResult<Value> {
        use BinOp::*;
        match (&lhs, &rhs) {
            (Value::Int(a), Value::Int(b)) => return int_binop(op, *a, *b),
            (Value::Float(_), Value::Float(_))
            | (Value::Int(_), Value::Float(_))
            | (Value::Float(_), Value::Int(_)) => {
                let a = as_f64(&lhs);
                let b = as_f64(&rhs);
                return float_binop(op, a, b);
            }
            _ => {}
        }
        match (op, lhs, rhs) {
            (Add, Value::Str(a), Value::Str(b)) => {
                self.ledger.ensure_capacity((a.len() + b.len()) as u64)?;
                let mut bytes = Vec::with_capacity(a.len() + b.len());
                bytes.extend_from_slice(a.as_bytes());
                bytes.extend_from_slice(b.as_bytes());
                Ok(Value::Str(GuestStr::from_vec(&self.ledger, bytes)?))
            }
            (Add, Value::List(a), Value::List(b)) => {
                let mut items = a.snapshot();
                items.extend(b.snapshot());
                Ok(Value::List(GuestList::new(&self.ledger, items)?))
            }
            (Mul, Value::Str(s), Value::Int(n)) | (Mul, Value::Int(n), Value::Str(s)) => {
                let count = n.max(0) as u64;
                let total = (s.len() as u64).saturating_mul(count);
                self.ledger.ensure_capacity(total)?;
                let mut bytes = Vec::with_capacity(total as usize);
                for _ in 0..count {
                    bytes.extend_from_slice(s.as_bytes());
                }
                Ok(Value::Str(GuestStr::from_vec(&self.ledger, bytes)?))
            }
            (Mul, Value::List(l), Value::Int(n)) | (Mul, Value::Int(n), Value::List(l)) => {
                let count = n.max(0) as u64;
                let total = (l.len() as u64).saturating_mul(count);
                self.ledger.ensure_capacity(total)?;
                let snapshot = l.snapshot();
                let mut items = Vec::with_capacity(total as usize);
                for _ in 0..count {
                    items.extend(snapshot.iter().cloned());
                }
                Ok(Value::List(GuestList::new(&self.ledger, items)?))
            }
            (op, lhs, rhs) => Err(type_error(format!(
                "unsupported operand types for {}: '{}' and '{}'",
                op.symbol(),
                lhs.type_name(),
                rhs.type_name()
            ))
            .into()),
        }
    }

    fn apply_compare(&mut self, op: CmpOp, lhs: &Value, rhs: &Value) -> EvalResult<Value> {
        use std::cmp::Ordering;
        let result = match op {
            CmpOp::Eq => lhs.guest_eq(rhs)?,
            CmpOp::Ne => !lhs.guest_eq(rhs)?,
            CmpOp::Lt => matches!(lhs.guest_cmp(rhs)?, Some(Ordering::Less)),
            CmpOp::Le => matches!(
                lhs.guest_cmp(rhs)?,
                Some(Ordering::Less | Ordering::Equal)
            ),
            CmpOp::Gt => matches!(lhs.guest_cmp(rhs)?, Some(Ordering::Greater)),
            CmpOp::Ge => matches!(
                lhs.guest_cmp(rhs)?,
                Some(Ordering::Greater | Ordering::Equal)
            ),
        };
        Ok(Value::Bool(result))
    }
}

pub(crate) fn expect_int(value: &Value, what: &str) -> Result<i64, GuestError> {
    match value {
        Value::Int(i) => Ok(*i),
        other => Err(type_error(format!(
            "{what} must be an integer, not '{}'",
            other.type_name()
        ))),
    }
}

fn as_f64(value: &Value) -> f64 {
    match value {
        Value::Int(i) => *i as f64,
        Value::Float(f) => *f,
        _ => unreachable!("caller checked numeric"),
    }
}

fn zero_division() -> Stop {
    GuestError::new(GuestErrorKind::ZeroDivisionError, "division by zero").into()
}

fn int_binop(op: BinOp, a: i64, b: i64) -> EvalResult<Value> {
    use BinOp::*;
    match op {
        Add => a
            .checked_add(b)
            .map(Value::Int)
            .ok_or_else(|| overflow_error("integer addition overflows 64-bit range").into()),
        Sub => a
            .checked_sub(b)
            .map(Value::Int)
            .ok_or_else(|| overflow_error("integer subtraction overflows 64-bit range").into()),
        Mul => a
            .checked_mul(b)
            .map(Value::Int)
            .ok_or_else(|| overflow_error("integer multiplication overflows 64-bit range").into()),
        Div => {
            if b == 0 {
                return Err(zero_division());
            }
            Ok(Value::Float(a as f64 / b as f64))
        }
        FloorDiv => {
            if b == 0 {
                return Err(zero_division());
            }
            let Some(quotient) = a.checked_div(b) else {
                return Err(overflow_error("integer division overflows 64-bit range").into());
            };
            // Floor semantics: truncation rounds toward zero, correct it
            // when the signs disagree and there is a remainder.
            let adjusted = if (a % b != 0) && ((a < 0) != (b < 0)) {
                quotient - 1
            } else {
                quotient
            };
            Ok(Value::Int(adjusted))
        }
        Mod => {
            if b == 0 {
                return Err(zero_division());
            }
            if a == i64::MIN && b == -1 {
                return Ok(Value::Int(0));
            }
            let mut r = a % b;
            if r != 0 && ((r < 0) != (b < 0)) {
                r += b;
            }
            Ok(Value::Int(r))
        }
        Pow => int_pow(a, b),
    }
}

fn int_pow(base: i64, exp: i64) -> EvalResult<Value> {
    if exp < 0 {
        if base == 0 {
            return Err(zero_division());
        }
        return Ok(Value::Float((base as f64).powf(exp as f64)));
    }
    match base {
        0 => Ok(Value::Int(i64::from(exp == 0))),
        1 => Ok(Value::Int(1)),
        -1 => Ok(Value::Int(if exp % 2 == 0 { 1 } else { -1 })),
        _ => {
            let exp: u32 = exp
                .try_into()
                .map_err(|_| overflow_error("integer power overflows 64-bit range"))?;
            base.checked_pow(exp)
                .map(Value::Int)
                .ok_or_else(|| overflow_error("integer power overflows 64-bit range").into())
        }
    }
}

fn float_binop(op: BinOp, a: f64, b: f64) -> EvalResult<Value> {
    use BinOp::*;
    let result = match op {
        Add => a + b,
        Sub => a - b,
        Mul => a * b,
        Div => {
            if b == 0.0 {
                return Err(zero_division());
            }
            a / b
        }
        FloorDiv => {
            if b == 0.0 {
                return Err(zero_division());
            }
            (a / b).floor()
        }
        Mod => {
            if b == 0.0 {
                return Err(zero_division());
            }
            let mut r = a % b;
            if r != 0.0 && ((r < 0.0) != (b < 0.0)) {
                r += b;
            }
            r
        }
        Pow => a.powf(b),
    };
    Ok(Value::Float(result))
}

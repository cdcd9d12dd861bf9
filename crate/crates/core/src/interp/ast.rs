//! Syntax tree for the guest language, plus the canonical re-serializer.
//!
//! `Program::to_source` renders a canonical form (4-space indents, one
//! space around binary operators) that re-parses to a structurally
//! identical tree; tests rely on serialize → parse → serialize being a
//! fixed point.

use std::fmt::Write as _;
use std::rc::Rc;

#[derive(Debug, Clone)]
pub struct Program {
    pub source_name: String,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone)]
pub struct Stmt {
    pub kind: StmtKind,
    pub line: u32,
}

#[derive(Debug, Clone)]
pub enum StmtKind {
    Expr(Expr),
    Assign { target: Target, value: Expr },
    Def {
        name: Rc<str>,
        params: Vec<Rc<str>>,
        body: Rc<[Stmt]>,
    },
    Return(Option<Expr>),
    If {
        /// `(condition, body)` for the `if` and each `elif`.
        arms: Vec<(Expr, Vec<Stmt>)>,
        orelse: Option<Vec<Stmt>>,
    },
    While { cond: Expr, body: Vec<Stmt> },
    For {
        var: Rc<str>,
        iterable: Expr,
        body: Vec<Stmt>,
    },
    Import { module: Rc<str> },
    Global { names: Vec<Rc<str>> },
    Pass,
}

#[derive(Debug, Clone)]
pub enum Target {
    Name(Rc<str>),
    Index { base: Expr, index: Expr },
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub line: u32,
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Int(i64),
    Float(f64),
    Str(Rc<[u8]>),
    Bool(bool),
    NoneLit,
    Name(Rc<str>),
    List(Vec<Expr>),
    MapLit(Vec<(Expr, Expr)>),
    Unary { op: UnaryOp, operand: Box<Expr> },
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    BoolOp {
        op: BoolOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Compare {
        op: CmpOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call { callee: Box<Expr>, args: Vec<Expr> },
    Index { base: Box<Expr>, index: Box<Expr> },
    Slice {
        base: Box<Expr>,
        start: Option<Box<Expr>>,
        stop: Option<Box<Expr>>,
    },
    /// Only reachable as the callee of a call; the parser rejects bare
    /// attribute access.
    Attribute { base: Box<Expr>, attr: Rc<str> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Pos,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    FloorDiv,
    Mod,
    Pow,
}

impl BinOp {
    pub fn symbol(&self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::FloorDiv => "//",
            BinOp::Mod => "%",
            BinOp::Pow => "**",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(&self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

impl Program {
    /// Canonical source form.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        for stmt in &self.body {
            write_stmt(&mut out, stmt, 0);
        }
        out
    }
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("    ");
    }
}

fn write_block(out: &mut String, body: &[Stmt], level: usize) {
    if body.is_empty() {
        indent(out, level);
        out.push_str("pass\n");
        return;
    }
    for stmt in body {
        write_stmt(out, stmt, level);
    }
}

fn write_stmt(out: &mut String, stmt: &Stmt, level: usize) {
    indent(out, level);
    match &stmt.kind {
        StmtKind::Expr(e) => {
            write_expr(out, e);
            out.push('\n');
        }
        StmtKind::Assign { target, value } => {
            match target {
                Target::Name(name) => out.push_str(name),
                Target::Index { base, index } => {
                    write_expr(out, base);
                    out.push('[');
                    write_expr(out, index);
                    out.push(']');
                }
            }
            out.push_str(" = ");
            write_expr(out, value);
            out.push('\n');
        }
        StmtKind::Def { name, params, body } => {
            let _ = write!(out, "def {name}(");
            for (i, p) in params.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(p);
            }
            out.push_str("):\n");
            write_block(out, body, level + 1);
        }
        StmtKind::Return(value) => {
            out.push_str("return");
            if let Some(v) = value {
                out.push(' ');
                write_expr(out, v);
            }
            out.push('\n');
        }
        StmtKind::If { arms, orelse } => {
            for (i, (cond, body)) in arms.iter().enumerate() {
                if i > 0 {
                    indent(out, level);
                }
                out.push_str(if i == 0 { "if " } else { "elif " });
                write_expr(out, cond);
                out.push_str(":\n");
                write_block(out, body, level + 1);
            }
            if let Some(body) = orelse {
                indent(out, level);
                out.push_str("else:\n");
                write_block(out, body, level + 1);
            }
        }
        StmtKind::While { cond, body } => {
            out.push_str("while ");
            write_expr(out, cond);
            out.push_str(":\n");
            write_block(out, body, level + 1);
        }
        StmtKind::For {
            var,
            iterable,
            body,
        } => {
            let _ = write!(out, "for {var} in ");
            write_expr(out, iterable);
            out.push_str(":\n");
            write_block(out, body, level + 1);
        }
        StmtKind::Import { module } => {
            let _ = writeln!(out, "import {module}");
        }
        StmtKind::Global { names } => {
            out.push_str("global ");
            for (i, n) in names.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(n);
            }
            out.push('\n');
        }
        StmtKind::Pass => out.push_str("pass\n"),
    }
}

/// Every nested expression is parenthesized, which sidesteps precedence
/// reconstruction entirely and still reparses to the same tree.
fn write_expr(out: &mut String, expr: &Expr) {
    match &expr.kind {
        ExprKind::Int(v) => {
            let _ = write!(out, "{v}");
        }
        ExprKind::Float(v) => {
            let text = format!("{v}");
            out.push_str(&text);
            if !text.contains('.') && !text.contains("inf") && !text.contains("NaN") {
                out.push_str(".0");
            }
        }
        ExprKind::Str(bytes) => {
            out.push('"');
            for &b in bytes.iter() {
                match b {
                    b'\\' => out.push_str("\\\\"),
                    b'"' => out.push_str("\\\""),
                    b'\n' => out.push_str("\\n"),
                    b'\t' => out.push_str("\\t"),
                    b'\r' => out.push_str("\\r"),
                    0x20..=0x7e => out.push(b as char),
                    other => {
                        let _ = write!(out, "\\x{other:02x}");
                    }
                }
            }
            out.push('"');
        }
        ExprKind::Bool(true) => out.push_str("True"),
        ExprKind::Bool(false) => out.push_str("False"),
        ExprKind::NoneLit => out.push_str("None"),
        ExprKind::Name(name) => out.push_str(name),
        ExprKind::List(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, item);
            }
            out.push(']');
        }
        ExprKind::MapLit(pairs) => {
            out.push('{');
            for (i, (k, v)) in pairs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, k);
                out.push_str(": ");
                write_expr(out, v);
            }
            out.push('}');
        }
        ExprKind::Unary { op, operand } => {
            out.push('(');
            out.push_str(match op {
                UnaryOp::Neg => "-",
                UnaryOp::Pos => "+",
                UnaryOp::Not => "not ",
            });
            write_expr(out, operand);
            out.push(')');
        }
        ExprKind::Binary { op, lhs, rhs } => {
            out.push('(');
            write_expr(out, lhs);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, rhs);
            out.push(')');
        }
        ExprKind::BoolOp { op, lhs, rhs } => {
            out.push('(');
            write_expr(out, lhs);
            out.push_str(match op {
                BoolOp::And => " and ",
                BoolOp::Or => " or ",
            });
            write_expr(out, rhs);
            out.push(')');
        }
        ExprKind::Compare { op, lhs, rhs } => {
            out.push('(');
            write_expr(out, lhs);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, rhs);
            out.push(')');
        }
        ExprKind::Call { callee, args } => {
            write_expr(out, callee);
            out.push('(');
            for (i, arg) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, arg);
            }
            out.push(')');
        }
        ExprKind::Index { base, index } => {
            write_expr(out, base);
            out.push('[');
            write_expr(out, index);
            out.push(']');
        }
        ExprKind::Slice { base, start, stop } => {
            write_expr(out, base);
            out.push('[');
            if let Some(s) = start {
                write_expr(out, s);
            }
            out.push(':');
            if let Some(s) = stop {
                write_expr(out, s);
            }
            out.push(']');
        }
        ExprKind::Attribute { base, attr } => {
            write_expr(out, base);
            out.push('.');
            out.push_str(attr);
        }
    }
}

//! The analysis subject language: a small imperative IR with functions,
//! basic blocks, and explicit memory operations, parsed from a line-based
//! text form.
//!
//! Grammar (one instruction per line, `#` comments):
//!   `fn NAME(param:TYPE, ...) {`   TYPE ∈ {int, addr}
//!   `BLOCK:`
//!   `x = const N` | `x = copy y` | `x = add|sub|mul|shl y z`
//!   `x = cmp lt|le|eq y z` | `br x THEN ELSE` | `jmp BLOCK`
//!   `p = alloc x` | `free p` | `x = load p i` | `store p i x`
//!   `x = call NAME(args)` | `call NAME(args)` | `ret [x]` | `}`
//!
//! A function body may open with instructions directly (an implicit
//! `entry:` block). Every block must end in `br`/`jmp`/`ret`.

use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct IrSyntaxError {
    pub line: u32,
    pub message: String,
}

fn err(line: u32, message: impl Into<String>) -> IrSyntaxError {
    IrSyntaxError {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamType {
    Int,
    Addr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Var(String),
    Const(i64),
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Var(name) => f.write_str(name),
            Operand::Const(value) => write!(f, "{value}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinIrOp {
    Add,
    Sub,
    Mul,
    Shl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpIrOp {
    Lt,
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstrKind {
    Const {
        dest: String,
        value: i64,
    },
    Copy {
        dest: String,
        src: Operand,
    },
    Bin {
        op: BinIrOp,
        dest: String,
        lhs: Operand,
        rhs: Operand,
    },
    Cmp {
        op: CmpIrOp,
        dest: String,
        lhs: Operand,
        rhs: Operand,
    },
    Br {
        cond: Operand,
        then_label: String,
        else_label: String,
    },
    Jmp {
        label: String,
    },
    Alloc {
        dest: String,
        size: Operand,
    },
    Free {
        addr: Operand,
    },
    Load {
        dest: String,
        addr: Operand,
        index: Operand,
    },
    Store {
        addr: Operand,
        index: Operand,
        value: Operand,
    },
    Call {
        dest: Option<String>,
        callee: String,
        args: Vec<Operand>,
    },
    Ret {
        value: Option<Operand>,
    },
}

impl InstrKind {
    pub fn is_terminator(&self) -> bool {
        matches!(
            self,
            InstrKind::Br { .. } | InstrKind::Jmp { .. } | InstrKind::Ret { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instr {
    pub kind: InstrKind,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub label: String,
    pub instrs: Vec<Instr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Function {
    pub name: String,
    pub params: Vec<(String, ParamType)>,
    /// blocks[0] is the entry block.
    pub blocks: Vec<Block>,
    pub block_index: HashMap<String, usize>,
    pub line: u32,
}

impl Function {
    /// Flat instruction numbering used by diagnostics.
    pub fn instruction(&self, index: usize) -> Option<&Instr> {
        self.blocks.iter().flat_map(|b| &b.instrs).nth(index)
    }

    pub fn instruction_count(&self) -> usize {
        self.blocks.iter().map(|b| b.instrs.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IrProgram {
    pub functions: Vec<Function>,
}

impl IrProgram {
    pub fn function(&self, name: &str) -> Option<&Function> {
        self.functions.iter().find(|f| f.name == name)
    }
}

/// Splits one line into word/punctuation tokens.
fn tokenize_line(line: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in line.chars() {
        match ch {
            '#' => break,
            '(' | ')' | ',' | ':' | '{' | '}' | '=' => {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
                tokens.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
            }
            c => current.push(c),
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

fn is_identifier(token: &str) -> bool {
    let mut chars = token.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_operand(token: &str, line: u32) -> Result<Operand, IrSyntaxError> {
    if is_identifier(token) {
        return Ok(Operand::Var(token.to_string()));
    }
    token
        .parse::<i64>()
        .map(Operand::Const)
        .map_err(|_| err(line, format!("expected a variable or integer, got `{token}`")))
}

pub fn parse_ir(source: &str) -> Result<IrProgram, IrSyntaxError> {
    let mut program = IrProgram::default();
    let mut state = State::TopLevel;

    for (idx, raw_line) in source.lines().enumerate() {
        let line_no = (idx + 1) as u32;
        let mut tokens = tokenize_line(raw_line);
        if tokens.is_empty() {
            continue;
        }
        loop {
            match &mut state {
                State::TopLevel => {
                    if tokens.first().map(String::as_str) != Some("fn") {
                        return Err(err(line_no, "expected `fn NAME(...) {`"));
                    }
                    let (func, rest) = parse_header(&tokens, line_no)?;
                    state = State::InFunction {
                        func,
                        current: None,
                    };
                    tokens = rest;
                    if tokens.is_empty() {
                        break;
                    }
                }
                State::InFunction { func, current } => {
                    // `}` closes the function; it may share a line with an
                    // instruction (`fn main() { ret }`).
                    if tokens.first().map(String::as_str) == Some("}") {
                        if tokens.len() > 1 {
                            return Err(err(line_no, "unexpected tokens after `}`"));
                        }
                        let done = close_function(
                            std::mem::replace(
                                func,
                                Function {
                                    name: String::new(),
                                    params: Vec::new(),
                                    blocks: Vec::new(),
                                    block_index: HashMap::new(),
                                    line: 0,
                                },
                            ),
                            current.take(),
                            line_no,
                        )?;
                        if program.functions.iter().any(|f| f.name == done.name) {
                            return Err(err(line_no, format!("duplicate function `{}`", done.name)));
                        }
                        program.functions.push(done);
                        state = State::TopLevel;
                        break;
                    }
                    // Label line: `NAME:`
                    if tokens.len() == 2
                        && tokens[1] == ":"
                        && is_identifier(&tokens[0])
                    {
                        if let Some(block) = current.take() {
                            finish_block(func, block, line_no)?;
                        }
                        if func.block_index.contains_key(&tokens[0]) {
                            return Err(err(line_no, format!("duplicate label `{}`", tokens[0])));
                        }
                        *current = Some(Block {
                            label: tokens[0].clone(),
                            instrs: Vec::new(),
                        });
                        break;
                    }
                    // Instruction: possibly followed by `}` on the same line.
                    let mut closing = false;
                    if tokens.last().map(String::as_str) == Some("}") {
                        tokens.pop();
                        closing = true;
                    }
                    if !tokens.is_empty() {
                        let instr = parse_instruction(&tokens, line_no)?;
                        let block = current.get_or_insert_with(|| Block {
                            label: "entry".to_string(),
                            instrs: Vec::new(),
                        });
                        if block
                            .instrs
                            .last()
                            .is_some_and(|i| i.kind.is_terminator())
                        {
                            return Err(err(
                                line_no,
                                "instruction after block terminator (add a label)",
                            ));
                        }
                        block.instrs.push(Instr {
                            kind: instr,
                            line: line_no,
                        });
                    }
                    if closing {
                        tokens = vec!["}".to_string()];
                        continue;
                    }
                    break;
                }
            }
        }
    }

    match state {
        State::TopLevel => {}
        State::InFunction { func, .. } => {
            return Err(err(
                func.line,
                format!("function `{}` is missing its closing brace", func.name),
            ))
        }
    }
    Ok(program)
}

enum State {
    TopLevel,
    InFunction {
        func: Function,
        current: Option<Block>,
    },
}

/// Parses `fn NAME(p:TYPE, ...) {`; returns the open function plus any
/// tokens trailing the brace (for single-line functions).
fn parse_header(
    tokens: &[String],
    line: u32,
) -> Result<(Function, Vec<String>), IrSyntaxError> {
    let mut pos = 1;
    let name = tokens
        .get(pos)
        .filter(|t| is_identifier(t))
        .ok_or_else(|| err(line, "expected a function name after `fn`"))?
        .clone();
    pos += 1;
    if tokens.get(pos).map(String::as_str) != Some("(") {
        return Err(err(line, "expected `(` after the function name"));
    }
    pos += 1;
    let mut params = Vec::new();
    if tokens.get(pos).map(String::as_str) != Some(")") {
        loop {
            let pname = tokens
                .get(pos)
                .filter(|t| is_identifier(t))
                .ok_or_else(|| err(line, "expected a parameter name"))?
                .clone();
            pos += 1;
            if tokens.get(pos).map(String::as_str) != Some(":") {
                return Err(err(line, "expected `:` after the parameter name"));
            }
            pos += 1;
            let ptype = match tokens.get(pos).map(String::as_str) {
                Some("int") => ParamType::Int,
                Some("addr") => ParamType::Addr,
                other => {
                    return Err(err(
                        line,
                        format!("expected int or addr, got `{}`", other.unwrap_or("")),
                    ))
                }
            };
            pos += 1;
            if params.iter().any(|(n, _)| n == &pname) {
                return Err(err(line, format!("duplicate parameter `{pname}`")));
            }
            params.push((pname, ptype));
            match tokens.get(pos).map(String::as_str) {
                Some(",") => pos += 1,
                Some(")") => break,
                _ => return Err(err(line, "expected `,` or `)` in the parameter list")),
            }
        }
    }
    pos += 1; // )
    if tokens.get(pos).map(String::as_str) != Some("{") {
        return Err(err(line, "expected `{` to open the function body"));
    }
    pos += 1;
    Ok((
        Function {
            name,
            params,
            blocks: Vec::new(),
            block_index: HashMap::new(),
            line,
        },
        tokens[pos..].to_vec(),
    ))
}

fn finish_block(func: &mut Function, block: Block, line: u32) -> Result<(), IrSyntaxError> {
    if block
        .instrs
        .last()
        .is_none_or(|i| !i.kind.is_terminator())
    {
        return Err(err(
            line,
            format!("block `{}` must end with br, jmp, or ret", block.label),
        ));
    }
    func.block_index
        .insert(block.label.clone(), func.blocks.len());
    func.blocks.push(block);
    Ok(())
}

fn close_function(
    mut func: Function,
    current: Option<Block>,
    line: u32,
) -> Result<Function, IrSyntaxError> {
    if let Some(block) = current {
        finish_block(&mut func, block, line)?;
    }
    if func.blocks.is_empty() {
        return Err(err(line, format!("function `{}` has no blocks", func.name)));
    }
    // Branch targets must exist.
    for block in &func.blocks {
        for instr in &block.instrs {
            let targets: Vec<&String> = match &instr.kind {
                InstrKind::Br {
                    then_label,
                    else_label,
                    ..
                } => vec![then_label, else_label],
                InstrKind::Jmp { label } => vec![label],
                _ => continue,
            };
            for target in targets {
                if !func.block_index.contains_key(target) {
                    return Err(err(
                        instr.line,
                        format!("branch target `{target}` does not exist"),
                    ));
                }
            }
        }
    }
    Ok(func)
}

fn parse_instruction(tokens: &[String], line: u32) -> Result<InstrKind, IrSyntaxError> {
    // Destination form: `x = ...`
    if tokens.len() >= 2 && tokens[1] == "=" {
        let dest = tokens[0].clone();
        if !is_identifier(&dest) {
            return Err(err(line, format!("`{dest}` is not a valid variable name")));
        }
        let rest = &tokens[2..];
        let op = rest
            .first()
            .ok_or_else(|| err(line, "missing operation after `=`"))?
            .as_str();
        return match op {
            "const" => {
                let [value] = expect_operands::<1>(&rest[1..], line, "const")?;
                match value {
                    Operand::Const(v) => Ok(InstrKind::Const { dest, value: v }),
                    Operand::Var(_) => Err(err(line, "const takes an integer literal")),
                }
            }
            "copy" => {
                let [src] = expect_operands::<1>(&rest[1..], line, "copy")?;
                Ok(InstrKind::Copy { dest, src })
            }
            "add" | "sub" | "mul" | "shl" => {
                let [lhs, rhs] = expect_operands::<2>(&rest[1..], line, op)?;
                let op = match op {
                    "add" => BinIrOp::Add,
                    "sub" => BinIrOp::Sub,
                    "mul" => BinIrOp::Mul,
                    _ => BinIrOp::Shl,
                };
                Ok(InstrKind::Bin { op, dest, lhs, rhs })
            }
            "cmp" => {
                let cmp_op = match rest.get(1).map(String::as_str) {
                    Some("lt") => CmpIrOp::Lt,
                    Some("le") => CmpIrOp::Le,
                    Some("eq") => CmpIrOp::Eq,
                    other => {
                        return Err(err(
                            line,
                            format!("unknown comparison `{}`", other.unwrap_or("")),
                        ))
                    }
                };
                let [lhs, rhs] = expect_operands::<2>(&rest[2..], line, "cmp")?;
                Ok(InstrKind::Cmp {
                    op: cmp_op,
                    dest,
                    lhs,
                    rhs,
                })
            }
            "alloc" => {
                let [size] = expect_operands::<1>(&rest[1..], line, "alloc")?;
                Ok(InstrKind::Alloc { dest, size })
            }
            "load" => {
                let [addr, index] = expect_operands::<2>(&rest[1..], line, "load")?;
                Ok(InstrKind::Load { dest, addr, index })
            }
            "call" => parse_call(Some(dest), &rest[1..], line),
            other => Err(err(line, format!("unknown opcode `{other}`"))),
        };
    }

    let op = tokens[0].as_str();
    match op {
        "br" => {
            if tokens.len() != 4 {
                return Err(err(line, "br takes a condition and two labels"));
            }
            let cond = parse_operand(&tokens[1], line)?;
            Ok(InstrKind::Br {
                cond,
                then_label: tokens[2].clone(),
                else_label: tokens[3].clone(),
            })
        }
        "jmp" => {
            if tokens.len() != 2 {
                return Err(err(line, "jmp takes one label"));
            }
            Ok(InstrKind::Jmp {
                label: tokens[1].clone(),
            })
        }
        "free" => {
            let [addr] = expect_operands::<1>(&tokens[1..], line, "free")?;
            Ok(InstrKind::Free { addr })
        }
        "store" => {
            let [addr, index, value] = expect_operands::<3>(&tokens[1..], line, "store")?;
            Ok(InstrKind::Store { addr, index, value })
        }
        "call" => parse_call(None, &tokens[1..], line),
        "ret" => match tokens.len() {
            1 => Ok(InstrKind::Ret { value: None }),
            2 => Ok(InstrKind::Ret {
                value: Some(parse_operand(&tokens[1], line)?),
            }),
            _ => Err(err(line, "ret takes at most one operand")),
        },
        other => Err(err(line, format!("unknown opcode `{other}`"))),
    }
}

fn parse_call(
    dest: Option<String>,
    tokens: &[String],
    line: u32,
) -> Result<InstrKind, IrSyntaxError> {
    let callee = tokens
        .first()
        .filter(|t| is_identifier(t))
        .ok_or_else(|| err(line, "expected a callee name"))?
        .clone();
    if tokens.get(1).map(String::as_str) != Some("(") {
        return Err(err(line, "expected `(` after the callee name"));
    }
    if tokens.last().map(String::as_str) != Some(")") {
        return Err(err(line, "expected `)` to close the call"));
    }
    let inner = &tokens[2..tokens.len() - 1];
    let mut args = Vec::new();
    let mut expecting_operand = true;
    for token in inner {
        if expecting_operand {
            args.push(parse_operand(token, line)?);
            expecting_operand = false;
        } else if token == "," {
            expecting_operand = true;
        } else {
            return Err(err(line, "expected `,` between call arguments"));
        }
    }
    if expecting_operand && !args.is_empty() {
        return Err(err(line, "trailing comma in call arguments"));
    }
    Ok(InstrKind::Call { dest, callee, args })
}

fn expect_operands<const N: usize>(
    tokens: &[String],
    line: u32,
    what: &str,
) -> Result<[Operand; N], IrSyntaxError> {
    if tokens.len() != N {
        return Err(err(
            line,
            format!("{what} takes {N} operand(s), got {}", tokens.len()),
        ));
    }
    let mut operands = Vec::with_capacity(N);
    for token in tokens {
        operands.push(parse_operand(token, line)?);
    }
    Ok(operands.try_into().expect("length checked"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_single_line_function() {
        let program = parse_ir("fn main() { ret }").unwrap();
        assert_eq!(program.functions.len(), 1);
        let main = &program.functions[0];
        assert_eq!(main.blocks.len(), 1);
        assert_eq!(main.blocks[0].label, "entry");
        assert_eq!(main.blocks[0].instrs.len(), 1);
    }

    #[test]
    fn unknown_opcode_reports_its_line() {
        let source = "fn f() {\n  x = const 1\n  frobnicate x\n  ret\n}\n";
        let error = parse_ir(source).unwrap_err();
        assert_eq!(error.line, 3);
        assert!(error.message.contains("frobnicate"));
    }

    #[test]
    fn blocks_and_branches() {
        let source = "\
fn f(k:int) {
entry:
  zero = const 0
  c = cmp lt k zero
  br c neg pos
neg:
  ret
pos:
  one = const 1
  x = add k one
  ret x
}
";
        let program = parse_ir(source).unwrap();
        let f = &program.functions[0];
        assert_eq!(f.blocks.len(), 3);
        assert_eq!(f.params, vec![("k".to_string(), ParamType::Int)]);
        assert_eq!(f.instruction_count(), 7);
    }

    #[test]
    fn missing_terminator_is_rejected() {
        let source = "fn f() {\nentry:\n  x = const 1\nnext:\n  ret\n}\n";
        let error = parse_ir(source).unwrap_err();
        assert!(error.message.contains("must end with"));
    }

    #[test]
    fn bad_branch_target_is_rejected() {
        let source = "fn f() {\n  x = const 1\n  jmp nowhere\n}\n";
        let error = parse_ir(source).unwrap_err();
        assert!(error.message.contains("nowhere"));
    }

    #[test]
    fn calls_parse_with_and_without_dest() {
        let source = "\
fn f(p:addr) {
  x = call probe(p, 3)
  call log(x)
  ret x
}
";
        let program = parse_ir(source).unwrap();
        let instrs = &program.functions[0].blocks[0].instrs;
        assert!(matches!(
            &instrs[0].kind,
            InstrKind::Call { dest: Some(d), args, .. } if d == "x" && args.len() == 2
        ));
        assert!(matches!(
            &instrs[1].kind,
            InstrKind::Call { dest: None, .. }
        ));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let source = "# header\n\nfn f() {  # open\n  ret  # done\n}\n";
        assert!(parse_ir(source).is_ok());
    }
}

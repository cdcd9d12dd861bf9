//! Recursive-descent parser producing [`Program`] trees.
//!
//! Anything outside the supported subset is a [`SyntaxError`] naming the
//! construct; there is no partial acceptance. Expression and block nesting
//! are depth-capped so adversarial input cannot exhaust the host stack.

use std::rc::Rc;

use crate::interp::ast::*;
use crate::interp::lexer::{tokenize, Keyword, Op, Spanned, SyntaxError, Token};

const MAX_EXPR_DEPTH: usize = 256;
const MAX_BLOCK_DEPTH: usize = 200;

/// Parses a whole guest program.
pub fn parse(source: &str, source_name: &str) -> Result<Program, SyntaxError> {
    let tokens = tokenize(source).map_err(|e| e.with_source(source_name))?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        expr_depth: 0,
        block_depth: 0,
        def_depth: 0,
    };
    let mut body = Vec::new();
    while !parser.at(&Token::Eof) {
        body.push(parser.statement().map_err(|e| e.with_source(source_name))?);
    }
    Ok(Program {
        source_name: source_name.to_string(),
        body,
    })
}

/// Parses a single expression (plus end of input); the expression-level
/// evaluation API uses this.
pub fn parse_expression(source: &str) -> Result<Expr, SyntaxError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        expr_depth: 0,
        block_depth: 0,
        def_depth: 0,
    };
    let expr = parser.expression()?;
    parser.expect_newline()?;
    if !parser.at(&Token::Eof) {
        return Err(parser.unexpected("a single expression"));
    }
    Ok(expr)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    expr_depth: usize,
    block_depth: usize,
    def_depth: usize,
}

impl Parser {
    fn current(&self) -> &Spanned {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn at(&self, token: &Token) -> bool {
        &self.current().token == token
    }

    fn at_op(&self, op: Op) -> bool {
        matches!(&self.current().token, Token::Op(o) if *o == op)
    }

    fn at_keyword(&self, kw: Keyword) -> bool {
        matches!(&self.current().token, Token::Keyword(k) if *k == kw)
    }

    fn advance(&mut self) -> Spanned {
        let spanned = self.current().clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        spanned
    }

    fn error_here(&self, message: impl Into<String>) -> SyntaxError {
        let spanned = self.current();
        SyntaxError::new(spanned.line, spanned.col, message)
    }

    fn unexpected(&self, expected: &str) -> SyntaxError {
        if let Token::Keyword(Keyword::Unsupported(kw)) = &self.current().token {
            return self.error_here(format!(
                "'{}' is not part of the supported language subset",
                kw.name()
            ));
        }
        self.error_here(format!("expected {expected}, found {}", self.current().token))
    }

    fn expect_op(&mut self, op: Op, what: &str) -> Result<(), SyntaxError> {
        if self.at_op(op) {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn expect_newline(&mut self) -> Result<(), SyntaxError> {
        if self.at(&Token::Newline) {
            self.advance();
            Ok(())
        } else if self.at(&Token::Eof) {
            Ok(())
        } else {
            Err(self.unexpected("end of line"))
        }
    }

    fn name(&mut self, what: &str) -> Result<Rc<str>, SyntaxError> {
        match &self.current().token {
            Token::Name(n) => {
                let name: Rc<str> = Rc::from(n.as_str());
                self.advance();
                Ok(name)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    // -- statements ---------------------------------------------------------

    fn statement(&mut self) -> Result<Stmt, SyntaxError> {
        let line = self.current().line;
        match &self.current().token {
            Token::Keyword(Keyword::Def) => self.def_statement(line),
            Token::Keyword(Keyword::If) => self.if_statement(line),
            Token::Keyword(Keyword::While) => self.while_statement(line),
            Token::Keyword(Keyword::For) => self.for_statement(line),
            Token::Keyword(Keyword::Return) => {
                if self.def_depth == 0 {
                    return Err(self.error_here("'return' outside a function"));
                }
                self.advance();
                let value = if self.at(&Token::Newline) || self.at(&Token::Eof) {
                    None
                } else {
                    Some(self.expression()?)
                };
                self.expect_newline()?;
                Ok(Stmt {
                    kind: StmtKind::Return(value),
                    line,
                })
            }
            Token::Keyword(Keyword::Import) => {
                self.advance();
                let module = self.name("a module name")?;
                if self.at_op(Op::Dot) || self.at_keyword(Keyword::Unsupported(
                    crate::interp::lexer::UnsupportedKeyword::As,
                )) {
                    return Err(self.error_here("only plain `import name` is supported"));
                }
                self.expect_newline()?;
                Ok(Stmt {
                    kind: StmtKind::Import { module },
                    line,
                })
            }
            Token::Keyword(Keyword::Global) => {
                self.advance();
                let mut names = vec![self.name("a variable name")?];
                while self.at_op(Op::Comma) {
                    self.advance();
                    names.push(self.name("a variable name")?);
                }
                self.expect_newline()?;
                Ok(Stmt {
                    kind: StmtKind::Global { names },
                    line,
                })
            }
            Token::Keyword(Keyword::Pass) => {
                self.advance();
                self.expect_newline()?;
                Ok(Stmt {
                    kind: StmtKind::Pass,
                    line,
                })
            }
            Token::Keyword(Keyword::Unsupported(_)) => Err(self.unexpected("a statement")),
            _ => {
                // Expression statement or assignment.
                let expr = self.expression()?;
                if self.at_op(Op::Assign) {
                    self.advance();
                    let value = self.expression()?;
                    let target = match expr.kind {
                        ExprKind::Name(name) => Target::Name(name),
                        ExprKind::Index { base, index } => Target::Index {
                            base: *base,
                            index: *index,
                        },
                        _ => {
                            return Err(SyntaxError::new(
                                expr.line,
                                1,
                                "cannot assign to this expression",
                            ))
                        }
                    };
                    self.expect_newline()?;
                    Ok(Stmt {
                        kind: StmtKind::Assign { target, value },
                        line,
                    })
                } else {
                    self.expect_newline()?;
                    Ok(Stmt {
                        kind: StmtKind::Expr(expr),
                        line,
                    })
                }
            }
        }
    }

    fn block(&mut self) -> Result<Vec<Stmt>, SyntaxError> {
        self.block_depth += 1;
        if self.block_depth > MAX_BLOCK_DEPTH {
            return Err(self.error_here("block nesting too deep"));
        }
        self.expect_op(Op::Colon, "':'")?;
        if !self.at(&Token::Newline) {
            return Err(self.error_here("the block must start on the next line"));
        }
        self.advance();
        if !self.at(&Token::Indent) {
            return Err(self.unexpected("an indented block"));
        }
        self.advance();
        let mut body = Vec::new();
        while !self.at(&Token::Dedent) && !self.at(&Token::Eof) {
            body.push(self.statement()?);
        }
        if self.at(&Token::Dedent) {
            self.advance();
        }
        self.block_depth -= 1;
        Ok(body)
    }

    fn def_statement(&mut self, line: u32) -> Result<Stmt, SyntaxError> {
        self.advance();
        let name = self.name("a function name")?;
        self.expect_op(Op::LParen, "'('")?;
        let mut params = Vec::new();
        if !self.at_op(Op::RParen) {
            loop {
                params.push(self.name("a parameter name")?);
                if self.at_op(Op::Comma) {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect_op(Op::RParen, "')'")?;
        if params.iter().collect::<std::collections::HashSet<_>>().len() != params.len() {
            return Err(SyntaxError::new(line, 1, "duplicate parameter name"));
        }
        self.def_depth += 1;
        let body = self.block()?;
        self.def_depth -= 1;
        Ok(Stmt {
            kind: StmtKind::Def {
                name,
                params,
                body: body.into(),
            },
            line,
        })
    }

    fn if_statement(&mut self, line: u32) -> Result<Stmt, SyntaxError> {
        self.advance();
        let mut arms = Vec::new();
        let cond = self.expression()?;
        let body = self.block()?;
        arms.push((cond, body));
        let mut orelse = None;
        loop {
            if self.at_keyword(Keyword::Elif) {
                self.advance();
                let cond = self.expression()?;
                let body = self.block()?;
                arms.push((cond, body));
            } else if self.at_keyword(Keyword::Else) {
                self.advance();
                orelse = Some(self.block()?);
                break;
            } else {
                break;
            }
        }
        Ok(Stmt {
            kind: StmtKind::If { arms, orelse },
            line,
        })
    }

    fn while_statement(&mut self, line: u32) -> Result<Stmt, SyntaxError> {
        self.advance();
        let cond = self.expression()?;
        let body = self.block()?;
        Ok(Stmt {
            kind: StmtKind::While { cond, body },
            line,
        })
    }

    fn for_statement(&mut self, line: u32) -> Result<Stmt, SyntaxError> {
        self.advance();
        let var = self.name("a loop variable")?;
        if !self.at_keyword(Keyword::In) {
            return Err(self.unexpected("'in'"));
        }
        self.advance();
        let iterable = self.expression()?;
        let body = self.block()?;
        Ok(Stmt {
            kind: StmtKind::For {
                var,
                iterable,
                body,
            },
            line,
        })
    }

    // -- expressions ---------------------------------------------------------

    fn expression(&mut self) -> Result<Expr, SyntaxError> {
        self.expr_depth += 1;
        if self.expr_depth > MAX_EXPR_DEPTH {
            return Err(self.error_here("expression nesting too deep"));
        }
        let result = self.or_expr();
        self.expr_depth -= 1;
        result
    }

    fn or_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.and_expr()?;
        while self.at_keyword(Keyword::Or) {
            let line = self.advance().line;
            let rhs = self.and_expr()?;
            lhs = Expr {
                kind: ExprKind::BoolOp {
                    op: BoolOp::Or,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                line,
            };
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.not_expr()?;
        while self.at_keyword(Keyword::And) {
            let line = self.advance().line;
            let rhs = self.not_expr()?;
            lhs = Expr {
                kind: ExprKind::BoolOp {
                    op: BoolOp::And,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                line,
            };
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> Result<Expr, SyntaxError> {
        if self.at_keyword(Keyword::Not) {
            let line = self.advance().line;
            self.expr_depth += 1;
            if self.expr_depth > MAX_EXPR_DEPTH {
                return Err(self.error_here("expression nesting too deep"));
            }
            let operand = self.not_expr()?;
            self.expr_depth -= 1;
            return Ok(Expr {
                kind: ExprKind::Unary {
                    op: UnaryOp::Not,
                    operand: Box::new(operand),
                },
                line,
            });
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Expr, SyntaxError> {
        let lhs = self.arith()?;
        let op = match &self.current().token {
            Token::Op(Op::Eq) => Some(CmpOp::Eq),
            Token::Op(Op::Ne) => Some(CmpOp::Ne),
            Token::Op(Op::Lt) => Some(CmpOp::Lt),
            Token::Op(Op::Le) => Some(CmpOp::Le),
            Token::Op(Op::Gt) => Some(CmpOp::Gt),
            Token::Op(Op::Ge) => Some(CmpOp::Ge),
            _ => None,
        };
        let Some(op) = op else {
            return Ok(lhs);
        };
        let line = self.advance().line;
        let rhs = self.arith()?;
        if matches!(
            &self.current().token,
            Token::Op(Op::Eq | Op::Ne | Op::Lt | Op::Le | Op::Gt | Op::Ge)
        ) {
            return Err(self.error_here("chained comparisons are not supported"));
        }
        Ok(Expr {
            kind: ExprKind::Compare {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            },
            line,
        })
    }

    fn arith(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.term()?;
        loop {
            let op = match &self.current().token {
                Token::Op(Op::Plus) => BinOp::Add,
                Token::Op(Op::Minus) => BinOp::Sub,
                _ => break,
            };
            let line = self.advance().line;
            let rhs = self.term()?;
            lhs = Expr {
                kind: ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                line,
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match &self.current().token {
                Token::Op(Op::Star) => BinOp::Mul,
                Token::Op(Op::Slash) => BinOp::Div,
                Token::Op(Op::DoubleSlash) => BinOp::FloorDiv,
                Token::Op(Op::Percent) => BinOp::Mod,
                _ => break,
            };
            let line = self.advance().line;
            let rhs = self.factor()?;
            lhs = Expr {
                kind: ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                line,
            };
        }
        Ok(lhs)
    }

    /// Unary sign; binds looser than `**` on its left, as in `-2**2 == -4`.
    fn factor(&mut self) -> Result<Expr, SyntaxError> {
        match &self.current().token {
            Token::Op(Op::Minus) => {
                let line = self.advance().line;
                self.expr_depth += 1;
                if self.expr_depth > MAX_EXPR_DEPTH {
                    return Err(self.error_here("expression nesting too deep"));
                }
                let operand = self.factor()?;
                self.expr_depth -= 1;
                Ok(Expr {
                    kind: ExprKind::Unary {
                        op: UnaryOp::Neg,
                        operand: Box::new(operand),
                    },
                    line,
                })
            }
            Token::Op(Op::Plus) => {
                let line = self.advance().line;
                self.expr_depth += 1;
                if self.expr_depth > MAX_EXPR_DEPTH {
                    return Err(self.error_here("expression nesting too deep"));
                }
                let operand = self.factor()?;
                self.expr_depth -= 1;
                Ok(Expr {
                    kind: ExprKind::Unary {
                        op: UnaryOp::Pos,
                        operand: Box::new(operand),
                    },
                    line,
                })
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.postfix()?;
        if self.at_op(Op::DoubleStar) {
            let line = self.advance().line;
            // Right-associative; the exponent may carry its own sign.
            let exponent = self.factor()?;
            return Ok(Expr {
                kind: ExprKind::Binary {
                    op: BinOp::Pow,
                    lhs: Box::new(base),
                    rhs: Box::new(exponent),
                },
                line,
            });
        }
        Ok(base)
    }

    fn postfix(&mut self) -> Result<Expr, SyntaxError> {
        let mut expr = self.atom()?;
        loop {
            if self.at_op(Op::LParen) {
                let line = self.advance().line;
                let mut args = Vec::new();
                if !self.at_op(Op::RParen) {
                    loop {
                        args.push(self.expression()?);
                        if self.at_op(Op::Comma) {
                            self.advance();
                        } else {
                            break;
                        }
                    }
                }
                self.expect_op(Op::RParen, "')'")?;
                expr = Expr {
                    kind: ExprKind::Call {
                        callee: Box::new(expr),
                        args,
                    },
                    line,
                };
            } else if self.at_op(Op::LBracket) {
                let line = self.advance().line;
                // Either an index or a slice.
                let start = if self.at_op(Op::Colon) {
                    None
                } else {
                    Some(Box::new(self.expression()?))
                };
                if self.at_op(Op::Colon) {
                    self.advance();
                    if self.at_op(Op::Colon) {
                        return Err(self.error_here("slice steps are not supported"));
                    }
                    let stop = if self.at_op(Op::RBracket) {
                        None
                    } else {
                        Some(Box::new(self.expression()?))
                    };
                    self.expect_op(Op::RBracket, "']'")?;
                    expr = Expr {
                        kind: ExprKind::Slice {
                            base: Box::new(expr),
                            start,
                            stop,
                        },
                        line,
                    };
                } else {
                    self.expect_op(Op::RBracket, "']'")?;
                    let index = start.ok_or_else(|| self.error_here("empty index"))?;
                    expr = Expr {
                        kind: ExprKind::Index {
                            base: Box::new(expr),
                            index,
                        },
                        line,
                    };
                }
            } else if self.at_op(Op::Dot) {
                let line = self.advance().line;
                let attr = self.name("an attribute name")?;
                if !self.at_op(Op::LParen) {
                    return Err(self.error_here(
                        "attribute access is only supported in call position (obj.name(...))",
                    ));
                }
                expr = Expr {
                    kind: ExprKind::Attribute {
                        base: Box::new(expr),
                        attr,
                    },
                    line,
                };
            } else {
                break;
            }
        }
        Ok(expr)
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let spanned = self.current().clone();
        let line = spanned.line;
        match spanned.token {
            Token::Int(v) => {
                self.advance();
                Ok(Expr {
                    kind: ExprKind::Int(v),
                    line,
                })
            }
            Token::Float(v) => {
                self.advance();
                Ok(Expr {
                    kind: ExprKind::Float(v),
                    line,
                })
            }
            Token::Str(bytes) => {
                self.advance();
                Ok(Expr {
                    kind: ExprKind::Str(Rc::from(bytes.as_slice())),
                    line,
                })
            }
            Token::Keyword(Keyword::True) => {
                self.advance();
                Ok(Expr {
                    kind: ExprKind::Bool(true),
                    line,
                })
            }
            Token::Keyword(Keyword::False) => {
                self.advance();
                Ok(Expr {
                    kind: ExprKind::Bool(false),
                    line,
                })
            }
            Token::Keyword(Keyword::None) => {
                self.advance();
                Ok(Expr {
                    kind: ExprKind::NoneLit,
                    line,
                })
            }
            Token::Name(n) => {
                self.advance();
                Ok(Expr {
                    kind: ExprKind::Name(Rc::from(n.as_str())),
                    line,
                })
            }
            Token::Op(Op::LParen) => {
                self.advance();
                let inner = self.expression()?;
                if self.at_op(Op::Comma) {
                    return Err(self.error_here("tuples are not supported"));
                }
                self.expect_op(Op::RParen, "')'")?;
                Ok(inner)
            }
            Token::Op(Op::LBracket) => {
                self.advance();
                let mut items = Vec::new();
                if !self.at_op(Op::RBracket) {
                    loop {
                        items.push(self.expression()?);
                        if self.at_op(Op::Comma) {
                            self.advance();
                            if self.at_op(Op::RBracket) {
                                break; // trailing comma
                            }
                        } else {
                            break;
                        }
                    }
                }
                self.expect_op(Op::RBracket, "']'")?;
                Ok(Expr {
                    kind: ExprKind::List(items),
                    line,
                })
            }
            Token::Op(Op::LBrace) => {
                self.advance();
                let mut pairs = Vec::new();
                if !self.at_op(Op::RBrace) {
                    loop {
                        let key = self.expression()?;
                        self.expect_op(Op::Colon, "':' between key and value")?;
                        let value = self.expression()?;
                        pairs.push((key, value));
                        if self.at_op(Op::Comma) {
                            self.advance();
                            if self.at_op(Op::RBrace) {
                                break;
                            }
                        } else {
                            break;
                        }
                    }
                }
                self.expect_op(Op::RBrace, "'}'")?;
                Ok(Expr {
                    kind: ExprKind::MapLit(pairs),
                    line,
                })
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_program() {
        let program = parse("x = 1 + 2\n", "test").unwrap();
        assert_eq!(program.body.len(), 1);
        assert!(matches!(
            &program.body[0].kind,
            StmtKind::Assign { target: Target::Name(n), .. } if &**n == "x"
        ));
    }

    #[test]
    fn class_is_rejected_with_position() {
        let err = parse("class A: pass\n", "test").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("class"));
    }

    #[test]
    fn other_unsupported_constructs() {
        for src in [
            "try:\n    pass\n",
            "with open() :\n    pass\n",
            "x = lambda: 1\n",
            "yield 3\n",
            "for x in a: pass\n",   // single-line suite
            "a < b < c\n",          // chained comparison
            "x = (1, 2)\n",         // tuple
            "a[1:2:3]\n",           // slice step
            "import os.path\n",     // dotted import
            "x.y\n",                // bare attribute
            "break\n",
        ] {
            assert!(parse(src, "t").is_err(), "expected rejection: {src}");
        }
    }

    #[test]
    fn full_subset_parses() {
        let src = "\
import mathlib

def outer(a, b):
    def inner(x):
        return x * 2
    total = 0
    for i in range(a, b, 2):
        if i % 3 == 0:
            total = total + inner(i)
        elif i % 3 == 1:
            total = total - 1
        else:
            pass
    while total > 100:
        total = total // 2
    return total

table = {\"a\": 1, \"b\": 2}
items = [1, 2.5, \"three\", True, None]
items[0] = items[1]
print(outer(1, 20), table[\"a\"], items[0:2], mathlib.pow(2, 8))
";
        let program = parse(src, "subset").unwrap();
        assert_eq!(program.body.len(), 6);
    }

    #[test]
    fn serialize_parse_serialize_is_identity() {
        let sources = [
            "x = 1 + 2 * 3 ** -4\n",
            "def f(a):\n    return -a\nprint(f(2) or f(3) and not f(4))\n",
            "m = {1: \"one\"}\nxs = [1, 2, 3]\nxs[0] = m[1]\ny = xs[0:2]\nz = xs[:2]\n",
            "if a:\n    pass\nelif b:\n    c = 1\nelse:\n    d = 2.5\n",
            "for i in range(3):\n    print(i)\nwhile 0:\n    pass\n",
            "import zlib_lite\nprint(zlib_lite.compress(\"x\"))\nglobal g, h\n",
        ];
        for src in sources {
            let first = parse(src, "t").unwrap();
            let rendered = first.to_source();
            let second = parse(&rendered, "t").unwrap();
            assert_eq!(rendered, second.to_source(), "not a fixed point for {src}");
        }
    }

    #[test]
    fn deep_nesting_is_capped() {
        let deep = format!("x = {}1{}\n", "(".repeat(500), ")".repeat(500));
        let err = parse(&deep, "t").unwrap_err();
        assert!(err.message.contains("too deep"));

        let mut blocks = String::new();
        for i in 0..300 {
            for _ in 0..i {
                blocks.push_str("    ");
            }
            blocks.push_str("if 1:\n");
        }
        assert!(parse(&blocks, "t").is_err());
    }

    #[test]
    fn negative_power_precedence() {
        // -2**2 parses as -(2**2)
        let program = parse("x = -2 ** 2\n", "t").unwrap();
        let StmtKind::Assign { value, .. } = &program.body[0].kind else {
            panic!()
        };
        assert!(matches!(
            &value.kind,
            ExprKind::Unary { op: UnaryOp::Neg, .. }
        ));
    }
}

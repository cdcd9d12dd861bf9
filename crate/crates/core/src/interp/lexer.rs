//! Tokenizer for the guest language: indentation-sensitive, with
//! bracket-continuation (newlines inside `()`/`[]`/`{}` are ignored).

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    Int(i64),
    Float(f64),
    Str(Vec<u8>),
    Name(String),
    Keyword(Keyword),
    Op(Op),
    Newline,
    Indent,
    Dedent,
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Def,
    Return,
    If,
    Elif,
    Else,
    While,
    For,
    In,
    Import,
    Global,
    Pass,
    And,
    Or,
    Not,
    True,
    False,
    None,
    /// Recognized so the parser can name the construct in its error.
    Unsupported(UnsupportedKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnsupportedKeyword {
    Class,
    Try,
    Except,
    Finally,
    With,
    Lambda,
    Yield,
    Del,
    Raise,
    Assert,
    From,
    As,
    Nonlocal,
    Break,
    Continue,
    Is,
    Async,
    Await,
}

impl UnsupportedKeyword {
    pub fn name(&self) -> &'static str {
        match self {
            UnsupportedKeyword::Class => "class",
            UnsupportedKeyword::Try => "try",
            UnsupportedKeyword::Except => "except",
            UnsupportedKeyword::Finally => "finally",
            UnsupportedKeyword::With => "with",
            UnsupportedKeyword::Lambda => "lambda",
            UnsupportedKeyword::Yield => "yield",
            UnsupportedKeyword::Del => "del",
            UnsupportedKeyword::Raise => "raise",
            UnsupportedKeyword::Assert => "assert",
            UnsupportedKeyword::From => "from",
            UnsupportedKeyword::As => "as",
            UnsupportedKeyword::Nonlocal => "nonlocal",
            UnsupportedKeyword::Break => "break",
            UnsupportedKeyword::Continue => "continue",
            UnsupportedKeyword::Is => "is",
            UnsupportedKeyword::Async => "async",
            UnsupportedKeyword::Await => "await",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Plus,
    Minus,
    Star,
    DoubleStar,
    Slash,
    DoubleSlash,
    Percent,
    Assign,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Dot,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spanned {
    pub token: Token,
    pub line: u32,
    pub col: u32,
}

/// Parse-time failure with position information.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{source_name}:{line}:{column}: {message}")]
pub struct SyntaxError {
    pub source_name: String,
    pub line: u32,
    pub column: u32,
    pub message: String,
}

impl SyntaxError {
    pub fn new(line: u32, column: u32, message: impl Into<String>) -> Self {
        Self {
            source_name: String::new(),
            line,
            column,
            message: message.into(),
        }
    }

    pub fn with_source(mut self, name: &str) -> Self {
        self.source_name = name.to_string();
        self
    }
}

fn keyword_for(word: &str) -> Option<Keyword> {
    use UnsupportedKeyword as U;
    Some(match word {
        "def" => Keyword::Def,
        "return" => Keyword::Return,
        "if" => Keyword::If,
        "elif" => Keyword::Elif,
        "else" => Keyword::Else,
        "while" => Keyword::While,
        "for" => Keyword::For,
        "in" => Keyword::In,
        "import" => Keyword::Import,
        "global" => Keyword::Global,
        "pass" => Keyword::Pass,
        "and" => Keyword::And,
        "or" => Keyword::Or,
        "not" => Keyword::Not,
        "True" => Keyword::True,
        "False" => Keyword::False,
        "None" => Keyword::None,
        "class" => Keyword::Unsupported(U::Class),
        "try" => Keyword::Unsupported(U::Try),
        "except" => Keyword::Unsupported(U::Except),
        "finally" => Keyword::Unsupported(U::Finally),
        "with" => Keyword::Unsupported(U::With),
        "lambda" => Keyword::Unsupported(U::Lambda),
        "yield" => Keyword::Unsupported(U::Yield),
        "del" => Keyword::Unsupported(U::Del),
        "raise" => Keyword::Unsupported(U::Raise),
        "assert" => Keyword::Unsupported(U::Assert),
        "from" => Keyword::Unsupported(U::From),
        "as" => Keyword::Unsupported(U::As),
        "nonlocal" => Keyword::Unsupported(U::Nonlocal),
        "break" => Keyword::Unsupported(U::Break),
        "continue" => Keyword::Unsupported(U::Continue),
        "is" => Keyword::Unsupported(U::Is),
        "async" => Keyword::Unsupported(U::Async),
        "await" => Keyword::Unsupported(U::Await),
        _ => return None,
    })
}

pub fn tokenize(source: &str) -> Result<Vec<Spanned>, SyntaxError> {
    Lexer {
        bytes: source.as_bytes(),
        pos: 0,
        line: 1,
        col: 1,
        indents: vec![0],
        bracket_depth: 0,
        tokens: Vec::new(),
        at_line_start: true,
    }
    .run()
}

struct Lexer<'s> {
    bytes: &'s [u8],
    pos: usize,
    line: u32,
    col: u32,
    indents: Vec<usize>,
    bracket_depth: usize,
    tokens: Vec<Spanned>,
    at_line_start: bool,
}

impl<'s> Lexer<'s> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.bytes.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    fn push(&mut self, token: Token, line: u32, col: u32) {
        self.tokens.push(Spanned { token, line, col });
    }

    fn error(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError::new(self.line, self.col, message)
    }

    fn run(mut self) -> Result<Vec<Spanned>, SyntaxError> {
        loop {
            if self.at_line_start && self.bracket_depth == 0 {
                if !self.handle_indentation()? {
                    break; // end of input
                }
                self.at_line_start = false;
            }
            let Some(b) = self.peek() else {
                break;
            };
            match b {
                b' ' => {
                    self.bump();
                }
                b'\t' => {
                    // Tabs between tokens are fine; indentation handling
                    // rejects them separately.
                    self.bump();
                }
                b'\r' => {
                    self.bump();
                }
                b'#' => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                b'\n' => {
                    self.bump();
                    if self.bracket_depth == 0 {
                        if !matches!(
                            self.tokens.last().map(|t| &t.token),
                            None | Some(Token::Newline) | Some(Token::Indent) | Some(Token::Dedent)
                        ) {
                            self.push(Token::Newline, self.line - 1, 0);
                        }
                        self.at_line_start = true;
                    }
                }
                b'0'..=b'9' => self.lex_number()?,
                b'"' | b'\'' => self.lex_string(b)?,
                b'A'..=b'Z' | b'a'..=b'z' | b'_' => self.lex_word(),
                _ => self.lex_operator()?,
            }
        }

        if !matches!(
            self.tokens.last().map(|t| &t.token),
            None | Some(Token::Newline)
        ) {
            self.push(Token::Newline, self.line, self.col);
        }
        while self.indents.len() > 1 {
            self.indents.pop();
            self.push(Token::Dedent, self.line, 0);
        }
        self.push(Token::Eof, self.line, self.col);
        Ok(self.tokens)
    }

    /// Measures leading whitespace of the next logical line and emits
    /// INDENT/DEDENT. Returns false at end of input.
    fn handle_indentation(&mut self) -> Result<bool, SyntaxError> {
        loop {
            let mut width = 0usize;
            loop {
                match self.peek() {
                    Some(b' ') => {
                        width += 1;
                        self.bump();
                    }
                    Some(b'\t') => {
                        return Err(self.error("tabs are not allowed in indentation"));
                    }
                    _ => break,
                }
            }
            match self.peek() {
                None => return Ok(false),
                Some(b'\n') => {
                    self.bump(); // blank line
                    continue;
                }
                Some(b'\r') => {
                    self.bump();
                    continue;
                }
                Some(b'#') => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                    continue;
                }
                Some(_) => {
                    let current = *self.indents.last().expect("indent stack is never empty");
                    if width > current {
                        self.indents.push(width);
                        self.push(Token::Indent, self.line, 1);
                    } else if width < current {
                        while width < *self.indents.last().expect("non-empty") {
                            self.indents.pop();
                            self.push(Token::Dedent, self.line, 1);
                        }
                        if width != *self.indents.last().expect("non-empty") {
                            return Err(self.error("unindent does not match any outer level"));
                        }
                    }
                    return Ok(true);
                }
            }
        }
    }

    fn lex_number(&mut self) -> Result<(), SyntaxError> {
        let (line, col) = (self.line, self.col);
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.bump();
        }
        let mut is_float = false;
        if self.peek() == Some(b'.') && matches!(self.peek2(), Some(b'0'..=b'9')) {
            is_float = true;
            self.bump();
            while matches!(self.peek(), Some(b'0'..=b'9')) {
                self.bump();
            }
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let mut lookahead = self.pos + 1;
            if matches!(self.bytes.get(lookahead), Some(b'+' | b'-')) {
                lookahead += 1;
            }
            if matches!(self.bytes.get(lookahead), Some(b'0'..=b'9')) {
                is_float = true;
                self.bump(); // e
                if matches!(self.peek(), Some(b'+' | b'-')) {
                    self.bump();
                }
                while matches!(self.peek(), Some(b'0'..=b'9')) {
                    self.bump();
                }
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        if is_float {
            let value: f64 = text
                .parse()
                .map_err(|_| SyntaxError::new(line, col, "invalid float literal"))?;
            if !value.is_finite() {
                return Err(SyntaxError::new(line, col, "float literal out of range"));
            }
            self.push(Token::Float(value), line, col);
        } else {
            let value: i64 = text.parse().map_err(|_| {
                SyntaxError::new(line, col, "integer literal out of 64-bit signed range")
            })?;
            self.push(Token::Int(value), line, col);
        }
        Ok(())
    }

    fn lex_string(&mut self, quote: u8) -> Result<(), SyntaxError> {
        let (line, col) = (self.line, self.col);
        self.bump(); // opening quote
        let mut bytes = Vec::new();
        loop {
            match self.peek() {
                None => return Err(SyntaxError::new(line, col, "unterminated string literal")),
                Some(b'\n') => {
                    return Err(SyntaxError::new(line, col, "newline in string literal"))
                }
                Some(b) if b == quote => {
                    self.bump();
                    break;
                }
                Some(b'\\') => {
                    self.bump();
                    let escaped = self
                        .bump()
                        .ok_or_else(|| SyntaxError::new(line, col, "unterminated escape"))?;
                    match escaped {
                        b'n' => bytes.push(b'\n'),
                        b't' => bytes.push(b'\t'),
                        b'r' => bytes.push(b'\r'),
                        b'0' => bytes.push(0),
                        b'\\' => bytes.push(b'\\'),
                        b'\'' => bytes.push(b'\''),
                        b'"' => bytes.push(b'"'),
                        b'x' => {
                            let hi = self.bump();
                            let lo = self.bump();
                            let (Some(hi), Some(lo)) = (hi, lo) else {
                                return Err(SyntaxError::new(line, col, "truncated \\x escape"));
                            };
                            let digit = |b: u8| -> Option<u8> {
                                match b {
                                    b'0'..=b'9' => Some(b - b'0'),
                                    b'a'..=b'f' => Some(b - b'a' + 10),
                                    b'A'..=b'F' => Some(b - b'A' + 10),
                                    _ => None,
                                }
                            };
                            match (digit(hi), digit(lo)) {
                                (Some(h), Some(l)) => bytes.push((h << 4) | l),
                                _ => {
                                    return Err(SyntaxError::new(
                                        line,
                                        col,
                                        "invalid \\x escape digits",
                                    ))
                                }
                            }
                        }
                        other => {
                            return Err(SyntaxError::new(
                                line,
                                col,
                                format!("unknown escape \\{}", other as char),
                            ))
                        }
                    }
                }
                Some(_) => {
                    bytes.push(self.bump().expect("peeked"));
                }
            }
        }
        self.push(Token::Str(bytes), line, col);
        Ok(())
    }

    fn lex_word(&mut self) {
        let (line, col) = (self.line, self.col);
        let start = self.pos;
        while matches!(
            self.peek(),
            Some(b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'_')
        ) {
            self.bump();
        }
        let word = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii word");
        match keyword_for(word) {
            Some(kw) => self.push(Token::Keyword(kw), line, col),
            None => self.push(Token::Name(word.to_string()), line, col),
        }
    }

    fn lex_operator(&mut self) -> Result<(), SyntaxError> {
        let (line, col) = (self.line, self.col);
        let b = self.bump().expect("caller peeked");
        let op = match b {
            b'+' => Op::Plus,
            b'-' => Op::Minus,
            b'*' => {
                if self.peek() == Some(b'*') {
                    self.bump();
                    Op::DoubleStar
                } else {
                    Op::Star
                }
            }
            b'/' => {
                if self.peek() == Some(b'/') {
                    self.bump();
                    Op::DoubleSlash
                } else {
                    Op::Slash
                }
            }
            b'%' => Op::Percent,
            b'=' => {
                if self.peek() == Some(b'=') {
                    self.bump();
                    Op::Eq
                } else {
                    Op::Assign
                }
            }
            b'!' => {
                if self.peek() == Some(b'=') {
                    self.bump();
                    Op::Ne
                } else {
                    return Err(SyntaxError::new(line, col, "unexpected character '!'"));
                }
            }
            b'<' => {
                if self.peek() == Some(b'=') {
                    self.bump();
                    Op::Le
                } else {
                    Op::Lt
                }
            }
            b'>' => {
                if self.peek() == Some(b'=') {
                    self.bump();
                    Op::Ge
                } else {
                    Op::Gt
                }
            }
            b'(' => {
                self.bracket_depth += 1;
                Op::LParen
            }
            b')' => {
                self.bracket_depth = self.bracket_depth.saturating_sub(1);
                Op::RParen
            }
            b'[' => {
                self.bracket_depth += 1;
                Op::LBracket
            }
            b']' => {
                self.bracket_depth = self.bracket_depth.saturating_sub(1);
                Op::RBracket
            }
            b'{' => {
                self.bracket_depth += 1;
                Op::LBrace
            }
            b'}' => {
                self.bracket_depth = self.bracket_depth.saturating_sub(1);
                Op::RBrace
            }
            b',' => Op::Comma,
            b':' => Op::Colon,
            b'.' => Op::Dot,
            other => {
                return Err(SyntaxError::new(
                    line,
                    col,
                    if other.is_ascii() {
                        format!("unexpected character '{}'", other as char)
                    } else {
                        format!("unexpected byte 0x{other:02x}")
                    },
                ));
            }
        };
        self.push(Token::Op(op), line, col);
        Ok(())
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Int(v) => write!(f, "integer {v}"),
            Token::Float(v) => write!(f, "float {v}"),
            Token::Str(_) => write!(f, "string literal"),
            Token::Name(n) => write!(f, "name '{n}'"),
            Token::Keyword(Keyword::Unsupported(kw)) => write!(f, "'{}'", kw.name()),
            Token::Keyword(kw) => write!(f, "keyword {kw:?}"),
            Token::Op(op) => write!(f, "'{op:?}'"),
            Token::Newline => write!(f, "end of line"),
            Token::Indent => write!(f, "indent"),
            Token::Dedent => write!(f, "dedent"),
            Token::Eof => write!(f, "end of input"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(source: &str) -> Vec<Token> {
        tokenize(source).unwrap().into_iter().map(|s| s.token).collect()
    }

    #[test]
    fn simple_assignment() {
        let toks = kinds("x = 1 + 2\n");
        assert_eq!(
            toks,
            vec![
                Token::Name("x".into()),
                Token::Op(Op::Assign),
                Token::Int(1),
                Token::Op(Op::Plus),
                Token::Int(2),
                Token::Newline,
                Token::Eof,
            ]
        );
    }

    #[test]
    fn indentation_produces_indent_dedent() {
        let toks = kinds("if x:\n    y = 1\nz = 2\n");
        assert!(toks.contains(&Token::Indent));
        assert!(toks.contains(&Token::Dedent));
    }

    #[test]
    fn brackets_swallow_newlines() {
        let toks = kinds("a = [1,\n     2]\n");
        let newlines = toks.iter().filter(|t| **t == Token::Newline).count();
        assert_eq!(newlines, 1);
    }

    #[test]
    fn int_overflow_is_a_syntax_error() {
        let err = tokenize("x = 9223372036854775808\n").unwrap_err();
        assert!(err.message.contains("64-bit"));
        // i64::MIN cannot be written as a literal (it lexes as unary minus
        // applied to an out-of-range positive literal).
        assert!(tokenize("x = 9223372036854775807\n").is_ok());
    }

    #[test]
    fn string_escapes() {
        let toks = kinds(r#"s = "a\n\x41\t""#);
        assert_eq!(toks[2], Token::Str(b"a\nA\t".to_vec()));
    }

    #[test]
    fn tab_indentation_is_rejected() {
        let err = tokenize("if x:\n\ty = 1\n").unwrap_err();
        assert!(err.message.contains("tab"));
    }

    #[test]
    fn huge_float_literal_is_rejected() {
        assert!(tokenize("x = 1e999\n").is_err());
    }

    #[test]
    fn unsupported_keywords_are_recognized() {
        let toks = kinds("class\n");
        assert!(matches!(
            toks[0],
            Token::Keyword(Keyword::Unsupported(UnsupportedKeyword::Class))
        ));
    }

    #[test]
    fn crlf_sources_lex() {
        let toks = kinds("x = 1\r\ny = 2\r\n");
        assert_eq!(toks.iter().filter(|t| **t == Token::Newline).count(), 2);
    }
}

//! Guest-level error values. Every failure inside a guest program is one
//! of these; none of them escapes as a host panic.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GuestErrorKind {
    IndexError,
    KeyError,
    OverflowError,
    TypeError,
    NameError,
    ImportError,
    ValueError,
    ZeroDivisionError,
    RecursionError,
    AttributeError,
}

impl GuestErrorKind {
    pub fn name(&self) -> &'static str {
        match self {
            GuestErrorKind::IndexError => "IndexError",
            GuestErrorKind::KeyError => "KeyError",
            GuestErrorKind::OverflowError => "OverflowError",
            GuestErrorKind::TypeError => "TypeError",
            GuestErrorKind::NameError => "NameError",
            GuestErrorKind::ImportError => "ImportError",
            GuestErrorKind::ValueError => "ValueError",
            GuestErrorKind::ZeroDivisionError => "ZeroDivisionError",
            GuestErrorKind::RecursionError => "RecursionError",
            GuestErrorKind::AttributeError => "AttributeError",
        }
    }
}

impl fmt::Display for GuestErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An uncaught guest error. The guest language has no exception-handling
/// syntax, so the first one raised terminates the run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuestError {
    pub kind: GuestErrorKind,
    pub message: String,
    /// Source line, attached by the evaluator at the raising operation.
    pub line: Option<u32>,
}

impl GuestError {
    pub fn new(kind: GuestErrorKind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
            line: None,
        }
    }

    /// Attaches a source line if none is recorded yet. Errors keep the
    /// line of the innermost operation that raised them.
    pub fn at_line(mut self, line: u32) -> Self {
        if self.line.is_none() {
            self.line = Some(line);
        }
        self
    }
}

impl fmt::Display for GuestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}: {} (line {})", self.kind, self.message, line),
            None => write!(f, "{}: {}", self.kind, self.message),
        }
    }
}

impl std::error::Error for GuestError {}

pub fn index_error(message: impl Into<String>) -> GuestError {
    GuestError::new(GuestErrorKind::IndexError, message)
}

pub fn key_error(message: impl Into<String>) -> GuestError {
    GuestError::new(GuestErrorKind::KeyError, message)
}

pub fn type_error(message: impl Into<String>) -> GuestError {
    GuestError::new(GuestErrorKind::TypeError, message)
}

pub fn overflow_error(message: impl Into<String>) -> GuestError {
    GuestError::new(GuestErrorKind::OverflowError, message)
}

pub fn value_error(message: impl Into<String>) -> GuestError {
    GuestError::new(GuestErrorKind::ValueError, message)
}

pub fn name_error(message: impl Into<String>) -> GuestError {
    GuestError::new(GuestErrorKind::NameError, message)
}

pub fn import_error(message: impl Into<String>) -> GuestError {
    GuestError::new(GuestErrorKind::ImportError, message)
}

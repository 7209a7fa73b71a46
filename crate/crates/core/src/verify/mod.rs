//! Reads emitted scripts back into the IR and compares models.
//!
//! Each parser accepts exactly the subset its emitter writes (see
//! `docs/dialects/`) and rejects anything else with a line number.
//! [`models_equivalent`] ignores ids: nodes are matched by coordinates,
//! elements by their endpoint pair, loads as multisets.

mod equivalence;
mod etabs;
mod opensees;
mod sap2000;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use equivalence::{
    models_equivalent, EquivalenceReport, Mismatch, MismatchCategory, VALUE_REL_TOL,
};
pub use etabs::parse_etabs;
pub use opensees::parse_opensees;
pub use sap2000::parse_sap2000;

use crate::codegen::{emit, CodegenError, Dialect};
use crate::model::FrameModel;
use crate::story::from_story_model;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DialectErrorKind {
    Syntax,
    DuplicateDefinition,
    UndefinedReference,
}

impl DialectErrorKind {
    pub fn code(self) -> &'static str {
        match self {
            Self::Syntax => "DIALECT_SYNTAX_ERROR",
            Self::DuplicateDefinition => "DUPLICATE_DEFINITION",
            Self::UndefinedReference => "UNDEFINED_REFERENCE",
        }
    }
}

/// Parse failure at a 1-based line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}: line {line}: {message}", kind.code())]
pub struct DialectError {
    pub kind: DialectErrorKind,
    pub line: usize,
    pub message: String,
}

impl DialectError {
    pub fn code(&self) -> &'static str {
        self.kind.code()
    }

    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        Self {
            kind: DialectErrorKind::Syntax,
            line,
            message: message.into(),
        }
    }

    pub(crate) fn duplicate(line: usize, message: impl Into<String>) -> Self {
        Self {
            kind: DialectErrorKind::DuplicateDefinition,
            line,
            message: message.into(),
        }
    }

    pub(crate) fn undefined(line: usize, message: impl Into<String>) -> Self {
        Self {
            kind: DialectErrorKind::UndefinedReference,
            line,
            message: message.into(),
        }
    }
}

/// Parses any dialect into the object model.
pub fn parse_script(dialect: Dialect, text: &str) -> Result<FrameModel, DialectError> {
    match dialect {
        Dialect::OpenseesTcl => parse_opensees(text),
        Dialect::Sap2000S2k => parse_sap2000(text),
        Dialect::EtabsE2k => parse_etabs(text).map(|sm| from_story_model(&sm)),
    }
}

#[derive(Debug, Error)]
pub enum RoundTripError {
    #[error(transparent)]
    Codegen(#[from] CodegenError),
    #[error(transparent)]
    Parse(#[from] DialectError),
}

impl RoundTripError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::Codegen(e) => e.code(),
            Self::Parse(e) => e.code(),
        }
    }
}

/// Emit, parse back, compare.
pub fn round_trip(
    model: &FrameModel,
    dialect: Dialect,
    tol: f64,
) -> Result<(FrameModel, EquivalenceReport), RoundTripError> {
    let script = emit(model, dialect, tol)?;
    let back = parse_script(dialect, &script.text)?;
    let report = models_equivalent(model, &back, tol);
    Ok((back, report))
}

/// A parsed `f64` that must be finite.
pub(crate) fn parse_num(tok: &str, line: usize, what: &str) -> Result<f64, DialectError> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(DialectError::syntax(
            line,
            format!("expected a finite number for {what}, found `{tok}`"),
        )),
    }
}

pub(crate) fn parse_id(tok: &str, line: usize, what: &str) -> Result<u32, DialectError> {
    match tok.parse::<u32>() {
        Ok(v) if v > 0 && !tok.starts_with('+') && !tok.starts_with('0') => Ok(v),
        _ => Err(DialectError::syntax(
            line,
            format!("expected a positive integer {what}, found `{tok}`"),
        )),
    }
}

/// Token of a quoted-string line format: either `"text"` or a bare word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Quoted(String),
    Bare(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Quoted(s) => write!(f, "\"{s}\""),
            Tok::Bare(s) => f.write_str(s),
        }
    }
}

/// Splits on whitespace, keeping double-quoted runs whole.
pub(crate) fn tokenize_quoted(text: &str, line: usize) -> Result<Vec<Tok>, DialectError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '"' {
            chars.next();
            let mut s = String::new();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some(ch) => s.push(ch),
                    None => return Err(DialectError::syntax(line, "unterminated string")),
                }
            }
            out.push(Tok::Quoted(s));
        } else {
            let mut s = String::new();
            while let Some(&ch) = chars.peek() {
                if ch.is_whitespace() || ch == '"' {
                    break;
                }
                s.push(ch);
                chars.next();
            }
            out.push(Tok::Bare(s));
        }
    }
    Ok(out)
}

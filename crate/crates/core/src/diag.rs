use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
}

/// Machine-readable diagnostic codes emitted by model validation, load
/// assignment and the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DiagnosticCode {
    DuplicateNodeId,
    DuplicateCoordinate,
    DuplicateElementId,
    DuplicateSectionName,
    DanglingNodeRef,
    DanglingSectionRef,
    DanglingElementRef,
    UnresolvedEnd,
    DegenerateElement,
    ColumnNotVertical,
    GirderNotHorizontal,
    InvalidSection,
    InvalidSectionName,
    NonFiniteValue,
    MultipleSupports,
    UnsupportedBaseNode,
    Disconnected,
    ZeroPointLoad,
    LoadOnColumn,
    NoLoads,
    ZeroLoadDropped,
    IllConditioned,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::DuplicateNodeId => "DUPLICATE_NODE_ID",
            Self::DuplicateCoordinate => "DUPLICATE_COORDINATE",
            Self::DuplicateElementId => "DUPLICATE_ELEMENT_ID",
            Self::DuplicateSectionName => "DUPLICATE_SECTION_NAME",
            Self::DanglingNodeRef => "DANGLING_NODE_REF",
            Self::DanglingSectionRef => "DANGLING_SECTION_REF",
            Self::DanglingElementRef => "DANGLING_ELEMENT_REF",
            Self::UnresolvedEnd => "UNRESOLVED_END",
            Self::DegenerateElement => "DEGENERATE_ELEMENT",
            Self::ColumnNotVertical => "COLUMN_NOT_VERTICAL",
            Self::GirderNotHorizontal => "GIRDER_NOT_HORIZONTAL",
            Self::InvalidSection => "INVALID_SECTION",
            Self::InvalidSectionName => "INVALID_SECTION_NAME",
            Self::NonFiniteValue => "NON_FINITE_VALUE",
            Self::MultipleSupports => "MULTIPLE_SUPPORTS",
            Self::UnsupportedBaseNode => "UNSUPPORTED_BASE_NODE",
            Self::Disconnected => "DISCONNECTED",
            Self::ZeroPointLoad => "ZERO_POINT_LOAD",
            Self::LoadOnColumn => "LOAD_ON_COLUMN",
            Self::NoLoads => "NO_LOADS",
            Self::ZeroLoadDropped => "ZERO_LOAD_DROPPED",
            Self::IllConditioned => "ILL_CONDITIONED",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The object a diagnostic is about.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum Subject {
    Model,
    Node(u32),
    Element(u32),
    Section(String),
    Support(u32),
    PointLoad(usize),
    DistributedLoad(usize),
    Dof { node: u32, dof: u8 },
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Model => f.write_str("model"),
            Self::Node(id) => write!(f, "node {id}"),
            Self::Element(id) => write!(f, "element {id}"),
            Self::Section(name) => write!(f, "section {name}"),
            Self::Support(id) => write!(f, "support at node {id}"),
            Self::PointLoad(i) => write!(f, "point load #{i}"),
            Self::DistributedLoad(i) => write!(f, "distributed load #{i}"),
            Self::Dof { node, dof } => {
                let name = ["ux", "uy", "rz"].get(*dof as usize).unwrap_or(&"?");
                write!(f, "node {node} dof {name}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub severity: Severity,
    pub subject: Subject,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: DiagnosticCode, subject: Subject, message: impl Into<String>) -> Self {
        Self {
            code,
            severity: Severity::Error,
            subject,
            message: message.into(),
        }
    }

    pub fn warning(code: DiagnosticCode, subject: Subject, message: impl Into<String>) -> Self {
        Self {
            code,
            severity: Severity::Warning,
            subject,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{sev}[{}] {}: {}", self.code, self.subject, self.message)
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

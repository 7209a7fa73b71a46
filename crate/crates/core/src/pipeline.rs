//! Stage one: problem spec to validated frame model.

use thiserror::Error;

use crate::diag::{has_errors, Diagnostic};
use crate::loads::{assign_loads, LoadError};
use crate::model::{resolve_connectivity, validate_model_with, FrameModel, ResolveError};
use crate::problem::{parse_problem, FrameProblemSpec, ProblemError};
use crate::topology::{build_plan, generate_elements, generate_nodes};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("model failed validation:\n{}", format_diags(.0))]
    Invalid(Vec<Diagnostic>),
}

fn format_diags(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| format!("  {d}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl CompileError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::Problem(e) => e.code(),
            Self::Resolve(e) => e.code(),
            Self::Load(e) => e.code(),
            Self::Invalid(d) => d
                .iter()
                .find(|d| d.is_error())
                .map_or("INVALID_MODEL", |d| d.code.as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Compiled {
    pub model: FrameModel,
    /// Non-fatal diagnostics from load assignment and validation.
    pub warnings: Vec<Diagnostic>,
}

/// Builds the canonical frame model for `spec`. Node and element
/// generation run concurrently; both only read the problem and the plan.
pub fn compile(spec: &FrameProblemSpec, tol: f64) -> Result<Compiled, CompileError> {
    spec.validate()?;
    let plan = build_plan(spec);
    let ((nodes, supports), raw_elements) = rayon::join(
        || generate_nodes(spec, &plan),
        || generate_elements(spec, &plan),
    );
    let elements = resolve_connectivity(&nodes, &raw_elements, tol)?;
    let loads = assign_loads(spec, &nodes, &elements, tol)?;

    let model = FrameModel {
        units: spec.units,
        nodes,
        supports,
        sections: vec![spec.column_section.clone(), spec.girder_section.clone()],
        elements,
        point_loads: loads.point_loads,
        distributed_loads: loads.distributed_loads,
        provenance: format!(
            "frameforge: {} bay(s), stories per bay [{}]",
            spec.n_bays,
            spec.stories_per_bay
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
    .canonicalized();

    let diags = validate_model_with(&model, tol);
    if has_errors(&diags) {
        return Err(CompileError::Invalid(diags));
    }
    let mut warnings = loads.warnings;
    warnings.extend(diags);
    Ok(Compiled { model, warnings })
}

pub fn compile_text(text: &str, tol: f64) -> Result<Compiled, CompileError> {
    compile(&parse_problem(text)?, tol)
}

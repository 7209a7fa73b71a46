//! Stage two: frame model to analysis scripts.
//!
//! Each emitter is a pure pretty-printer over the IR (or, for ETABS, the
//! story model). None reads another's output, so [`emit_all`] runs them
//! concurrently. The accepted subset of each dialect is documented in
//! `docs/dialects/` and enforced by the parsers in [`crate::verify`].

mod etabs;
mod opensees;
mod sap2000;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use etabs::emit_etabs;
pub use opensees::emit_opensees;
pub use sap2000::emit_sap2000;

pub(crate) use etabs::restraint_from_spec;
pub(crate) use opensees::local_wy as opensees_local_wy;

use crate::diag::{Diagnostic, DiagnosticCode};
use crate::model::{to_canonical_json, validate_model_with, FrameModel};
use crate::story::{to_story_model, StoryError};

/// Name of the single load pattern / load case every dialect uses.
pub const LOAD_PATTERN: &str = "LOAD1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dialect {
    OpenseesTcl,
    Sap2000S2k,
    EtabsE2k,
}

impl Dialect {
    pub const ALL: [Dialect; 3] = [Self::OpenseesTcl, Self::Sap2000S2k, Self::EtabsE2k];

    pub fn name(self) -> &'static str {
        match self {
            Self::OpenseesTcl => "opensees_tcl",
            Self::Sap2000S2k => "sap2000_s2k",
            Self::EtabsE2k => "etabs_e2k",
        }
    }

    /// Short program name used on the command line.
    pub fn program(self) -> &'static str {
        match self {
            Self::OpenseesTcl => "opensees",
            Self::Sap2000S2k => "sap2000",
            Self::EtabsE2k => "etabs",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Self::OpenseesTcl => "tcl",
            Self::Sap2000S2k => "s2k",
            Self::EtabsE2k => "e2k",
        }
    }

    pub fn from_extension(ext: &str) -> Option<Dialect> {
        Self::ALL
            .into_iter()
            .find(|d| d.extension().eq_ignore_ascii_case(ext))
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|d| d.name() == s || d.program() == s)
            .ok_or_else(|| format!("unknown dialect `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmittedScript {
    pub dialect: Dialect,
    pub text: String,
    /// SHA-256 of the canonical IR JSON, hex encoded.
    pub source_digest: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodegenError {
    #[error("UNSUPPORTED_FEATURE: {0}")]
    UnsupportedFeature(String),
    #[error(transparent)]
    Story(#[from] StoryError),
}

impl CodegenError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::UnsupportedFeature(_) => "UNSUPPORTED_FEATURE",
            Self::Story(e) => e.code(),
        }
    }
}

pub fn source_digest(model: &FrameModel) -> String {
    hex::encode(Sha256::digest(to_canonical_json(model).as_bytes()))
}

/// Rejects constructs the emitters cannot express.
fn check_supported(model: &FrameModel) -> Result<(), CodegenError> {
    const BLOCKING: [DiagnosticCode; 6] = [
        DiagnosticCode::UnresolvedEnd,
        DiagnosticCode::InvalidSectionName,
        DiagnosticCode::LoadOnColumn,
        DiagnosticCode::NonFiniteValue,
        DiagnosticCode::DanglingNodeRef,
        DiagnosticCode::DanglingSectionRef,
    ];
    let blocking: Vec<Diagnostic> = validate_model_with(model, crate::model::COORD_TOL)
        .into_iter()
        .filter(|d| BLOCKING.contains(&d.code))
        .collect();
    match blocking.first() {
        None => Ok(()),
        Some(d) => Err(CodegenError::UnsupportedFeature(d.to_string())),
    }
}

/// Emits every requested dialect concurrently; results follow `dialects`.
pub fn emit_all(
    model: &FrameModel,
    dialects: &[Dialect],
    tol: f64,
) -> Result<Vec<EmittedScript>, CodegenError> {
    use rayon::prelude::*;
    dialects.par_iter().map(|&d| emit(model, d, tol)).collect()
}

pub fn emit(model: &FrameModel, dialect: Dialect, tol: f64) -> Result<EmittedScript, CodegenError> {
    match dialect {
        Dialect::OpenseesTcl => emit_opensees(model),
        Dialect::Sap2000S2k => emit_sap2000(model),
        Dialect::EtabsE2k => emit_etabs(&to_story_model(model, tol)?),
    }
}

/// Force/length unit spellings per dialect.
pub(crate) mod unit_names {
    use crate::units::{ForceUnit, LengthUnit};

    pub fn sap_force(f: ForceUnit) -> &'static str {
        match f {
            ForceUnit::Kilonewton => "KN",
            ForceUnit::Newton => "N",
            ForceUnit::Kip => "Kip",
            ForceUnit::Pound => "lb",
        }
    }

    pub fn sap_length(l: LengthUnit) -> &'static str {
        l.symbol()
    }

    pub fn etabs_force(f: ForceUnit) -> &'static str {
        match f {
            ForceUnit::Kilonewton => "KN",
            ForceUnit::Newton => "N",
            ForceUnit::Kip => "KIP",
            ForceUnit::Pound => "LB",
        }
    }

    pub fn etabs_length(l: LengthUnit) -> &'static str {
        match l {
            LengthUnit::Meter => "M",
            LengthUnit::Millimeter => "MM",
            LengthUnit::Foot => "FT",
            LengthUnit::Inch => "IN",
        }
    }

    pub fn force_from(s: &str, name: fn(ForceUnit) -> &'static str) -> Option<ForceUnit> {
        ForceUnit::ALL.into_iter().find(|&f| name(f) == s)
    }

    pub fn length_from(s: &str, name: fn(LengthUnit) -> &'static str) -> Option<LengthUnit> {
        LengthUnit::ALL.into_iter().find(|&l| name(l) == s)
    }
}

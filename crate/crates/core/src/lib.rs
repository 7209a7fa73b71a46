//! Deterministic compiler from planar frame problem descriptions to
//! OpenSees, SAP2000 and ETABS input files.
//!
//! The pipeline runs in two stages. Stage one parses the problem template
//! ([`problem`]), plans and builds the frame topology ([`topology`]),
//! assigns loads ([`loads`]) and produces the unified [`model::FrameModel`].
//! Stage two hands that IR to the dialect emitters ([`codegen`]), with
//! ETABS going through the story representation in [`story`] first.
//!
//! [`verify`] parses emitted scripts back into the IR and checks
//! equivalence; [`solver`] is an independent direct-stiffness solver used
//! to confirm that round-tripped models give the same structural response.

pub mod codegen;
pub mod diag;
pub mod harness;
pub mod loads;
pub mod model;
pub(crate) mod numfmt;
pub mod pipeline;
pub mod problem;
pub mod solver;
pub mod story;
pub mod topology;
pub mod units;
pub mod verify;

pub use diag::{Diagnostic, DiagnosticCode, Severity, Subject};
pub use model::{
    DistributedLoad, ElementEnd, ElementId, ElementKind, ElementRecord, FrameModel, NodeId,
    NodeRecord, PointLoad, SectionProperties, SupportKind, SupportRecord, COORD_TOL,
};
pub use units::{ForceUnit, LengthUnit, UnitSystem};

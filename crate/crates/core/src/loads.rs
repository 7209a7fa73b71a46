//! Maps the template's load pattern onto nodes and girders.

use thiserror::Error;

use crate::diag::{Diagnostic, DiagnosticCode, Subject};
use crate::model::{
    find_node_at, DistributedLoad, ElementKind, ElementRecord, LookupError, NodeRecord, PointLoad,
};
use crate::problem::FrameProblemSpec;
use crate::topology::level_elevations;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoadError {
    #[error("NO_NODE_AT_LOCATION: no node at ({x}, {y})")]
    NoNodeAtLocation { x: f64, y: f64 },
}

impl LoadError {
    pub fn code(&self) -> &'static str {
        "NO_NODE_AT_LOCATION"
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LoadAssignment {
    pub point_loads: Vec<PointLoad>,
    pub distributed_loads: Vec<DistributedLoad>,
    /// `ZERO_LOAD_DROPPED` warnings.
    pub warnings: Vec<Diagnostic>,
}

/// Lateral `+x` loads at every floor of the leftmost column line, `-y` UDLs
/// on every girder, then the template's extra point loads. Zero loads are
/// dropped with a warning.
pub fn assign_loads(
    spec: &FrameProblemSpec,
    nodes: &[NodeRecord],
    elements: &[ElementRecord],
    tol: f64,
) -> Result<LoadAssignment, LoadError> {
    let mut out = LoadAssignment::default();
    let lookup = |x: f64, y: f64| match find_node_at(nodes, x, y, tol) {
        Ok(id) => Ok(id),
        Err(LookupError::NotFound | LookupError::Ambiguous(_)) => {
            Err(LoadError::NoNodeAtLocation { x, y })
        }
    };

    let floors: Vec<f64> = level_elevations(spec)
        .into_iter()
        .skip(1)
        .filter(|&y| find_node_at(nodes, 0.0, y, tol).is_ok())
        .collect();
    if spec.lateral_load_per_floor == 0.0 {
        out.warnings.push(Diagnostic::warning(
            DiagnosticCode::ZeroLoadDropped,
            Subject::Model,
            "lateral_per_floor is zero; no lateral loads assigned",
        ));
    } else {
        for y in floors {
            out.point_loads.push(PointLoad {
                node_id: lookup(0.0, y)?,
                fx: spec.lateral_load_per_floor,
                fy: 0.0,
                mz: 0.0,
            });
        }
    }

    if spec.gravity_udl == 0.0 {
        out.warnings.push(Diagnostic::warning(
            DiagnosticCode::ZeroLoadDropped,
            Subject::Model,
            "gravity_udl is zero; no distributed loads assigned",
        ));
    } else {
        out.distributed_loads.extend(
            elements
                .iter()
                .filter(|e| e.kind == ElementKind::Girder)
                .map(|e| DistributedLoad {
                    element_id: e.id,
                    w_transverse: -spec.gravity_udl,
                }),
        );
    }

    for (i, p) in spec.extra_point_loads.iter().enumerate() {
        let node_id = lookup(p.x, p.y)?;
        if p.fx == 0.0 && p.fy == 0.0 && p.mz == 0.0 {
            out.warnings.push(Diagnostic::warning(
                DiagnosticCode::ZeroLoadDropped,
                Subject::PointLoad(i),
                format!("extra point load at ({}, {}) is zero", p.x, p.y),
            ));
            continue;
        }
        out.point_loads.push(PointLoad {
            node_id,
            fx: p.fx,
            fy: p.fy,
            mz: p.mz,
        });
    }
    Ok(out)
}

//! The unified, platform-agnostic frame model.
//!
//! Every emitter reads this IR and every dialect parser produces it. All
//! quantities share the model's [`UnitSystem`]; coordinates are planar with
//! `y` vertical and up-positive.

mod json;
mod resolve;
mod validate;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use crate::units::UnitSystem;
pub use json::{from_json, to_canonical_json, to_canonical_json_value, JsonError};
pub use resolve::{find_node_at, resolve_connectivity, LookupError, ResolveError};
pub use validate::{validate_model, validate_model_with};

pub type NodeId = u32;
pub type ElementId = u32;

/// Default tolerance for matching coordinates, in model length units.
pub const COORD_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRecord {
    pub id: NodeId,
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub description: String,
}

impl NodeRecord {
    pub fn new(id: NodeId, x: f64, y: f64) -> Self {
        Self {
            id,
            x,
            y,
            description: String::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportKind {
    Fixed,
    Pinned,
    RollerX,
    RollerY,
}

impl SupportKind {
    pub const ALL: [SupportKind; 4] = [Self::Fixed, Self::Pinned, Self::RollerX, Self::RollerY];

    /// Restrained flags for (ux, uy, rz).
    pub fn restraints(self) -> [bool; 3] {
        match self {
            Self::Fixed => [true, true, true],
            Self::Pinned => [true, true, false],
            Self::RollerX => [false, true, false],
            Self::RollerY => [true, false, false],
        }
    }

    pub fn from_restraints(flags: [bool; 3]) -> Option<SupportKind> {
        Self::ALL.into_iter().find(|k| k.restraints() == flags)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Fixed => "fixed",
            Self::Pinned => "pinned",
            Self::RollerX => "roller_x",
            Self::RollerY => "roller_y",
        }
    }
}

impl fmt::Display for SupportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportRecord {
    pub node_id: NodeId,
    pub kind: SupportKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionProperties {
    pub name: String,
    pub youngs_modulus: f64,
    pub area: f64,
    pub moment_of_inertia: f64,
}

impl SectionProperties {
    pub fn new(name: impl Into<String>, e: f64, a: f64, i: f64) -> Self {
        Self {
            name: name.into(),
            youngs_modulus: e,
            area: a,
            moment_of_inertia: i,
        }
    }

    /// Whether two sections carry the same stiffness values within `rel`.
    pub fn same_values(&self, other: &SectionProperties, rel: f64) -> bool {
        close_rel(self.youngs_modulus, other.youngs_modulus, rel)
            && close_rel(self.area, other.area, rel)
            && close_rel(self.moment_of_inertia, other.moment_of_inertia, rel)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Column,
    Girder,
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Column => "column",
            Self::Girder => "girder",
        })
    }
}

/// An element end: a node id once resolved, a raw `[x, y]` before.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementEnd {
    Node(NodeId),
    Point([f64; 2]),
}

impl ElementEnd {
    pub fn node(self) -> Option<NodeId> {
        match self {
            Self::Node(id) => Some(id),
            Self::Point(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementRecord {
    pub id: ElementId,
    pub kind: ElementKind,
    pub end_i: ElementEnd,
    pub end_j: ElementEnd,
    pub section: String,
    #[serde(default)]
    pub description: String,
}

impl ElementRecord {
    /// Both end node ids; `None` while either end is still a coordinate.
    pub fn nodes(&self) -> Option<(NodeId, NodeId)> {
        Some((self.end_i.node()?, self.end_j.node()?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointLoad {
    pub node_id: NodeId,
    pub fx: f64,
    pub fy: f64,
    pub mz: f64,
}

/// Uniform load on a girder; `w_transverse` is the global-y intensity
/// (negative acts toward -y).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributedLoad {
    pub element_id: ElementId,
    pub w_transverse: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameModel {
    pub units: UnitSystem,
    pub nodes: Vec<NodeRecord>,
    pub supports: Vec<SupportRecord>,
    pub sections: Vec<SectionProperties>,
    pub elements: Vec<ElementRecord>,
    pub point_loads: Vec<PointLoad>,
    pub distributed_loads: Vec<DistributedLoad>,
    #[serde(default)]
    pub provenance: String,
}

impl FrameModel {
    pub fn node(&self, id: NodeId) -> Option<&NodeRecord> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn element(&self, id: ElementId) -> Option<&ElementRecord> {
        self.elements.iter().find(|e| e.id == id)
    }

    pub fn section(&self, name: &str) -> Option<&SectionProperties> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn support_at(&self, node: NodeId) -> Option<SupportKind> {
        self.supports
            .iter()
            .find(|s| s.node_id == node)
            .map(|s| s.kind)
    }

    pub fn node_index(&self) -> HashMap<NodeId, &NodeRecord> {
        self.nodes.iter().map(|n| (n.id, n)).collect()
    }

    /// End coordinates of a resolved element.
    pub fn element_coords(&self, element: &ElementRecord) -> Option<([f64; 2], [f64; 2])> {
        let at = |end: ElementEnd| match end {
            ElementEnd::Node(id) => self.node(id).map(|n| [n.x, n.y]),
            ElementEnd::Point(p) => Some(p),
        };
        Some((at(element.end_i)?, at(element.end_j)?))
    }

    pub fn element_length(&self, element: &ElementRecord) -> Option<f64> {
        let (a, b) = self.element_coords(element)?;
        Some((b[0] - a[0]).hypot(b[1] - a[1]))
    }

    pub fn has_loads(&self) -> bool {
        !self.point_loads.is_empty() || !self.distributed_loads.is_empty()
    }

    /// Sorts every array into the canonical order: by id, supports and
    /// point loads by node, distributed loads by element, sections by
    /// name. Sorting is stable so repeated loads keep their order.
    pub fn canonicalize(&mut self) {
        self.nodes.sort_by_key(|n| n.id);
        self.supports.sort_by_key(|s| s.node_id);
        self.sections.sort_by(|a, b| a.name.cmp(&b.name));
        self.elements.sort_by_key(|e| e.id);
        self.point_loads.sort_by_key(|l| l.node_id);
        self.distributed_loads.sort_by_key(|l| l.element_id);
    }

    pub fn canonicalized(mut self) -> Self {
        self.canonicalize();
        self
    }
}

/// Whether `name` is usable as a section identifier in every dialect.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn close_rel(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Single-bay, single-story fixed portal: 6 m span, 3 m high, one
    /// lateral load at the top-left node and a UDL on the girder.
    pub fn portal() -> FrameModel {
        FrameModel {
            units: UnitSystem::KN_M,
            nodes: vec![
                NodeRecord::new(1, 0.0, 0.0),
                NodeRecord::new(2, 6.0, 0.0),
                NodeRecord::new(3, 0.0, 3.0),
                NodeRecord::new(4, 6.0, 3.0),
            ],
            supports: vec![
                SupportRecord {
                    node_id: 1,
                    kind: SupportKind::Fixed,
                },
                SupportRecord {
                    node_id: 2,
                    kind: SupportKind::Fixed,
                },
            ],
            sections: vec![
                SectionProperties::new("COL", 2.0e8, 0.04, 2.0e-4),
                SectionProperties::new("GIR", 2.0e8, 0.03, 1.5e-4),
            ],
            elements: vec![
                element(1, ElementKind::Column, 1, 3, "COL"),
                element(2, ElementKind::Column, 2, 4, "COL"),
                element(3, ElementKind::Girder, 3, 4, "GIR"),
            ],
            point_loads: vec![PointLoad {
                node_id: 3,
                fx: 10.0,
                fy: 0.0,
                mz: 0.0,
            }],
            distributed_loads: vec![DistributedLoad {
                element_id: 3,
                w_transverse: -5.0,
            }],
            provenance: "portal fixture".into(),
        }
    }

    pub fn element(id: u32, kind: ElementKind, i: u32, j: u32, section: &str) -> ElementRecord {
        ElementRecord {
            id,
            kind,
            end_i: ElementEnd::Node(i),
            end_j: ElementEnd::Node(j),
            section: section.into(),
            description: String::new(),
        }
    }
}

//! Story-based re-expression of a frame model, as ETABS organizes it.
//!
//! Distinct node elevations become levels (`BASE`, `STORY1`, ...) and
//! distinct column-line abscissae become base points. Columns and girders
//! are defined once as line templates over base points, then assigned to
//! the stories where they exist. Irregular frames simply have fewer
//! assignments in the upper stories.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diag::{has_errors, Diagnostic};
use crate::model::{
    validate_model_with, DistributedLoad, ElementEnd, ElementId, ElementKind, ElementRecord,
    FrameModel, NodeId, NodeRecord, PointLoad, SectionProperties, SupportKind, SupportRecord,
};
use crate::units::UnitSystem;

pub const BASE_LEVEL: &str = "BASE";

pub fn story_name(k: usize) -> String {
    format!("STORY{k}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoryLevel {
    pub name: String,
    pub elevation: f64,
    /// Distance to the level below; 0 for the base.
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasePoint {
    pub name: String,
    pub x: f64,
}

/// A column (`point_i == point_j`) or girder defined on the base grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineTemplate {
    pub name: String,
    pub kind: ElementKind,
    pub point_i: String,
    pub point_j: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointAssignment {
    pub point: String,
    pub level: String,
    pub node_id: NodeId,
    pub support: Option<SupportKind>,
    pub description: String,
}

/// A template present in one story. Columns span from the level below up
/// to `story`; girders sit at `story`'s elevation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineAssignment {
    pub line: String,
    pub story: String,
    pub element_id: ElementId,
    pub section: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointLoadAssignment {
    pub point: String,
    pub level: String,
    pub fx: f64,
    pub fy: f64,
    pub mz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineLoadAssignment {
    pub line: String,
    pub story: String,
    pub w_transverse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoryModel {
    pub units: UnitSystem,
    /// Top level first, `BASE` last.
    pub story_levels: Vec<StoryLevel>,
    pub base_points: Vec<BasePoint>,
    pub line_templates: Vec<LineTemplate>,
    pub point_assignments: Vec<PointAssignment>,
    pub line_assignments: Vec<LineAssignment>,
    pub point_loads: Vec<PointLoadAssignment>,
    pub line_loads: Vec<LineLoadAssignment>,
    pub sections: Vec<SectionProperties>,
    pub provenance: String,
}

impl StoryModel {
    /// Story names bottom-up, base excluded.
    pub fn stories(&self) -> Vec<&str> {
        self.story_levels
            .iter()
            .rev()
            .filter(|l| l.name != BASE_LEVEL)
            .map(|l| l.name.as_str())
            .collect()
    }

    pub fn lines_in_story<'a>(
        &'a self,
        story: &'a str,
    ) -> impl Iterator<Item = &'a LineAssignment> {
        self.line_assignments
            .iter()
            .filter(move |a| a.story == story)
    }

    pub fn points_at_level<'a>(
        &'a self,
        level: &'a str,
    ) -> impl Iterator<Item = &'a PointAssignment> {
        self.point_assignments
            .iter()
            .filter(move |a| a.level == level)
    }

    pub fn template(&self, name: &str) -> Option<&LineTemplate> {
        self.line_templates.iter().find(|t| t.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StoryError {
    #[error("INVALID_MODEL: model has {} validation error(s)", .0.iter().filter(|d| d.is_error()).count())]
    InvalidModel(Vec<Diagnostic>),
    #[error("NON_STRATIFIED_MODEL: {0}")]
    NonStratified(String),
    #[error("NON_CANONICAL_ORIENTATION: element {0} must run bottom-to-top or left-to-right")]
    NonCanonicalOrientation(ElementId),
    #[error("SUPPORT_ABOVE_BASE: node {0} is supported above the base level")]
    SupportAboveBase(NodeId),
}

impl StoryError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::InvalidModel(_) => "INVALID_MODEL",
            Self::NonStratified(_) => "NON_STRATIFIED_MODEL",
            Self::NonCanonicalOrientation(_) => "NON_CANONICAL_ORIENTATION",
            Self::SupportAboveBase(_) => "SUPPORT_ABOVE_BASE",
        }
    }
}

/// Sorted distinct values, merging neighbours closer than `tol` into the
/// first member of the run.
fn cluster(mut values: Vec<f64>, tol: f64) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for v in values {
        match out.last() {
            Some(&last) if v - last <= tol => {}
            _ => out.push(v),
        }
    }
    out
}

fn index_of(sorted: &[f64], v: f64, tol: f64) -> Option<usize> {
    sorted.iter().position(|&s| (s - v).abs() <= tol)
}

pub fn to_story_model(model: &FrameModel, tol: f64) -> Result<StoryModel, StoryError> {
    let diags = validate_model_with(model, tol);
    if has_errors(&diags) {
        return Err(StoryError::InvalidModel(diags));
    }

    let elevations = cluster(model.nodes.iter().map(|n| n.y).collect(), tol);
    let xs = cluster(model.nodes.iter().map(|n| n.x).collect(), tol);
    if let Some(&base) = elevations.first() {
        if base.abs() > tol {
            return Err(StoryError::NonStratified(format!(
                "lowest node elevation {base} is not the base elevation 0"
            )));
        }
    }

    let level_names: Vec<String> = (0..elevations.len())
        .map(|k| {
            if k == 0 {
                BASE_LEVEL.to_string()
            } else {
                story_name(k)
            }
        })
        .collect();
    let story_levels = (0..elevations.len())
        .rev()
        .map(|k| StoryLevel {
            name: level_names[k].clone(),
            elevation: elevations[k],
            height: if k == 0 {
                0.0
            } else {
                elevations[k] - elevations[k - 1]
            },
        })
        .collect();
    let base_points: Vec<BasePoint> = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| BasePoint {
            name: (i + 1).to_string(),
            x,
        })
        .collect();

    // node -> (point index, level index)
    let mut grid: HashMap<NodeId, (usize, usize)> = HashMap::new();
    let mut point_assignments = Vec::with_capacity(model.nodes.len());
    for n in &model.nodes {
        let p = index_of(&xs, n.x, tol).expect("x was clustered from the nodes");
        let k = index_of(&elevations, n.y, tol).expect("y was clustered from the nodes");
        let support = model.support_at(n.id);
        if support.is_some() && k != 0 {
            return Err(StoryError::SupportAboveBase(n.id));
        }
        grid.insert(n.id, (p, k));
        point_assignments.push(PointAssignment {
            point: base_points[p].name.clone(),
            level: level_names[k].clone(),
            node_id: n.id,
            support,
            description: n.description.clone(),
        });
    }

    // (template key, story level index) per element
    #[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
    enum Key {
        Column(usize),
        Girder(usize, usize),
    }
    let mut placed: Vec<(Key, usize)> = Vec::with_capacity(model.elements.len());
    for e in &model.elements {
        let (i, j) = e.nodes().expect("validated models are resolved");
        let (pi, ki) = grid[&i];
        let (pj, kj) = grid[&j];
        let entry = match e.kind {
            ElementKind::Column => {
                if kj < ki {
                    return Err(StoryError::NonCanonicalOrientation(e.id));
                }
                if kj != ki + 1 {
                    return Err(StoryError::NonStratified(format!(
                        "column {} spans levels {} to {}",
                        e.id, level_names[ki], level_names[kj]
                    )));
                }
                (Key::Column(pi), kj)
            }
            ElementKind::Girder => {
                if pj < pi {
                    return Err(StoryError::NonCanonicalOrientation(e.id));
                }
                if ki == 0 {
                    return Err(StoryError::NonStratified(format!(
                        "girder {} lies on the base level",
                        e.id
                    )));
                }
                (Key::Girder(pi, pj), ki)
            }
        };
        placed.push(entry);
    }

    let mut keys: Vec<Key> = placed.iter().map(|(k, _)| *k).collect();
    keys.sort();
    keys.dedup();
    let mut template_names = HashMap::new();
    let mut line_templates = Vec::with_capacity(keys.len());
    let mut girders = 0;
    for key in keys {
        let (name, kind, a, b) = match key {
            Key::Column(p) => (format!("C{}", p + 1), ElementKind::Column, p, p),
            Key::Girder(a, b) => {
                girders += 1;
                (format!("B{girders}"), ElementKind::Girder, a, b)
            }
        };
        template_names.insert(key, name.clone());
        line_templates.push(LineTemplate {
            name,
            kind,
            point_i: base_points[a].name.clone(),
            point_j: base_points[b].name.clone(),
        });
    }

    let mut element_slot = HashMap::new();
    let line_assignments = model
        .elements
        .iter()
        .zip(&placed)
        .map(|(e, (key, k))| {
            element_slot.insert(e.id, (template_names[key].clone(), *k));
            LineAssignment {
                line: template_names[key].clone(),
                story: level_names[*k].clone(),
                element_id: e.id,
                section: e.section.clone(),
                description: e.description.clone(),
            }
        })
        .collect();

    let point_loads = model
        .point_loads
        .iter()
        .map(|l| {
            let (p, k) = grid[&l.node_id];
            PointLoadAssignment {
                point: base_points[p].name.clone(),
                level: level_names[k].clone(),
                fx: l.fx,
                fy: l.fy,
                mz: l.mz,
            }
        })
        .collect();
    let line_loads = model
        .distributed_loads
        .iter()
        .map(|l| {
            let (line, k) = &element_slot[&l.element_id];
            LineLoadAssignment {
                line: line.clone(),
                story: level_names[*k].clone(),
                w_transverse: l.w_transverse,
            }
        })
        .collect();

    Ok(StoryModel {
        units: model.units,
        story_levels,
        base_points,
        line_templates,
        point_assignments,
        line_assignments,
        point_loads,
        line_loads,
        sections: model.sections.clone(),
        provenance: model.provenance.clone(),
    })
}

/// Rebuilds the object model. References to unknown points, levels or
/// templates become node id 0, which validation reports as dangling.
pub fn from_story_model(sm: &StoryModel) -> FrameModel {
    let point_x: HashMap<&str, f64> = sm
        .base_points
        .iter()
        .map(|p| (p.name.as_str(), p.x))
        .collect();
    let mut ascending: Vec<&StoryLevel> = sm.story_levels.iter().collect();
    ascending.sort_by(|a, b| a.elevation.total_cmp(&b.elevation));
    let elevation: HashMap<&str, f64> = ascending
        .iter()
        .map(|l| (l.name.as_str(), l.elevation))
        .collect();
    let below: HashMap<&str, &str> = ascending
        .windows(2)
        .map(|w| (w[1].name.as_str(), w[0].name.as_str()))
        .collect();

    let mut node_at: HashMap<(&str, &str), NodeId> = HashMap::new();
    let mut nodes = Vec::with_capacity(sm.point_assignments.len());
    let mut supports = Vec::new();
    for a in &sm.point_assignments {
        node_at.insert((a.point.as_str(), a.level.as_str()), a.node_id);
        nodes.push(NodeRecord {
            id: a.node_id,
            x: point_x.get(a.point.as_str()).copied().unwrap_or(f64::NAN),
            y: elevation.get(a.level.as_str()).copied().unwrap_or(f64::NAN),
            description: a.description.clone(),
        });
        if let Some(kind) = a.support {
            supports.push(SupportRecord {
                node_id: a.node_id,
                kind,
            });
        }
    }
    let lookup = |point: &str, level: &str| node_at.get(&(point, level)).copied().unwrap_or(0);

    let mut elements = Vec::with_capacity(sm.line_assignments.len());
    let mut slot_element: HashMap<(&str, &str), ElementId> = HashMap::new();
    for a in &sm.line_assignments {
        slot_element.insert((a.line.as_str(), a.story.as_str()), a.element_id);
        let (kind, i, j) = match sm.template(&a.line) {
            Some(t) if t.kind == ElementKind::Column => {
                let lower = below.get(a.story.as_str()).copied().unwrap_or("");
                (
                    ElementKind::Column,
                    lookup(&t.point_i, lower),
                    lookup(&t.point_i, &a.story),
                )
            }
            Some(t) => (
                ElementKind::Girder,
                lookup(&t.point_i, &a.story),
                lookup(&t.point_j, &a.story),
            ),
            None => (ElementKind::Girder, 0, 0),
        };
        elements.push(ElementRecord {
            id: a.element_id,
            kind,
            end_i: ElementEnd::Node(i),
            end_j: ElementEnd::Node(j),
            section: a.section.clone(),
            description: a.description.clone(),
        });
    }

    let point_loads = sm
        .point_loads
        .iter()
        .map(|l| PointLoad {
            node_id: lookup(&l.point, &l.level),
            fx: l.fx,
            fy: l.fy,
            mz: l.mz,
        })
        .collect();
    let distributed_loads = sm
        .line_loads
        .iter()
        .map(|l| DistributedLoad {
            element_id: slot_element
                .get(&(l.line.as_str(), l.story.as_str()))
                .copied()
                .unwrap_or(0),
            w_transverse: l.w_transverse,
        })
        .collect();

    FrameModel {
        units: sm.units,
        nodes,
        supports,
        sections: sm.sections.clone(),
        elements,
        point_loads,
        distributed_loads,
        provenance: sm.provenance.clone(),
    }
    .canonicalized()
}

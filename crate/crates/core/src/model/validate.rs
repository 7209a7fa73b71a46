use std::collections::{HashMap, HashSet};

use super::{is_identifier, ElementEnd, ElementKind, FrameModel, NodeId, COORD_TOL};
use crate::diag::{Diagnostic, DiagnosticCode as Code, Subject};

/// Checks every model invariant and returns one diagnostic per violation.
/// An empty list means the model is well-formed and analyzable.
pub fn validate_model(model: &FrameModel) -> Vec<Diagnostic> {
    validate_model_with(model, COORD_TOL)
}

pub fn validate_model_with(model: &FrameModel, tol: f64) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let node_ids = check_nodes(model, tol, &mut out);
    let section_names = check_sections(model, &mut out);
    check_elements(model, &node_ids, &section_names, tol, &mut out);
    check_supports(model, &node_ids, tol, &mut out);
    check_loads(model, &node_ids, &mut out);
    check_connected(model, &node_ids, &mut out);
    if !model.has_loads() {
        out.push(Diagnostic::warning(
            Code::NoLoads,
            Subject::Model,
            "model carries no loads and cannot be analyzed",
        ));
    }
    out
}

fn check_nodes(model: &FrameModel, tol: f64, out: &mut Vec<Diagnostic>) -> HashSet<NodeId> {
    let mut ids = HashSet::new();
    for node in &model.nodes {
        if !ids.insert(node.id) {
            out.push(Diagnostic::error(
                Code::DuplicateNodeId,
                Subject::Node(node.id),
                "node id defined more than once",
            ));
        }
        if !node.x.is_finite() || !node.y.is_finite() {
            out.push(Diagnostic::error(
                Code::NonFiniteValue,
                Subject::Node(node.id),
                "node coordinate is not finite",
            ));
        }
    }

    // sweep over x-sorted nodes; only neighbours within tol in x can clash
    let mut order: Vec<_> = model.nodes.iter().filter(|n| n.x.is_finite()).collect();
    order.sort_by(|a, b| a.x.total_cmp(&b.x));
    for (i, a) in order.iter().enumerate() {
        for b in order[i + 1..].iter().take_while(|b| b.x - a.x <= tol) {
            if (b.y - a.y).abs() <= tol {
                out.push(Diagnostic::error(
                    Code::DuplicateCoordinate,
                    Subject::Node(b.id),
                    format!(
                        "node {} and node {} share coordinate ({}, {})",
                        a.id, b.id, b.x, b.y
                    ),
                ));
            }
        }
    }
    ids
}

fn check_sections<'a>(model: &'a FrameModel, out: &mut Vec<Diagnostic>) -> HashSet<&'a str> {
    let mut names = HashSet::new();
    for s in &model.sections {
        let subject = || Subject::Section(s.name.clone());
        if !names.insert(s.name.as_str()) {
            out.push(Diagnostic::error(
                Code::DuplicateSectionName,
                subject(),
                "section name defined more than once",
            ));
        }
        if !is_identifier(&s.name) {
            out.push(Diagnostic::error(
                Code::InvalidSectionName,
                subject(),
                "section names must match [A-Za-z][A-Za-z0-9_]*",
            ));
        }
        for (label, v) in [
            ("E", s.youngs_modulus),
            ("A", s.area),
            ("I", s.moment_of_inertia),
        ] {
            if !(v.is_finite() && v > 0.0) {
                out.push(Diagnostic::error(
                    Code::InvalidSection,
                    subject(),
                    format!("{label} must be positive and finite, got {v}"),
                ));
            }
        }
    }
    names
}

fn check_elements(
    model: &FrameModel,
    node_ids: &HashSet<NodeId>,
    sections: &HashSet<&str>,
    tol: f64,
    out: &mut Vec<Diagnostic>,
) {
    let mut ids = HashSet::new();
    for e in &model.elements {
        let subject = || Subject::Element(e.id);
        if !ids.insert(e.id) {
            out.push(Diagnostic::error(
                Code::DuplicateElementId,
                subject(),
                "element id defined more than once",
            ));
        }
        if !sections.contains(e.section.as_str()) {
            out.push(Diagnostic::error(
                Code::DanglingSectionRef,
                subject(),
                format!("references unknown section `{}`", e.section),
            ));
        }
        let mut resolved = true;
        for end in [e.end_i, e.end_j] {
            match end {
                ElementEnd::Node(id) if !node_ids.contains(&id) => {
                    resolved = false;
                    out.push(Diagnostic::error(
                        Code::DanglingNodeRef,
                        subject(),
                        format!("references unknown node {id}"),
                    ));
                }
                ElementEnd::Node(_) => {}
                ElementEnd::Point([x, y]) => {
                    resolved = false;
                    out.push(Diagnostic::error(
                        Code::UnresolvedEnd,
                        subject(),
                        format!("end at ({x}, {y}) was never resolved to a node"),
                    ));
                }
            }
        }
        if e.end_i == e.end_j {
            out.push(Diagnostic::error(
                Code::DegenerateElement,
                subject(),
                "both ends reference the same node",
            ));
            continue;
        }
        if !resolved {
            continue;
        }
        let Some((a, b)) = model.element_coords(e) else {
            continue;
        };
        match e.kind {
            ElementKind::Column if (a[0] - b[0]).abs() > tol => out.push(Diagnostic::error(
                Code::ColumnNotVertical,
                subject(),
                format!("column ends differ in x ({} vs {})", a[0], b[0]),
            )),
            ElementKind::Girder if (a[1] - b[1]).abs() > tol => out.push(Diagnostic::error(
                Code::GirderNotHorizontal,
                subject(),
                format!("girder ends differ in y ({} vs {})", a[1], b[1]),
            )),
            _ => {}
        }
    }
}

fn check_supports(
    model: &FrameModel,
    node_ids: &HashSet<NodeId>,
    tol: f64,
    out: &mut Vec<Diagnostic>,
) {
    let mut seen = HashSet::new();
    for s in &model.supports {
        if !node_ids.contains(&s.node_id) {
            out.push(Diagnostic::error(
                Code::DanglingNodeRef,
                Subject::Support(s.node_id),
                format!("support references unknown node {}", s.node_id),
            ));
        } else if !seen.insert(s.node_id) {
            out.push(Diagnostic::error(
                Code::MultipleSupports,
                Subject::Support(s.node_id),
                "node carries more than one support",
            ));
        }
    }
    for n in &model.nodes {
        if n.y.abs() <= tol && !seen.contains(&n.id) {
            out.push(Diagnostic::error(
                Code::UnsupportedBaseNode,
                Subject::Node(n.id),
                "node at base elevation has no support",
            ));
        }
    }
}

fn check_loads(model: &FrameModel, node_ids: &HashSet<NodeId>, out: &mut Vec<Diagnostic>) {
    for (i, l) in model.point_loads.iter().enumerate() {
        if !node_ids.contains(&l.node_id) {
            out.push(Diagnostic::error(
                Code::DanglingNodeRef,
                Subject::PointLoad(i),
                format!("point load references unknown node {}", l.node_id),
            ));
        }
        let comps = [l.fx, l.fy, l.mz];
        if comps.iter().any(|v| !v.is_finite()) {
            out.push(Diagnostic::error(
                Code::NonFiniteValue,
                Subject::PointLoad(i),
                "point load component is not finite",
            ));
        } else if comps.iter().all(|&v| v == 0.0) {
            out.push(Diagnostic::error(
                Code::ZeroPointLoad,
                Subject::PointLoad(i),
                "point load has no nonzero component",
            ));
        }
    }

    let kinds: HashMap<_, _> = model.elements.iter().map(|e| (e.id, e.kind)).collect();
    for (i, l) in model.distributed_loads.iter().enumerate() {
        match kinds.get(&l.element_id) {
            None => out.push(Diagnostic::error(
                Code::DanglingElementRef,
                Subject::DistributedLoad(i),
                format!(
                    "distributed load references unknown element {}",
                    l.element_id
                ),
            )),
            Some(ElementKind::Column) => out.push(Diagnostic::error(
                Code::LoadOnColumn,
                Subject::DistributedLoad(i),
                format!(
                    "element {} is a column; UDLs apply to girders only",
                    l.element_id
                ),
            )),
            Some(ElementKind::Girder) => {}
        }
        if !l.w_transverse.is_finite() {
            out.push(Diagnostic::error(
                Code::NonFiniteValue,
                Subject::DistributedLoad(i),
                "distributed load intensity is not finite",
            ));
        }
    }
}

fn check_connected(model: &FrameModel, node_ids: &HashSet<NodeId>, out: &mut Vec<Diagnostic>) {
    let Some(first) = model.nodes.first() else {
        return;
    };
    let mut adjacency: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    for (i, j) in model.elements.iter().filter_map(|e| e.nodes()) {
        if node_ids.contains(&i) && node_ids.contains(&j) {
            adjacency.entry(i).or_default().push(j);
            adjacency.entry(j).or_default().push(i);
        }
    }
    let mut seen = HashSet::from([first.id]);
    let mut stack = vec![first.id];
    while let Some(n) = stack.pop() {
        for &m in adjacency.get(&n).into_iter().flatten() {
            if seen.insert(m) {
                stack.push(m);
            }
        }
    }
    for n in &model.nodes {
        if !seen.contains(&n.id) {
            out.push(Diagnostic::error(
                Code::Disconnected,
                Subject::Node(n.id),
                format!("node {} is not connected to node {}", n.id, first.id),
            ));
        }
    }
}

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::model::{close_rel, find_node_at, ElementId, FrameModel, NodeId};

/// Relative tolerance for section properties and load values.
pub const VALUE_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MismatchCategory {
    Units,
    Count,
    Node,
    Support,
    Section,
    Element,
    Load,
}

impl fmt::Display for MismatchCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Units => "units",
            Self::Count => "count",
            Self::Node => "node",
            Self::Support => "support",
            Self::Section => "section",
            Self::Element => "element",
            Self::Load => "load",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub category: MismatchCategory,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub mismatches: Vec<Mismatch>,
    /// Node of `a` to its counterpart in `b`.
    #[serde(skip)]
    pub node_map: HashMap<NodeId, NodeId>,
    /// Element of `a` to its counterpart in `b`, with whether `b` runs the
    /// other way.
    #[serde(skip)]
    pub element_map: HashMap<ElementId, (ElementId, bool)>,
}

impl EquivalenceReport {
    pub fn categories(&self) -> Vec<MismatchCategory> {
        let mut c: Vec<_> = self.mismatches.iter().map(|m| m.category).collect();
        c.sort();
        c.dedup();
        c
    }
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.equivalent {
            return writeln!(f, "equivalent");
        }
        writeln!(f, "not equivalent: {} mismatch(es)", self.mismatches.len())?;
        for m in &self.mismatches {
            writeln!(f, "  {}: {}", m.category, m.detail)?;
        }
        Ok(())
    }
}

struct Report(Vec<Mismatch>);

impl Report {
    fn push(&mut self, category: MismatchCategory, detail: String) {
        self.0.push(Mismatch { category, detail });
    }

    fn count(&mut self, what: &str, a: usize, b: usize) {
        if a != b {
            self.push(MismatchCategory::Count, format!("{what}: {a} vs {b}"));
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    close_rel(a, b, VALUE_REL_TOL)
}

/// Structural equivalence of two models, independent of ids and array
/// order. Coordinates match within `tol`; values within [`VALUE_REL_TOL`].
pub fn models_equivalent(a: &FrameModel, b: &FrameModel, tol: f64) -> EquivalenceReport {
    use MismatchCategory::*;
    let mut r = Report(Vec::new());

    if a.units != b.units {
        r.push(Units, format!("{} vs {}", a.units, b.units));
    }
    r.count("nodes", a.nodes.len(), b.nodes.len());
    r.count("elements", a.elements.len(), b.elements.len());
    r.count("supports", a.supports.len(), b.supports.len());
    r.count("point loads", a.point_loads.len(), b.point_loads.len());
    r.count(
        "distributed loads",
        a.distributed_loads.len(),
        b.distributed_loads.len(),
    );

    // nodes: bijection by coordinates
    let mut node_map = HashMap::new();
    let mut taken: HashMap<NodeId, NodeId> = HashMap::new();
    for n in &a.nodes {
        match find_node_at(&b.nodes, n.x, n.y, tol) {
            Ok(m) => {
                if let Some(prev) = taken.insert(m, n.id) {
                    r.push(
                        Node,
                        format!("nodes {prev} and {} both match node {m}", n.id),
                    );
                }
                node_map.insert(n.id, m);
            }
            Err(_) => r.push(
                Node,
                format!("node {} at ({}, {}) has no match", n.id, n.x, n.y),
            ),
        }
    }

    for s in &a.supports {
        let Some(&m) = node_map.get(&s.node_id) else {
            continue;
        };
        match b.support_at(m) {
            Some(k) if k == s.kind => {}
            other => r.push(
                Support,
                format!(
                    "node {}: {} vs {}",
                    s.node_id,
                    s.kind,
                    other.map_or("free".to_string(), |k| k.to_string())
                ),
            ),
        }
    }
    for s in &b.supports {
        if !taken.contains_key(&s.node_id) {
            continue;
        }
        let a_node = taken[&s.node_id];
        if a.support_at(a_node).is_none() {
            r.push(Support, format!("node {a_node}: free vs {}", s.kind));
        }
    }

    // sections: each used value set of `a` must exist in `b`
    let mut used_b = vec![false; b.sections.len()];
    for s in &a.sections {
        let hit = b
            .sections
            .iter()
            .enumerate()
            .find(|(i, t)| !used_b[*i] && t.same_values(s, VALUE_REL_TOL));
        match hit {
            Some((i, _)) => used_b[i] = true,
            None => r.push(Section, format!("section {} has no match", s.name)),
        }
    }

    // elements: unordered endpoint pair
    let mut by_pair: HashMap<(NodeId, NodeId), Vec<usize>> = HashMap::new();
    for (i, e) in b.elements.iter().enumerate() {
        if let Some((p, q)) = e.nodes() {
            by_pair.entry((p.min(q), p.max(q))).or_default().push(i);
        }
    }
    let mut element_map = HashMap::new();
    for e in &a.elements {
        let mapped = e
            .nodes()
            .and_then(|(p, q)| Some((*node_map.get(&p)?, *node_map.get(&q)?)));
        let Some((p, q)) = mapped else {
            r.push(Element, format!("element {} has unmatched ends", e.id));
            continue;
        };
        let Some(f) = by_pair.get_mut(&(p.min(q), p.max(q))).and_then(|v| v.pop()) else {
            r.push(Element, format!("element {} has no match", e.id));
            continue;
        };
        let other = &b.elements[f];
        if other.kind != e.kind {
            r.push(
                Element,
                format!("element {}: {} vs {}", e.id, e.kind, other.kind),
            );
        }
        let same_section = match (a.section(&e.section), b.section(&other.section)) {
            (Some(x), Some(y)) => x.same_values(y, VALUE_REL_TOL),
            _ => false,
        };
        if !same_section {
            r.push(
                Element,
                format!(
                    "element {}: section {} vs {}",
                    e.id, e.section, other.section
                ),
            );
        }
        let reversed = other.nodes().map(|(i, _)| i) != Some(p);
        element_map.insert(e.id, (other.id, reversed));
    }

    // point loads: multiset per mapped node
    let mut pending: Vec<Option<&crate::model::PointLoad>> =
        b.point_loads.iter().map(Some).collect();
    for l in &a.point_loads {
        let Some(&m) = node_map.get(&l.node_id) else {
            r.push(Load, format!("point load at unmatched node {}", l.node_id));
            continue;
        };
        let hit = pending.iter_mut().find(|slot| {
            slot.is_some_and(|o| {
                o.node_id == m && close(o.fx, l.fx) && close(o.fy, l.fy) && close(o.mz, l.mz)
            })
        });
        match hit {
            Some(slot) => *slot = None,
            None => r.push(
                Load,
                format!(
                    "point load ({}, {}, {}) at node {} has no match",
                    l.fx, l.fy, l.mz, l.node_id
                ),
            ),
        }
    }

    // distributed loads: global intensity, so orientation does not matter
    let mut pending: Vec<Option<&crate::model::DistributedLoad>> =
        b.distributed_loads.iter().map(Some).collect();
    for l in &a.distributed_loads {
        let Some(&(m, _)) = element_map.get(&l.element_id) else {
            r.push(Load, format!("UDL on unmatched element {}", l.element_id));
            continue;
        };
        let hit = pending.iter_mut().find(|slot| {
            slot.is_some_and(|o| o.element_id == m && close(o.w_transverse, l.w_transverse))
        });
        match hit {
            Some(slot) => *slot = None,
            None => r.push(
                Load,
                format!(
                    "UDL {} on element {} has no match",
                    l.w_transverse, l.element_id
                ),
            ),
        }
    }

    EquivalenceReport {
        equivalent: r.0.is_empty(),
        mismatches: r.0,
        node_map,
        element_map,
    }
}

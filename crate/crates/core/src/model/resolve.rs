use thiserror::Error;

use super::{ElementEnd, ElementId, ElementRecord, NodeId, NodeRecord};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResolveError {
    #[error("NO_MATCHING_NODE: element {element} end at ({x}, {y}) matches no node")]
    NoMatchingNode { element: ElementId, x: f64, y: f64 },
    #[error("AMBIGUOUS_MATCH: element {element} end at ({x}, {y}) matches nodes {candidates:?}")]
    AmbiguousMatch {
        element: ElementId,
        x: f64,
        y: f64,
        candidates: Vec<NodeId>,
    },
}

impl ResolveError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::NoMatchingNode { .. } => "NO_MATCHING_NODE",
            Self::AmbiguousMatch { .. } => "AMBIGUOUS_MATCH",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LookupError {
    NotFound,
    Ambiguous(Vec<NodeId>),
}

/// The unique node within `tol` of `(x, y)` on both axes.
pub fn find_node_at(nodes: &[NodeRecord], x: f64, y: f64, tol: f64) -> Result<NodeId, LookupError> {
    let mut hits = nodes
        .iter()
        .filter(|n| (n.x - x).abs() <= tol && (n.y - y).abs() <= tol)
        .map(|n| n.id);
    match (hits.next(), hits.next()) {
        (None, _) => Err(LookupError::NotFound),
        (Some(id), None) => Ok(id),
        (Some(a), Some(b)) => {
            let mut all = vec![a, b];
            all.extend(hits);
            Err(LookupError::Ambiguous(all))
        }
    }
}

/// Replaces every coordinate end with the id of the node at that location.
/// Ends that are already node ids pass through. Element order is kept.
pub fn resolve_connectivity(
    nodes: &[NodeRecord],
    elements: &[ElementRecord],
    tol: f64,
) -> Result<Vec<ElementRecord>, ResolveError> {
    let resolve = |element: ElementId, end: ElementEnd| -> Result<ElementEnd, ResolveError> {
        let ElementEnd::Point([x, y]) = end else {
            return Ok(end);
        };
        match find_node_at(nodes, x, y, tol) {
            Ok(id) => Ok(ElementEnd::Node(id)),
            Err(LookupError::NotFound) => Err(ResolveError::NoMatchingNode { element, x, y }),
            Err(LookupError::Ambiguous(candidates)) => Err(ResolveError::AmbiguousMatch {
                element,
                x,
                y,
                candidates,
            }),
        }
    };

    elements
        .iter()
        .map(|e| {
            Ok(ElementRecord {
                end_i: resolve(e.id, e.end_i)?,
                end_j: resolve(e.id, e.end_j)?,
                ..e.clone()
            })
        })
        .collect()
}

use serde::Serialize;
use thiserror::Error;

use super::SolutionState;
use crate::model::FrameModel;
use crate::verify::models_equivalent;

/// Default normwise relative tolerance between two solutions.
pub const DEFAULT_SOLUTION_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionComparison {
    pub equivalent: bool,
    /// Largest |a - b| / max(|a|, |b|, field scale) seen.
    pub max_rel_diff: f64,
    /// Every quantity whose difference exceeds the tolerance.
    pub mismatches: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("UNMATCHED_TOPOLOGY: {0}")]
pub struct UnmatchedTopology(pub String);

impl UnmatchedTopology {
    pub fn code(&self) -> &'static str {
        "UNMATCHED_TOPOLOGY"
    }
}

struct Tracker {
    rel: f64,
    max: f64,
    mismatches: Vec<String>,
}

impl Tracker {
    fn check(&mut self, a: f64, b: f64, scale: f64, what: impl FnOnce() -> String) {
        let denom = a.abs().max(b.abs()).max(scale);
        let d = if denom == 0.0 {
            0.0
        } else {
            (a - b).abs() / denom
        };
        let d = if d.is_nan() { f64::INFINITY } else { d };
        self.max = self.max.max(d);
        if d > self.rel {
            self.mismatches.push(format!("{}: {a} vs {b}", what()));
        }
    }
}

fn scale(values: impl Iterator<Item = f64>) -> f64 {
    values.map(f64::abs).fold(0.0, f64::max)
}

/// Compares the responses of two structurally equivalent models. Nodes and
/// elements are paired by geometry, so ids and element orientation may
/// differ. Each field is compared relative to the largest magnitude of
/// that field in either solution.
pub fn solutions_equivalent(
    model_a: &FrameModel,
    a: &SolutionState,
    model_b: &FrameModel,
    b: &SolutionState,
    tol: f64,
    rel: f64,
) -> Result<SolutionComparison, UnmatchedTopology> {
    let report = models_equivalent(model_a, model_b, tol);
    if !report.equivalent {
        return Err(UnmatchedTopology(format!(
            "models differ: {}",
            report
                .mismatches
                .iter()
                .map(|m| format!("{}: {}", m.category, m.detail))
                .collect::<Vec<_>>()
                .join("; ")
        )));
    }
    let mut t = Tracker {
        rel,
        max: 0.0,
        mismatches: Vec::new(),
    };

    let both = || a.displacements.iter().chain(&b.displacements);
    let s_u = scale(both().flat_map(|d| [d.ux, d.uy]));
    let s_r = scale(both().map(|d| d.rz));
    for d in &a.displacements {
        let Some(o) = report
            .node_map
            .get(&d.node_id)
            .and_then(|&n| b.displacement(n))
        else {
            return Err(UnmatchedTopology(format!(
                "node {} has no counterpart",
                d.node_id
            )));
        };
        t.check(d.ux, o.ux, s_u, || format!("node {} ux", d.node_id));
        t.check(d.uy, o.uy, s_u, || format!("node {} uy", d.node_id));
        t.check(d.rz, o.rz, s_r, || format!("node {} rz", d.node_id));
    }

    let reactions = || a.reactions.iter().chain(&b.reactions);
    let s_f = scale(reactions().flat_map(|r| [r.fx, r.fy]));
    let s_m = scale(reactions().map(|r| r.mz));
    for r in &a.reactions {
        let Some(o) = report.node_map.get(&r.node_id).and_then(|&n| b.reaction(n)) else {
            return Err(UnmatchedTopology(format!(
                "reaction at node {} has no counterpart",
                r.node_id
            )));
        };
        t.check(r.fx, o.fx, s_f, || format!("reaction {} fx", r.node_id));
        t.check(r.fy, o.fy, s_f, || format!("reaction {} fy", r.node_id));
        t.check(r.mz, o.mz, s_m, || format!("reaction {} mz", r.node_id));
    }

    let elements = || a.elements.iter().chain(&b.elements);
    let s_ef = scale(elements().flat_map(|e| {
        [
            e.end_forces[0],
            e.end_forces[1],
            e.end_forces[3],
            e.end_forces[4],
        ]
    }));
    let s_em = scale(elements().flat_map(|e| [e.end_forces[2], e.end_forces[5]]));
    for e in &a.elements {
        let Some((o, reversed)) = report
            .element_map
            .get(&e.element_id)
            .and_then(|&(id, rev)| Some((b.element(id)?, rev)))
        else {
            return Err(UnmatchedTopology(format!(
                "element {} has no counterpart",
                e.element_id
            )));
        };
        let f = o.end_forces;
        let other = if reversed {
            [-f[3], -f[4], f[5], -f[0], -f[1], f[2]]
        } else {
            f
        };
        for (k, (&mine, &theirs)) in e.end_forces.iter().zip(&other).enumerate() {
            let s = if k % 3 == 2 { s_em } else { s_ef };
            t.check(mine, theirs, s, || {
                format!("element {} end force {k}", e.element_id)
            });
        }
        if e.diagram.len() != o.diagram.len() {
            return Err(UnmatchedTopology(format!(
                "element {} diagram lengths differ",
                e.element_id
            )));
        }
        let n = e.diagram.len();
        for (k, p) in e.diagram.iter().enumerate() {
            let q = if reversed {
                &o.diagram[n - 1 - k]
            } else {
                &o.diagram[k]
            };
            let sign = if reversed { -1.0 } else { 1.0 };
            t.check(p.axial, q.axial, s_ef, || {
                format!("element {} axial @{k}", e.element_id)
            });
            t.check(p.shear, q.shear, s_ef, || {
                format!("element {} shear @{k}", e.element_id)
            });
            t.check(p.moment, sign * q.moment, s_em, || {
                format!("element {} moment @{k}", e.element_id)
            });
        }
    }

    Ok(SolutionComparison {
        equivalent: t.mismatches.is_empty(),
        max_rel_diff: t.max,
        mismatches: t.mismatches,
    })
}

//! Assembly plan, node grid and element connectivity for rectangular
//! frames whose bays may have different story counts.
//!
//! Column line `c` (0-based, `0..=n_bays`) sits at the sum of the widths of
//! the bays to its left and rises to the taller of its adjacent bays. Node
//! ids run left to right within a level and bottom to top across levels.
//! Element ids follow the plan: per cell, the missing columns first, then
//! the girder.

use crate::model::{ElementEnd, ElementKind, ElementRecord, NodeRecord, SupportRecord};
use crate::problem::FrameProblemSpec;

/// One cell of the frame: a bay at a story, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellStep {
    pub story: usize,
    pub bay: usize,
}

/// Cells in bottom-to-top, left-to-right order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionPlan {
    pub steps: Vec<CellStep>,
}

impl ConstructionPlan {
    /// Story count of each column line implied by the plan.
    pub fn line_heights(&self, n_bays: usize) -> Vec<usize> {
        let mut heights = vec![0; n_bays + 1];
        for s in &self.steps {
            for line in [s.bay - 1, s.bay] {
                heights[line] = heights[line].max(s.story);
            }
        }
        heights
    }
}

pub fn build_plan(spec: &FrameProblemSpec) -> ConstructionPlan {
    let steps = (1..=spec.max_stories())
        .flat_map(|story| {
            spec.stories_per_bay
                .iter()
                .enumerate()
                .filter(move |(_, &n)| n >= story)
                .map(move |(b, _)| CellStep { story, bay: b + 1 })
        })
        .collect();
    ConstructionPlan { steps }
}

/// x of every column line, left to right.
pub fn column_line_positions(spec: &FrameProblemSpec) -> Vec<f64> {
    let mut xs = Vec::with_capacity(spec.n_bays + 1);
    let mut x = 0.0;
    xs.push(x);
    for w in &spec.bay_widths {
        x += w;
        xs.push(x);
    }
    xs
}

/// Elevation of every level, base (0) first.
pub fn level_elevations(spec: &FrameProblemSpec) -> Vec<f64> {
    let mut ys = Vec::with_capacity(spec.story_heights.len() + 1);
    let mut y = 0.0;
    ys.push(y);
    for h in &spec.story_heights {
        y += h;
        ys.push(y);
    }
    ys
}

pub fn generate_nodes(
    spec: &FrameProblemSpec,
    plan: &ConstructionPlan,
) -> (Vec<NodeRecord>, Vec<SupportRecord>) {
    let xs = column_line_positions(spec);
    let ys = level_elevations(spec);
    let heights = plan.line_heights(spec.n_bays);
    let top = heights.iter().copied().max().unwrap_or(0);

    let mut nodes = Vec::new();
    let mut supports = Vec::new();
    for (level, &y) in ys.iter().enumerate().take(top + 1) {
        for (line, &x) in xs.iter().enumerate() {
            if heights[line] < level {
                continue;
            }
            let id = nodes.len() as u32 + 1;
            nodes.push(NodeRecord {
                id,
                x,
                y,
                description: format!("line {line} level {level}"),
            });
            if level == 0 {
                supports.push(SupportRecord {
                    node_id: id,
                    kind: spec.support_kind,
                });
            }
        }
    }
    (nodes, supports)
}

/// Elements with coordinate ends, ready for connectivity resolution.
pub fn generate_elements(spec: &FrameProblemSpec, plan: &ConstructionPlan) -> Vec<ElementRecord> {
    let xs = column_line_positions(spec);
    let ys = level_elevations(spec);
    // columns already placed, per line: the highest story built so far
    let mut built = vec![0usize; spec.n_bays + 1];
    let mut out = Vec::new();

    let mut push = |kind, a: [f64; 2], b: [f64; 2], section: &str, description: String| {
        let id = out.len() as u32 + 1;
        out.push(ElementRecord {
            id,
            kind,
            end_i: ElementEnd::Point(a),
            end_j: ElementEnd::Point(b),
            section: section.to_string(),
            description,
        });
    };

    for step in &plan.steps {
        let k = step.story;
        for line in [step.bay - 1, step.bay] {
            if built[line] >= k {
                continue;
            }
            built[line] = k;
            let x = xs[line];
            push(
                ElementKind::Column,
                [x, ys[k - 1]],
                [x, ys[k]],
                &spec.column_section.name,
                format!("column line {line} story {k}"),
            );
        }
        push(
            ElementKind::Girder,
            [xs[step.bay - 1], ys[k]],
            [xs[step.bay], ys[k]],
            &spec.girder_section.name,
            format!("girder bay {} level {k}", step.bay),
        );
    }
    out
}

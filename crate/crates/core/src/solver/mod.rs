//! Linear static direct-stiffness solver for planar frames.
//!
//! Three DOFs per node (ux, uy, rz), nodes numbered in id order. The
//! reduced system over free DOFs is solved with a dense Cholesky
//! factorisation; a non-positive pivot reports the offending DOF.

mod compare;
pub mod element;

use nalgebra::{DMatrix, DVector, Vector6};
use serde::Serialize;
use thiserror::Error;

pub use compare::{
    solutions_equivalent, SolutionComparison, UnmatchedTopology, DEFAULT_SOLUTION_REL_TOL,
};

use crate::diag::{has_errors, Diagnostic, DiagnosticCode, Subject};
use crate::model::{validate_model, ElementId, FrameModel, NodeId};
use crate::units::UnitSystem;
use element::{equivalent_loads, local_stiffness, Geometry};

pub const DOF_NAMES: [&str; 3] = ["ux", "uy", "rz"];

/// Pivots below this fraction of the largest stiffness diagonal count as
/// zero.
pub const PIVOT_REL_TOL: f64 = 1e-13;
pub const ILL_CONDITIONED_ABOVE: f64 = 1e12;
pub const DEFAULT_SAMPLES: usize = 11;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Diagram stations per element, ends included.
    pub samples: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeDisplacement {
    pub node_id: NodeId,
    pub ux: f64,
    pub uy: f64,
    pub rz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reaction {
    pub node_id: NodeId,
    pub fx: f64,
    pub fy: f64,
    pub mz: f64,
}

/// Internal forces at one station; axial is tension-positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagramPoint {
    pub x: f64,
    pub axial: f64,
    pub shear: f64,
    pub moment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementResult {
    pub element_id: ElementId,
    pub length: f64,
    /// Local end forces acting on the element: N_i, V_i, M_i, N_j, V_j, M_j.
    pub end_forces: [f64; 6],
    pub diagram: Vec<DiagramPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionState {
    pub units: UnitSystem,
    pub displacements: Vec<NodeDisplacement>,
    pub reactions: Vec<Reaction>,
    pub elements: Vec<ElementResult>,
    /// Squared ratio of the extreme Cholesky pivots.
    pub condition_estimate: f64,
    #[serde(skip)]
    pub warnings: Vec<Diagnostic>,
}

impl SolutionState {
    pub fn displacement(&self, node: NodeId) -> Option<&NodeDisplacement> {
        self.displacements.iter().find(|d| d.node_id == node)
    }

    pub fn reaction(&self, node: NodeId) -> Option<&Reaction> {
        self.reactions.iter().find(|r| r.node_id == node)
    }

    pub fn element(&self, id: ElementId) -> Option<&ElementResult> {
        self.elements.iter().find(|e| e.element_id == id)
    }

    pub fn to_json(&self) -> String {
        crate::model::to_canonical_json_value(self)
    }

    /// Largest translation and the reaction list, as printed by `solve`.
    pub fn summary(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::new();
        if let Some(d) = self
            .displacements
            .iter()
            .max_by(|a, b| a.ux.hypot(a.uy).total_cmp(&b.ux.hypot(b.uy)))
        {
            let _ = writeln!(
                s,
                "max displacement: node {} |u| = {:.6e} {} (ux {:.6e}, uy {:.6e})",
                d.node_id,
                d.ux.hypot(d.uy),
                self.units.length_unit,
                d.ux,
                d.uy
            );
        }
        let (mut fx, mut fy) = (0.0, 0.0);
        for r in &self.reactions {
            let _ = writeln!(
                s,
                "reaction node {}: fx {:.6e} fy {:.6e} mz {:.6e}",
                r.node_id, r.fx, r.fy, r.mz
            );
            fx += r.fx;
            fy += r.fy;
        }
        let _ = writeln!(
            s,
            "reaction sum: fx {fx:.6e} fy {fy:.6e} {}",
            self.units.force_unit
        );
        s
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("INVALID_MODEL: model has {} validation error(s)", .0.iter().filter(|d| d.is_error()).count())]
    InvalidModel(Vec<Diagnostic>),
    #[error("SINGULAR_SYSTEM: stiffness is singular at node {node} dof {}", DOF_NAMES[*.dof])]
    Singular { node: NodeId, dof: usize },
}

impl SolveError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::InvalidModel(_) => "INVALID_MODEL",
            Self::Singular { .. } => "SINGULAR_SYSTEM",
        }
    }
}

/// In-place dense Cholesky of a symmetric matrix (lower triangle used).
/// On failure returns the index of the first non-positive pivot.
pub(crate) fn cholesky(a: &mut DMatrix<f64>, pivot_floor: f64) -> Result<(), usize> {
    let n = a.nrows();
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= a[(j, k)] * a[(j, k)];
        }
        // negated so a NaN pivot also fails
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(d > pivot_floor) {
            return Err(j);
        }
        let d = d.sqrt();
        a[(j, j)] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= a[(i, k)] * a[(j, k)];
            }
            a[(i, j)] = s / d;
        }
    }
    Ok(())
}

/// Solves `L L^T x = b` with the factor from [`cholesky`].
pub(crate) fn cholesky_solve(l: &DMatrix<f64>, b: &mut DVector<f64>) {
    let n = l.nrows();
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * b[k];
        }
        b[i] = s / l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[(k, i)] * b[k];
        }
        b[i] = s / l[(i, i)];
    }
}

struct Prepared {
    geometry: Geometry,
    dofs: [usize; 6],
    k_local: nalgebra::Matrix6<f64>,
    t: nalgebra::Matrix6<f64>,
    w_local: (f64, f64),
}

pub fn solve(model: &FrameModel) -> Result<SolutionState, SolveError> {
    solve_with(model, &SolverOptions::default())
}

pub fn solve_with(model: &FrameModel, opts: &SolverOptions) -> Result<SolutionState, SolveError> {
    let diags = validate_model(model);
    if has_errors(&diags) {
        return Err(SolveError::InvalidModel(diags));
    }
    let m = model.clone().canonicalized();
    let index = |id: NodeId| {
        m.nodes
            .binary_search_by_key(&id, |n| n.id)
            .expect("validated reference")
    };
    let ndof = 3 * m.nodes.len();

    let prepared: Vec<Prepared> = m
        .elements
        .iter()
        .map(|e| {
            let (i, j) = e.nodes().expect("validated models are resolved");
            let (a, b) = (&m.nodes[index(i)], &m.nodes[index(j)]);
            let geometry = Geometry::between([a.x, a.y], [b.x, b.y]);
            let sec = m.section(&e.section).expect("validated reference");
            let (ii, jj) = (3 * index(i), 3 * index(j));
            let w: f64 = m
                .distributed_loads
                .iter()
                .filter(|l| l.element_id == e.id)
                .map(|l| l.w_transverse)
                .sum();
            Prepared {
                geometry,
                dofs: [ii, ii + 1, ii + 2, jj, jj + 1, jj + 2],
                k_local: local_stiffness(
                    sec.youngs_modulus,
                    sec.area,
                    sec.moment_of_inertia,
                    geometry.length,
                ),
                t: geometry.rotation(),
                w_local: geometry.local_line_load(w),
            }
        })
        .collect();

    let mut k = DMatrix::<f64>::zeros(ndof, ndof);
    let mut f = DVector::<f64>::zeros(ndof);
    for p in &prepared {
        let kg = p.t.transpose() * p.k_local * p.t;
        let fe = p.t.transpose() * equivalent_loads(p.w_local.0, p.w_local.1, p.geometry.length);
        for (r, &gr) in p.dofs.iter().enumerate() {
            f[gr] += fe[r];
            for (c, &gc) in p.dofs.iter().enumerate() {
                k[(gr, gc)] += kg[(r, c)];
            }
        }
    }
    let mut nodal = DVector::<f64>::zeros(ndof);
    for l in &m.point_loads {
        let b = 3 * index(l.node_id);
        nodal[b] += l.fx;
        nodal[b + 1] += l.fy;
        nodal[b + 2] += l.mz;
    }
    f += &nodal;

    let mut restrained = vec![false; ndof];
    for s in &m.supports {
        let b = 3 * index(s.node_id);
        for (d, r) in s.kind.restraints().into_iter().enumerate() {
            restrained[b + d] = r;
        }
    }
    let free: Vec<usize> = (0..ndof).filter(|&d| !restrained[d]).collect();

    let mut kff = DMatrix::<f64>::from_fn(free.len(), free.len(), |r, c| k[(free[r], free[c])]);
    let max_diag = (0..free.len()).map(|d| kff[(d, d)]).fold(0.0, f64::max);
    if let Err(bad) = cholesky(&mut kff, PIVOT_REL_TOL * max_diag) {
        let dof = free[bad];
        return Err(SolveError::Singular {
            node: m.nodes[dof / 3].id,
            dof: dof % 3,
        });
    }
    let mut uf = DVector::from_iterator(free.len(), free.iter().map(|&d| f[d]));
    cholesky_solve(&kff, &mut uf);

    let pivots = (0..free.len()).map(|d| kff[(d, d)]);
    let (lo, hi) = pivots.fold((f64::INFINITY, 0.0f64), |(lo, hi), p| {
        (lo.min(p), hi.max(p))
    });
    let condition_estimate = if free.is_empty() {
        1.0
    } else {
        (hi / lo).powi(2)
    };
    let mut warnings: Vec<Diagnostic> = diags.into_iter().filter(|d| !d.is_error()).collect();
    if condition_estimate > ILL_CONDITIONED_ABOVE {
        warnings.push(Diagnostic::warning(
            DiagnosticCode::IllConditioned,
            Subject::Model,
            format!("condition estimate {condition_estimate:e}"),
        ));
    }

    let mut u = DVector::<f64>::zeros(ndof);
    for (r, &d) in free.iter().enumerate() {
        u[d] = uf[r];
    }

    let mut resisting = DVector::<f64>::zeros(ndof);
    let samples = opts.samples.max(2);
    let elements = m
        .elements
        .iter()
        .zip(&prepared)
        .map(|(e, p)| {
            let ue = Vector6::from_iterator(p.dofs.iter().map(|&d| u[d]));
            let (wx, wy) = p.w_local;
            let l = p.geometry.length;
            let fl = p.k_local * (p.t * ue) - equivalent_loads(wx, wy, l);
            let fg = p.t.transpose() * fl;
            for (r, &d) in p.dofs.iter().enumerate() {
                resisting[d] += fg[r];
            }
            let diagram = (0..samples)
                .map(|s| {
                    let x = l * s as f64 / (samples - 1) as f64;
                    DiagramPoint {
                        x,
                        axial: -(fl[0] + wx * x),
                        shear: fl[1] + wy * x,
                        moment: -fl[2] + fl[1] * x + wy * x * x / 2.0,
                    }
                })
                .collect();
            ElementResult {
                element_id: e.id,
                length: l,
                end_forces: fl.into(),
                diagram,
            }
        })
        .collect();

    let reactions = m
        .supports
        .iter()
        .map(|s| {
            let b = 3 * index(s.node_id);
            let r = |d: usize| resisting[b + d] - nodal[b + d];
            Reaction {
                node_id: s.node_id,
                fx: r(0),
                fy: r(1),
                mz: r(2),
            }
        })
        .collect();
    let displacements = m
        .nodes
        .iter()
        .enumerate()
        .map(|(k, n)| NodeDisplacement {
            node_id: n.id,
            ux: u[3 * k],
            uy: u[3 * k + 1],
            rz: u[3 * k + 2],
        })
        .collect();

    Ok(SolutionState {
        units: m.units,
        displacements,
        reactions,
        elements,
        condition_estimate,
        warnings,
    })
}

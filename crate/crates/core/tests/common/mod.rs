//! Shared fixtures for the integration tests: random problem strategies and
//! a brute-force reference solver.
#![allow(dead_code)]

use frameforge::model::{ElementEnd, FrameModel, SectionProperties, SupportKind};
use frameforge::problem::{FrameProblemSpec, Target, COLUMN_SECTION, GIRDER_SECTION};
use frameforge::UnitSystem;
use proptest::prelude::*;

pub fn section(name: &str, e: f64, a: f64, i: f64) -> SectionProperties {
    SectionProperties::new(name, e, a, i)
}

/// A spec with the default benchmark magnitudes.
pub fn spec(stories_per_bay: &[usize], width: f64, height: f64) -> FrameProblemSpec {
    let max = *stories_per_bay.iter().max().unwrap();
    FrameProblemSpec {
        units: UnitSystem::KN_M,
        n_bays: stories_per_bay.len(),
        stories_per_bay: stories_per_bay.to_vec(),
        bay_widths: vec![width; stories_per_bay.len()],
        story_heights: vec![height; max],
        support_kind: SupportKind::Fixed,
        column_section: section(COLUMN_SECTION, 2e8, 0.04, 2e-4),
        girder_section: section(GIRDER_SECTION, 2e8, 0.03, 1.5e-4),
        lateral_load_per_floor: 10.0,
        gravity_udl: 5.0,
        extra_point_loads: Vec::new(),
        target: Target::All,
    }
}

fn quantized(lo: f64, hi: f64, step: f64) -> impl Strategy<Value = f64> {
    let n = ((hi - lo) / step).round() as u32;
    (0..=n).prop_map(move |k| lo + k as f64 * step)
}

fn sections() -> impl Strategy<Value = (SectionProperties, SectionProperties)> {
    (
        prop::sample::select(vec![2e8, 3e7, 7e7]),
        quantized(0.01, 0.1, 0.005),
        quantized(5e-5, 8e-4, 5e-5),
        quantized(0.01, 0.1, 0.005),
        quantized(5e-5, 8e-4, 5e-5),
    )
        .prop_map(|(e, ca, ci, ga, gi)| {
            (
                section(COLUMN_SECTION, e, ca, ci),
                section(GIRDER_SECTION, e, ga, gi),
            )
        })
}

/// Random frame problems. `supports` limits the base condition; pass
/// stable kinds only when the frame will be solved.
pub fn specs(
    max_bays: usize,
    max_stories: usize,
    supports: Vec<SupportKind>,
) -> impl Strategy<Value = FrameProblemSpec> {
    (1..=max_bays)
        .prop_flat_map(move |b| {
            (
                prop::collection::vec(1..=max_stories, b),
                prop::collection::vec(quantized(3.0, 9.0, 0.5), b),
                prop::collection::vec(quantized(2.5, 5.0, 0.25), max_stories),
                prop::sample::select(supports.clone()),
                sections(),
                quantized(0.0, 50.0, 2.5),
                quantized(0.0, 20.0, 0.5),
            )
        })
        .prop_map(
            |(per_bay, widths, heights, support, (col, gir), lateral, udl)| {
                let max = *per_bay.iter().max().unwrap();
                FrameProblemSpec {
                    units: UnitSystem::KN_M,
                    n_bays: per_bay.len(),
                    stories_per_bay: per_bay,
                    bay_widths: widths,
                    story_heights: heights[..max].to_vec(),
                    support_kind: support,
                    column_section: col,
                    girder_section: gir,
                    lateral_load_per_floor: lateral,
                    gravity_udl: udl,
                    extra_point_loads: Vec::new(),
                    target: Target::All,
                }
            },
        )
}

pub fn stable_supports() -> Vec<SupportKind> {
    vec![SupportKind::Fixed, SupportKind::Pinned]
}

pub fn all_supports() -> Vec<SupportKind> {
    SupportKind::ALL.to_vec()
}

/// Relative difference against a scale that keeps near-zero entries from
/// dominating.
pub fn rel_diff(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(scale)
}

pub struct OracleSolution {
    /// ux, uy, rz per node, in model node order.
    pub displacements: Vec<[f64; 3]>,
    /// fx, fy, mz per node; zero rows for free nodes.
    pub reactions: Vec<[f64; 3]>,
}

/// Frame element stiffness written out directly in global coordinates.
fn global_stiffness(e: f64, a: f64, i: f64, x: [f64; 2], y: [f64; 2]) -> [[f64; 6]; 6] {
    let (dx, dy) = (y[0] - x[0], y[1] - x[1]);
    let l = (dx * dx + dy * dy).sqrt();
    let (c, s) = (dx / l, dy / l);
    let ea = e * a / l;
    let b = 12.0 * e * i / (l * l * l);
    let k11 = ea * c * c + b * s * s;
    let k12 = (ea - b) * c * s;
    let k22 = ea * s * s + b * c * c;
    let k13 = -6.0 * e * i / (l * l) * s;
    let k23 = 6.0 * e * i / (l * l) * c;
    let k33 = 4.0 * e * i / l;
    let k36 = 2.0 * e * i / l;
    [
        [k11, k12, k13, -k11, -k12, k13],
        [k12, k22, k23, -k12, -k22, k23],
        [k13, k23, k33, -k13, -k23, k36],
        [-k11, -k12, -k13, k11, k12, -k13],
        [-k12, -k22, -k23, k12, k22, -k23],
        [k13, k23, k36, -k13, -k23, k33],
    ]
}

/// Gaussian elimination with partial pivoting.
fn gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, p);
        b.swap(col, p);
        assert!(a[col][col] != 0.0, "oracle: singular system");
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            let pivot = a[col].clone();
            for (x, p) in a[r][col..].iter_mut().zip(&pivot[col..]) {
                *x -= f * p;
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Reference solution: full global matrix, restrained rows and columns
/// struck out, dense elimination.
pub fn oracle_solve(model: &FrameModel) -> OracleSolution {
    let n = model.nodes.len();
    let pos = |id| model.nodes.iter().position(|nd| nd.id == id).unwrap();
    let mut k = vec![vec![0.0; 3 * n]; 3 * n];
    let mut f = vec![0.0; 3 * n];

    for el in &model.elements {
        let (ElementEnd::Node(i), ElementEnd::Node(j)) = (&el.end_i, &el.end_j) else {
            panic!("oracle needs resolved elements");
        };
        let (pi, pj) = (pos(*i), pos(*j));
        let (ni, nj) = (&model.nodes[pi], &model.nodes[pj]);
        let sec = model
            .sections
            .iter()
            .find(|s| s.name == el.section)
            .unwrap();
        let ke = global_stiffness(
            sec.youngs_modulus,
            sec.area,
            sec.moment_of_inertia,
            [ni.x, ni.y],
            [nj.x, nj.y],
        );
        let dofs = [
            3 * pi,
            3 * pi + 1,
            3 * pi + 2,
            3 * pj,
            3 * pj + 1,
            3 * pj + 2,
        ];
        for r in 0..6 {
            for c in 0..6 {
                k[dofs[r]][dofs[c]] += ke[r][c];
            }
        }
        // consistent nodal loads of a global-y line load w per unit length
        for l in model
            .distributed_loads
            .iter()
            .filter(|l| l.element_id == el.id)
        {
            let w = l.w_transverse;
            let (dx, dy) = (nj.x - ni.x, nj.y - ni.y);
            let len = (dx * dx + dy * dy).sqrt();
            f[3 * pi + 1] += w * len / 2.0;
            f[3 * pj + 1] += w * len / 2.0;
            f[3 * pi + 2] += w * dx * len / 12.0;
            f[3 * pj + 2] -= w * dx * len / 12.0;
        }
    }
    for p in &model.point_loads {
        let q = pos(p.node_id);
        f[3 * q] += p.fx;
        f[3 * q + 1] += p.fy;
        f[3 * q + 2] += p.mz;
    }

    let mut fixed = vec![false; 3 * n];
    for s in &model.supports {
        let q = pos(s.node_id);
        for (d, r) in s.kind.restraints().into_iter().enumerate() {
            fixed[3 * q + d] |= r;
        }
    }
    let free: Vec<usize> = (0..3 * n).filter(|&d| !fixed[d]).collect();
    let kff = free
        .iter()
        .map(|&r| free.iter().map(|&c| k[r][c]).collect())
        .collect();
    let ff = free.iter().map(|&r| f[r]).collect();
    let uf = gauss(kff, ff);
    let mut u = vec![0.0; 3 * n];
    for (&d, v) in free.iter().zip(uf) {
        u[d] = v;
    }

    let mut displacements = vec![[0.0; 3]; n];
    let mut reactions = vec![[0.0; 3]; n];
    for q in 0..n {
        for d in 0..3 {
            let g = 3 * q + d;
            displacements[q][d] = u[g];
            if fixed[g] {
                let ku: f64 = (0..3 * n).map(|c| k[g][c] * u[c]).sum();
                reactions[q][d] = ku - f[g];
            }
        }
    }
    OracleSolution {
        displacements,
        reactions,
    }
}

/// Sum of applied forces (fx, fy) and moment about the origin.
pub fn applied_resultant(model: &FrameModel) -> [f64; 3] {
    let mut r = [0.0; 3];
    let node = |id| model.nodes.iter().find(|n| n.id == id).unwrap();
    for p in &model.point_loads {
        let n = node(p.node_id);
        r[0] += p.fx;
        r[1] += p.fy;
        r[2] += p.mz + n.x * p.fy - n.y * p.fx;
    }
    for l in &model.distributed_loads {
        let el = model
            .elements
            .iter()
            .find(|e| e.id == l.element_id)
            .unwrap();
        let (ElementEnd::Node(i), ElementEnd::Node(j)) = (&el.end_i, &el.end_j) else {
            panic!("resolved elements expected");
        };
        let (a, b) = (node(*i), node(*j));
        let len = ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
        let total = l.w_transverse * len;
        let cx = (a.x + b.x) / 2.0;
        r[1] += total;
        r[2] += cx * total;
    }
    r
}

/// Sum of absolute applied load components, for scaling tolerances.
pub fn applied_magnitude(model: &FrameModel) -> f64 {
    let mut m = 0.0;
    for p in &model.point_loads {
        m += p.fx.abs() + p.fy.abs() + p.mz.abs();
    }
    for l in &model.distributed_loads {
        let el = model
            .elements
            .iter()
            .find(|e| e.id == l.element_id)
            .unwrap();
        let (ElementEnd::Node(i), ElementEnd::Node(j)) = (&el.end_i, &el.end_j) else {
            panic!("resolved elements expected");
        };
        let a = model.nodes.iter().find(|n| n.id == *i).unwrap();
        let b = model.nodes.iter().find(|n| n.id == *j).unwrap();
        m += l.w_transverse.abs() * ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
    }
    m
}

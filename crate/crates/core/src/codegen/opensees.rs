use std::fmt::Write as _;

use super::{check_supported, source_digest, CodegenError, Dialect, EmittedScript};
use crate::model::FrameModel;
use crate::numfmt::num;

pub(crate) const TRANSFORM_TAG: u32 = 1;
pub(crate) const SERIES_TAG: u32 = 1;
pub(crate) const PATTERN_TAG: u32 = 1;

/// Tcl variable holding property `prop` (`E`, `A` or `I`) of a section.
pub(crate) fn section_var(section: &str, prop: char) -> String {
    format!("{section}_{prop}")
}

/// Intensity along the element's local y axis for a global-y UDL on a
/// horizontal member: local y points up for left-to-right members.
pub(crate) fn local_wy(w: f64, dx: f64) -> f64 {
    if dx < 0.0 {
        -w
    } else {
        w
    }
}

/// 2D, 3-DOF OpenSees script: nodes, restraints, elastic beam-columns
/// with a linear transformation, one plain load pattern, recorders, and a
/// single-step linear static analysis.
pub fn emit_opensees(model: &FrameModel) -> Result<EmittedScript, CodegenError> {
    check_supported(model)?;
    let m = model.clone().canonicalized();
    let digest = source_digest(&m);
    let mut s = String::new();

    let _ = writeln!(s, "# frameforge {}", Dialect::OpenseesTcl);
    let _ = writeln!(s, "# source-digest {digest}");
    let _ = writeln!(
        s,
        "# units: force={} length={}",
        m.units.force_unit, m.units.length_unit
    );
    let _ = writeln!(s, "wipe");
    let _ = writeln!(s, "model BasicBuilder -ndm 2 -ndf 3");

    let _ = writeln!(s, "\n# nodes");
    for n in &m.nodes {
        let _ = writeln!(s, "node {} {} {}", n.id, num(n.x), num(n.y));
    }

    let _ = writeln!(s, "\n# restraints");
    for sup in &m.supports {
        let [ux, uy, rz] = sup.kind.restraints().map(u8::from);
        let _ = writeln!(s, "fix {} {ux} {uy} {rz}", sup.node_id);
    }

    let _ = writeln!(s, "\n# section properties");
    for sec in &m.sections {
        let _ = writeln!(
            s,
            "set {} {}",
            section_var(&sec.name, 'E'),
            num(sec.youngs_modulus)
        );
        let _ = writeln!(s, "set {} {}", section_var(&sec.name, 'A'), num(sec.area));
        let _ = writeln!(
            s,
            "set {} {}",
            section_var(&sec.name, 'I'),
            num(sec.moment_of_inertia)
        );
    }

    let _ = writeln!(s, "\n# geometric transformation");
    let _ = writeln!(s, "geomTransf Linear {TRANSFORM_TAG}");

    let _ = writeln!(s, "\n# elements");
    for e in &m.elements {
        let (i, j) = e.nodes().expect("checked resolved");
        let _ = writeln!(
            s,
            "element elasticBeamColumn {} {i} {j} ${} ${} ${} {TRANSFORM_TAG}",
            e.id,
            section_var(&e.section, 'A'),
            section_var(&e.section, 'E'),
            section_var(&e.section, 'I'),
        );
    }

    let _ = writeln!(s, "\n# loads");
    let _ = writeln!(s, "timeSeries Linear {SERIES_TAG}");
    let _ = writeln!(s, "pattern Plain {PATTERN_TAG} {SERIES_TAG} {{");
    for l in &m.point_loads {
        let _ = writeln!(
            s,
            "    load {} {} {} {}",
            l.node_id,
            num(l.fx),
            num(l.fy),
            num(l.mz)
        );
    }
    for l in &m.distributed_loads {
        let e = m.element(l.element_id).expect("checked resolved");
        let (a, b) = m.element_coords(e).expect("checked resolved");
        let _ = writeln!(
            s,
            "    eleLoad -ele {} -type -beamUniform {}",
            l.element_id,
            num(local_wy(l.w_transverse, b[0] - a[0]))
        );
    }
    let _ = writeln!(s, "}}");

    let _ = writeln!(s, "\n# recorders");
    let all_nodes: Vec<String> = m.nodes.iter().map(|n| n.id.to_string()).collect();
    let supported: Vec<String> = m.supports.iter().map(|s| s.node_id.to_string()).collect();
    let _ = writeln!(
        s,
        "recorder Node -file displacements.out -time -node {} -dof 1 2 3 disp",
        all_nodes.join(" ")
    );
    if !supported.is_empty() {
        let _ = writeln!(
            s,
            "recorder Node -file reactions.out -time -node {} -dof 1 2 3 reaction",
            supported.join(" ")
        );
    }

    let _ = writeln!(s, "\n# analysis");
    for line in [
        "system BandGeneral",
        "numberer RCM",
        "constraints Plain",
        "integrator LoadControl 1.0",
        "algorithm Linear",
        "analysis Static",
        "analyze 1",
    ] {
        let _ = writeln!(s, "{line}");
    }

    Ok(EmittedScript {
        dialect: Dialect::OpenseesTcl,
        text: s,
        source_digest: digest,
    })
}

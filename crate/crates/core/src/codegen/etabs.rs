use std::fmt::Write as _;

use super::sap2000::{material_name, POISSON};
use super::unit_names::{etabs_force, etabs_length};
use super::{check_supported, source_digest, CodegenError, Dialect, EmittedScript, LOAD_PATTERN};
use crate::model::{ElementKind, SupportKind};
use crate::numfmt::num;
use crate::story::{from_story_model, StoryModel, BASE_LEVEL};

/// Restrained DOFs in the X-Z plane, as ETABS spells them.
pub(crate) fn restraint_spec(kind: SupportKind) -> &'static str {
    match kind {
        SupportKind::Fixed => "UX UZ RY",
        SupportKind::Pinned => "UX UZ",
        SupportKind::RollerX => "UZ",
        SupportKind::RollerY => "UX",
    }
}

pub(crate) fn restraint_from_spec(s: &str) -> Option<SupportKind> {
    let mut dofs: Vec<&str> = s.split_whitespace().collect();
    dofs.sort_unstable();
    SupportKind::ALL.into_iter().find(|&k| {
        let mut want: Vec<&str> = restraint_spec(k).split(' ').collect();
        want.sort_unstable();
        want == dofs
    })
}

/// ETABS text input built from the story view of a model. Point and line
/// assignments follow node and element id order, which is how a reader
/// recovers the ids.
pub fn emit_etabs(sm: &StoryModel) -> Result<EmittedScript, CodegenError> {
    let model = from_story_model(sm);
    check_supported(&model)?;
    let digest = source_digest(&model);
    let mut s = String::new();
    let section = |s: &mut String, title: &str| {
        let _ = writeln!(s, "\n$ {title}");
    };

    let _ = writeln!(s, "$ frameforge {}", Dialect::EtabsE2k);
    let _ = writeln!(s, "$ source-digest {digest}");

    section(&mut s, "PROGRAM INFORMATION");
    let _ = writeln!(s, "  PROGRAM  \"ETABS\"");

    section(&mut s, "CONTROLS");
    let _ = writeln!(
        s,
        "  UNITS  \"{}\"  \"{}\"  \"C\"",
        etabs_force(sm.units.force_unit),
        etabs_length(sm.units.length_unit)
    );

    section(&mut s, "STORIES - IN SEQUENCE FROM TOP");
    for l in &sm.story_levels {
        if l.name == BASE_LEVEL {
            let _ = writeln!(s, "  STORY \"{}\"  ELEV {}", l.name, num(l.elevation));
        } else {
            let _ = writeln!(s, "  STORY \"{}\"  HEIGHT {}", l.name, num(l.height));
        }
    }

    section(&mut s, "MATERIAL PROPERTIES");
    for sec in &sm.sections {
        let _ = writeln!(
            s,
            "  MATERIAL  \"{}\"  TYPE \"Other\"  E {}  U {}",
            material_name(&sec.name),
            num(sec.youngs_modulus),
            num(POISSON)
        );
    }

    section(&mut s, "FRAME SECTIONS");
    for sec in &sm.sections {
        let _ = writeln!(
            s,
            "  FRAMESECTION  \"{}\"  MATERIAL \"{}\"  SHAPE \"General\"  AREA {}  I33 {}  I22 {}  AS2 0  AS3 0",
            sec.name,
            material_name(&sec.name),
            num(sec.area),
            num(sec.moment_of_inertia),
            num(sec.moment_of_inertia)
        );
    }

    section(&mut s, "POINT COORDINATES");
    for p in &sm.base_points {
        let _ = writeln!(s, "  POINT \"{}\"  {}  0", p.name, num(p.x));
    }

    section(&mut s, "LINE CONNECTIVITIES");
    for t in &sm.line_templates {
        let (word, n) = match t.kind {
            ElementKind::Column => ("COLUMN", 1),
            ElementKind::Girder => ("BEAM", 0),
        };
        let _ = writeln!(
            s,
            "  LINE  \"{}\"  {word}  \"{}\"  \"{}\"  {n}",
            t.name, t.point_i, t.point_j
        );
    }

    section(&mut s, "POINT ASSIGNS");
    for a in &sm.point_assignments {
        match a.support {
            Some(k) => {
                let _ = writeln!(
                    s,
                    "  POINTASSIGN  \"{}\"  \"{}\"  RESTRAINT \"{}\"",
                    a.point,
                    a.level,
                    restraint_spec(k)
                );
            }
            None => {
                let _ = writeln!(s, "  POINTASSIGN  \"{}\"  \"{}\"", a.point, a.level);
            }
        }
    }

    section(&mut s, "LINE ASSIGNS");
    for a in &sm.line_assignments {
        let _ = writeln!(
            s,
            "  LINEASSIGN  \"{}\"  \"{}\"  SECTION \"{}\"",
            a.line, a.story, a.section
        );
    }

    section(&mut s, "LOAD PATTERNS");
    let _ = writeln!(
        s,
        "  LOADPATTERN \"{LOAD_PATTERN}\"  TYPE  \"Other\"  SELFWEIGHT  0"
    );

    if !sm.point_loads.is_empty() {
        section(&mut s, "POINT OBJECT LOADS");
        for l in &sm.point_loads {
            let _ = writeln!(
                s,
                "  POINTLOAD  \"{}\"  \"{}\"  TYPE \"FORCE\"  LC \"{LOAD_PATTERN}\"  FX {}  FZ {}  MY {}",
                l.point,
                l.level,
                num(l.fx),
                num(l.fy),
                num(-l.mz)
            );
        }
    }
    if !sm.line_loads.is_empty() {
        section(&mut s, "FRAME OBJECT LOADS");
        for l in &sm.line_loads {
            let _ = writeln!(
                s,
                "  LINELOAD  \"{}\"  \"{}\"  TYPE \"UNIFF\"  DIR \"Z\"  LC \"{LOAD_PATTERN}\"  FVAL {}",
                l.line,
                l.story,
                num(l.w_transverse)
            );
        }
    }

    section(&mut s, "LOAD CASES");
    let _ = writeln!(
        s,
        "  LOADCASE \"{LOAD_PATTERN}\"  TYPE  \"Linear Static\"  INITCOND  \"PRESET\""
    );
    let _ = writeln!(
        s,
        "  LOADCASE \"{LOAD_PATTERN}\"  LOADPAT  \"{LOAD_PATTERN}\"  SF  1"
    );

    s.push_str("\n  END\n$ END OF MODEL FILE\n");
    Ok(EmittedScript {
        dialect: Dialect::EtabsE2k,
        text: s,
        source_digest: digest,
    })
}

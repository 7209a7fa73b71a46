use std::fmt::Write as _;

use super::unit_names::{sap_force, sap_length};
use super::{check_supported, source_digest, CodegenError, Dialect, EmittedScript, LOAD_PATTERN};
use crate::model::FrameModel;
use crate::numfmt::num;

/// Poisson ratio written for every generated material. Unused by a planar
/// frame analysis but required by the material table.
pub(crate) const POISSON: f64 = 0.3;

pub(crate) fn material_name(section: &str) -> String {
    format!("{section}_MAT")
}

pub(crate) fn yes_no(b: bool) -> &'static str {
    if b {
        "Yes"
    } else {
        "No"
    }
}

struct Tables {
    out: String,
}

impl Tables {
    fn table(&mut self, name: &str, rows: &[String]) {
        let _ = writeln!(self.out, "TABLE:  \"{name}\"");
        for r in rows {
            let _ = writeln!(self.out, "   {r}");
        }
        self.out.push('\n');
    }
}

/// SAP2000 text input: the model in the global X-Z plane (IR y is Z),
/// one load pattern and one linear static case.
pub fn emit_sap2000(model: &FrameModel) -> Result<EmittedScript, CodegenError> {
    check_supported(model)?;
    let m = model.clone().canonicalized();
    let digest = source_digest(&m);
    let mut t = Tables { out: String::new() };

    let _ = writeln!(t.out, "$ frameforge {}", Dialect::Sap2000S2k);
    let _ = writeln!(t.out, "$ source-digest {digest}");
    t.out.push('\n');

    t.table(
        "PROGRAM CONTROL",
        &[format!(
            "ProgramName=SAP2000   CurrUnits=\"{}, {}, C\"",
            sap_force(m.units.force_unit),
            sap_length(m.units.length_unit)
        )],
    );
    t.table(
        "COORDINATE SYSTEMS",
        &["Name=GLOBAL   Type=Cartesian   X=0   Y=0   Z=0".to_string()],
    );
    t.table(
        "ACTIVE DEGREES OF FREEDOM",
        &["UX=Yes   UY=No   UZ=Yes   RX=No   RY=Yes   RZ=No".to_string()],
    );

    let joints: Vec<String> = m
        .nodes
        .iter()
        .map(|n| {
            format!(
                "Joint={}   CoordSys=GLOBAL   CoordType=Cartesian   XorR={}   Y=0   Z={}",
                n.id,
                num(n.x),
                num(n.y)
            )
        })
        .collect();
    t.table("JOINT COORDINATES", &joints);

    if !m.supports.is_empty() {
        let rows: Vec<String> = m
            .supports
            .iter()
            .map(|s| {
                let [ux, uy, rz] = s.kind.restraints();
                format!(
                    "Joint={}   U1={}   U2=No   U3={}   R1=No   R2={}   R3=No",
                    s.node_id,
                    yes_no(ux),
                    yes_no(uy),
                    yes_no(rz)
                )
            })
            .collect();
        t.table("JOINT RESTRAINT ASSIGNMENTS", &rows);
    }

    let general: Vec<String> = m
        .sections
        .iter()
        .map(|s| format!("Material={}   Type=Other", material_name(&s.name)))
        .collect();
    t.table("MATERIAL PROPERTIES 01 - GENERAL", &general);
    let mech: Vec<String> = m
        .sections
        .iter()
        .map(|s| {
            format!(
                "Material={}   E1={}   U12={}",
                material_name(&s.name),
                num(s.youngs_modulus),
                num(POISSON)
            )
        })
        .collect();
    t.table(
        "MATERIAL PROPERTIES 02 - BASIC MECHANICAL PROPERTIES",
        &mech,
    );

    let sections: Vec<String> = m
        .sections
        .iter()
        .map(|s| {
            format!(
                "SectionName={}   Material={}   Shape=General   Area={}   I33={}   I22={}   AS2=0   AS3=0",
                s.name,
                material_name(&s.name),
                num(s.area),
                num(s.moment_of_inertia),
                num(s.moment_of_inertia)
            )
        })
        .collect();
    t.table("FRAME SECTION PROPERTIES 01 - GENERAL", &sections);

    let mut connectivity = Vec::with_capacity(m.elements.len());
    let mut assignments = Vec::with_capacity(m.elements.len());
    for e in &m.elements {
        let (i, j) = e.nodes().expect("checked resolved");
        connectivity.push(format!(
            "Frame={}   JointI={i}   JointJ={j}   IsCurved=No",
            e.id
        ));
        assignments.push(format!(
            "Frame={}   SectionType=General   AnalSect={}",
            e.id, e.section
        ));
    }
    t.table("CONNECTIVITY - FRAME", &connectivity);
    t.table("FRAME SECTION ASSIGNMENTS", &assignments);

    t.table(
        "LOAD PATTERN DEFINITIONS",
        &[format!(
            "LoadPat={LOAD_PATTERN}   DesignType=Other   SelfWtMult=0"
        )],
    );

    if !m.point_loads.is_empty() {
        let rows: Vec<String> = m
            .point_loads
            .iter()
            .map(|l| {
                format!(
                    "Joint={}   LoadPat={LOAD_PATTERN}   CoordSys=GLOBAL   F1={}   F2=0   F3={}   M1=0   M2={}   M3=0",
                    l.node_id,
                    num(l.fx),
                    num(l.fy),
                    num(-l.mz)
                )
            })
            .collect();
        t.table("JOINT LOADS - FORCE", &rows);
    }
    if !m.distributed_loads.is_empty() {
        let rows: Vec<String> = m
            .distributed_loads
            .iter()
            .map(|l| {
                let w = num(l.w_transverse);
                format!(
                    "Frame={}   LoadPat={LOAD_PATTERN}   CoordSys=GLOBAL   Type=Force   Dir=Z   DistType=RelDist   RelDistA=0   RelDistB=1   FOverLA={w}   FOverLB={w}",
                    l.element_id
                )
            })
            .collect();
        t.table("FRAME LOADS - DISTRIBUTED", &rows);
    }

    t.table(
        "LOAD CASE DEFINITIONS",
        &[format!(
            "Case={LOAD_PATTERN}   Type=LinStatic   InitialCond=Zero   RunCase=Yes"
        )],
    );
    t.table(
        "CASE - STATIC 1 - LOAD ASSIGNMENTS",
        &[format!(
            "Case={LOAD_PATTERN}   LoadType=\"Load pattern\"   LoadName={LOAD_PATTERN}   LoadSF=1"
        )],
    );

    let mut text = t.out;
    text.push_str("END TABLE DATA\n");
    Ok(EmittedScript {
        dialect: Dialect::Sap2000S2k,
        text,
        source_digest: digest,
    })
}

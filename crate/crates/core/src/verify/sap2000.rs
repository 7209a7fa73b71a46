use std::collections::{BTreeMap, HashMap, HashSet};

use super::{parse_id, parse_num, DialectError};
use crate::codegen::unit_names::{force_from, length_from, sap_force, sap_length};
use crate::codegen::Dialect;
use crate::model::{
    is_identifier, DistributedLoad, ElementEnd, ElementKind, ElementRecord, FrameModel, NodeId,
    NodeRecord, PointLoad, SectionProperties, SupportKind, SupportRecord,
};
use crate::units::UnitSystem;

/// Accepted tables and their exact key sets.
const SCHEMA: [(&str, &[&str]); 14] = [
    ("PROGRAM CONTROL", &["ProgramName", "CurrUnits"]),
    ("COORDINATE SYSTEMS", &["Name", "Type", "X", "Y", "Z"]),
    (
        "ACTIVE DEGREES OF FREEDOM",
        &["UX", "UY", "UZ", "RX", "RY", "RZ"],
    ),
    (
        "JOINT COORDINATES",
        &["Joint", "CoordSys", "CoordType", "XorR", "Y", "Z"],
    ),
    (
        "JOINT RESTRAINT ASSIGNMENTS",
        &["Joint", "U1", "U2", "U3", "R1", "R2", "R3"],
    ),
    ("MATERIAL PROPERTIES 01 - GENERAL", &["Material", "Type"]),
    (
        "MATERIAL PROPERTIES 02 - BASIC MECHANICAL PROPERTIES",
        &["Material", "E1", "U12"],
    ),
    (
        "FRAME SECTION PROPERTIES 01 - GENERAL",
        &[
            "SectionName",
            "Material",
            "Shape",
            "Area",
            "I33",
            "I22",
            "AS2",
            "AS3",
        ],
    ),
    (
        "CONNECTIVITY - FRAME",
        &["Frame", "JointI", "JointJ", "IsCurved"],
    ),
    (
        "FRAME SECTION ASSIGNMENTS",
        &["Frame", "SectionType", "AnalSect"],
    ),
    (
        "LOAD PATTERN DEFINITIONS",
        &["LoadPat", "DesignType", "SelfWtMult"],
    ),
    (
        "JOINT LOADS - FORCE",
        &[
            "Joint", "LoadPat", "CoordSys", "F1", "F2", "F3", "M1", "M2", "M3",
        ],
    ),
    (
        "FRAME LOADS - DISTRIBUTED",
        &[
            "Frame", "LoadPat", "CoordSys", "Type", "Dir", "DistType", "RelDistA", "RelDistB",
            "FOverLA", "FOverLB",
        ],
    ),
    (
        "LOAD CASE DEFINITIONS",
        &["Case", "Type", "InitialCond", "RunCase"],
    ),
];

const CASE_ASSIGNMENTS: (&str, &[&str]) = (
    "CASE - STATIC 1 - LOAD ASSIGNMENTS",
    &["Case", "LoadType", "LoadName", "LoadSF"],
);

fn schema(table: &str) -> Option<&'static [&'static str]> {
    SCHEMA
        .iter()
        .chain(std::iter::once(&CASE_ASSIGNMENTS))
        .find(|(n, _)| *n == table)
        .map(|(_, keys)| *keys)
}

struct Row {
    line: usize,
    fields: BTreeMap<String, String>,
}

impl Row {
    fn get(&self, key: &str) -> &str {
        // key sets are checked against the schema before rows are used
        &self.fields[key]
    }

    fn num(&self, key: &str) -> Result<f64, DialectError> {
        parse_num(self.get(key), self.line, key)
    }

    fn id(&self, key: &str) -> Result<u32, DialectError> {
        parse_id(self.get(key), self.line, key)
    }

    fn expect(&self, key: &str, want: &str) -> Result<(), DialectError> {
        let v = self.get(key);
        if v == want {
            Ok(())
        } else {
            Err(DialectError::syntax(
                self.line,
                format!("{key} must be `{want}`, found `{v}`"),
            ))
        }
    }

    fn expect_zero(&self, key: &str) -> Result<(), DialectError> {
        if self.num(key)? == 0.0 {
            Ok(())
        } else {
            Err(DialectError::syntax(
                self.line,
                format!("{key} must be 0 in a planar X-Z model"),
            ))
        }
    }

    fn yes_no(&self, key: &str) -> Result<bool, DialectError> {
        match self.get(key) {
            "Yes" => Ok(true),
            "No" => Ok(false),
            v => Err(DialectError::syntax(
                self.line,
                format!("{key} must be Yes or No, found `{v}`"),
            )),
        }
    }

    fn name(&self, key: &str) -> Result<String, DialectError> {
        let v = self.get(key);
        if is_identifier(v) {
            Ok(v.to_string())
        } else {
            Err(DialectError::syntax(self.line, format!("bad {key} `{v}`")))
        }
    }
}

/// `Key=Value` pairs; values may be double-quoted.
fn parse_row(text: &str, line: usize, keys: &[&str]) -> Result<Row, DialectError> {
    let mut fields = BTreeMap::new();
    let mut rest = text.trim_start();
    while !rest.is_empty() {
        let eq = rest.find('=').ok_or_else(|| {
            DialectError::syntax(line, format!("expected Key=Value, found `{rest}`"))
        })?;
        let key = &rest[..eq];
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(DialectError::syntax(line, format!("bad key `{key}`")));
        }
        rest = &rest[eq + 1..];
        let value;
        if let Some(q) = rest.strip_prefix('"') {
            let end = q
                .find('"')
                .ok_or_else(|| DialectError::syntax(line, "unterminated string"))?;
            value = &q[..end];
            rest = &q[end + 1..];
            if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
                return Err(DialectError::syntax(
                    line,
                    "missing space after quoted value",
                ));
            }
        } else {
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            value = &rest[..end];
            rest = &rest[end..];
            if value.is_empty() {
                return Err(DialectError::syntax(line, format!("empty value for {key}")));
            }
        }
        if !keys.contains(&key) {
            return Err(DialectError::syntax(
                line,
                format!("unexpected key `{key}`"),
            ));
        }
        if fields.insert(key.to_string(), value.to_string()).is_some() {
            return Err(DialectError::syntax(line, format!("key `{key}` repeated")));
        }
        rest = rest.trim_start();
    }
    if let Some(missing) = keys.iter().find(|k| !fields.contains_key(**k)) {
        return Err(DialectError::syntax(
            line,
            format!("missing key `{missing}`"),
        ));
    }
    Ok(Row { line, fields })
}

#[derive(Default)]
struct State {
    units: Option<UnitSystem>,
    dof_checked: bool,
    nodes: Vec<NodeRecord>,
    node_ids: HashSet<NodeId>,
    supports: Vec<SupportRecord>,
    material_types: HashSet<String>,
    materials: HashMap<String, f64>,
    sections: Vec<SectionProperties>,
    elements: Vec<ElementRecord>,
    element_index: HashMap<u32, usize>,
    assigned: HashSet<u32>,
    patterns: HashSet<String>,
    cases: HashSet<String>,
    point_loads: Vec<PointLoad>,
    distributed_loads: Vec<DistributedLoad>,
}

impl State {
    fn joint(&self, row: &Row, key: &str) -> Result<NodeId, DialectError> {
        let id = row.id(key)?;
        if self.node_ids.contains(&id) {
            Ok(id)
        } else {
            Err(DialectError::undefined(
                row.line,
                format!("joint {id} is not defined"),
            ))
        }
    }

    fn frame(&self, row: &Row) -> Result<usize, DialectError> {
        let id = row.id("Frame")?;
        self.element_index
            .get(&id)
            .copied()
            .ok_or_else(|| DialectError::undefined(row.line, format!("frame {id} is not defined")))
    }

    fn pattern(&self, row: &Row, key: &str) -> Result<(), DialectError> {
        let p = row.get(key);
        if self.patterns.contains(p) {
            Ok(())
        } else {
            Err(DialectError::undefined(
                row.line,
                format!("load pattern `{p}` is not defined"),
            ))
        }
    }

    fn row(&mut self, table: &str, row: Row) -> Result<(), DialectError> {
        let line = row.line;
        match table {
            "PROGRAM CONTROL" => {
                row.expect("ProgramName", "SAP2000")?;
                let parts: Vec<&str> = row.get("CurrUnits").split(", ").collect();
                let units = match parts[..] {
                    [f, l, "C"] => force_from(f, sap_force)
                        .zip(length_from(l, sap_length))
                        .map(|(f, l)| UnitSystem::new(l, f)),
                    _ => None,
                };
                let units = units.ok_or_else(|| {
                    DialectError::syntax(
                        line,
                        format!("unsupported CurrUnits `{}`", row.get("CurrUnits")),
                    )
                })?;
                if self.units.replace(units).is_some() {
                    return Err(DialectError::duplicate(line, "units given twice"));
                }
            }
            "COORDINATE SYSTEMS" => {
                row.expect("Name", "GLOBAL")?;
                row.expect("Type", "Cartesian")?;
                for k in ["X", "Y", "Z"] {
                    row.expect_zero(k)?;
                }
            }
            "ACTIVE DEGREES OF FREEDOM" => {
                let want = [
                    ("UX", true),
                    ("UY", false),
                    ("UZ", true),
                    ("RX", false),
                    ("RY", true),
                    ("RZ", false),
                ];
                for (k, v) in want {
                    if row.yes_no(k)? != v {
                        return Err(DialectError::syntax(
                            line,
                            "only the planar X-Z frame DOF set is supported",
                        ));
                    }
                }
                self.dof_checked = true;
            }
            "JOINT COORDINATES" => {
                let id = row.id("Joint")?;
                row.expect("CoordSys", "GLOBAL")?;
                row.expect("CoordType", "Cartesian")?;
                row.expect_zero("Y")?;
                let (x, y) = (row.num("XorR")?, row.num("Z")?);
                if !self.node_ids.insert(id) {
                    return Err(DialectError::duplicate(
                        line,
                        format!("joint {id} defined twice"),
                    ));
                }
                self.nodes.push(NodeRecord::new(id, x, y));
            }
            "JOINT RESTRAINT ASSIGNMENTS" => {
                let id = self.joint(&row, "Joint")?;
                for k in ["U2", "R1", "R3"] {
                    row.yes_no(k)?;
                }
                let flags = [row.yes_no("U1")?, row.yes_no("U3")?, row.yes_no("R2")?];
                let kind = SupportKind::from_restraints(flags).ok_or_else(|| {
                    DialectError::syntax(line, format!("unsupported restraint {flags:?}"))
                })?;
                if self.supports.iter().any(|s| s.node_id == id) {
                    return Err(DialectError::duplicate(
                        line,
                        format!("joint {id} restrained twice"),
                    ));
                }
                self.supports.push(SupportRecord { node_id: id, kind });
            }
            "MATERIAL PROPERTIES 01 - GENERAL" => {
                let name = row.get("Material").to_string();
                if !self.material_types.insert(name.clone()) {
                    return Err(DialectError::duplicate(
                        line,
                        format!("material `{name}` defined twice"),
                    ));
                }
            }
            "MATERIAL PROPERTIES 02 - BASIC MECHANICAL PROPERTIES" => {
                let name = row.get("Material").to_string();
                if !self.material_types.contains(&name) {
                    return Err(DialectError::undefined(
                        line,
                        format!("material `{name}` is not defined"),
                    ));
                }
                row.num("U12")?;
                let e = row.num("E1")?;
                if self.materials.insert(name.clone(), e).is_some() {
                    return Err(DialectError::duplicate(
                        line,
                        format!("material `{name}` has two property rows"),
                    ));
                }
            }
            "FRAME SECTION PROPERTIES 01 - GENERAL" => {
                let name = row.name("SectionName")?;
                let mat = row.get("Material");
                let e = *self.materials.get(mat).ok_or_else(|| {
                    DialectError::undefined(line, format!("material `{mat}` has no properties"))
                })?;
                row.expect("Shape", "General")?;
                row.num("I22")?;
                row.num("AS2")?;
                row.num("AS3")?;
                if self.sections.iter().any(|s| s.name == name) {
                    return Err(DialectError::duplicate(
                        line,
                        format!("section `{name}` defined twice"),
                    ));
                }
                self.sections.push(SectionProperties::new(
                    name,
                    e,
                    row.num("Area")?,
                    row.num("I33")?,
                ));
            }
            "CONNECTIVITY - FRAME" => {
                let id = row.id("Frame")?;
                let i = self.joint(&row, "JointI")?;
                let j = self.joint(&row, "JointJ")?;
                row.expect("IsCurved", "No")?;
                if self.element_index.contains_key(&id) {
                    return Err(DialectError::duplicate(
                        line,
                        format!("frame {id} defined twice"),
                    ));
                }
                let pos = |n: NodeId| {
                    let r = self.nodes.iter().find(|r| r.id == n).expect("checked");
                    (r.x, r.y)
                };
                let ((xi, yi), (xj, yj)) = (pos(i), pos(j));
                let kind = if (xj - xi).abs() <= (yj - yi).abs() {
                    ElementKind::Column
                } else {
                    ElementKind::Girder
                };
                self.element_index.insert(id, self.elements.len());
                self.elements.push(ElementRecord {
                    id,
                    kind,
                    end_i: ElementEnd::Node(i),
                    end_j: ElementEnd::Node(j),
                    section: String::new(),
                    description: String::new(),
                });
            }
            "FRAME SECTION ASSIGNMENTS" => {
                let k = self.frame(&row)?;
                row.expect("SectionType", "General")?;
                let sec = row.get("AnalSect");
                if !self.sections.iter().any(|s| s.name == sec) {
                    return Err(DialectError::undefined(
                        line,
                        format!("section `{sec}` is not defined"),
                    ));
                }
                let id = self.elements[k].id;
                if !self.assigned.insert(id) {
                    return Err(DialectError::duplicate(
                        line,
                        format!("frame {id} assigned twice"),
                    ));
                }
                self.elements[k].section = sec.to_string();
            }
            "LOAD PATTERN DEFINITIONS" => {
                let name = row.name("LoadPat")?;
                row.expect("DesignType", "Other")?;
                row.expect_zero("SelfWtMult")?;
                if !self.patterns.is_empty() {
                    return Err(DialectError::syntax(
                        line,
                        "only one load pattern is supported",
                    ));
                }
                self.patterns.insert(name);
            }
            "JOINT LOADS - FORCE" => {
                let node_id = self.joint(&row, "Joint")?;
                self.pattern(&row, "LoadPat")?;
                row.expect("CoordSys", "GLOBAL")?;
                for k in ["F2", "M1", "M3"] {
                    row.expect_zero(k)?;
                }
                self.point_loads.push(PointLoad {
                    node_id,
                    fx: row.num("F1")?,
                    fy: row.num("F3")?,
                    mz: -row.num("M2")?,
                });
            }
            "FRAME LOADS - DISTRIBUTED" => {
                let k = self.frame(&row)?;
                self.pattern(&row, "LoadPat")?;
                row.expect("CoordSys", "GLOBAL")?;
                row.expect("Type", "Force")?;
                row.expect("Dir", "Z")?;
                row.expect("DistType", "RelDist")?;
                row.expect_zero("RelDistA")?;
                if row.num("RelDistB")? != 1.0 {
                    return Err(DialectError::syntax(
                        line,
                        "only full-length loads are supported",
                    ));
                }
                let (wa, wb) = (row.num("FOverLA")?, row.num("FOverLB")?);
                if wa != wb {
                    return Err(DialectError::syntax(
                        line,
                        "only uniform loads are supported",
                    ));
                }
                let e = &self.elements[k];
                if e.kind != ElementKind::Girder {
                    return Err(DialectError::syntax(
                        line,
                        format!("distributed load on frame {} which is not horizontal", e.id),
                    ));
                }
                self.distributed_loads.push(DistributedLoad {
                    element_id: e.id,
                    w_transverse: wa,
                });
            }
            "LOAD CASE DEFINITIONS" => {
                let name = row.name("Case")?;
                row.expect("Type", "LinStatic")?;
                row.expect("InitialCond", "Zero")?;
                row.expect("RunCase", "Yes")?;
                if !self.cases.insert(name.clone()) {
                    return Err(DialectError::duplicate(
                        line,
                        format!("case `{name}` defined twice"),
                    ));
                }
            }
            "CASE - STATIC 1 - LOAD ASSIGNMENTS" => {
                let case = row.get("Case");
                if !self.cases.contains(case) {
                    return Err(DialectError::undefined(
                        line,
                        format!("case `{case}` is not defined"),
                    ));
                }
                row.expect("LoadType", "Load pattern")?;
                self.pattern(&row, "LoadName")?;
                if row.num("LoadSF")? != 1.0 {
                    return Err(DialectError::syntax(
                        line,
                        "only unit scale factors are supported",
                    ));
                }
            }
            _ => unreachable!("table names are checked against the schema"),
        }
        Ok(())
    }
}

/// Parses the SAP2000 subset written by the emitter.
pub fn parse_sap2000(text: &str) -> Result<FrameModel, DialectError> {
    let mut st = State::default();
    let mut seen_tables = HashSet::new();
    let mut table: Option<(&str, &[&str])> = None;
    let mut ended = false;
    let mut last_line = 0;

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('$') {
            continue;
        }
        if ended {
            return Err(DialectError::syntax(line, "content after END TABLE DATA"));
        }
        if trimmed == "END TABLE DATA" {
            ended = true;
            continue;
        }
        if let Some(rest) = raw.strip_prefix("TABLE:") {
            let name = rest
                .trim()
                .strip_prefix('"')
                .and_then(|r| r.strip_suffix('"'))
                .ok_or_else(|| DialectError::syntax(line, "table name must be double-quoted"))?;
            let keys = schema(name)
                .ok_or_else(|| DialectError::syntax(line, format!("unsupported table `{name}`")))?;
            let name = SCHEMA
                .iter()
                .chain(std::iter::once(&CASE_ASSIGNMENTS))
                .find(|(n, _)| *n == name)
                .map(|(n, _)| *n)
                .expect("schema hit");
            if !seen_tables.insert(name) {
                return Err(DialectError::duplicate(
                    line,
                    format!("table `{name}` appears twice"),
                ));
            }
            table = Some((name, keys));
            continue;
        }
        if !raw.starts_with(char::is_whitespace) {
            return Err(DialectError::syntax(
                line,
                format!("unexpected `{trimmed}`"),
            ));
        }
        let (name, keys) =
            table.ok_or_else(|| DialectError::syntax(line, "row outside of a table"))?;
        let row = parse_row(trimmed, line, keys)?;
        st.row(name, row)?;
    }

    let eof = last_line + 1;
    if !ended {
        return Err(DialectError::syntax(eof, "missing END TABLE DATA"));
    }
    let units = st
        .units
        .ok_or_else(|| DialectError::syntax(eof, "missing PROGRAM CONTROL units"))?;
    if !st.dof_checked {
        return Err(DialectError::syntax(
            eof,
            "missing ACTIVE DEGREES OF FREEDOM",
        ));
    }
    if let Some(e) = st.elements.iter().find(|e| e.section.is_empty()) {
        return Err(DialectError::undefined(
            eof,
            format!("frame {} has no section assignment", e.id),
        ));
    }
    Ok(FrameModel {
        units,
        nodes: st.nodes,
        supports: st.supports,
        sections: st.sections,
        elements: st.elements,
        point_loads: st.point_loads,
        distributed_loads: st.distributed_loads,
        provenance: format!("parsed from {}", Dialect::Sap2000S2k),
    }
    .canonicalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codegen::emit_sap2000;
    use crate::model::fixtures::portal;
    use crate::model::COORD_TOL;
    use crate::verify::{models_equivalent, DialectErrorKind};

    fn portal_text() -> String {
        emit_sap2000(&portal()).unwrap().text
    }

    fn err(text: &str) -> DialectError {
        parse_sap2000(text).unwrap_err()
    }

    #[test]
    fn portal_parses_back_exactly() {
        let mut m = portal();
        m.point_loads[0].mz = -2.5;
        let back = parse_sap2000(&emit_sap2000(&m).unwrap().text).unwrap();
        m.provenance = back.provenance.clone();
        assert_eq!(back, m);
    }

    #[test]
    fn section_assignment_before_connectivity_is_undefined() {
        let t = portal_text();
        let conn_start = t.find("TABLE:  \"CONNECTIVITY - FRAME\"").unwrap();
        let asg_start = t.find("TABLE:  \"FRAME SECTION ASSIGNMENTS\"").unwrap();
        let asg_end = t.find("TABLE:  \"LOAD PATTERN DEFINITIONS\"").unwrap();
        let swapped = format!(
            "{}{}{}{}",
            &t[..conn_start],
            &t[asg_start..asg_end],
            &t[conn_start..asg_start],
            &t[asg_end..]
        );
        let e = err(&swapped);
        assert_eq!(e.kind, DialectErrorKind::UndefinedReference);
        assert_eq!(
            swapped.lines().nth(e.line - 2).unwrap(),
            "TABLE:  \"FRAME SECTION ASSIGNMENTS\""
        );
    }

    #[test]
    fn duplicate_joint() {
        let t = portal_text().replace("Joint=2   CoordSys", "Joint=1   CoordSys");
        assert_eq!(err(&t).code(), "DUPLICATE_DEFINITION");
    }

    #[test]
    fn unknown_table_and_key() {
        let t = portal_text().replace("\"COORDINATE SYSTEMS\"", "\"GRID LINES\"");
        assert_eq!(err(&t).code(), "DIALECT_SYNTAX_ERROR");
        let t = portal_text().replace("IsCurved=No", "IsCurved=No   GUID=x");
        assert_eq!(err(&t).code(), "DIALECT_SYNTAX_ERROR");
    }

    #[test]
    fn out_of_plane_joint_is_rejected() {
        let t = portal_text().replace("XorR=6   Y=0   Z=3", "XorR=6   Y=1   Z=3");
        assert_eq!(err(&t).code(), "DIALECT_SYNTAX_ERROR");
    }

    #[test]
    fn missing_end_marker() {
        let t = portal_text().replace("END TABLE DATA\n", "");
        let e = err(&t);
        assert_eq!(
            (e.code(), e.line),
            ("DIALECT_SYNTAX_ERROR", t.lines().count() + 1)
        );
    }

    #[test]
    fn load_referencing_unknown_pattern() {
        let t = portal_text().replace("Joint=3   LoadPat=LOAD1", "Joint=3   LoadPat=WIND");
        assert_eq!(err(&t).code(), "UNDEFINED_REFERENCE");
    }

    #[test]
    fn equivalent_after_parse() {
        let back = parse_sap2000(&portal_text()).unwrap();
        assert!(models_equivalent(&portal(), &back, COORD_TOL).equivalent);
    }
}

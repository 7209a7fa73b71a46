use std::collections::{HashMap, HashSet};

use super::{parse_id, parse_num, DialectError};
use crate::codegen::Dialect;
use crate::model::{
    is_identifier, DistributedLoad, ElementEnd, ElementKind, ElementRecord, FrameModel, NodeId,
    NodeRecord, PointLoad, SectionProperties, SupportKind, SupportRecord,
};
use crate::units::{ForceUnit, LengthUnit, UnitSystem};

const ANALYSIS: [(&str, usize); 6] = [
    ("system", 1),
    ("numberer", 1),
    ("constraints", 1),
    ("integrator", 2),
    ("algorithm", 1),
    ("analysis", 1),
];

#[derive(Default)]
struct State {
    units: Option<UnitSystem>,
    model_declared: bool,
    nodes: Vec<NodeRecord>,
    node_ids: HashSet<NodeId>,
    supports: Vec<SupportRecord>,
    vars: HashMap<String, f64>,
    transforms: HashSet<u32>,
    series: HashSet<u32>,
    patterns: HashSet<u32>,
    sections: Vec<SectionProperties>,
    elements: Vec<ElementRecord>,
    element_index: HashMap<u32, usize>,
    point_loads: Vec<PointLoad>,
    distributed_loads: Vec<DistributedLoad>,
    in_pattern: Option<usize>,
    analyzed: bool,
}

fn parse_units(rest: &str, line: usize) -> Result<UnitSystem, DialectError> {
    let mut force = None;
    let mut length = None;
    for part in rest.split_whitespace() {
        match part.split_once('=') {
            Some(("force", v)) => {
                force = Some(
                    v.parse::<ForceUnit>()
                        .map_err(|e| DialectError::syntax(line, e))?,
                )
            }
            Some(("length", v)) => {
                length = Some(
                    v.parse::<LengthUnit>()
                        .map_err(|e| DialectError::syntax(line, e))?,
                )
            }
            _ => {
                return Err(DialectError::syntax(
                    line,
                    format!("bad units directive `{part}`"),
                ))
            }
        }
    }
    match (force, length) {
        (Some(f), Some(l)) => Ok(UnitSystem::new(l, f)),
        _ => Err(DialectError::syntax(
            line,
            "units directive needs force= and length=",
        )),
    }
}

fn expect_len(t: &[&str], n: usize, line: usize) -> Result<(), DialectError> {
    if t.len() == n {
        Ok(())
    } else {
        Err(DialectError::syntax(
            line,
            format!(
                "`{}` takes {} argument(s), found {}",
                t[0],
                n - 1,
                t.len() - 1
            ),
        ))
    }
}

fn expect_word(tok: &str, want: &str, line: usize) -> Result<(), DialectError> {
    if tok == want {
        Ok(())
    } else {
        Err(DialectError::syntax(
            line,
            format!("expected `{want}`, found `{tok}`"),
        ))
    }
}

impl State {
    fn require_model(&self, line: usize) -> Result<(), DialectError> {
        if self.model_declared {
            Ok(())
        } else {
            Err(DialectError::syntax(
                line,
                "command before `model BasicBuilder`",
            ))
        }
    }

    fn node_ref(&self, tok: &str, line: usize) -> Result<NodeId, DialectError> {
        let id = parse_id(tok, line, "node id")?;
        if self.node_ids.contains(&id) {
            Ok(id)
        } else {
            Err(DialectError::undefined(
                line,
                format!("node {id} is not defined"),
            ))
        }
    }

    /// `$name` or a literal; returns the value and the variable name.
    fn value<'a>(&self, tok: &'a str, line: usize) -> Result<(f64, Option<&'a str>), DialectError> {
        match tok.strip_prefix('$') {
            Some(name) => match self.vars.get(name) {
                Some(&v) => Ok((v, Some(name))),
                None => Err(DialectError::undefined(
                    line,
                    format!("variable `{name}` is not set"),
                )),
            },
            None => Ok((parse_num(tok, line, "section property")?, None)),
        }
    }

    fn section_for(
        &mut self,
        a: (f64, Option<&str>),
        e: (f64, Option<&str>),
        i: (f64, Option<&str>),
    ) -> String {
        let prefix = |v: Option<&str>, suffix: &str| {
            v.and_then(|n| n.strip_suffix(suffix)).map(str::to_string)
        };
        let named = match (prefix(a.1, "_A"), prefix(e.1, "_E"), prefix(i.1, "_I")) {
            (Some(x), Some(y), Some(z)) if x == y && y == z && is_identifier(&x) => Some(x),
            _ => None,
        };
        let props = SectionProperties::new("", e.0, a.0, i.0);
        let existing = self.sections.iter().find(|s| match &named {
            Some(n) => &s.name == n,
            None => s.same_values(&props, 0.0) && s.name.starts_with("SEC"),
        });
        if let Some(s) = existing {
            return s.name.clone();
        }
        let name = named.unwrap_or_else(|| {
            (1..)
                .map(|k| format!("SEC{k}"))
                .find(|n| self.sections.iter().all(|s| &s.name != n))
                .expect("unbounded")
        });
        self.sections.push(SectionProperties {
            name: name.clone(),
            ..props
        });
        name
    }

    fn command(&mut self, t: &[&str], line: usize) -> Result<(), DialectError> {
        if self.analyzed {
            return Err(DialectError::syntax(line, "command after `analyze`"));
        }
        if self.in_pattern.is_some() {
            return self.pattern_command(t, line);
        }
        match t[0] {
            "wipe" => expect_len(t, 1, line),
            "model" => {
                expect_len(t, 6, line)?;
                if t[1..] != ["BasicBuilder", "-ndm", "2", "-ndf", "3"] {
                    return Err(DialectError::syntax(
                        line,
                        "only `model BasicBuilder -ndm 2 -ndf 3` is supported",
                    ));
                }
                if self.units.is_none() {
                    return Err(DialectError::syntax(
                        line,
                        "missing `# units:` directive before `model`",
                    ));
                }
                if self.model_declared {
                    return Err(DialectError::duplicate(line, "model declared twice"));
                }
                self.model_declared = true;
                Ok(())
            }
            "node" => {
                self.require_model(line)?;
                expect_len(t, 4, line)?;
                let id = parse_id(t[1], line, "node id")?;
                let x = parse_num(t[2], line, "x")?;
                let y = parse_num(t[3], line, "y")?;
                if !self.node_ids.insert(id) {
                    return Err(DialectError::duplicate(
                        line,
                        format!("node {id} defined twice"),
                    ));
                }
                self.nodes.push(NodeRecord::new(id, x, y));
                Ok(())
            }
            "fix" => {
                self.require_model(line)?;
                expect_len(t, 5, line)?;
                let id = self.node_ref(t[1], line)?;
                let mut flags = [false; 3];
                for (f, tok) in flags.iter_mut().zip(&t[2..]) {
                    *f = match *tok {
                        "0" => false,
                        "1" => true,
                        other => {
                            return Err(DialectError::syntax(
                                line,
                                format!("restraint flag `{other}`"),
                            ))
                        }
                    };
                }
                let kind = SupportKind::from_restraints(flags).ok_or_else(|| {
                    DialectError::syntax(line, format!("unsupported restraint {flags:?}"))
                })?;
                if self.supports.iter().any(|s| s.node_id == id) {
                    return Err(DialectError::duplicate(
                        line,
                        format!("node {id} fixed twice"),
                    ));
                }
                self.supports.push(SupportRecord { node_id: id, kind });
                Ok(())
            }
            "set" => {
                expect_len(t, 3, line)?;
                if !is_identifier(t[1]) {
                    return Err(DialectError::syntax(
                        line,
                        format!("bad variable name `{}`", t[1]),
                    ));
                }
                let v = parse_num(t[2], line, t[1])?;
                if self.vars.insert(t[1].to_string(), v).is_some() {
                    return Err(DialectError::duplicate(
                        line,
                        format!("variable `{}` set twice", t[1]),
                    ));
                }
                Ok(())
            }
            "geomTransf" => {
                self.require_model(line)?;
                expect_len(t, 3, line)?;
                expect_word(t[1], "Linear", line)?;
                let tag = parse_id(t[2], line, "transformation tag")?;
                if !self.transforms.insert(tag) {
                    return Err(DialectError::duplicate(
                        line,
                        format!("transformation {tag} defined twice"),
                    ));
                }
                Ok(())
            }
            "element" => {
                self.require_model(line)?;
                expect_len(t, 9, line)?;
                expect_word(t[1], "elasticBeamColumn", line)?;
                let id = parse_id(t[2], line, "element id")?;
                let i = self.node_ref(t[3], line)?;
                let j = self.node_ref(t[4], line)?;
                let a = self.value(t[5], line)?;
                let e = self.value(t[6], line)?;
                let inertia = self.value(t[7], line)?;
                let tag = parse_id(t[8], line, "transformation tag")?;
                if !self.transforms.contains(&tag) {
                    return Err(DialectError::undefined(
                        line,
                        format!("transformation {tag} is not defined"),
                    ));
                }
                if self.element_index.contains_key(&id) {
                    return Err(DialectError::duplicate(
                        line,
                        format!("element {id} defined twice"),
                    ));
                }
                let section = self.section_for(a, e, inertia);
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
                    section,
                    description: String::new(),
                });
                Ok(())
            }
            "timeSeries" => {
                expect_len(t, 3, line)?;
                expect_word(t[1], "Linear", line)?;
                let tag = parse_id(t[2], line, "time series tag")?;
                if !self.series.insert(tag) {
                    return Err(DialectError::duplicate(
                        line,
                        format!("time series {tag} defined twice"),
                    ));
                }
                Ok(())
            }
            "pattern" => {
                self.require_model(line)?;
                expect_len(t, 5, line)?;
                expect_word(t[1], "Plain", line)?;
                let tag = parse_id(t[2], line, "pattern tag")?;
                let series = parse_id(t[3], line, "time series tag")?;
                expect_word(t[4], "{", line)?;
                if !self.series.contains(&series) {
                    return Err(DialectError::undefined(
                        line,
                        format!("time series {series} is not defined"),
                    ));
                }
                if !self.patterns.insert(tag) {
                    return Err(DialectError::duplicate(
                        line,
                        format!("pattern {tag} defined twice"),
                    ));
                }
                self.in_pattern = Some(line);
                Ok(())
            }
            "recorder" => {
                self.require_model(line)?;
                self.recorder(t, line)
            }
            "analyze" => {
                expect_len(t, 2, line)?;
                expect_word(t[1], "1", line)?;
                self.analyzed = true;
                Ok(())
            }
            word => match ANALYSIS.iter().find(|(w, _)| *w == word) {
                Some(&(_, n)) => expect_len(t, n + 1, line),
                None => Err(DialectError::syntax(
                    line,
                    format!("unsupported command `{word}`"),
                )),
            },
        }
    }

    fn recorder(&self, t: &[&str], line: usize) -> Result<(), DialectError> {
        let syntax = || {
            DialectError::syntax(
                line,
                "expected `recorder Node -file F -time -node ids.. -dof 1 2 3 disp|reaction`",
            )
        };
        if t.len() < 11 || t[1] != "Node" || t[2] != "-file" || t[4] != "-time" || t[5] != "-node" {
            return Err(syntax());
        }
        let dof = t.iter().position(|&w| w == "-dof").ok_or_else(syntax)?;
        if dof == 6
            || t[dof + 1..] != ["1", "2", "3", "disp"]
                && t[dof + 1..] != ["1", "2", "3", "reaction"]
        {
            return Err(syntax());
        }
        for tok in &t[6..dof] {
            self.node_ref(tok, line)?;
        }
        Ok(())
    }

    fn pattern_command(&mut self, t: &[&str], line: usize) -> Result<(), DialectError> {
        match t[0] {
            "}" => {
                expect_len(t, 1, line)?;
                self.in_pattern = None;
                Ok(())
            }
            "load" => {
                expect_len(t, 5, line)?;
                let node_id = self.node_ref(t[1], line)?;
                self.point_loads.push(PointLoad {
                    node_id,
                    fx: parse_num(t[2], line, "fx")?,
                    fy: parse_num(t[3], line, "fy")?,
                    mz: parse_num(t[4], line, "mz")?,
                });
                Ok(())
            }
            "eleLoad" => {
                expect_len(t, 6, line)?;
                expect_word(t[1], "-ele", line)?;
                expect_word(t[3], "-type", line)?;
                expect_word(t[4], "-beamUniform", line)?;
                let id = parse_id(t[2], line, "element id")?;
                let wy = parse_num(t[5], line, "Wy")?;
                let e = self
                    .element_index
                    .get(&id)
                    .map(|&k| &self.elements[k])
                    .ok_or_else(|| {
                        DialectError::undefined(line, format!("element {id} is not defined"))
                    })?;
                if e.kind != ElementKind::Girder {
                    return Err(DialectError::syntax(
                        line,
                        format!("-beamUniform on element {id} which is not horizontal"),
                    ));
                }
                let (i, j) = e.nodes().expect("parsed elements are resolved");
                let x = |n: NodeId| self.nodes.iter().find(|r| r.id == n).expect("checked").x;
                let dx = x(j) - x(i);
                self.distributed_loads.push(DistributedLoad {
                    element_id: id,
                    w_transverse: crate::codegen::opensees_local_wy(wy, dx),
                });
                Ok(())
            }
            other => Err(DialectError::syntax(
                line,
                format!("`{other}` is not allowed inside a load pattern"),
            )),
        }
    }
}

/// Parses the OpenSees subset written by the emitter.
pub fn parse_opensees(text: &str) -> Result<FrameModel, DialectError> {
    let mut st = State::default();
    let mut last_line = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(rest) = comment.trim_start().strip_prefix("units:") {
                if st.units.is_some() {
                    return Err(DialectError::duplicate(line, "units directive given twice"));
                }
                st.units = Some(parse_units(rest, line)?);
            }
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        st.command(&tokens, line)?;
    }
    let eof = last_line + 1;
    if let Some(open) = st.in_pattern {
        return Err(DialectError::syntax(
            eof,
            format!("load pattern opened at line {open} is not closed"),
        ));
    }
    if st.units.is_none() {
        return Err(DialectError::syntax(eof, "missing `# units:` directive"));
    }
    if !st.analyzed {
        return Err(DialectError::syntax(eof, "missing `analyze`"));
    }
    Ok(FrameModel {
        units: st.units.expect("checked"),
        nodes: st.nodes,
        supports: st.supports,
        sections: st.sections,
        elements: st.elements,
        point_loads: st.point_loads,
        distributed_loads: st.distributed_loads,
        provenance: format!("parsed from {}", Dialect::OpenseesTcl),
    }
    .canonicalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codegen::emit_opensees;
    use crate::model::fixtures::portal;
    use crate::model::COORD_TOL;
    use crate::verify::{models_equivalent, DialectErrorKind};

    fn portal_text() -> String {
        emit_opensees(&portal()).unwrap().text
    }

    fn err(text: &str) -> DialectError {
        parse_opensees(text).unwrap_err()
    }

    #[test]
    fn portal_parses_back_exactly() {
        let back = parse_opensees(&portal_text()).unwrap();
        let mut want = portal();
        want.provenance = back.provenance.clone();
        assert_eq!(back, want);
        assert!(models_equivalent(&portal(), &back, COORD_TOL).equivalent);
    }

    #[test]
    fn duplicate_node_reports_line() {
        let text = portal_text().replace("node 2 6 0", "node 1 6 0");
        let line = text.lines().position(|l| l == "node 1 6 0").unwrap() + 1;
        let e = err(&text);
        assert_eq!(
            (e.kind, e.line),
            (DialectErrorKind::DuplicateDefinition, line)
        );
    }

    #[test]
    fn undefined_node_in_element() {
        let text = portal_text().replace("elasticBeamColumn 3 3 4", "elasticBeamColumn 3 3 9");
        assert_eq!(err(&text).code(), "UNDEFINED_REFERENCE");
    }

    #[test]
    fn undefined_variable_and_transform() {
        let text = portal_text().replace("set GIR_I", "set GIR_J");
        assert_eq!(err(&text).code(), "UNDEFINED_REFERENCE");
        let text = portal_text().replace("$GIR_I 1", "$GIR_I 2");
        assert_eq!(err(&text).code(), "UNDEFINED_REFERENCE");
    }

    #[test]
    fn unknown_command_is_syntax_error() {
        let text = portal_text().replace("wipe", "wipe\nrigidLink beam 1 2");
        let e = err(&text);
        assert_eq!((e.code(), e.line), ("DIALECT_SYNTAX_ERROR", 5));
    }

    #[test]
    fn missing_analyze_or_brace_fails_at_eof() {
        let text = portal_text().replace("analyze 1\n", "");
        let e = err(&text);
        assert_eq!(e.code(), "DIALECT_SYNTAX_ERROR");
        assert_eq!(e.line, text.lines().count() + 1);
        let text = portal_text().replace("}\n", "");
        assert_eq!(err(&text).code(), "DIALECT_SYNTAX_ERROR");
    }

    #[test]
    fn units_directive_is_required() {
        let text: String = portal_text()
            .lines()
            .filter(|l| !l.starts_with("# units:"))
            .map(|l| format!("{l}\n"))
            .collect();
        assert_eq!(err(&text).code(), "DIALECT_SYNTAX_ERROR");
    }

    #[test]
    fn literal_properties_get_synthesized_sections() {
        let text = portal_text().replace("$GIR_A $GIR_E $GIR_I", "0.03 200000000 0.00015");
        let m = parse_opensees(&text).unwrap();
        assert_eq!(m.element(3).unwrap().section, "SEC1");
        assert!(models_equivalent(&portal(), &m, COORD_TOL).equivalent);
    }

    #[test]
    fn beam_uniform_on_column_is_rejected() {
        let text = portal_text().replace("eleLoad -ele 3", "eleLoad -ele 1");
        assert_eq!(err(&text).code(), "DIALECT_SYNTAX_ERROR");
    }

    #[test]
    fn non_finite_number_is_rejected() {
        let text = portal_text().replace("node 4 6 3", "node 4 inf 3");
        assert_eq!(err(&text).code(), "DIALECT_SYNTAX_ERROR");
    }
}

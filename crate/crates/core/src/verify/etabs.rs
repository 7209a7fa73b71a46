use std::collections::{HashMap, HashSet};

use super::{parse_num, tokenize_quoted, DialectError, Tok};
use crate::codegen::unit_names::{etabs_force, etabs_length, force_from, length_from};
use crate::codegen::{restraint_from_spec, Dialect};
use crate::model::{is_identifier, ElementKind, SectionProperties, SupportKind};
use crate::story::{
    BasePoint, LineAssignment, LineLoadAssignment, LineTemplate, PointAssignment,
    PointLoadAssignment, StoryLevel, StoryModel, BASE_LEVEL,
};
use crate::units::UnitSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    ProgramInformation,
    Controls,
    Stories,
    Materials,
    FrameSections,
    PointCoordinates,
    LineConnectivities,
    PointAssigns,
    LineAssigns,
    LoadPatterns,
    PointLoads,
    FrameLoads,
    LoadCases,
    Finished,
}

const HEADERS: [(&str, Section); 13] = [
    ("PROGRAM INFORMATION", Section::ProgramInformation),
    ("CONTROLS", Section::Controls),
    ("STORIES - IN SEQUENCE FROM TOP", Section::Stories),
    ("MATERIAL PROPERTIES", Section::Materials),
    ("FRAME SECTIONS", Section::FrameSections),
    ("POINT COORDINATES", Section::PointCoordinates),
    ("LINE CONNECTIVITIES", Section::LineConnectivities),
    ("POINT ASSIGNS", Section::PointAssigns),
    ("LINE ASSIGNS", Section::LineAssigns),
    ("LOAD PATTERNS", Section::LoadPatterns),
    ("POINT OBJECT LOADS", Section::PointLoads),
    ("FRAME OBJECT LOADS", Section::FrameLoads),
    ("LOAD CASES", Section::LoadCases),
];

/// Cursor over one record's tokens.
struct Rec {
    toks: Vec<Tok>,
    at: usize,
    line: usize,
}

impl Rec {
    fn next(&mut self, what: &str) -> Result<&Tok, DialectError> {
        let t = self
            .toks
            .get(self.at)
            .ok_or_else(|| DialectError::syntax(self.line, format!("missing {what}")))?;
        self.at += 1;
        Ok(t)
    }

    fn quoted(&mut self, what: &str) -> Result<String, DialectError> {
        let line = self.line;
        match self.next(what)? {
            Tok::Quoted(s) => Ok(s.clone()),
            t => Err(DialectError::syntax(
                line,
                format!("expected quoted {what}, found {t}"),
            )),
        }
    }

    fn word(&mut self, want: &str) -> Result<(), DialectError> {
        let line = self.line;
        match self.next(want)? {
            Tok::Bare(s) if s == want => Ok(()),
            t => Err(DialectError::syntax(
                line,
                format!("expected {want}, found {t}"),
            )),
        }
    }

    fn bare(&mut self, what: &str) -> Result<String, DialectError> {
        let line = self.line;
        match self.next(what)? {
            Tok::Bare(s) => Ok(s.clone()),
            t => Err(DialectError::syntax(
                line,
                format!("expected {what}, found {t}"),
            )),
        }
    }

    fn num(&mut self, what: &str) -> Result<f64, DialectError> {
        let s = self.bare(what)?;
        parse_num(&s, self.line, what)
    }

    /// `KEY value` with a numeric value.
    fn keyed_num(&mut self, key: &str) -> Result<f64, DialectError> {
        self.word(key)?;
        self.num(key)
    }

    /// `KEY "value"` with a required literal.
    fn keyed_str(&mut self, key: &str, want: &str) -> Result<(), DialectError> {
        self.word(key)?;
        let v = self.quoted(key)?;
        if v == want {
            Ok(())
        } else {
            Err(DialectError::syntax(
                self.line,
                format!("{key} must be \"{want}\", found \"{v}\""),
            ))
        }
    }

    fn zero(&mut self, key: &str) -> Result<(), DialectError> {
        if self.keyed_num(key)? == 0.0 {
            Ok(())
        } else {
            Err(DialectError::syntax(self.line, format!("{key} must be 0")))
        }
    }

    fn is_done(&self) -> bool {
        self.at == self.toks.len()
    }

    fn done(&self) -> Result<(), DialectError> {
        match self.toks.get(self.at) {
            None => Ok(()),
            Some(t) => Err(DialectError::syntax(self.line, format!("unexpected {t}"))),
        }
    }
}

#[derive(Default)]
struct State {
    units: Option<UnitSystem>,
    program: bool,
    /// Top-down as listed: (name, height or base elevation, is base).
    stories: Vec<(String, f64, bool)>,
    materials: HashMap<String, f64>,
    sections: Vec<SectionProperties>,
    points: Vec<BasePoint>,
    templates: Vec<LineTemplate>,
    point_assignments: Vec<PointAssignment>,
    point_slots: HashSet<(String, String)>,
    line_assignments: Vec<LineAssignment>,
    line_slots: HashSet<(String, String)>,
    pattern: Option<String>,
    point_loads: Vec<PointLoadAssignment>,
    line_loads: Vec<LineLoadAssignment>,
    cases: HashSet<String>,
    case_patterns: HashSet<String>,
}

impl State {
    fn has_story(&self, name: &str) -> bool {
        self.stories.iter().any(|(n, _, _)| n == name)
    }

    fn level(&self, name: &str, line: usize) -> Result<(), DialectError> {
        if self.has_story(name) {
            Ok(())
        } else {
            Err(DialectError::undefined(
                line,
                format!("story \"{name}\" is not defined"),
            ))
        }
    }

    /// The level directly below `story`, if any.
    fn below(&self, story: &str) -> Option<&str> {
        let k = self.stories.iter().position(|(n, _, _)| n == story)?;
        self.stories.get(k + 1).map(|(n, _, _)| n.as_str())
    }

    fn point_slot(&self, point: &str, level: &str, line: usize) -> Result<(), DialectError> {
        if self
            .point_slots
            .contains(&(point.to_string(), level.to_string()))
        {
            Ok(())
        } else {
            Err(DialectError::undefined(
                line,
                format!("point \"{point}\" is not assigned to \"{level}\""),
            ))
        }
    }

    fn pattern_ref(&self, name: &str, line: usize) -> Result<(), DialectError> {
        if self.pattern.as_deref() == Some(name) {
            Ok(())
        } else {
            Err(DialectError::undefined(
                line,
                format!("load pattern \"{name}\" is not defined"),
            ))
        }
    }

    fn record(&mut self, section: Section, mut r: Rec) -> Result<(), DialectError> {
        let line = r.line;
        let head = r.bare("keyword")?;
        let allowed = matches!(
            (section, head.as_str()),
            (Section::ProgramInformation, "PROGRAM")
                | (Section::Controls, "UNITS")
                | (Section::Stories, "STORY")
                | (Section::Materials, "MATERIAL")
                | (Section::FrameSections, "FRAMESECTION")
                | (Section::PointCoordinates, "POINT")
                | (Section::LineConnectivities, "LINE")
                | (Section::PointAssigns, "POINTASSIGN")
                | (Section::LineAssigns, "LINEASSIGN")
                | (Section::LoadPatterns, "LOADPATTERN")
                | (Section::PointLoads, "POINTLOAD")
                | (Section::FrameLoads, "LINELOAD")
                | (Section::LoadCases, "LOADCASE")
        );
        if !allowed {
            return Err(DialectError::syntax(
                line,
                format!("`{head}` is not allowed in section {section:?}"),
            ));
        }

        match head.as_str() {
            "PROGRAM" => {
                if r.quoted("program")? != "ETABS" {
                    return Err(DialectError::syntax(line, "PROGRAM must be \"ETABS\""));
                }
                self.program = true;
            }
            "UNITS" => {
                let f = r.quoted("force unit")?;
                let l = r.quoted("length unit")?;
                if r.quoted("temperature unit")? != "C" {
                    return Err(DialectError::syntax(line, "temperature unit must be \"C\""));
                }
                let units = force_from(&f, etabs_force)
                    .zip(length_from(&l, etabs_length))
                    .map(|(f, l)| UnitSystem::new(l, f))
                    .ok_or_else(|| {
                        DialectError::syntax(line, format!("unsupported units \"{f}\" \"{l}\""))
                    })?;
                if self.units.replace(units).is_some() {
                    return Err(DialectError::duplicate(line, "units given twice"));
                }
            }
            "STORY" => {
                let name = r.quoted("story name")?;
                if self.stories.last().is_some_and(|(_, _, base)| *base) {
                    return Err(DialectError::syntax(
                        line,
                        "story listed below the base level",
                    ));
                }
                if self.has_story(&name) {
                    return Err(DialectError::duplicate(
                        line,
                        format!("story \"{name}\" defined twice"),
                    ));
                }
                let kw = r.bare("HEIGHT or ELEV")?;
                let value = r.num(&kw)?;
                match kw.as_str() {
                    "HEIGHT" if value > 0.0 => self.stories.push((name, value, false)),
                    "HEIGHT" => {
                        return Err(DialectError::syntax(line, "story height must be positive"))
                    }
                    "ELEV" if name == BASE_LEVEL => self.stories.push((name, value, true)),
                    "ELEV" => {
                        return Err(DialectError::syntax(
                            line,
                            format!("only \"{BASE_LEVEL}\" takes ELEV"),
                        ))
                    }
                    other => {
                        return Err(DialectError::syntax(
                            line,
                            format!("expected HEIGHT or ELEV, found {other}"),
                        ))
                    }
                }
            }
            "MATERIAL" => {
                let name = r.quoted("material name")?;
                r.keyed_str("TYPE", "Other")?;
                let e = r.keyed_num("E")?;
                r.keyed_num("U")?;
                if self.materials.insert(name.clone(), e).is_some() {
                    return Err(DialectError::duplicate(
                        line,
                        format!("material \"{name}\" defined twice"),
                    ));
                }
            }
            "FRAMESECTION" => {
                let name = r.quoted("section name")?;
                if !is_identifier(&name) {
                    return Err(DialectError::syntax(
                        line,
                        format!("bad section name \"{name}\""),
                    ));
                }
                r.word("MATERIAL")?;
                let mat = r.quoted("material")?;
                let e = *self.materials.get(&mat).ok_or_else(|| {
                    DialectError::undefined(line, format!("material \"{mat}\" is not defined"))
                })?;
                r.keyed_str("SHAPE", "General")?;
                let a = r.keyed_num("AREA")?;
                let i = r.keyed_num("I33")?;
                r.keyed_num("I22")?;
                r.keyed_num("AS2")?;
                r.keyed_num("AS3")?;
                if self.sections.iter().any(|s| s.name == name) {
                    return Err(DialectError::duplicate(
                        line,
                        format!("section \"{name}\" defined twice"),
                    ));
                }
                self.sections.push(SectionProperties::new(name, e, a, i));
            }
            "POINT" => {
                let name = r.quoted("point name")?;
                let x = r.num("x")?;
                if r.num("y")? != 0.0 {
                    return Err(DialectError::syntax(
                        line,
                        "points must lie on the Y = 0 plane",
                    ));
                }
                if self.points.iter().any(|p| p.name == name) {
                    return Err(DialectError::duplicate(
                        line,
                        format!("point \"{name}\" defined twice"),
                    ));
                }
                self.points.push(BasePoint { name, x });
            }
            "LINE" => {
                let name = r.quoted("line name")?;
                let kind = match r.bare("COLUMN or BEAM")?.as_str() {
                    "COLUMN" => ElementKind::Column,
                    "BEAM" => ElementKind::Girder,
                    other => {
                        return Err(DialectError::syntax(
                            line,
                            format!("unsupported line type {other}"),
                        ))
                    }
                };
                let pi = r.quoted("point")?;
                let pj = r.quoted("point")?;
                for p in [&pi, &pj] {
                    if !self.points.iter().any(|b| &b.name == p) {
                        return Err(DialectError::undefined(
                            line,
                            format!("point \"{p}\" is not defined"),
                        ));
                    }
                }
                let n = r.num("story count")?;
                let ok = match kind {
                    ElementKind::Column => pi == pj && n == 1.0,
                    ElementKind::Girder => pi != pj && n == 0.0,
                };
                if !ok {
                    return Err(DialectError::syntax(
                        line,
                        format!("malformed line \"{name}\""),
                    ));
                }
                if self.templates.iter().any(|t| t.name == name) {
                    return Err(DialectError::duplicate(
                        line,
                        format!("line \"{name}\" defined twice"),
                    ));
                }
                self.templates.push(LineTemplate {
                    name,
                    kind,
                    point_i: pi,
                    point_j: pj,
                });
            }
            "POINTASSIGN" => {
                let point = r.quoted("point")?;
                let level = r.quoted("level")?;
                if !self.points.iter().any(|b| b.name == point) {
                    return Err(DialectError::undefined(
                        line,
                        format!("point \"{point}\" is not defined"),
                    ));
                }
                self.level(&level, line)?;
                let support = if r.is_done() {
                    None
                } else {
                    r.word("RESTRAINT")?;
                    let spec = r.quoted("restraint")?;
                    let kind: SupportKind = restraint_from_spec(&spec).ok_or_else(|| {
                        DialectError::syntax(line, format!("unsupported restraint \"{spec}\""))
                    })?;
                    Some(kind)
                };
                if !self.point_slots.insert((point.clone(), level.clone())) {
                    return Err(DialectError::duplicate(
                        line,
                        format!("point \"{point}\" assigned to \"{level}\" twice"),
                    ));
                }
                self.point_assignments.push(PointAssignment {
                    point,
                    level,
                    node_id: self.point_assignments.len() as u32 + 1,
                    support,
                    description: String::new(),
                });
            }
            "LINEASSIGN" => {
                let name = r.quoted("line")?;
                let story = r.quoted("story")?;
                r.word("SECTION")?;
                let section = r.quoted("section")?;
                let t = self
                    .templates
                    .iter()
                    .find(|t| t.name == name)
                    .ok_or_else(|| {
                        DialectError::undefined(line, format!("line \"{name}\" is not defined"))
                    })?;
                self.level(&story, line)?;
                if story == BASE_LEVEL {
                    return Err(DialectError::syntax(
                        line,
                        "lines cannot be assigned to the base level",
                    ));
                }
                if !self.sections.iter().any(|s| s.name == section) {
                    return Err(DialectError::undefined(
                        line,
                        format!("section \"{section}\" is not defined"),
                    ));
                }
                match t.kind {
                    ElementKind::Column => {
                        let lower = self
                            .below(&story)
                            .expect("non-base story has a level below");
                        self.point_slot(&t.point_i, lower, line)?;
                        self.point_slot(&t.point_i, &story, line)?;
                    }
                    ElementKind::Girder => {
                        self.point_slot(&t.point_i, &story, line)?;
                        self.point_slot(&t.point_j, &story, line)?;
                    }
                }
                if !self.line_slots.insert((name.clone(), story.clone())) {
                    return Err(DialectError::duplicate(
                        line,
                        format!("line \"{name}\" assigned to \"{story}\" twice"),
                    ));
                }
                self.line_assignments.push(LineAssignment {
                    line: name,
                    story,
                    element_id: self.line_assignments.len() as u32 + 1,
                    section,
                    description: String::new(),
                });
            }
            "LOADPATTERN" => {
                let name = r.quoted("pattern")?;
                r.keyed_str("TYPE", "Other")?;
                r.zero("SELFWEIGHT")?;
                if self.pattern.is_some() {
                    return Err(DialectError::syntax(
                        line,
                        "only one load pattern is supported",
                    ));
                }
                self.pattern = Some(name);
            }
            "POINTLOAD" => {
                let point = r.quoted("point")?;
                let level = r.quoted("level")?;
                self.point_slot(&point, &level, line)?;
                r.keyed_str("TYPE", "FORCE")?;
                r.word("LC")?;
                let lc = r.quoted("load pattern")?;
                self.pattern_ref(&lc, line)?;
                let fx = r.keyed_num("FX")?;
                let fy = r.keyed_num("FZ")?;
                let my = r.keyed_num("MY")?;
                self.point_loads.push(PointLoadAssignment {
                    point,
                    level,
                    fx,
                    fy,
                    mz: -my,
                });
            }
            "LINELOAD" => {
                let name = r.quoted("line")?;
                let story = r.quoted("story")?;
                if !self.line_slots.contains(&(name.clone(), story.clone())) {
                    return Err(DialectError::undefined(
                        line,
                        format!("line \"{name}\" is not assigned to \"{story}\""),
                    ));
                }
                if self
                    .templates
                    .iter()
                    .any(|t| t.name == name && t.kind != ElementKind::Girder)
                {
                    return Err(DialectError::syntax(
                        line,
                        format!("line load on column \"{name}\""),
                    ));
                }
                r.keyed_str("TYPE", "UNIFF")?;
                r.keyed_str("DIR", "Z")?;
                r.word("LC")?;
                let lc = r.quoted("load pattern")?;
                self.pattern_ref(&lc, line)?;
                let w = r.keyed_num("FVAL")?;
                self.line_loads.push(LineLoadAssignment {
                    line: name,
                    story,
                    w_transverse: w,
                });
            }
            "LOADCASE" => {
                let name = r.quoted("case")?;
                match r.bare("TYPE or LOADPAT")?.as_str() {
                    "TYPE" => {
                        if r.quoted("type")? != "Linear Static" {
                            return Err(DialectError::syntax(
                                line,
                                "only \"Linear Static\" cases are supported",
                            ));
                        }
                        r.keyed_str("INITCOND", "PRESET")?;
                        if !self.cases.insert(name.clone()) {
                            return Err(DialectError::duplicate(
                                line,
                                format!("case \"{name}\" defined twice"),
                            ));
                        }
                    }
                    "LOADPAT" => {
                        if !self.cases.contains(&name) {
                            return Err(DialectError::undefined(
                                line,
                                format!("case \"{name}\" is not defined"),
                            ));
                        }
                        let pat = r.quoted("load pattern")?;
                        self.pattern_ref(&pat, line)?;
                        if r.keyed_num("SF")? != 1.0 {
                            return Err(DialectError::syntax(
                                line,
                                "only unit scale factors are supported",
                            ));
                        }
                        self.case_patterns.insert(name);
                    }
                    other => return Err(DialectError::syntax(line, format!("unexpected {other}"))),
                }
            }
            _ => unreachable!("keyword checked against the section"),
        }
        r.done()
    }

    fn finish(self, eof: usize) -> Result<StoryModel, DialectError> {
        let units = self
            .units
            .ok_or_else(|| DialectError::syntax(eof, "missing UNITS"))?;
        if !self.program {
            return Err(DialectError::syntax(eof, "missing PROGRAM"));
        }
        let Some((_, base_elev, true)) = self.stories.last().cloned() else {
            return Err(DialectError::syntax(
                eof,
                format!("missing \"{BASE_LEVEL}\" story with ELEV"),
            ));
        };
        // elevations bottom-up from the base
        let mut levels = Vec::with_capacity(self.stories.len());
        let mut elevation = base_elev;
        for (name, value, base) in self.stories.iter().rev() {
            if !base {
                elevation += value;
            }
            levels.push(StoryLevel {
                name: name.clone(),
                elevation,
                height: if *base { 0.0 } else { *value },
            });
        }
        levels.reverse();
        Ok(StoryModel {
            units,
            story_levels: levels,
            base_points: self.points,
            line_templates: self.templates,
            point_assignments: self.point_assignments,
            line_assignments: self.line_assignments,
            point_loads: self.point_loads,
            line_loads: self.line_loads,
            sections: self.sections,
            provenance: format!("parsed from {}", Dialect::EtabsE2k),
        })
    }
}

/// Parses the ETABS subset written by the emitter into the story model.
/// Node and element ids follow the order of the point and line assigns.
pub fn parse_etabs(text: &str) -> Result<StoryModel, DialectError> {
    let mut st = State::default();
    let mut section = Section::Preamble;
    let mut seen = HashSet::new();
    let mut end_seen = false;
    let mut last_line = 0;

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if section == Section::Finished {
            return Err(DialectError::syntax(
                line,
                "content after END OF MODEL FILE",
            ));
        }
        if let Some(title) = trimmed.strip_prefix('$') {
            let title = title.trim();
            if title == "END OF MODEL FILE" {
                if !end_seen {
                    return Err(DialectError::syntax(line, "END OF MODEL FILE before END"));
                }
                section = Section::Finished;
            } else if let Some(&(_, s)) = HEADERS.iter().find(|(h, _)| *h == title) {
                if end_seen {
                    return Err(DialectError::syntax(line, "section after END"));
                }
                if !seen.insert(title.to_string()) {
                    return Err(DialectError::duplicate(
                        line,
                        format!("section {title} appears twice"),
                    ));
                }
                section = s;
            }
            continue;
        }
        if trimmed == "END" {
            if end_seen {
                return Err(DialectError::duplicate(line, "END appears twice"));
            }
            end_seen = true;
            continue;
        }
        if end_seen {
            return Err(DialectError::syntax(line, "record after END"));
        }
        let toks = tokenize_quoted(trimmed, line)?;
        st.record(section, Rec { toks, at: 0, line })?;
    }
    let eof = last_line + 1;
    if section != Section::Finished {
        return Err(DialectError::syntax(
            eof,
            "missing END and END OF MODEL FILE",
        ));
    }
    st.finish(eof)
}

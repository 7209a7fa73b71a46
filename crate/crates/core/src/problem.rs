//! The structured problem template: a line-oriented `key = value` format
//! with bracketed section headers.
//!
//! ```text
//! [UNITS]     length = m ; force = kN
//! [GEOMETRY]  bays = 2
//!             stories_per_bay = 3, 3
//!             bay_widths = 6, 6 m
//!             story_heights = 3, 3, 3 m
//! [SUPPORTS]  base = fixed
//! [MATERIALS] column: E = 2e8 kN/m^2, A = 0.04 m^2, I = 2e-4 m^4
//!             girder: E = 2e8 kN/m^2, A = 0.03 m^2, I = 1.5e-4 m^4
//! [LOADS]     lateral_per_floor = 10 kN
//!             gravity_udl = 5 kN/m
//!             point = x 6, y 3, fx 0, fy -20, mz 0
//! [TARGET]    software = all
//! ```
//!
//! `#` starts a comment and `;` separates statements on one line. Sections
//! may come in any order; each appears once. `[TARGET]` is optional and
//! defaults to `all`. Every quantity is converted into the declared
//! `[UNITS]`; `point` components are already in those units.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codegen::Dialect;
use crate::model::{SectionProperties, SupportKind};
use crate::numfmt::num;
use crate::units::{conversion_factor, CompoundUnit, Dimension, ForceUnit, LengthUnit, UnitSystem};

pub const COLUMN_SECTION: &str = "COL";
pub const GIRDER_SECTION: &str = "GIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Opensees,
    Sap2000,
    Etabs,
    All,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Self::Opensees => "opensees",
            Self::Sap2000 => "sap2000",
            Self::Etabs => "etabs",
            Self::All => "all",
        }
    }

    pub fn dialects(self) -> Vec<Dialect> {
        match self {
            Self::Opensees => vec![Dialect::OpenseesTcl],
            Self::Sap2000 => vec![Dialect::Sap2000S2k],
            Self::Etabs => vec![Dialect::EtabsE2k],
            Self::All => Dialect::ALL.to_vec(),
        }
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Self::Opensees, Self::Sap2000, Self::Etabs, Self::All]
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown target `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtraPointLoad {
    pub x: f64,
    pub y: f64,
    pub fx: f64,
    pub fy: f64,
    pub mz: f64,
}

/// Parsed and validated content of a problem template, in `units`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameProblemSpec {
    pub units: UnitSystem,
    pub n_bays: usize,
    pub stories_per_bay: Vec<usize>,
    pub bay_widths: Vec<f64>,
    /// Height of each story from the bottom; shared by all bays.
    pub story_heights: Vec<f64>,
    pub support_kind: SupportKind,
    pub column_section: SectionProperties,
    pub girder_section: SectionProperties,
    pub lateral_load_per_floor: f64,
    pub gravity_udl: f64,
    pub extra_point_loads: Vec<ExtraPointLoad>,
    pub target: Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("SYNTAX_ERROR at {pos}: expected {expected}, found {found}")]
    Syntax {
        pos: Pos,
        expected: String,
        found: String,
    },
    #[error("MISSING_SECTION: section [{section}] is absent")]
    MissingSection { section: &'static str },
    #[error("MISSING_KEY: section [{section}] lacks `{key}`")]
    MissingKey {
        section: &'static str,
        key: &'static str,
    },
    #[error("INCONSISTENT_LENGTHS: {what} has {found} entries, expected {expected}")]
    InconsistentLengths {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("UNSUPPORTED_UNIT at {pos}: `{unit}` is not a {expected} unit")]
    UnsupportedUnit {
        pos: Pos,
        unit: String,
        expected: Dimension,
    },
    #[error("INVALID_VALUE{}: {message}", .pos.map(|p| format!(" at {p}")).unwrap_or_default())]
    InvalidValue { pos: Option<Pos>, message: String },
}

impl ProblemError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::Syntax { .. } => "SYNTAX_ERROR",
            Self::MissingSection { .. } => "MISSING_SECTION",
            Self::MissingKey { .. } => "MISSING_KEY",
            Self::InconsistentLengths { .. } => "INCONSISTENT_LENGTHS",
            Self::UnsupportedUnit { .. } => "UNSUPPORTED_UNIT",
            Self::InvalidValue { .. } => "INVALID_VALUE",
        }
    }
}

impl FrameProblemSpec {
    /// Checks list lengths and value ranges.
    pub fn validate(&self) -> Result<(), ProblemError> {
        let invalid = |message: String| Err(ProblemError::InvalidValue { pos: None, message });
        if self.n_bays == 0 {
            return invalid("a frame needs at least one bay".into());
        }
        for (what, found) in [
            ("stories_per_bay", self.stories_per_bay.len()),
            ("bay_widths", self.bay_widths.len()),
        ] {
            if found != self.n_bays {
                return Err(ProblemError::InconsistentLengths {
                    what,
                    expected: self.n_bays,
                    found,
                });
            }
        }
        if self.stories_per_bay.contains(&0) {
            return invalid("every bay needs at least one story".into());
        }
        let max_stories = self.max_stories();
        if self.story_heights.len() != max_stories {
            return Err(ProblemError::InconsistentLengths {
                what: "story_heights",
                expected: max_stories,
                found: self.story_heights.len(),
            });
        }
        for (what, values) in [
            ("bay width", &self.bay_widths),
            ("story height", &self.story_heights),
        ] {
            if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return invalid(format!("{what} must be positive, got {v}"));
            }
        }
        for s in [&self.column_section, &self.girder_section] {
            for v in [s.youngs_modulus, s.area, s.moment_of_inertia] {
                if !(v.is_finite() && v > 0.0) {
                    return invalid(format!("section {} has non-positive property {v}", s.name));
                }
            }
        }
        let finite = [self.lateral_load_per_floor, self.gravity_udl]
            .into_iter()
            .chain(
                self.extra_point_loads
                    .iter()
                    .flat_map(|p| [p.x, p.y, p.fx, p.fy, p.mz]),
            )
            .all(f64::is_finite);
        if !finite {
            return invalid("load values must be finite".into());
        }
        Ok(())
    }

    pub fn max_stories(&self) -> usize {
        self.stories_per_bay.iter().copied().max().unwrap_or(0)
    }

    pub fn is_regular(&self) -> bool {
        self.stories_per_bay.windows(2).all(|w| w[0] == w[1])
    }
}

// ---------------------------------------------------------------------------
// lexing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Num(String),
    Punct(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Num(n) => write!(f, "number `{n}`"),
            Tok::Punct(c) => write!(f, "`{c}`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: Pos,
}

fn is_word_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '/' | '^')
}

fn lex_statement(text: &str, line: usize, offset: usize) -> Result<Vec<Token>, ProblemError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos {
            line,
            column: offset + i + 1,
        };
        if c.is_whitespace() {
            i += 1;
        } else if is_word_start(c) {
            let start = i;
            while i < chars.len() && is_word_char(chars[i]) {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Word(chars[start..i].iter().collect()),
                pos,
            });
        } else if c.is_ascii_digit() || matches!(c, '+' | '-' | '.') {
            let start = i;
            i = scan_number(&chars, i).ok_or_else(|| ProblemError::Syntax {
                pos,
                expected: "a number".into(),
                found: format!("`{c}`"),
            })?;
            out.push(Token {
                tok: Tok::Num(chars[start..i].iter().collect()),
                pos,
            });
        } else if matches!(c, '=' | ',' | ':') {
            out.push(Token {
                tok: Tok::Punct(c),
                pos,
            });
            i += 1;
        } else {
            return Err(ProblemError::Syntax {
                pos,
                expected: "a key, value or separator".into(),
                found: format!("`{c}`"),
            });
        }
    }
    Ok(out)
}

/// `[+-]? (digits [. digits?] | . digits) ([eE] [+-]? digits)?`; returns the
/// end index or `None` when no digits are present.
fn scan_number(chars: &[char], mut i: usize) -> Option<usize> {
    let digits = |i: &mut usize| {
        let s = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        *i - s
    };
    if matches!(chars.get(i), Some('+' | '-')) {
        i += 1;
    }
    let mut mantissa = digits(&mut i);
    if chars.get(i) == Some(&'.') {
        i += 1;
        mantissa += digits(&mut i);
    }
    if mantissa == 0 {
        return None;
    }
    if matches!(chars.get(i), Some('e' | 'E')) {
        let mut j = i + 1;
        if matches!(chars.get(j), Some('+' | '-')) {
            j += 1;
        }
        if digits(&mut j) == 0 {
            return None;
        }
        i = j;
    }
    Some(i)
}

// ---------------------------------------------------------------------------
// parsing

#[derive(Debug)]
struct Statement {
    key: String,
    key_pos: Pos,
    /// Tokens after the `=` (or after `:` for material lines).
    rhs: Vec<Token>,
    end: Pos,
}

const SECTIONS: [&str; 6] = [
    "UNITS",
    "GEOMETRY",
    "SUPPORTS",
    "MATERIALS",
    "LOADS",
    "TARGET",
];

fn section_name(s: &str) -> Option<&'static str> {
    SECTIONS.into_iter().find(|n| *n == s)
}

fn split_sections(text: &str) -> Result<HashMap<&'static str, Vec<Statement>>, ProblemError> {
    let mut sections: HashMap<&'static str, Vec<Statement>> = HashMap::new();
    let mut current: Option<&'static str> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let mut offset = 0;
        let mut rest = body;

        let trimmed = rest.trim_start();
        if let Some(after) = trimmed.strip_prefix('[') {
            let lead = rest.len() - trimmed.len();
            let pos = Pos {
                line,
                column: lead + 1,
            };
            let Some(close) = after.find(']') else {
                return Err(ProblemError::Syntax {
                    pos,
                    expected: "`]` closing the section header".into(),
                    found: "end of line".into(),
                });
            };
            let name = after[..close].trim();
            let Some(name) = section_name(name) else {
                return Err(ProblemError::Syntax {
                    pos,
                    expected: format!("one of [{}]", SECTIONS.join("], [")),
                    found: format!("[{name}]"),
                });
            };
            if sections.contains_key(name) {
                return Err(ProblemError::Syntax {
                    pos,
                    expected: "each section at most once".into(),
                    found: format!("a second [{name}]"),
                });
            }
            sections.insert(name, Vec::new());
            current = Some(name);
            offset = lead + 1 + close + 1;
            rest = &body[offset..];
        }

        for piece in rest.split(';') {
            let tokens = lex_statement(piece, line, offset)?;
            offset += piece.chars().count() + 1;
            if tokens.is_empty() {
                continue;
            }
            let Some(section) = current else {
                return Err(ProblemError::Syntax {
                    pos: tokens[0].pos,
                    expected: "a section header such as [GEOMETRY]".into(),
                    found: tokens[0].tok.to_string(),
                });
            };
            let stmt = statement(tokens, section)?;
            sections.get_mut(section).unwrap().push(stmt);
        }
    }
    Ok(sections)
}

fn statement(tokens: Vec<Token>, section: &str) -> Result<Statement, ProblemError> {
    let mut it = tokens.into_iter();
    let first = it.next().unwrap();
    let Tok::Word(key) = first.tok else {
        return Err(ProblemError::Syntax {
            pos: first.pos,
            expected: "a key".into(),
            found: first.tok.to_string(),
        });
    };
    let sep = if section == "MATERIALS" { ':' } else { '=' };
    let end_of_key = Pos {
        line: first.pos.line,
        column: first.pos.column + key.len(),
    };
    match it.next() {
        Some(Token {
            tok: Tok::Punct(c), ..
        }) if c == sep => {}
        other => {
            return Err(ProblemError::Syntax {
                pos: other.as_ref().map_or(end_of_key, |t| t.pos),
                expected: format!("`{sep}` after `{key}`"),
                found: other.map_or("end of statement".into(), |t| t.tok.to_string()),
            })
        }
    }
    let rhs: Vec<Token> = it.collect();
    let end = rhs.last().map_or(end_of_key, |t| Pos {
        line: t.pos.line,
        column: t.pos.column + 1,
    });
    Ok(Statement {
        key,
        key_pos: first.pos,
        rhs,
        end,
    })
}

/// Cursor over the right-hand side of one statement.
struct Rhs<'a> {
    toks: &'a [Token],
    at: usize,
    end: Pos,
}

impl<'a> Rhs<'a> {
    fn new(stmt: &'a Statement) -> Self {
        Self {
            toks: &stmt.rhs,
            at: 0,
            end: stmt.end,
        }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.at)
    }

    fn pos(&self) -> Pos {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ProblemError> {
        Err(ProblemError::Syntax {
            pos: self.pos(),
            expected: expected.into(),
            found: self
                .peek()
                .map_or("end of statement".into(), |t| t.tok.to_string()),
        })
    }

    fn number(&mut self) -> Result<(f64, Pos), ProblemError> {
        match self.peek() {
            Some(Token {
                tok: Tok::Num(n),
                pos,
            }) => {
                self.at += 1;
                let v: f64 = n.parse().expect("lexer only yields valid numbers");
                Ok((v, *pos))
            }
            _ => self.fail("a number"),
        }
    }

    fn integer(&mut self) -> Result<usize, ProblemError> {
        match self.peek() {
            Some(Token {
                tok: Tok::Num(n),
                pos,
            }) => match n.parse::<usize>() {
                Ok(v) => {
                    self.at += 1;
                    Ok(v)
                }
                Err(_) => Err(ProblemError::Syntax {
                    pos: *pos,
                    expected: "a non-negative integer".into(),
                    found: format!("number `{n}`"),
                }),
            },
            _ => self.fail("an integer"),
        }
    }

    fn word(&mut self, expected: &str) -> Result<(&'a str, Pos), ProblemError> {
        match self.peek() {
            Some(Token {
                tok: Tok::Word(w),
                pos,
            }) => {
                self.at += 1;
                Ok((w.as_str(), *pos))
            }
            _ => self.fail(expected),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Token { tok: Tok::Punct(p), .. }) if *p == c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ProblemError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(&format!("`{c}`"))
        }
    }

    fn done(&self) -> Result<(), ProblemError> {
        if self.peek().is_some() {
            self.fail("end of statement")
        } else {
            Ok(())
        }
    }

    /// A unit word of the given dimension; returns the factor into `units`.
    fn unit(&mut self, units: UnitSystem, dim: Dimension) -> Result<f64, ProblemError> {
        let (w, pos) = self.word(&format!("a {dim} unit"))?;
        match CompoundUnit::parse(w) {
            Some(u) if u.dimension == dim => {
                Ok(conversion_factor(u, CompoundUnit::of_system(units, dim)))
            }
            _ => Err(ProblemError::UnsupportedUnit {
                pos,
                unit: w.to_string(),
                expected: dim,
            }),
        }
    }

    fn int_list(&mut self) -> Result<Vec<usize>, ProblemError> {
        let mut out = vec![self.integer()?];
        while self.eat(',') {
            out.push(self.integer()?);
        }
        Ok(out)
    }

    fn num_list(&mut self) -> Result<Vec<f64>, ProblemError> {
        let mut out = vec![self.number()?.0];
        while self.eat(',') {
            out.push(self.number()?.0);
        }
        Ok(out)
    }
}

/// Statements of one section keyed by name; rejects unknown and repeated
/// keys except those listed as repeatable.
struct Keyed<'a> {
    section: &'static str,
    map: HashMap<&'a str, &'a Statement>,
    repeated: Vec<&'a Statement>,
}

impl<'a> Keyed<'a> {
    fn new(
        section: &'static str,
        stmts: &'a [Statement],
        keys: &[&str],
        repeatable: &str,
    ) -> Result<Self, ProblemError> {
        let mut map = HashMap::new();
        let mut repeated = Vec::new();
        for s in stmts {
            if s.key == repeatable {
                repeated.push(s);
                continue;
            }
            if !keys.contains(&s.key.as_str()) {
                let mut all: Vec<&str> = keys.to_vec();
                if !repeatable.is_empty() {
                    all.push(repeatable);
                }
                return Err(ProblemError::Syntax {
                    pos: s.key_pos,
                    expected: format!("one of {} in [{section}]", all.join(", ")),
                    found: format!("`{}`", s.key),
                });
            }
            if map.insert(s.key.as_str(), s).is_some() {
                return Err(ProblemError::Syntax {
                    pos: s.key_pos,
                    expected: format!("`{}` at most once", s.key),
                    found: "a repeated key".into(),
                });
            }
        }
        Ok(Self {
            section,
            map,
            repeated,
        })
    }

    fn get(&self, key: &'static str) -> Result<&'a Statement, ProblemError> {
        self.map.get(key).copied().ok_or(ProblemError::MissingKey {
            section: self.section,
            key,
        })
    }
}

/// Parses a problem template into a validated spec.
pub fn parse_problem(text: &str) -> Result<FrameProblemSpec, ProblemError> {
    let sections = split_sections(text)?;
    let section = |name: &'static str| {
        sections
            .get(name)
            .map(Vec::as_slice)
            .ok_or(ProblemError::MissingSection { section: name })
    };

    let units = parse_units(section("UNITS")?)?;

    let geo = Keyed::new(
        "GEOMETRY",
        section("GEOMETRY")?,
        &["bays", "stories_per_bay", "bay_widths", "story_heights"],
        "",
    )?;
    let supports = Keyed::new("SUPPORTS", section("SUPPORTS")?, &["base"], "")?;
    let materials = Keyed::new(
        "MATERIALS",
        section("MATERIALS")?,
        &["column", "girder"],
        "",
    )?;
    let loads = Keyed::new(
        "LOADS",
        section("LOADS")?,
        &["lateral_per_floor", "gravity_udl"],
        "point",
    )?;

    let n_bays = {
        let mut r = Rhs::new(geo.get("bays")?);
        let v = r.integer()?;
        r.done()?;
        v
    };
    let stories_per_bay = {
        let mut r = Rhs::new(geo.get("stories_per_bay")?);
        let v = r.int_list()?;
        r.done()?;
        v
    };
    let lengths = |key: &'static str| -> Result<Vec<f64>, ProblemError> {
        let mut r = Rhs::new(geo.get(key)?);
        let raw = r.num_list()?;
        let f = r.unit(units, Dimension::LENGTH)?;
        r.done()?;
        Ok(raw.into_iter().map(|v| v * f).collect())
    };
    let bay_widths = lengths("bay_widths")?;
    let story_heights = lengths("story_heights")?;

    let support_kind = {
        let mut r = Rhs::new(supports.get("base")?);
        let (w, pos) = r.word("a support kind")?;
        r.done()?;
        SupportKind::ALL
            .into_iter()
            .find(|k| k.name() == w)
            .ok_or_else(|| ProblemError::Syntax {
                pos,
                expected: "fixed, pinned, roller_x or roller_y".into(),
                found: format!("`{w}`"),
            })?
    };

    let column_section = parse_material(materials.get("column")?, COLUMN_SECTION, units)?;
    let girder_section = parse_material(materials.get("girder")?, GIRDER_SECTION, units)?;

    let quantity = |key: &'static str, dim: Dimension| -> Result<f64, ProblemError> {
        let mut r = Rhs::new(loads.get(key)?);
        let (v, _) = r.number()?;
        let f = r.unit(units, dim)?;
        r.done()?;
        Ok(v * f)
    };
    let lateral_load_per_floor = quantity("lateral_per_floor", Dimension::FORCE)?;
    let gravity_udl = quantity("gravity_udl", Dimension::LINE_LOAD)?;
    let extra_point_loads = loads
        .repeated
        .iter()
        .map(|s| parse_point(s))
        .collect::<Result<Vec<_>, _>>()?;

    let target = match sections.get("TARGET") {
        None => Target::All,
        Some(stmts) => {
            let keyed = Keyed::new("TARGET", stmts, &["software"], "")?;
            let mut r = Rhs::new(keyed.get("software")?);
            let (w, pos) = r.word("a target")?;
            r.done()?;
            w.parse().map_err(|_| ProblemError::Syntax {
                pos,
                expected: "opensees, sap2000, etabs or all".into(),
                found: format!("`{w}`"),
            })?
        }
    };

    let spec = FrameProblemSpec {
        units,
        n_bays,
        stories_per_bay,
        bay_widths,
        story_heights,
        support_kind,
        column_section,
        girder_section,
        lateral_load_per_floor,
        gravity_udl,
        extra_point_loads,
        target,
    };
    spec.validate()?;
    Ok(spec)
}

fn parse_units(stmts: &[Statement]) -> Result<UnitSystem, ProblemError> {
    let keyed = Keyed::new("UNITS", stmts, &["length", "force"], "")?;
    let one_word = |key: &'static str| -> Result<(&str, Pos), ProblemError> {
        let mut r = Rhs::new(keyed.get(key)?);
        let w = r.word("a unit")?;
        r.done()?;
        Ok(w)
    };
    let (l, lpos) = one_word("length")?;
    let (f, fpos) = one_word("force")?;
    let length = LengthUnit::from_str(l).map_err(|_| ProblemError::UnsupportedUnit {
        pos: lpos,
        unit: l.into(),
        expected: Dimension::LENGTH,
    })?;
    let force = ForceUnit::from_str(f).map_err(|_| ProblemError::UnsupportedUnit {
        pos: fpos,
        unit: f.into(),
        expected: Dimension::FORCE,
    })?;
    Ok(UnitSystem::new(length, force))
}

fn parse_material(
    stmt: &Statement,
    name: &str,
    units: UnitSystem,
) -> Result<SectionProperties, ProblemError> {
    let mut r = Rhs::new(stmt);
    let mut values: [Option<f64>; 3] = [None; 3];
    loop {
        let (key, pos) = r.word("E, A or I")?;
        let (slot, dim) = match key {
            "E" => (0, Dimension::STRESS),
            "A" => (1, Dimension::AREA),
            "I" => (2, Dimension::INERTIA),
            _ => {
                return Err(ProblemError::Syntax {
                    pos,
                    expected: "E, A or I".into(),
                    found: format!("`{key}`"),
                })
            }
        };
        if values[slot].is_some() {
            return Err(ProblemError::Syntax {
                pos,
                expected: format!("`{key}` once"),
                found: "a repeated property".into(),
            });
        }
        r.expect('=')?;
        let (v, _) = r.number()?;
        values[slot] = Some(v * r.unit(units, dim)?);
        if !r.eat(',') {
            break;
        }
    }
    r.done()?;
    match values {
        [Some(e), Some(a), Some(i)] => Ok(SectionProperties::new(name, e, a, i)),
        _ => r.fail("all of E, A and I"),
    }
}

fn parse_point(stmt: &Statement) -> Result<ExtraPointLoad, ProblemError> {
    const KEYS: [&str; 5] = ["x", "y", "fx", "fy", "mz"];
    let mut r = Rhs::new(stmt);
    let mut values: [Option<f64>; 5] = [None; 5];
    loop {
        let (key, pos) = r.word("x, y, fx, fy or mz")?;
        let Some(slot) = KEYS.iter().position(|k| *k == key) else {
            return Err(ProblemError::Syntax {
                pos,
                expected: "x, y, fx, fy or mz".into(),
                found: format!("`{key}`"),
            });
        };
        if values[slot].is_some() {
            return Err(ProblemError::Syntax {
                pos,
                expected: format!("`{key}` once"),
                found: "a repeated component".into(),
            });
        }
        values[slot] = Some(r.number()?.0);
        if !r.eat(',') {
            break;
        }
    }
    r.done()?;
    match values {
        [Some(x), Some(y), Some(fx), Some(fy), Some(mz)] => Ok(ExtraPointLoad { x, y, fx, fy, mz }),
        _ => r.fail("all of x, y, fx, fy and mz"),
    }
}

// ---------------------------------------------------------------------------
// formatting

fn join_nums(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(num).collect::<Vec<_>>().join(", ")
}

/// Canonical template text for `spec`; `parse_problem` inverts it exactly.
pub fn format_problem(spec: &FrameProblemSpec) -> String {
    let u = spec.units;
    let spell = |d| CompoundUnit::spell(u, d);
    let mut out = String::new();
    let _ = writeln!(out, "[UNITS]");
    let _ = writeln!(out, "length = {}", u.length_unit);
    let _ = writeln!(out, "force = {}", u.force_unit);
    let _ = writeln!(out);
    let _ = writeln!(out, "[GEOMETRY]");
    let _ = writeln!(out, "bays = {}", spec.n_bays);
    let stories: Vec<String> = spec.stories_per_bay.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "stories_per_bay = {}", stories.join(", "));
    let _ = writeln!(
        out,
        "bay_widths = {} {}",
        join_nums(spec.bay_widths.iter().copied()),
        spell(Dimension::LENGTH)
    );
    let _ = writeln!(
        out,
        "story_heights = {} {}",
        join_nums(spec.story_heights.iter().copied()),
        spell(Dimension::LENGTH)
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "[SUPPORTS]");
    let _ = writeln!(out, "base = {}", spec.support_kind);
    let _ = writeln!(out);
    let _ = writeln!(out, "[MATERIALS]");
    for (label, s) in [
        ("column", &spec.column_section),
        ("girder", &spec.girder_section),
    ] {
        let _ = writeln!(
            out,
            "{label}: E = {} {}, A = {} {}, I = {} {}",
            num(s.youngs_modulus),
            spell(Dimension::STRESS),
            num(s.area),
            spell(Dimension::AREA),
            num(s.moment_of_inertia),
            spell(Dimension::INERTIA),
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "[LOADS]");
    let _ = writeln!(
        out,
        "lateral_per_floor = {} {}",
        num(spec.lateral_load_per_floor),
        spell(Dimension::FORCE)
    );
    let _ = writeln!(
        out,
        "gravity_udl = {} {}",
        num(spec.gravity_udl),
        spell(Dimension::LINE_LOAD)
    );
    for p in &spec.extra_point_loads {
        let _ = writeln!(
            out,
            "point = x {}, y {}, fx {}, fy {}, mz {}",
            num(p.x),
            num(p.y),
            num(p.fx),
            num(p.fy),
            num(p.mz)
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "[TARGET]");
    let _ = writeln!(out, "software = {}", spec.target.name());
    out
}
